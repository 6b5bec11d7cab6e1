"""Graded Poisson brackets and first/second-class constraint classification.

Bracket convention, fixed once for the whole package:

    {A, B} = sum_q [ (d_r A/dq)(d_l B/dp_q)
                     - (-1)^{|A||B|} (d_r B/dq)(d_l A/dp_q) ]

summed over canonical pairs (q, p_q). Even pairs give {x, p} = 1; the odd
sector is calibrated so that the constraint bracket matrix maps onto the
quantizer's anticommutator relations under  anticommutator = bracket / 2i.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernel as K
from .engine import ConstraintBasis
from .kernel import EVEN, ODD, GradedExpr
from .legendre import MomentumTable


def _homogeneous_parts(expr: GradedExpr):
    """Split into (even part, odd part)."""
    even = tuple(m for m in expr.num if m.parity() == EVEN)
    odd = tuple(m for m in expr.num if m.parity() == ODD)
    mk = lambda p: GradedExpr._make(p, expr.den) if p else K.ZERO
    return mk(even), mk(odd)


def graded_poisson(a: GradedExpr, b: GradedExpr, pairs) -> GradedExpr:
    """Graded Poisson bracket over the given (coordinate, momentum) pairs."""
    a = K.as_expr(a)
    b = K.as_expr(b)
    pa = a.parity()
    pb = b.parity()
    if pa is None and not a.is_zero():
        ae, ao = _homogeneous_parts(a)
        return graded_poisson(ae, b, pairs) + graded_poisson(ao, b, pairs)
    if pb is None and not b.is_zero():
        be, bo = _homogeneous_parts(b)
        return graded_poisson(a, be, pairs) + graded_poisson(a, bo, pairs)
    if a.is_zero() or b.is_zero():
        return K.ZERO
    sign = -1 if (pa and pb) else 1
    total = K.ZERO
    for q, p in pairs:
        term = K.derive_right(a, q) * K.derive_left(b, p)
        swap = K.derive_right(b, q) * K.derive_left(a, p)
        total = total + term - (swap if sign > 0 else -swap)
    return total


def canonical_pairs(table: MomentumTable):
    return [(e.coordinate, e.momentum) for e in table.entries]


@dataclass
class BracketTable:
    names: list
    entries: dict  # (name_i, name_j) -> GradedExpr, all ordered pairs
    classification: dict  # name -> "first" | "second"
    constant_group: list  # second-class subset with constant mutual brackets
    constant_matrix: dict  # (name_i, name_j) -> GradedExpr over the group


def classify(constraints, table: MomentumTable) -> BracketTable:
    """Classify constraints by whether their brackets reduce to constraints.

    ``constraints`` is a list of (name, GradedExpr): the primary constraints
    plus everything the closure produced. A constraint is first class when
    each of its brackets with the full list reduces, by the same graded
    linear elimination the closure uses, to a combination of constraints.
    """
    pairs = canonical_pairs(table)
    names = [n for n, _ in constraints]
    exprs = dict(constraints)
    basis = ConstraintBasis(constraints)

    entries = {}
    for ni in names:
        for nj in names:
            entries[(ni, nj)] = graded_poisson(exprs[ni], exprs[nj], pairs)

    classification = {}
    for ni in names:
        first = True
        for nj in names:
            rem, _ = basis.reduce(entries[(ni, nj)])
            if not rem.is_zero():
                first = False
                break
        classification[ni] = "first" if first else "second"

    group = [n for n in names if classification[n] == "second"]
    while True:
        bad = {n: sum(1 for m in group if not entries[(n, m)].is_scalar())
               for n in group}
        worst = max(bad.values(), default=0)
        if worst == 0:
            break
        # drop the member with the most non-constant brackets; ties drop the
        # latest-named one, keeping the earliest primaries in the group
        victim = max((n for n in group if bad[n] == worst), key=group.index)
        group.remove(victim)
    matrix = {(ni, nj): entries[(ni, nj)] for ni in group for nj in group}
    return BracketTable(names, entries, classification, group, matrix)
