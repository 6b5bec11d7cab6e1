"""Legendre analysis: canonical momenta, primary constraints, H0, HJPDE set.

Velocity solvability is decided by graded Gaussian elimination over the
fraction field on the linear system dL/dv = p. Pivots must be even and
invertible; non-scalar pivots add nonvanishing side conditions to the model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernel as K
from .dsl import Model
from .errors import DeclarationError, InternalConsistencyError, UnsupportedModelError
from .kernel import EVEN, ODD, Generator, GradedExpr


@dataclass
class MomentumEntry:
    coordinate: Generator
    velocity: Generator
    momentum: Generator
    defining: GradedExpr  # right derivative of L by the velocity
    solvable: bool
    w: GradedExpr | None  # solved velocity, when solvable
    constraint_value: GradedExpr | None  # velocity-free forced value, when not


@dataclass
class MomentumTable:
    entries: list
    by_coordinate: dict = field(default_factory=dict)

    def __post_init__(self):
        self.by_coordinate = {e.coordinate: e for e in self.entries}

    def momenta(self):
        return [e.momentum for e in self.entries]

    def solved_bindings(self):
        return {e.velocity: e.w for e in self.entries if e.solvable}


def momentum_name(coord: Generator) -> str:
    """Momentum naming: the canonical pair x <-> p, pi_<name> otherwise."""
    if coord.base == "x":
        return f"p{coord.component}"
    if coord.name == "x":
        return "p"
    return f"pi_{coord.name}"


def _velocity_degree(m: K.Monomial) -> int:
    deg = sum(p for g, p in m.even if g.kind == "velocity")
    deg += sum(1 for g in m.odd if g.kind == "velocity")
    return deg


def _extract_velocity_linear(expr: GradedExpr, velocities):
    """Split expr into sum(coeff_v * v) + rest with coefficients on the left.

    Raises if any monomial contains more than one velocity factor.
    """
    vset = set(velocities)
    coeffs = {}
    rest_monomials = []
    for m in expr.num:
        vs_even = [(g, p) for g, p in m.even if g in vset]
        vs_odd = [g for g in m.odd if g in vset]
        count = sum(p for _, p in vs_even) + len(vs_odd)
        if count == 0:
            rest_monomials.append(m)
            continue
        if count > 1:
            raise UnsupportedModelError(
                "momentum relation is nonlinear in velocities")
        if vs_even:
            v = vs_even[0][0]
            even = tuple((g, p - 1 if g == v else p) for g, p in m.even
                         if not (g == v and p == 1))
            part = K.Monomial(m.coeff, even, m.odd)
        else:
            v = vs_odd[0]
            j = m.odd.index(v)
            k = len(m.odd)
            sign = (-1) ** (k - 1 - j)
            coeff = m.coeff if sign > 0 else -m.coeff
            part = K.Monomial(coeff, m.even, m.odd[:j] + m.odd[j + 1:])
        term = GradedExpr._make((part,), expr.den)
        coeffs[v] = coeffs.get(v, K.ZERO) + term
    rest = GradedExpr._make(tuple(rest_monomials), expr.den) if rest_monomials else K.ZERO
    return coeffs, rest


def _invertible_even(expr: GradedExpr) -> bool:
    if expr.is_zero():
        return False
    if expr.parity() != EVEN:
        return False
    return all(not m.odd for m in expr.num)


def compute_momenta(model: Model) -> MomentumTable:
    lagrangian = model.lagrangian
    for m in lagrangian.num:
        if _velocity_degree(m) > 2:
            raise UnsupportedModelError("lagrangian is cubic or higher in velocities")

    coords = model.coordinates()
    taken = {g.name for d in model.declarations for g in d.gens + d.velocities}
    next_ordinal = max(g.ordinal for d in model.declarations
                       for g in d.gens + d.velocities) + 1
    momenta = {}
    for c in coords:
        name = momentum_name(c)
        if name in taken:
            raise DeclarationError(f"momentum name {name!r} clashes with a declaration")
        taken.add(name)
        family = None
        if c.base is not None:
            family = "p" if c.base == "x" else f"pi_{c.base}"
        momenta[c] = Generator(name=name, parity=c.parity, kind="momentum",
                               ordinal=next_ordinal, component=c.component,
                               base=family, linked=c.ordinal)
        next_ordinal += 1

    velocities = [model.velocity_of(c) for c in coords]
    equations = {}
    defining = {}
    for c in coords:
        v = model.velocity_of(c)
        d = K.derive_right(lagrangian, v)
        defining[c] = d
        equations[c] = d - K.atom(momenta[c])

    solved = {}
    remaining = dict(equations)
    progress = True
    while progress:
        progress = False
        for c in list(remaining):
            eq = K.substitute(remaining[c], solved) if solved else remaining[c]
            coeffs, _ = _extract_velocity_linear(eq, velocities)
            own = model.velocity_of(c)
            pivot_order = ([own] if own in coeffs else []) + [
                v for v in coeffs if v != own]
            for v in pivot_order:
                cv = coeffs[v]
                if not _invertible_even(cv):
                    continue
                rest = eq - cv * K.atom(v)
                w = -(K.ONE / cv) * rest
                solved[v] = w
                pivot_num = GradedExpr(cv.num)
                if not pivot_num.is_scalar():
                    from .dsl import _add_side_condition

                    _add_side_condition(model, pivot_num)
                del remaining[c]
                progress = True
                break

    # chase solved velocities until each solution is velocity-free
    for _ in range(len(solved) + 1):
        changed = False
        for v, w in list(solved.items()):
            if any(g.kind == "velocity" for g in w.generators()):
                solved[v] = K.substitute(w, solved)
                changed = True
        if not changed:
            break
    else:
        raise UnsupportedModelError("velocity elimination did not terminate")

    entries = []
    for c in coords:
        v = model.velocity_of(c)
        if v in solved:
            entries.append(MomentumEntry(c, v, momenta[c], defining[c], True,
                                         solved[v], None))
        else:
            value = K.substitute(defining[c], solved) if solved else defining[c]
            if any(g.kind == "velocity" for g in value.generators()):
                raise UnsupportedModelError(
                    f"constraint for {c.name} still depends on velocities")
            entries.append(MomentumEntry(c, v, momenta[c], defining[c], False,
                                         None, value))

    table = MomentumTable(entries)
    _check_resubstitution(table)
    return table


def _check_resubstitution(table: MomentumTable):
    bindings = table.solved_bindings()
    for e in table.entries:
        if e.solvable:
            back = K.substitute(e.defining, bindings)
            if not K.equals(back, K.atom(e.momentum)):
                raise InternalConsistencyError(
                    f"solved velocity for {e.coordinate.name} fails re-substitution")


def canonical_h0(model: Model, table: MomentumTable) -> GradedExpr:
    """H0 = sum(momentum * velocity) - L with solved velocities eliminated.

    Momenta of unsolvable coordinates enter through their forced values, so
    the unsolved velocities must cancel exactly against L; that cancellation
    is asserted, not assumed.
    """
    h = K.ZERO
    for e in table.entries:
        factor = K.atom(e.momentum) if e.solvable else e.constraint_value
        h = h + factor * K.atom(e.velocity)
    h = h - model.lagrangian
    h = K.substitute(h, table.solved_bindings())
    if any(g.kind == "velocity" for g in h.generators()):
        raise InternalConsistencyError("canonical hamiltonian retains velocities")
    return h


@dataclass
class HMember:
    """One member of the HJPDE family: expression, its momentum, its leg."""

    name: str
    expr: GradedExpr
    momentum: Generator
    leg: Generator  # differential this member is paired with (tau or a coordinate)
    coordinate: Generator | None


@dataclass
class HamiltonianSet:
    h0: GradedExpr
    members: list  # HMember, the tau member first
    parameters: list  # tau plus every coordinate with a constrained momentum
    tau_momentum: Generator
    next_index: int  # first free H-number for secondary constraints

    def constraint_members(self):
        return self.members[1:]


def build_hjpde(model: Model, table: MomentumTable, h0: GradedExpr) -> HamiltonianSet:
    next_ordinal = max(e.momentum.ordinal for e in table.entries) + 1 if table.entries \
        else max(g.ordinal for d in model.declarations for g in d.gens + d.velocities) + 1
    p_tau = Generator(name=f"p_{model.parameter.name}", parity=EVEN, kind="momentum",
                      ordinal=next_ordinal, linked=model.parameter.ordinal)

    members = [HMember("H0", K.atom(p_tau) + h0, p_tau, model.parameter, None)]
    parameters = [model.parameter]
    index = 0
    seen_decl = None
    for e in table.entries:
        if e.solvable:
            continue
        decl = model.declaration_of(e.coordinate)
        if decl is not seen_decl:
            index += 1
            seen_decl = decl
        name = f"H{index}_{e.coordinate.component}" if decl.is_family else f"H{index}"
        expr = K.atom(e.momentum) - e.constraint_value
        parity = expr.parity()
        if parity is not None and parity != e.momentum.parity:
            raise InternalConsistencyError(f"constraint {name} has wrong parity")
        members.append(HMember(name, expr, e.momentum, e.coordinate, e.coordinate))
        parameters.append(e.coordinate)
    return HamiltonianSet(h0, members, parameters, p_tau, index + 1)
