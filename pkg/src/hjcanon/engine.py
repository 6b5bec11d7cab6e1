"""Total differential equations, integrability closure, canonical action.

One-forms are plain dicts {leg Generator: coefficient GradedExpr}; the leg
generator stands for its differential (tau for d tau, a coordinate c for dc).
Coefficients always sit to the left of the differential.

Sign conventions. The evolution equations are applied as

    dq = +(dH'_a/dp_q) dt_a      dp_c = +(dH'_a/dc) dt_a

with left derivatives on odd arguments, and total variations use right
derivatives, dF = sum (d_r F/dv) dv. The positive sign in the momentum
equation and the derivative sides are a single global calibration choice,
fixed so the bundled spinning-particle model reproduces its documented
reference solution; see reference.py.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key
from itertools import permutations

from . import kernel as K
from .dsl import Model
from .errors import ClosureError, InternalConsistencyError
from .kernel import Generator, GradedExpr
from .legendre import HamiltonianSet, MomentumTable

OneForm = dict  # Generator -> GradedExpr


def of_add(a: OneForm, b: OneForm) -> OneForm:
    out = dict(a)
    for leg, c in b.items():
        s = out.get(leg, K.ZERO) + c
        if s.is_zero():
            out.pop(leg, None)
        else:
            out[leg] = s
    return out


def of_scale_left(factor: GradedExpr, form: OneForm) -> OneForm:
    out = {}
    for leg, c in form.items():
        s = factor * c
        if not s.is_zero():
            out[leg] = s
    return out


def of_equal(a: OneForm, b: OneForm) -> bool:
    legs = set(a) | set(b)
    return all(K.equals(a.get(l, K.ZERO), b.get(l, K.ZERO)) for l in legs)


def of_substitute_legs(form: OneForm, determined: dict) -> OneForm:
    """Fold determined coordinate differentials into a one-form (to fixpoint)."""
    for _ in range(len(determined) + 1):
        hit = [leg for leg in form if leg in determined]
        if not hit:
            return form
        out = {leg: c for leg, c in form.items() if leg not in determined}
        for leg in hit:
            out = of_add(out, of_scale_left(form[leg], determined[leg]))
        form = out
    raise ClosureError("cyclic differential determination")


@dataclass
class TotalDifferentialSystem:
    oneforms: dict  # Generator (coordinate or momentum) -> OneForm
    dz: OneForm
    legs: list  # tau followed by constrained coordinates
    hs: HamiltonianSet
    model: Model
    table: MomentumTable

    def undetermined_coordinates(self):
        return [g for g in self.legs[1:]]


def build_tdes(model: Model, table: MomentumTable, hs: HamiltonianSet) -> TotalDifferentialSystem:
    oneforms = {}
    solvable = [e for e in table.entries if e.solvable]

    for e in solvable:
        form = {}
        for member in hs.members:
            c = K.derive_left(member.expr, e.momentum)
            if not c.is_zero():
                form[member.leg] = c
        oneforms[e.coordinate] = form

    momentum_pairs = [(e.momentum, e.coordinate) for e in table.entries]
    momentum_pairs.append((hs.tau_momentum, model.parameter))
    for p, c in momentum_pairs:
        form = {}
        for member in hs.members:
            coeff = K.derive_left(member.expr, c)
            if not coeff.is_zero():
                form[member.leg] = coeff
        oneforms[p] = form

    for g, form in oneforms.items():
        for leg, c in form.items():
            if any(h.kind == "velocity" for h in c.generators()):
                raise InternalConsistencyError(
                    f"velocity appears in the rate of {g.name}")

    dz = {}
    for member in hs.members:
        h_alpha = member.expr - K.atom(member.momentum)
        coeff = -h_alpha
        for e in solvable:
            coeff = coeff + K.atom(e.momentum) * K.derive_left(member.expr, e.momentum)
        if not coeff.is_zero():
            dz[member.leg] = coeff

    legs = [member.leg for member in hs.members]
    return TotalDifferentialSystem(oneforms, dz, legs, hs, model, table)


def total_variation(expr: GradedExpr, tdes: TotalDifferentialSystem,
                    determined: dict | None = None) -> OneForm:
    """Chain-rule differential dF = sum (d_r F/dv) dv over the system's flows.

    Undetermined coordinate differentials stay symbolic (identity legs);
    determined ones are folded in.
    """
    determined = determined or {}
    out: OneForm = {}
    for g in sorted(expr.generators(), key=lambda g: g.ordinal):
        c = K.derive_right(expr, g)
        if c.is_zero():
            continue
        if g.kind == "constant":
            continue
        if g in tdes.oneforms:
            dv = tdes.oneforms[g]
        elif g.kind in ("coordinate", "parameter"):
            dv = {g: K.ONE}
        else:
            raise InternalConsistencyError(f"no flow for generator {g.name}")
        out = of_add(out, of_scale_left(c, dv))
    return of_substitute_legs(out, determined)


# -- linear reduction ---------------------------------------------------------

# Reduction term order: total degree, then exponent at the earliest position
# wins, with momenta ranked first. Every primary constraint then has its
# momentum as leading monomial, so reduction eliminates momenta and never
# rewrites bare coordinate monomials through a primary.
REDUCTION_RANK = {"momentum": 0, "coordinate": 1, "velocity": 2,
                  "parameter": 3, "constant": 4}


def _exponent_map(m: K.Monomial):
    exps = {(REDUCTION_RANK[g.kind], g.ordinal): p for g, p in m.even}
    for g in m.odd:
        exps[(REDUCTION_RANK[g.kind], g.ordinal)] = 1
    return exps


def _deglex_cmp(a: K.Monomial, b: K.Monomial) -> int:
    da, db = a.degree(), b.degree()
    if da != db:
        return da - db
    ea, eb = _exponent_map(a), _exponent_map(b)
    for pos in sorted(set(ea) | set(eb)):
        pa, pb = ea.get(pos, 0), eb.get(pos, 0)
        if pa != pb:
            return pa - pb
    return 0


_DEGLEX_KEY = cmp_to_key(_deglex_cmp)


def _lead(poly):
    return max(poly, key=_DEGLEX_KEY)


def _divide_monomial(m: K.Monomial, lead: K.Monomial):
    """Return q with q*lead == m, or None when lead does not divide m."""
    lead_even = dict(lead.even)
    even = []
    for g, p in m.even:
        need = lead_even.pop(g, 0)
        if p < need:
            return None
        if p > need:
            even.append((g, p - need))
    if lead_even:
        return None
    if not set(lead.odd) <= set(m.odd):
        return None
    odd = tuple(g for g in m.odd if g not in set(lead.odd))
    probe = K.Monomial(K.S_ONE, tuple(even), odd)
    prod = K.mul_monomials(probe, lead)
    if prod is None:
        return None
    return K.Monomial(m.coeff / prod.coeff, tuple(even), odd)


class ConstraintBasis:
    """Den-cleared, monic constraint expressions prepared for reduction."""

    def __init__(self, named_exprs):
        self.items = []
        for name, expr in named_exprs:
            poly = expr.num  # den-cleared: num == 0 is the same surface
            if not poly:
                continue
            self.items.append((name, poly, _lead(poly)))
        self.items.sort(key=lambda t: _DEGLEX_KEY(t[2]), reverse=True)

    def reduce(self, expr: GradedExpr):
        """Reduce expr modulo the basis; returns (remainder, witness).

        witness maps constraint name -> GradedExpr q with
        expr = remainder + sum q * constraint.
        """
        work = list(expr.num)
        den = expr.den
        witness = {}
        guard = 0
        changed = True
        while changed:
            changed = False
            for m in sorted(work, key=_DEGLEX_KEY, reverse=True):
                for name, poly, lead in self.items:
                    q = _divide_monomial(m, lead)
                    if q is None:
                        continue
                    qpoly = (q,)
                    work = list(K._poly(tuple(work) + K._poly_neg(K._poly_mul(qpoly, poly))))
                    qexpr = GradedExpr._make(qpoly, den)
                    witness[name] = witness.get(name, K.ZERO) + qexpr
                    changed = True
                    break
                if changed:
                    break
            guard += 1
            if guard > 10000:
                raise ClosureError("linear reduction did not terminate")
        remainder = GradedExpr._make(tuple(work), den) if work else K.ZERO
        witness = {n: q for n, q in witness.items() if not q.is_zero()}
        return remainder, witness


def reduce_oneform(form: OneForm, basis: ConstraintBasis):
    remainder: OneForm = {}
    witness = {}
    for leg in sorted(form, key=lambda g: g.ordinal):
        rem, wit = basis.reduce(form[leg])
        if not rem.is_zero():
            remainder[leg] = rem
        for name, q in wit.items():
            witness.setdefault(name, {})[leg] = q
    return remainder, witness


# -- closure -------------------------------------------------------------------


@dataclass
class NewConstraint:
    name: str
    expr: GradedExpr
    source: str
    leg: Generator


@dataclass
class DeterminedDifferential:
    coordinate: Generator
    form: OneForm
    source: str


@dataclass
class ReducedToConstraints:
    source: str
    witness: dict  # constraint name -> OneForm of coefficients


@dataclass
class IdenticallyZero:
    source: str


@dataclass
class ClosureLedger:
    events: list
    secondary: list  # (name, GradedExpr), in creation order
    determined: dict  # coordinate Generator -> OneForm over free legs
    final_status: list  # IdenticallyZero / ReducedToConstraints per active member
    passes: int
    status: str  # "closed"

    def constraints(self):
        return list(self.secondary)

    def free_parameters(self, tdes: TotalDifferentialSystem):
        return [g for g in tdes.legs if g not in self.determined]


def _monic(expr: GradedExpr) -> GradedExpr:
    poly = expr.num
    lead = _lead(poly)
    return GradedExpr(poly) / GradedExpr((K.Monomial(lead.coeff),))


def closure(hs: HamiltonianSet, tdes: TotalDifferentialSystem,
            order: list | None = None) -> ClosureLedger:
    """Iterate the consistency conditions dH' = 0 until nothing new appears.

    Each pass first solves variations for determinable differentials (a leg
    whose coefficient is an invertible scalar), then extracts new constraints
    from leg coefficients that do not reduce to the active constraint set.
    """
    members = list(hs.members)
    if order is not None:
        members = [members[i] for i in order]

    active = [(m.name, m.expr) for m in members]
    reducible = [(n, e) for n, e in active if n != "H0"]
    determined: dict = {}
    events = []
    secondary = []
    next_index = hs.next_index
    undetermined = set(tdes.undetermined_coordinates())

    n_phase = len(tdes.oneforms) + len(tdes.legs)
    passes = 0
    for _ in range(n_phase):
        passes += 1
        changed = False

        # phase A: determinations
        stable = False
        while not stable:
            stable = True
            for name, expr in active:
                v = total_variation(expr, tdes, determined)
                for leg in sorted(v, key=lambda g: g.ordinal):
                    if leg not in undetermined or leg in determined:
                        continue
                    c = v[leg]
                    if not c.is_scalar():
                        continue
                    rest = {l: cc for l, cc in v.items() if l is not leg}
                    inv = -(K.ONE / c)
                    form = of_scale_left(inv, rest)
                    determined[leg] = form
                    for other in list(determined):
                        determined[other] = of_substitute_legs(
                            determined[other], {leg: form})
                    events.append(DeterminedDifferential(leg, form, name))
                    changed = True
                    stable = False
                    break
                if not stable:
                    break

        # phase B: constraint extraction
        for name, expr in list(active):
            v = total_variation(expr, tdes, determined)
            if not v:
                continue
            basis = ConstraintBasis(reducible)
            remainder, _ = reduce_oneform(v, basis)
            if not remainder:
                continue
            if any(leg in undetermined and leg not in determined for leg in remainder):
                continue  # deferred: differentials may still be determined later
            for leg in sorted(remainder, key=lambda g: g.ordinal):
                c = remainder[leg]
                if c.is_scalar():
                    raise ClosureError(
                        f"variation of {name} forces a nonzero constant to vanish")
                candidate = _monic(c)
                rem, _ = ConstraintBasis(reducible).reduce(candidate)
                if rem.is_zero():
                    continue
                cname = f"H{next_index}"
                next_index += 1
                active.append((cname, candidate))
                reducible.append((cname, candidate))
                secondary.append((cname, candidate))
                events.append(NewConstraint(cname, candidate, name, leg))
                changed = True

        if not changed:
            break
    else:
        raise ClosureError("consistency loop exceeded the phase-space cap")

    # verification pass: every variation must now vanish modulo the active set
    final_status = []
    basis = ConstraintBasis(reducible)
    for name, expr in active:
        v = total_variation(expr, tdes, determined)
        if not v:
            final_status.append(IdenticallyZero(name))
            continue
        remainder, witness = reduce_oneform(v, basis)
        if remainder:
            raise ClosureError(f"variation of {name} does not close")
        final_status.append(ReducedToConstraints(name, witness))

    return ClosureLedger(events, secondary, determined, final_status, passes, "closed")


def closure_order_independent(hs: HamiltonianSet, tdes: TotalDifferentialSystem):
    """Run closure under every permutation of the member groups.

    Members sharing an H-number (a 4-component family) stay together.
    Returns the list of ledgers; callers compare spans and determinations.
    """
    groups = {}
    for i, m in enumerate(hs.members):
        key = m.name.split("_")[0]
        groups.setdefault(key, []).append(i)
    keys = list(groups)
    ledgers = []
    for perm in permutations(keys):
        order = [i for k in perm for i in groups[k]]
        ledgers.append(closure(hs, tdes, order=order))
    return ledgers


def same_constraint_span(a: list, b: list) -> bool:
    """Mutual linear reduction of two named constraint lists."""
    basis_a = ConstraintBasis(a)
    basis_b = ConstraintBasis(b)
    for _, expr in a:
        rem, _ = basis_b.reduce(expr)
        if not rem.is_zero():
            return False
    for _, expr in b:
        rem, _ = basis_a.reduce(expr)
        if not rem.is_zero():
            return False
    return True


# -- canonical action -----------------------------------------------------------


def action_integrand(tdes: TotalDifferentialSystem, ledger: ClosureLedger) -> OneForm:
    """dZ over the free parameters, determined differentials substituted."""
    return of_substitute_legs(dict(tdes.dz), ledger.determined)


def recover_action(model: Model, table: MomentumTable,
                   tdes: TotalDifferentialSystem, ledger: ClosureLedger):
    """Test whether the canonical integrand reproduces L dtau.

    Momentum generators are replaced by their defining expressions and each
    unsolved velocity in L by the tau-coefficient of its determined
    differential. Returns (bool, residual one-form).
    """
    integrand = action_integrand(tdes, ledger)
    momentum_bindings = {}
    for e in table.entries:
        momentum_bindings[e.momentum] = e.defining if e.solvable else e.constraint_value

    lhs = {}
    for leg, c in integrand.items():
        s = K.substitute(c, momentum_bindings)
        if not s.is_zero():
            lhs[leg] = s

    tau = model.parameter
    velocity_bindings = {}
    for e in table.entries:
        if e.solvable:
            continue
        form = ledger.determined.get(e.coordinate)
        if form is None:
            if model.lagrangian.depends_on(e.velocity):
                return False, {tau: model.lagrangian}
            continue
        rate = form.get(tau, K.ZERO)
        velocity_bindings[e.velocity] = K.substitute(rate, momentum_bindings)
    rhs = K.substitute(model.lagrangian, velocity_bindings)

    residual = of_add(lhs, {tau: -rhs})
    ok = not residual
    return ok, residual
