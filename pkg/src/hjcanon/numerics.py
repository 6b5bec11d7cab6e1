"""Trajectory integration of the closed system in a finite Grassmann algebra.

The closed total differential system assigns each phase variable a one-form
over the free parameters (tau, plus any coordinates left undetermined, such
as the einbein and the odd multiplier). Free parameters evolve along caller
supplied curves; everything else is integrated with classic fixed-step RK4.
Variables whose rate is identically zero are held constant rather than
integrated. Seeding: each odd coordinate starts on its own odd unit, the odd
parameter curve rides the last unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernel as K
from .engine import ClosureLedger, TotalDifferentialSystem, of_substitute_legs
from .errors import ClosureError, DimensionError, DomainError, InternalConsistencyError
from .grassmann import GrassmannValue, blade_sign
from .kernel import EVEN, ODD, Generator


@dataclass
class Curve:
    """Parameter curve c(tau) = const; derivative is zero."""

    value: float

    def at(self, tau: float) -> float:
        return self.value

    def rate(self, tau: float) -> float:
        return 0.0


@dataclass
class TrajectoryState:
    tau: float
    values: dict  # Generator -> GrassmannValue


@dataclass
class IntegrationSetup:
    tdes: TotalDifferentialSystem
    ledger: ClosureLedger
    n_units: int
    constants: dict  # constant Generator -> float
    curves: dict  # free parameter coordinate Generator -> Curve
    chi_units: dict  # odd free parameter Generator -> unit index
    flows: dict = field(default_factory=dict)  # var -> folded OneForm
    compiled: dict = field(default_factory=dict)  # var -> [(leg, Compiled)]

    def __post_init__(self):
        for var, form in self.tdes.oneforms.items():
            self.flows[var] = of_substitute_legs(dict(form), self.ledger.determined)
        for coord, form in self.ledger.determined.items():
            self.flows[coord] = dict(form)
        for var, form in self.flows.items():
            self.compiled[var] = [(leg, Compiled(c)) for leg, c in form.items()]

    def state_variables(self):
        return list(self.flows)


def make_setup(tdes: TotalDifferentialSystem, ledger: ClosureLedger,
               n_units: int | None = None, constants: dict | None = None,
               curves: dict | None = None) -> IntegrationSetup:
    model = tdes.model
    free = ledger.free_parameters(tdes)
    odd_state = [e.coordinate for e in tdes.table.entries
                 if e.coordinate.parity == ODD and e.coordinate not in free]
    odd_free = [g for g in free if g.parity == ODD]
    needed = len(odd_state) + len(odd_free)
    if n_units is None:
        n_units = max(needed, 6)
    if n_units < needed:
        raise DimensionError(f"need at least {needed} odd units, got {n_units}")

    const_map = {}
    for d in model.declarations:
        if d.role == "constant":
            for g in d.gens:
                const_map[g] = float((constants or {}).get(d.name, 1.0))

    curve_map = {}
    chi_units = {}
    next_unit = n_units
    for g in free:
        if g.kind == "parameter":
            continue
        c = (curves or {}).get(g.name)
        if g.parity == ODD:
            chi_units[g] = next_unit
            next_unit -= 1
            curve_map[g] = c if c is not None else Curve(0.0)
        else:
            curve_map[g] = c if c is not None else Curve(1.0)
    return IntegrationSetup(tdes, ledger, n_units, const_map, curve_map, chi_units)


def default_initial_state(setup: IntegrationSetup, even_values: dict | None = None,
                          odd_amplitudes: dict | None = None) -> TrajectoryState:
    """Build a start state.

    ``even_values`` maps names of even coordinates/momenta to floats
    (default 0.0); ``odd_amplitudes`` maps odd coordinate names to complex
    seeds (default 1.0) placed each on its own odd unit. Momenta of
    unsolvable coordinates start on the primary constraint surface, the
    evolution parameter's momentum starts at -H0.
    """
    even_values = even_values or {}
    odd_amplitudes = odd_amplitudes or {}
    n = setup.n_units
    values: dict = {}
    unit = 1
    table = setup.tdes.table
    free = set(setup.curves)
    for e in table.entries:
        c = e.coordinate
        if c in free:
            continue  # free parameters evolve along their curves
        if c.parity == ODD:
            amp = complex(odd_amplitudes.get(c.name, 1.0))
            values[c] = GrassmannValue.unit(n, unit, amp)
            unit += 1
        else:
            values[c] = GrassmannValue.scalar(n, float(even_values.get(c.name, 0.0)))
    for e in table.entries:
        if e.solvable:
            values[e.momentum] = GrassmannValue.scalar(
                n, float(even_values.get(e.momentum.name, 0.0)))
    env = _environment(setup, 0.0, values)
    for e in table.entries:
        if not e.solvable:
            values[e.momentum] = evaluate(e.constraint_value, env, n)
    h0 = setup.tdes.hs.h0
    env = _environment(setup, 0.0, values)
    values[setup.tdes.hs.tau_momentum] = evaluate(h0, env, n).scale(-1.0)
    return TrajectoryState(0.0, values)


def _environment(setup: IntegrationSetup, tau: float, values: dict) -> dict:
    env = dict(values)
    n = setup.n_units
    for g, v in setup.constants.items():
        env[g] = GrassmannValue.scalar(n, v)
    env[setup.tdes.model.parameter] = GrassmannValue.scalar(n, tau)
    for g, curve in setup.curves.items():
        if g.parity == ODD:
            env[g] = GrassmannValue.unit(n, setup.chi_units[g], curve.at(tau))
        else:
            env[g] = GrassmannValue.scalar(n, curve.at(tau))
    return env


def _raw_mul(a: dict, b: dict) -> dict:
    out = {}
    for ba, ca in a.items():
        for bb, cb in b.items():
            if ba & bb:
                continue
            blade = ba | bb
            term = ca * cb * blade_sign(ba, bb)
            s = out.get(blade, 0j) + term
            if s == 0:
                out.pop(blade, None)
            else:
                out[blade] = s
    return out


def _raw_inv(a: dict, n_units: int) -> dict:
    body = a.get(0, 0j)
    if abs(body) < 1e-300:
        raise ZeroDivisionError("grassmann value has zero body")
    soul = {b: c for b, c in a.items() if b != 0}
    out = {0: 1.0 / body}
    power = {0: 1.0 + 0j}
    for k in range(1, n_units // 2 + 2):
        power = _raw_mul(power, soul)
        if not power:
            break
        scale = (-1) ** k / body ** (k + 1)
        for b, c in power.items():
            out[b] = out.get(b, 0j) + scale * c
    return out


def _compile_poly(monomials):
    """Flatten monomials to (complex coefficient, generator factor tuple)."""
    terms = []
    for m in monomials:
        gens = []
        for g, p in m.even:
            gens.extend([g] * p)
        gens.extend(m.odd)
        terms.append((m.coeff.to_complex(), tuple(gens)))
    return terms


def _eval_terms(terms, env: dict) -> dict:
    out = {}
    for c, gens in terms:
        cur = {0: c}
        for g in gens:
            cur = _raw_mul(cur, env[g])
            if not cur:
                break
        for b, v in cur.items():
            s = out.get(b, 0j) + v
            if s == 0:
                out.pop(b, None)
            else:
                out[b] = s
    return out


class Compiled:
    """Expression precompiled for repeated Grassmann evaluation."""

    def __init__(self, expr: K.GradedExpr):
        self.num_terms = _compile_poly(expr.num)
        self.den_terms = None if expr.den == (K.ONE_MONOMIAL,) else _compile_poly(expr.den)

    def eval_raw(self, env: dict, n_units: int) -> dict:
        num = _eval_terms(self.num_terms, env)
        if self.den_terms is None:
            return num
        return _raw_mul(num, _raw_inv(_eval_terms(self.den_terms, env), n_units))


def evaluate(expr: K.GradedExpr, env: dict, n_units: int) -> GrassmannValue:
    """Evaluate a symbolic expression over a Grassmann-valued environment."""
    raw_env = {g: v.coeffs for g, v in env.items()}
    return GrassmannValue(n_units, Compiled(expr).eval_raw(raw_env, n_units))


def _environment_raw(setup: IntegrationSetup, tau: float, values_raw: dict) -> dict:
    env = dict(values_raw)
    for g, v in setup.constants.items():
        env[g] = {0: complex(v)} if v else {}
    env[setup.tdes.model.parameter] = {0: complex(tau)} if tau else {}
    for g, curve in setup.curves.items():
        v = curve.at(tau)
        if g.parity == ODD:
            env[g] = {1 << (setup.chi_units[g] - 1): complex(v)} if v else {}
        else:
            env[g] = {0: complex(v)} if v else {}
    return env


def _rates_raw(setup: IntegrationSetup, tau: float, values_raw: dict) -> dict:
    env = _environment_raw(setup, tau, values_raw)
    n = setup.n_units
    tau_gen = setup.tdes.model.parameter
    out = {}
    for var, legs in setup.compiled.items():
        if not legs:
            continue
        rate: dict = {}
        for leg, comp in legs:
            if leg == tau_gen:
                piece = comp.eval_raw(env, n)
            else:
                curve = setup.curves.get(leg)
                if curve is None:
                    raise ClosureError(f"no curve for free parameter {leg.name}")
                r = curve.rate(tau)
                if r == 0.0:
                    continue
                leg_rate = ({1 << (setup.chi_units[leg] - 1): complex(r)}
                            if leg.parity == ODD else {0: complex(r)})
                piece = _raw_mul(comp.eval_raw(env, n), leg_rate)
            for b, c in piece.items():
                s = rate.get(b, 0j) + c
                if s == 0:
                    rate.pop(b, None)
                else:
                    rate[b] = s
        if rate:
            out[var] = rate
    return out


def _axpy_raw(values: dict, rates: dict, h: float) -> dict:
    out = dict(values)
    for var, r in rates.items():
        merged = dict(out[var])
        for b, c in r.items():
            s = merged.get(b, 0j) + h * c
            if s == 0:
                merged.pop(b, None)
            else:
                merged[b] = s
        out[var] = merged
    return out


def _check_parity_raw(values_raw: dict):
    for g, v in values_raw.items():
        parities = {bin(b).count("1") & 1 for b, c in v.items() if c != 0}
        if len(parities) > 1 or (parities and parities.pop() != g.parity):
            raise InternalConsistencyError(f"parity violation in {g.name}")


def integrate(setup: IntegrationSetup, initial: TrajectoryState,
              tau_max: float, steps: int) -> list:
    """Classic RK4 with fixed step; returns the list of states, initial first.

    Variables with identically zero rates (for instance every conserved
    momentum) are held at their initial values exactly.
    """
    if steps < 1:
        raise DomainError("steps must be at least 1")
    h = tau_max / steps
    n = setup.n_units
    states = [initial]
    values = {var: dict(gv.coeffs) for var, gv in initial.values.items()}
    tau = initial.tau
    _check_parity_raw(values)
    for _ in range(steps):
        k1 = _rates_raw(setup, tau, values)
        k2 = _rates_raw(setup, tau + h / 2, _axpy_raw(values, k1, h / 2))
        k3 = _rates_raw(setup, tau + h / 2, _axpy_raw(values, k2, h / 2))
        k4 = _rates_raw(setup, tau + h, _axpy_raw(values, k3, h))
        for var in set(k1) | set(k2) | set(k3) | set(k4):
            total = dict(values[var])
            for ks, w in ((k1, 1.0), (k2, 2.0), (k3, 2.0), (k4, 1.0)):
                r = ks.get(var)
                if not r:
                    continue
                scale = w * h / 6
                for b, c in r.items():
                    total[b] = total.get(b, 0j) + scale * c
            values[var] = {b: c for b, c in total.items() if c != 0}
        tau += h
        _check_parity_raw(values)
        states.append(TrajectoryState(
            tau, {var: GrassmannValue(n, dict(v)) for var, v in values.items()}))
    return states


def _state_env(setup: IntegrationSetup, state: TrajectoryState) -> dict:
    raw = {var: gv.coeffs for var, gv in state.values.items()}
    return _environment_raw(setup, state.tau, raw)


def _raw_dev(val: dict, ref: dict) -> float:
    return max((abs(val.get(b, 0j) - ref.get(b, 0j)) for b in set(val) | set(ref)),
               default=0.0)


def constraint_drift(setup: IntegrationSetup, states: list, constraints) -> dict:
    """Per-constraint maximum coefficient deviation from the initial value.

    ``constraints`` is a list of (name, GradedExpr). The deviation at each
    step is the largest absolute blade-coefficient of value(tau) - value(0).
    """
    n = setup.n_units
    out = {}
    for name, expr in constraints:
        comp = Compiled(expr)
        ref = comp.eval_raw(_state_env(setup, states[0]), n)
        worst = 0.0
        for st in states[1:]:
            worst = max(worst, _raw_dev(comp.eval_raw(_state_env(setup, st), n), ref))
        out[name] = worst
    return out


def drift_series(setup: IntegrationSetup, states: list, constraints) -> list:
    """Deviation-from-initial per step for every named constraint."""
    n = setup.n_units
    comps = {name: Compiled(expr) for name, expr in constraints}
    refs = {name: comps[name].eval_raw(_state_env(setup, states[0]), n)
            for name, _ in constraints}
    rows = []
    for st in states:
        env = _state_env(setup, st)
        rows.append({name: _raw_dev(comps[name].eval_raw(env, n), refs[name])
                     for name, _ in constraints})
    return rows


def trajectory_csv(setup: IntegrationSetup, states: list, constraints) -> str:
    """CSV: step, tau, tracked Grassmann coefficients (re/im), drift norms."""
    variables = sorted(setup.flows, key=lambda g: g.ordinal)
    blades: dict = {}
    for st in states:
        for var in variables:
            support = blades.setdefault(var, set())
            support.update(b for b, c in st.values[var].coeffs.items() if c != 0)
    columns = []
    for var in variables:
        for blade in sorted(blades[var]):
            label = ".".join(str(i + 1) for i in range(setup.n_units)
                             if blade >> i & 1)
            columns.append((var, blade, f"{var.name}[{label}]"))
    drift_rows = drift_series(setup, states, constraints)
    names = [n for n, _ in constraints]
    header = ["step", "tau"]
    for _, _, label in columns:
        header.append(f"{label}.re")
        header.append(f"{label}.im")
    header.extend(f"drift_{n}" for n in names)
    fmt = lambda x: "%.17g" % x
    lines = [",".join(header)]
    for i, st in enumerate(states):
        row = [str(i), fmt(st.tau)]
        for var, blade, _ in columns:
            c = st.values[var].coeffs.get(blade, 0j)
            row.append(fmt(c.real))
            row.append(fmt(c.imag))
        row.extend(fmt(drift_rows[i][n]) for n in names)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
