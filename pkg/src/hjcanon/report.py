"""Report assembly: deterministic JSON and a human-readable text rendering.

Expression strings use the flat component form throughout. The text report
additionally re-sums recognized 4-component contraction patterns (metric
weighted squares like p^2, plain pairings like psi.p) for display only;
the JSON stays fully expanded.
"""

from __future__ import annotations

import json

from . import kernel as K
from .engine import IdenticallyZero, NewConstraint, DeterminedDifferential, \
    ReducedToConstraints
from .kernel import GradedExpr, Monomial
from .pipeline import Analysis
from .printer import expr_str, monomial_str, oneform_str


def _name(g):
    return g.name


def _form(form):
    return oneform_str(form, _name)


def build_report(analysis: Analysis) -> dict:
    model = analysis.model
    momenta = []
    for e in analysis.table.entries:
        entry = {
            "coordinate": e.coordinate.name,
            "momentum": e.momentum.name,
            "defining": expr_str(e.defining),
            "solvable": e.solvable,
        }
        if e.solvable:
            entry["solved_velocity"] = expr_str(e.w)
        else:
            entry["forced_value"] = expr_str(e.constraint_value)
        momenta.append(entry)

    events = []
    for ev in analysis.ledger.events:
        if isinstance(ev, DeterminedDifferential):
            events.append({"type": "determined_differential",
                           "coordinate": ev.coordinate.name,
                           "form": _form(ev.form), "source": ev.source})
        elif isinstance(ev, NewConstraint):
            events.append({"type": "new_constraint", "name": ev.name,
                           "expression": expr_str(ev.expr),
                           "source": ev.source, "leg": ev.leg.name})

    final = []
    for st in analysis.ledger.final_status:
        if isinstance(st, IdenticallyZero):
            final.append({"member": st.source, "status": "identically_zero"})
        else:
            final.append({"member": st.source, "status": "reduces_to_constraints",
                          "witness": {n: _form(f) for n, f in sorted(st.witness.items())}})

    names = analysis.brackets.names
    bracket_rows = {}
    for ni in names:
        row = {nj: expr_str(v) for nj, v in
               ((nj, analysis.brackets.entries[(ni, nj)]) for nj in names)
               if not v.is_zero()}
        bracket_rows[ni] = row

    return {
        "model": model.name,
        "parameter": model.parameter.name,
        "metric": list(model.metric),
        "side_conditions": [expr_str(s) for s in model.side_conditions],
        "momenta": momenta,
        "h0": expr_str(analysis.h0),
        "hjpde": [{"name": m.name, "expression": expr_str(m.expr),
                   "parameter": m.leg.name} for m in analysis.hs.members],
        "tdes": {g.name: _form(f) for g, f in sorted(
            analysis.tdes.oneforms.items(), key=lambda kv: kv[0].ordinal)},
        "action_differential": _form(analysis.tdes.dz),
        "closure": {
            "status": analysis.ledger.status,
            "passes": analysis.ledger.passes,
            "events": events,
            "secondary_constraints": {n: expr_str(e)
                                      for n, e in analysis.ledger.secondary},
            "determined_differentials": {g.name: _form(f) for g, f in sorted(
                analysis.ledger.determined.items(), key=lambda kv: kv[0].ordinal)},
            "free_parameters": [g.name for g in
                                analysis.ledger.free_parameters(analysis.tdes)],
            "final": final,
        },
        "classification": dict(analysis.brackets.classification),
        "brackets": bracket_rows,
        "constant_class_group": list(analysis.brackets.constant_group),
        "constant_class_matrix": {
            ni: {nj: expr_str(v) for (na, nj), v in
                 sorted(analysis.brackets.constant_matrix.items())
                 if na == ni and not v.is_zero()}
            for ni in analysis.brackets.constant_group},
        "action_integrand": _form(analysis.integrand),
        "action_recovered": analysis.recovered,
        "checks": dict(sorted(analysis.checks.items())),
    }


def emit_report(analysis: Analysis, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(build_report(analysis), indent=2) + "\n").encode()
    if fmt == "text":
        return text_report(analysis).encode()
    raise ValueError(f"unknown report format {fmt!r}")


# -- display resummation --------------------------------------------------------


def _family_key(g):
    return (g.base, g.kind) if g.base is not None and g.component is not None else None


def _family_display(g):
    if g.kind == "velocity":
        return f"d({g.base})"
    return g.base


def _components(m: Monomial):
    """Family members occurring in a monomial, with multiplicity markers."""
    out = []
    for g, p in m.even:
        if _family_key(g):
            out.append((g, p))
    for g in m.odd:
        if _family_key(g):
            out.append((g, 1))
    return out


def _strip_pair(m: Monomial, a, b):
    """Remove one factor each of a and b (a != b or a squared); returns the
    rest monomial or None."""
    even = dict(m.even)
    odd = list(m.odd)
    for g in (a, b):
        if g.parity == K.EVEN:
            if even.get(g, 0) < 1:
                return None
            even[g] -= 1
            if even[g] == 0:
                del even[g]
        else:
            if g not in odd:
                return None
            odd.remove(g)
    rest_even = tuple(sorted(even.items(), key=lambda t: t[0].sort_key()))
    return Monomial(m.coeff, rest_even, tuple(odd))


def _pair_monomial(a, b):
    am = Monomial(K.S_ONE, ((a, 1),), ()) if a.parity == K.EVEN \
        else Monomial(K.S_ONE, (), (a,))
    bm = Monomial(K.S_ONE, ((b, 1),), ()) if b.parity == K.EVEN \
        else Monomial(K.S_ONE, (), (b,))
    return K.mul_monomials(am, bm)


def _match_group(monomials, m, a, b, rest, weighted, metric, families):
    """Check whether m anchors a full 4-component contraction; returns the
    matched monomial keys or None. Coefficient ratios account for metric
    weights and odd reordering signs."""
    rest1 = Monomial(K.S_ONE, rest.even, rest.odd)
    sigma = {}
    keys = {}
    for mu in range(4):
        ga = families[_family_key(a)][mu]
        gb = families[_family_key(b)][mu]
        pair = _pair_monomial(ga, gb)
        if pair is None:
            return None
        prod = K.mul_monomials(rest1, pair)
        if prod is None:
            return None
        sigma[mu] = prod.coeff  # +/-1 reordering sign
        keys[mu] = prod.key()
    nu0 = a.component
    for mu in range(4):
        got = monomials.get(keys[mu])
        if got is None:
            return None
        scale = K.Scalar.of(metric[mu] * metric[nu0]) if weighted else K.S_ONE
        want = m.coeff * scale * sigma[mu] * sigma[nu0].inverse()
        if got.coeff != want:
            return None
    return [keys[mu] for mu in range(4)], sigma[nu0]


def display_summed(expr: GradedExpr, metric) -> str:
    """Best-effort re-summed rendering; falls back to the expanded form."""
    if expr.den != (K.ONE_MONOMIAL,):
        return expr_str(expr)
    monomials = {m.key(): m for m in expr.num}

    families: dict = {}
    for m in expr.num:
        for g, _ in list(m.even) + [(g, 1) for g in m.odd]:
            if _family_key(g):
                families.setdefault(_family_key(g), {})[g.component] = g
    families = {k: v for k, v in families.items() if len(v) == 4}

    pieces = []
    changed = True
    while changed:
        changed = False
        for key in sorted(monomials, key=lambda k: monomials[k].sort_key()):
            m = monomials[key]
            comps = _components(m)
            hit = None
            for i, (a, _) in enumerate(comps):
                for b, _ in comps[i:]:
                    if a.component != b.component:
                        continue
                    if _family_key(a) not in families or _family_key(b) not in families:
                        continue
                    rest = _strip_pair(m, a, b)
                    if rest is None:
                        continue
                    for weighted in (True, False):
                        match = _match_group(monomials, m, a, b, rest, weighted,
                                             metric, families)
                        if match:
                            hit = (a, b, rest, weighted) + match
                            break
                    if hit:
                        break
                if hit:
                    break
            if hit is None:
                continue
            a, b, rest, weighted, group, sigma0 = hit
            for k in group:
                monomials.pop(k, None)
            base = m.coeff * K.Scalar.of(metric[a.component] if weighted else 1) \
                * sigma0.inverse()
            neg, body = monomial_str(Monomial(base, rest.even, rest.odd), _name)
            da, db = _family_display(a), _family_display(b)
            if weighted:
                token = f"{da}^2" if _family_key(a) == _family_key(b) \
                    else f"dot({da},{db})"
            else:
                first, second = sorted((a, b), key=lambda g: g.sort_key())
                token = f"{_family_display(first)}.{_family_display(second)}"
            body = token if body == "1" else f"{body}*{token}"
            pieces.append((neg, body, m.sort_key()))
            changed = True
            break

    for key in sorted(monomials, key=lambda k: monomials[k].sort_key()):
        neg, body = monomial_str(monomials[key], _name)
        pieces.append((neg, body, monomials[key].sort_key()))
    if not pieces:
        return "0"
    pieces.sort(key=lambda t: t[2])
    out = []
    for i, (neg, body, _) in enumerate(pieces):
        if i == 0:
            out.append(("-" + body) if neg else body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def text_report(analysis: Analysis) -> str:
    model = analysis.model
    metric = model.metric
    lines = [f"model {model.name}"]
    signs = " ".join("+" if s > 0 else "-" for s in metric)
    lines.append(f"metric ({signs})")
    if model.side_conditions:
        conds = ", ".join(f"{expr_str(s)} != 0" for s in model.side_conditions)
        lines.append(f"side conditions: {conds}")
    lines.append("")
    lines.append("momenta")
    for e in analysis.table.entries:
        if e.solvable:
            lines.append(f"  {e.momentum.name} = {expr_str(e.defining)}"
                         f"   [solved: {e.velocity.name} = {expr_str(e.w)}]")
        else:
            lines.append(f"  {e.momentum.name} = {expr_str(e.defining)}   [constraint]")
    lines.append("")
    lines.append("canonical hamiltonian")
    lines.append("  H0 = " + display_summed(analysis.h0, metric))
    lines.append("")
    lines.append("hamilton-jacobi set")
    for m in analysis.hs.members:
        lines.append(f"  {m.name} = {display_summed(m.expr, metric)}"
                     f"   (parameter {m.leg.name})")
    lines.append("")
    lines.append("total differential equations")
    for g, f in sorted(analysis.tdes.oneforms.items(), key=lambda kv: kv[0].ordinal):
        lines.append(f"  d({g.name}) = {_form_text(f, metric)}")
    lines.append("")
    lines.append(f"closure ({analysis.ledger.status} in {analysis.ledger.passes} passes)")
    for ev in analysis.ledger.events:
        if isinstance(ev, DeterminedDifferential):
            lines.append(f"  determined d({ev.coordinate.name}) = "
                         f"{_form_text(ev.form, metric)}   [from {ev.source}]")
        elif isinstance(ev, NewConstraint):
            lines.append(f"  new constraint {ev.name} = "
                         f"{display_summed(ev.expr, metric)}   [from {ev.source}]")
    for st in analysis.ledger.final_status:
        if isinstance(st, ReducedToConstraints) and st.witness:
            combo = " + ".join(f"({_form_text(f, metric)})*{n}"
                               for n, f in sorted(st.witness.items()))
            lines.append(f"  d{st.source} = {combo}")
    free = ", ".join(g.name for g in analysis.ledger.free_parameters(analysis.tdes))
    lines.append(f"  free parameters: {free}")
    lines.append("")
    lines.append("classification")
    for n in analysis.brackets.names:
        lines.append(f"  {n}: {analysis.brackets.classification[n]} class")
    if analysis.brackets.constant_group:
        lines.append("  constant bracket matrix over "
                     + ", ".join(analysis.brackets.constant_group))
        for (ni, nj), v in sorted(analysis.brackets.constant_matrix.items()):
            if not v.is_zero():
                lines.append(f"    {{{ni},{nj}}} = {expr_str(v)}")
    lines.append("")
    lines.append("canonical action")
    lines.append(f"  dZ = {_form_text(analysis.integrand, metric)}")
    lines.append(f"  recovers the lagrangian: {'yes' if analysis.recovered else 'NO'}")
    lines.append("")
    lines.append("checks")
    for name, ok in sorted(analysis.checks.items()):
        lines.append(f"  {name}: {'ok' if ok else 'MISMATCH'}")
    return "\n".join(lines) + "\n"


def _form_text(form, metric) -> str:
    if not form:
        return "0"
    legs = sorted(form.keys(), key=lambda g: g.ordinal)
    parts = []
    for leg in legs:
        coeff = display_summed(form[leg], metric)
        if coeff == "1":
            parts.append(f"d{leg.name}")
        else:
            parts.append(f"({coeff}) d{leg.name}")
    return " + ".join(parts)
