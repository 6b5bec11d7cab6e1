"""Deterministic string forms for expressions.

Two forms are produced: a flat report form using plain component names
(``p0^2 - p1^2``) and a DSL form that re-parses under the model grammar
(``d(x[0])``, indexed atoms). Monomial order is the canonical kernel order,
so identical expressions always print identically.
"""

from __future__ import annotations

from fractions import Fraction

from .kernel import GradedExpr, Monomial, ONE_MONOMIAL, Scalar


def _frac(f: Fraction) -> str:
    return str(f)


def _scalar_body(s: Scalar):
    """Return (negative, text) with the overall sign pulled out when possible."""
    if s.im == 0:
        return s.re < 0, _frac(abs(s.re))
    if s.re == 0:
        mag = abs(s.im)
        return s.im < 0, "I" if mag == 1 else f"{_frac(mag)}*I"
    # mixed complex coefficients keep their own signs inside parentheses
    im = f"{_frac(abs(s.im))}*I" if abs(s.im) != 1 else "I"
    op = "+" if s.im > 0 else "-"
    return False, f"({_frac(s.re)}{op}{im})"


def monomial_str(m: Monomial, name_of) -> tuple[bool, str]:
    neg, coeff = _scalar_body(m.coeff)
    parts = []
    for g, p in m.even:
        parts.append(name_of(g) if p == 1 else f"{name_of(g)}^{p}")
    for g in m.odd:
        parts.append(name_of(g))
    if not parts:
        return neg, coeff
    if coeff == "1":
        return neg, "*".join(parts)
    return neg, coeff + "*" + "*".join(parts)


def _poly_str(poly, name_of) -> str:
    if not poly:
        return "0"
    pieces = []
    for i, m in enumerate(poly):
        neg, body = monomial_str(m, name_of)
        if i == 0:
            pieces.append(("-" + body) if neg else body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


def _quotient_str(expr: GradedExpr, name_of) -> str:
    num = _poly_str(expr.num, name_of)
    if expr.den == (ONE_MONOMIAL,):
        return num
    den = _poly_str(expr.den, name_of)
    if len(expr.num) > 1:
        num = f"({num})"
    if len(expr.den) > 1 or expr.den[0].degree() != 1:
        den = f"({den})"
    return f"{num}/{den}"


def expr_str(expr: GradedExpr) -> str:
    """Flat report form: component generators by their plain names."""
    return _quotient_str(expr, lambda g: g.name)


def dsl_expr_str(expr: GradedExpr, velocity_name) -> str:
    """Grammar-compatible form. ``velocity_name`` maps a velocity generator
    to the printable d(...) form; other generators print as indexed atoms."""

    def name_of(g):
        if g.kind == "velocity":
            return velocity_name(g)
        if g.component is not None and g.base is not None:
            return f"{g.base}[{g.component}]"
        return g.name

    return _quotient_str(expr, name_of)


def oneform_str(form: dict, leg_name) -> dict:
    """One-form as an ordered {leg-name: coefficient-string} mapping."""
    legs = sorted(form.keys(), key=lambda g: g.ordinal)
    return {leg_name(g): expr_str(form[g]) for g in legs}
