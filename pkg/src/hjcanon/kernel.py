"""Exact symbolic arithmetic over graded (commuting/anticommuting) generators.

An expression is a quotient of multivariate polynomials whose variables are
Generators: even symbols commute, odd (Grassmann) symbols anticommute and
square to zero. Coefficients are Gaussian rationals, so every identity the
analysis pipeline produces is exact. Odd factors are stored in normal order
(ascending ordinal) with all reordering signs absorbed into the coefficient
at multiplication time. Denominators are restricted to even polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import GradingError, OddDenominatorError

EVEN = 0
ODD = 1

# Display / canonical rank of generator kinds. Sorting even exponent vectors
# by (rank, ordinal) puts momenta ahead of named constants, which fixes the
# report form "p0^2 - p1^2 - p2^2 - p3^2 - m^2".
KIND_RANK = {
    "coordinate": 0,
    "velocity": 1,
    "momentum": 2,
    "parameter": 3,
    "constant": 4,
}


@dataclass(frozen=True)
class Generator:
    """A single even or odd symbol with a fixed position in the global order.

    ``kind`` is one of coordinate/velocity/momentum/parameter/constant.
    Derivative symbols (velocities and higher) carry ``order`` >= 1 and link
    back to their coordinate through ``linked`` (the coordinate's ordinal).
    ``component`` is the Lorentz slot for members of a 4-component family.
    """

    name: str
    parity: int
    kind: str
    ordinal: int
    component: int | None = None
    base: str | None = None
    linked: int | None = None
    order: int = 0

    def sort_key(self):
        return (KIND_RANK[self.kind], self.ordinal)

    def __hash__(self):
        # equal generators share an ordinal, so this is consistent with eq
        return self.ordinal

    def __repr__(self):
        return f"<{self.name}>"


@dataclass(frozen=True)
class Scalar:
    """Gaussian rational coefficient re + im*I, exact."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re, im=0):
        return Scalar(Fraction(re), Fraction(im))

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def __add__(self, other):
        return Scalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return Scalar(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def inverse(self):
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        return self * other.inverse()

    def to_complex(self):
        return complex(self.re) + 1j * complex(self.im)


S_ZERO = Scalar.of(0)
S_ONE = Scalar.of(1)
S_I = Scalar.of(0, 1)
S_MINUS_ONE = Scalar.of(-1)


@dataclass(frozen=True)
class Monomial:
    """coeff * product of even powers * product of distinct odd factors.

    ``even`` is a tuple of (Generator, power) sorted by the generator sort
    key; ``odd`` is a tuple of odd Generators strictly ascending by ordinal.
    """

    coeff: Scalar
    even: tuple = ()
    odd: tuple = ()

    def key(self):
        return (self.even, self.odd)

    def degree(self):
        return sum(p for _, p in self.even) + len(self.odd)

    def parity(self):
        return len(self.odd) & 1

    def sort_key(self):
        # (odd degree, odd ordinal sequence, sparse even exponent vector)
        evenkey = tuple((g.sort_key(), -p) for g, p in self.even)
        return (len(self.odd), tuple(g.ordinal for g in self.odd), evenkey)


def _merge_even(a, b):
    powers = {}
    for g, p in a:
        powers[g] = powers.get(g, 0) + p
    for g, p in b:
        powers[g] = powers.get(g, 0) + p
    return tuple(sorted(((g, p) for g, p in powers.items() if p), key=lambda t: t[0].sort_key()))


def _merge_odd(a, b):
    """Merge two normal-ordered odd factor tuples; returns (sign, tuple) or None."""
    inv = 0
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i].ordinal == b[j].ordinal:
            return None
        if a[i].ordinal < b[j].ordinal:
            out.append(a[i])
            i += 1
        else:
            inv += len(a) - i
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return (-1) ** inv, tuple(out)


def mul_monomials(a: Monomial, b: Monomial) -> Monomial | None:
    merged = _merge_odd(a.odd, b.odd)
    if merged is None:
        return None
    sign, odd = merged
    coeff = a.coeff * b.coeff
    if sign < 0:
        coeff = -coeff
    return Monomial(coeff, _merge_even(a.even, b.even), odd)


ONE_MONOMIAL = Monomial(S_ONE)


def _poly(monomials) -> tuple:
    """Merge like monomials, drop zeros, sort canonically."""
    acc = {}
    for m in monomials:
        k = m.key()
        if k in acc:
            acc[k] = Monomial(acc[k].coeff + m.coeff, m.even, m.odd)
        else:
            acc[k] = m
    return tuple(sorted((m for m in acc.values() if not m.coeff.is_zero()),
                        key=Monomial.sort_key))


def _poly_mul(a, b):
    out = []
    for ma in a:
        for mb in b:
            m = mul_monomials(ma, mb)
            if m is not None:
                out.append(m)
    return _poly(out)


def _poly_neg(a):
    return tuple(Monomial(-m.coeff, m.even, m.odd) for m in a)


def _poly_scale(a, s: Scalar):
    if s.is_zero():
        return ()
    return tuple(Monomial(m.coeff * s, m.even, m.odd) for m in a)


def _poly_is_even(a):
    return all(not m.odd for m in a)


@dataclass(frozen=True)
class GradedExpr:
    """Normalized quotient num/den with even, nonzero denominator."""

    num: tuple = ()
    den: tuple = (ONE_MONOMIAL,)

    # -- construction -----------------------------------------------------

    @staticmethod
    def _make(num, den):
        num = _poly(num)
        den = _poly(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _poly_is_even(den):
            raise OddDenominatorError("denominator contains odd generators")
        if not num:
            return ZERO
        # cancel common even content of numerator and denominator
        content = None
        for m in list(num) + list(den):
            powers = dict(m.even)
            if content is None:
                content = powers
            else:
                content = {g: min(p, content[g]) for g, p in powers.items() if g in content}
            if not content:
                break
        if content:
            strip = lambda m: Monomial(
                m.coeff,
                tuple((g, p - content.get(g, 0)) for g, p in m.even if p - content.get(g, 0)),
                m.odd,
            )
            num = tuple(strip(m) for m in num)
            den = tuple(strip(m) for m in den)
        # normalize the denominator's leading coefficient to one
        lead = den[0].coeff
        if lead.re != 1 or lead.im != 0:
            inv = lead.inverse()
            num = _poly_scale(num, inv)
            den = _poly_scale(den, inv)
        return GradedExpr(num, den)

    # -- predicates --------------------------------------------------------

    def is_zero(self):
        return not self.num

    def is_scalar(self):
        if self.den != (ONE_MONOMIAL,):
            return False
        if not self.num:
            return True
        return len(self.num) == 1 and not self.num[0].even and not self.num[0].odd

    def scalar_value(self) -> Scalar:
        if not self.is_scalar():
            raise ValueError("expression is not a scalar")
        return self.num[0].coeff if self.num else S_ZERO

    def parity(self):
        """0/1 for homogeneous expressions, None for zero or mixed."""
        if not self.num:
            return None
        parities = {m.parity() for m in self.num}
        return parities.pop() if len(parities) == 1 else None

    def generators(self):
        gens = set()
        for m in list(self.num) + list(self.den):
            gens.update(g for g, _ in m.even)
            gens.update(m.odd)
        return gens

    def depends_on(self, g: Generator):
        for m in list(self.num) + list(self.den):
            if g in m.odd or any(ge is g or ge == g for ge, _ in m.even):
                return True
        return False

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = as_expr(other)
        if self.den == other.den:
            return GradedExpr._make(self.num + other.num, self.den)
        return GradedExpr._make(
            _poly_mul(self.num, other.den) + _poly_mul(other.num, self.den),
            _poly_mul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return GradedExpr(_poly_neg(self.num), self.den)

    def __sub__(self, other):
        return self + (-as_expr(other))

    def __rsub__(self, other):
        return as_expr(other) + (-self)

    def __mul__(self, other):
        other = as_expr(other)
        return GradedExpr._make(_poly_mul(self.num, other.num), _poly_mul(self.den, other.den))

    def __rmul__(self, other):
        return as_expr(other) * self

    def __truediv__(self, other):
        other = as_expr(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero expression")
        if not _poly_is_even(other.num):
            raise OddDenominatorError("division by an expression with odd part")
        return GradedExpr._make(_poly_mul(self.num, other.den), _poly_mul(self.den, other.num))

    def __rtruediv__(self, other):
        return as_expr(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return (ONE / self) ** (-n)
        result = ONE
        base = self
        k = n
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __str__(self):
        from .printer import expr_str

        return expr_str(self)


ZERO = GradedExpr()
ONE = GradedExpr((ONE_MONOMIAL,))
I = GradedExpr((Monomial(S_I),))


def as_expr(x) -> GradedExpr:
    if isinstance(x, GradedExpr):
        return x
    if isinstance(x, Generator):
        return atom(x)
    if isinstance(x, Scalar):
        return GradedExpr((Monomial(x),)) if not x.is_zero() else ZERO
    if isinstance(x, (int, Fraction)):
        return scalar(x)
    raise TypeError(f"cannot coerce {x!r} to GradedExpr")


def scalar(re, im=0) -> GradedExpr:
    s = Scalar.of(re, im)
    return GradedExpr((Monomial(s),)) if not s.is_zero() else ZERO


def atom(g: Generator) -> GradedExpr:
    if g.parity == ODD:
        return GradedExpr((Monomial(S_ONE, (), (g,)),))
    return GradedExpr((Monomial(S_ONE, ((g, 1),)),))


def normalize(x) -> GradedExpr:
    """Re-canonicalize; the identity on already-normalized expressions."""
    e = as_expr(x)
    return GradedExpr._make(e.num, e.den)


def multiply(a, b) -> GradedExpr:
    return as_expr(a) * as_expr(b)


def equals(a, b) -> bool:
    """Exact equality via cross-multiplied comparison."""
    a = as_expr(a)
    b = as_expr(b)
    lhs = _poly_mul(a.num, b.den)
    rhs = _poly_mul(b.num, a.den)
    return _poly(lhs + _poly_neg(rhs)) == ()


# -- derivatives ------------------------------------------------------------


def _poly_derive_even(poly, g):
    out = []
    for m in poly:
        for i, (ge, p) in enumerate(m.even):
            if ge == g:
                coeff = m.coeff * Scalar.of(p)
                even = tuple(
                    (h, q - 1 if h == g else q) for h, q in m.even if not (h == g and q == 1)
                )
                out.append(Monomial(coeff, even, m.odd))
                break
    return _poly(out)


def _poly_derive_odd(poly, g, side):
    out = []
    for m in poly:
        if g not in m.odd:
            continue
        j = m.odd.index(g)
        k = len(m.odd)
        sign = (-1) ** (k - 1 - j) if side == "right" else (-1) ** j
        coeff = m.coeff if sign > 0 else -m.coeff
        out.append(Monomial(coeff, m.even, m.odd[:j] + m.odd[j + 1:]))
    return _poly(out)


def _derive(expr: GradedExpr, g: Generator, side: str) -> GradedExpr:
    if g.parity == ODD:
        dn = _poly_derive_odd(expr.num, g, side)
        return GradedExpr._make(dn, expr.den) if dn else ZERO
    dn = _poly_derive_even(expr.num, g)
    den_has_g = any(ge == g for m in expr.den for ge, _ in m.even)
    if not den_has_g:
        return GradedExpr._make(dn, expr.den) if dn else ZERO
    dd = _poly_derive_even(expr.den, g)
    num = _poly(_poly_mul(dn, expr.den) + _poly_neg(_poly_mul(expr.num, dd)))
    return GradedExpr._make(num, _poly_mul(expr.den, expr.den)) if num else ZERO


def derive_right(expr, g: Generator) -> GradedExpr:
    """Right derivative: the odd factor is commuted to the rightmost slot."""
    return _derive(as_expr(expr), g, "right")


def derive_left(expr, g: Generator) -> GradedExpr:
    """Left derivative: the odd factor is commuted to the leftmost slot."""
    return _derive(as_expr(expr), g, "left")


# -- substitution -----------------------------------------------------------


def substitute(expr, bindings: dict) -> GradedExpr:
    """Simultaneous substitution of generators by expressions, then normalize.

    Every binding value must be parity-homogeneous with the parity of the
    bound generator (zero is accepted for either parity).
    """
    expr = as_expr(expr)
    for g, v in bindings.items():
        v = as_expr(v)
        p = v.parity()
        if p is not None and p != g.parity:
            raise GradingError(f"binding for {g.name} has parity {p}, expected {g.parity}")
    cache = {g: as_expr(v) for g, v in bindings.items()}

    def sub_poly(poly):
        total = ZERO
        for m in poly:
            term = GradedExpr((Monomial(m.coeff),))
            for g, p in m.even:
                rep = cache.get(g)
                term = term * (rep ** p if rep is not None else GradedExpr(
                    (Monomial(S_ONE, ((g, p),)),)))
            for g in m.odd:
                rep = cache.get(g)
                term = term * (rep if rep is not None else atom(g))
            total = total + term
        return total

    num = sub_poly(expr.num)
    den = sub_poly(expr.den)
    return num / den
