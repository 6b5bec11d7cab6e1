"""Finite-dimensional Grassmann algebra over complex floats.

A value is a map from basis blades (bitmasks over N odd units) to complex
coefficients. Products of blades sharing a unit vanish; otherwise the sign
is the parity of the shuffle that merges the two index sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DimensionError


def blade_sign(a: int, b: int) -> int:
    """Sign of e_a * e_b for disjoint blades, by counting inversions."""
    sign = 1
    while b:
        low = b & -b
        # units of a strictly above this unit of b must hop over it
        above = a >> low.bit_length()
        if bin(above).count("1") & 1:
            sign = -sign
        b ^= low
    return sign


@dataclass
class GrassmannValue:
    n_units: int
    coeffs: dict = field(default_factory=dict)  # bitmask -> complex

    @staticmethod
    def scalar(n_units: int, value: complex) -> "GrassmannValue":
        return GrassmannValue(n_units, {0: complex(value)} if value else {})

    @staticmethod
    def unit(n_units: int, index: int, value: complex = 1.0) -> "GrassmannValue":
        """Value on a single odd unit, 1-based index."""
        if not 1 <= index <= n_units:
            raise DimensionError(f"unit index {index} out of range")
        return GrassmannValue(n_units, {1 << (index - 1): complex(value)})

    def copy(self):
        return GrassmannValue(self.n_units, dict(self.coeffs))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs.values())

    def body(self) -> complex:
        return self.coeffs.get(0, 0j)

    def support_parity(self):
        """0, 1, or None for mixed support (zero coefficients ignored)."""
        parities = {bin(b).count("1") & 1 for b, c in self.coeffs.items() if c != 0}
        if not parities:
            return None
        return parities.pop() if len(parities) == 1 else -1

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for b, c in other.coeffs.items():
            s = out.get(b, 0j) + c
            if s == 0:
                out.pop(b, None)
            else:
                out[b] = s
        return GrassmannValue(self.n_units, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor: complex):
        if factor == 0:
            return GrassmannValue(self.n_units, {})
        return GrassmannValue(self.n_units,
                              {b: factor * c for b, c in self.coeffs.items()})

    def __mul__(self, other):
        self._check(other)
        out = {}
        for ba, ca in self.coeffs.items():
            for bb, cb in other.coeffs.items():
                if ba & bb:
                    continue
                blade = ba | bb
                term = ca * cb * blade_sign(ba, bb)
                s = out.get(blade, 0j) + term
                if s == 0:
                    out.pop(blade, None)
                else:
                    out[blade] = s
        return GrassmannValue(self.n_units, out)

    def __pow__(self, n: int):
        result = GrassmannValue.scalar(self.n_units, 1.0)
        for _ in range(n):
            result = result * self
        return result

    def inverse(self):
        """Inverse of an even element with nonzero body (finite soul series)."""
        body = self.body()
        if abs(body) < 1e-300:
            raise ZeroDivisionError("grassmann value has zero body")
        soul = GrassmannValue(self.n_units,
                              {b: c for b, c in self.coeffs.items() if b != 0})
        result = GrassmannValue.scalar(self.n_units, 1.0 / body)
        power = GrassmannValue.scalar(self.n_units, 1.0)
        for k in range(1, self.n_units // 2 + 2):
            power = power * soul
            if power.is_zero():
                break
            result = result + power.scale((-1) ** k / body ** (k + 1))
        return result

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def _check(self, other):
        if self.n_units != other.n_units:
            raise DimensionError(
                f"mixed algebra sizes {self.n_units} and {other.n_units}")


def grassmann_mul(a: GrassmannValue, b: GrassmannValue) -> GrassmannValue:
    return a * b
