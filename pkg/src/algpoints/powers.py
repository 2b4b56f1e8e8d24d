"""Exact quantities of the form c * B1^e1 * B2^e2 * ... with rational exponents.

Side lengths c8*Q^(-gamma), strip widths c1*Q^(-gamma) and bounds such as
c12*Q^(n+1)*mu2 are irrational in general.  ``PowerProduct`` compares them
with rationals exactly (by raising both sides to the common exponent
denominator) and hands out rational enclosures for pruning.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce


def iroot(x: int, k: int) -> int:
    """floor(x ** (1/k)) for integers x >= 0, k >= 1."""
    if x < 0:
        raise ValueError("iroot of a negative number")
    if x < 2 or k == 1:
        return x
    if k == 2:
        return math.isqrt(x)
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + x // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


class PowerProduct:
    """Nonnegative real ``coef * prod(base ** expo)`` with rational data."""

    __slots__ = ("coef", "factors", "_bounds")

    def __init__(self, coef, factors=()):
        coef = Fraction(coef)
        if coef < 0:
            raise ValueError("PowerProduct coefficient must be nonnegative")
        merged: dict[Fraction, Fraction] = {}
        for base, expo in factors:
            base, expo = Fraction(base), Fraction(expo)
            if base <= 0:
                raise ValueError("PowerProduct bases must be positive")
            if expo == 0 or base == 1:
                continue
            if expo.denominator == 1:
                coef *= base ** int(expo)
                continue
            merged[base] = merged.get(base, Fraction(0)) + expo
        clean = []
        for base in sorted(merged):
            expo = merged[base]
            if expo == 0:
                continue
            if expo.denominator == 1:
                coef *= base ** int(expo)
                continue
            k = expo.denominator
            rn, rd = iroot(base.numerator, k), iroot(base.denominator, k)
            if rn ** k == base.numerator and rd ** k == base.denominator:
                coef *= Fraction(rn, rd) ** expo.numerator
            else:
                clean.append((base, expo))
        self.coef = coef
        self.factors = tuple(clean) if coef else ()
        self._bounds = {}

    @classmethod
    def power(cls, base, expo, coef=1) -> "PowerProduct":
        return cls(coef, ((base, expo),))

    def __reduce__(self):
        return (PowerProduct, (self.coef, self.factors))

    @property
    def is_rational(self) -> bool:
        return not self.factors

    def rational(self) -> Fraction:
        if self.factors:
            raise ValueError(f"{self} is not known to be rational")
        return self.coef

    def _root_form(self) -> tuple[Fraction, int]:
        """(R, b) with value = R ** (1/b)."""
        b = reduce(math.lcm, (e.denominator for _, e in self.factors), 1)
        r = self.coef ** b
        for base, expo in self.factors:
            r *= base ** int(expo * b)
        return r, b

    def compare(self, x) -> int:
        """sign(x - value), exact."""
        x = Fraction(x)
        if self.coef == 0:
            return (x > 0) - (x < 0)
        if x <= 0:
            return -1
        lo, hi = self.bounds(64)
        if x < lo:
            return -1
        if x > hi:
            return 1
        if not self.factors:
            return (x > self.coef) - (x < self.coef)
        r, b = self._root_form()
        xb = x ** b
        return (xb > r) - (xb < r)

    def bounds(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        """Rationals lo <= value <= hi with hi - lo <= 2^-bits * value (roughly)."""
        cached = self._bounds.get(bits)
        if cached is not None:
            return cached
        if not self.factors:
            out = (self.coef, self.coef)
        else:
            r, b = self._root_form()
            num, den = r.numerator, r.denominator
            # value = (num * den^(b-1))^(1/b) / den
            m = num * den ** (b - 1)
            approx_bits = m.bit_length() // b
            k = max(0, bits + 2 - approx_bits)
            s = iroot(m << (k * b), b)
            scale = den << k
            out = (Fraction(s, scale), Fraction(s + 1, scale))
        self._bounds[bits] = out
        return out

    def lower(self, bits: int = 64) -> Fraction:
        return self.bounds(bits)[0]

    def upper(self, bits: int = 64) -> Fraction:
        return self.bounds(bits)[1]

    def __float__(self) -> float:
        lo, hi = self.bounds(60)
        return float((lo + hi) / 2)

    def __mul__(self, other) -> "PowerProduct":
        if isinstance(other, PowerProduct):
            return PowerProduct(self.coef * other.coef, self.factors + other.factors)
        return PowerProduct(self.coef * Fraction(other), self.factors)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PowerProduct":
        if isinstance(other, PowerProduct):
            inv = tuple((b, -e) for b, e in other.factors)
            return PowerProduct(self.coef / other.coef, self.factors + inv)
        return PowerProduct(self.coef / Fraction(other), self.factors)

    def __pow__(self, k) -> "PowerProduct":
        k = Fraction(k)
        if k.denominator == 1:
            return PowerProduct(self.coef ** int(k), tuple((b, e * k) for b, e in self.factors))
        return PowerProduct(1, ((self.coef, k),) + tuple((b, e * k) for b, e in self.factors)) if self.coef else PowerProduct(0)

    # comparisons against rationals / ints
    def __lt__(self, x) -> bool:
        if isinstance(x, PowerProduct):
            return (self / x).compare(1) > 0 if x.coef else False
        return self.compare(x) > 0

    def __le__(self, x) -> bool:
        if isinstance(x, PowerProduct):
            return (self / x).compare(1) >= 0 if x.coef else self.coef == 0
        return self.compare(x) >= 0

    def __gt__(self, x) -> bool:
        if isinstance(x, PowerProduct):
            return x < self
        return self.compare(x) < 0

    def __ge__(self, x) -> bool:
        if isinstance(x, PowerProduct):
            return x <= self
        return self.compare(x) <= 0

    def __eq__(self, x) -> bool:
        if isinstance(x, PowerProduct):
            return self.coef == x.coef and self.factors == x.factors
        if isinstance(x, (int, Fraction)):
            return self.compare(x) == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.coef, self.factors))

    def __repr__(self) -> str:
        if not self.factors:
            return f"PowerProduct({self.coef})"
        body = " * ".join(f"{b}^({e})" for b, e in self.factors)
        return f"PowerProduct({self.coef} * {body})"


def as_power(value) -> PowerProduct:
    return value if isinstance(value, PowerProduct) else PowerProduct(value)
