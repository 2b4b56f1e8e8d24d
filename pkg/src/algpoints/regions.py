"""Rectangles, curve strips and the explicit constants attached to them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .poly import (
    Interval,
    Poly,
    count_real_roots,
    derivative,
    evaluate,
    interval_eval,
    isolate_real_roots,
    refine,
)
from .powers import PowerProduct, as_power

# tunables the theory leaves unquantified
DEFAULT_Q0 = 16
DEFAULT_DELTA_N = Fraction(1, 1000)
DEFAULT_C8 = Fraction(1)


def _frac(x) -> Fraction:
    if isinstance(x, float):
        # floats given on the command line or in tests mean their decimal text
        return Fraction(repr(x))
    return Fraction(x)


def rho(n: int, x) -> Fraction:
    """((|x|+1)^(n+1) - 1) / |x|, extended by n+1 at x = 0."""
    if n < 1:
        raise ValueError("rho needs n >= 1")
    ax = abs(_frac(x))
    if ax == 0:
        return Fraction(n + 1)
    return ((ax + 1) ** (n + 1) - 1) / ax


def c10(p: int, q: int, n: int) -> Fraction:
    """Scale of the empty rectangle: q^(n+1) / (2p (2q+2p)^n (n+1))."""
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive integers")
    if p >= 2 * q:
        raise ValueError(f"need p < 2q, got p={p}, q={q}")
    if n < 2:
        raise ValueError("need n >= 2")
    return Fraction(q ** (n + 1), 2 * p * (2 * q + 2 * p) ** n * (n + 1))


def c12(n: int, d: Sequence) -> Fraction:
    """2^(3n+9) n^2 rho_n(d1) rho_n(d2) / |d1 - d2|."""
    d1, d2 = _frac(d[0]), _frac(d[1])
    if d1 == d2:
        raise ValueError("c12 requires d1 != d2")
    return Fraction(2 ** (3 * n + 9) * n * n) * rho(n, d1) * rho(n, d2) / abs(d1 - d2)


def h_n_squared(n: int, d: Sequence) -> Fraction:
    d1, d2 = abs(_frac(d[0])), abs(_frac(d[1]))
    top = max(Fraction(1), 3 * d1, 3 * d2)
    return Fraction(3, 2) * (d1 + d2) * top ** (n * n)


def h_n_exact(n: int, d: Sequence) -> PowerProduct:
    """sqrt(3/2 (|d1|+|d2|) max(1,3|d1|,3|d2|)^(n^2)) as an exact power product."""
    sq = h_n_squared(n, d)
    if sq == 0:
        return PowerProduct(0)
    return PowerProduct.power(sq, Fraction(1, 2))


def h_n(n: int, d: Sequence, rel: Fraction = Fraction(1, 10 ** 9)) -> Fraction:
    """Rational upper bound of h_n with relative excess below ``rel``."""
    sq = h_n_squared(n, d)
    if sq == 0:
        return Fraction(0)
    # sqrt(a/b) = sqrt(a b) / b; scale the integer before the isqrt
    num, den = sq.numerator, sq.denominator
    m = num * den
    k = 0
    while True:
        s = math.isqrt(m << (2 * k))
        if s * s != (m << (2 * k)):
            s += 1
        up = Fraction(s, den << k)
        lo = Fraction(s - 1, den << k)
        if up - lo <= rel * lo:
            return up
        k += 16


@dataclass(frozen=True)
class LadderSpec:
    gamma: Fraction
    L: int
    lambdas: tuple[Fraction, ...]  # lambdas[0] is lambda_1
    delta: Fraction
    h: object

    def lam(self, l: int) -> Fraction:
        """lambda_l with the l >= L+3 tail."""
        if l < 1:
            raise ValueError("ladder index starts at 1")
        if l <= len(self.lambdas):
            return self.lambdas[l - 1]
        return Fraction(0)


def ladder(gamma, d: Sequence, h) -> LadderSpec:
    """Exponent ladder lambda_1..lambda_{L+3} and the scale delta."""
    gamma = _frac(gamma)
    if not Fraction(1, 2) < gamma < 1:
        raise ValueError(f"gamma must lie in (1/2, 1), got {gamma}")
    d1, d2 = _frac(d[0]), _frac(d[1])
    if d1 == d2:
        raise ValueError("ladder requires d1 != d2")
    if isinstance(h, PowerProduct):
        h_sq = (h ** 2).rational()
    else:
        h_sq = _frac(h) ** 2
    if h_sq <= 0:
        raise ValueError("h must be positive")
    L = math.floor((3 - 2 * gamma) / (1 - gamma))
    lams = [1 - Fraction(l - 1) * (1 - gamma) / 2 for l in range(1, L + 2)]
    lams.append(gamma - Fraction(1, 2))
    lams.append(Fraction(0))
    delta = Fraction(1, 2 ** (L + 17)) / h_sq * (d1 - d2) ** 2
    return LadderSpec(gamma, L, tuple(lams), delta, h)


# --------------------------------------------------------------------------
# rectangles


def _axis_decision(center: Fraction, half: PowerProduct, lo: Fraction, hi: Fraction) -> bool | None:
    """Is a point known only to lie in (lo, hi) inside (center-half, center+half)?"""
    far = max(abs(lo - center), abs(hi - center))
    if half.compare(far) <= 0:
        return True
    near = Fraction(0) if lo < center < hi else min(abs(lo - center), abs(hi - center))
    if half.compare(near) >= 0:
        return False
    return None


@dataclass(frozen=True)
class Rect:
    """Open axis-parallel rectangle with centre ``center`` and half-sides ``half``.

    Half-sides are exact power products so sides like c8*Q^(-gamma) stay exact.
    ``gamma``, ``c8`` and ``Q`` are kept when the rectangle came from them.
    """

    center: tuple[Fraction, Fraction]
    half: tuple[PowerProduct, PowerProduct]
    gamma: tuple[Fraction, Fraction] | None = None
    c8: Fraction | None = None
    Q: int | None = None

    @classmethod
    def from_sides(cls, d: Sequence, gamma: Sequence, c8, Q: int) -> "Rect":
        """Sides c8 * Q^(-gamma_i) around midpoint d."""
        if Q < 1:
            raise ValueError("Q must be positive")
        c8 = _frac(c8)
        if c8 < 0:
            raise ValueError("c8 must be nonnegative")
        g = (_frac(gamma[0]), _frac(gamma[1]))
        halves = tuple(PowerProduct.power(Q, -gi, c8 / 2) for gi in g)
        return cls((_frac(d[0]), _frac(d[1])), halves, g, c8, Q)

    @classmethod
    def from_bounds(cls, x_range: Sequence, y_range: Sequence) -> "Rect":
        (a1, b1), (a2, b2) = (tuple(map(_frac, x_range)), tuple(map(_frac, y_range)))
        if b1 < a1 or b2 < a2:
            raise ValueError("rectangle bounds must satisfy lo <= hi")
        return cls(((a1 + b1) / 2, (a2 + b2) / 2), (PowerProduct((b1 - a1) / 2), PowerProduct((b2 - a2) / 2)))

    def side(self, i: int) -> PowerProduct:
        return self.half[i] * 2

    @property
    def area(self) -> PowerProduct:
        return self.side(0) * self.side(1)

    @property
    def is_degenerate(self) -> bool:
        return self.half[0].coef == 0 or self.half[1].coef == 0

    def outer_box(self, bits: int = 64) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        out = []
        for c, h in zip(self.center, self.half):
            u = h.upper(bits)
            out.append((c - u, c + u))
        return tuple(out)

    def inner_box(self, bits: int = 64) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        out = []
        for c, h in zip(self.center, self.half):
            u = h.lower(bits)
            out.append((c - u, c + u))
        return tuple(out)

    def axis_contains(self, i: int, lo: Fraction, hi: Fraction) -> bool | None:
        return _axis_decision(self.center[i], self.half[i], lo, hi)

    def bounds_text(self, digits: int = 12) -> str:
        (a1, b1), (a2, b2) = self.outer_box()
        if self.half[0].is_rational and self.half[1].is_rational:
            return f"({a1}, {b1}) x ({a2}, {b2})"
        f = lambda v: f"{float(v):.{digits}g}"  # noqa: E731
        return f"({f(a1)}, {f(b1)}) x ({f(a2)}, {f(b2)})"


def empty_rectangle(p: int, q: int, n: int, Q: int) -> Rect:
    """(p/q, p/q + c10/Q) x (0, p/q): a rectangle free of points of height <= Q."""
    if Q < 1:
        raise ValueError("Q must be a positive integer")
    c = c10(p, q, n)
    x = Fraction(p, q)
    r = Rect.from_bounds((x, x + c / Q), (0, x))
    return Rect(r.center, r.half, None, None, Q)


def midpoint_value_bound(n: int, d, Q: int, side) -> PowerProduct:
    """2^n rho_n(d) Q |I|: how large |P(d)| can be when P in P_n(Q) has a root in I around d."""
    return as_power(side) * (Fraction(2 ** n * Q) * rho(n, d))


def midpoint_value_check(p: Poly, rect: Rect, Q: int | None = None) -> tuple[bool, bool]:
    """Per axis, is |P(d_i)| <= 2^n rho_n(d_i) Q |I_i|?

    Meant for the minimal polynomial of a point inside ``rect``; sides must not
    exceed 1.  ``Q`` defaults to the height of ``p``.
    """
    n = p.degree
    if n < 1:
        raise ValueError("need a nonconstant polynomial")
    Q = max(abs(c) for c in p.coeffs) if Q is None else Q
    out = []
    for i in (0, 1):
        side = rect.side(i)
        if side.compare(1) < 0:
            raise ValueError("sides longer than 1 are outside the bound's reach")
        bound = midpoint_value_bound(n, rect.center[i], Q, side)
        out.append(bound.compare(abs(evaluate(p, rect.center[i]))) <= 0)
    return out[0], out[1]


# --------------------------------------------------------------------------
# curves


def _check_bounded(J: Interval) -> None:
    if J.lo is None or J.hi is None:
        raise ValueError("J must be a bounded interval")


def derivative_bound(phi: Poly, J: Interval) -> Fraction:
    """Certified upper bound of sup |phi'| over J (exact unless phi'' has irrational roots)."""
    _check_bounded(J)
    d1 = derivative(phi)
    if d1.is_zero():
        return Fraction(0)
    best = max(abs(Fraction(evaluate(d1, J.lo))), abs(Fraction(evaluate(d1, J.hi))))
    d2 = derivative(d1)
    if d2.is_zero():
        return best
    tol = Fraction(1, 2 ** 40)
    for e in isolate_real_roots(d2):
        if e.hi <= J.lo or e.lo >= J.hi:
            continue
        e = refine(e, tol)
        lo, hi = max(e.lo, J.lo), min(e.hi, J.hi)
        a, b = interval_eval(d1, lo, hi)
        best = max(best, abs(a), abs(b))
    return best


def fixed_points_in(phi: Poly, J: Interval) -> int:
    """Number of x in J with phi(x) = x."""
    g = phi - Poly.x()
    if g.is_zero():
        raise ValueError("phi(x) = x identically: infinitely many fixed points")
    if g.degree == 0:
        return 0
    return count_real_roots(g.scale_to_integer(), J)


@dataclass(frozen=True)
class CurveStrip:
    """Points with alpha_1 in J and |phi(alpha_1) - alpha_2| < c1 Q^(-gamma)."""

    phi: Poly
    J: Interval
    gamma: Fraction
    c8: Fraction
    Q: int
    c6: Fraction = field(init=False)
    c1: Fraction = field(init=False)
    halfwidth: PowerProduct = field(init=False)

    def __post_init__(self):
        _check_bounded(self.J)
        object.__setattr__(self, "gamma", _frac(self.gamma))
        object.__setattr__(self, "c8", _frac(self.c8))
        if self.c8 < 0:
            raise ValueError("c8 must be nonnegative")
        if self.Q < 1:
            raise ValueError("Q must be positive")
        c6 = derivative_bound(self.phi, self.J)
        c1 = (Fraction(1, 2) + c6) * self.c8
        object.__setattr__(self, "c6", c6)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "halfwidth", PowerProduct.power(self.Q, -self.gamma, c1))

    def with_Q(self, Q: int) -> "CurveStrip":
        return CurveStrip(self.phi, self.J, self.gamma, self.c8, Q)

    def first_decision(self, lo: Fraction, hi: Fraction) -> bool | None:
        """alpha_1 in J, for alpha_1 known to lie in (lo, hi)."""
        if self.J.lo <= lo and hi <= self.J.hi:
            return True
        if hi <= self.J.lo or lo >= self.J.hi:
            return False
        return None

    def gap_decision(self, e1: tuple[Fraction, Fraction], e2: tuple[Fraction, Fraction]) -> bool | None:
        """|phi(alpha_1) - alpha_2| < halfwidth, from enclosures of both roots."""
        flo, fhi = interval_eval(self.phi, e1[0], e1[1])
        a, b = flo - e2[1], fhi - e2[0]
        w = self.halfwidth
        if w.compare(max(abs(a), abs(b))) <= 0:
            return True
        if w.compare(a) >= 0 or w.compare(-b) >= 0:
            return False
        return None
