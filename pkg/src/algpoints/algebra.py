"""Minimal polynomials, irreducibility over Q and algebraic points."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

from .poly import (
    Poly,
    RootEnclosure,
    derivative,
    evaluate,
    exact_quotient,
    height,
    isolate_real_roots,
    refine,
)

MAX_DEGREE = 5
REFINE_STEPS = 64


class UnsupportedDegree(ValueError):
    pass


class ContentPrimitive(NamedTuple):
    content: int
    primitive: Poly
    unit: int


def content_and_primitive(p: Poly) -> ContentPrimitive:
    """Split an integer polynomial into content * unit * primitive.

    The primitive part has a positive leading coefficient; ``unit`` is the
    sign that was absorbed.
    """
    if p.is_zero():
        raise ValueError("zero polynomial has no primitive part")
    if not p.is_integral():
        raise ValueError("content_and_primitive expects integer coefficients")
    g = math.gcd(*p.coeffs)
    unit = 1 if p.lc > 0 else -1
    return ContentPrimitive(g, Poly(unit * c // g for c in p.coeffs), unit)


def canonical(p: Poly) -> Poly:
    return content_and_primitive(p).primitive


@lru_cache(maxsize=4096)
def divisors(m: int) -> tuple[int, ...]:
    m = abs(m)
    small, large = [], []
    d = 1
    while d * d <= m:
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
        d += 1
    return tuple(small + large[::-1])


def _vanishes_at(cs: Sequence[int], u: int, v: int) -> bool:
    """Does sum a_j (u/v)^j vanish?  Evaluated as sum a_j u^j v^(n-j)."""
    acc = cs[-1]
    vp = 1
    for c in reversed(cs[:-1]):
        vp *= v
        acc = acc * u + c * vp
    return acc == 0


def rational_roots(p: Poly) -> list[Fraction]:
    """All rational roots of an integer polynomial (rational-root theorem)."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    cs = p.coeffs
    out = []
    k = 0
    while cs[k] == 0:
        k += 1
    if k:
        out.append(Fraction(0))
    trimmed = cs[k:]
    if len(trimmed) == 1:
        return out
    a0, an = trimmed[0], trimmed[-1]
    # every root satisfies |u/v| <= 1 + max|a_j| / |a_n|
    cap = abs(an) + max(abs(c) for c in trimmed[:-1])
    for v in divisors(an):
        for u in divisors(a0):
            if u * abs(an) > cap * v:
                break
            if math.gcd(u, v) != 1:
                continue
            for s in (u, -u):
                if _vanishes_at(trimmed, s, v):
                    out.append(Fraction(s, v))
    return sorted(set(out))


def factor_coefficient_bound(p: Poly, k: int) -> list[int]:
    """Mignotte-type bound: |b_j| <= C(k, j) * ||p||_2 for any degree-k factor in Z[x]."""
    norm2 = sum(c * c for c in p.coeffs)
    root = math.isqrt(norm2)
    if root * root < norm2:
        root += 1
    return [math.comb(k, j) * root for j in range(k + 1)]


def _quadratic_factor(p: Poly) -> Poly | None:
    """A factor b2 x^2 + b1 x + b0 of p in Z[x], or None.

    Assumes p has no rational roots, so p(1) and p(-1) are nonzero and any
    factor f satisfies f(1) | p(1), f(-1) | p(-1).
    """
    a0, an = p.coeffs[0], p.lc
    bound = factor_coefficient_bound(p, 2)[1]
    p1, pm1 = evaluate(p, 1), evaluate(p, -1)
    for b2 in divisors(an):
        for b0a in divisors(a0):
            for b0 in (b0a, -b0a):
                for d in divisors(p1):
                    for f1 in (d, -d):
                        b1 = f1 - b2 - b0
                        if abs(b1) > bound:
                            continue
                        fm1 = b2 - b1 + b0
                        if fm1 == 0 or pm1 % fm1:
                            continue
                        f = Poly((b0, b1, b2))
                        if exact_quotient(p, f) is not None:
                            return f
    return None


def is_irreducible(p: Poly) -> bool:
    """Irreducibility over Q of a primitive integer polynomial of degree 1..5."""
    if not p.is_integral():
        raise ValueError("is_irreducible expects integer coefficients")
    n = p.degree
    if n < 1:
        raise ValueError("irreducibility is defined for degree >= 1")
    if n > MAX_DEGREE:
        raise UnsupportedDegree(f"degree {n} exceeds supported maximum {MAX_DEGREE}")
    if n == 1:
        return True
    if p.coeffs[0] == 0:
        return False
    if n == 2:
        a0, a1, a2 = p.coeffs
        disc = a1 * a1 - 4 * a0 * a2
        if disc < 0:
            return True
        r = math.isqrt(disc)
        return r * r != disc
    if rational_roots(p):
        return False
    if n == 3:
        return True
    # degree 4 or 5 without linear factors: reducible iff a quadratic factor exists
    return _quadratic_factor(p) is None


def is_minimal(p: Poly) -> bool:
    """Primitive, positive leading coefficient, degree >= 2 and irreducible."""
    if p.degree < 2 or p.lc <= 0:
        return False
    if math.gcd(*p.coeffs) != 1:
        return False
    return is_irreducible(p)


@dataclass(frozen=True)
class AlgebraicNumber:
    minpoly: Poly
    enclosure: RootEnclosure


@dataclass(frozen=True)
class AlgebraicPoint:
    """Ordered pair of real roots of one minimal polynomial (diagonal allowed)."""

    minpoly: Poly
    root1: RootEnclosure
    root2: RootEnclosure

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    @property
    def height(self) -> int:
        return height(self.minpoly)

    @property
    def key(self) -> tuple:
        return (self.minpoly.coeffs, self.root1.root_index, self.root2.root_index)

    def approx(self) -> tuple[float, float]:
        return float(self.root1), float(self.root2)


def algebraic_points(p: Poly) -> list[AlgebraicPoint]:
    """All r^2 ordered pairs of real roots of a minimal polynomial."""
    if not is_minimal(p):
        raise ValueError(f"{p} is not a primitive irreducible polynomial of degree >= 2 with positive leading coefficient")
    roots = isolate_real_roots(p)
    return [AlgebraicPoint(p, r1, r2) for r1 in roots for r2 in roots]


def _abs_bounds(e: RootEnclosure) -> tuple[Fraction, Fraction]:
    lo, hi = e.lo, e.hi
    if lo >= 0:
        return lo, hi
    if hi <= 0:
        return -hi, -lo
    return Fraction(0), max(-lo, hi)


def feldman_bound_holds(p: Poly, subset: Sequence[int], roots: Sequence[RootEnclosure] | None = None) -> bool:
    """Check prod |alpha_i| <= (n+1) 2^n H(P) / |a_n| for the chosen real roots.

    ``subset`` holds root indices into ``isolate_real_roots(p)``.  Enclosures
    are refined until the comparison is decided; a False return means the
    inequality fails.
    """
    if roots is None:
        roots = isolate_real_roots(p)
    n = p.degree
    bound = Fraction((n + 1) * 2 ** n * height(p), abs(p.lc))
    chosen = [roots[i] for i in subset]
    for _ in range(REFINE_STEPS + 1):
        lo_prod, hi_prod = Fraction(1), Fraction(1)
        for e in chosen:
            a, b = _abs_bounds(e)
            lo_prod *= a
            hi_prod *= b
        if hi_prod <= bound:
            return True
        if lo_prod > bound:
            return False
        chosen = [refine(e, e.width / 2) for e in chosen]
    raise RuntimeError(f"Feldman comparison for {p} undecided after {REFINE_STEPS} refinements")


def lemma1_gap_check(p: Poly, x, e: RootEnclosure, roots: Sequence[RootEnclosure] | None = None) -> bool | None:
    """Decide |x - alpha| <= n |P(x)| / |P'(x)| for the root alpha enclosed by ``e``.

    x must be at least as close to alpha as to every other real root of P.
    Returns None when the comparison stays undecided after the refinement cap.
    """
    x = Fraction(x)
    n = p.degree
    dp = evaluate(derivative(p), x)
    if dp == 0:
        raise ValueError("P'(x) = 0: the inequality is not defined")
    px = evaluate(p, x)
    rhs = n * abs(px) / abs(dp)
    if px == 0:
        # x is a root; it must be the enclosed one for x to lie in S(alpha)
        return True if e.lo < x < e.hi else None
    if roots is None:
        roots = isolate_real_roots(p)
    others = [r for r in roots if r.root_index != e.root_index]
    # a rational root is known exactly, which also settles the equality case of linear P
    exact = next((r for r in rational_roots(p.scale_to_integer()) if e.lo < r < e.hi), None)
    for _ in range(REFINE_STEPS + 1):
        if exact is None:
            near = max(abs(x - e.lo), abs(x - e.hi))
            far = 0 if e.lo < x < e.hi else min(abs(x - e.lo), abs(x - e.hi))
        else:
            near = far = abs(x - exact)
        for r in others:
            r_far = 0 if r.lo < x < r.hi else min(abs(x - r.lo), abs(x - r.hi))
            if r_far > near:
                continue
            r_near = max(abs(x - r.lo), abs(x - r.hi))
            if r_near < far:
                raise ValueError("x is closer to another real root of P")
            break
        else:
            if near <= rhs:
                return True
            if far > rhs:
                return False
        e = refine(e, e.width / 2)
        others = [refine(r, r.width / 2) for r in others]
    return None
