"""Exact polynomial arithmetic, resultants and real-root isolation.

Coefficients are stored constant-term first.  Integer polynomials use plain
``int`` coefficients; polynomials with rational coefficients (curves) use
``fractions.Fraction``.  Everything here is exact: no floating point is used
to decide anything.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

Number = int | Fraction


def _as_number(c) -> Number:
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, str):
        return _as_number(Fraction(c))
    raise TypeError(f"unsupported coefficient {c!r}")


class Poly:
    """Immutable univariate polynomial, ``coeffs[j]`` is the coefficient of x^j.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_number(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def __reduce__(self):
        return (Poly, (self.coeffs,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Sequence[Number], lead: Number = 1) -> "Poly":
        p = cls((lead,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Number:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly((other,)).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for j in range(self.degree, -1, -1):
            c = self.coeffs[j]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if j == 0:
                body = str(a)
            else:
                mono = "x" if j == 1 else f"x^{j}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __add__(self, other) -> "Poly":
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Poly":
        return _lift(other) - self

    def __mul__(self, other) -> "Poly":
        other = _lift(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly((1,))
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        return evaluate(self, x)

    def compose_linear(self, a, b) -> "Poly":
        """Return P(a + b*x)."""
        out = Poly()
        lin = Poly((a, b))
        for c in reversed(self.coeffs):
            out = out * lin + c
        return out

    def scale_to_integer(self) -> "Poly":
        """Positive rational multiple with coprime integer coefficients."""
        if not self.coeffs:
            return self
        den = reduce(math.lcm, (Fraction(c).denominator for c in self.coeffs), 1)
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*ints)
        return Poly(c // g for c in ints)


def _lift(v) -> Poly:
    return v if isinstance(v, Poly) else Poly((v,))


_TERM = re.compile(r"^(?P<coef>\d+(?:/\d+)?|\d*\.\d+)?\*?(?P<x>x(?:\^(?P<exp>\d+))?)?$")


def parse_poly(text: str) -> Poly:
    """Parse a sum of monomials such as ``"x^2 - 2"`` or ``"-1/4*x^2 + 3x - 1/2"``.

    Only integer/rational coefficients, ``x``, ``+``, ``-``, ``*`` and ``^``
    are understood.
    """
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ValueError("empty polynomial expression")
    if s[0] not in "+-":
        s = "+" + s
    terms = re.findall(r"[+-][^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"cannot parse polynomial {text!r}")
    out: dict[int, Fraction] = {}
    for term in terms:
        sign = -1 if term[0] == "-" else 1
        m = _TERM.match(term[1:])
        if not m or (m.group("coef") is None and m.group("x") is None):
            raise ValueError(f"cannot parse term {term!r} in {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        exp = 0
        if m.group("x"):
            exp = int(m.group("exp")) if m.group("exp") else 1
        out[exp] = out.get(exp, Fraction(0)) + sign * coef
    deg = max(out)
    return Poly(out.get(j, 0) for j in range(deg + 1))


def height(p: Poly) -> int | Fraction:
    """Maximum absolute coefficient; 0 for the zero polynomial."""
    return max((abs(c) for c in p.coeffs), default=0)


def evaluate(p: Poly, x):
    """Horner evaluation, exact for int/Fraction arguments."""
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def interval_eval(p: Poly, lo, hi) -> tuple[Fraction, Fraction]:
    """Outer bound of p over [lo, hi] by interval Horner evaluation."""
    if not p.coeffs:
        return Fraction(0), Fraction(0)
    lo, hi = Fraction(lo), Fraction(hi)
    a = b = Fraction(p.coeffs[-1])
    for c in reversed(p.coeffs[:-1]):
        prods = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(prods) + c, max(prods) + c
    return a, b


def derivative(p: Poly) -> Poly:
    return Poly(j * p.coeffs[j] for j in range(1, len(p.coeffs)))


def sign_at(p: Poly, x: Fraction) -> int:
    """Sign of an integer polynomial at a rational point, in integer arithmetic."""
    cs = p.coeffs
    if not cs:
        return 0
    x = Fraction(x)
    u, v = x.numerator, x.denominator
    acc = cs[-1]
    vp = 1
    for c in reversed(cs[:-1]):
        vp *= v
        acc = acc * u + c * vp
    return (acc > 0) - (acc < 0)


# --------------------------------------------------------------------------
# division, gcd, square-free decomposition


def divmod_poly(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Euclidean division over Q."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in a.coeffs]
    db = b.degree
    lb = Fraction(b.lc)
    if len(rem) - 1 < db:
        return Poly(), a
    quot = [Fraction(0)] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        q = rem[k] / lb
        if q:
            quot[k - db] = q
            for j, c in enumerate(b.coeffs):
                rem[k - db + j] -= q * c
    return Poly(quot), Poly(rem[:db])


def exact_quotient(a: Poly, b: Poly) -> Poly | None:
    """a / b when b divides a over Z, else None."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a.coeffs)
    db = b.degree
    lb = b.lc
    if len(rem) - 1 < db:
        return Poly() if not rem else None
    quot = [0] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        if rem[k] % lb:
            return None
        q = rem[k] // lb
        if q:
            quot[k - db] = q
            for j, c in enumerate(b.coeffs):
                rem[k - db + j] -= q * c
    if any(rem[:db]):
        return None
    return Poly(quot)


def gcd_poly(a: Poly, b: Poly) -> Poly:
    """Primitive integer gcd (positive leading coefficient) of two polynomials."""
    a = a.scale_to_integer() if a else a
    b = b.scale_to_integer() if b else b
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, (r.scale_to_integer() if r else r)
    if a.is_zero():
        return a
    a = a.scale_to_integer()
    return -a if a.lc < 0 else a


def squarefree_part(p: Poly) -> Poly:
    """Integer square-free part, primitive with positive leading coefficient."""
    if p.degree <= 0:
        return p.scale_to_integer() if p else p
    g = gcd_poly(p, derivative(p))
    q, _ = divmod_poly(p, g)
    q = q.scale_to_integer()
    return -q if q.lc < 0 else q


def squarefree_factorization(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``[(f_k, k)]`` with p = c * prod f_k^k, each f_k square-free."""
    if p.degree <= 0:
        return []
    out = []
    a = p.scale_to_integer()
    b = gcd_poly(a, derivative(a))
    c, _ = divmod_poly(a, b)
    d, _ = divmod_poly(derivative(a), b)
    d = d - derivative(c)
    k = 1
    while c.degree > 0:
        g = gcd_poly(c, d)
        if g.degree > 0:
            out.append((g, k))
        c, _ = divmod_poly(c, g)
        d, _ = divmod_poly(d, g)
        d = d - derivative(c)
        k += 1
    return out


# --------------------------------------------------------------------------
# resultant


def _bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination (Bareiss) with row pivoting."""
    n = len(m)
    if n == 0:
        return 1
    m = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pk - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk
    return sign * m[n - 1][n - 1]


def sylvester_matrix(p1: Poly, p2: Poly) -> list[list[int]]:
    """deg(p2) shifted rows of p1 followed by deg(p1) rows of p2, highest power first."""
    m, n = p1.degree, p2.degree
    size = m + n
    rows = []
    a = list(reversed(p1.coeffs))
    b = list(reversed(p2.coeffs))
    for i in range(n):
        rows.append([0] * i + a + [0] * (size - i - len(a)))
    for i in range(m):
        rows.append([0] * i + b + [0] * (size - i - len(b)))
    return rows


def resultant(p1: Poly, p2: Poly) -> int:
    """Determinant of the Sylvester matrix with p1's rows first.

    With this convention Res(p1, p2) = lc(p1)^deg(p2) * prod p2(a_i) over the
    roots a_i of p1.
    """
    if p1.is_zero() or p2.is_zero():
        raise ValueError("resultant of the zero polynomial is undefined")
    if not (p1.is_integral() and p2.is_integral()):
        raise ValueError("resultant expects integer polynomials")
    return _bareiss_det(sylvester_matrix(p1, p2))


# --------------------------------------------------------------------------
# intervals and real roots


@dataclass(frozen=True)
class Interval:
    """Rational interval; ``None`` endpoints stand for -inf / +inf."""

    lo: Fraction | None
    hi: Fraction | None

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", Fraction(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @property
    def width(self) -> Fraction:
        if self.lo is None or self.hi is None:
            raise ValueError("unbounded interval has no width")
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains_open(self, x) -> bool:
        return (self.lo is None or self.lo < x) and (self.hi is None or x < self.hi)

    def __str__(self) -> str:
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"({lo}, {hi})"


def sturm_sequence(p: Poly) -> list[Poly]:
    """Sturm chain of the square-free part, rescaled by positive constants."""
    p0 = squarefree_part(p)
    seq = [p0]
    if p0.degree <= 0:
        return seq
    seq.append(derivative(p0))
    while True:
        _, r = divmod_poly(seq[-2], seq[-1])
        if r.is_zero():
            break
        seq.append(-r.scale_to_integer())
    return seq


def _variations(values: Iterable[int]) -> int:
    count = 0
    last = 0
    for s in values:
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def _sign_at_inf(p: Poly, positive: bool) -> int:
    s = 1 if p.lc > 0 else -1
    if not positive and p.degree % 2:
        s = -s
    return s


def _sturm_v(seq: list[Poly], x: Fraction | None, positive: bool = True) -> int:
    if x is None:
        return _variations(_sign_at_inf(q, positive) for q in seq)
    return _variations(sign_at(q, x) for q in seq)


def count_real_roots(p: Poly, interval: Interval) -> int:
    """Number of distinct real roots in the open interval (Sturm's theorem)."""
    if p.is_zero():
        raise ValueError("zero polynomial has infinitely many roots")
    p = p.scale_to_integer()
    seq = sturm_sequence(p)
    if seq[0].degree <= 0:
        return 0
    va = _sturm_v(seq, interval.lo, positive=False)
    vb = _sturm_v(seq, interval.hi, positive=True)
    n = va - vb
    if interval.hi is not None and sign_at(seq[0], interval.hi) == 0:
        n -= 1
    return n


def root_bound(p: Poly) -> Fraction:
    """Power of two strictly larger than every |root| (Cauchy bound)."""
    lead = abs(p.lc)
    cauchy = 1 + Fraction(max((abs(c) for c in p.coeffs[:-1]), default=0), lead)
    b = 1
    while b <= cauchy:
        b *= 2
    return Fraction(b)


def descartes_bound(p: Poly, lo: Fraction, hi: Fraction) -> int:
    """Sign variations of p mapped from (lo, hi) onto (0, inf).

    An upper bound on the number of roots in the open interval with the same
    parity; 0 and 1 are exact.
    """
    n = p.degree
    if n <= 0:
        return 0
    lo, hi = Fraction(lo), Fraction(hi)
    # (1+x)^n p((lo + hi x)/(1+x)) = sum a_j (lo + hi x)^j (1 + x)^(n-j)
    den = math.lcm(lo.denominator, hi.denominator)
    l_, h_ = int(lo * den), int(hi * den)
    total = [0] * (n + 1)
    pow_lin = [1]  # (l + h x)^j
    binom_rows = [[1]]
    for _ in range(n):
        prev = binom_rows[-1]
        binom_rows.append([1] + [prev[i] + prev[i + 1] for i in range(len(prev) - 1)] + [1])
    for j, a in enumerate(p.coeffs):
        if j > 0:
            new = [0] * (len(pow_lin) + 1)
            for i, c in enumerate(pow_lin):
                new[i] += c * l_
                new[i + 1] += c * h_
            pow_lin = new
        if a == 0:
            continue
        scale = a * den ** (n - j)
        ones = binom_rows[n - j]
        for i, c in enumerate(pow_lin):
            if c == 0:
                continue
            cc = c * scale
            for k, b in enumerate(ones):
                total[i + k] += cc * b
    return _variations((c > 0) - (c < 0) for c in total)


def _split_point(p: Poly, lo: Fraction, hi: Fraction) -> Fraction:
    m = (lo + hi) / 2
    step = (hi - lo) / 4
    k = 0
    while sign_at(p, m) == 0:
        k += 1
        m = (lo + hi) / 2 + step / (k + 1)
    return m


def isolate_in(p: Poly, lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals for the roots of a square-free integer polynomial in (lo, hi).

    The endpoints ``lo``/``hi`` must not be roots.  Returned intervals are open,
    disjoint, sorted, and have non-root rational endpoints.
    """
    out = []
    stack = [(Fraction(lo), Fraction(hi))]
    while stack:
        a, b = stack.pop()
        v = descartes_bound(p, a, b)
        if v == 0:
            continue
        if v == 1:
            out.append((a, b))
            continue
        m = _split_point(p, a, b)
        stack.append((m, b))
        stack.append((a, m))
    out.sort()
    return out


@dataclass(frozen=True)
class RootEnclosure:
    """Open rational interval isolating one real root of a square-free polynomial.

    ``poly`` is the square-free integer polynomial whose root is enclosed;
    ``multiplicity`` records the multiplicity in the polynomial that was
    isolated.  ``root_index`` counts real roots from the left, starting at 0.
    """

    poly: Poly
    interval: Interval
    root_index: int
    multiplicity: int = 1

    @property
    def lo(self) -> Fraction:
        return self.interval.lo

    @property
    def hi(self) -> Fraction:
        return self.interval.hi

    @property
    def width(self) -> Fraction:
        return self.interval.width

    def with_interval(self, lo: Fraction, hi: Fraction) -> "RootEnclosure":
        return RootEnclosure(self.poly, Interval(lo, hi), self.root_index, self.multiplicity)

    def __float__(self) -> float:
        return float(self.interval.mid)


def _quadratic_enclosures(p: Poly, bits: int) -> list[tuple[Fraction, Fraction]] | None:
    """Closed-form enclosures for an irreducible-looking quadratic, via isqrt.

    Returns None when the discriminant is a perfect square (rational roots);
    the generic path handles those.
    """
    a0, a1, a2 = p.coeffs
    disc = a1 * a1 - 4 * a2 * a0
    if disc <= 0:
        return [] if disc < 0 else None
    r = math.isqrt(disc)
    if r * r == disc:
        return None
    scale = 1 << bits
    s = math.isqrt(disc * scale * scale)
    # s/scale < sqrt(disc) < (s+1)/scale, both strict since disc is not a square
    lo_s, hi_s = Fraction(s, scale), Fraction(s + 1, scale)
    den = 2 * a2
    roots = []
    for sgn in (-1, 1):
        e1 = (-a1 + sgn * lo_s) / den
        e2 = (-a1 + sgn * hi_s) / den
        roots.append((min(e1, e2), max(e1, e2)))
    roots.sort()
    if roots[0][1] >= roots[1][0]:
        return _quadratic_enclosures(p, bits * 2)
    return roots


def isolate_real_roots(p: Poly, squarefree: bool = False) -> list[RootEnclosure]:
    """Disjoint enclosures, in increasing order, one per distinct real root.

    ``squarefree=True`` promises an integer square-free input (an irreducible
    polynomial, say) and skips the factorization.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    if squarefree:
        if p.degree < 1:
            return []
        factors, sf = [(p, 1)], p
    else:
        p = p.scale_to_integer()
        factors = squarefree_factorization(p)
        if not factors:
            return []
        sf = squarefree_part(p)
    spans: list[tuple[Fraction, Fraction]] = []
    quick = _quadratic_enclosures(sf, 32) if sf.degree == 2 else None
    if quick is not None:
        spans = quick
    else:
        b = root_bound(sf)
        spans = isolate_in(sf, -b, b)
    out = []
    for idx, (a, b_) in enumerate(spans):
        mult = factors[0][1]
        if len(factors) > 1:
            for f, k in factors:
                if sign_at(f, a) != sign_at(f, b_):
                    mult = k
                    break
        out.append(RootEnclosure(sf, Interval(a, b_), idx, mult))
    return out


def refine(e: RootEnclosure, width) -> RootEnclosure:
    """Bisect until the enclosure is narrower than ``width`` (strictly)."""
    width = Fraction(width)
    if width <= 0:
        raise ValueError("target width must be positive")
    if e.width < width:
        return e
    p = e.poly
    if p.degree == 2:
        bits = 32
        while True:
            quick = _quadratic_enclosures(p, bits)
            if quick is None:
                break
            lo, hi = next(c for c in quick if c[0] < e.hi and e.lo < c[1])
            lo, hi = max(lo, e.lo), min(hi, e.hi)
            if hi - lo < width:
                return e.with_interval(lo, hi)
            bits *= 2
    lo, hi = e.lo, e.hi
    s_lo = sign_at(p, lo)
    while hi - lo >= width:
        m = (lo + hi) / 2
        s = sign_at(p, m)
        if s == 0:
            half = min(width, hi - lo) / 4
            return e.with_interval(m - half, m + half)
        if s == s_lo:
            lo = m
        else:
            hi = m
    return e.with_interval(lo, hi)


def bisect_once(e: RootEnclosure) -> RootEnclosure:
    """One refinement step; the width at least halves."""
    return refine(e, e.width / 2)
