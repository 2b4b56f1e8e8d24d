"""Enumeration of bounded-height polynomials and exact counts of algebraic points.

The counters never walk all of the height-Q box.  For a pair of target boxes
(one per coordinate) the leading coefficients are looped over, and the
coefficients a1 and a0 are restricted by interval ranges: a0 through
"P has a zero in each box", a1 through the divided difference
(P(x1) - P(x2)) / (x1 - x2) = 0 when the boxes are disjoint.  Surviving
candidates are then decided exactly on isolating intervals.
"""
from __future__ import annotations

import itertools
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .algebra import is_irreducible
from .poly import Interval, Poly, descartes_bound, evaluate, interval_eval, isolate_real_roots, refine, sign_at
from .powers import PowerProduct
from .regions import CurveStrip, Rect, c12, empty_rectangle

REFINE_STEPS = 64
SCALE = 1 << 48
MAX_TILES = 4096
# rough candidate budget for exhaustive checks; beyond it we refuse to run
MAX_WORK = 2 * 10 ** 8


# --------------------------------------------------------------------------
# plain enumeration


@dataclass(frozen=True)
class EnumSpec:
    """Canonical polynomials of degree <= n and height <= Q.

    ``irreducible`` keeps irreducible polynomials only; ``real_pairs`` keeps
    polynomials that carry at least one algebraic point (degree >= 2 and a
    real root).  ``partition`` restricts the leading coefficient to [lo, hi].
    """

    n: int
    Q: int
    irreducible: bool = True
    real_pairs: bool = False
    partition: tuple[int, int] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.Q < 0:
            raise ValueError("Q must be >= 0")
        if self.partition is not None:
            lo, hi = self.partition
            if lo < 1 or hi < lo:
                raise ValueError(f"bad partition slice {self.partition}")

    def lc_range(self) -> range:
        lo, hi = self.partition if self.partition else (1, self.Q)
        return range(lo, min(hi, self.Q) + 1)


def partition_slices(Q: int, parts: int) -> list[tuple[int, int]]:
    """Split [1, Q] into at most ``parts`` contiguous disjoint slices."""
    parts = max(1, min(parts, Q))
    step, extra = divmod(Q, parts)
    out, lo = [], 1
    for k in range(parts):
        hi = lo + step - 1 + (1 if k < extra else 0)
        out.append((lo, hi))
        lo = hi + 1
    return out


def _keep(p: Poly, spec: EnumSpec) -> bool:
    if math.gcd(*p.coeffs) != 1:
        return False
    if spec.irreducible and (p.degree < 1 or not is_irreducible(p)):
        return False
    if spec.real_pairs:
        if p.degree < 2 or not isolate_real_roots(p):
            return False
    return True


def enumerate_polys(spec: EnumSpec) -> Iterator[Poly]:
    """Stream canonical polynomials: by degree, then leading coefficient, then lexicographically."""
    Q = spec.Q
    if Q == 0:
        return
    span = range(-Q, Q + 1)
    for deg in range(0, spec.n + 1):
        lcs = spec.lc_range()
        if deg == 0:
            lcs = [c for c in lcs if c == 1]
        for lc in lcs:
            for rest in itertools.product(span, repeat=deg):
                p = Poly(rest[::-1] + (lc,))
                if _keep(p, spec):
                    yield p


# --------------------------------------------------------------------------
# results


@dataclass
class CountResult:
    count: int = 0
    uncertain: int = 0
    by_degree: dict[int, int] = field(default_factory=dict)
    seconds: float = 0.0

    def merge(self, other: "CountResult") -> None:
        self.count += other.count
        self.uncertain += other.uncertain
        for k, v in other.by_degree.items():
            self.by_degree[k] = self.by_degree.get(k, 0) + v

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "uncertain": self.uncertain,
            "by_degree": {str(k): v for k, v in sorted(self.by_degree.items())},
            "seconds": self.seconds,
        }


# --------------------------------------------------------------------------
# interval tables for pruning


def _power_range(lo: Fraction, hi: Fraction, j: int) -> tuple[Fraction, Fraction]:
    """Exact range of x^j over [lo, hi]."""
    a, b = lo ** j, hi ** j
    if j % 2 == 0 and lo < 0 < hi:
        return Fraction(0), max(a, b)
    return min(a, b), max(a, b)


def _mul_range(r: tuple[Fraction, Fraction], s: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    prods = (r[0] * s[0], r[0] * s[1], r[1] * s[0], r[1] * s[1])
    return min(prods), max(prods)


def _scaled(r: tuple[Fraction, Fraction]) -> tuple[int, int]:
    lo, hi = r[0] * SCALE, r[1] * SCALE
    return math.floor(lo), math.ceil(hi)


@dataclass(frozen=True)
class _Tables:
    box1: tuple[Fraction, Fraction]
    box2: tuple[Fraction, Fraction]
    mono1: tuple[tuple[int, int], ...]
    mono2: tuple[tuple[int, int], ...]
    dd: tuple[tuple[int, int], ...] | None  # None when the open boxes overlap


def _tables(box1, box2, n: int) -> _Tables:
    box1 = (Fraction(box1[0]), Fraction(box1[1]))
    box2 = (Fraction(box2[0]), Fraction(box2[1]))
    r1 = [_power_range(*box1, j) for j in range(n + 1)]
    r2 = [_power_range(*box2, j) for j in range(n + 1)]
    dd = None
    # roots live in the open boxes, so boxes that only touch cannot share a root
    if box1[1] <= box2[0] or box2[1] <= box1[0]:
        rows = [(0, 0)]
        for k in range(1, n + 1):
            lo = hi = Fraction(0)
            for i in range(k):
                a, b = _mul_range(r1[i], r2[k - 1 - i])
                lo += a
                hi += b
            rows.append(_scaled((lo, hi)))
        dd = tuple(rows)
    return _Tables(box1, box2, tuple(map(_scaled, r1)), tuple(map(_scaled, r2)), dd)


def _lin_range(coeffs: Sequence[int], table: Sequence[tuple[int, int]], start: int) -> tuple[int, int]:
    lo = hi = 0
    for j, a in enumerate(coeffs, start):
        if a > 0:
            lo += a * table[j][0]
            hi += a * table[j][1]
        elif a < 0:
            lo += a * table[j][1]
            hi += a * table[j][0]
    return lo, hi


def candidates(deg: int, lcs: Sequence[int], Q: int, t: _Tables) -> Iterator[tuple[int, ...]]:
    """Coefficient tuples (constant first) of degree ``deg`` that may vanish in both boxes."""
    span = range(-Q, Q + 1)
    S = SCALE
    m1, m2, dd = t.mono1, t.mono2, t.dd
    x1lo, x1hi = m1[1]
    x2lo, x2hi = m2[1]
    for lc in lcs:
        for mid in itertools.product(span, repeat=deg - 2):
            upper = mid[::-1] + (lc,)  # a_2 .. a_deg
            lo1, hi1 = _lin_range(upper, m1, 2)
            lo2, hi2 = _lin_range(upper, m2, 2)
            if dd is not None:
                dlo, dhi = _lin_range(upper, dd, 2)
                a1_lo = max(-Q, -(dhi // S))
                a1_hi = min(Q, (-dlo) // S)
            else:
                a1_lo, a1_hi = -Q, Q
            for a1 in range(a1_lo, a1_hi + 1):
                if a1 >= 0:
                    l1, h1 = lo1 + a1 * x1lo, hi1 + a1 * x1hi
                    l2, h2 = lo2 + a1 * x2lo, hi2 + a1 * x2hi
                else:
                    l1, h1 = lo1 + a1 * x1hi, hi1 + a1 * x1lo
                    l2, h2 = lo2 + a1 * x2hi, hi2 + a1 * x2lo
                a0_lo = max(-Q, -(h1 // S), -(h2 // S))
                a0_hi = min(Q, (-l1) // S, (-l2) // S)
                for a0 in range(a0_lo, a0_hi + 1):
                    yield (a0, a1) + upper


def _root_in_open_box(p: Poly, box: tuple[Fraction, Fraction]) -> bool | None:
    """Whether p may vanish inside the open box; None if p vanishes at an endpoint.

    A vanishing endpoint is a rational root, so for the callers (who want
    irreducible polynomials of degree >= 2) it rules p out altogether.
    """
    lo, hi = box
    if lo == hi:
        return False
    s_lo, s_hi = sign_at(p, lo), sign_at(p, hi)
    if s_lo == 0 or s_hi == 0:
        return None
    if s_lo != s_hi:
        return True
    return descartes_bound(p, lo, hi) > 0


# --------------------------------------------------------------------------
# exact membership decisions


def _settle(decide: Callable[..., bool | None], encs: list) -> tuple[bool | None, list]:
    """Run ``decide`` on the enclosures, bisecting all of them until it answers."""
    for _ in range(REFINE_STEPS + 1):
        verdict = decide(*encs)
        if verdict is not None:
            return verdict, encs
        encs = [refine(e, e.width / 2) for e in encs]
    return None, encs


def _rect_points(p: Poly, rect: Rect) -> tuple[int, int]:
    roots = isolate_real_roots(p, squarefree=True)
    on1, on2 = [], []
    for e in roots:
        s1, _ = _settle(lambda x: rect.axis_contains(0, x.lo, x.hi), [e])
        s2, _ = _settle(lambda x: rect.axis_contains(1, x.lo, x.hi), [e])
        on1.append(s1)
        on2.append(s2)
    sure = sum(s is True for s in on1) * sum(s is True for s in on2)
    maybe = sum(s is not False for s in on1) * sum(s is not False for s in on2)
    return sure, maybe - sure


def _strip_points(p: Poly, strip: CurveStrip, tile: tuple[Fraction, Fraction]) -> tuple[int, int]:
    roots = isolate_real_roots(p, squarefree=True)
    tlo, thi = tile

    def in_tile(e):
        if tlo <= e.lo and e.hi <= thi:
            return True
        if e.hi <= tlo or e.lo >= thi:
            return False
        return None

    sure = unsure = 0
    for e1 in roots:
        s, (e1,) = _settle(in_tile, [e1])
        if s is False:
            continue
        for e2 in roots:
            if e2.root_index == e1.root_index:
                g, _ = _settle(lambda a: strip.gap_decision((a.lo, a.hi), (a.lo, a.hi)), [e1])
            else:
                g, _ = _settle(lambda a, b: strip.gap_decision((a.lo, a.hi), (b.lo, b.hi)), [e1, e2])
            if g is False:
                continue
            if s is True and g is True:
                sure += 1
            else:
                unsure += 1
    return sure, unsure


# --------------------------------------------------------------------------
# job layer (one job = a degree, a slice of leading coefficients and a box pair)


@dataclass(frozen=True)
class _Job:
    kind: str  # "rect" or "strip"
    region: object
    deg: int
    Q: int
    lcs: tuple[int, int]
    box1: tuple[Fraction, Fraction]
    box2: tuple[Fraction, Fraction]


def _run_job(job: _Job) -> CountResult:
    res = CountResult()
    t = _tables(job.box1, job.box2, job.deg)
    lo, hi = job.lcs
    for coeffs in candidates(job.deg, range(lo, hi + 1), job.Q, t):
        if coeffs[0] == 0 or math.gcd(*coeffs) != 1:
            continue
        p = Poly(coeffs)
        if not _root_in_open_box(p, t.box1) or not _root_in_open_box(p, t.box2):
            continue
        if not is_irreducible(p):
            continue
        if job.kind == "rect":
            sure, maybe = _rect_points(p, job.region)
        else:
            sure, maybe = _strip_points(p, job.region, job.box1)
        if sure:
            res.count += sure
            res.by_degree[job.deg] = res.by_degree.get(job.deg, 0) + sure
        res.uncertain += maybe
    return res


def _execute(jobs: list[_Job], workers: int) -> CountResult:
    total = CountResult()
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            total.merge(_run_job(job))
        return total
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves job order, so the merge is deterministic
        for part in pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))):
            total.merge(part)
    return total


def _lc_slices(Q: int, deg: int, workers: int) -> list[tuple[int, int]]:
    if workers <= 1:
        return [(1, Q)] if Q >= 1 else []
    return partition_slices(Q, 4 * workers)


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError("algebraic points need degree n >= 2")


def count_rect(n: int, Q: int, rect: Rect, workers: int = 1) -> CountResult:
    """Exact number of algebraic points of degree <= n, height <= Q in the open rectangle."""
    _check_n(n)
    t0 = time.perf_counter()
    if Q < 1 or rect.is_degenerate:
        return CountResult(seconds=time.perf_counter() - t0)
    b1, b2 = rect.outer_box()
    jobs = [
        _Job("rect", rect, deg, Q, sl, b1, b2)
        for deg in range(2, n + 1)
        for sl in _lc_slices(Q, deg, workers)
    ]
    res = _execute(jobs, workers)
    res.seconds = time.perf_counter() - t0
    return res


def strip_tiles(strip: CurveStrip) -> list[tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]]:
    """Cover J by rational tiles; each comes with a box that holds phi(tile) +- halfwidth."""
    J = strip.J
    w = strip.halfwidth.upper()
    if J.width == 0:
        return []
    k = int(min(MAX_TILES, max(1, math.ceil(J.width / w)) if w else MAX_TILES))
    step = J.width / k
    out = []
    for i in range(k):
        lo, hi = J.lo + i * step, J.lo + (i + 1) * step
        flo, fhi = interval_eval(strip.phi, lo, hi)
        out.append(((lo, hi), (flo - w, fhi + w)))
    return out


def count_strip(n: int, Q: int, strip: CurveStrip, workers: int = 1) -> CountResult:
    """Points with alpha_1 in J and |phi(alpha_1) - alpha_2| < c1 Q^(-gamma)."""
    _check_n(n)
    t0 = time.perf_counter()
    if strip.Q != Q:
        strip = strip.with_Q(Q)
    if Q < 1 or strip.c8 == 0:
        return CountResult(seconds=time.perf_counter() - t0)
    jobs = [
        _Job("strip", strip, deg, Q, sl, tile, box2)
        for tile, box2 in strip_tiles(strip)
        for deg in range(2, n + 1)
        for sl in _lc_slices(Q, deg, workers)
    ]
    res = _execute(jobs, workers)
    res.seconds = time.perf_counter() - t0
    return res


# --------------------------------------------------------------------------
# rational points near a curve


def _squarefree_divisors(g: int) -> list[tuple[int, int]]:
    """(d, mobius(d)) for the square-free divisors d of g."""
    primes = []
    m, p = g, 2
    while p * p <= m:
        if m % p == 0:
            primes.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        primes.append(m)
    out = [(1, 1)]
    for pr in primes:
        out += [(d * pr, -mu) for d, mu in out]
    return out


def _coprime_in(lo: int, hi: int, g: int) -> int:
    """Integers m in [lo, hi] with gcd(m, g) = 1."""
    if hi < lo:
        return 0
    if g == 1:
        return hi - lo + 1
    total = 0
    for d, mu in _squarefree_divisors(g):
        total += mu * (hi // d - (lo - 1) // d)
    return total


def _open_int_range(c: Fraction, r: PowerProduct) -> tuple[int, int]:
    """Smallest and largest integers m with |m - c| < r."""
    approx = float(r)
    hi = math.floor(c + approx) + 1
    while r.compare(hi - c) >= 0:  # hi - c >= r
        hi -= 1
    while r.compare(hi + 1 - c) < 0:
        hi += 1
    lo = math.ceil(c - approx) - 1
    while r.compare(c - lo) >= 0:
        lo += 1
    while r.compare(c - (lo - 1)) < 0:
        lo -= 1
    return lo, hi


def count_rational(f: Poly, J: Interval, gamma, Q: int) -> int:
    """Distinct rational points (p1/q, p2/q), q <= Q, with p1/q in J and |f(p1/q) - p2/q| < Q^(-gamma)."""
    gamma = Fraction(gamma) if not isinstance(gamma, float) else Fraction(repr(gamma))
    if not 0 <= gamma < 2:
        raise ValueError("gamma must lie in [0, 2)")
    if Q < 1 or J.lo is None or J.hi is None or J.width == 0:
        return 0
    w = PowerProduct.power(Q, -gamma)
    total = 0
    for q in range(1, Q + 1):
        r = w * q
        p_lo = math.floor(J.lo * q) + 1
        p_hi = math.ceil(J.hi * q) - 1
        for p1 in range(p_lo, p_hi + 1):
            c = evaluate(f, Fraction(p1, q)) * q
            lo, hi = _open_int_range(Fraction(c), r)
            # a point is counted once, through its reduced representation
            total += _coprime_in(lo, hi, math.gcd(p1, q))
    return total


# --------------------------------------------------------------------------
# scaling experiments


@dataclass
class ScalingReport:
    kind: str
    grid: list[int]
    counts: list[CountResult]
    slope: float
    intercept: float
    residuals: list[float]
    expected_exponent: float

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "grid": self.grid,
            "counts": [c.as_dict() for c in self.counts],
            "slope": self.slope,
            "intercept": self.intercept,
            "residuals": self.residuals,
            "expected_exponent": self.expected_exponent,
        }


def fit_loglog(grid: Sequence[int], counts: Sequence[int]) -> tuple[float, float, list[float]]:
    pts = [(math.log(q), math.log(c)) for q, c in zip(grid, counts) if c > 0]
    if len(pts) < 3:
        raise ValueError(
            f"slope needs >= 3 grid points with positive counts; got counts {list(counts)} on grid {list(grid)}"
        )
    xs, ys = zip(*pts)
    slope, intercept = statistics.linear_regression(xs, ys)
    residuals = [y - (slope * x + intercept) for x, y in pts]
    return slope, intercept, residuals


def scaling_experiment(kind: str, config: dict, grid: Sequence[int], workers: int = 1) -> ScalingReport:
    """Count on each Q of the grid and fit log(count) against log(Q).

    ``config`` keys: rect -> n, d, gamma (pair), c8; strip -> n, phi, J, gamma,
    c8; rational -> f, J, gamma.
    """
    grid = [int(q) for q in grid]
    if len(grid) < 3:
        raise ValueError("a scaling experiment needs at least 3 grid points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    results = []
    if kind == "rect":
        n = config["n"]
        g = config["gamma"]
        expected = n + 1 - float(g[0]) - float(g[1])
        for Q in grid:
            rect = Rect.from_sides(config["d"], g, config.get("c8", 1), Q)
            results.append(count_rect(n, Q, rect, workers))
    elif kind == "strip":
        n = config["n"]
        expected = n + 1 - float(config["gamma"])
        for Q in grid:
            strip = CurveStrip(config["phi"], config["J"], config["gamma"], config.get("c8", 1), Q)
            results.append(count_strip(n, Q, strip, workers))
    elif kind == "rational":
        expected = 3 - float(config["gamma"])
        for Q in grid:
            t0 = time.perf_counter()
            c = count_rational(config["f"], config["J"], config["gamma"], Q)
            results.append(CountResult(c, 0, {}, time.perf_counter() - t0))
    else:
        raise ValueError(f"unknown scaling kind {kind!r}")
    slope, intercept, residuals = fit_loglog(grid, [r.count for r in results])
    return ScalingReport(kind, grid, results, slope, intercept, residuals, expected)


# --------------------------------------------------------------------------
# emptiness and upper-bound checks


@dataclass
class UpperBoundReport:
    count: int
    uncertain: int
    bound: PowerProduct
    holds: bool
    seconds: float


def verify_theorem3(n: int, Q: int, rect: Rect, workers: int = 1) -> UpperBoundReport:
    """Exhaustive count against c12 * Q^(n+1) * area, compared exactly."""
    if rect.gamma is None:
        raise ValueError("the rectangle must be built from (d, gamma, c8, Q)")
    if not all(0 < g < 1 for g in rect.gamma):
        raise ValueError("need 0 < gamma_i < 1")
    d = rect.center
    if d[0] == d[1]:
        raise ValueError("need d1 != d2")
    res = count_rect(n, Q, rect, workers)
    bound = rect.area * (c12(n, d) * Fraction(Q) ** (n + 1))
    # holds only if even every undecided point would stay below the bound
    holds = bound.compare(res.count + res.uncertain) < 0
    return UpperBoundReport(res.count, res.uncertain, bound, holds, res.seconds)


def work_estimate(n: int, Q: int, rect: Rect) -> int:
    """Upper estimate of candidate tuples the pruned scan would visit."""
    (a1, b1), (a2, b2) = rect.outer_box()
    reach = max(abs(a1), abs(b1), abs(a2), abs(b2), Fraction(1))
    spread = (b1 - a1) + (b2 - a2)
    total = 0
    for deg in range(2, n + 1):
        a1_span = min(2 * Q + 1, math.ceil(Q * deg * deg * reach ** (deg - 1) * spread) + 1)
        total += Q * (2 * Q + 1) ** (deg - 2) * a1_span
    return total


def verify_theorem2(p: int, q: int, n: int, Q: int, workers: int = 1) -> tuple[bool, CountResult]:
    """Count inside the constructed empty rectangle; true iff it is empty with nothing undecided."""
    rect = empty_rectangle(p, q, n, Q)
    est = work_estimate(n, Q, rect)
    if est > MAX_WORK:
        raise ValueError(
            f"exhaustive only: about {est:.3g} candidates for n={n}, Q={Q} exceeds the budget {MAX_WORK:.3g}"
        )
    res = count_rect(n, Q, rect, workers)
    return res.count == 0 and res.uncertain == 0, res
