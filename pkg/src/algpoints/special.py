"""Special squares, lattice counts, Minkowski witnesses and the measure of the bad set."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .counting import partition_slices
from .poly import (
    Interval,
    Poly,
    RootEnclosure,
    derivative,
    evaluate,
    height,
    interval_eval,
    isolate_real_roots,
    refine,
    sign_at,
)
from .powers import PowerProduct, as_power
from .regions import LadderSpec, Rect, _frac, h_n_exact, ladder

THRESHOLD_BITS = 160


class InfiniteCount(ValueError):
    pass


# --------------------------------------------------------------------------
# integer pairs under two linear constraints


def _int_span(lo: Fraction, hi: Fraction) -> tuple[int, int]:
    return math.ceil(lo), math.floor(hi)


def lattice_count(d: Sequence, K1, K2) -> int:
    """Integer pairs (b1, b0) with |b1 d_i + b0| <= K_i for i = 1, 2."""
    d1, d2 = _frac(d[0]), _frac(d[1])
    K1, K2 = _frac(K1), _frac(K2)
    if K1 < 0 or K2 < 0:
        raise ValueError("K1 and K2 must be nonnegative")
    if d1 == d2:
        # b1 a multiple of den(d), b0 = -b1 d gives a zero residual for every such b1
        raise InfiniteCount("d1 = d2: the solution set is infinite")
    # subtracting the constraints: |b1 (d1 - d2)| <= K1 + K2
    reach = (K1 + K2) / abs(d1 - d2)
    total = 0
    for b1 in range(-math.floor(reach), math.floor(reach) + 1):
        lo = max(-K1 - b1 * d1, -K2 - b1 * d2)
        hi = min(K1 - b1 * d1, K2 - b1 * d2)
        a, b = _int_span(lo, hi)
        if b >= a:
            total += b - a + 1
    return total


def lemma6_bound(eps1, K1, K2) -> Fraction:
    """(4 K1 / eps1 + 1)(4 K2 + 1)."""
    eps1 = _frac(eps1)
    if eps1 <= 0:
        raise ValueError("eps1 must be positive")
    return (4 * _frac(K1) / eps1 + 1) * (4 * _frac(K2) + 1)


def lemma6_bound_ordered(eps1, K1, K2) -> Fraction:
    """The bound with the coordinates ordered so that the first K is the larger."""
    K1, K2 = _frac(K1), _frac(K2)
    return lemma6_bound(eps1, max(K1, K2), min(K1, K2))


# --------------------------------------------------------------------------
# sublevel sets {x : |P(x)| < t}


@dataclass(frozen=True)
class Endpoint:
    """An exact rational or an algebraic number held by an isolating enclosure."""

    value: Fraction | None = None
    enclosure: RootEnclosure | None = None

    @property
    def lo(self) -> Fraction:
        return self.value if self.enclosure is None else self.enclosure.lo

    @property
    def hi(self) -> Fraction:
        return self.value if self.enclosure is None else self.enclosure.hi

    @property
    def width(self) -> Fraction:
        return Fraction(0) if self.enclosure is None else self.enclosure.width

    def refined(self, width) -> "Endpoint":
        if self.enclosure is None or self.enclosure.width < width:
            return self
        return Endpoint(None, refine(self.enclosure, width))

    def sign_vs(self, x) -> tuple[int, "Endpoint"]:
        """sign(x - endpoint), exactly, with the refined endpoint."""
        x = Fraction(x)
        if self.enclosure is None:
            return (x > self.value) - (x < self.value), self
        if sign_at(self.enclosure.poly, x) == 0 and self.enclosure.lo < x < self.enclosure.hi:
            return 0, self
        e = self
        while e.lo < x < e.hi:
            e = Endpoint(None, refine(e.enclosure, e.width / 2))
        return (1 if x >= e.hi else -1), e


@dataclass(frozen=True)
class SublevelInterval:
    """Open interval (left, right); ``None`` marks an unbounded side."""

    left: Endpoint | None
    right: Endpoint | None

    def outer(self) -> tuple[Fraction | None, Fraction | None]:
        return (None if self.left is None else self.left.lo, None if self.right is None else self.right.hi)

    def inner(self) -> tuple[Fraction, Fraction] | None:
        lo = None if self.left is None else self.left.hi
        hi = None if self.right is None else self.right.lo
        if lo is not None and hi is not None and lo >= hi:
            return None
        return lo, hi

    def contains(self, x) -> bool:
        if self.left is not None and self.left.sign_vs(x)[0] <= 0:
            return False
        if self.right is not None and self.right.sign_vs(x)[0] >= 0:
            return False
        return True

    def refined(self, width) -> "SublevelInterval":
        return SublevelInterval(
            None if self.left is None else self.left.refined(width),
            None if self.right is None else self.right.refined(width),
        )


def _clip_left(ep: Endpoint | None, bound: Fraction) -> tuple[Endpoint, bool]:
    """max(ep, bound) as an endpoint; flag says the clip bound won."""
    if ep is None:
        return Endpoint(bound), True
    s, ep = ep.sign_vs(bound)
    return (Endpoint(bound), True) if s >= 0 else (ep, False)


def _clip_right(ep: Endpoint | None, bound: Fraction) -> tuple[Endpoint, bool]:
    if ep is None:
        return Endpoint(bound), True
    s, ep = ep.sign_vs(bound)
    return (Endpoint(bound), True) if s <= 0 else (ep, False)


def _isolate(p: Poly) -> list[RootEnclosure]:
    p = p.scale_to_integer()
    if p.degree == 2:
        a0, a1, a2 = p.coeffs
        return isolate_real_roots(p, squarefree=a1 * a1 != 4 * a0 * a2)
    return isolate_real_roots(p)


def _boundary_points(P: Poly, t: Fraction) -> list[RootEnclosure]:
    """Disjoint sorted enclosures of the real roots of P - t and P + t (they share none)."""
    edges = sorted(_isolate(P - t) + _isolate(P + t), key=lambda e: e.lo)
    while True:
        clash = [k for k in range(len(edges) - 1) if edges[k].hi > edges[k + 1].lo]
        if not clash:
            return edges
        for k in set(clash) | {k + 1 for k in clash}:
            edges[k] = refine(edges[k], edges[k].width / 2)
        edges.sort(key=lambda e: e.lo)


def sublevel_intervals(P: Poly, t, clip: Interval | None = None, width=Fraction(1, 2 ** 32)) -> list[SublevelInterval]:
    """The open set {x : |P(x)| < t} as sorted disjoint intervals, optionally clipped.

    Algebraic endpoints are refined below ``width``.
    """
    t = _frac(t)
    if t <= 0:
        raise ValueError("t must be positive")
    if P.is_zero():
        raise ValueError("P must be nonzero")
    if P.degree == 0:
        if abs(P.coeffs[0]) >= t:
            return []
        if clip is None or clip.lo is None or clip.hi is None:
            raise ValueError("constant P below the threshold: supply a bounded clip interval")
        return [SublevelInterval(Endpoint(clip.lo), Endpoint(clip.hi))] if clip.lo < clip.hi else []
    edges = _boundary_points(P, t)
    pieces: list[SublevelInterval] = []
    bounds: list[Endpoint | None] = [None] + [Endpoint(None, e) for e in edges] + [None]
    for left, right in zip(bounds, bounds[1:]):
        if left is None and right is None:
            probe = Fraction(0)
        elif left is None:
            probe = right.lo - 1
        elif right is None:
            probe = left.hi + 1
        else:
            probe = (left.hi + right.lo) / 2
        if abs(evaluate(P, probe)) < t:
            pieces.append(SublevelInterval(left, right))
    if clip is None:
        return [p.refined(width) for p in pieces]
    out = []
    for piece in pieces:
        left, right = piece.left, piece.right
        if clip.hi is not None and left is not None and left.sign_vs(clip.hi)[0] <= 0:
            continue
        if clip.lo is not None and right is not None and right.sign_vs(clip.lo)[0] >= 0:
            continue
        if clip.lo is not None:
            left, _ = _clip_left(left, clip.lo)
        if clip.hi is not None:
            right, _ = _clip_right(right, clip.hi)
        out.append(SublevelInterval(left, right).refined(width))
    return out


# --------------------------------------------------------------------------
# union of boxes


Box = tuple[Fraction, Fraction, Fraction, Fraction]  # x0, x1, y0, y1


def _merged_length(spans: list[tuple[Fraction, Fraction]]) -> Fraction:
    total = Fraction(0)
    cur_lo = cur_hi = None
    for lo, hi in sorted(spans):
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        elif hi > cur_hi:
            cur_hi = hi
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


@dataclass
class BoxUnion:
    """Union of axis-parallel rational boxes; ``area`` resolves overlaps by a sweep."""

    boxes: list[Box] = field(default_factory=list)

    def add(self, x0, x1, y0, y1) -> None:
        if x1 > x0 and y1 > y0:
            self.boxes.append((Fraction(x0), Fraction(x1), Fraction(y0), Fraction(y1)))

    def area(self) -> Fraction:
        if not self.boxes:
            return Fraction(0)
        xs = sorted({b[0] for b in self.boxes} | {b[1] for b in self.boxes})
        by_start = sorted(self.boxes)
        total = Fraction(0)
        active: list[Box] = []
        k = 0
        for xa, xb in zip(xs, xs[1:]):
            while k < len(by_start) and by_start[k][0] <= xa:
                active.append(by_start[k])
                k += 1
            active = [b for b in active if b[1] > xa]
            spans = [(b[2], b[3]) for b in active if b[0] <= xa and b[1] >= xb]
            if spans:
                total += (xb - xa) * _merged_length(spans)
        return total

    def contains(self, x, y) -> bool:
        return any(b[0] < x < b[1] and b[2] < y < b[3] for b in self.boxes)

    def __len__(self) -> int:
        return len(self.boxes)


# --------------------------------------------------------------------------
# bad set


MAX_BADSET_N = 3
MAX_BADSET_Q = 50


def _slack_candidates(deg: int, lcs: Sequence[int], Q: int, box1, box2, t1: Fraction, t2: Fraction):
    """Coefficient tuples of degree ``deg`` (lc in lcs) with |P| < t_i possible on box_i."""
    span = range(-Q, Q + 1)
    for lc in lcs:
        for rest in itertools.product(span, repeat=deg - 1) if deg >= 1 else [()]:
            top = rest[::-1] + (lc,)  # a_1 .. a_deg
            base = Poly((0,) + top)
            l1, h1 = interval_eval(base, *box1)
            l2, h2 = interval_eval(base, *box2)
            a0_lo = max(-Q, math.floor(-h1 - t1), math.floor(-h2 - t2))
            a0_hi = min(Q, math.ceil(-l1 + t1), math.ceil(-l2 + t2))
            for a0 in range(a0_lo, a0_hi + 1):
                yield (a0,) + top


def _spans(ivals: list[SublevelInterval], inner: bool) -> list[tuple[Fraction, Fraction]]:
    out = []
    for iv in ivals:
        s = iv.inner() if inner else iv.outer()
        if s is not None and s[0] < s[1]:
            out.append(s)
    return out


def _intersect(a: list[tuple[Fraction, Fraction]], b: list[tuple[Fraction, Fraction]]):
    out = []
    for x0, x1 in a:
        for y0, y1 in b:
            lo, hi = max(x0, y0), min(x1, y1)
            if lo < hi:
                out.append((lo, hi))
    return out


def _deriv_set(P: Poly, bound: Fraction, clip: Interval, width) -> list[SublevelInterval]:
    dP = derivative(P)
    if dP.is_zero():
        return [SublevelInterval(Endpoint(clip.lo), Endpoint(clip.hi))]
    return sublevel_intervals(dP, bound, clip, width)


@dataclass(frozen=True)
class _BadJob:
    deg: int
    lcs: tuple[int, int]
    Q: int
    boxes: tuple  # (inner box, outer box) per axis
    t_lo: tuple[Fraction, Fraction]
    t_hi: tuple[Fraction, Fraction]
    dbound: Fraction
    width: Fraction


def _poly_region(P: Poly, boxes, t_lo, t_hi, dbound: Fraction, width: Fraction) -> tuple[list[Box], list[Box]]:
    """Inner and outer box approximations of P's piece of the bad set."""
    (in1, out1), (in2, out2) = boxes
    pieces = []
    for inner, (b1, b2), ts in ((True, (in1, in2), t_lo), (False, (out1, out2), t_hi)):
        A1 = sublevel_intervals(P, ts[0], Interval(*b1), width)
        A2 = sublevel_intervals(P, ts[1], Interval(*b2), width) if A1 else []
        if not A2:
            pieces.append([])
            continue
        # the derivative threshold is rational, so inner/outer differ only by enclosure width
        B1 = _deriv_set(P, dbound, Interval(*b1), width)
        B2 = _deriv_set(P, dbound, Interval(*b2), width)
        s_a1, s_a2 = _spans(A1, inner), _spans(A2, inner)
        s_b1, s_b2 = _spans(B1, inner), _spans(B2, inner)
        rects = []
        for x0, x1 in _intersect(s_a1, s_b1):
            rects += [(x0, x1, y0, y1) for y0, y1 in s_a2]
        for x0, x1 in s_a1:
            rects += [(x0, x1, y0, y1) for y0, y1 in _intersect(s_a2, s_b2)]
        pieces.append(rects)
    return pieces[0], pieces[1]


def _badset_job(job: _BadJob) -> tuple[list[Box], list[Box], list[tuple[int, ...]]]:
    inner_boxes, outer_boxes, polys = [], [], []
    (_, out1), (_, out2) = job.boxes
    lcs = range(job.lcs[0], job.lcs[1] + 1)
    for coeffs in _slack_candidates(job.deg, lcs, job.Q, out1, out2, job.t_hi[0], job.t_hi[1]):
        inner_rects, outer_rects = _poly_region(Poly(coeffs), job.boxes, job.t_lo, job.t_hi, job.dbound, job.width)
        if outer_rects:
            polys.append(coeffs)
        outer_boxes += outer_rects
        inner_boxes += inner_rects
    return inner_boxes, outer_boxes, polys


@dataclass
class BadSetReport:
    area_lo: Fraction
    area_hi: Fraction
    square_area: PowerProduct
    ratio_lo: float
    ratio_hi: float
    inner: BoxUnion
    outer: BoxUnion
    polys: list[tuple[int, ...]]
    mc_estimate: float | None = None
    mc_sigma: float | None = None
    mc_samples: int = 0

    def mc_consistent(self, k: float = 3.0) -> bool:
        """Monte-Carlo estimate within k sigma of the exact area interval."""
        if self.mc_estimate is None:
            raise ValueError("no Monte-Carlo estimate was run")
        slack = k * self.mc_sigma
        return float(self.area_lo) - slack <= self.mc_estimate <= float(self.area_hi) + slack

    def as_dict(self) -> dict:
        return {
            "area_lo": str(self.area_lo),
            "area_hi": str(self.area_hi),
            "area": float((self.area_lo + self.area_hi) / 2),
            "mu2": float(self.square_area),
            "ratio_lo": self.ratio_lo,
            "ratio_hi": self.ratio_hi,
            "boxes": len(self.outer),
            "polys": len(self.polys),
            "mc_estimate": self.mc_estimate,
            "mc_sigma": self.mc_sigma,
            "mc_samples": self.mc_samples,
        }


def _run_badset_jobs(jobs: list[_BadJob], workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [_badset_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_badset_job, jobs))


def _thresholds(ts) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    ts = [as_power(t) for t in ts]
    return tuple(t.lower(THRESHOLD_BITS) for t in ts), tuple(t.upper(THRESHOLD_BITS) for t in ts)


def _refined_union(run, square: Rect, rel_width: Fraction):
    """Rebuild the inner/outer unions with finer endpoints until the area gap is small.

    ``run(width)`` returns (inner boxes, outer boxes, kept polynomials) triples.
    """
    target = rel_width * square.area.lower()
    width = min(square.side(0).lower(), square.side(1).lower()) / 2 ** 40
    while True:
        inner, outer, polys = BoxUnion(), BoxUnion(), []
        for ib, ob, ps in run(width):
            inner.boxes += ib
            outer.boxes += ob
            polys += ps
        a_lo, a_hi = inner.area(), outer.area()
        if a_hi - a_lo < target:
            return inner, outer, polys, a_lo, a_hi
        width /= 2 ** 8


def _report(square: Rect, inner, outer, polys, a_lo, a_hi) -> BadSetReport:
    mu2 = square.area
    return BadSetReport(a_lo, a_hi, mu2, float(a_lo / mu2.upper()), float(a_hi / mu2.lower()), inner, outer, polys)


def _square_boxes(square: Rect):
    inner_sq = square.inner_box(THRESHOLD_BITS)
    outer_sq = square.outer_box(THRESHOLD_BITS)
    return ((inner_sq[0], outer_sq[0]), (inner_sq[1], outer_sq[1]))


def bad_set_of(
    polys: Sequence[Poly],
    square: Rect,
    thresholds: Sequence,
    dbound,
    rel_width: Fraction = Fraction(1, 10 ** 9),
) -> BadSetReport:
    """The bad-set construction restricted to the given polynomials and thresholds."""
    t_lo, t_hi = _thresholds(thresholds)
    boxes = _square_boxes(square)
    dbound = _frac(dbound)
    polys = [Poly(p.coeffs) for p in polys]

    def one(width):
        out = []
        for P in polys:
            ib, ob = _poly_region(P, boxes, t_lo, t_hi, dbound, width)
            out.append((ib, ob, [P.coeffs] if ob else []))
        return out

    return _report(square, *_refined_union(one, square, rel_width))


def lemma7_bad_set(
    n: int,
    Q: int,
    v: Sequence,
    delta_n,
    square: Rect,
    mc_samples: int = 20000,
    seed: int = 0,
    workers: int = 1,
    rel_width: Fraction = Fraction(1, 10 ** 9),
) -> BadSetReport:
    """Measure of the set of x in the square where some nonzero P of degree <= n, height <= Q has
    |P(x_i)| < h_n Q^(-v_i) for both i and |P'(x_i)| < delta_n Q for some i.

    The area comes back as an interval [area_lo, area_hi] from inner and outer box
    unions; the Monte-Carlo estimate is a cross-check drawn with ``seed``.
    """
    if n < 1 or n > MAX_BADSET_N:
        raise ValueError(f"bad-set measure supports 1 <= n <= {MAX_BADSET_N}")
    if Q > MAX_BADSET_Q:
        raise ValueError(f"bad-set measure supports Q <= {MAX_BADSET_Q} (exhaustive enumeration)")
    v1, v2 = _frac(v[0]), _frac(v[1])
    if v1 <= 0 or v2 <= 0 or v1 + v2 != n - 1:
        raise ValueError(f"need v1, v2 > 0 with v1 + v2 = n - 1 = {n - 1}")
    delta_n = _frac(delta_n)
    if delta_n <= 0:
        raise ValueError("delta_n must be positive")
    d = square.center
    if d[0] == d[1]:
        raise ValueError("need d1 != d2")
    if Q < 1:
        return _report(square, BoxUnion(), BoxUnion(), [], Fraction(0), Fraction(0))

    h = h_n_exact(n, d)
    ts = [h * PowerProduct.power(Q, -vi) for vi in (v1, v2)]
    t_lo, t_hi = _thresholds(ts)
    boxes = _square_boxes(square)
    dbound = delta_n * Q
    slices = partition_slices(Q, 4 * workers) if workers > 1 else [(1, Q)]

    def run(width):
        jobs = [_BadJob(deg, sl, Q, boxes, t_lo, t_hi, dbound, width) for deg in range(n + 1) for sl in slices]
        return _run_badset_jobs(jobs, workers)

    report = _report(square, *_refined_union(run, square, rel_width))
    if mc_samples:
        est, sigma = _monte_carlo(report, square, ts, dbound, mc_samples, seed)
        report.mc_estimate, report.mc_sigma, report.mc_samples = est, sigma, mc_samples
    return report


def _monte_carlo(report: BadSetReport, square: Rect, ts, dbound, samples: int, seed: int):
    """Sample the square uniformly and test the defining inequalities in floating point.

    Only the polynomials that survived the interval pre-filter can satisfy the
    system, so they are the ones evaluated.  sigma is the binomial standard
    error at the exact area's proportion.
    """
    mu2 = float(square.area)
    rng = np.random.default_rng(seed)
    c = [float(x) for x in square.center]
    hw = [float(hv) for hv in square.half]
    x1 = rng.uniform(c[0] - hw[0], c[0] + hw[0], samples)
    x2 = rng.uniform(c[1] - hw[1], c[1] + hw[1], samples)
    t1, t2 = float(ts[0]), float(ts[1])
    db = float(dbound)
    hit = np.zeros(samples, dtype=bool)
    if report.polys:
        deg = max(len(p) for p in report.polys) - 1
        C = np.zeros((len(report.polys), deg + 1))
        for k, p in enumerate(report.polys):
            C[k, : len(p)] = p
        D = C[:, 1:] * np.arange(1, deg + 1)
        for lo in range(0, samples, 4096):
            s1, s2 = x1[lo : lo + 4096], x2[lo : lo + 4096]
            V1 = np.vander(s1, deg + 1, increasing=True)
            V2 = np.vander(s2, deg + 1, increasing=True)
            p1, p2 = C @ V1.T, C @ V2.T
            if deg >= 1:
                q1, q2 = D @ V1[:, :deg].T, D @ V2[:, :deg].T
            else:
                q1 = q2 = np.zeros_like(p1)
            ok = (np.abs(p1) < t1) & (np.abs(p2) < t2) & ((np.abs(q1) < db) | (np.abs(q2) < db))
            hit[lo : lo + 4096] = ok.any(axis=0)
    est = mu2 * float(hit.mean())
    p = float((report.area_lo + report.area_hi) / 2) / mu2
    p = min(max(p, 0.0), 1.0)
    sigma = mu2 * math.sqrt(p * (1 - p) / samples)
    return est, sigma


# --------------------------------------------------------------------------
# Minkowski witness


def minkowski_witness(x: Sequence, n: int, Q: int, d: Sequence) -> Poly:
    """Nonzero P of degree <= n, height <= Q with |P(x_i)| <= h_n Q^(-(n-1)/2) and
    |a_j| <= max(1, 3|d1|, 3|d2|)^(-n-1) Q for 2 <= j <= n.

    Returns the solution of least height (ties: least degree, then least
    coefficient tuple), normalised so the leading coefficient is positive.
    """
    if Q < 1:
        raise ValueError("Q must be a positive integer")
    if n < 1:
        raise ValueError("n must be >= 1")
    x1, x2 = _frac(x[0]), _frac(x[1])
    if x1 == x2:
        raise ValueError("need x1 != x2")
    d1, d2 = abs(_frac(d[0])), abs(_frac(d[1]))
    M = max(Fraction(1), 3 * d1, 3 * d2)
    cap = math.floor(Fraction(Q) / M ** (n + 1))
    t = h_n_exact(n, d) * PowerProduct.power(Q, -Fraction(n - 1, 2))
    t_up = t.upper()
    best = None
    span = range(-cap, cap + 1)
    gap = x1 - x2
    for high in itertools.product(span, repeat=max(0, n - 1)):
        upper = high[::-1]  # a_2 .. a_n
        rest1 = sum(a * x1 ** j for j, a in enumerate(upper, 2))
        rest2 = sum(a * x2 ** j for j, a in enumerate(upper, 2))
        # P(x1) - P(x2) = a1 (x1 - x2) + rest1 - rest2, and both |P(x_i)| <= t
        centre = -(rest1 - rest2) / gap
        reach = 2 * t_up / abs(gap)
        for a1 in range(max(-Q, math.ceil(centre - reach)), min(Q, math.floor(centre + reach)) + 1):
            base1 = rest1 + a1 * x1
            base2 = rest2 + a1 * x2
            lo = max(-Q, math.ceil(-base1 - t_up), math.ceil(-base2 - t_up))
            hi = min(Q, math.floor(-base1 + t_up), math.floor(-base2 + t_up))
            for a0 in range(lo, hi + 1):
                coeffs = (a0, a1) + upper
                if not any(coeffs):
                    continue
                if t.compare(abs(base1 + a0)) > 0 or t.compare(abs(base2 + a0)) > 0:
                    continue
                P = Poly(coeffs)
                if P.lc < 0:
                    P = -P
                key = (height(P), P.degree, P.coeffs)
                if best is None or key < best[0]:
                    best = (key, P)
    if best is None:
        raise RuntimeError(f"no witness found for x={x}, n={n}, Q={Q}, d={d}; the search should never fail")
    return best[1]


def check_witness(P: Poly, x: Sequence, n: int, Q: int, d: Sequence) -> bool:
    """Independent re-check of every constraint on a Minkowski witness."""
    if P.is_zero() or P.degree > n or height(P) > Q:
        return False
    d1, d2 = abs(_frac(d[0])), abs(_frac(d[1]))
    M = max(Fraction(1), 3 * d1, 3 * d2)
    cap = Fraction(Q) / M ** (n + 1)
    if any(abs(a) > cap for a in P.coeffs[2:]):
        return False
    # |P(x_i)|^2 <= h_n^2 Q^-(n-1), all rational
    bound_sq = (h_n_exact(n, d) ** 2).rational() / Fraction(Q) ** (n - 1)
    return all(evaluate(P, _frac(xi)) ** 2 <= bound_sq for xi in x)


# --------------------------------------------------------------------------
# special squares


@dataclass
class LadderRow:
    l: int
    band: tuple[PowerProduct, PowerProduct]
    count: int
    uncertain: int
    threshold: PowerProduct
    satisfied: bool | None

    def as_dict(self) -> dict:
        return {
            "l": self.l,
            "band": [float(self.band[0]), float(self.band[1])],
            "count": self.count,
            "uncertain": self.uncertain,
            "threshold": float(self.threshold),
            "satisfied": self.satisfied,
        }


@dataclass
class SpecialSquareReport:
    square: Rect
    ladder: LadderSpec
    rows: list[LadderRow]
    is_special: bool | None

    def as_dict(self) -> dict:
        return {
            "center": [str(c) for c in self.square.center],
            "L": self.ladder.L,
            "delta": str(self.ladder.delta),
            "rows": [r.as_dict() for r in self.rows],
            "is_special": self.is_special,
        }


def _min_abs_quadratic(a2: int, a1: int, a0: int, lo: Fraction, hi: Fraction) -> Fraction:
    """min of |a2 x^2 + a1 x + a0| over [lo, hi], exactly."""
    P = Poly((a0, a1, a2))
    v_lo, v_hi = evaluate(P, lo), evaluate(P, hi)
    if v_lo == 0 or v_hi == 0 or (v_lo > 0) != (v_hi > 0):
        return Fraction(0)
    best = min(abs(v_lo), abs(v_hi))
    if a2:
        xv = Fraction(-a1, 2 * a2)
        if lo < xv < hi:
            best = min(best, abs(evaluate(P, xv)))  # a sign change was ruled out above
    return Fraction(best)


def _band_ints(lo: PowerProduct, hi: PowerProduct, Q: int) -> range:
    """Integers m with lo <= m < hi, 1 <= m <= Q."""
    start = max(1, math.ceil(lo.lower()))
    while start > 1 and lo.compare(start - 1) >= 0:
        start -= 1
    while start <= Q and lo.compare(start) < 0:
        start += 1
    stop = min(Q, math.floor(hi.upper()))
    while stop >= start and hi.compare(stop) <= 0:
        stop -= 1
    return range(start, stop + 1)


def special_square_check(square: Rect, gamma, v: Sequence, Q: int, h=None) -> SpecialSquareReport:
    """Check the per-band quadratic counts of a square against their thresholds.

    ``h`` defaults to h_2 at the square's midpoint.  The condition "some x0 in the
    square with |P(x0_i)| < h Q^(-v_i)" splits into two one-dimensional minima.
    """
    gamma = _frac(gamma)
    v1, v2 = _frac(v[0]), _frac(v[1])
    if v1 <= 0 or v2 <= 0 or v1 + v2 != 1:
        raise ValueError("need v1, v2 > 0 with v1 + v2 = 1")
    if not Fraction(1, 2) < gamma < 1:
        raise ValueError("need 1/2 < gamma < 1")
    d = square.center
    if d[0] == d[1]:
        raise ValueError("need d1 != d2")
    if Q < 1:
        raise ValueError("Q must be positive")
    if h is None:
        h = h_n_exact(2, d)
    h = as_power(h)
    spec = ladder(gamma, d, h)
    delta = spec.delta
    mu2 = square.area
    ts = [h * PowerProduct.power(Q, -vi) for vi in (v1, v2)]
    t_lo = [t.lower(THRESHOLD_BITS) for t in ts]
    t_hi = [t.upper(THRESHOLD_BITS) for t in ts]
    inner = square.inner_box(THRESHOLD_BITS)
    outer = square.outer_box(THRESHOLD_BITS)

    rows = []
    for l in range(1, spec.L + 3):
        lo = PowerProduct.power(Q, spec.lam(l + 1), delta)
        hi = PowerProduct.power(Q, spec.lam(l), delta)
        count = unsure = 0
        for m in _band_ints(lo, hi, Q):
            for a2 in (m, -m):
                c, u = _count_quadratics(a2, Q, inner, outer, t_lo, t_hi)
                count += c
                unsure += u
        threshold = PowerProduct.power(Q, 1 + 2 * spec.lam(l + 1), delta ** 3 * 2 ** (l + 3)) * mu2
        if threshold.compare(count + unsure) <= 0:
            ok = True
        elif threshold.compare(count) > 0:
            ok = False
        else:
            ok = None
        rows.append(LadderRow(l, (lo, hi), count, unsure, threshold, ok))
    flags = [r.satisfied for r in rows]
    is_special = False if False in flags else (None if None in flags else True)
    return SpecialSquareReport(square, spec, rows, is_special)


def _count_quadratics(a2: int, Q: int, inner, outer, t_lo, t_hi) -> tuple[int, int]:
    count = unsure = 0
    for a1 in range(-Q, Q + 1):
        base = Poly((0, a1, a2))
        ranges = [interval_eval(base, *outer[i]) for i in (0, 1)]
        a0_lo = max([-Q] + [math.floor(-r[1] - t_hi[i]) for i, r in enumerate(ranges)])
        a0_hi = min([Q] + [math.ceil(-r[0] + t_hi[i]) for i, r in enumerate(ranges)])
        for a0 in range(a0_lo, a0_hi + 1):
            verdicts = []
            for i in (0, 1):
                if _min_abs_quadratic(a2, a1, a0, *inner[i]) < t_lo[i]:
                    verdicts.append(True)
                elif _min_abs_quadratic(a2, a1, a0, *outer[i]) >= t_hi[i]:
                    verdicts.append(False)
                else:
                    verdicts.append(None)
            if False in verdicts:
                continue
            if None in verdicts:
                unsure += 1
            else:
                count += 1
    return count, unsure


@dataclass
class DensityReport:
    Q: int
    tiles: int
    special: int
    undecided: int
    reports: list[SpecialSquareReport]

    @property
    def fraction(self) -> float:
        return self.special / self.tiles if self.tiles else float("nan")


def special_density(phi: Poly, J: Interval, gamma, Q: int, c8=1, v=(Fraction(1, 2), Fraction(1, 2))) -> DensityReport:
    """Tile the curve over J by squares of side c8 Q^(-gamma) and check each for specialness."""
    gamma = _frac(gamma)
    side = PowerProduct.power(Q, -gamma, _frac(c8))
    k = max(1, math.floor(J.width / side.upper()))
    step = J.width / k
    reports = []
    special = undecided = 0
    for i in range(k):
        d1 = J.lo + (i + Fraction(1, 2)) * step
        d2 = Fraction(evaluate(phi, d1))
        if d1 == d2:
            continue
        sq = Rect.from_sides((d1, d2), (gamma, gamma), c8, Q)
        rep = special_square_check(sq, gamma, v, Q)
        reports.append(rep)
        special += rep.is_special is True
        undecided += rep.is_special is None
    return DensityReport(Q, len(reports), special, undecided, reports)
