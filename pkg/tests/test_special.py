import itertools
import math
import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_lattice, ev

from algpoints.poly import Interval, Poly, evaluate
from algpoints.powers import PowerProduct
from algpoints.regions import Rect, h_n_exact
from algpoints.special import (
    BoxUnion,
    InfiniteCount,
    _count_quadratics,
    bad_set_of,
    check_witness,
    lattice_count,
    lemma6_bound,
    lemma6_bound_ordered,
    lemma7_bad_set,
    minkowski_witness,
    special_density,
    special_square_check,
    sublevel_intervals,
)

F = Fraction
X = sympy.Symbol("x")
small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=12)
small_ks = st.fractions(min_value=0, max_value=10, max_denominator=6)


# ---- lattice counts --------------------------------------------------------


def test_lattice_count_examples():
    assert lattice_count((0, 1), 1, 1) == 9
    assert lattice_count((0, 1), 0, 0) == 1
    assert lattice_count((0, 2), 1, 1) == 5
    with pytest.raises(InfiniteCount):
        lattice_count((F(1, 3), F(1, 3)), 1, 1)


def test_lattice_bound_examples():
    assert lemma6_bound(1, 1, 1) == 25
    assert lemma6_bound(1, 0, 0) == 1
    assert lemma6_bound(F(1, 2), 1, 0) == 9


def test_unordered_bound_can_undercount():
    # |d1 - d2| = 1/4 > eps = 1/8, yet b0 = 0 and b1 in [-4, 4] give 9 points
    d, eps = (0, F(1, 4)), F(1, 8)
    assert lattice_count(d, 0, 1) == brute_lattice(d, 0, 1) == 9
    assert lemma6_bound(eps, 0, 1) == 5
    assert lemma6_bound_ordered(eps, 0, 1) == 33


@settings(max_examples=150, deadline=None)
@given(small_fracs, small_fracs, small_ks, small_ks)
def test_lattice_count_matches_scan(d1, d2, K1, K2):
    if d1 == d2:
        return
    assert lattice_count((d1, d2), K1, K2) == brute_lattice((d1, d2), K1, K2)


@settings(max_examples=300, deadline=None)
@given(small_fracs, small_fracs, small_ks, small_ks, st.fractions(min_value=F(1, 100), max_value=F(99, 100)))
def test_ordered_bound_always_holds(d1, d2, K1, K2, shrink):
    if d1 == d2:
        return
    eps = abs(d1 - d2) * shrink
    assert lattice_count((d1, d2), K1, K2) <= lemma6_bound_ordered(eps, K1, K2)


@settings(max_examples=300, deadline=None)
@given(small_fracs, small_fracs, st.fractions(min_value=1, max_value=10, max_denominator=6),
       st.fractions(min_value=1, max_value=10, max_denominator=6), st.fractions(min_value=F(1, 100), max_value=F(99, 100)))
def test_printed_bound_holds_once_both_radii_reach_one(d1, d2, K1, K2, shrink):
    if d1 == d2:
        return
    eps = abs(d1 - d2) * shrink
    assert lattice_count((d1, d2), K1, K2) <= lemma6_bound(eps, K1, K2)


# ---- sublevel sets ---------------------------------------------------------


def test_sublevel_example_two_pieces():
    pieces = sublevel_intervals(Poly((-2, 0, 1)), F(1, 10))
    assert len(pieces) == 2
    mpmath.mp.dps = 30
    refs = [(-mpmath.sqrt(2.1), -mpmath.sqrt(1.9)), (mpmath.sqrt(1.9), mpmath.sqrt(2.1))]
    for piece, (a, b) in zip(pieces, refs):
        lo, hi = piece.outer()
        ilo, ihi = piece.inner()
        assert lo <= ilo and ihi <= hi
        assert float(lo) <= a <= float(ilo) + 1e-12 and float(ihi) - 1e-12 <= b <= float(hi)
        assert hi - lo < float(b - a) + 2 ** -30


def test_sublevel_example_parabola():
    (piece,) = sublevel_intervals(Poly((0, 0, 1)), 1)
    assert piece.contains(F(999, 1000)) and piece.contains(F(-999, 1000))
    assert not piece.contains(1) and not piece.contains(-1)


def test_sublevel_constant_needs_a_clip():
    (piece,) = sublevel_intervals(Poly((F(1, 2),)), 1, clip=Interval(0, 3))
    assert piece.outer() == (0, 3)
    assert sublevel_intervals(Poly((2,)), 1, clip=Interval(0, 3)) == []
    with pytest.raises(ValueError):
        sublevel_intervals(Poly((F(1, 2),)), 1)
    with pytest.raises(ValueError):
        sublevel_intervals(Poly((1, 1)), 0)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.integers(-6, 6), min_size=2, max_size=4).filter(lambda c: any(c[1:])),
    st.fractions(min_value=F(1, 20), max_value=4, max_denominator=20),
    st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=64), min_size=1, max_size=20),
)
def test_sublevel_indicator_matches_direct_evaluation(cs, t, xs):
    P = Poly(cs)
    pieces = sublevel_intervals(P, t)
    for a, b in zip(pieces, pieces[1:]):
        assert a.right is not None and b.left is not None and a.right.hi <= b.left.lo
    for x in xs:
        assert (abs(ev(cs, x)) < t) == any(p.contains(x) for p in pieces)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.integers(-6, 6), min_size=2, max_size=4).filter(lambda c: any(c[1:])),
    st.fractions(min_value=F(1, 20), max_value=4, max_denominator=20),
    st.fractions(min_value=-3, max_value=3, max_denominator=8),
    st.fractions(min_value=F(1, 8), max_value=3, max_denominator=8),
    st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=64), min_size=1, max_size=20),
)
def test_clipped_sublevel_is_intersection(cs, t, lo, w, xs):
    J = Interval(lo, lo + w)
    pieces = sublevel_intervals(Poly(cs), t, clip=J)
    for x in xs:
        inside = J.lo < x < J.hi and abs(ev(cs, x)) < t
        assert inside == any(p.contains(x) for p in pieces)


# ---- box unions ------------------------------------------------------------

int_box = st.tuples(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8), st.integers(0, 8)).map(
    lambda b: (min(b[0], b[1]), max(b[0], b[1]), min(b[2], b[3]), max(b[2], b[3]))
)


@settings(max_examples=200, deadline=None)
@given(st.lists(int_box, max_size=6))
def test_box_union_area_counts_unit_cells(boxes):
    u = BoxUnion()
    for b in boxes:
        u.add(*b)
    cells = {
        (i, j) for (x0, x1, y0, y1) in boxes for i in range(x0, x1) for j in range(y0, y1)
    }
    assert u.area() == len(cells)


def _overlap(a, b):
    return (max(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), min(a[3], b[3]))


def _area(b):
    return max(F(0), b[1] - b[0]) * max(F(0), b[3] - b[2])


rat_box = st.tuples(*[st.fractions(min_value=-2, max_value=2, max_denominator=7)] * 4).map(
    lambda b: (min(b[0], b[1]), max(b[0], b[1]), min(b[2], b[3]), max(b[2], b[3]))
)


@settings(max_examples=200, deadline=None)
@given(st.lists(rat_box, min_size=1, max_size=3))
def test_box_union_area_inclusion_exclusion(boxes):
    u = BoxUnion()
    for b in boxes:
        u.add(*b)
    total = F(0)
    for k in range(1, len(boxes) + 1):
        for combo in itertools.combinations(boxes, k):
            inter = combo[0]
            for b in combo[1:]:
                inter = _overlap(inter, b)
            total += (-1) ** (k + 1) * _area(inter)
    assert u.area() == total


# ---- bad set ---------------------------------------------------------------


def test_single_polynomial_bad_set():
    square = Rect.from_bounds((F(13, 10), F(3, 2)), (F(-3, 2), F(-13, 10)))
    rep = bad_set_of([Poly((-2, 0, 1))], square, [F(1, 10), F(1, 10)], 10 ** 6)
    mpmath.mp.dps = 40
    piece = mpmath.sqrt(mpmath.mpf("2.1")) - mpmath.sqrt(mpmath.mpf("1.9"))
    assert float(piece) == pytest.approx(0.070733, abs=1e-6)
    lo = mpmath.mpf(rep.area_lo.numerator) / rep.area_lo.denominator
    hi = mpmath.mpf(rep.area_hi.numerator) / rep.area_hi.denominator
    assert lo <= piece ** 2 <= hi
    assert rep.area_hi - rep.area_lo < F(1, 10 ** 9) * F(1, 25)


def test_bad_set_is_empty_without_polynomials():
    square = Rect.from_sides((0, F(1, 2)), (F(1, 2), F(1, 2)), 1, 10)
    rep = lemma7_bad_set(2, 0, (F(1, 2), F(1, 2)), F(1, 1000), square)
    assert rep.area_lo == rep.area_hi == 0


def test_bad_set_rejects_bad_parameters():
    square = Rect.from_sides((0, F(1, 2)), (F(1, 2), F(1, 2)), 1, 10)
    with pytest.raises(ValueError):
        lemma7_bad_set(2, 10, (F(1, 2), F(1, 3)), F(1, 1000), square)
    with pytest.raises(ValueError):
        lemma7_bad_set(4, 10, (1, 2), F(1, 1000), square)
    with pytest.raises(ValueError):
        lemma7_bad_set(2, 10, (F(1, 2), F(1, 2)), F(1, 1000), Rect.from_sides((1, 1), (F(1, 2), F(1, 2)), 1, 10))


def _in_bad_set(x, Q, ts, dbound):
    """Exact membership by scanning every nonzero P of degree <= 2 and height <= Q."""
    for cs in itertools.product(range(-Q, Q + 1), repeat=3):
        if not any(cs):
            continue
        vals = [ev(cs, xi) for xi in x]
        if all(t.compare(abs(v)) < 0 for t, v in zip(ts, vals)):
            ders = [cs[1] + 2 * cs[2] * xi for xi in x]
            if any(abs(dv) < dbound for dv in ders):
                return True
    return False


def test_bad_set_boxes_agree_with_exact_membership():
    Q, v, delta = 5, (F(1, 2), F(1, 2)), F(1, 1000)
    square = Rect.from_sides((F(1, 3), F(-1, 4)), (F(1, 2), F(1, 2)), 1, Q)
    rep = lemma7_bad_set(2, Q, v, delta, square, mc_samples=0)
    h = h_n_exact(2, square.center)
    ts = [h * PowerProduct.power(Q, -vi) for vi in v]
    rng = random.Random(3)
    (a1, b1), (a2, b2) = square.inner_box()
    seen_in = seen_out = 0
    for _ in range(300):
        x = (a1 + (b1 - a1) * F(rng.randint(1, 9999), 10000), a2 + (b2 - a2) * F(rng.randint(1, 9999), 10000))
        member = _in_bad_set(x, Q, ts, delta * Q)
        if rep.inner.contains(*x):
            assert member
            seen_in += 1
        elif not rep.outer.contains(*x):
            assert not member
            seen_out += 1
    assert seen_in > 0 and seen_out > 0


def test_bad_set_monte_carlo_and_workers():
    square = Rect.from_sides((F(1, 5), F(-1, 3)), (F(1, 2), F(1, 2)), 1, 10)
    a = lemma7_bad_set(2, 10, (F(1, 2), F(1, 2)), F(1, 1000), square, mc_samples=20000, seed=0, workers=1)
    b = lemma7_bad_set(2, 10, (F(1, 2), F(1, 2)), F(1, 1000), square, mc_samples=20000, seed=0, workers=2)
    assert (a.area_lo, a.area_hi, a.mc_estimate) == (b.area_lo, b.area_hi, b.mc_estimate)
    assert a.mc_consistent(3)
    assert a.area_hi - a.area_lo < F(1, 10 ** 9) * a.square_area.upper()


# ---- special squares -------------------------------------------------------


def test_special_square_example():
    sq = Rect.from_sides((0, 1), (F(3, 4), F(3, 4)), 1, 10)
    rep = special_square_check(sq, F(3, 4), (F(1, 2), F(1, 2)), 10)
    assert rep.ladder.L == 6
    assert [r.l for r in rep.rows] == list(range(1, 9))
    assert rep.is_special in (True, False)
    assert all(r.satisfied is not None for r in rep.rows)


def test_far_square_is_special():
    sq = Rect.from_sides((5, -5), (F(3, 4), F(3, 4)), F(1, 100), 10)
    rep = special_square_check(sq, F(3, 4), (F(1, 2), F(1, 2)), 10)
    assert all(r.count == 0 and r.uncertain == 0 for r in rep.rows)
    assert rep.is_special is True


def test_special_square_rejects_bad_v():
    sq = Rect.from_sides((0, 1), (F(3, 4), F(3, 4)), 1, 10)
    with pytest.raises(ValueError):
        special_square_check(sq, F(3, 4), (F(1, 2), F(1, 3)), 10)
    with pytest.raises(ValueError):
        special_square_check(sq, F(2, 5), (F(1, 2), F(1, 2)), 10)


def _reaches(cs, lo, hi, t):
    """Is |P(x)| < t somewhere on [lo, hi]?  Decided from exact sympy roots of P -/+ t."""
    expr = sum(sympy.Rational(c) * X ** j for j, c in enumerate(cs))
    tt = sympy.Rational(t.numerator, t.denominator)
    lo_s, hi_s = sympy.Rational(lo.numerator, lo.denominator), sympy.Rational(hi.numerator, hi.denominator)
    cuts = {lo_s, hi_s}
    for g in (expr - tt, expr + tt):
        if sympy.degree(g, X) > 0:
            cuts |= {r for r in sympy.Poly(g, X).real_roots() if lo_s < r < hi_s}
    pts = sorted(cuts, key=lambda r: sympy.N(r, 50))
    probes = [lo_s, hi_s] + [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    return any(abs(expr.subs(X, p)) < tt for p in probes)


def test_quadratic_band_counts_match_exact_oracle():
    Q = 4
    inner = ((F(-3, 10), F(1, 5)), (F(7, 10), F(6, 5)))
    outer = ((F(-3, 10) - F(1, 10 ** 6), F(1, 5) + F(1, 10 ** 6)), (F(7, 10) - F(1, 10 ** 6), F(6, 5) + F(1, 10 ** 6)))
    t_lo = (F(1, 3), F(1, 2))
    t_hi = (F(1, 3) + F(1, 10 ** 6), F(1, 2) + F(1, 10 ** 6))
    for a2 in (1, -2, 3):
        count, unsure = _count_quadratics(a2, Q, inner, outer, t_lo, t_hi)
        sure = maybe = 0
        for a1, a0 in itertools.product(range(-Q, Q + 1), repeat=2):
            cs = (a0, a1, a2)
            yes = [_reaches(cs, *inner[i], t_lo[i]) for i in (0, 1)]
            could = [_reaches(cs, *outer[i], t_hi[i]) for i in (0, 1)]
            if all(yes):
                sure += 1
            elif all(could):
                maybe += 1
        assert count >= sure and count + unsure <= sure + maybe
        assert count + unsure >= sure


def test_special_density_at_small_heights():
    rep = special_density(Poly((F(-1, 2), 0, F(1, 4))), Interval(0, 1), F(3, 4), 50, c8=2)
    assert rep.tiles > 0
    assert 0 <= rep.fraction <= 1
    assert rep.special + rep.undecided <= rep.tiles


# ---- Minkowski witness -----------------------------------------------------


def _witness_oracle(x, n, Q, d):
    """Least (height, degree, coeffs) over every polynomial meeting the constraints."""
    d1, d2 = abs(F(d[0])), abs(F(d[1]))
    M = max(F(1), 3 * d1, 3 * d2)
    h_sq = F(3, 2) * (d1 + d2) * M ** (n * n)
    bound_sq = h_sq / F(Q) ** (n - 1)
    best = None
    for cs in itertools.product(range(-Q, Q + 1), repeat=n + 1):
        if not any(cs) or any(abs(a) * M ** (n + 1) > Q for a in cs[2:]):
            continue
        if all(ev(cs, F(xi)) ** 2 <= bound_sq for xi in x):
            P = Poly(cs)
            if P.lc < 0:
                P = -P
            key = (max(abs(c) for c in P.coeffs), P.degree, P.coeffs)
            best = key if best is None or key < best else best
    return best


def test_minkowski_example():
    P = minkowski_witness((0, 1), 2, 10, (0, 1))
    assert check_witness(P, (0, 1), 2, 10, (0, 1))
    assert P == Poly((1,))
    with pytest.raises(ValueError):
        minkowski_witness((0, 1), 2, 0, (0, 1))


def test_minkowski_rational_point_hits_zero():
    P = minkowski_witness((F(1, 2), F(1, 3)), 2, 50, (F(1, 2), F(1, 3)))
    assert check_witness(P, (F(1, 2), F(1, 3)), 2, 50, (F(1, 2), F(1, 3)))


@settings(max_examples=40, deadline=None)
@given(
    st.fractions(min_value=-1, max_value=1, max_denominator=50),
    st.fractions(min_value=-1, max_value=1, max_denominator=50),
    st.integers(1, 6),
    st.integers(1, 2),
)
def test_minkowski_matches_exhaustive_search(x1, x2, Q, n):
    if x1 == x2:
        return
    d = (F(round(x1 * 4), 4), F(round(x2 * 4), 4))
    P = minkowski_witness((x1, x2), n, Q, d)
    assert check_witness(P, (x1, x2), n, Q, d)
    key = (max(abs(c) for c in P.coeffs), P.degree, P.coeffs)
    assert key == _witness_oracle((x1, x2), n, Q, d)
    assert math.isfinite(float(evaluate(P, x1)))
