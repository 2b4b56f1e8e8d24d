"""Exact counting of algebraic points of bounded height near planar curves."""
from .algebra import (
    AlgebraicPoint,
    algebraic_points,
    content_and_primitive,
    feldman_bound_holds,
    is_irreducible,
    lemma1_gap_check,
    rational_roots,
)
from .counting import (
    CountResult,
    EnumSpec,
    count_rational,
    count_rect,
    count_strip,
    enumerate_polys,
    fit_loglog,
    scaling_experiment,
    verify_theorem2,
    verify_theorem3,
)
from .poly import Interval, Poly, RootEnclosure, isolate_real_roots, parse_poly, refine, resultant
from .powers import PowerProduct
from .regions import CurveStrip, Rect, c10, c12, empty_rectangle, h_n, ladder, rho
from .special import (
    BoxUnion,
    bad_set_of,
    lattice_count,
    lemma6_bound,
    lemma7_bad_set,
    minkowski_witness,
    special_square_check,
    sublevel_intervals,
)

__version__ = "0.1.0"
