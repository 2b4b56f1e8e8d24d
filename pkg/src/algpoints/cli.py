"""Command-line entry point: ``python3 -m algpoints <command> ...``.

Every run writes ``results.csv`` and ``results.jsonl`` into ``--out``.  The
first CSV line is ``# {config json}``; feeding that config to
``argv_from_config`` reproduces the run.  Exit codes: 0 ok, 1 bad input,
2 a checked invariant failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .counting import (
    EnumSpec,
    count_rational,
    count_rect,
    count_strip,
    enumerate_polys,
    scaling_experiment,
    verify_theorem2,
    verify_theorem3,
)
from .poly import Interval, parse_poly
from .regions import DEFAULT_DELTA_N, CurveStrip, Rect, c12, empty_rectangle
from .special import check_witness, lemma7_bad_set, minkowski_witness, special_square_check

CSV_COLUMNS = ("Q", "count", "uncertain", "mu2", "bound", "seconds")
# options that only steer execution; they are left out of the config echo
RUNTIME_KEYS = ("workers", "out")


class InvariantViolation(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# argument types


def rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def rational_list(text: str) -> list[Fraction]:
    return [rational(t) for t in text.split(",") if t.strip()]


def pair(text: str) -> tuple[Fraction, Fraction]:
    vals = rational_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    return vals[0], vals[1]


def gamma_pair(text: str) -> tuple[Fraction, Fraction]:
    vals = rational_list(text)
    if len(vals) == 1:
        return vals[0], vals[0]
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected gamma or gamma1,gamma2, got {text!r}")
    return vals[0], vals[1]


def int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def interval(text: str) -> Interval:
    lo, hi = pair(text)
    if lo >= hi:
        raise argparse.ArgumentTypeError(f"interval needs lo < hi, got {text!r}")
    return Interval(lo, hi)


def polynomial(text: str):
    try:
        return parse_poly(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


# --------------------------------------------------------------------------
# commands; each returns (rows, printed lines, invariant ok)


def _row(Q, count, uncertain=0, mu2=None, bound=None, seconds=0.0, detail=None) -> dict:
    return {
        "Q": Q,
        "count": count,
        "uncertain": uncertain,
        "mu2": "" if mu2 is None else f"{float(mu2):.12g}",
        "bound": "" if bound is None else f"{float(bound):.12g}",
        "seconds": f"{seconds:.3f}",
        "detail": detail or {},
    }


def cmd_enumerate(a):
    t0 = time.perf_counter()
    spec = EnumSpec(a.n, a.Q, irreducible=not a.all, real_pairs=a.real_pairs)
    polys = [str(p) for p in enumerate_polys(spec)]
    lines = polys if a.list else []
    lines.append(f"count={len(polys)}")
    return [_row(a.Q, len(polys), seconds=time.perf_counter() - t0, detail={"polys": polys})], lines, True


def _rect_from(a) -> Rect:
    if a.box:
        x0, x1, y0, y1 = a.box
        return Rect.from_bounds((x0, x1), (y0, y1))
    if a.d is None or a.gamma is None:
        raise ValueError("give either --box or both --d and --gamma")
    return Rect.from_sides(a.d, a.gamma, a.c8, a.Q)


def cmd_count_rect(a):
    rect = _rect_from(a)
    res = count_rect(a.n, a.Q, rect, a.workers)
    line = f"count={res.count} uncertain={res.uncertain}"
    return [_row(a.Q, res.count, res.uncertain, rect.area, None, res.seconds, {"by_degree": res.as_dict()["by_degree"]})], [line], True


def cmd_count_strip(a):
    strip = CurveStrip(a.phi, a.J, a.gamma, a.c8, a.Q)
    res = count_strip(a.n, a.Q, strip, a.workers)
    line = f"count={res.count} uncertain={res.uncertain}"
    detail = {"c1": str(strip.c1), "c6": str(strip.c6), "by_degree": res.as_dict()["by_degree"]}
    return [_row(a.Q, res.count, res.uncertain, None, None, res.seconds, detail)], [line], True


def cmd_count_rational(a):
    t0 = time.perf_counter()
    c = count_rational(a.f, a.J, a.gamma, a.Q)
    return [_row(a.Q, c, seconds=time.perf_counter() - t0)], [f"count={c}"], True


def cmd_empty_rect(a):
    rect = empty_rectangle(a.p, a.q, a.n, a.Q)
    ok, res = verify_theorem2(a.p, a.q, a.n, a.Q, a.workers)
    lines = [f"rectangle={rect.bounds_text()}", f"count={res.count} uncertain={res.uncertain}"]
    if not ok:
        lines.append("emptiness check FAILED")
    row = _row(a.Q, res.count, res.uncertain, rect.area, None, res.seconds, {"rectangle": rect.bounds_text(), "empty": ok})
    return [row], lines, ok


def cmd_verify_upper(a):
    rect = _rect_from(a)
    rep = verify_theorem3(a.n, a.Q, rect, a.workers)
    lines = [f"count={rep.count} uncertain={rep.uncertain} bound={float(rep.bound):.6g} holds={rep.holds}"]
    row = _row(a.Q, rep.count, rep.uncertain, rect.area, rep.bound, rep.seconds, {"holds": rep.holds, "c12": str(c12(a.n, rect.center))})
    return [row], lines, rep.holds


def cmd_special_square(a):
    t0 = time.perf_counter()
    sq = Rect.from_sides(a.d, (a.gamma, a.gamma), a.c8, a.Q)
    rep = special_square_check(sq, a.gamma, a.v, a.Q, a.h)
    seconds = time.perf_counter() - t0
    rows, lines = [], []
    for r in rep.rows:
        rows.append(_row(a.Q, r.count, r.uncertain, sq.area, r.threshold, seconds, r.as_dict()))
        lines.append(f"l={r.l} count={r.count} threshold={float(r.threshold):.6g} satisfied={r.satisfied}")
    lines.append(f"L={rep.ladder.L} delta={float(rep.ladder.delta):.6g} special={rep.is_special}")
    return rows, lines, True


def cmd_minkowski(a):
    t0 = time.perf_counter()
    P = minkowski_witness(a.x, a.n, a.Q, a.d)
    ok = check_witness(P, a.x, a.n, a.Q, a.d)
    row = _row(a.Q, 1, seconds=time.perf_counter() - t0, detail={"witness": str(P), "coeffs": [str(c) for c in P.coeffs], "verified": ok})
    return [row], [f"witness={P}", f"verified={ok}"], ok


def cmd_badset(a):
    t0 = time.perf_counter()
    sq = Rect.from_sides(a.d, (a.gamma, a.gamma), a.c8, a.Q)
    rep = lemma7_bad_set(a.n, a.Q, a.v, a.delta_n, sq, a.samples, a.seed, a.workers)
    info = rep.as_dict()
    quarter = sq.area * Fraction(1, 4)
    row = _row(a.Q, len(rep.polys), 0, sq.area, quarter, time.perf_counter() - t0, info)
    lines = [
        f"area in [{float(rep.area_lo):.12g}, {float(rep.area_hi):.12g}]",
        f"ratio in [{rep.ratio_lo:.6g}, {rep.ratio_hi:.6g}]",
        f"count={len(rep.polys)}",
    ]
    ok = True
    if a.samples:
        lines.insert(2, f"mc={rep.mc_estimate:.6g} sigma={rep.mc_sigma:.3g}")
        ok = rep.mc_consistent()
    return [row], lines, ok


def cmd_scaling(a):
    if a.kind == "rect":
        config = {"n": a.n, "d": a.d, "gamma": a.gamma, "c8": a.c8}
    elif a.kind == "strip":
        config = {"n": a.n, "phi": a.phi, "J": a.J, "gamma": a.gamma[0], "c8": a.c8}
    else:
        config = {"f": a.f, "J": a.J, "gamma": a.gamma[0]}
    missing = [k for k, v in config.items() if v is None]
    if missing:
        raise ValueError(f"scaling --kind {a.kind} needs: {', '.join('--' + k for k in missing)}")
    rep = scaling_experiment(a.kind, config, a.grid, a.workers)
    rows = [
        _row(Q, r.count, r.uncertain, None, None, r.seconds, {"by_degree": r.as_dict()["by_degree"]})
        for Q, r in zip(rep.grid, rep.counts)
    ]
    lines = [f"Q={Q} count={r.count}" for Q, r in zip(rep.grid, rep.counts)]
    lines.append(f"slope={rep.slope:.4f} expected={rep.expected_exponent:.4f}")
    rows[-1]["detail"].update(rep.as_dict())
    return rows, lines, True


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="algpoints", description="Counting algebraic points near planar curves.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", default=".", help="directory for results.csv and results.jsonl")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    def rect_args(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--Q", type=int, required=True)
        p.add_argument("--d", type=pair, help="midpoint d1,d2")
        p.add_argument("--gamma", type=gamma_pair, help="gamma or gamma1,gamma2")
        p.add_argument("--c8", type=rational, default=Fraction(1))
        p.add_argument("--box", type=rational_list, help="x0,x1,y0,y1 instead of --d/--gamma")

    p = add("enumerate", cmd_enumerate, "list polynomials of degree <= n and height <= Q")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--all", action="store_true", help="keep reducible polynomials too")
    p.add_argument("--real-pairs", action="store_true", help="keep only polynomials with a real root, degree >= 2")
    p.add_argument("--list", action="store_true", help="print every polynomial")

    rect_args(add("count-rect", cmd_count_rect, "count algebraic points in a rectangle"))

    p = add("count-strip", cmd_count_strip, "count algebraic points near a curve")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--phi", type=polynomial, required=True)
    p.add_argument("--J", type=interval, required=True)
    p.add_argument("--gamma", type=rational, required=True)
    p.add_argument("--c8", type=rational, default=Fraction(1))

    p = add("count-rational", cmd_count_rational, "count rational points near a curve")
    p.add_argument("--f", type=polynomial, required=True)
    p.add_argument("--J", type=interval, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--gamma", type=rational, required=True)

    p = add("empty-rect", cmd_empty_rect, "build and verify the empty rectangle")
    for name in ("p", "q", "n", "Q"):
        p.add_argument(f"--{name}", type=int, required=True)

    rect_args(add("verify-upper", cmd_verify_upper, "compare a rectangle count with its upper bound"))

    p = add("special-square", cmd_special_square, "check the band conditions of one square")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--d", type=pair, required=True)
    p.add_argument("--gamma", type=rational, required=True)
    p.add_argument("--c8", type=rational, default=Fraction(1))
    p.add_argument("--v", type=pair, default=(Fraction(1, 2), Fraction(1, 2)))
    p.add_argument("--h", type=rational, default=None, help="override the default h_2 at d")

    p = add("minkowski", cmd_minkowski, "search the witness polynomial")
    p.add_argument("--x", type=pair, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--d", type=pair, required=True)

    p = add("badset", cmd_badset, "measure the bad set of a square")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--d", type=pair, required=True)
    p.add_argument("--gamma", type=rational, required=True)
    p.add_argument("--c8", type=rational, default=Fraction(1))
    p.add_argument("--v", type=pair, default=None, help="defaults to ((n-1)/2, (n-1)/2)")
    p.add_argument("--delta-n", type=rational, default=DEFAULT_DELTA_N)
    p.add_argument("--samples", type=int, default=20000)

    p = add("scaling", cmd_scaling, "fit log(count) against log(Q) over a grid")
    p.add_argument("--kind", choices=("rect", "strip", "rational"), required=True)
    p.add_argument("--grid", type=int_list, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=pair)
    p.add_argument("--gamma", type=gamma_pair, required=True)
    p.add_argument("--c8", type=rational, default=Fraction(1))
    p.add_argument("--phi", type=polynomial)
    p.add_argument("--f", type=polynomial)
    p.add_argument("--J", type=interval)
    return parser


# --------------------------------------------------------------------------
# config echo


def config_of(argv: Sequence[str]) -> dict:
    """The run's config: the command and every option as given, minus runtime knobs."""
    args = list(argv)
    cfg: dict = {"command": args[0], "options": {}}
    k = 1
    while k < len(args):
        tok = args[k]
        if not tok.startswith("--"):
            raise ValueError(f"unexpected argument {tok!r}")
        key, _, val = tok[2:].partition("=")
        if not _:
            if k + 1 < len(args) and not args[k + 1].startswith("--"):
                val = args[k + 1]
                k += 1
            else:
                val = True
        if key not in RUNTIME_KEYS:
            cfg["options"][key] = val
        k += 1
    return cfg


def argv_from_config(cfg: dict) -> list[str]:
    argv = [cfg["command"]]
    for key, val in cfg["options"].items():
        argv += [f"--{key}"] if val is True else [f"--{key}={val}"]
    return argv


def _write(out: Path, cfg: dict, rows: list[dict]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    echo = json.dumps(cfg, sort_keys=True)
    with open(out / "results.csv", "w", newline="") as fh:
        fh.write(f"# {echo}\n")
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    with open(out / "results.jsonl", "w") as fh:
        for row in rows:
            fh.write(json.dumps({"config": cfg, **row}, sort_keys=True, default=str) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1, --help exits 0
        return exc.code if isinstance(exc.code, int) else 1
    if a.command == "badset" and a.v is None:
        half = Fraction(a.n - 1, 2)
        a.v = (half, half)
    try:
        cfg = config_of(argv)
        if a.workers < 1:
            raise ValueError("--workers must be >= 1")
        rows, lines, ok = a.func(a)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InvariantViolation, RuntimeError, AssertionError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 2
    _write(Path(a.out), cfg, rows)
    for line in lines:
        print(line)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
