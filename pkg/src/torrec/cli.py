"""Batch command-line front end.

Every run writes one JSON or CSV artifact carrying the full run
configuration and the library version; ``--config FILE`` re-runs the
configuration embedded in an earlier artifact and reproduces it byte for
byte.

Exit codes: 0 success, 1 usage error, 2 hypothesis rejection, 3 budget or
cap exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from fractions import Fraction
from typing import Callable

from . import __version__
from . import dimension as dim
from . import equidist as eq
from . import estimators as est
from . import geometry as geo
from . import periodic as per
from . import spectral
from .errors import (
    BudgetExceeded,
    CapExceeded,
    DomainError,
    HyperbolicityError,
    HypothesisError,
    InsufficientSamples,
    OddPowerWithNegativeEigenvalue,
    OracleTooLarge,
    RationalInput,
    RegimeError,
    SingularError,
    UnsupportedMatrix,
)
from .io import dump_csv, dump_json, fraction_str, read_config
from .surd import QuadraticSurd

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_BUDGET = 0, 1, 2, 3

HYPOTHESIS_ERRORS = (
    HyperbolicityError,
    HypothesisError,
    UnsupportedMatrix,
    DomainError,
    RegimeError,
    OddPowerWithNegativeEigenvalue,
    RationalInput,
    SingularError,
)
BUDGET_ERRORS = (BudgetExceeded, CapExceeded, OracleTooLarge, InsufficientSamples)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _point(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    for p in parts:
        Fraction(p)
    return parts


def _window(text: str) -> list[int]:
    lo, hi = text.split(":")
    return [int(lo), int(hi)]


# ---------------------------------------------------------------------------
# command handlers: config dict -> (result, csv header, csv rows)
# ---------------------------------------------------------------------------


def _matrix(cfg) -> spectral.IntMatrix:
    return spectral.parse_matrix(cfg["matrix"])


def cmd_validate(cfg):
    A = _matrix(cfg)
    if A.dim == 3:
        bs = spectral.validate_block3(A)
        res = {
            "accepted": True,
            "matrix": A.tolist(),
            "m": bs.m,
            "lambda": {"exact": str(bs.lam), "float": float(bs.lam)},
            "log_lambda": bs.log_lambda,
            "m_exceeds_lambda": bs.m_exceeds_lambda(),
        }
    else:
        res = {"accepted": True, **spectral.spectral_summary(A)}
    rows = [(k, v if not isinstance(v, dict) else v.get("float")) for k, v in res.items() if k != "matrix"]
    return res, ("field", "value"), rows


def cmd_periodic(cfg):
    A = _matrix(cfg)
    n = cfg["n"]
    pts = per.brute_force_periodic(A, n) if cfg["brute"] else per.enumerate_periodic(A, n, cap=cfg["cap"])
    q = pts.q
    listing = [{"numerators": [int(v) for v in row], "denominator": q} for row in pts.numerators]
    res = {
        "n": n,
        "count": pts.count,
        "H_n": spectral.count_H_n(A, n),
        "denominators": list(pts.denominators),
        "points": listing,
    }
    d = A.dim
    header = tuple(f"x{i + 1}" for i in range(d))
    rows = [tuple(fraction_str(Fraction(int(v), q)) for v in row) for row in pts.numerators]
    return res, header, rows


def cmd_geometry(cfg):
    A = _matrix(cfg)
    tau, n = cfg["tau"], cfg["n"]
    center = [Fraction(c) for c in cfg["center"]]
    comp = geo.component_geometry(A, tau, n, center)
    sep = geo.separation_profile(A, tau, n)
    res = {
        "n": n,
        "tau": tau,
        "min_disjoint_n": geo.min_disjoint_n(tau),
        "center": [fraction_str(c) for c in comp.center],
        "semi_axis_major": comp.semi_axis_major,
        "semi_axis_minor": comp.semi_axis_minor,
        "axis_stable": comp.axis_stable,
        "axis_unstable": comp.axis_unstable,
        "c1": comp.c1,
        "inscribed": comp.inscribed,
        "circumscribed": comp.circumscribed,
        "area_ratio": geo.area_ratio(A),
        "ellipses_disjoint": geo.ellipses_disjoint(tau, n),
        "circumscribed_disjoint": geo.components_disjoint(A, tau, n),
        "separation": {
            "regime": sep.regime,
            "gap_unstable": sep.gap_unstable,
            "gap_stable": sep.gap_stable,
            "c2": sep.c2,
            "c3": sep.c3,
        },
    }
    rows = [("inscribed", i, *v) for i, v in enumerate(comp.inscribed)]
    rows += [("circumscribed", i, *v) for i, v in enumerate(comp.circumscribed)]
    return res, ("polygon", "vertex", "x", "y"), rows


def _dim_rows(dv: dim.DimensionValue):
    return [(k, v, k == dv.branch) for k, v in dv.candidates]


def cmd_dim(cfg):
    A = _matrix(cfg)
    sd = spectral.validate_hyperbolic(A)
    dv = dim.dim_2d(sd.log_abs_lambda2, cfg["tau"])
    res = {"log_abs_lambda2": sd.log_abs_lambda2, "tau": cfg["tau"], **dv.as_dict()}
    return res, ("candidate", "value", "attained"), _dim_rows(dv)


def cmd_dim3d(cfg):
    A = _matrix(cfg)
    bs = spectral.validate_block3(A)
    dv = dim.dim_3d_example(bs.m, bs.log_lambda, cfg["tau"])
    ells = [0.0, bs.log_lambda, bs.log_m] if bs.m_exceeds_lambda() else [0.0, bs.log_m, bs.log_lambda]
    gub = dim.generic_upper_bound(ells, cfg["tau"])
    res = {"m": bs.m, "log_lambda": bs.log_lambda, "tau": cfg["tau"], **dv.as_dict(), "generic_upper_bound": gub.as_dict()}
    return res, ("candidate", "value", "attained"), _dim_rows(dv)


def cmd_upper_bound(cfg):
    if cfg["ells"] is not None:
        ells = sorted(cfg["ells"])
    else:
        A = _matrix(cfg)
        if A.dim == 2:
            sd = spectral.validate_hyperbolic(A)
            eigs = [float(sd.lambda1), float(sd.lambda2)]
        else:
            bs = spectral.validate_block3(A)
            eigs = [float(bs.block.lambda1), float(bs.lam), float(bs.m)]
        ells = dim.remark_exponents(eigs, cfg["convention"])
    dv = dim.generic_upper_bound(ells, cfg["tau"])
    res = {"ells": ells, "tau": cfg["tau"], "convention": cfg["convention"], **dv.as_dict()}
    return res, ("candidate", "value", "attained"), _dim_rows(dv)


def cmd_cover(cfg):
    A = _matrix(cfg)
    tau = cfg["tau"]
    strategies = [cfg["strategy"]] if cfg["strategy"] else list(dim.strategies_for(A))
    rows, fits = [], []
    for st in strategies:
        for n in range(cfg["n_min"], cfg["n_max"] + 1):
            r = dim.covering_counts(A, tau, n, st)
            rows.append(r)
        if cfg["n_max"] > cfg["n_min"]:
            f = dim.covering_exponent(A, tau, st, cfg["n_min"], cfg["n_max"])
            fits.append({"strategy": st, "exponent": f.exponent, "predicted": dim.predicted_covering_exponent(A, tau, st)})
    res = {"tau": tau, "rows": rows, "fits": fits}
    s = cfg["s"][0] if cfg["s"] else None
    header = ("n", "strategy", "radius", "count") + (("term",) if s is not None else ())
    out = []
    for r in rows:
        row = (r.n, r.strategy, r.radius, r.count)
        out.append(row + ((r.term(s),) if s is not None else ()))
    return res, header, out


def cmd_sum(cfg):
    A = _matrix(cfg)
    tau = cfg["tau"]
    if A.dim == 2:
        s0 = dim.dim_2d(spectral.validate_hyperbolic(A).log_abs_lambda2, tau).value
    else:
        bs = spectral.validate_block3(A)
        s0 = dim.dim_3d_example(bs.m, bs.log_lambda, tau).value
    svals = cfg["s"] or [s0 - 0.1, s0 + 0.1]
    sums = [dim.hausdorff_partial_sum(A, tau, s, cfg["N"], cfg["M"], window=cfg["window"]) for s in svals]
    res = {
        "tau": tau,
        "s0": s0,
        "sums": [
            {
                "s": p.s,
                "classification": p.classification,
                "tail_ratio": p.tail_ratio,
                "log_partial_sum": p.log_partial_sum,
                "n": list(p.n_values),
                "log_terms": list(p.log_terms),
                "strategies": list(p.strategies),
            }
            for p in sums
        ],
    }
    rows = [(p.s, n, st, lt) for p in sums for n, st, lt in zip(p.n_values, p.strategies, p.log_terms)]
    return res, ("s", "n", "strategy", "log_term"), rows


def cmd_boxcount(cfg):
    A = _matrix(cfg)
    tau = cfg["tau"]
    if cfg["union"]:
        u = est.union_box_count(A, tau, cfg["N"], cfg["M"], cfg["jmin"], cfg["jmax"])
        res = {"mode": "union", **{k: getattr(u, k) for k in ("n_range", "js", "counts", "slope", "r_squared", "uncertain")}}
        rows = [(j, 2.0**-j, c) for j, c in zip(u.js, u.counts)]
        return res, ("j", "scale", "count"), rows
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = est.box_count(
            A, tau, cfg["N"], cfg["M"], cfg["jmin"], cfg["jmax"],
            budget=cfg["budget"], threads=cfg.get("_threads"),
            fit_levels=tuple(cfg["window"]) if cfg["window"] else None,
        )
    res = {
        "mode": "matched",
        "n_range": rep.n_range,
        "j_window": rep.j_window,
        "fit_levels": cfg["window"],
        "fitted_slope": rep.fitted_slope,
        "best_axis": rep.best_axis,
        "r_squared": rep.r_squared,
        "fits": rep.fits,
        "rows": rep.rows,
        "dropped": rep.dropped,
        "warnings": [str(w.message) for w in caught],
    }
    if A.dim == 2:
        res["s0"] = dim.dim_2d(spectral.validate_hyperbolic(A).log_abs_lambda2, tau).value
    rows = [(r.n, r.axis, r.j, 2.0**-r.j, r.count, r.probes, r.uncertain) for r in rep.rows]
    return res, ("n", "axis", "j", "scale", "count", "probes", "uncertain"), rows


def cmd_measure(cfg):
    A = _matrix(cfg)
    rep = est.measure_scan(
        A, cfg["tau"], cfg["n"], cfg["centers"], cfg["radii"], cfg["samples"], cfg["seed"],
        threads=cfg.get("_threads"),
    )
    res = {
        "n": rep.n,
        "fitted_local_exponent": rep.fitted_local_exponent,
        "r_squared": rep.r_squared,
        "predicted_exponent": rep.predicted_exponent,
        "radii": rep.radii,
        "mean_mu": rep.mean_mu,
        "dropped_radii": rep.dropped_radii,
        "balls": [
            {"center": b.center, "radius": b.radius, "mu": b.estimate, "stderr": b.stderr, "ratio": b.ratio}
            for b in rep.balls
        ],
    }
    rows = [(*b.center, b.radius, b.estimate, b.stderr, b.ratio) for b in rep.balls]
    header = tuple(f"c{i + 1}" for i in range(A.dim)) + ("r", "mu", "stderr", "ratio")
    return res, header, rows


def _alpha(cfg) -> QuadraticSurd:
    if cfg["alpha"] is not None:
        p, q, D = (Fraction(v) for v in cfg["alpha"].split(","))
        return QuadraticSurd(p, q, int(D))
    return spectral.validate_hyperbolic(_matrix(cfg)).gamma


def cmd_equidist(cfg):
    alpha = _alpha(cfg)
    prof = eq.continued_fraction(alpha, depth=cfg["depth"], Q=cfg["Q"])
    cr = eq.counting_function(alpha, cfg["a"], cfg["b"], cfg["N"])
    res = {
        "alpha": {"exact": str(alpha), "float": float(alpha)},
        "preperiod": prof.preperiod,
        "period": prof.period,
        "quotients": prof.expansion[: cfg["depth"]],
        "convergents": [list(c) for c in prof.convergents if c[1] <= cfg["Q"]],
        "cstar": prof.cstar,
        "liminf_estimate": prof.liminf,
        "Q": cfg["Q"],
        "counting": {"a": cr.a, "b": cr.b, "N": cr.N, "count": cr.count, "ratio": cr.ratio},
        "star_discrepancy": eq.star_discrepancy(alpha, cfg["N"]),
    }
    rows = [(k, p, q) for k, (p, q) in enumerate(prof.convergents) if q <= cfg["Q"]]
    return res, ("k", "p", "q"), rows


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

COMMANDS: dict[str, Callable] = {
    "validate": cmd_validate,
    "periodic": cmd_periodic,
    "geometry": cmd_geometry,
    "dim": cmd_dim,
    "dim3d": cmd_dim3d,
    "upper-bound": cmd_upper_bound,
    "cover": cmd_cover,
    "sum": cmd_sum,
    "boxcount": cmd_boxcount,
    "measure": cmd_measure,
    "equidist": cmd_equidist,
}

_NOT_CONFIG = {"output", "threads", "config"}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="torrec", description="Recurrence sets of hyperbolic toral endomorphisms.")
    p.add_argument("--version", action="version", version=f"torrec {__version__}")
    p.add_argument("--config", help="re-run the configuration embedded in an earlier artifact")
    p.add_argument("--output", "-o", help="output path (default: standard output)")
    p.add_argument("--threads", type=int, help="worker threads; falls back to $TORREC_THREADS")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, tau=True, matrix=True):
        if matrix:
            sp.add_argument("--matrix", required=True, help='matrix literal "a,b;c,d" or JSON')
        if tau:
            sp.add_argument("--tau", type=float, required=True)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", "-o", default=argparse.SUPPRESS, help="output path (default: standard output)")
        sp.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads; falls back to $TORREC_THREADS")

    sp = sub.add_parser("validate", help="check the hypotheses and print spectral data")
    common(sp, tau=False)

    sp = sub.add_parser("periodic", help="list the points of period dividing n")
    common(sp, tau=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--cap", type=int, default=per.DEFAULT_CAP)
    sp.add_argument("--brute", action="store_true", help="use the grid-scan oracle")

    sp = sub.add_parser("geometry", help="component ellipse, parallelograms and separation data")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--center", type=_point, default=["0", "0"], help='periodic point "p/q,p/q"')

    sp = sub.add_parser("dim", help="closed-form dimension for a 2x2 matrix")
    common(sp)

    sp = sub.add_parser("dim3d", help="closed-form dimension for diag(m, B)")
    common(sp)

    sp = sub.add_parser("upper-bound", help="generic min-over-indices upper bound")
    common(sp, matrix=False)
    sp.add_argument("--matrix", help="derive the exponents from this matrix")
    sp.add_argument("--ells", type=_float_list, help="explicit exponents, comma separated")
    sp.add_argument("--convention", choices=("clamped", "raw"), default="clamped")

    sp = sub.add_parser("cover", help="covering counts per level")
    common(sp)
    sp.add_argument("--n-min", dest="n_min", type=int, default=10)
    sp.add_argument("--n-max", dest="n_max", type=int, default=30)
    sp.add_argument("--strategy")
    sp.add_argument("--s", type=_float_list, help="exponent(s) for the term column")

    sp = sub.add_parser("sum", help="partial Hausdorff sums and their classification")
    common(sp)
    sp.add_argument("--s", type=_float_list, help="exponents (default: s0 - 0.1, s0 + 0.1)")
    sp.add_argument("--N", type=int, default=10)
    sp.add_argument("--M", type=int, default=40)
    sp.add_argument("--window", type=int, default=10, help="term ratios used by the classifier")

    sp = sub.add_parser("boxcount", help="box-counting estimate")
    common(sp)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--jmin", type=int, default=1)
    sp.add_argument("--jmax", type=int, default=48)
    sp.add_argument("--window", type=_window, help="levels used in the fit, as lo:hi")
    sp.add_argument("--budget", type=float, default=est.DEFAULT_PROBE_BUDGET)
    sp.add_argument("--union", action="store_true", help="classical full-grid count of the union")

    sp = sub.add_parser("measure", help="Monte-Carlo scan of mu_n on balls")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10**5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--centers", type=int, default=20)
    sp.add_argument("--radii", type=_float_list)

    sp = sub.add_parser("equidist", help="continued fraction, counting and discrepancy of n*alpha")
    common(sp, tau=False, matrix=False)
    sp.add_argument("--matrix", help="use the unstable slope gamma of this matrix")
    sp.add_argument("--alpha", help='surd "p,q,D" meaning p + q*sqrt(D)')
    sp.add_argument("--N", type=int, default=10**4)
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--b", type=float, default=0.5)
    sp.add_argument("--Q", type=int, default=10**6)
    sp.add_argument("--depth", type=int, default=64)
    return p


def config_from_args(ns: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(ns).items()) if k not in _NOT_CONFIG}


def execute(cfg: dict, threads: int | None = None) -> str:
    """Run a configuration and return the serialized artifact."""
    cmd = cfg["command"]
    if cmd == "upper-bound" and cfg.get("ells") is None and cfg.get("matrix") is None:
        raise UsageError("torrec upper-bound: error: --ells or --matrix is required")
    if cmd == "equidist" and cfg.get("alpha") is None and cfg.get("matrix") is None:
        raise UsageError("torrec equidist: error: --alpha or --matrix is required")
    run_cfg = dict(cfg, _threads=est.resolve_threads(threads))
    result, header, rows = COMMANDS[cmd](run_cfg)
    if cfg["format"] == "csv":
        return dump_csv(header, rows, cfg, __version__)
    return dump_json(result, cfg, __version__)


def run(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.config:
            with open(ns.config, encoding="utf-8") as fh:
                cfg = read_config(fh.read())
            if cfg.get("command") not in COMMANDS:
                raise UsageError(f"torrec: error: config names an unknown command {cfg.get('command')!r}")
        elif ns.command is None:
            parser.print_usage(sys.stderr)
            raise UsageError("torrec: error: a subcommand is required")
        else:
            cfg = config_from_args(ns)
        text = execute(cfg, ns.threads)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except HYPOTHESIS_ERRORS as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except BUDGET_ERRORS as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError, OSError) as exc:
        print(f"torrec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if ns.output:
        with open(ns.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
