"""Command-line front end.

Exit status: 0 on success, 1 on usage errors (bad flags or invalid
combinations), 2 on runtime or estimation errors. Every error prints one
line ``error-code: <code>`` to standard error before the message.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from pathlib import Path

from . import harness, multivariate
from .blocking import block_maxima, threshold_excesses
from .errors import EVTError
from .extremal_index import THETA_CSV_FIELDS, estimate_theta, parse_model, simulate_timeseries
from .fitters import BM_METHODS, FIT_CSV_FIELDS, METHODS, fit_gev_ml, fit_gev_pwm, fit_gp_ml, fit_gp_pwm, hill
from .tail_targets import (
    TARGET_CSV_FIELDS,
    quantile_bm,
    quantile_pot,
    return_level_bm,
    return_level_pot,
)

_FITTERS = {"gev_ml": fit_gev_ml, "gev_pwm": fit_gev_pwm, "gp_ml": fit_gp_ml, "gp_pwm": fit_gp_pwm}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_data(p, n_required=True):
    p.add_argument("--dist", help="i.i.d. distribution spec, e.g. frechet(1)")
    p.add_argument("--model", help="time-series model, e.g. armax(0.5)")
    p.add_argument("--n", type=int, required=n_required, help="sample size")
    p.add_argument("--seed", type=int, default=0, help="simulation seed")


def _add_out(p):
    p.add_argument("--out", help="output path (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bmpot", description="Block maxima and peak-over-threshold extreme value estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit one tail model to simulated data")
    _add_data(p)
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--k", type=int, help="number of excesses (POT methods)")
    p.add_argument("--r", type=int, help="block size (BM methods)")
    p.add_argument("--scheme", choices=("disjoint", "sliding"), default="disjoint")
    _add_out(p)

    p = sub.add_parser("simulate", help="write a simulated series (or its block maxima with --r), one value per row")
    _add_data(p)
    p.add_argument("--r", type=int, help="dump block maxima of this block size instead of the series")
    p.add_argument("--scheme", choices=("disjoint", "sliding"), default="disjoint")
    _add_out(p)

    p = sub.add_parser("ksweep", help="mean and sd of gamma_hat per k")
    _add_data(p)
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--k", required=True, help="comma-separated k grid (number of blocks for BM methods)")
    p.add_argument("--reps", type=int, default=100)
    _add_out(p)

    p = sub.add_parser("horserace", help="run a JSON-configured Monte-Carlo comparison")
    p.add_argument("--config", required=True)
    p.add_argument("--dist")
    p.add_argument("--model")
    p.add_argument("--n", help="comma-separated n grid")
    p.add_argument("--k", help="comma-separated k grid")
    p.add_argument("--r", help="comma-separated r grid")
    p.add_argument("--method", help="comma-separated methods")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--theta-method", choices=("intervals", "blocks"))
    p.add_argument("--scheme", choices=("disjoint", "sliding"))
    p.add_argument("--out", required=True, help="CSV report path; the JSON summary goes next to it")

    p = sub.add_parser("theta", help="estimate the extremal index")
    _add_data(p)
    p.add_argument("--theta-method", choices=("intervals", "blocks"), default="intervals")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int)
    _add_out(p)

    p = sub.add_parser("quantile", help="estimate the quantile at level 1 - p")
    _add_data(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--method", choices=("pot", "bm", "bm_theta_corrected"), default="pot")
    p.add_argument("--k", type=int, help="excesses for POT or extremal-index threshold rank")
    p.add_argument("--r", type=int, help="block size for BM")
    p.add_argument("--theta-method", choices=("intervals", "blocks"), default="intervals")
    p.add_argument("--scheme", choices=("disjoint", "sliding"), default="disjoint")
    _add_out(p)

    p = sub.add_parser("returnlevel", help="estimate the T-block return level")
    _add_data(p)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--method", choices=("bm", "pot", "pot_theta_corrected"), default="bm")
    p.add_argument("--k", type=int, help="excesses for POT and the extremal index")
    p.add_argument("--theta-method", choices=("intervals", "blocks"), default="intervals")
    p.add_argument("--scheme", choices=("disjoint", "sliding"), default="disjoint")
    _add_out(p)

    p = sub.add_parser("stdf", help="empirical stable tail dependence function on the grid {0, 0.1, ..., 1}^d")
    p.add_argument("--model", help="independence, comonotone or logistic(alpha)")
    p.add_argument("--input", help="headerless CSV matrix instead of a simulated sample")
    p.add_argument("--d", type=int, default=2, help="dimension of simulated samples")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)
    return parser


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_rows(path, fields, rows):
    with _open_out(path) as fh:
        w = csv.DictWriter(fh, fieldnames=list(fields), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)


def _model_text(args) -> str:
    if (args.dist is None) == (args.model is None):
        raise UsageError("give exactly one of --dist and --model")
    return args.dist if args.dist is not None else args.model


def _series(args):
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    return simulate_timeseries(parse_model(_model_text(args)), args.n, args.seed)


def _cmd_fit(args):
    if args.method in BM_METHODS:
        if args.r is None:
            raise UsageError(f"{args.method} needs --r")
    elif args.k is None:
        raise UsageError(f"{args.method} needs --k")
    x = _series(args)
    if args.method == "hill":
        fit = hill(x, args.k)
    elif args.method in BM_METHODS:
        fit = _FITTERS[args.method](block_maxima(x, args.r, args.scheme))
    else:
        fit = _FITTERS[args.method](threshold_excesses(x, args.k))
    _write_rows(args.out, FIT_CSV_FIELDS, [fit.to_row()])
    if not fit.converged:
        raise EVTError(f"fit did not converge: {fit.message}")


def _cmd_simulate(args):
    x = _series(args).values
    if args.r is not None:
        x = block_maxima(x, args.r, args.scheme).maxima
    _write_rows(args.out, ["value"], [{"value": repr(float(v))} for v in x])


def _int_grid(text, flag):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{flag} must be a comma-separated list of integers") from None


def _cmd_ksweep(args):
    model = _model_text(args)
    pts = harness.ksweep(model, args.n, args.method, _int_grid(args.k, "--k"), args.reps, args.seed)
    rows = [
        {"k": p.k, "r": "" if p.r is None else p.r, "mean": repr(p.mean), "sd": repr(p.sd), "failures": p.failures}
        for p in pts
    ]
    _write_rows(args.out, harness.SWEEP_FIELDS, rows)


def _cmd_horserace(args):
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    if args.dist is not None or args.model is not None:
        cfg["model"] = _model_text(args)
    if args.n is not None:
        cfg["n_grid"] = _int_grid(args.n, "--n")
    if args.k is not None:
        cfg["k_grid"] = _int_grid(args.k, "--k")
        cfg.pop("k_rule", None)
    if args.r is not None:
        cfg["r_grid"] = _int_grid(args.r, "--r")
    if args.method is not None:
        cfg["methods"] = [m.strip() for m in args.method.split(",") if m.strip()]
    if args.reps is not None:
        cfg["replications"] = args.reps
    if args.seed is not None:
        cfg["base_seed"] = args.seed
    if args.theta_method is not None:
        cfg["theta_method"] = args.theta_method
    if args.scheme is not None:
        cfg["scheme"] = args.scheme
    try:
        config = harness.ExperimentConfig.from_dict(cfg)
    except (EVTError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid config: {exc}") from None
    report = harness.run_horserace(config)
    out = Path(args.out)
    report.write_csv(out)
    report.write_json(out.with_suffix(".json"))


def _cmd_theta(args):
    if args.theta_method == "blocks" and args.r is None:
        raise UsageError("the blocks estimator needs --r")
    est = estimate_theta(_series(args), args.theta_method, k=args.k, r=args.r)
    _write_rows(args.out, THETA_CSV_FIELDS, [est.to_row()])


def _theta_for(args, x, default_k):
    k = args.k if args.k is not None else default_k
    r = args.r if args.r is not None else max(2, args.n // k)
    return estimate_theta(x, args.theta_method, k=k, r=r)


def _cmd_quantile(args):
    if not 0 < args.p < 1:
        raise UsageError("--p must lie in (0, 1)")
    if args.method == "pot":
        if args.k is None:
            raise UsageError("the pot pipeline needs --k")
        if not args.p < args.k / args.n:
            raise UsageError(f"extrapolation guard: need p < k/n = {args.k / args.n:g}")
        est = quantile_pot(_series(args), args.k, args.p)
    else:
        if args.r is None:
            raise UsageError(f"the {args.method} pipeline needs --r")
        if not args.r * args.p < 1:
            raise UsageError("need r p < 1")
        x = _series(args)
        theta = _theta_for(args, x, max(2, args.n // args.r)) if args.method == "bm_theta_corrected" else 1.0
        est = quantile_bm(x, args.r, args.p, theta, args.scheme)
    _write_rows(args.out, TARGET_CSV_FIELDS, [est.to_row()])


def _cmd_returnlevel(args):
    if not args.T > 1:
        raise UsageError("--T must exceed 1")
    if args.method == "bm":
        est = return_level_bm(_series(args), args.r, args.T, args.scheme)
    else:
        if args.k is None:
            raise UsageError(f"the {args.method} pipeline needs --k")
        if 1.0 / args.r > args.k / args.n:
            raise UsageError("extrapolation guard: need 1/r <= k/n")
        x = _series(args)
        theta = _theta_for(args, x, args.k) if args.method == "pot_theta_corrected" else 1.0
        est = return_level_pot(x, args.k, args.r, args.T, theta)
    _write_rows(args.out, TARGET_CSV_FIELDS, [est.to_row()])


def _cmd_stdf(args):
    model = None
    if args.model is not None:
        model = multivariate.DependenceModel.parse(args.model, args.d)
    if args.input is not None:
        sample = multivariate.read_sample_csv(args.input)
    elif model is not None and args.n is not None:
        sample = multivariate.sample_dependence(model, args.n, args.seed)
    else:
        raise UsageError("give --input, or --model with --n")
    if model is not None and model.d != sample.d:
        raise UsageError(f"--d {model.d} does not match the sample dimension {sample.d}")
    if not 1 <= args.k < sample.n:
        raise UsageError(f"need 1 <= k < n = {sample.n}")
    rows = multivariate.stdf_grid_report(sample, args.k, model)
    _write_rows(args.out, list(rows[0]), rows)


_COMMANDS = {
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "ksweep": _cmd_ksweep,
    "horserace": _cmd_horserace,
    "theta": _cmd_theta,
    "quantile": _cmd_quantile,
    "returnlevel": _cmd_returnlevel,
    "stdf": _cmd_stdf,
}


def _fail(code: str, message: str, status: int) -> int:
    print(f"error-code: {code}", file=sys.stderr)
    print(f"bmpot: {message}", file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _COMMANDS[args.command](args)
    except UsageError as exc:
        status = _fail("usage", str(exc), 1)
        print(parser.format_usage().rstrip(), file=sys.stderr)
        return status
    except EVTError as exc:
        return _fail(getattr(exc, "code", "runtime"), str(exc), 2)
    except (OSError, ValueError) as exc:
        return _fail("runtime", str(exc), 2)
    return 0
