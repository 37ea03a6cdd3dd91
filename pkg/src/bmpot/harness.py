"""Deterministic Monte-Carlo horse races, k-sweeps and rate fits.

Replication ``i`` draws its data from seed ``base_seed ^ splitmix64(i)``
(see :mod:`bmpot.rng`) and every method runs on that same data. Per-record
moments are reduced in replication-index order, so reports do not depend
on the number of workers or on the order in which replications finish.

Tuning: POT methods take ``k`` from the k-grid. BM methods take ``r`` from
the r-grid when one is given (recording ``k = n // r`` blocks), otherwise
``r = n // k``. Return-level targets fix ``r`` for the BM pipeline.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .blocking import block_maxima, threshold_excesses
from .distributions import truth
from .errors import ConfigError, EVTError, InvalidArgumentError
from .extremal_index import TimeSeriesModel, estimate_theta, parse_model, simulate_timeseries
from .fitters import BM_METHODS, METHODS, fit_gev_ml, fit_gev_pwm, fit_gp_ml, fit_gp_pwm, hill
from .rng import replication_seed
from .tail_targets import (
    quantile_bm,
    quantile_pot,
    return_level_bm,
    return_level_pot,
    true_quantile,
    true_return_level,
)

TARGET_PIPELINES = {
    "quantile": ("pot", "bm", "bm_theta_corrected"),
    "return_level": ("bm", "pot", "pot_theta_corrected"),
}
ALL_PIPELINES = ("pot", "bm", "bm_theta_corrected", "pot_theta_corrected")
REPORT_FIELDS = ("method", "n", "k", "r", "replications", "failures", "truth", "mean", "bias", "variance", "rmse")
_FITTERS = {"gev_ml": fit_gev_ml, "gev_pwm": fit_gev_pwm, "gp_ml": fit_gp_ml, "gp_pwm": fit_gp_pwm}


def _int_list(name, values) -> tuple[int, ...]:
    if values is None:
        return ()
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"{name} must be a non-empty list")
    out = []
    for v in values:
        if isinstance(v, bool) or not float(v).is_integer():
            raise ConfigError(f"{name} entries must be integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    """A horse-race experiment; see :meth:`from_dict` for the JSON layout."""

    model: str
    n_grid: tuple[int, ...]
    methods: tuple[str, ...]
    replications: int
    base_seed: int
    k_grid: tuple[int, ...] = ()
    k_rule: tuple[float, float] | None = None
    r_grid: tuple[int, ...] = ()
    targets: tuple[dict, ...] = ()
    theta_method: str = "intervals"
    theta_k: int | None = None
    theta_r: int | None = None
    scheme: str = "disjoint"
    workers: int = 1

    def __post_init__(self):
        try:
            parse_model(self.model)
        except EVTError as exc:
            raise ConfigError(f"invalid model: {exc}") from None
        if not self.n_grid:
            raise ConfigError("n_grid must be non-empty")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.methods:
            raise ConfigError("methods must be non-empty")
        for m in self.methods:
            if m not in METHODS and m not in ALL_PIPELINES:
                raise ConfigError(f"unknown method {m!r}")
        if not self.k_grid and self.k_rule is None and not self.r_grid:
            raise ConfigError("need k_grid, k_rule or r_grid")
        if self.k_grid and self.k_rule is not None:
            raise ConfigError("give k_grid or k_rule, not both")
        if self.scheme not in ("disjoint", "sliding"):
            raise ConfigError(f"scheme must be disjoint or sliding, got {self.scheme!r}")
        if self.theta_method not in ("intervals", "blocks"):
            raise ConfigError(f"unknown theta_method {self.theta_method!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for t in self.targets:
            if t.get("kind") == "quantile":
                if not 0 < float(t.get("p", 0)) < 1:
                    raise ConfigError("quantile target needs 0 < p < 1")
            elif t.get("kind") == "return_level":
                if not float(t.get("T", 0)) > 1 or int(t.get("r", 0)) < 1:
                    raise ConfigError("return level target needs T > 1 and r >= 1")
            else:
                raise ConfigError(f"unknown target {t!r}")
        if any(m in ALL_PIPELINES for m in self.methods) and not self.targets:
            raise ConfigError("target pipelines need a non-empty targets list")
        # k derived from r_grid only matters when some method thresholds the data
        uses_k = any(m not in BM_METHODS and m not in ("bm", "bm_theta_corrected") for m in self.methods)
        for n in self.n_grid:
            if n < 2:
                raise ConfigError("every n must be >= 2")
            for k in self.pot_ks(n) if uses_k else ():
                if not 1 <= k < n:
                    raise ConfigError(f"(n, k) = ({n}, {k}) violates 1 <= k < n")
            for r in self.bm_rs(n):
                if not 1 <= r <= n:
                    raise ConfigError(f"(n, r) = ({n}, {r}) violates 1 <= r <= n")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        """Build from the JSON layout.

        Keys: ``model``, ``n_grid``, ``k_grid`` or ``k_rule`` ({"c", "a"} for
        ``k = round(c n^a)``), optional ``r_grid``, ``methods``,
        ``replications``, ``base_seed``, optional ``targets`` (objects with
        ``kind`` "quantile" and ``p``, or "return_level" with ``T`` and ``r``),
        ``theta_method``, ``theta_k``, ``theta_r``, ``scheme``, ``workers``.
        """
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        for key in ("model", "n_grid", "methods", "replications", "base_seed"):
            if key not in d:
                raise ConfigError(f"missing config key {key!r}")
        rule = d.get("k_rule")
        if rule is not None:
            if not isinstance(rule, dict) or set(rule) != {"c", "a"}:
                raise ConfigError("k_rule must be an object with keys c and a")
            rule = (float(rule["c"]), float(rule["a"]))
        return cls(
            model=str(d["model"]),
            n_grid=_int_list("n_grid", d["n_grid"]),
            methods=tuple(str(m) for m in d["methods"]),
            replications=int(d["replications"]),
            base_seed=int(d["base_seed"]),
            k_grid=_int_list("k_grid", d.get("k_grid")),
            k_rule=rule,
            r_grid=_int_list("r_grid", d.get("r_grid")),
            targets=tuple(dict(t) for t in d.get("targets") or ()),
            theta_method=str(d.get("theta_method", "intervals")),
            theta_k=None if d.get("theta_k") is None else int(d["theta_k"]),
            theta_r=None if d.get("theta_r") is None else int(d["theta_r"]),
            scheme=str(d.get("scheme", "disjoint")),
            workers=int(d.get("workers", 1)),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["k_rule"] = None if self.k_rule is None else {"c": self.k_rule[0], "a": self.k_rule[1]}
        for key in ("n_grid", "methods", "targets"):
            d[key] = list(d[key])
        for key in ("k_grid", "r_grid"):
            d[key] = list(d[key]) or None
        return d

    def pot_ks(self, n: int) -> tuple[int, ...]:
        if self.k_grid:
            return self.k_grid
        if self.k_rule is not None:
            c, a = self.k_rule
            return (max(1, int(round(c * n**a))),)
        return tuple(n // r for r in self.r_grid)

    def bm_rs(self, n: int) -> tuple[int, ...]:
        if self.r_grid:
            return self.r_grid
        return tuple(max(1, n // k) for k in self.pot_ks(n))


@dataclass(frozen=True)
class Record:
    method: str
    n: int
    k: int
    r: int | None
    replications: int
    failures: int
    truth: float | None
    mean: float
    bias: float | None
    variance: float

    @property
    def rmse(self) -> float | None:
        return None if self.bias is None else math.sqrt(self.bias**2 + self.variance)

    def to_row(self) -> dict:
        def f(v):
            return "" if v is None else repr(float(v))

        return {
            "method": self.method,
            "n": self.n,
            "k": self.k,
            "r": "" if self.r is None else self.r,
            "replications": self.replications,
            "failures": self.failures,
            "truth": f(self.truth),
            "mean": f(self.mean),
            "bias": f(self.bias),
            "variance": f(self.variance),
            "rmse": f(self.rmse),
        }


@dataclass(frozen=True)
class RateFit:
    method: str
    slope: float
    stderr: float
    r_squared: float
    intercept: float
    points: tuple[tuple[int, int, float], ...] = ()


@dataclass
class HorseRaceReport:
    config: ExperimentConfig
    records: list[Record]
    estimates: dict = field(default_factory=dict, repr=False)
    wall_time: float = 0.0

    def record(self, method: str, n: int, k: int) -> Record:
        for rec in self.records:
            if rec.method == method and rec.n == n and rec.k == k:
                return rec
        raise KeyError((method, n, k))

    def methods(self) -> list[str]:
        return list(dict.fromkeys(r.method for r in self.records))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=REPORT_FIELDS)
            w.writeheader()
            for rec in self.records:
                w.writerow(rec.to_row())

    def summary(self) -> dict:
        fits = {}
        for m in self.methods():
            try:
                rf = rate_fit(self, m)
            except EVTError:
                continue
            fits[m] = {"slope": rf.slope, "stderr": rf.stderr, "r_squared": rf.r_squared, "intercept": rf.intercept}
        failures = {}
        for rec in self.records:
            failures[rec.method] = failures.get(rec.method, 0) + rec.failures
        return {
            "config": self.config.to_dict(),
            "rate_fits": fits,
            "failures": failures,
            "wall_time_s": self.wall_time,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")


# --------------------------------------------------------------------------
# one replication


def _target_label(t: dict) -> str:
    if t["kind"] == "quantile":
        return f"quantile(p={float(t['p'])!r})"
    return f"return_level(T={float(t['T'])!r},r={int(t['r'])})"


def _cells(cfg: ExperimentConfig) -> list[tuple[str, int, int, int | None, dict | None]]:
    """Every (method label, n, k, r, target) cell, in report order."""
    cells = []
    for n in cfg.n_grid:
        for m in cfg.methods:
            if m in METHODS:
                if m in BM_METHODS:
                    cells += [(m, n, n // r, r, None) for r in cfg.bm_rs(n)]
                else:
                    cells += [(m, n, k, None if m == "hill" else n // k, None) for k in cfg.pot_ks(n)]
                continue
            for t in cfg.targets:
                if m not in TARGET_PIPELINES[t["kind"]]:
                    continue
                label = f"{m}:{_target_label(t)}"
                if t["kind"] == "return_level" and m == "bm":
                    r = int(t["r"])
                    cells.append((label, n, n // r, r, t))
                elif m.startswith("bm"):
                    cells += [(label, n, n // r, r, t) for r in cfg.bm_rs(n)]
                else:
                    r = int(t["r"]) if t["kind"] == "return_level" else None
                    cells += [(label, n, k, r, t) for k in cfg.pot_ks(n)]
    return cells


def _theta(cfg, x, k, r):
    tk = cfg.theta_k if cfg.theta_k is not None else k
    tr = cfg.theta_r if cfg.theta_r is not None else (r if r is not None else max(2, len(x) // k))
    return estimate_theta(x, cfg.theta_method, k=tk, r=tr)


def _estimate(cfg: ExperimentConfig, cell, x) -> float:
    label, n, k, r, target = cell
    method = label.split(":", 1)[0]
    if target is None:
        if method == "hill":
            fit = hill(x, k)
        elif method in BM_METHODS:
            fit = _FITTERS[method](block_maxima(x, r, cfg.scheme))
        else:
            fit = _FITTERS[method](threshold_excesses(x, k))
        if not fit.converged:
            raise EVTError(fit.message or "fit failed")
        return fit.gamma_hat
    corrected = method.endswith("theta_corrected")
    if target["kind"] == "quantile":
        p = float(target["p"])
        if method == "pot":
            return quantile_pot(x, k, p).value
        theta = _theta(cfg, x, k, r) if corrected else 1.0
        return quantile_bm(x, r, p, theta, cfg.scheme).value
    T = float(target["T"])
    if method == "bm":
        return return_level_bm(x, r, T, cfg.scheme).value
    theta = _theta(cfg, x, k, r) if corrected else 1.0
    return return_level_pot(x, k, r, T, theta).value


def _simulate(model, n, seed):
    return simulate_timeseries(model, n, seed).values


def _run_replications(cfg_dict: dict, indices: list[int]) -> dict[int, np.ndarray]:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    model = parse_model(cfg.model)
    cells = _cells(cfg)
    out = {}
    for i in indices:
        seed = replication_seed(cfg.base_seed, i)
        row = np.full(len(cells), np.nan)
        data = {}
        for j, cell in enumerate(cells):
            n = cell[1]
            if n not in data:
                data[n] = _simulate(model, n, seed)
            try:
                row[j] = _estimate(cfg, cell, data[n])
            except EVTError:
                pass
        out[i] = row
    return out


def _truth_for(cfg: ExperimentConfig, model: TimeSeriesModel, target) -> float | None:
    try:
        if target is None:
            return float(truth(model.marginal).gamma)
        if target["kind"] == "quantile":
            return true_quantile(model, float(target["p"]))
        return true_return_level(model, int(target["r"]), float(target["T"]), seed=cfg.base_seed)
    except EVTError:
        return None


def run_horserace(config, replication_order=None) -> HorseRaceReport:
    """Run every method on common random numbers and reduce per cell.

    ``replication_order`` permutes the order in which replications are
    computed; the report is unaffected, which the test suite checks.
    """
    cfg = config if isinstance(config, ExperimentConfig) else ExperimentConfig.from_dict(config)
    start = time.perf_counter()
    model = parse_model(cfg.model)
    cells = _cells(cfg)
    order = list(range(cfg.replications)) if replication_order is None else [int(i) for i in replication_order]
    if sorted(order) != list(range(cfg.replications)):
        raise InvalidArgumentError("replication_order must be a permutation of range(replications)")
    cfg_dict = cfg.to_dict()
    results: dict[int, np.ndarray] = {}
    if cfg.workers == 1:
        results = _run_replications(cfg_dict, order)
    else:
        chunks = [order[j :: cfg.workers] for j in range(cfg.workers)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for part in pool.map(_run_replications, [cfg_dict] * len(chunks), chunks):
                results.update(part)
    est = np.vstack([results[i] for i in range(cfg.replications)])
    truths: dict[str, float | None] = {}
    records = []
    for j, (label, n, k, r, target) in enumerate(cells):
        key = label if target is None else _target_label(target)
        if key not in truths:
            truths[key] = _truth_for(cfg, model, target)
        tv = truths[key]
        col = est[:, j]
        ok = col[np.isfinite(col)]
        fails = cfg.replications - len(ok)
        mean = float(np.mean(ok)) if len(ok) else math.nan
        var = float(np.var(ok)) if len(ok) else math.nan
        bias = None if tv is None else mean - tv
        records.append(Record(label, n, k, r, cfg.replications, fails, tv, mean, bias, var))
    estimates = {(c[0], c[1], c[2]): est[:, j] for j, c in enumerate(cells)}
    return HorseRaceReport(cfg, records, estimates, time.perf_counter() - start)


# --------------------------------------------------------------------------
# k-sweeps and rate fits


@dataclass(frozen=True)
class SweepPoint:
    k: int
    r: int | None
    mean: float
    sd: float
    failures: int


SWEEP_FIELDS = ("k", "r", "mean", "sd", "failures")


def ksweep(model, n: int, method: str, k_grid, replications: int, base_seed: int, workers: int = 1) -> list[SweepPoint]:
    """Mean and standard deviation of ``gamma_hat`` per ``k``, ordered by ``k``.

    For BM methods ``k`` is the number of blocks (``r = n // k``).
    """
    if method not in METHODS:
        raise ConfigError(f"ksweep supports the fitters {METHODS}, got {method!r}")
    ks = sorted(_int_list("k_grid", list(k_grid)))
    d = {
        "model": str(model),
        "n_grid": [int(n)],
        "methods": [method],
        "replications": int(replications),
        "base_seed": int(base_seed),
        "workers": int(workers),
    }
    if method in BM_METHODS:
        d["r_grid"] = [max(1, int(n) // k) for k in ks]
    else:
        d["k_grid"] = ks
    rep = run_horserace(ExperimentConfig.from_dict(d))
    out = [SweepPoint(rec.k, rec.r, rec.mean, math.sqrt(rec.variance), rec.failures) for rec in rep.records]
    return sorted(out, key=lambda p: p.k)


def rate_fit(report: HorseRaceReport, method: str) -> RateFit:
    """Least-squares slope of log RMSE on log n, using the best-RMSE ``k`` per ``n``."""
    best: dict[int, Record] = {}
    for rec in report.records:
        if rec.method != method or rec.rmse is None or not math.isfinite(rec.rmse):
            continue
        if rec.n not in best or rec.rmse < best[rec.n].rmse:
            best[rec.n] = rec
    if len(best) < 3:
        raise InvalidArgumentError(f"rate fit needs >= 3 distinct n with finite RMSE for {method!r}")
    ns = sorted(best)
    rmse = [best[n].rmse for n in ns]
    if min(rmse) <= 0:
        raise InvalidArgumentError("rate fit needs positive RMSE values")
    res = stats.linregress(np.log(ns), np.log(rmse))
    pts = tuple((n, best[n].k, best[n].rmse) for n in ns)
    return RateFit(method, float(res.slope), float(res.stderr), float(res.rvalue**2), float(res.intercept), pts)
