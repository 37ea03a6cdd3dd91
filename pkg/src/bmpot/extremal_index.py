"""Stationary time series with known extremal index, two extremal index
estimators, and the map between i.i.d. and time-series GEV norming.

Models (compact strings in parentheses):

- ``armax(alpha)``: ``X_t = max(alpha X_{t-1}, (1 - alpha) Z_t)`` with unit
  Fréchet ``Z_t``; unit Fréchet margin, extremal index ``1 - alpha``.
- ``mm(w_0,...,w_{m-1})``: moving maxima ``X_t = max_j w_j Z_{t-j}`` with
  weights normalized to sum 1; unit Fréchet margin, extremal index ``max w``.
- ``ar1cauchy(phi)``: ``X_t = phi X_{t-1} + eps_t`` with standard Cauchy
  noise, ``0 <= phi < 1``; Cauchy margin with scale ``1/(1 - phi)``,
  extremal index ``1 - phi``.
- ``iid(<distribution spec>)`` or a bare distribution spec.

The ``theta_true`` values are the standard closed forms for these models.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .blocking import disjoint_block_maxima, threshold_excesses
from .distributions import GAMMA_SWITCH, DistributionSpec, as_spec, h_gamma, sample
from .errors import (
    InsufficientExceedancesError,
    InvalidArgumentError,
    InvalidParameterError,
    InvalidThresholdError,
    ThresholdTooLowError,
)
from .rng import make_rng, open_uniform
from .series import Series, as_array

KINDS = ("iid", "armax", "ar1_cauchy", "moving_maxima")
_NAMES = {"armax": "armax", "mm": "moving_maxima", "moving_maxima": "moving_maxima", "ar1cauchy": "ar1_cauchy", "ar1_cauchy": "ar1_cauchy"}
_SHORT = {"armax": "armax", "moving_maxima": "mm", "ar1_cauchy": "ar1cauchy"}


@dataclass(frozen=True)
class TimeSeriesModel:
    kind: str
    params: tuple[float, ...] = ()
    marginal: DistributionSpec | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown time series kind {self.kind!r}")
        p = tuple(float(v) for v in self.params)
        if self.kind == "iid":
            if self.marginal is None:
                raise InvalidParameterError("iid model needs a marginal distribution")
            object.__setattr__(self, "marginal", as_spec(self.marginal))
        elif self.kind == "armax":
            if len(p) != 1 or not 0 <= p[0] < 1:
                raise InvalidParameterError(f"armax needs one alpha in [0, 1), got {p}")
            object.__setattr__(self, "marginal", DistributionSpec.parse("frechet(1,1)"))
        elif self.kind == "ar1_cauchy":
            if len(p) != 1 or not 0 <= p[0] < 1:
                raise InvalidParameterError(f"ar1cauchy needs one phi in [0, 1), got {p}")
            object.__setattr__(self, "marginal", DistributionSpec.parse(f"cauchy(0,{1.0 / (1.0 - p[0])!r})"))
        else:
            w = np.asarray(p)
            if len(w) < 1 or np.any(w < 0) or not w.sum() > 0:
                raise InvalidParameterError("moving maxima needs non-negative weights with positive sum")
            p = tuple(float(v) for v in w / w.sum())
            object.__setattr__(self, "marginal", DistributionSpec.parse("frechet(1,1)"))
        object.__setattr__(self, "params", p)

    @property
    def theta_true(self) -> float:
        if self.kind == "iid":
            return 1.0
        if self.kind in ("armax", "ar1_cauchy"):
            return 1.0 - self.params[0]
        return max(self.params)

    def __str__(self) -> str:
        if self.kind == "iid":
            return str(self.marginal)
        return f"{_SHORT[self.kind]}({','.join(repr(v) for v in self.params)})"


def parse_model(text) -> TimeSeriesModel:
    """Parse ``armax(0.5)``, ``mm(...)``, ``ar1cauchy(...)``, ``iid(spec)`` or a bare spec."""
    if isinstance(text, TimeSeriesModel):
        return text
    if isinstance(text, DistributionSpec):
        return TimeSeriesModel("iid", marginal=text)
    m = re.match(r"^\s*([A-Za-z_0-9]+)\s*\((.*)\)\s*$", str(text))
    if not m:
        raise InvalidParameterError(f"cannot parse model {text!r}")
    name, body = m.group(1).lower(), m.group(2).strip()
    if name == "iid":
        return TimeSeriesModel("iid", marginal=DistributionSpec.parse(body))
    if name in _NAMES:
        try:
            params = tuple(float(v) for v in body.split(",")) if body else ()
        except ValueError:
            raise InvalidParameterError(f"non-numeric parameter in {text!r}") from None
        return TimeSeriesModel(_NAMES[name], params)
    return TimeSeriesModel("iid", marginal=DistributionSpec.parse(str(text)))


def _unit_frechet(rng, n):
    return 1.0 / -np.log(open_uniform(rng, n))


def simulate_timeseries(model, n: int, seed: int) -> Series:
    """Simulate ``n`` observations of a stationary path (deterministic per seed)."""
    model = parse_model(model)
    n = int(n)
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if model.kind == "iid":
        s = sample(model.marginal, n, seed)
        return Series(s.values, "iid", str(model), int(seed))
    rng = make_rng(seed)
    if model.kind == "armax":
        alpha = model.params[0]
        x0 = _unit_frechet(rng, 1)[0]
        values = _kernels.armax_path(x0, _unit_frechet(rng, n), alpha)
    elif model.kind == "ar1_cauchy":
        phi = model.params[0]
        x0 = math.tan(math.pi * (open_uniform(rng, 1)[0] - 0.5)) / (1.0 - phi)
        eps = np.tan(np.pi * (open_uniform(rng, n) - 0.5))
        values = _kernels.ar1_path(x0, eps, phi)
    else:
        w = np.asarray(model.params)
        m = len(w)
        z = _unit_frechet(rng, n + m - 1)
        values = np.full(n, -np.inf)
        for j in range(m):
            values = np.maximum(values, w[j] * z[m - 1 - j : m - 1 - j + n])
    return Series(values, "stationary", str(model), int(seed))


def simulate_block_maxima(model, r: int, n_blocks: int, seed: int) -> np.ndarray:
    """Maxima of ``n_blocks`` independent stationary stretches of length ``r``.

    The brute-force reference for return levels of block maxima.
    """
    model = parse_model(model)
    rng = make_rng(seed)
    if model.kind == "iid":
        u = open_uniform(rng, int(r) * int(n_blocks)).reshape(n_blocks, r)
        return np.asarray(model.marginal.upper_quantile(u)).max(axis=1)
    if model.kind == "armax":
        alpha = model.params[0]
        x = _unit_frechet(rng, n_blocks)
        best = np.full(n_blocks, -np.inf)
        for _ in range(r):
            x = np.maximum(alpha * x, (1.0 - alpha) * _unit_frechet(rng, n_blocks))
            best = np.maximum(best, x)
        return best
    if model.kind == "ar1_cauchy":
        phi = model.params[0]
        x = np.tan(np.pi * (open_uniform(rng, n_blocks) - 0.5)) / (1.0 - phi)
        best = np.full(n_blocks, -np.inf)
        for _ in range(r):
            x = phi * x + np.tan(np.pi * (open_uniform(rng, n_blocks) - 0.5))
            best = np.maximum(best, x)
        return best
    w = np.asarray(model.params)
    m = len(w)
    z = _unit_frechet(rng, n_blocks * (r + m - 1)).reshape(n_blocks, r + m - 1)
    best = np.full(n_blocks, -np.inf)
    for t in range(r):
        xt = np.max(w[None, :] * z[:, t + m - 1 - np.arange(m)], axis=1)
        best = np.maximum(best, xt)
    return best


# --------------------------------------------------------------------------
# estimators

THETA_CSV_FIELDS = ("method", "r", "k", "theta_hat", "theta_raw", "n")


@dataclass(frozen=True)
class ThetaEstimate:
    theta_hat: float
    theta_raw: float
    method: str
    n: int
    k: int | None = None
    r: int | None = None

    def to_row(self) -> dict:
        return {
            "method": self.method,
            "r": "" if self.r is None else self.r,
            "k": "" if self.k is None else self.k,
            "theta_hat": repr(self.theta_hat),
            "theta_raw": repr(self.theta_raw),
            "n": self.n,
        }


def _clip01(v: float) -> float:
    return min(1.0, max(0.0, v))


def intervals_estimate(exceedance_times) -> float:
    """Raw Ferro-Segers intervals estimate from exceedance times.

    With interexceedance times ``T_i`` and ``N`` exceedances:
    ``2 (sum T)^2 / ((N-1) sum T^2)`` when ``max T <= 2``, otherwise
    ``2 (sum (T-1))^2 / ((N-1) sum (T-1)(T-2))``.
    """
    s = np.sort(np.asarray(exceedance_times, dtype=float))
    if len(s) < 2:
        raise InsufficientExceedancesError("intervals estimator needs at least 2 exceedances")
    t = np.diff(s)
    nm1 = len(t)
    if t.max() <= 2:
        return 2.0 * t.sum() ** 2 / (nm1 * np.sum(t * t))
    return 2.0 * np.sum(t - 1.0) ** 2 / (nm1 * np.sum((t - 1.0) * (t - 2.0)))


def theta_intervals(series, k: int) -> ThetaEstimate:
    """Intervals estimator on the exceedances of ``X_{n-k:n}``, clipped to [0, 1]."""
    x = as_array(series)
    if k < 2:
        raise InsufficientExceedancesError("intervals estimator needs k >= 2")
    exc = threshold_excesses(x, k)
    raw = float(intervals_estimate(exc.exceedance_times))
    return ThetaEstimate(_clip01(raw), raw, "intervals", len(x), k=int(k))


def theta_blocks(series, r: int, k: int) -> ThetaEstimate:
    """Blocks estimator ``log(mean 1{M_j <= u}) / (r log F_n(u))`` with ``u = X_{n-k:n}``."""
    x = as_array(series)
    n = len(x)
    r = int(r)
    if r < 2:
        raise InvalidArgumentError(f"blocks estimator needs r >= 2, got {r}")
    u = threshold_excesses(x, k).threshold
    f_u = np.count_nonzero(x <= u) / n
    if f_u <= 0.0 or f_u >= 1.0:
        raise InvalidThresholdError(f"empirical cdf at the threshold is {f_u}")
    maxima = disjoint_block_maxima(x, r).maxima
    frac = float(np.mean(maxima <= u))
    if frac == 0.0:
        raise ThresholdTooLowError("every block maximum exceeds the threshold")
    raw = math.log(frac) / (r * math.log(f_u))
    return ThetaEstimate(_clip01(raw), raw, "blocks", n, k=int(k), r=r)


def estimate_theta(series, method: str, k: int | None = None, r: int | None = None) -> ThetaEstimate:
    if method == "intervals":
        return theta_intervals(series, k)
    if method == "blocks":
        return theta_blocks(series, r, k)
    raise InvalidArgumentError(f"unknown extremal index method {method!r}")


# --------------------------------------------------------------------------
# norming transform


def _check_theta(a, theta):
    if not a > 0:
        raise InvalidArgumentError(f"scale must be positive, got {a}")
    if not 0 < theta <= 1:
        raise InvalidArgumentError(f"extremal index must lie in (0, 1], got {theta}")


def _theta_power(theta, gamma):
    # same branch switch as h_gamma, so forward and inverse compose exactly
    return 1.0 if abs(gamma) < GAMMA_SWITCH else theta**gamma


def tilde_transform(a: float, b: float, gamma: float, theta: float) -> tuple[float, float]:
    """Map i.i.d. norming ``(a_r, b_r)`` to the block-maxima norming of a series with extremal index ``theta``.

    ``a~ = a theta^gamma`` and ``b~ = b - a (1 - theta^gamma)/gamma``.
    """
    _check_theta(a, theta)
    return a * _theta_power(theta, gamma), b + a * h_gamma(theta, gamma)


def inverse_tilde_transform(a_tilde: float, b_tilde: float, gamma: float, theta: float) -> tuple[float, float]:
    _check_theta(a_tilde, theta)
    return a_tilde * _theta_power(theta, -gamma), b_tilde + a_tilde * h_gamma(1.0 / theta, gamma)
