"""High quantiles, tail probabilities and return levels.

Each estimator composes a fitter with a plug-in formula; the frozen-fit
formulas are exposed separately (``pot_quantile``, ``bm_quantile``,
``gev_return_level``, ``pot_return_level``) so they can be evaluated on
fixed parameter values.

Return levels are the ``1 - 1/T`` quantile of the fitted block-maximum
law, ``b~ + a~ ((-log(1 - 1/T))^(-gamma) - 1)/gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blocking import block_maxima, threshold_excesses
from .distributions import h_gamma
from .errors import EVTError, ExtrapolationError, InvalidArgumentError
from .extremal_index import (
    ThetaEstimate,
    inverse_tilde_transform,
    parse_model,
    simulate_block_maxima,
    tilde_transform,
)
from .fitters import TailFit, fit_gev_ml, fit_gev_pwm, fit_gp_ml, fit_gp_pwm
from .series import as_array

PIPELINES = ("pot", "bm", "bm_theta_corrected", "pot_theta_corrected")
TARGET_CSV_FIELDS = ("kind", "params", "pipeline", "value", "gamma_hat", "theta_hat")


class FitFailedError(EVTError):
    code = "fit-failed"

    def __init__(self, fit: TailFit):
        super().__init__(f"{fit.method} fit did not converge: {fit.message}")
        self.fit = fit


@dataclass(frozen=True)
class TargetEstimate:
    kind: str
    params: dict
    value: float
    pipeline: str
    fit: TailFit
    theta: ThetaEstimate | None = None
    extra: dict = field(default_factory=dict)

    def to_row(self) -> dict:
        return {
            "kind": self.kind,
            "params": ";".join(f"{k}={v}" for k, v in self.params.items()),
            "pipeline": self.pipeline,
            "value": repr(float(self.value)),
            "gamma_hat": repr(float(self.fit.gamma_hat)),
            "theta_hat": "" if self.theta is None else repr(float(self.theta.theta_hat)),
        }


def _theta_value(theta) -> float:
    v = theta.theta_hat if isinstance(theta, ThetaEstimate) else float(theta)
    if not 0 < v <= 1:
        raise InvalidArgumentError(f"extremal index must lie in (0, 1], got {v}")
    return v


def _require(fit: TailFit) -> TailFit:
    if not fit.converged:
        raise FitFailedError(fit)
    return fit


# --------------------------------------------------------------------------
# frozen-fit formulas


def pot_quantile(threshold: float, scale: float, gamma: float, p: float, k: int, n: int) -> float:
    """``t + sigma ((p n/k)^(-gamma) - 1)/gamma``: the GP tail extrapolation above ``t``."""
    return threshold + scale * h_gamma(k / (n * p), gamma)


def pot_tail_prob(threshold: float, scale: float, gamma: float, x: float, k: int, n: int) -> float:
    """``(k/n) (1 + gamma (x - t)/sigma)^(-1/gamma)`` for ``x >= t``."""
    z = (x - threshold) / scale
    if abs(gamma) < 1e-8:
        return k / n * math.exp(-z)
    base = 1.0 + gamma * z
    if base <= 0:
        return 0.0
    return k / n * math.exp(-math.log(base) / gamma)


def bm_quantile(loc: float, scale: float, gamma: float, r: int, p: float) -> float:
    """``b_r + a_r ((r p)^(-gamma) - 1)/gamma``."""
    return loc + scale * h_gamma(1.0 / (r * p), gamma)


def gev_return_level(loc: float, scale: float, gamma: float, T: float) -> float:
    """The ``1 - 1/T`` quantile of GEV(gamma, loc, scale)."""
    if not T > 1:
        raise InvalidArgumentError(f"return period must exceed 1, got {T}")
    return loc + scale * h_gamma(1.0 / -math.log1p(-1.0 / T), gamma)


def pot_norming(threshold: float, scale: float, gamma: float, k: int, n: int, r: int) -> tuple[float, float]:
    """i.i.d. block norming ``(a_r, b_r)`` implied by a GP fit.

    ``b_r`` is the plug-in estimate of ``U(r)`` (the quantile at ``p = 1/r``)
    and ``a_r = sigma (k r / n)^gamma``.
    """
    b_r = pot_quantile(threshold, scale, gamma, 1.0 / r, k, n)
    a_r = scale * (k * r / n) ** gamma
    return a_r, b_r


def pot_return_level(threshold, scale, gamma, k, n, r, T, theta=1.0) -> float:
    a_r, b_r = pot_norming(threshold, scale, gamma, k, n, r)
    a_t, b_t = tilde_transform(a_r, b_r, gamma, _theta_value(theta))
    return gev_return_level(b_t, a_t, gamma, T)


# --------------------------------------------------------------------------
# estimators on data


def _fit_pot(x, k, method):
    exc = threshold_excesses(x, k)
    fit = fit_gp_ml(exc) if method == "ml" else fit_gp_pwm(exc)
    return _require(fit)


def _fit_bm(x, r, scheme, method):
    bm = block_maxima(x, r, scheme)
    fit = fit_gev_ml(bm) if method == "ml" else fit_gev_pwm(bm)
    return _require(fit)


def quantile_pot(series, k: int, p: float, method: str = "ml") -> TargetEstimate:
    """POT estimate of ``F^{-1}(1 - p)`` from the top ``k`` observations; needs ``p < k/n``."""
    x = as_array(series)
    n = len(x)
    if not 0 < p < k / n:
        raise ExtrapolationError(f"need 0 < p < k/n = {k / n:g}, got p={p:g}")
    fit = _fit_pot(x, k, method)
    value = pot_quantile(fit.threshold, fit.scale_hat, fit.gamma_hat, p, k, n)
    return TargetEstimate("quantile", {"p": p, "k": k}, value, "pot", fit)


def tail_prob_pot(series, k: int, x_level: float, method: str = "ml") -> TargetEstimate:
    """POT estimate of ``P(X > x_level)`` for a level above ``X_{n-k:n}``."""
    x = as_array(series)
    n = len(x)
    fit = _fit_pot(x, k, method)
    if x_level < fit.threshold:
        raise ExtrapolationError("tail probability level lies below the threshold")
    value = pot_tail_prob(fit.threshold, fit.scale_hat, fit.gamma_hat, x_level, k, n)
    return TargetEstimate("tail_prob", {"x": x_level, "k": k}, value, "pot", fit)


def quantile_bm(series, r: int, p: float, theta=1.0, scheme: str = "disjoint", method: str = "ml") -> TargetEstimate:
    """BM estimate of ``F^{-1}(1 - p)``.

    The GEV fit of the block maxima estimates the time-series norming
    ``(a~_r, b~_r)``; it is mapped back to the i.i.d. norming with the
    extremal index before the quantile plug-in. ``theta=1`` gives the
    naive estimator.
    """
    x = as_array(series)
    if not (p > 0 and r * p < 1):
        raise InvalidArgumentError(f"need p > 0 and r p < 1, got r={r}, p={p:g}")
    th = _theta_value(theta)
    fit = _fit_bm(x, r, scheme, method)
    a_r, b_r = inverse_tilde_transform(fit.scale_hat, fit.loc_hat, fit.gamma_hat, th)
    value = bm_quantile(b_r, a_r, fit.gamma_hat, r, p)
    pipeline = "bm_theta_corrected" if isinstance(theta, ThetaEstimate) or th != 1.0 else "bm"
    return TargetEstimate(
        "quantile",
        {"p": p, "r": r},
        value,
        pipeline,
        fit,
        theta if isinstance(theta, ThetaEstimate) else None,
        {"scheme": scheme},
    )


def return_level_bm(series, r: int, T: float, scheme: str = "disjoint", method: str = "ml") -> TargetEstimate:
    if not T > 1:
        raise InvalidArgumentError(f"return period must exceed 1, got {T}")
    x = as_array(series)
    fit = _fit_bm(x, r, scheme, method)
    value = gev_return_level(fit.loc_hat, fit.scale_hat, fit.gamma_hat, T)
    return TargetEstimate("return_level", {"T": T, "r": r}, value, "bm", fit, None, {"scheme": scheme})


def return_level_pot(series, k: int, r: int, T: float, theta, method: str = "ml") -> TargetEstimate:
    """POT estimate of the ``T``-block return level for blocks of length ``r``.

    The GP fit gives i.i.d. norming ``(a_r, b_r)``, which the extremal
    index maps to the block-maxima norming. Needs ``1/r <= k/n``.
    """
    if not T > 1:
        raise InvalidArgumentError(f"return period must exceed 1, got {T}")
    x = as_array(series)
    n = len(x)
    if 1.0 / r > k / n:
        raise ExtrapolationError(f"need 1/r <= k/n, got r={r}, k/n={k / n:g}")
    th = _theta_value(theta)
    fit = _fit_pot(x, k, method)
    value = pot_return_level(fit.threshold, fit.scale_hat, fit.gamma_hat, k, n, r, T, th)
    pipeline = "pot_theta_corrected" if isinstance(theta, ThetaEstimate) or th != 1.0 else "pot"
    return TargetEstimate(
        "return_level",
        {"T": T, "r": r, "k": k},
        value,
        pipeline,
        fit,
        theta if isinstance(theta, ThetaEstimate) else None,
    )


# --------------------------------------------------------------------------
# reference values


def true_quantile(model, p: float) -> float:
    """``F^{-1}(1 - p)`` of the stationary margin."""
    return float(parse_model(model).marginal.upper_quantile(p))


def true_return_level(model, r: int, T: float, n_blocks: int = 100_000, seed: int = 0) -> float:
    """``T``-block return level for blocks of length ``r``.

    Closed forms: i.i.d. ``F^{-1}((1 - 1/T)^(1/r))``; ARMAX and moving
    maxima have block-maximum law ``exp(-s/x)`` with ``s`` the summed
    per-innovation weights. Otherwise the empirical ``1 - 1/T`` quantile of
    ``n_blocks`` simulated block maxima.
    """
    model = parse_model(model)
    r = int(r)
    if not T > 1 or r < 1:
        raise InvalidArgumentError("need T > 1 and r >= 1")
    if model.kind == "iid":
        return float(model.marginal.upper_quantile(-np.expm1(np.log1p(-1.0 / T) / r)))
    if model.kind == "armax":
        s = 1.0 + (1.0 - model.params[0]) * (r - 1)
        return s / -math.log1p(-1.0 / T)
    if model.kind == "moving_maxima":
        w = np.asarray(model.params)
        m = len(w)
        # innovation Z_s (s = 1-m+1..r) reaches X_t with weight w[t-s] for t in 1..r
        s = sum(w[max(0, 1 - s_): min(m, r - s_ + 1)].max() for s_ in range(2 - m, r + 1))
        return float(s) / -math.log1p(-1.0 / T)
    return float(np.quantile(simulate_block_maxima(model, r, n_blocks, seed), 1.0 - 1.0 / T))
