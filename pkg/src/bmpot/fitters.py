"""Estimators of the extreme value index and the attached scale/location.

Block-maxima side: GEV maximum likelihood and GEV probability weighted
moments. Threshold side: GP maximum likelihood, GP probability weighted
moments and the Hill estimator.

Every fitter returns a :class:`TailFit`. Optimizer trouble is reported
through ``converged=False`` rather than raised; only invalid input raises.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .blocking import BlockMaximaSample, ExcessSample
from .distributions import GAMMA_SWITCH, _log1p_ratio, h_gamma
from .errors import DegenerateMomentsError, DegenerateSampleError, InvalidArgumentError, PositivityError
from .series import as_array

METHODS = ("gev_ml", "gev_pwm", "gp_ml", "gp_pwm", "hill")
BM_METHODS = ("gev_ml", "gev_pwm")
POT_METHODS = ("gp_ml", "gp_pwm", "hill")

PWM_GAMMA_BOX = (-5.0, 1.0)
ML_GAMMA_BOX = (-0.99, 5.0)
EULER_GAMMA = 0.5772156649015329

FIT_CSV_FIELDS = ("method", "tuning", "gamma_hat", "loc_hat", "scale_hat", "converged", "n_used")


@dataclass(frozen=True)
class TailFit:
    """A fitted tail model.

    ``loc_hat`` is ``None`` for threshold fits (the location is the
    threshold, kept in ``threshold`` when known). ``tuning`` is the block
    size ``r`` for BM fits and the number of excesses ``k`` otherwise.
    """

    method: str
    gamma_hat: float
    scale_hat: float
    loc_hat: float | None = None
    tuning: int | None = None
    converged: bool = True
    n_used: int = 0
    log_likelihood: float | None = None
    threshold: float | None = None
    message: str = ""

    def to_row(self) -> dict:
        return {
            "method": self.method,
            "tuning": "" if self.tuning is None else self.tuning,
            "gamma_hat": repr(float(self.gamma_hat)),
            "loc_hat": "" if self.loc_hat is None else repr(float(self.loc_hat)),
            "scale_hat": repr(float(self.scale_hat)),
            "converged": "true" if self.converged else "false",
            "n_used": self.n_used,
        }


def _failed(method, tuning, n_used, message, threshold=None) -> TailFit:
    return TailFit(
        method,
        math.nan,
        math.nan,
        None if method.startswith("gp") or method == "hill" else math.nan,
        tuning,
        False,
        n_used,
        None,
        threshold,
        message,
    )


SLIDING_NOTE = "sliding block maxima fitted as if independent"


def _bm_input(sample):
    if isinstance(sample, BlockMaximaSample):
        return np.asarray(sample.maxima, dtype=float), sample.block_size
    return as_array(sample), None


def _with_scheme_note(fit: TailFit, sample) -> TailFit:
    if isinstance(sample, BlockMaximaSample) and sample.scheme == "sliding":
        msg = SLIDING_NOTE if not fit.message else f"{fit.message}; {SLIDING_NOTE}"
        return dataclasses.replace(fit, message=msg)
    return fit


def _pot_input(sample):
    if isinstance(sample, ExcessSample):
        return np.asarray(sample.excesses, dtype=float), sample.k, sample.threshold
    y = as_array(sample)
    return y, len(y), None


# --------------------------------------------------------------------------
# probability weighted moments


def sample_pwm(x, s_max: int = 2) -> np.ndarray:
    """Unbiased sample PWMs ``b_s``, estimating ``E[X F(X)^s]``, for s = 0..s_max.

    ``b_s = (1/m) sum_j x_(j) prod_{l=1..s} (j-l)/(m-l)`` on the ascending
    order statistics.
    """
    x = np.sort(np.asarray(x, dtype=float))
    m = len(x)
    if m <= s_max:
        raise DegenerateSampleError(f"need more than {s_max} observations for PWMs")
    j = np.arange(1, m + 1, dtype=float)
    w = np.ones(m)
    out = np.empty(s_max + 1)
    for s in range(s_max + 1):
        if s > 0:
            w = w * (j - s) / (m - s)
        out[s] = np.dot(w, x) / m
    return out


def _gev_pwm_coef(s: int, g: float) -> float:
    """``(Gamma(1-g) (s+1)^g - 1) / g``; equals ``euler + log(s+1)`` at g = 0."""
    if abs(g) < GAMMA_SWITCH:
        return EULER_GAMMA + math.log(s + 1)
    return math.expm1(special.gammaln(1.0 - g) + g * math.log(s + 1)) / g


def gev_pwm(s: int, gamma: float, loc: float, scale: float) -> float:
    """Theoretical ``E[X G(X)^s]`` of a GEV law with ``gamma < 1``."""
    if gamma >= 1:
        return math.inf
    return (loc + scale * _gev_pwm_coef(s, gamma)) / (s + 1)


def gev_pwm_ratio(gamma: float) -> float:
    """``(3^g - 1) / (2^g - 1)``, the ratio ``(3b2 - b0) / (2b1 - b0)`` of a GEV law."""
    return h_gamma(3.0, gamma) / h_gamma(2.0, gamma)


def _bisect_increasing(f, target, lo, hi, tol=1e-12):
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _distinct_at_least(x, m: int) -> bool:
    return len(np.unique(x)) >= m


def fit_gev_pwm(maxima) -> TailFit:
    return _with_scheme_note(_fit_gev_pwm(maxima), maxima)


def _fit_gev_pwm(maxima) -> TailFit:
    """GEV fit by probability weighted moments.

    Solves ``(3b2 - b0)/(2b1 - b0) = (3^g - 1)/(2^g - 1)`` for the shape by
    bisection on (-5, 1), then backs out scale and location from b0, b1.
    """
    x, tuning = _bm_input(maxima)
    m = len(x)
    if not _distinct_at_least(x, 3):
        raise DegenerateSampleError("GEV-PWM needs at least 3 distinct values")
    b0, b1, b2 = sample_pwm(x, 2)
    d1 = 2.0 * b1 - b0
    d2 = 3.0 * b2 - b0
    if d1 == 0:
        raise DegenerateMomentsError("2 b1 - b0 vanishes")
    ratio = d2 / d1
    lo, hi = PWM_GAMMA_BOX
    if not (gev_pwm_ratio(lo) < ratio < 2.0):
        return _failed("gev_pwm", tuning, m, f"PWM ratio {ratio:.6g} outside the range of gamma in (-5, 1)")
    g = _bisect_increasing(gev_pwm_ratio, ratio, lo, hi)
    scale = d1 / (math.exp(special.gammaln(1.0 - g)) * h_gamma(2.0, g))
    loc = b0 - scale * _gev_pwm_coef(0, g)
    if not scale > 0:
        return _failed("gev_pwm", tuning, m, "non-positive scale")
    return TailFit("gev_pwm", float(g), float(scale), float(loc), tuning, True, m)


def fit_gp_pwm(excesses) -> TailFit:
    """GP fit by probability weighted moments.

    With ``a0`` the mean excess and ``a1`` the unbiased estimate of
    ``E[Y (1 - F(Y))]``: ``gamma = 2 - a0/(a0 - 2 a1)`` and
    ``sigma = 2 a0 a1 / (a0 - 2 a1)``.
    """
    y, k, threshold = _pot_input(excesses)
    if not _distinct_at_least(y[y > 0], 2):
        raise DegenerateSampleError("GP-PWM needs at least 2 distinct positive excesses")
    y = np.sort(y)
    n = len(y)
    j = np.arange(1, n + 1, dtype=float)
    a0 = y.mean()
    a1 = np.dot((n - j) / (n - 1), y) / n
    d = a0 - 2.0 * a1
    if d == 0:
        raise DegenerateMomentsError("a0 - 2 a1 vanishes")
    g = 2.0 - a0 / d
    sigma = 2.0 * a0 * a1 / d
    if not (sigma > 0 and g < 1):
        return _failed("gp_pwm", k, n, "moment solution outside the admissible range", threshold)
    return TailFit("gp_pwm", float(g), float(sigma), None, k, True, n, threshold=threshold)


# --------------------------------------------------------------------------
# likelihoods
#
# Both likelihoods are written through u = log1p(g z) / g, which tends to z
# as g -> 0, so values and gradients are smooth across the Gumbel /
# exponential case without branching.

_PSI_TERMS = np.array([(-1.0) ** m * (m + 1) / (m + 2) for m in range(14)])


def _psi(y):
    """``(y/(1+y) - log1p(y)) / y^2``, i.e. ``d/dg [log1p(g z)/g] / z^2``."""
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 0.05
    ys = np.where(small, y, 0.0)
    series = -np.polynomial.polynomial.polyval(ys, _PSI_TERMS)
    yb = np.where(small, 1.0, y)
    direct = (yb / (1.0 + yb) - np.log1p(yb)) / (yb * yb)
    return np.where(small, series, direct)


def gev_nll(theta, x, grad: bool = True):
    """Mean negative GEV log-likelihood in ``(gamma, loc, log scale)``.

    Returns ``inf`` (and a NaN gradient) outside the support.
    """
    g, b, phi = theta
    a = math.exp(phi)
    z = (x - b) / a
    y = g * z
    if not np.all(y > -1.0) or not math.isfinite(a):
        return (math.inf, np.full(3, np.nan)) if grad else math.inf
    u = z * _log1p_ratio(y)
    w = np.exp(-u)
    val = phi + np.mean((1.0 + g) * u + w)
    if not grad:
        return val
    dl_du = (1.0 + g) - w
    t = 1.0 + y
    dg = np.mean(u + dl_du * z * z * _psi(y))
    db = np.mean(dl_du / t) * (-1.0 / a)
    dphi = 1.0 - np.mean(dl_du * z / t)
    return val, np.array([dg, db, dphi])


def gp_nll(theta, y, grad: bool = True):
    """Mean negative GP log-likelihood in ``(gamma, log scale)``."""
    g, phi = theta
    s = math.exp(phi)
    z = y / s
    q = g * z
    if not np.all(q > -1.0) or not math.isfinite(s):
        return (math.inf, np.full(2, np.nan)) if grad else math.inf
    v = z * _log1p_ratio(q)
    val = phi + (1.0 + g) * np.mean(v)
    if not grad:
        return val
    dg = np.mean(v + (1.0 + g) * z * z * _psi(q))
    dphi = 1.0 - (1.0 + g) * np.mean(z / (1.0 + q))
    return val, np.array([dg, dphi])


def _newton_polish(fun, theta, steps: int = 6):
    """A few Newton steps with a finite-difference Hessian of the gradient."""
    f0, g0 = fun(theta)
    p = len(theta)
    for _ in range(steps):
        if not np.all(np.isfinite(g0)) or np.linalg.norm(g0) < 1e-13:
            break
        H = np.empty((p, p))
        for i in range(p):
            h = 1e-5 * max(1.0, abs(theta[i]))
            e = np.zeros(p)
            e[i] = h
            fp, gp = fun(theta + e)
            fm, gm = fun(theta - e)
            if not (np.all(np.isfinite(gp)) and np.all(np.isfinite(gm))):
                return theta, f0, g0
            H[i] = (gp - gm) / (2 * h)
        H = 0.5 * (H + H.T)
        try:
            np.linalg.cholesky(H)
            step = np.linalg.solve(H, g0)
        except np.linalg.LinAlgError:
            break
        cand = theta - step
        f1, g1 = fun(cand)
        if not (math.isfinite(f1) and f1 <= f0 + 1e-12 * abs(f0) and np.linalg.norm(g1) < np.linalg.norm(g0)):
            break
        theta, f0, g0 = cand, f1, g1
    return theta, f0, g0


def _maximize(fun, theta0):
    """Minimize a mean negative log-likelihood; returns (theta, f, grad)."""
    theta0 = np.asarray(theta0, dtype=float)
    best = None
    for method in ("BFGS", "Nelder-Mead"):
        start = theta0 if best is None else best[0]
        if method == "BFGS":
            res = optimize.minimize(fun, start, jac=True, method="BFGS", options={"gtol": 1e-8, "maxiter": 500})
        else:
            res = optimize.minimize(
                lambda t: fun(t)[0],
                start,
                method="Nelder-Mead",
                options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 500 * len(start), "maxfev": 1000 * len(start)},
            )
        theta, f, g = _newton_polish(fun, np.asarray(res.x, dtype=float))
        if best is None or (math.isfinite(f) and f < best[1]):
            best = (theta, f, g)
        if math.isfinite(best[1]) and np.linalg.norm(best[2]) < 1e-9:
            break
    return best


def _ml_converged(g, grad) -> bool:
    lo, hi = ML_GAMMA_BOX
    return bool(lo < g < hi and np.all(np.isfinite(grad)) and np.linalg.norm(grad) < 1e-7)


def _gumbel_quantile_init(x):
    # quantile matching: Q(p) = b - a log(-log p) at p = 1/4, 1/2, 3/4
    q25, q50, q75 = np.quantile(x, [0.25, 0.5, 0.75])
    spread = math.log(-math.log(0.25)) - math.log(-math.log(0.75))
    a = (q75 - q25) / spread
    if not a > 0:
        a = float(np.std(x)) * math.sqrt(6.0) / math.pi
    b = q50 + a * math.log(math.log(2.0))
    return 0.0, b, a


def fit_gev_ml(maxima) -> TailFit:
    return _with_scheme_note(_fit_gev_ml(maxima), maxima)


def _fit_gev_ml(maxima) -> TailFit:
    """GEV fit by maximum likelihood.

    Starts from the PWM fit (or a Gumbel quantile-matching fit when PWM
    fails or starts outside the support), optimizes on data standardized
    by the starting location/scale with ``scale = exp(phi)``.
    """
    x, tuning = _bm_input(maxima)
    m = len(x)
    if not _distinct_at_least(x, 3):
        raise DegenerateSampleError("GEV-ML needs at least 3 distinct values")
    init = fit_gev_pwm(x)
    g0, b0, a0 = init.gamma_hat, init.loc_hat, init.scale_hat
    if not (init.converged and ML_GAMMA_BOX[0] < g0 < ML_GAMMA_BOX[1] and np.all(1.0 + g0 * (x - b0) / a0 > 0)):
        g0, b0, a0 = _gumbel_quantile_init(x)
    xs = (x - b0) / a0
    fun = lambda t: gev_nll(t, xs)  # noqa: E731
    theta, f, grad = _maximize(fun, [g0, 0.0, 0.0])
    g = float(theta[0])
    loc = b0 + a0 * float(theta[1])
    scale = a0 * math.exp(float(theta[2]))
    ok = _ml_converged(g, grad)
    loglik = -m * (float(f) + math.log(a0)) if math.isfinite(f) else -math.inf
    msg = "" if ok else "optimizer did not reach a stationary point inside the gamma box"
    return TailFit("gev_ml", g, scale, loc, tuning, ok, m, loglik, message=msg)


def fit_gp_ml(excesses) -> TailFit:
    """GP fit of the excesses by maximum likelihood."""
    y, k, threshold = _pot_input(excesses)
    n = len(y)
    if not _distinct_at_least(y[y > 0], 2):
        raise DegenerateSampleError("GP-ML needs at least 2 distinct positive excesses")
    if np.any(y < 0):
        raise InvalidArgumentError("excesses must be non-negative")
    init = fit_gp_pwm(y)
    g0, s0 = init.gamma_hat, float(init.scale_hat)
    if not (init.converged and ML_GAMMA_BOX[0] < g0 < ML_GAMMA_BOX[1] and np.all(1.0 + g0 * y / s0 > 0)):
        g0, s0 = 0.0, float(np.mean(y))
    ys = y / s0
    fun = lambda t: gp_nll(t, ys)  # noqa: E731
    theta, f, grad = _maximize(fun, [g0, 0.0])
    g = float(theta[0])
    scale = s0 * math.exp(float(theta[1]))
    ok = _ml_converged(g, grad)
    loglik = -n * (float(f) + math.log(s0)) if math.isfinite(f) else -math.inf
    msg = "" if ok else "optimizer did not reach a stationary point inside the gamma box"
    return TailFit("gp_ml", g, scale, None, k, ok, n, loglik, threshold, msg)


def hill(series, k: int) -> TailFit:
    """Hill estimator: mean log-spacing of the top ``k`` order statistics over ``X_{n-k:n}``.

    ``scale_hat`` is the implied GP scale ``gamma_hat * X_{n-k:n}``.
    """
    x = np.sort(as_array(series))
    n = len(x)
    k = int(k)
    if not 1 <= k < n:
        raise InvalidArgumentError(f"need 1 <= k < n, got k={k}, n={n}")
    top = x[n - k - 1 :]
    if top[0] <= 0:
        raise PositivityError("the top k+1 order statistics must be positive")
    logs = np.log(top)
    g = float(np.mean(logs[1:]) - logs[0])
    t = float(top[0])
    return TailFit("hill", g, g * t, None, k, g > 0, k, threshold=t)


def log_likelihood_gev(x, gamma, loc, scale) -> float:
    """Total GEV log-likelihood in the original parametrization."""
    x = as_array(x)
    return -len(x) * gev_nll((gamma, loc, math.log(scale)), x, grad=False)


def log_likelihood_gp(y, gamma, scale) -> float:
    y = as_array(y)
    return -len(y) * gp_nll((gamma, math.log(scale)), y, grad=False)
