"""Simulation catalog of univariate distributions.

Each catalog member is a :class:`DistributionSpec` (family plus parameters)
with a cdf, survival function, quantile function, inverse-transform sampler
and the extreme value index / second-order parameters of its tail.

Specs serialize as ``family(p1,p2,...)``, e.g. ``burr(1,1,1)``,
``frechet(1,1)``, ``gp(0.5,1)``. Trailing parameters with defaults may be
omitted when parsing (``frechet(1)`` is ``frechet(1,1)``).
"""

from __future__ import annotations

import enum
import functools
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidArgumentError, InvalidParameterError, UnsupportedTruthError
from .rng import make_rng, open_uniform
from .series import Series

# |gamma| below this uses the gamma = 0 (log / Gumbel / exponential) branch
GAMMA_SWITCH = 1e-8


def _ret(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def h_gamma(x, gamma: float):
    """``(x**gamma - 1) / gamma``, the integral of ``s**(gamma-1)`` over [1, x].

    Uses ``log(x)`` when ``|gamma| < GAMMA_SWITCH``.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if abs(gamma) < GAMMA_SWITCH:
            out = np.log(x)
        else:
            out = np.expm1(gamma * np.log(x)) / gamma
    return _ret(out)


def _log1p_ratio(y):
    """``log1p(y) / y`` with the removable singularity at 0 filled in."""
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(small, 1.0 - y / 2.0 + y * y / 3.0, np.log1p(y) / np.where(small, 1.0, y))
    return out


def _check_scale(scale: float) -> None:
    if not (scale > 0) or not math.isfinite(scale):
        raise InvalidParameterError(f"scale must be positive and finite, got {scale}")


def gev_cdf(x, gamma: float, loc: float = 0.0, scale: float = 1.0):
    """GEV distribution function ``exp(-(1 + gamma (x-loc)/scale)^(-1/gamma))``.

    Returns 0 below the support when ``gamma > 0`` and 1 above it when
    ``gamma < 0``.
    """
    _check_scale(scale)
    z = (np.asarray(x, dtype=float) - loc) / scale
    if abs(gamma) < GAMMA_SWITCH:
        return _ret(np.exp(-np.exp(-z)))
    t = 1.0 + gamma * z
    inside = t > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = np.exp(-np.exp(-np.log1p(np.where(inside, gamma * z, 0.0)) / gamma))
    outside = 0.0 if gamma > 0 else 1.0
    return _ret(np.where(inside, val, outside))


def gev_sf(x, gamma: float, loc: float = 0.0, scale: float = 1.0):
    _check_scale(scale)
    z = (np.asarray(x, dtype=float) - loc) / scale
    if abs(gamma) < GAMMA_SWITCH:
        return _ret(-np.expm1(-np.exp(-z)))
    t = 1.0 + gamma * z
    inside = t > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = -np.expm1(-np.exp(-np.log1p(np.where(inside, gamma * z, 0.0)) / gamma))
    outside = 1.0 if gamma > 0 else 0.0
    return _ret(np.where(inside, val, outside))


def gev_quantile(p, gamma: float, loc: float = 0.0, scale: float = 1.0):
    _check_scale(scale)
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise InvalidArgumentError("probability must lie in (0, 1)")
    return _ret(loc + scale * np.asarray(h_gamma(1.0 / -np.log(p), gamma)))


def gev_isf(q, gamma: float, loc: float = 0.0, scale: float = 1.0):
    """Quantile at ``1 - q``, accurate for tiny ``q``."""
    _check_scale(scale)
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q >= 1)):
        raise InvalidArgumentError("probability must lie in (0, 1)")
    return _ret(loc + scale * np.asarray(h_gamma(1.0 / -np.log1p(-q), gamma)))


def gp_cdf(x, gamma: float, scale: float = 1.0):
    """GP distribution function ``1 - (1 + gamma x / scale)^(-1/gamma)``."""
    return _ret(1.0 - np.asarray(gp_sf(x, gamma, scale)))


def gp_sf(x, gamma: float, scale: float = 1.0):
    _check_scale(scale)
    z = np.asarray(x, dtype=float) / scale
    below = z <= 0
    zz = np.where(below, 0.0, z)
    if abs(gamma) < GAMMA_SWITCH:
        val = np.exp(-zz)
    else:
        t = 1.0 + gamma * zz
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(t > 0, np.exp(-np.log1p(np.where(t > 0, gamma * zz, 0.0)) / gamma), 0.0)
    return _ret(np.where(below, 1.0, val))


def gp_quantile(p, gamma: float, scale: float = 1.0):
    """Inverse of :func:`gp_cdf`: ``scale ((1-p)^(-gamma) - 1) / gamma``."""
    _check_scale(scale)
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise InvalidArgumentError("probability must lie in (0, 1)")
    return _ret(scale * np.asarray(h_gamma(1.0 / (1.0 - p), gamma)))


def gp_isf(q, gamma: float, scale: float = 1.0):
    _check_scale(scale)
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q > 1)):
        raise InvalidArgumentError("probability must lie in (0, 1]")
    return _ret(scale * np.asarray(h_gamma(1.0 / q, gamma)))


# --------------------------------------------------------------------------
# second-order parameters


@functools.total_ordering
class SecondOrder:
    """A second-order parameter: a non-positive real or minus infinity.

    Deliberately not a number: it supports comparison but no arithmetic and
    no ``float()`` conversion, so an infinite value cannot leak into a
    computation. Use :attr:`value` (raises when infinite) to get a float.
    """

    __slots__ = ("_value",)

    def __init__(self, value: float | None):
        if value is not None:
            value = float(value)
            if value == -math.inf:
                value = None
            elif not (value <= 0) or math.isnan(value):
                raise InvalidParameterError(f"second-order parameter must be <= 0, got {value}")
        self._value = value

    @classmethod
    def neg_inf(cls) -> "SecondOrder":
        return cls(None)

    @property
    def is_neg_inf(self) -> bool:
        return self._value is None

    @property
    def value(self) -> float:
        if self._value is None:
            raise ValueError("second-order parameter is -inf; check is_neg_inf first")
        return self._value

    def _key(self):
        return (0, 0.0) if self._value is None else (1, self._value)

    def __eq__(self, other):
        if not isinstance(other, SecondOrder):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other):
        if not isinstance(other, SecondOrder):
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self):
        return "-inf" if self._value is None else f"{self._value:g}"

    def __repr__(self):
        return f"SecondOrder({str(self)})"


NEG_INF = SecondOrder.neg_inf()


@dataclass(frozen=True)
class TruthRecord:
    gamma: float
    rho_pot: SecondOrder
    rho_bm: SecondOrder

    def is_compatible(self) -> bool:
        """Check the BM/POT second-order compatibility rule.

        Finite values in [-1, 0] must coincide; if one is below -1 the
        other must equal -1.
        """
        minus_one = SecondOrder(-1.0)
        p, b = self.rho_pot, self.rho_bm
        if p < minus_one:
            return b == minus_one
        if b < minus_one:
            return p == minus_one
        return p == b


def _rho(x: float) -> SecondOrder:
    return SecondOrder(x)


# --------------------------------------------------------------------------
# numeric inversion for families without a closed-form quantile


def _invert(fun, target, increasing: bool, lower: float = -math.inf):
    """Vectorized bisection for ``fun(x) = target`` on a monotone ``fun``.

    Runs until every bracket is narrower than ``max(1e-12, 4 eps |x|)``.
    """
    target = np.atleast_1d(np.asarray(target, dtype=float))
    sign = 1.0 if increasing else -1.0
    lo = np.full(target.shape, -1.0 if lower == -math.inf else lower)
    hi = np.ones(target.shape)
    # grow brackets geometrically until they straddle the root
    for _ in range(2100):
        bad = sign * (fun(hi) - target) < 0
        if not bad.any():
            break
        hi = np.where(bad, hi * 2.0, hi)
    if lower == -math.inf:
        for _ in range(2100):
            bad = sign * (fun(lo) - target) > 0
            if not bad.any():
                break
            lo = np.where(bad, lo * 2.0, lo)
    for _ in range(4000):
        mid = 0.5 * (lo + hi)
        width = hi - lo
        if np.all(width <= np.maximum(1e-12, 4 * np.finfo(float).eps * np.abs(mid))):
            break
        up = sign * (fun(mid) - target) < 0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# families


class Family(str, enum.Enum):
    GEV = "gev"
    GP = "gp"
    EXPONENTIAL = "exponential"
    UNIFORM = "uniform"
    ARCSIN = "arcsin"
    BURR = "burr"
    STUDENT_T = "t"
    CAUCHY = "cauchy"
    WEIBULL = "weibull"
    GAMMA = "gamma"
    NORMAL = "normal"
    FRECHET = "frechet"
    REVERSE_WEIBULL = "reverseweibull"
    EXP_POWER_COMPOSITE = "composite"


_ALIASES = {
    "exp": Family.EXPONENTIAL,
    "studentt": Family.STUDENT_T,
    "student_t": Family.STUDENT_T,
    "reverse_weibull": Family.REVERSE_WEIBULL,
    "rweibull": Family.REVERSE_WEIBULL,
    "exppower": Family.EXP_POWER_COMPOSITE,
    "exp_power_composite": Family.EXP_POWER_COMPOSITE,
}


class _Impl:
    params: tuple[str, ...] = ()
    defaults: tuple[float, ...] = ()
    continuous = True

    def validate(self, *p) -> None:
        pass

    def upper(self, *p) -> float:
        return math.inf

    def cdf(self, x, *p):
        return 1.0 - self.sf(x, *p)

    def sf(self, x, *p):
        return 1.0 - self.cdf(x, *p)

    def ppf(self, u, *p):
        return self.isf(1.0 - u, *p)

    def isf(self, q, *p):
        return self.ppf(1.0 - q, *p)

    def draw(self, rng, n, *p):
        return self.isf(open_uniform(rng, n), *p)

    def truth(self, *p) -> TruthRecord:
        raise NotImplementedError


def _positive(name, value):
    if not (value > 0) or not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be positive and finite, got {value}")


class _GEV(_Impl):
    params = ("gamma", "loc", "scale")
    defaults = (0.0, 1.0)

    def validate(self, g, b, a):
        _positive("scale", a)

    def upper(self, g, b, a):
        return b - a / g if g < 0 else math.inf

    def cdf(self, x, g, b, a):
        return np.asarray(gev_cdf(x, g, b, a))

    def sf(self, x, g, b, a):
        return np.asarray(gev_sf(x, g, b, a))

    def ppf(self, u, g, b, a):
        return b + a * np.asarray(h_gamma(1.0 / -np.log(u), g))

    def isf(self, q, g, b, a):
        return b + a * np.asarray(h_gamma(1.0 / -np.log1p(-q), g))

    def truth(self, g, b, a):
        return TruthRecord(g, _rho(-1), NEG_INF)


class _GP(_Impl):
    params = ("gamma", "scale")
    defaults = (1.0,)

    def validate(self, g, s):
        _positive("scale", s)

    def upper(self, g, s):
        return -s / g if g < 0 else math.inf

    def sf(self, x, g, s):
        return np.asarray(gp_sf(x, g, s))

    def ppf(self, u, g, s):
        return s * np.asarray(h_gamma(1.0 / (1.0 - u), g))

    def isf(self, q, g, s):
        return s * np.asarray(h_gamma(1.0 / q, g))

    def truth(self, g, s):
        return TruthRecord(g, NEG_INF, _rho(-1))


class _Exponential(_Impl):
    params = ("rate",)
    defaults = (1.0,)

    def validate(self, lam):
        _positive("rate", lam)

    def sf(self, x, lam):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 1.0, np.exp(-lam * np.maximum(x, 0.0)))

    def cdf(self, x, lam):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 0.0, -np.expm1(-lam * np.maximum(x, 0.0)))

    def ppf(self, u, lam):
        return -np.log1p(-np.asarray(u, dtype=float)) / lam

    def isf(self, q, lam):
        return -np.log(q) / lam

    def truth(self, lam):
        return TruthRecord(0.0, NEG_INF, _rho(-1))


class _Uniform(_Impl):
    params = ("low", "high")
    defaults = (0.0, 1.0)

    def validate(self, a, b):
        if not (b > a) or not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidParameterError(f"uniform needs finite low < high, got ({a}, {b})")

    def upper(self, a, b):
        return b

    def cdf(self, x, a, b):
        return np.clip((np.asarray(x, dtype=float) - a) / (b - a), 0.0, 1.0)

    def sf(self, x, a, b):
        return np.clip((b - np.asarray(x, dtype=float)) / (b - a), 0.0, 1.0)

    def ppf(self, u, a, b):
        return a + (b - a) * np.asarray(u, dtype=float)

    def isf(self, q, a, b):
        return b - (b - a) * np.asarray(q, dtype=float)

    def truth(self, a, b):
        return TruthRecord(-1.0, NEG_INF, _rho(-1))


class _Arcsin(_Impl):
    """Arcsine law on (0, 1), i.e. Beta(1/2, 1/2)."""

    def upper(self):
        return 1.0

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return 2.0 / np.pi * np.arcsin(np.sqrt(x))

    def sf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return 2.0 / np.pi * np.arccos(np.sqrt(x))

    def ppf(self, u):
        return np.sin(np.pi * np.asarray(u, dtype=float) / 2.0) ** 2

    def isf(self, q):
        return np.cos(np.pi * np.asarray(q, dtype=float) / 2.0) ** 2

    def truth(self):
        return TruthRecord(-2.0, _rho(-2), _rho(-1))


class _Burr(_Impl):
    """``F(x) = 1 - (1 + x^tau / eta)^(-lam)`` on x > 0."""

    params = ("eta", "tau", "lam")

    def validate(self, eta, tau, lam):
        _positive("eta", eta)
        _positive("tau", tau)
        _positive("lam", lam)

    def sf(self, x, eta, tau, lam):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return np.exp(-lam * np.log1p(x**tau / eta))

    def cdf(self, x, eta, tau, lam):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return -np.expm1(-lam * np.log1p(x**tau / eta))

    def isf(self, q, eta, tau, lam):
        return (eta * np.expm1(-np.log(q) / lam)) ** (1.0 / tau)

    def ppf(self, u, eta, tau, lam):
        return (eta * np.expm1(-np.log1p(-np.asarray(u, dtype=float)) / lam)) ** (1.0 / tau)

    def truth(self, eta, tau, lam):
        return TruthRecord(1.0 / (lam * tau), _rho(-1.0 / lam), _rho(max(-1.0 / lam, -1.0)))


class _StudentT(_Impl):
    params = ("nu",)

    def validate(self, nu):
        _positive("nu", nu)

    def cdf(self, x, nu):
        return special.stdtr(nu, np.asarray(x, dtype=float))

    def sf(self, x, nu):
        return special.stdtr(nu, -np.asarray(x, dtype=float))

    def ppf(self, u, nu):
        u = np.asarray(u, dtype=float)
        return _invert(lambda x: special.stdtr(nu, x), u, increasing=True).reshape(u.shape)

    def isf(self, q, nu):
        return -self.ppf(q, nu)

    def draw(self, rng, n, nu):
        z = rng.standard_normal(n)
        c = rng.chisquare(nu, n)
        return z / np.sqrt(c / nu)

    def truth(self, nu):
        if nu == 1:
            return TruthRecord(1.0, _rho(-2), _rho(-2))
        return TruthRecord(1.0 / nu, _rho(-2.0 / nu), _rho(max(-2.0 / nu, -1.0)))


class _Cauchy(_Impl):
    params = ("loc", "scale")
    defaults = (0.0, 1.0)

    def validate(self, m, s):
        _positive("scale", s)

    def cdf(self, x, m, s):
        return np.arctan2(1.0, -(np.asarray(x, dtype=float) - m) / s) / np.pi

    def sf(self, x, m, s):
        return np.arctan2(1.0, (np.asarray(x, dtype=float) - m) / s) / np.pi

    def ppf(self, u, m, s):
        return m - s / np.tan(np.pi * np.asarray(u, dtype=float))

    def isf(self, q, m, s):
        return m + s / np.tan(np.pi * np.asarray(q, dtype=float))

    def truth(self, m, s):
        return TruthRecord(1.0, _rho(-2), _rho(-2))


class _Weibull(_Impl):
    """``F(x) = 1 - exp(-(x/lam)^beta)`` on x > 0."""

    params = ("lam", "beta")

    def validate(self, lam, beta):
        _positive("lam", lam)
        _positive("beta", beta)

    def sf(self, x, lam, beta):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return np.exp(-((x / lam) ** beta))

    def cdf(self, x, lam, beta):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return -np.expm1(-((x / lam) ** beta))

    def isf(self, q, lam, beta):
        return lam * (-np.log(q)) ** (1.0 / beta)

    def ppf(self, u, lam, beta):
        return lam * (-np.log1p(-np.asarray(u, dtype=float))) ** (1.0 / beta)

    def truth(self, lam, beta):
        if beta == 1:
            raise UnsupportedTruthError("Weibull truth is tabulated for beta != 1 only")
        return TruthRecord(0.0, _rho(0), _rho(0))


class _Gamma(_Impl):
    """Shape ``alpha``, rate ``beta``."""

    params = ("alpha", "beta")
    defaults = (1.0,)

    def validate(self, alpha, beta):
        _positive("alpha", alpha)
        _positive("beta", beta)

    def cdf(self, x, alpha, beta):
        return special.gammainc(alpha, beta * np.maximum(np.asarray(x, dtype=float), 0.0))

    def sf(self, x, alpha, beta):
        return special.gammaincc(alpha, beta * np.maximum(np.asarray(x, dtype=float), 0.0))

    def ppf(self, u, alpha, beta):
        u = np.asarray(u, dtype=float)
        f = lambda x: self.cdf(x, alpha, beta)  # noqa: E731
        return _invert(f, u, increasing=True, lower=0.0).reshape(u.shape)

    def isf(self, q, alpha, beta):
        q = np.asarray(q, dtype=float)
        f = lambda x: self.sf(x, alpha, beta)  # noqa: E731
        return _invert(f, q, increasing=False, lower=0.0).reshape(q.shape)

    def draw(self, rng, n, alpha, beta):
        return rng.standard_gamma(alpha, n) / beta

    def truth(self, alpha, beta):
        return TruthRecord(0.0, _rho(0), _rho(0))


class _Normal(_Impl):
    params = ("mu", "sigma")
    defaults = (0.0, 1.0)

    def validate(self, mu, sigma):
        _positive("sigma", sigma)

    def cdf(self, x, mu, sigma):
        return special.ndtr((np.asarray(x, dtype=float) - mu) / sigma)

    def sf(self, x, mu, sigma):
        return special.ndtr((mu - np.asarray(x, dtype=float)) / sigma)

    def ppf(self, u, mu, sigma):
        return mu + sigma * special.ndtri(u)

    def isf(self, q, mu, sigma):
        return mu - sigma * special.ndtri(q)

    def draw(self, rng, n, mu, sigma):
        return mu + sigma * rng.standard_normal(n)

    def truth(self, mu, sigma):
        return TruthRecord(0.0, _rho(0), _rho(0))


class _Frechet(_Impl):
    """``F(x) = exp(-(x/scale)^(-alpha))`` on x > 0."""

    params = ("alpha", "scale")
    defaults = (1.0,)

    def validate(self, alpha, s):
        _positive("alpha", alpha)
        _positive("scale", s)

    def cdf(self, x, alpha, s):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x <= 0, 0.0, np.exp(-((np.maximum(x, 0.0) / s) ** -alpha)))

    def sf(self, x, alpha, s):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x <= 0, 1.0, -np.expm1(-((np.maximum(x, 0.0) / s) ** -alpha)))

    def ppf(self, u, alpha, s):
        return s * (-np.log(u)) ** (-1.0 / alpha)

    def isf(self, q, alpha, s):
        return s * (-np.log1p(-np.asarray(q, dtype=float))) ** (-1.0 / alpha)

    def truth(self, alpha, s):
        return TruthRecord(1.0 / alpha, _rho(-1), NEG_INF)


class _ReverseWeibull(_Impl):
    """``F(x) = exp(-((mu - x)/sigma)^beta)`` for x < mu."""

    params = ("beta", "mu", "sigma")
    defaults = (0.0, 1.0)

    def validate(self, beta, mu, sigma):
        _positive("beta", beta)
        _positive("sigma", sigma)

    def upper(self, beta, mu, sigma):
        return mu

    def cdf(self, x, beta, mu, sigma):
        d = np.maximum((mu - np.asarray(x, dtype=float)) / sigma, 0.0)
        return np.exp(-(d**beta))

    def sf(self, x, beta, mu, sigma):
        d = np.maximum((mu - np.asarray(x, dtype=float)) / sigma, 0.0)
        return -np.expm1(-(d**beta))

    def ppf(self, u, beta, mu, sigma):
        return mu - sigma * (-np.log(u)) ** (1.0 / beta)

    def isf(self, q, beta, mu, sigma):
        return mu - sigma * (-np.log1p(-np.asarray(q, dtype=float))) ** (1.0 / beta)

    def truth(self, beta, mu, sigma):
        return TruthRecord(-1.0 / beta, _rho(-1), NEG_INF)


class _ExpPowerComposite(_Impl):
    """``F(x) = exp(-(1 + x^alpha)^(-beta))`` for x >= 0.

    The law has an atom of mass ``exp(-1)`` at zero, so quantiles below
    that level all map to 0.
    """

    params = ("alpha", "beta")
    continuous = False

    def validate(self, alpha, beta):
        _positive("alpha", alpha)
        _positive("beta", beta)

    def cdf(self, x, alpha, beta):
        x = np.asarray(x, dtype=float)
        xx = np.maximum(x, 0.0)
        return np.where(x < 0, 0.0, np.exp(-np.exp(-beta * np.log1p(xx**alpha))))

    def sf(self, x, alpha, beta):
        x = np.asarray(x, dtype=float)
        xx = np.maximum(x, 0.0)
        return np.where(x < 0, 1.0, -np.expm1(-np.exp(-beta * np.log1p(xx**alpha))))

    def _from_neglog(self, e, alpha, beta):
        # e = -log F; solve (1 + x^alpha)^(-beta) = e
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.expm1(-np.log(e) / beta)
        return np.where(e >= 1.0, 0.0, np.maximum(base, 0.0) ** (1.0 / alpha))

    def ppf(self, u, alpha, beta):
        return self._from_neglog(-np.log(np.asarray(u, dtype=float)), alpha, beta)

    def isf(self, q, alpha, beta):
        return self._from_neglog(-np.log1p(-np.asarray(q, dtype=float)), alpha, beta)

    def truth(self, alpha, beta):
        return TruthRecord(1.0 / (alpha * beta), _rho(max(-1.0 / beta, -1.0)), _rho(-1.0 / beta))


_IMPLS: dict[Family, _Impl] = {
    Family.GEV: _GEV(),
    Family.GP: _GP(),
    Family.EXPONENTIAL: _Exponential(),
    Family.UNIFORM: _Uniform(),
    Family.ARCSIN: _Arcsin(),
    Family.BURR: _Burr(),
    Family.STUDENT_T: _StudentT(),
    Family.CAUCHY: _Cauchy(),
    Family.WEIBULL: _Weibull(),
    Family.GAMMA: _Gamma(),
    Family.NORMAL: _Normal(),
    Family.FRECHET: _Frechet(),
    Family.REVERSE_WEIBULL: _ReverseWeibull(),
    Family.EXP_POWER_COMPOSITE: _ExpPowerComposite(),
}


def _fmt(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


_SPEC_RE = re.compile(r"^\s*([A-Za-z_]+)\s*\((.*)\)\s*$")


def parse_family(name: str) -> Family:
    key = name.strip().lower()
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return Family(key)
    except ValueError:
        raise InvalidParameterError(f"unknown distribution family {name!r}") from None


@dataclass(frozen=True)
class DistributionSpec:
    """A catalog member: family plus its full parameter vector."""

    family: Family
    params: tuple[float, ...] = ()

    def __post_init__(self):
        fam = self.family if isinstance(self.family, Family) else parse_family(str(self.family))
        impl = _IMPLS[fam]
        p = tuple(float(v) for v in self.params)
        n_req = len(impl.params) - len(impl.defaults)
        if len(p) < n_req or len(p) > len(impl.params):
            raise InvalidParameterError(
                f"{fam.value} takes {n_req}..{len(impl.params)} parameters {impl.params}, got {len(p)}"
            )
        p = p + impl.defaults[len(p) - n_req :]
        if any(math.isnan(v) for v in p):
            raise InvalidParameterError("parameters must not be NaN")
        impl.validate(*p)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", p)

    @classmethod
    def parse(cls, text: str) -> "DistributionSpec":
        m = _SPEC_RE.match(text)
        if not m:
            raise InvalidParameterError(f"cannot parse distribution spec {text!r}")
        body = m.group(2).strip()
        try:
            params = tuple(float(v) for v in body.split(",")) if body else ()
        except ValueError:
            raise InvalidParameterError(f"non-numeric parameter in {text!r}") from None
        return cls(parse_family(m.group(1)), params)

    def __str__(self) -> str:
        return f"{self.family.value}({','.join(_fmt(v) for v in self.params)})"

    @property
    def _impl(self) -> _Impl:
        return _IMPLS[self.family]

    @property
    def continuous(self) -> bool:
        return self._impl.continuous

    @property
    def support_upper_endpoint(self) -> float:
        return float(self._impl.upper(*self.params))

    def cdf(self, x):
        return _ret(self._impl.cdf(np.asarray(x, dtype=float), *self.params))

    def sf(self, x):
        return _ret(self._impl.sf(np.asarray(x, dtype=float), *self.params))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)):
            raise InvalidArgumentError("probability must lie in (0, 1)")
        return _ret(self._impl.ppf(p, *self.params))

    def upper_quantile(self, q):
        """Quantile at level ``1 - q``, computed without forming ``1 - q``."""
        q = np.asarray(q, dtype=float)
        if np.any((q <= 0) | (q >= 1)):
            raise InvalidArgumentError("tail probability must lie in (0, 1)")
        return _ret(self._impl.isf(q, *self.params))


def as_spec(spec) -> DistributionSpec:
    if isinstance(spec, DistributionSpec):
        return spec
    if isinstance(spec, str):
        return DistributionSpec.parse(spec)
    raise InvalidParameterError(f"not a distribution spec: {spec!r}")


def sample(spec, n: int, seed: int) -> Series:
    """Draw ``n`` i.i.d. observations; identical arguments give identical output."""
    spec = as_spec(spec)
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    values = np.asarray(spec._impl.draw(rng, int(n), *spec.params), dtype=float)
    return Series(values, kind="iid", model=str(spec), seed=int(seed))


def truth(spec) -> TruthRecord:
    spec = as_spec(spec)
    return spec._impl.truth(*spec.params)


def tail_quantile_U(spec, t):
    """``U(t) = F^{-1}(1 - 1/t)`` for ``t > 1``."""
    spec = as_spec(spec)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 1):
        raise InvalidArgumentError("U(t) needs t > 1")
    return spec.upper_quantile(1.0 / t)


def tail_quantile_V(spec, t):
    """``V(t) = F^{-1}(exp(-1/t))`` for ``t > 1``."""
    spec = as_spec(spec)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 1):
        raise InvalidArgumentError("V(t) needs t > 1")
    return spec.upper_quantile(-np.expm1(-1.0 / t))
