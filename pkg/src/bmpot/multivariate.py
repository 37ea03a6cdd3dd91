"""Empirical stable tail dependence function and analytic reference models.

``L_hat(x) = (1/k) sum_i 1{ exists j: F_j(X_ij) > 1 - (k/n) x_j }`` with
the column empirical cdf ``F_j(t) = rank(t)/n`` (maximal ranks for ties).

Logistic samples use the positive-stable frailty construction: with
``S`` positive ``alpha``-stable (Laplace transform ``exp(-s^alpha)``) and
i.i.d. standard exponentials ``E_j``, the vector
``U_j = exp(-(E_j/S)^alpha)`` has uniform margins and the logistic copula.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidParameterError
from .rng import make_rng, open_uniform

MODEL_KINDS = ("independence", "comonotone", "logistic")
STDF_GRID = np.round(np.linspace(0.0, 1.0, 11), 10)


@dataclass(frozen=True, eq=False)
class MultivariateSample:
    data: np.ndarray

    def __post_init__(self):
        a = np.array(self.data, dtype=float)
        if a.ndim != 2 or a.shape[1] < 2:
            raise InvalidArgumentError("multivariate sample must be an n x d matrix with d >= 2")
        if a.shape[0] < a.shape[1]:
            raise InvalidArgumentError(f"need n >= d, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("multivariate sample contains non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class DependenceModel:
    kind: str
    d: int = 2
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise InvalidParameterError(f"unknown dependence model {self.kind!r}")
        if int(self.d) < 2:
            raise InvalidParameterError(f"dimension must be >= 2, got {self.d}")
        if self.kind == "logistic" and not 0 < self.alpha <= 1:
            raise InvalidParameterError(f"logistic alpha must lie in (0, 1], got {self.alpha}")

    @classmethod
    def parse(cls, text: str, d: int = 2) -> "DependenceModel":
        """Parse ``independence``, ``comonotone`` or ``logistic(alpha)``."""
        s = text.strip().lower()
        if s.startswith("logistic"):
            body = s[len("logistic") :].strip()
            if not (body.startswith("(") and body.endswith(")")):
                raise InvalidParameterError(f"cannot parse dependence model {text!r}")
            try:
                alpha = float(body[1:-1])
            except ValueError:
                raise InvalidParameterError(f"cannot parse dependence model {text!r}") from None
            return cls("logistic", d, alpha)
        return cls(s, d)


def _as_sample(sample) -> MultivariateSample:
    return sample if isinstance(sample, MultivariateSample) else MultivariateSample(sample)


def max_ranks(column: np.ndarray) -> np.ndarray:
    """Rank of each entry among the column, ties given the largest rank."""
    s = np.sort(column)
    return np.searchsorted(s, column, side="right")


def _check_k(k, n):
    if not (isinstance(k, (int, np.integer)) and 1 <= k < n):
        raise InvalidArgumentError(f"need integer 1 <= k < n = {n}, got {k!r}")


def _check_x(x, d):
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise InvalidArgumentError(f"x must have length {d}")
    if np.any(~(x >= 0)) or np.any(x > 1):
        raise InvalidArgumentError("x must lie in [0, 1]^d")
    return x


def empirical_stdf(sample, k: int, x) -> float:
    """Empirical stable tail dependence function at ``x``."""
    return float(empirical_stdf_grid(sample, k, np.atleast_2d(np.asarray(x, dtype=float)))[0])


def empirical_stdf_grid(sample, k: int, points) -> np.ndarray:
    """``L_hat`` at each row of ``points``, sharing one rank computation."""
    s = _as_sample(sample)
    n, d = s.n, s.d
    _check_k(k, n)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    for row in pts:
        _check_x(row, d)
    f = np.column_stack([max_ranks(s.data[:, j]) for j in range(d)]) / n
    out = np.empty(len(pts))
    for i, x in enumerate(pts):
        hit = np.any(f > 1.0 - (k / n) * x, axis=1)
        out[i] = np.count_nonzero(hit) / k
    return out


def true_stdf(model: DependenceModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.d,):
        raise InvalidArgumentError(f"x must have length {model.d}")
    if np.any(~(x >= 0)):
        raise InvalidArgumentError("x must be componentwise non-negative")
    if model.kind == "independence":
        return float(x.sum())
    if model.kind == "comonotone":
        return float(x.max())
    a = model.alpha
    return float(np.sum(x ** (1.0 / a)) ** a)


def _positive_stable(rng, alpha, n):
    # Kanter's representation of the positive alpha-stable law with Laplace transform exp(-s^alpha)
    u = np.pi * open_uniform(rng, n)
    w = -np.log(open_uniform(rng, n))
    a = np.sin(alpha * u) ** (alpha / (1 - alpha)) * np.sin((1 - alpha) * u) / np.sin(u) ** (1 / (1 - alpha))
    return (a / w) ** ((1 - alpha) / alpha)


def sample_dependence(model: DependenceModel, n: int, seed: int) -> MultivariateSample:
    """Uniform-margin sample of size ``n`` from ``model`` (deterministic per seed)."""
    n = int(n)
    d = model.d
    if n < d:
        raise InvalidArgumentError(f"need n >= d, got n={n}")
    rng = make_rng(seed)
    if model.kind == "independence" or (model.kind == "logistic" and model.alpha == 1.0):
        data = open_uniform(rng, n * d).reshape(n, d)
    elif model.kind == "comonotone":
        data = np.repeat(open_uniform(rng, n)[:, None], d, axis=1)
    else:
        a = model.alpha
        s = _positive_stable(rng, a, n)
        e = -np.log(open_uniform(rng, n * d).reshape(n, d))
        data = np.exp(-((e / s[:, None]) ** a))
    return MultivariateSample(data)


def read_sample_csv(path) -> MultivariateSample:
    """Read a headerless numeric CSV matrix."""
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    return MultivariateSample(np.array(rows))


def write_sample_csv(sample, path) -> None:
    s = _as_sample(sample)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in s.data:
            w.writerow([repr(float(v)) for v in row])


def stdf_grid_report(sample, k: int, model: DependenceModel | None = None, grid=STDF_GRID) -> list[dict]:
    """``L_hat`` over ``grid^d`` as rows ``x_1..x_d, L_hat, L_true`` (blank truth when unknown)."""
    s = _as_sample(sample)
    pts = np.array(list(itertools.product(grid, repeat=s.d)))
    vals = empirical_stdf_grid(s, k, pts)
    rows = []
    for x, v in zip(pts, vals):
        row = {f"x_{j + 1}": repr(float(x[j])) for j in range(s.d)}
        row["L_hat"] = repr(float(v))
        row["L_true"] = "" if model is None else repr(true_stdf(model, x))
        rows.append(row)
    return rows
