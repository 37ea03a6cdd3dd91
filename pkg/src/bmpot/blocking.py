"""Block maxima and threshold excesses.

The two samples the BM and POT methods are built on: maxima of disjoint or
sliding blocks of length ``r``, and the ``k`` excesses over the order
statistic ``X_{n-k:n}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptySampleError, InvalidArgumentError
from .series import as_array


@dataclass(frozen=True, eq=False)
class BlockMaximaSample:
    maxima: np.ndarray
    block_size: int
    scheme: str
    source_length: int

    def __len__(self) -> int:
        return len(self.maxima)


@dataclass(frozen=True, eq=False)
class ExcessSample:
    """Excesses over ``threshold``, sorted ascending.

    ``exceedance_times`` are the 0-based positions of the ``k`` selected
    observations in the source series, in time order.
    """

    threshold: float
    excesses: np.ndarray
    k: int
    n: int
    exceedance_times: np.ndarray

    def __len__(self) -> int:
        return self.k


def _check_block_size(n: int, r: int) -> None:
    if r < 1:
        raise InvalidArgumentError(f"block size must be >= 1, got {r}")
    if r > n:
        raise EmptySampleError(f"block size {r} exceeds series length {n}")


def disjoint_block_maxima(series, r: int) -> BlockMaximaSample:
    """Maxima of the ``floor(n/r)`` consecutive blocks; the remainder is dropped."""
    x = as_array(series)
    n = len(x)
    r = int(r)
    _check_block_size(n, r)
    m = n // r
    maxima = x[: m * r].reshape(m, r).max(axis=1)
    return BlockMaximaSample(maxima, r, "disjoint", n)


def sliding_block_maxima(series, r: int) -> BlockMaximaSample:
    """Maxima of all ``n - r + 1`` windows of length ``r``, in O(n)."""
    x = np.ascontiguousarray(as_array(series))
    n = len(x)
    r = int(r)
    _check_block_size(n, r)
    return BlockMaximaSample(_kernels.sliding_max(x, r), r, "sliding", n)


def block_maxima(series, r: int, scheme: str = "disjoint") -> BlockMaximaSample:
    if scheme == "disjoint":
        return disjoint_block_maxima(series, r)
    if scheme == "sliding":
        return sliding_block_maxima(series, r)
    raise InvalidArgumentError(f"unknown block scheme {scheme!r}")


def threshold_excesses(series, k: int) -> ExcessSample:
    """Excesses of the ``k`` largest observations over ``X_{n-k:n}``.

    Ties are broken by time: among equal values the later observation ranks
    higher, so exactly ``k`` observations are always selected.
    """
    x = as_array(series)
    n = len(x)
    k = int(k)
    if not 1 <= k < n:
        raise InvalidArgumentError(f"need 1 <= k < n, got k={k}, n={n}")
    order = np.argsort(x, kind="stable")
    threshold = float(x[order[n - k - 1]])
    top = order[n - k :]
    excesses = np.sort(x[top] - threshold)
    return ExcessSample(threshold, excesses, k, n, np.sort(top))
