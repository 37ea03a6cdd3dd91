from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Series:
    """An ordered sample with the metadata needed to regenerate it.

    ``kind`` is ``"iid"`` or ``"stationary"``; ``model`` is the compact
    model string (``frechet(1,1)``, ``armax(0.5)``) and ``seed`` the stream
    seed, both ``None`` for user-supplied data.
    """

    values: np.ndarray
    kind: str = "iid"
    model: str | None = None
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def as_array(data) -> np.ndarray:
    """Return the observations of a Series or array-like as a float vector."""
    if isinstance(data, Series):
        data = data.values
    x = np.asarray(data, dtype=float)
    if x.ndim != 1:
        x = x.ravel()
    return x
