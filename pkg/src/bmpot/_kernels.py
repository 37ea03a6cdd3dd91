"""Sequential inner loops compiled with numba."""

import numpy as np
from numba import njit


@njit(cache=True)
def sliding_max(x, r):
    # monotone queue of indices, values strictly decreasing from head to tail
    n = x.shape[0]
    out = np.empty(n - r + 1)
    q = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for i in range(n):
        while tail > head and x[q[tail - 1]] <= x[i]:
            tail -= 1
        q[tail] = i
        tail += 1
        if q[head] <= i - r:
            head += 1
        if i >= r - 1:
            out[i - r + 1] = x[q[head]]
    return out


@njit(cache=True)
def armax_path(x0, innovations, alpha):
    n = innovations.shape[0]
    out = np.empty(n)
    prev = x0
    for t in range(n):
        a = alpha * prev
        b = (1.0 - alpha) * innovations[t]
        prev = a if a > b else b
        out[t] = prev
    return out


@njit(cache=True)
def ar1_path(x0, innovations, phi):
    n = innovations.shape[0]
    out = np.empty(n)
    prev = x0
    for t in range(n):
        prev = phi * prev + innovations[t]
        out[t] = prev
    return out
