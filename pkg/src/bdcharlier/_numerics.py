"""Small numerical helpers: compensated summation and log-space factorials."""
from __future__ import annotations

import math

import numpy as np


def neumaier_sum(values) -> float:
    """Compensated sum of an iterable of floats (Neumaier's variant of Kahan)."""
    total = 0.0
    comp = 0.0
    for v in values:
        v = float(v)
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def neumaier_sum_rows(terms: np.ndarray) -> np.ndarray:
    """Compensated sum along the last axis, vectorised over leading axes.

    Works in the dtype of ``terms`` (float64 or longdouble).
    """
    terms = np.asarray(terms)
    total = np.zeros(terms.shape[:-1], dtype=terms.dtype)
    comp = np.zeros_like(total)
    for j in range(terms.shape[-1]):
        v = terms[..., j]
        t = total + v
        big = np.abs(total) >= np.abs(v)
        comp += np.where(big, (total - t) + v, (v - t) + total)
        total = t
    return total + comp


def log_factorials(n_max: int, dtype=np.float64) -> np.ndarray:
    """log(k!) for k = 0..n_max, accumulated in ``dtype``."""
    out = np.zeros(n_max + 1, dtype=dtype)
    if n_max > 0:
        out[1:] = np.cumsum(np.log(np.arange(1, n_max + 1, dtype=dtype)))
    return out


def xlogy(x: float, y: float) -> float:
    """x * log(y) with the convention 0 * log(0) = 0."""
    if x == 0:
        return 0.0
    if y == 0:
        return -math.inf
    return x * math.log(y)
