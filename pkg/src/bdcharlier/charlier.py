"""Charlier polynomials C_n(x; alpha) and the Poisson weight.

Convention: generating function sum_n C_n(x; alpha) z^n / n! = e^z (1 - z/alpha)^x,
which gives the three-term recurrence

    alpha C_{n+1} = (n + alpha - x) C_n - n C_{n-1},   C_0 = 1, C_1 = 1 - x/alpha.

For integer x the recurrence in n is run only up to min(n, x), with the other
argument as the evaluation point (duality C_n(x) = C_x(n)). Past n = x the
polynomial in n is the minimal solution of the recurrence and the forward
sweep loses all accuracy, while the dual sweep stays at a few ulps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numerics import log_factorials, neumaier_sum
from .errors import DomainError

__all__ = [
    "CharlierParams",
    "charlier_eval",
    "charlier_table",
    "gf_coeff_oracle",
    "poisson_weight",
    "log_poisson_weights",
    "truncation_start",
    "weighted_sum",
]


@dataclass(frozen=True)
class CharlierParams:
    alpha: float

    def __post_init__(self):
        if self.alpha == 0 or not math.isfinite(self.alpha):
            raise DomainError(f"Charlier parameter must be finite and nonzero, got {self.alpha}")


def _recurrence(n: int, x: float, alpha: float) -> float:
    c_prev, c = 1.0, 1.0 - x / alpha
    if n == 0:
        return c_prev
    for k in range(1, n):
        c_prev, c = c, ((k + alpha - x) * c - k * c_prev) / alpha
    return c


def charlier_eval(n: int, x: float, alpha: float) -> float:
    """C_n(x; alpha) by the three-term recurrence.

    Integer x >= 0 is evaluated through duality (see module docstring); any
    other real x uses the plain recurrence in n.
    """
    CharlierParams(alpha)
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    if float(x).is_integer() and x >= 0:
        xi = int(x)
        return _recurrence(min(n, xi), float(max(n, xi)), alpha)
    return _recurrence(n, float(x), alpha)


def charlier_table(n_max: int, x_max: int, alpha: float, dtype=np.float64) -> np.ndarray:
    """Array T with T[n, x] = C_n(x; alpha) for 0 <= n <= n_max, 0 <= x <= x_max.

    Vectorised version of :func:`charlier_eval` on the integer grid. ``dtype``
    may be ``np.longdouble`` for the spectral sums, which cancel heavily.
    """
    CharlierParams(alpha)
    a = dtype(alpha)
    y_max = max(n_max, x_max)
    j_max = min(n_max, x_max)
    y = np.arange(y_max + 1, dtype=dtype)
    # R[j, y] = C_j(y) is only read where j <= y
    R = np.empty((j_max + 1, y_max + 1), dtype=dtype)
    R[0] = 1
    if j_max >= 1:
        R[1] = 1 - y / a
    with np.errstate(all="ignore"):
        for j in range(1, j_max):
            R[j + 1] = ((j + a - y) * R[j] - j * R[j - 1]) / a
    n = np.arange(n_max + 1)[:, None]
    x = np.arange(x_max + 1)[None, :]
    return R[np.minimum(n, x), np.maximum(n, x)]


def gf_coeff_oracle(n: int, x: int, alpha: float) -> float:
    """C_n(x; alpha) read off the generating function as a finite sum.

    Expanding e^z (1 - z/alpha)^x and collecting z^n / n! gives
    sum_k binom(n, k) binom(x, k) k! (-1/alpha)^k. Shares no code with the
    recurrence. The terms are large and alternate, so the sum is formed
    exactly in rationals (a float alpha is an exact binary fraction) and
    rounded once.
    """
    if x < 0 or int(x) != x:
        raise DomainError(f"generating-function oracle needs integer x >= 0, got {x}")
    x = int(x)
    r = -1 / Fraction(alpha)
    return float(sum(math.comb(n, k) * math.comb(x, k) * math.factorial(k) * r**k for k in range(min(n, x) + 1)))


def poisson_weight(x: int, alpha: float) -> float:
    """e^-alpha alpha^x / x!, evaluated through log-gamma."""
    if not alpha > 0:
        raise DomainError(f"Poisson weight needs alpha > 0, got {alpha}")
    if x < 0:
        raise DomainError(f"Poisson weight needs x >= 0, got {x}")
    return math.exp(x * math.log(alpha) - math.lgamma(x + 1) - alpha)


def log_poisson_weights(x_max: int, alpha: float, dtype=np.float64) -> np.ndarray:
    if not alpha > 0:
        raise DomainError(f"Poisson weight needs alpha > 0, got {alpha}")
    a = dtype(alpha)
    x = np.arange(x_max + 1, dtype=dtype)
    return x * np.log(a) - log_factorials(x_max, dtype) - a


def truncation_start(alpha: float, m: int, n: int) -> int:
    return math.ceil(alpha + 10 * math.sqrt(alpha + 1)) + m + n


def weighted_sum(m: int, n: int, alpha: float, abs_tol: float = 1e-8,
                 consecutive: int = 10, x_cap: int = 1_000_000) -> float:
    """sum_x w(x) C_m(x) C_n(x) over the Poisson(alpha) weight.

    The upper limit starts at :func:`truncation_start` and doubles until the
    last ``consecutive`` terms are all below ``1e-3 * abs_tol``.
    """
    X = truncation_start(alpha, m, n)
    while True:
        T = charlier_table(max(m, n), X, alpha)
        terms = np.exp(log_poisson_weights(X, alpha)) * T[m] * T[n]
        if np.all(np.abs(terms[-consecutive:]) < 1e-3 * abs_tol):
            return neumaier_sum(terms)
        if X >= x_cap:
            raise DomainError(f"weighted sum did not converge below x = {x_cap}")
        X = min(2 * X, x_cap)
