"""Two concrete representations of the creation/annihilation algebra.

``FockCoeffs`` holds a ket sum_n c_n |n> as its coefficient vector, with
a+|n> = |n+1> and a|n> = n|n-1>. ``GridFunction`` holds a function on the
integers 0..X, where |n> is realised as the Charlier polynomial C_n(x; alpha)
and the operators act as finite differences:

    a+ f(x) = f(x) - (x/alpha) f(x-1),      a f(x) = alpha f(x) - alpha f(x+1).

Operations preserve the coefficient dtype, so integer or ``Fraction``
(object) vectors give exact results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .charlier import charlier_table, log_poisson_weights
from .errors import DomainError

__all__ = [
    "FockCoeffs",
    "GridFunction",
    "create_op",
    "annihilate_op",
    "number_op",
    "bra_pairing",
    "coherent_coeffs",
    "create_grid",
    "annihilate_grid",
    "grid_eval",
    "grid_pairing",
    "coherent_grid",
    "expm_apply",
    "same_state",
]


@dataclass(frozen=True, eq=False)
class FockCoeffs:
    coeffs: np.ndarray
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs))
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise DomainError("FockCoeffs needs a nonempty 1-d coefficient vector")

    @classmethod
    def basis(cls, n: int, alpha: float = 1.0, dtype=np.int64) -> "FockCoeffs":
        c = np.zeros(n + 1, dtype=dtype)
        c[n] = 1
        return cls(c, alpha)

    def __len__(self):
        return self.coeffs.size

    def _new(self, coeffs) -> "FockCoeffs":
        return FockCoeffs(coeffs, self.alpha)

    def __add__(self, other: "FockCoeffs") -> "FockCoeffs":
        a, b = _pad(self.coeffs, other.coeffs)
        return self._new(a + b)

    def __sub__(self, other: "FockCoeffs") -> "FockCoeffs":
        a, b = _pad(self.coeffs, other.coeffs)
        return self._new(a - b)

    def scale(self, z) -> "FockCoeffs":
        return self._new(self.coeffs * z)


def _pad(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = max(a.size, b.size)
    dtype = np.result_type(a, b)
    out_a = np.zeros(n, dtype=dtype)
    out_b = np.zeros(n, dtype=dtype)
    out_a[: a.size] = a
    out_b[: b.size] = b
    return out_a, out_b


def same_state(s: FockCoeffs, t: FockCoeffs, atol: float = 0.0) -> bool:
    """Equality up to trailing zeros (and ``atol`` when positive)."""
    a, b = _pad(s.coeffs, t.coeffs)
    if atol == 0:
        return bool(np.all(a == b))
    return bool(np.all(np.abs(a - b) <= atol))


def create_op(s: FockCoeffs) -> FockCoeffs:
    out = np.zeros(len(s) + 1, dtype=s.coeffs.dtype)
    out[1:] = s.coeffs
    return s._new(out)


def annihilate_op(s: FockCoeffs) -> FockCoeffs:
    if len(s) == 1:
        return s._new(np.zeros(1, dtype=s.coeffs.dtype))
    return s._new(s.coeffs[1:] * np.arange(1, len(s), dtype=np.int64))


def number_op(s: FockCoeffs) -> FockCoeffs:
    return create_op(annihilate_op(s))


def bra_pairing(m: int, s: FockCoeffs):
    """<m|s> = alpha^-m m! c_m."""
    if m >= len(s):
        return 0.0
    return s.alpha ** (-m) * math.factorial(m) * s.coeffs[m]


def coherent_coeffs(z: float, n_max: int, alpha: float = 1.0) -> FockCoeffs:
    """Coefficients z^n / n! of |z> = exp(z a+)|0>, truncated at n_max."""
    n = np.arange(n_max + 1)
    logs = np.array([math.lgamma(k + 1) for k in n])
    if z == 0:
        c = (n == 0).astype(float)
    else:
        c = np.sign(z) ** n * np.exp(n * math.log(abs(z)) - logs)
    return FockCoeffs(c, alpha)


def expm_apply(op: Callable[[FockCoeffs], FockCoeffs], z: float, s: FockCoeffs,
               rtol: float = 1e-16, max_terms: int = 500) -> FockCoeffs:
    """exp(z A) s by its Taylor series, stopped once a term is below rtol * |sum|."""
    total = s._new(s.coeffs.astype(float))
    term = total
    for k in range(1, max_terms):
        term = op(term).scale(z / k)
        total = total + term
        size = np.max(np.abs(term.coeffs))
        if size == 0 or size <= rtol * np.max(np.abs(total.coeffs)):
            return total
    raise DomainError(f"operator exponential did not converge in {max_terms} terms")


@dataclass(frozen=True, eq=False)
class GridFunction:
    values: np.ndarray
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or self.values.size == 0:
            raise DomainError("GridFunction needs values on at least x = 0")
        if self.alpha == 0:
            raise DomainError("GridFunction alpha must be nonzero")

    @property
    def x_max(self) -> int:
        return self.values.size - 1


def create_grid(f: GridFunction) -> GridFunction:
    x = np.arange(f.values.size)
    shifted = np.concatenate(([0.0], f.values[:-1]))
    return GridFunction(f.values - x / f.alpha * shifted, f.alpha)


def annihilate_grid(f: GridFunction) -> GridFunction:
    if f.values.size < 2:
        raise DomainError("annihilate_grid reads f(x+1) and needs at least two grid points")
    return GridFunction(f.alpha * (f.values[:-1] - f.values[1:]), f.alpha)


def grid_eval(s: FockCoeffs, x_max: int) -> GridFunction:
    """sum_n c_n C_n(x; alpha) on x = 0..x_max."""
    T = charlier_table(len(s) - 1, x_max, s.alpha)
    return GridFunction(np.asarray(s.coeffs, dtype=float) @ T, s.alpha)


def grid_pairing(m: int, f: GridFunction) -> float:
    """<m| f = sum_x w(x) C_m(x) f(x) over the grid carried by f (alpha > 0)."""
    w = np.exp(log_poisson_weights(f.x_max, f.alpha))
    C = charlier_table(m, f.x_max, f.alpha)[m]
    return math.fsum(w * C * f.values)


def coherent_grid(z: float, x_max: int, alpha: float) -> GridFunction:
    """The coherent state in the grid picture: e^z (1 - z/alpha)^x."""
    x = np.arange(x_max + 1)
    return GridFunction(math.exp(z) * (1.0 - z / alpha) ** x, alpha)
