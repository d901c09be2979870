"""Transition probabilities P_{n->m}(t) of the immigration-death process.

Three closed forms are implemented:

* ``km_homogeneous``: the classical spectral sum for constant rates,
  P = (alpha^m / m!) sum_x e^{-mu t x} C_m(x) C_n(x) w(x), alpha = lam/mu.
* ``expr1_finite_sum``: the finite sum in the Wei-Norman functions,
  P = e^{g1} e^{g4 n} sum_l n! / (l! (m-l)! (n-l)!) g2^{m-l} g3^{n-l},
  evaluated as the binomial-thinning / Poisson-immigration convolution
  sum_l Bin(l; n, p) Poi(m-l; nu) with p = e^{g4}, 1-p = g3 e^{g4}, nu = g2.
* ``expr2_charlier``: the time-inhomogeneous spectral sum
  P = (alpha^m / m!) sum_x e^{g4 n} C_m(x) C_n(x) w(x) (g3+1)^{n-x}
  with the time-dependent alpha = g2 (g3+1) / g3.

The spectral sums alternate in sign and cancel by many orders of magnitude
when t is small or n, m are large, so they are assembled in extended
precision (``numpy.longdouble``) with magnitudes in log space and signs taken
from the Charlier values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import log_factorials, neumaier_sum, neumaier_sum_rows, xlogy
from .charlier import charlier_table, log_poisson_weights, truncation_start
from .errors import DegenerateSpectral, DomainError, PrecisionLoss, ResourceError
from .oracle import Distribution, master_integrate
from .rates import RateProfile
from .weinorman import GFunctions, SolverConfig, solve

__all__ = [
    "TruncationPolicy",
    "TransitionQuery",
    "SpectralDiagnostics",
    "METHODS",
    "km_homogeneous",
    "km_row",
    "expr1_finite_sum",
    "expr1_row",
    "expr2_charlier",
    "expr2_row",
    "transition_row",
    "transition_probability",
    "best_method",
]

METHODS = ("expr1", "expr2", "km", "oracle", "best")
RANGE_SLACK = 1e-12
EXPR2_MIN_G3 = 1e-12

_LD = np.longdouble


@dataclass(frozen=True)
class TruncationPolicy:
    abs_tol: float = 1e-12
    consecutive_small: int = 10
    x_max_hard_cap: int = 100_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.consecutive_small > 0 and self.x_max_hard_cap > 0):
            raise DomainError("truncation policy fields must be positive")


@dataclass(frozen=True)
class TransitionQuery:
    n: int
    m: int
    t: float
    profile: RateProfile

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise DomainError("states must be nonnegative")
        if self.t < 0:
            raise DomainError("time must be nonnegative")


@dataclass(frozen=True)
class SpectralDiagnostics:
    alpha: float
    x_max: int
    remainder: float
    # sum of |terms|; the rounding error is roughly eps_longdouble times this
    abs_sum: float

    @property
    def error_estimate(self) -> float:
        return 64 * float(np.finfo(_LD).eps) * self.abs_sum


def _checked(p: float, slack: float = RANGE_SLACK) -> float:
    """Clip p into [0, 1]; values further out than ``slack`` mean the arithmetic broke down."""
    slack = max(slack, RANGE_SLACK)
    if not (-slack <= p <= 1 + slack):
        raise PrecisionLoss(f"probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def _spectral_row(n: int, m_max: int, alpha: float, log_decay0: float, log_decay1: float,
                  trunc: TruncationPolicy) -> tuple[np.ndarray, SpectralDiagnostics]:
    """(alpha^m/m!) sum_x C_m(x) C_n(x) w(x) exp(log_decay0 + log_decay1 x), m = 0..m_max."""
    a = _LD(alpha)
    K = max(n, m_max)
    log_pref = np.arange(m_max + 1, dtype=_LD) * np.log(a) - log_factorials(m_max, _LD)
    X = min(truncation_start(alpha, m_max, n), trunc.x_max_hard_cap)
    while True:
        T = charlier_table(K, X, alpha, dtype=_LD)
        x = np.arange(X + 1, dtype=_LD)
        log_wx = log_poisson_weights(X, alpha, _LD) + _LD(log_decay0) + _LD(log_decay1) * x
        Cn = T[n]
        with np.errstate(divide="ignore"):
            log_mag = (log_pref[:, None] + log_wx[None, :]
                       + np.log(np.abs(T[: m_max + 1])) + np.log(np.abs(Cn))[None, :])
        terms = np.sign(T[: m_max + 1]) * np.sign(Cn)[None, :] * np.exp(log_mag)
        tail = np.abs(terms[:, -trunc.consecutive_small:])
        if np.all(tail < trunc.abs_tol):
            break
        if X >= trunc.x_max_hard_cap:
            raise ResourceError(f"spectral sum not converged at x_max = {X}")
        X = min(2 * X, trunc.x_max_hard_cap)
    sums = neumaier_sum_rows(terms)
    diag = SpectralDiagnostics(
        alpha=float(alpha),
        x_max=X,
        remainder=float(tail.sum(axis=1).max()),
        abs_sum=float(np.abs(terms).sum(axis=1).max()),
    )
    slack = diag.error_estimate + diag.remainder
    return np.array([_checked(float(v), slack) for v in sums]), diag


def km_row(n: int, m_max: int, t: float, lam: float, mu: float,
           trunc: TruncationPolicy | None = None) -> tuple[np.ndarray, SpectralDiagnostics]:
    if not mu > 0:
        raise DomainError(f"spectral formula needs mu > 0, got {mu}; use expr1")
    if not lam > 0:
        raise DomainError(f"spectral formula needs lam > 0, got {lam}; use expr1")
    if t < 0:
        raise DomainError("time must be nonnegative")
    return _spectral_row(n, m_max, lam / mu, 0.0, -mu * t, trunc or TruncationPolicy())


def km_homogeneous(n: int, m: int, t: float, lam: float, mu: float,
                   trunc: TruncationPolicy | None = None) -> float:
    """Constant-rate transition probability from the Poisson-Charlier spectral sum."""
    row, _ = km_row(n, m, t, lam, mu, trunc)
    return float(row[m])


def expr1_row(n: int, m_max: int, g: GFunctions) -> np.ndarray:
    """Finite-sum transition probabilities for m = 0..m_max; all terms nonnegative."""
    if n < 0 or m_max < 0:
        raise DomainError("states must be nonnegative")
    if g.g2 < 0 or g.g3 < 0 or g.g4 > 0:
        raise DomainError(f"invalid g-functions {g.as_tuple()}")
    # log p = g4, log(1-p) = log g3 + g4
    log_1mp = math.log(g.g3) + g.g4 if g.g3 > 0 else -math.inf
    log_binom = [math.lgamma(n + 1) - math.lgamma(l + 1) - math.lgamma(n - l + 1) for l in range(n + 1)]
    out = np.empty(m_max + 1)
    for m in range(m_max + 1):
        terms = []
        for l in range(min(m, n) + 1):
            k = n - l
            logt = (log_binom[l] + l * g.g4 + (k * log_1mp if k else 0.0)
                    + g.g1 + xlogy(m - l, g.g2) - math.lgamma(m - l + 1))
            terms.append(math.exp(logt))
        out[m] = _checked(math.fsum(terms))
    return out


def expr1_finite_sum(n: int, m: int, g: GFunctions) -> float:
    return float(expr1_row(n, m, g)[m])


def expr2_row(n: int, m_max: int, g: GFunctions,
              trunc: TruncationPolicy | None = None) -> tuple[np.ndarray, SpectralDiagnostics]:
    if not g.g3 > 0:
        raise DegenerateSpectral(f"g3 = {g.g3} at t = {g.t}; use expr1")
    alpha = g.alpha_spectral
    # e^{g4 n} (g3+1)^{n-x}
    log_g3p1 = math.log1p(g.g3)
    return _spectral_row(n, m_max, alpha, g.g4 * n + n * log_g3p1, -log_g3p1, trunc or TruncationPolicy())


def expr2_charlier(n: int, m: int, g: GFunctions, trunc: TruncationPolicy | None = None) -> float:
    """Time-inhomogeneous Charlier spectral sum; DegenerateSpectral when g3 = 0 or g2 = 0."""
    row, _ = expr2_row(n, m, g, trunc)
    return float(row[m])


def best_method(g: GFunctions) -> str:
    return "expr2" if g.g3 > EXPR2_MIN_G3 and g.g2 > 0 else "expr1"


def transition_row(n: int, t: float, profile: RateProfile, method: str = "best", m_max: int = 50,
                   trunc: TruncationPolicy | None = None,
                   solver: SolverConfig | None = None) -> Distribution:
    """(P_{n->0}(t), ..., P_{n->m_max}(t)); ``leaked_mass`` is the mass above m_max."""
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}")
    if m_max < 0:
        raise DomainError("m_max must be nonnegative")
    profile.check_time(t)
    if method == "oracle":
        d = master_integrate(profile, n, t)
        probs = np.zeros(m_max + 1)
        k = min(m_max + 1, d.probs.size)
        probs[:k] = d.probs[:k]
    elif method == "km":
        if not profile.is_constant:
            raise DomainError("km needs constant rates")
        probs, _ = km_row(n, m_max, t, profile.lam.value, profile.mu.value, trunc)
    else:
        g = solve(profile, t, solver)
        if method == "best":
            method = best_method(g)
        if method == "expr1":
            probs = expr1_row(n, m_max, g)
        else:
            probs, _ = expr2_row(n, m_max, g, trunc)
    return Distribution(probs, 1.0 - neumaier_sum(probs), t)


def transition_probability(query: TransitionQuery, method: str = "best",
                           trunc: TruncationPolicy | None = None,
                           solver: SolverConfig | None = None) -> float:
    row = transition_row(query.n, query.t, query.profile, method, query.m, trunc, solver)
    return float(row.probs[query.m])
