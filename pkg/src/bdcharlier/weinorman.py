"""Wei-Norman functions g1..g4 for the immigration-death generator.

The evolution operator is factorised as

    U(t) = exp(g1 I) exp(g2 a+) exp(g3 a) exp(g4 a+a),   g_l(0) = 0,

which turns the master equation into four scalar ODEs:

    g4' = -mu
    g3' = mu - g3 g4'
    g2' = lam + g2 g4'
    g1' = -lam + g2 g3' + g2 g3 g4'

Two independent routes are provided. ``solve_ode`` integrates the raw system
(g1 included, so g1 = -g2 is checked rather than assumed). ``solve_closed``
uses the integrated forms, with M(t) the integral of mu over [0, t]:

    g4 = -M,   g3 = e^M - 1,   g2 = int_0^t lam(s) e^{-(M(t) - M(s))} ds,   g1 = -g2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DegenerateSpectral, DomainError, IntegrationFailure
from .rates import RateProfile

__all__ = ["GFunctions", "SolverConfig", "solve_closed", "solve_ode", "solve", "derived_params"]


@dataclass(frozen=True)
class GFunctions:
    t: float
    g1: float
    g2: float
    g3: float
    g4: float

    @property
    def p(self) -> float:
        """Probability that a particle present at time 0 is still alive."""
        return math.exp(self.g4)

    @property
    def nu(self) -> float:
        """Poisson mean of the surviving immigrants."""
        return self.g2

    @property
    def alpha_spectral(self) -> float:
        if self.g3 == 0 or self.g2 == 0:
            raise DegenerateSpectral(
                f"spectral parameter undefined at t={self.t} (g2={self.g2}, g3={self.g3}); use expr1"
            )
        return self.g2 * (self.g3 + 1.0) / self.g3

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.g1, self.g2, self.g3, self.g4)


@dataclass(frozen=True)
class SolverConfig:
    method: str = "closed_form"
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_step: float = math.inf

    def __post_init__(self):
        if self.method not in ("closed_form", "ode"):
            raise DomainError(f"unknown solver method {self.method!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.max_step > 0):
            raise DomainError("solver tolerances and max_step must be positive")


def _segments(profile: RateProfile, t: float) -> list[float]:
    return [0.0, *profile.breakpoints(0.0, t), t]


def solve_closed(profile: RateProfile, t: float, cfg: SolverConfig | None = None) -> GFunctions:
    cfg = cfg or SolverConfig()
    profile.check_time(t)
    if t == 0:
        return GFunctions(0.0, 0.0, 0.0, 0.0, 0.0)
    M = profile.cum_mu(t)
    g4 = -M
    g3 = math.expm1(M)
    if profile.is_constant:
        lam, mu = profile.lam.value, profile.mu.value
        g2 = lam * t if mu == 0 else lam / mu * -math.expm1(-mu * t)
    else:
        # e^{-(M(t) - M(s))} is at most 1, so the integrand stays bounded by lam
        def integrand(s):
            return profile.lam(s) * math.exp(-profile.mu.integral(s, t))

        knots = _segments(profile, t)
        g2 = 0.0
        for a, b in zip(knots, knots[1:]):
            val, _ = integrate.quad(integrand, a, b, epsabs=cfg.abs_tol, epsrel=0.0, limit=200)
            g2 += val
    return GFunctions(t, -g2, g2, g3, g4)


def _rhs(profile: RateProfile):
    def f(s, g):
        lam, mu = profile.lam(s), profile.mu(s)
        _, g2, g3, _ = g
        d4 = -mu
        d3 = mu - g3 * d4
        d2 = lam + g2 * d4
        d1 = -lam + g2 * d3 + g2 * g3 * d4
        return [d1, d2, d3, d4]

    return f


def solve_ode(profile: RateProfile, t: float, cfg: SolverConfig | None = None) -> GFunctions:
    """Integrate the raw Wei-Norman system with an adaptive embedded RK pair (DOP853).

    Integration restarts at every rate discontinuity.
    """
    cfg = cfg or SolverConfig(method="ode")
    profile.check_time(t)
    g = np.zeros(4)
    if t == 0:
        return GFunctions(0.0, 0.0, 0.0, 0.0, 0.0)
    f = _rhs(profile)
    knots = _segments(profile, t)
    for a, b in zip(knots, knots[1:]):
        sol = integrate.solve_ivp(
            f, (a, b), g, method="DOP853", rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step
        )
        if sol.status < 0:
            raise IntegrationFailure(f"Wei-Norman integration failed: {sol.message}", float(sol.t[-1]))
        g = sol.y[:, -1]
    return GFunctions(t, *(float(v) for v in g))


def solve(profile: RateProfile, t: float, cfg: SolverConfig | None = None) -> GFunctions:
    cfg = cfg or SolverConfig()
    if cfg.method == "ode":
        return solve_ode(profile, t, cfg)
    return solve_closed(profile, t, cfg)


def derived_params(g: GFunctions) -> dict[str, float]:
    """p, nu and the spectral alpha; raises DegenerateSpectral when alpha is undefined."""
    return {"p": g.p, "nu": g.nu, "alpha_spectral": g.alpha_spectral}
