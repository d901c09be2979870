"""Ground truth by brute force: the truncated master equation and Monte Carlo.

The forward equation integrated here follows directly from the transition
rates (birth at lam(t), death at mu(t) n):

    dP_n/dt = lam [P_{n-1} - P_n] + mu [(n+1) P_{n+1} - n P_n].

Births out of the top state are removed from the chain and accumulated in
``leaked_mass``, so probability is conserved exactly and the truncation error
is visible.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, IntegrationFailure, ResourceError
from .rates import RateProfile

__all__ = [
    "Distribution",
    "SimConfig",
    "SimResult",
    "MAX_STATES",
    "master_integrate",
    "mean_ode",
    "mc_simulate",
    "auto_cap",
]

MAX_STATES = 1_000_000
LEAK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Distribution:
    probs: np.ndarray
    leaked_mass: float
    t: float

    @property
    def total(self) -> float:
        return math.fsum(self.probs)

    def mean(self) -> float:
        return math.fsum(np.arange(self.probs.size) * self.probs)


def auto_cap(profile: RateProfile, n0: int, t: float) -> int:
    nu_bar = profile.cum_lam(t)
    return n0 + math.ceil(nu_bar + 12 * math.sqrt(nu_bar + n0) + 20)


def _master_rhs(profile: RateProfile, cap: int):
    n = np.arange(cap + 1, dtype=float)

    def f(s, y):
        lam, mu = profile.lam(s), profile.mu(s)
        p = y[:-1]
        dp = -(lam + mu * n) * p
        dp[1:] += lam * p[:-1]
        dp[:-1] += mu * n[1:] * p[1:]
        # births out of `cap` leave the chain and accumulate in the last slot
        return np.append(dp, lam * p[-1])

    return f


def _integrate_capped(profile, n0, t, cap, tol):
    y = np.zeros(cap + 2)
    y[n0] = 1.0
    if t == 0:
        return y
    f = _master_rhs(profile, cap)
    knots = [0.0, *profile.breakpoints(0.0, t), t]
    for a, b in zip(knots, knots[1:]):
        sol = integrate.solve_ivp(f, (a, b), y, method="DOP853", rtol=tol, atol=tol * 1e-3)
        if sol.status < 0:
            raise IntegrationFailure(f"master equation failed: {sol.message}", float(sol.t[-1]))
        y = sol.y[:, -1]
    return y


def master_integrate(profile: RateProfile, n0: int, t: float, cap: int | None = None,
                     tol: float = 1e-12) -> Distribution:
    """State distribution at time t started from a point mass at n0.

    With ``cap=None`` the state space starts at :func:`auto_cap` and doubles
    until the leaked mass is below 1e-12. Raises ResourceError past
    ``MAX_STATES`` states.
    """
    profile.check_time(t)
    if n0 < 0:
        raise DomainError(f"initial state must be nonnegative, got {n0}")
    auto = cap is None
    cap = auto_cap(profile, n0, t) if auto else int(cap)
    if n0 > cap:
        raise DomainError(f"initial state {n0} exceeds cap {cap}")
    while True:
        if cap + 1 > MAX_STATES:
            raise ResourceError(f"state space of {cap + 1} exceeds the limit of {MAX_STATES}")
        y = _integrate_capped(profile, n0, t, cap, tol)
        probs, leaked = y[:-1], float(y[-1])
        if not auto or leaked < LEAK_TOL:
            return Distribution(probs, leaked, t)
        cap *= 2


def mean_ode(profile: RateProfile, n0: float, t: float, tol: float = 1e-12) -> float:
    """E[n(t)] from d<n>/dt = lam - mu <n>, integrated numerically."""
    profile.check_time(t)
    if t == 0:
        return float(n0)
    knots = [0.0, *profile.breakpoints(0.0, t), t]
    y = np.array([float(n0)])
    for a, b in zip(knots, knots[1:]):
        sol = integrate.solve_ivp(
            lambda s, m: [profile.lam(s) - profile.mu(s) * m[0]], (a, b), y,
            method="DOP853", rtol=tol, atol=tol * 1e-3,
        )
        y = sol.y[:, -1]
    return float(y[0])


# Monte Carlo -----------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    n_traj: int
    seed: int = 0
    batch: int = 4096
    workers: int = 1

    def __post_init__(self):
        if self.n_traj < 1:
            raise DomainError("n_traj must be at least 1")
        if self.batch < 1 or self.workers < 1:
            raise DomainError("batch and workers must be positive")


@dataclass(frozen=True, eq=False)
class SimResult:
    dist: Distribution
    stderr: np.ndarray
    final_states: np.ndarray

    def mean(self) -> float:
        return float(self.final_states.mean())

    def mean_stderr(self) -> float:
        n = self.final_states.size
        return float(self.final_states.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf


class _Uniforms:
    """Buffered uniform draws from one trajectory's generator."""

    def __init__(self, rng: np.random.Generator, block: int = 64):
        self.rng = rng
        self.block = block
        self.buf = rng.random(block)
        self.i = 0

    def __call__(self) -> float:
        if self.i == self.block:
            self.buf = self.rng.random(self.block)
            self.i = 0
        u = self.buf[self.i]
        self.i += 1
        return u


def _trajectory(profile: RateProfile, n0: int, t: float, rng: np.random.Generator) -> int:
    lam, mu = profile.lam, profile.mu
    draw = _Uniforms(rng)
    n, s = n0, 0.0
    look = t / 8
    while s < t:
        # the bound over a window of length `look` is valid on any shorter window
        end = min(s + look, t)
        bound = lam.sup(s, end) + n * mu.sup(s, end)
        if bound > 0:
            end = min(end, s + 1.0 / bound)
            bound = lam.sup(s, end) + n * mu.sup(s, end)
        if bound == 0:
            # nothing can happen before `end` (e.g. lam = 0 and n = 0)
            s = end
            continue
        s_new = s - math.log(1.0 - draw()) / bound
        if s_new >= end:
            s = end
            continue
        s = s_new
        birth, death = lam(s), n * mu(s)
        u = draw() * bound
        if u < birth:
            n += 1
        elif u < birth + death:
            n -= 1
    return n


def _run_block(args) -> np.ndarray:
    profile, n0, t, seed, start, stop = args
    out = np.empty(stop - start, dtype=np.int64)
    for i in range(start, stop):
        ss = np.random.SeedSequence(seed, spawn_key=(i,))
        out[i - start] = _trajectory(profile, n0, t, np.random.Generator(np.random.Philox(ss)))
    return out


def mc_simulate(profile: RateProfile, n0: int, t: float, cfg: SimConfig) -> SimResult:
    """Empirical law of n(t) from exact trajectories simulated by thinning.

    Trajectory i draws from its own Philox stream keyed by (seed, i), so the
    output does not depend on ``cfg.workers`` or ``cfg.batch``.
    """
    profile.check_time(t)
    if n0 < 0:
        raise DomainError(f"initial state must be nonnegative, got {n0}")
    jobs = [
        (profile, n0, t, cfg.seed, a, min(a + cfg.batch, cfg.n_traj))
        for a in range(0, cfg.n_traj, cfg.batch)
    ]
    if cfg.workers == 1:
        blocks = [_run_block(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            blocks = list(pool.map(_run_block, jobs))
    finals = np.concatenate(blocks)
    counts = np.bincount(finals)
    probs = counts / cfg.n_traj
    stderr = np.sqrt(probs * (1 - probs) / cfg.n_traj)
    return SimResult(Distribution(probs, 0.0, t), stderr, finals)
