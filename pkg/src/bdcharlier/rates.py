"""Time-dependent rate functions lambda(t) and mu(t).

The rate family is closed: constant, piecewise constant, sinusoid and
exponential decay. Every kind knows its exact integral over an interval and
its exact supremum, which the thinning simulator relies on.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Any, ClassVar

from scipy import integrate

from .errors import DomainError

__all__ = [
    "RateSpec",
    "Constant",
    "PiecewiseConstant",
    "Sinusoid",
    "ExpDecay",
    "RateProfile",
    "eval_rate",
    "integrate_rate",
    "sup_rate",
    "rate_from_dict",
    "rate_to_dict",
    "profile_from_dict",
    "profile_to_dict",
]

QUAD_ABS_TOL = 1e-12


def _check_interval(t0: float, t1: float) -> None:
    if t0 < 0:
        raise DomainError(f"interval start must be nonnegative, got {t0}")
    if t1 < t0:
        raise DomainError(f"interval end {t1} precedes start {t0}")


class RateSpec:
    """Base class for a nonnegative rate function of time.

    Subclasses implement ``_value`` and ``sup``. ``integral`` falls back to
    adaptive quadrature, so a new kind works before its antiderivative is
    written down.
    """

    kind: ClassVar[str] = ""

    def _value(self, t: float) -> float:
        raise NotImplementedError

    def __call__(self, t: float) -> float:
        if t < 0:
            raise DomainError(f"rate evaluated at negative time {t}")
        return self._value(t)

    def integral(self, t0: float, t1: float) -> float:
        _check_interval(t0, t1)
        val, _ = integrate.quad(self._value, t0, t1, epsabs=QUAD_ABS_TOL, epsrel=0.0, limit=200)
        return val

    def sup(self, t0: float, t1: float) -> float:
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Times in (0, inf) where the rate is discontinuous."""
        return ()


@dataclass(frozen=True)
class Constant(RateSpec):
    value: float
    kind: ClassVar[str] = "constant"

    def __post_init__(self):
        if not self.value >= 0 or not math.isfinite(self.value):
            raise DomainError(f"constant rate must be finite and >= 0, got {self.value}")

    def _value(self, t):
        return self.value

    def integral(self, t0, t1):
        _check_interval(t0, t1)
        return self.value * (t1 - t0)

    def sup(self, t0, t1):
        _check_interval(t0, t1)
        return self.value


@dataclass(frozen=True)
class PiecewiseConstant(RateSpec):
    """Right-continuous step function: ``values[k]`` on ``[breaks[k], breaks[k+1])``.

    ``breaks[0]`` must be 0 and the last value extends to infinity.
    """

    breaks: tuple[float, ...]
    values: tuple[float, ...]
    kind: ClassVar[str] = "piecewise_constant"

    def __post_init__(self):
        object.__setattr__(self, "breaks", tuple(float(b) for b in self.breaks))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.breaks) == 0 or len(self.breaks) != len(self.values):
            raise DomainError("breakpoints and values must be nonempty and of equal length")
        if self.breaks[0] != 0.0:
            raise DomainError(f"first breakpoint must be 0, got {self.breaks[0]}")
        if any(b1 <= b0 for b0, b1 in zip(self.breaks, self.breaks[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        if any(not (v >= 0 and math.isfinite(v)) for v in self.values):
            raise DomainError("piecewise rate values must be finite and >= 0")

    def _segment(self, t: float) -> int:
        return bisect.bisect_right(self.breaks, t) - 1

    def _value(self, t):
        return self.values[self._segment(t)]

    def integral(self, t0, t1):
        _check_interval(t0, t1)
        total = 0.0
        ends = self.breaks[1:] + (math.inf,)
        for start, end, v in zip(self.breaks, ends, self.values):
            lo, hi = max(start, t0), min(end, t1)
            if hi > lo:
                total += v * (hi - lo)
        return total

    def sup(self, t0, t1):
        _check_interval(t0, t1)
        return max(self.values[self._segment(t0): self._segment(t1) + 1])

    @property
    def breakpoints(self):
        return self.breaks[1:]


@dataclass(frozen=True)
class Sinusoid(RateSpec):
    """``base + amp * sin(omega * t + phase)`` with ``base >= |amp|``."""

    base: float
    amp: float
    omega: float
    phase: float = 0.0
    kind: ClassVar[str] = "sinusoid"

    def __post_init__(self):
        vals = (self.base, self.amp, self.omega, self.phase)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("sinusoid parameters must be finite")
        if self.base < abs(self.amp):
            raise DomainError(f"sinusoid needs base >= |amp|, got base={self.base}, amp={self.amp}")

    def _value(self, t):
        return self.base + self.amp * math.sin(self.omega * t + self.phase)

    def integral(self, t0, t1):
        _check_interval(t0, t1)
        h = t1 - t0
        u = 0.5 * self.omega * h
        # cos(A) - cos(B) = -2 sin((A+B)/2) sin((A-B)/2); writing sin(u)/u keeps
        # short intervals free of cancellation and tiny omega free of overflow
        sinc = math.sin(u) / u if u != 0 else 1.0
        mid = math.sin(0.5 * self.omega * (t1 + t0) + self.phase)
        return h * (self.base + self.amp * mid * sinc)

    def sup(self, t0, t1):
        _check_interval(t0, t1)
        th0, th1 = sorted((self.omega * t0 + self.phase, self.omega * t1 + self.phase))
        if self.amp >= 0:
            return self.base + self.amp * _max_sin(th0, th1)
        return self.base + self.amp * _min_sin(th0, th1)


def _max_sin(th0: float, th1: float) -> float:
    # first crest pi/2 + 2 pi k at or after th0
    k = math.ceil((th0 - 0.5 * math.pi) / (2 * math.pi))
    if 0.5 * math.pi + 2 * math.pi * k <= th1:
        return 1.0
    return max(math.sin(th0), math.sin(th1))


def _min_sin(th0: float, th1: float) -> float:
    return -_max_sin(th0 + math.pi, th1 + math.pi)


@dataclass(frozen=True)
class ExpDecay(RateSpec):
    """``a * exp(-c t) + offset``, all three parameters nonnegative."""

    a: float
    c: float
    offset: float = 0.0
    kind: ClassVar[str] = "exp_decay"

    def __post_init__(self):
        for name in ("a", "c", "offset"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"exp_decay parameter {name} must be finite and >= 0, got {v}")

    def _value(self, t):
        return self.a * math.exp(-self.c * t) + self.offset

    def integral(self, t0, t1):
        _check_interval(t0, t1)
        dt = t1 - t0
        if self.c == 0.0:
            return (self.a + self.offset) * dt
        return self.a * math.exp(-self.c * t0) * -math.expm1(-self.c * dt) / self.c + self.offset * dt

    def sup(self, t0, t1):
        _check_interval(t0, t1)
        return self._value(t0)


def eval_rate(spec: RateSpec, t: float) -> float:
    return spec(t)


def integrate_rate(spec: RateSpec, t0: float, t1: float) -> float:
    return spec.integral(t0, t1)


def sup_rate(spec: RateSpec, t0: float, t1: float) -> float:
    return spec.sup(t0, t1)


@dataclass(frozen=True)
class RateProfile:
    """Birth rate ``lam``, per-individual death rate ``mu``, valid on ``[0, horizon]``."""

    lam: RateSpec
    mu: RateSpec
    horizon: float

    def __post_init__(self):
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise DomainError(f"horizon must be finite and positive, got {self.horizon}")

    def check_time(self, t: float) -> None:
        if t < 0 or t > self.horizon:
            raise DomainError(f"time {t} outside [0, {self.horizon}]")

    @property
    def is_constant(self) -> bool:
        return isinstance(self.lam, Constant) and isinstance(self.mu, Constant)

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        """Sorted discontinuities of either rate strictly inside (t0, t1)."""
        pts = set(self.lam.breakpoints) | set(self.mu.breakpoints)
        return sorted(p for p in pts if t0 < p < t1)

    def cum_mu(self, t: float) -> float:
        return self.mu.integral(0.0, t)

    def cum_lam(self, t: float) -> float:
        return self.lam.integral(0.0, t)


# JSON schema ----------------------------------------------------------------

_KEYS = {
    "constant": ("value",),
    "piecewise_constant": ("breakpoints", "values"),
    "sinusoid": ("base", "amp", "omega", "phase"),
    "exp_decay": ("a", "c", "offset"),
}
_OPTIONAL = {"sinusoid": {"phase"}, "exp_decay": {"offset"}}


def rate_from_dict(d: dict[str, Any], where: str = "rate") -> RateSpec:
    """Build a rate from its JSON object form; unknown or missing keys raise."""
    if not isinstance(d, dict):
        raise DomainError(f"{where}: expected an object, got {type(d).__name__}")
    kind = d.get("kind")
    if kind not in _KEYS:
        raise DomainError(f"{where}.kind: unknown rate kind {kind!r}")
    allowed = set(_KEYS[kind])
    extra = set(d) - allowed - {"kind"}
    if extra:
        raise DomainError(f"{where}.{sorted(extra)[0]}: unknown key for kind {kind!r}")
    missing = allowed - set(d) - _OPTIONAL.get(kind, set())
    if missing:
        raise DomainError(f"{where}.{sorted(missing)[0]}: missing key for kind {kind!r}")
    def num(key, default=None):
        v = d.get(key, default)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DomainError(f"{where}.{key}: expected a number, got {v!r}")
        return float(v)

    def nums(key):
        v = d[key]
        if not isinstance(v, list) or any(isinstance(e, bool) or not isinstance(e, (int, float)) for e in v):
            raise DomainError(f"{where}.{key}: expected a list of numbers")
        return tuple(float(e) for e in v)

    try:
        if kind == "constant":
            return Constant(num("value"))
        if kind == "piecewise_constant":
            return PiecewiseConstant(nums("breakpoints"), nums("values"))
        if kind == "sinusoid":
            return Sinusoid(num("base"), num("amp"), num("omega"), num("phase", 0.0))
        return ExpDecay(num("a"), num("c"), num("offset", 0.0))
    except DomainError as exc:
        if str(exc).startswith(where):
            raise
        raise DomainError(f"{where}: {exc}") from None


def rate_to_dict(spec: RateSpec) -> dict[str, Any]:
    if isinstance(spec, Constant):
        return {"kind": "constant", "value": spec.value}
    if isinstance(spec, PiecewiseConstant):
        return {"kind": "piecewise_constant", "breakpoints": list(spec.breaks), "values": list(spec.values)}
    if isinstance(spec, Sinusoid):
        return {"kind": "sinusoid", "base": spec.base, "amp": spec.amp, "omega": spec.omega, "phase": spec.phase}
    if isinstance(spec, ExpDecay):
        return {"kind": "exp_decay", "a": spec.a, "c": spec.c, "offset": spec.offset}
    raise TypeError(f"no JSON form for {type(spec).__name__}")


def profile_from_dict(d: dict[str, Any], where: str = "config") -> RateProfile:
    if not isinstance(d, dict):
        raise DomainError(f"{where}: expected an object")
    extra = set(d) - {"lambda", "mu", "horizon"}
    if extra:
        raise DomainError(f"{where}.{sorted(extra)[0]}: unknown key")
    for key in ("lambda", "mu", "horizon"):
        if key not in d:
            raise DomainError(f"{where}.{key}: missing key")
    horizon = d["horizon"]
    if isinstance(horizon, bool) or not isinstance(horizon, (int, float)) or not math.isfinite(horizon) or horizon <= 0:
        raise DomainError(f"{where}.horizon: must be a finite positive number")
    return RateProfile(
        rate_from_dict(d["lambda"], f"{where}.lambda"),
        rate_from_dict(d["mu"], f"{where}.mu"),
        float(horizon),
    )


def profile_to_dict(profile: RateProfile) -> dict[str, Any]:
    return {"lambda": rate_to_dict(profile.lam), "mu": rate_to_dict(profile.mu), "horizon": profile.horizon}
