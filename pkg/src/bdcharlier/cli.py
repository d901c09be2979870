"""Command-line front end.

Exit codes: 0 success, 1 configuration or input error, 2 method not defined
for the input (degenerate spectral parameter), 3 numerical failure or a
failed validation.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any

import numpy as np

from . import charlier, oracle, transition, weinorman
from .errors import DegenerateSpectral, DomainError, IntegrationFailure, PrecisionLoss, ResourceError
from .rates import RateProfile, profile_from_dict

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def fmt(v: float) -> str:
    """17 significant digits, lowercase scientific."""
    return f"{float(v):.16e}"


def dump_json(obj: Any) -> str:
    """JSON with every float in :func:`fmt` form, so output is byte-stable."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return fmt(v) if math.isfinite(v) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {dump_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dump_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def csv_text(header: str, rows) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else str(c) if isinstance(c, (int, np.integer)) else fmt(c)
                              for c in row))
    return "\n".join(lines) + "\n"


def default_tol() -> float:
    raw = os.environ.get("BD_DEFAULT_TOL")
    if raw is None:
        return 1e-12
    try:
        tol = float(raw)
    except ValueError:
        raise ConfigError(f"BD_DEFAULT_TOL: not a number: {raw!r}") from None
    if not tol > 0:
        raise ConfigError("BD_DEFAULT_TOL: must be positive")
    return tol


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: malformed JSON in {path}: {exc}") from None


def load_profile(path: str) -> RateProfile:
    try:
        return profile_from_dict(load_json(path))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def _trunc(args) -> transition.TruncationPolicy:
    tol = args.tol if getattr(args, "tol", None) is not None else default_tol()
    return transition.TruncationPolicy(abs_tol=tol)


def _solver(args) -> weinorman.SolverConfig:
    return weinorman.SolverConfig(method=args.solver)


def _gdict(g: weinorman.GFunctions) -> dict[str, float]:
    return {"t": g.t, "g1": g.g1, "g2": g.g2, "g3": g.g3, "g4": g.g4}


# commands ---------------------------------------------------------------------

def cmd_transition(args) -> str:
    profile = load_profile(args.config)
    n, m, t = args.n, args.m, args.t
    g = weinorman.solve(profile, t, _solver(args))
    try:
        alpha = g.alpha_spectral
    except DegenerateSpectral:
        alpha = None
    method = transition.best_method(g) if args.method == "best" else args.method
    trunc = _trunc(args)
    diag: dict[str, Any] | None = None
    if method == "expr1":
        prob = transition.expr1_finite_sum(n, m, g)
    elif method == "expr2":
        row, d = transition.expr2_row(n, m, g, trunc)
        prob = row[m]
        diag = {"x_max": d.x_max, "remainder_estimate": d.remainder, "rounding_error_estimate": d.error_estimate}
    elif method == "km":
        if not profile.is_constant:
            raise DomainError("--method km needs constant rates")
        row, d = transition.km_row(n, m, t, profile.lam.value, profile.mu.value, trunc)
        prob = row[m]
        diag = {"x_max": d.x_max, "remainder_estimate": d.remainder, "rounding_error_estimate": d.error_estimate}
    else:
        dist = oracle.master_integrate(profile, n, t)
        prob = dist.probs[m] if m < dist.probs.size else 0.0
        diag = {"cap": int(dist.probs.size - 1), "leaked_mass": dist.leaked_mass}
    out = {
        "n": n, "m": m, "t": t,
        "probability": float(prob),
        "method": method,
        "g_functions": _gdict(g),
        "alpha_spectral": alpha,
        "truncation_diagnostics": diag,
    }
    return dump_json(out) + "\n"


def cmd_matrix(args) -> str:
    profile = load_profile(args.config)
    dist = transition.transition_row(args.n, args.t, profile, args.method, args.m_max, _trunc(args), _solver(args))
    return csv_text("m,probability", ((m, p) for m, p in enumerate(dist.probs)))


def parse_grid(spec: str) -> list[float]:
    try:
        a, b, h = (float(v) for v in spec.split(":"))
    except ValueError:
        raise ConfigError(f"--t-grid: expected start:stop:step, got {spec!r}") from None
    if not (h > 0 and b >= a >= 0):
        raise ConfigError("--t-grid: need 0 <= start <= stop and step > 0")
    count = int(math.floor((b - a) / h + 1e-9)) + 1
    return [a + i * h for i in range(count)]


def cmd_gfuncs(args) -> str:
    profile = load_profile(args.config)
    cfg = _solver(args)
    rows = []
    for t in parse_grid(args.t_grid):
        g = weinorman.solve(profile, t, cfg)
        try:
            alpha = fmt(g.alpha_spectral)
        except DegenerateSpectral:
            alpha = ""
        rows.append((t, g.g1, g.g2, g.g3, g.g4, g.p, g.nu, alpha))
    return csv_text("t,g1,g2,g3,g4,p,nu,alpha", rows)


def cmd_charlier(args) -> str:
    if args.alpha == 0:
        raise ConfigError("--alpha: must be nonzero")
    rows = ((n, x, charlier.charlier_eval(n, x, args.alpha))
            for n in range(args.n_max + 1) for x in range(args.x_max + 1))
    return csv_text("n,x,value", rows)


def cmd_oracle(args) -> str:
    profile = load_profile(args.config)
    dist = oracle.master_integrate(profile, args.n0, args.t, cap=args.cap, tol=args.tol or 1e-12)
    return csv_text("state,probability", enumerate(dist.probs))


def cmd_simulate(args) -> str:
    profile = load_profile(args.config)
    cfg = oracle.SimConfig(args.n_traj, args.seed, args.batch, args.workers)
    res = oracle.mc_simulate(profile, args.n0, args.t, cfg)
    return csv_text("state,prob,stderr", ((k, p, s) for k, (p, s) in enumerate(zip(res.dist.probs, res.stderr))))


def _validate_profiles(raw) -> list[tuple[str, RateProfile]]:
    try:
        if isinstance(raw, dict) and "profiles" in raw:
            extra = set(raw) - {"profiles"}
            if extra:
                raise DomainError(f"config.{sorted(extra)[0]}: unknown key")
            items = raw["profiles"]
            if not isinstance(items, list) or not items:
                raise DomainError("config.profiles: expected a nonempty list")
            return [(f"profile{i}", profile_from_dict(p, f"config.profiles[{i}]")) for i, p in enumerate(items)]
        return [("profile0", profile_from_dict(raw))]
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def cmd_validate(args) -> tuple[str, int]:
    profiles = _validate_profiles(load_json(args.config))
    try:
        times = [float(v) for v in args.times.split(",")]
    except ValueError:
        raise ConfigError(f"--times: expected comma-separated numbers, got {args.times!r}") from None
    N = args.n_max
    trunc = transition.TruncationPolicy(abs_tol=default_tol())
    rows, ok = [], True
    for name, profile in profiles:
        for t in times:
            results: dict[str, Any] = {}
            try:
                g = weinorman.solve(profile, t, _solver(args))
                results["expr1"] = np.array([transition.expr1_row(n, N, g) for n in range(N + 1)])
                results["oracle"] = np.array(
                    [np.pad(oracle.master_integrate(profile, n, t).probs, (0, N + 1))[: N + 1] for n in range(N + 1)]
                )
                if g.g3 > 0 and g.g2 > 0:
                    results["expr2"] = np.array([transition.expr2_row(n, N, g, trunc)[0] for n in range(N + 1)])
                if profile.is_constant and profile.lam.value > 0 and profile.mu.value > 0:
                    lam, mu = profile.lam.value, profile.mu.value
                    results["km"] = np.array([transition.km_row(n, N, t, lam, mu, trunc)[0] for n in range(N + 1)])
            except (DomainError, ArithmeticError, RuntimeError) as exc:
                rows.append((name, t, "error", math.nan, args.tol, f"FAIL: {type(exc).__name__}: {exc}"))
                ok = False
                continue
            for a, b in (("expr1", "expr2"), ("expr1", "oracle"), ("expr2", "km")):
                if a in results and b in results:
                    diff = float(np.abs(results[a] - results[b]).max())
                    good = diff <= args.tol
                    ok &= good
                    rows.append((name, t, f"{a}-{b}", diff, args.tol, "ok" if good else "FAIL"))
    text = csv_text("profile,t,pair,max_abs_diff,tol,status",
                    ((r[0], fmt(r[1]), *r[2:]) for r in rows))
    return text, EXIT_OK if ok else EXIT_NUMERIC


# parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bdcharlier", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("--config", required=True, help="JSON file {lambda, mu, horizon}")

    def with_solver(sp):
        sp.add_argument("--solver", choices=["closed_form", "ode"], default="closed_form")

    def with_tol(sp):
        sp.add_argument("--tol", type=float, default=None,
                        help="spectral truncation tolerance (default: $BD_DEFAULT_TOL or 1e-12)")

    sp = sub.add_parser("transition", help="one transition probability, as JSON")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--method", choices=transition.METHODS, default="best")
    with_config(sp), with_solver(sp), with_tol(sp)

    sp = sub.add_parser("matrix", help="row P_{n->m}(t), m = 0..m_max, as CSV")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--m-max", type=int, required=True)
    sp.add_argument("--method", choices=transition.METHODS, default="best")
    with_config(sp), with_solver(sp), with_tol(sp)

    sp = sub.add_parser("gfuncs", help="Wei-Norman functions on a time grid, as CSV")
    sp.add_argument("--t-grid", required=True, help="start:stop:step, stop included")
    with_config(sp), with_solver(sp)

    sp = sub.add_parser("charlier", help="table of C_n(x; alpha), as CSV")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--x-max", type=int, required=True)

    sp = sub.add_parser("oracle", help="master-equation distribution, as CSV")
    sp.add_argument("--n0", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--cap", type=int, default=None)
    sp.add_argument("--tol", type=float, default=None)
    with_config(sp)

    sp = sub.add_parser("simulate", help="Monte Carlo distribution by thinning, as CSV")
    sp.add_argument("--n0", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--n-traj", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--batch", type=int, default=4096)
    sp.add_argument("--workers", type=int, default=1)
    with_config(sp)

    sp = sub.add_parser("validate", help="cross-check expr1, expr2, km and the master equation")
    sp.add_argument("--times", default="0.5,1.5")
    sp.add_argument("--n-max", type=int, default=15)
    sp.add_argument("--tol", type=float, default=1e-8, help="max allowed discrepancy between methods")
    with_config(sp), with_solver(sp)
    return p


COMMANDS = {
    "transition": cmd_transition,
    "matrix": cmd_matrix,
    "gfuncs": cmd_gfuncs,
    "charlier": cmd_charlier,
    "oracle": cmd_oracle,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    code = EXIT_OK
    try:
        result = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateSpectral as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationFailure, PrecisionLoss, ResourceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if isinstance(result, tuple):
        result, code = result
    sys.stdout.write(result)
    return code
