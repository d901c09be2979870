import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdcharlier.errors import DegenerateSpectral, DomainError, IntegrationFailure
from bdcharlier.rates import Constant, RateProfile, RateSpec
from bdcharlier.weinorman import GFunctions, SolverConfig, derived_params, solve, solve_closed, solve_ode

TIMES = [0.05, 0.5, 1.5, 4.0]


def test_zero_time_is_identity(profile):
    for solver in (solve_closed, solve_ode):
        assert solver(profile, 0.0).as_tuple() == (0.0, 0.0, 0.0, 0.0)


def test_constant_rates_example():
    g = solve_closed(RateProfile(Constant(1.0), Constant(0.5), 10.0), 2.0)
    assert g.g4 == pytest.approx(-1.0, abs=1e-15)
    assert g.g3 == pytest.approx(math.e - 1, rel=1e-15)
    assert g.g2 == pytest.approx(1.2642411176571153, rel=1e-14)
    assert g.g1 == -g.g2
    assert g.alpha_spectral == pytest.approx(2.0, rel=1e-14)


def test_pure_immigration():
    g = solve_closed(RateProfile(Constant(1.5), Constant(0.0), 10.0), 2.0)
    assert (g.g2, g.g3, g.g4) == (3.0, 0.0, 0.0)
    with pytest.raises(DegenerateSpectral):
        g.alpha_spectral


def test_alpha_degenerate_at_zero():
    with pytest.raises(DegenerateSpectral, match="expr1"):
        GFunctions(0.0, 0.0, 0.0, 0.0, 0.0).alpha_spectral


@pytest.mark.parametrize("t", TIMES)
def test_ode_agrees_with_closed_form(profile, t):
    a = solve_closed(profile, t)
    b = solve_ode(profile, t, SolverConfig(method="ode"))
    for u, v in zip(a.as_tuple(), b.as_tuple()):
        assert u == pytest.approx(v, abs=1e-9)


@pytest.mark.parametrize("t", TIMES)
def test_ode_invariants(profile, t):
    cfg = SolverConfig(method="ode")
    g = solve_ode(profile, t, cfg)
    assert abs(g.g1 + g.g2) <= 10 * cfg.abs_tol * max(1.0, abs(g.g2))
    assert abs(g.g3 - math.expm1(-g.g4)) <= 10 * cfg.abs_tol * max(1.0, abs(g.g3))
    assert g.g4 == pytest.approx(-profile.cum_mu(t), abs=10 * cfg.abs_tol)


def test_monotonicity(profile):
    gs = [solve_closed(profile, t) for t in (0.0, 0.3, 0.9, 2.0, 5.0)]
    for a, b in zip(gs, gs[1:]):
        assert b.g4 <= a.g4
        assert b.g3 >= a.g3
        assert b.g2 >= 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.01, 3.0), st.floats(0.01, 8.0))
def test_closed_form_constant_rates(lam, mu, t):
    g = solve_closed(RateProfile(Constant(lam), Constant(mu), 10.0), t)
    assert g.p == pytest.approx(math.exp(-mu * t), rel=1e-13)
    assert g.nu == pytest.approx(lam / mu * (1 - math.exp(-mu * t)), rel=1e-12)
    assert g.alpha_spectral == pytest.approx(lam / mu, rel=1e-10)


def test_derived_params(constant_profile):
    d = derived_params(solve(constant_profile, 2.0))
    assert d["p"] == pytest.approx(math.exp(-1))
    assert d["alpha_spectral"] == pytest.approx(2.0)


def test_solve_dispatch(profile):
    a = solve(profile, 1.0)
    b = solve(profile, 1.0, SolverConfig(method="ode"))
    assert a.g2 == pytest.approx(b.g2, abs=1e-9)


def test_bad_solver_config():
    with pytest.raises(DomainError):
        SolverConfig(method="euler")
    with pytest.raises(DomainError):
        SolverConfig(abs_tol=0)


def test_time_outside_horizon(constant_profile):
    with pytest.raises(DomainError):
        solve_closed(constant_profile, 11.0)
    with pytest.raises(DomainError):
        solve_ode(constant_profile, -1.0)


class _Blowup(RateSpec):
    """Finite before t = 0.5, infinite afterwards."""

    def _value(self, t):
        return 1.0 if t <= 0.5 else math.inf

    def sup(self, t0, t1):
        return math.inf


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_integration_failure_reports_time():
    prof = RateProfile(_Blowup(), Constant(1.0), 10.0)
    with pytest.raises(IntegrationFailure) as exc:
        solve_ode(prof, 1.0)
    assert exc.value.t_reached == pytest.approx(0.5)
