import math

import numpy as np
import pytest

from meanfield.config import Settings
from meanfield.errors import FluxNotConvergedError, ParameterError
from meanfield.radial_solver import (
    curvature,
    estimate_beta,
    evaluate,
    fd_residual,
    flux,
    flux_closure,
    node_radii,
    ode_residual,
    seed_radius,
    shoot,
)
from meanfield.schemas import ShootingConfig

LN8 = math.log(8.0)


def _oracle(r):
    return LN8 - 2.0 * np.log1p(r * r)


def test_oracle_profile_matches_closed_form(oracle_profile):
    r = np.linspace(0.0, 50.0, 2001)
    eta, _ = evaluate(oracle_profile, r)
    assert np.max(np.abs(eta - _oracle(r))) <= 1e-8


def test_oracle_value_at_two(oracle_profile):
    eta, _ = evaluate(oracle_profile, 2.0)
    assert float(eta) == pytest.approx(LN8 - 2.0 * math.log(5.0), abs=1e-8)


def test_oracle_beta_is_four(oracle_profile):
    assert oracle_profile.beta_estimate == pytest.approx(4.0, rel=1e-8)


def test_initial_conditions(profile_half):
    nodes = profile_half.nodes
    assert nodes.r[0] == 0.0
    assert nodes.y[0] == profile_half.alpha
    assert nodes.dy[0] == 0.0
    eta, deta = evaluate(profile_half, 0.0)
    assert float(eta) == pytest.approx(0.0, abs=1e-15)
    assert float(deta) == pytest.approx(0.0, abs=1e-12)


def test_profile_strictly_decreasing(profile_half):
    nodes = profile_half.nodes
    assert np.all(np.diff(nodes.y) < 0)
    assert np.all(nodes.dy[1:] < 0)


@pytest.mark.parametrize("gamma", [0.3, 0.5, 0.7])
def test_beta_exceeds_two_over_gamma(settings, gamma):
    profile = shoot(0.0, gamma, settings=settings)
    assert profile.beta_estimate > 2.0 / gamma


def test_evaluation_exact_at_nodes(profile_half):
    nodes = profile_half.nodes
    pick = np.flatnonzero((nodes.r > 0.1) & (nodes.r < 100.0))[::37]
    eta, deta = evaluate(profile_half, nodes.r[pick])
    np.testing.assert_allclose(eta, nodes.y[pick], rtol=1e-14, atol=1e-14)
    np.testing.assert_allclose(deta, nodes.dy[pick], rtol=1e-9, atol=1e-12)


def _log_uniform(settings, count=200, lo=1e-3, hi=50.0):
    rng = np.random.default_rng(settings.seed)
    return np.sort(np.exp(rng.uniform(math.log(lo), math.log(hi), count)))


def test_ode_residual_small(profile_half, settings):
    r = _log_uniform(settings)
    assert np.max(ode_residual(profile_half, r)) <= 10.0 * settings.rel_tol
    assert profile_half.diagnostics.max_error_estimate <= 1e-8


@pytest.mark.parametrize("alpha,gamma", [(0.0, 0.5), (5.0, 0.3), (-5.0, 0.7), (20.0, 0.5)])
def test_finite_difference_residual(settings, alpha, gamma):
    profile = shoot(alpha, gamma, settings=settings)
    assert np.max(fd_residual(profile, _log_uniform(settings))) <= 10.0 * settings.rel_tol


def test_finite_difference_residual_oracle(oracle_profile, settings):
    assert np.max(fd_residual(oracle_profile, _log_uniform(settings))) <= 10.0 * settings.rel_tol


def test_node_radii_layout():
    core = 2.0
    r, log_from = node_radii(core, 1e4, 40)
    step = math.log(10.0) / 40
    assert r[0] == 0.0 and r[-1] == 1e4
    assert log_from == core
    inner = r[r <= core]
    assert np.max(np.diff(inner)) <= core * step / 2.0 * (1 + 1e-12)
    outer = np.log(r[r >= core])
    assert np.max(np.diff(outer)) <= 1.5 * step
    assert np.min(np.diff(outer)) >= 0.5 * step


def test_node_radii_without_log_region():
    r, log_from = node_radii(5.0, 3.0, 40)
    assert log_from is None
    assert r[-1] == 3.0
    np.testing.assert_allclose(np.diff(r), r[1], rtol=1e-12)


def test_curvature_matches_equation_at_center(profile_half):
    # η''(0) = -f(α)/2
    assert float(curvature(profile_half, 0.0)) == pytest.approx(-1.0, rel=1e-8)


def test_flux_nondecreasing(profile_half):
    p = flux(profile_half)
    assert p[0] == 0.0
    assert np.all(np.diff(p) >= -1e-12 * p[-1])
    assert p[-1] < profile_half.beta_estimate


def test_estimate_beta_agrees_with_integration(profile_half, settings):
    assert estimate_beta(profile_half, settings) == pytest.approx(profile_half.beta_estimate, rel=1e-7)


def test_center_value_monotone_in_alpha(settings):
    a = shoot(-2.0, 0.5, settings=settings)
    b = shoot(2.0, 0.5, settings=settings)
    eta_a, _ = evaluate(a, 0.5)
    eta_b, _ = evaluate(b, 0.5)
    assert float(eta_b) > float(eta_a)


def test_evaluate_outside_range(profile_half):
    with pytest.raises(ParameterError):
        evaluate(profile_half, 10.0 * profile_half.r_max)
    with pytest.raises(ParameterError):
        evaluate(profile_half, -1.0)


def test_flux_closure_exact_for_single_term():
    cfg = ShootingConfig(alpha=LN8, gamma=0.5, a=1.0, b=0.0)
    # at r = 1 the oracle has η = ln 2 and -rη' = 2
    assert flux_closure(2.0, 0.0, math.log(2.0), cfg) == pytest.approx(4.0, rel=1e-12)


def test_seed_radius_shrinks_for_large_alpha(settings):
    small = seed_radius(ShootingConfig(alpha=0.0, gamma=0.5), settings)
    large = seed_radius(ShootingConfig(alpha=200.0, gamma=0.5), settings)
    assert small == settings.seed_radius
    assert large < 1e-40


def test_flux_not_converged_is_reported():
    strict = Settings(beta_stability=1e-300, far_field_limit=1e3)
    with pytest.raises(FluxNotConvergedError) as exc:
        shoot(0.0, 0.5, settings=strict, r_max=10.0)
    assert "residual" in exc.value.detail
    assert exc.value.detail["radius"] >= 1e3 * (1 - 1e-9)


def test_shooting_config_rejects_trivial_nonlinearity():
    with pytest.raises(ValueError):
        ShootingConfig(alpha=0.0, gamma=0.5, a=0.0, b=0.0)


def test_flux_closure_root_right_of_pole():
    # with w = 0.8 and p = 1 the pole sits at 4/w - p = 4 > p
    cfg = ShootingConfig(alpha=0.0, gamma=0.8, a=1.0, b=1.0)
    p, t, eta = 1.0, math.log(50.0), -12.0
    P = flux_closure(p, t, eta, cfg)
    assert P > 4.0
    terms = [(1.0, math.exp(2.0 * t + eta)), (0.8, math.exp(2.0 * t + 0.8 * eta))]
    g = P - p - sum(e / (w * (P + p) / 2.0 - 2.0) for w, e in terms)
    assert g == pytest.approx(0.0, abs=1e-9 * P)


def test_flux_closure_without_forcing_returns_flux():
    cfg = ShootingConfig(alpha=0.0, gamma=0.5, a=1.0, b=0.0)
    assert flux_closure(3.0, 0.0, -1e4, cfg) == 3.0


@pytest.mark.parametrize("alpha", [-40.0, -30.0])
def test_shoot_low_center_value(settings, alpha):
    profile = shoot(alpha, 0.8, settings=settings)
    assert math.isfinite(profile.beta_estimate)
    assert profile.beta_estimate > 2.0 / 0.8
