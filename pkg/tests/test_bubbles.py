import math

import numpy as np
import pytest
from pydantic import ValidationError

from meanfield import bubbles
from meanfield.errors import InfeasibleError, ParameterError
from meanfield.params import critical_lambda_two_species
from meanfield.schemas import SpeciesParams

MIXED = SpeciesParams(tau=0.5, gamma=0.8)
PERTURBATIVE = SpeciesParams(tau=0.5, gamma=0.25)


def test_bubble_boundary_and_center():
    assert float(bubbles.pu_eval(0.3, 1.0)) == pytest.approx(0.0, abs=1e-15)
    assert float(bubbles.pu_eval(1.0, 0.0)) == pytest.approx(2.0 * math.log(2.0), rel=1e-15)
    r = np.linspace(0.0, 1.0, 11)
    assert np.all(np.diff(bubbles.pu_eval(0.1, r)) < 0)


def test_bubble_solves_liouville():
    r = np.linspace(0.02, 1.0, 50)
    for delta in (1.0, 0.1, 0.01):
        assert np.max(bubbles.pu_laplacian_residual(delta, r)) <= 1e-10


def test_bubble_domain():
    with pytest.raises(ValidationError):
        bubbles.pu_eval(0.0, 0.5)
    with pytest.raises(ValidationError):
        bubbles.gradient_energy(1.5)


def test_gradient_energy_unit_delta():
    assert bubbles.gradient_energy(1.0) == pytest.approx(16.0 * math.pi * (math.log(2.0) - 0.5), rel=1e-14)
    assert bubbles.gradient_energy(1.0) == pytest.approx(9.708, abs=1e-3)


@pytest.mark.parametrize("delta", [1.0, 0.1, 0.01])
def test_gradient_energy_matches_quadrature(delta):
    closed = bubbles.gradient_energy(delta)
    assert closed == pytest.approx(bubbles.gradient_energy_quadrature(delta), rel=1e-8)


@pytest.mark.parametrize("delta", [1.0, 0.1, 0.01])
@pytest.mark.parametrize("a", [0.25, 0.5, 0.75, 1.0])
def test_exp_integral_matches_quadrature(delta, a):
    closed = bubbles.exp_integral(delta, a)
    assert closed == pytest.approx(bubbles.exp_integral_quadrature(delta, a), rel=1e-8)


def test_exp_integral_exact_values():
    d = 0.01
    assert bubbles.exp_integral(0.1, 1.0) == pytest.approx(math.pi * (1.0 + d) / d, rel=1e-12)
    assert bubbles.exp_integral(0.1, 0.5) == pytest.approx(math.pi * (1.0 + d) * math.log1p(1.0 / d), rel=1e-12)


def test_exp_integral_regimes():
    tiny = 2.0 ** -20
    ratio = bubbles.log_exp_integral(tiny, 1.0) / math.log(1.0 / tiny ** 2)
    assert ratio == pytest.approx(1.0, abs=0.05)
    half = bubbles.exp_integral(tiny, 0.5) / (math.pi * math.log(1.0 / tiny ** 2))
    assert half == pytest.approx(1.0, abs=1e-6)
    quarter = bubbles.exp_integral(1e-2, 0.25) / bubbles.exp_integral(1e-4, 0.25)
    assert abs(quarter - 1.0) < 0.01


def test_log_exp_integral_large_exponent_stays_finite():
    value = bubbles.log_exp_integral(1e-150, 3.0)
    assert math.isfinite(value)
    assert value > 1000.0


def test_log_exp_integral_rejects_nonpositive_weight():
    with pytest.raises(ParameterError):
        bubbles.log_exp_integral(0.5, 0.0)


def test_t_gamma_case1():
    bar = critical_lambda_two_species(MIXED).value
    tg = bubbles.t_gamma(MIXED, 1.05 * bar)
    assert tg.case == 1
    assert tg.t_minus < tg.value < tg.t_plus
    assert MIXED.gamma * tg.value > 0.5
    assert bubbles.predicted_slope(MIXED, 1.05 * bar, tg) < 0.0


def test_t_gamma_case2():
    bar = critical_lambda_two_species(PERTURBATIVE).value
    tg = bubbles.t_gamma(PERTURBATIVE, 1.05 * bar)
    assert tg.case == 2
    assert 0.5 < tg.value < 0.5 / PERTURBATIVE.gamma
    assert bubbles.predicted_slope(PERTURBATIVE, 1.05 * bar, tg) < 0.0


@pytest.mark.parametrize("tau", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("gamma", [0.2, 0.4, 0.6, 0.8])
def test_t_gamma_feasibility_flips_at_critical(tau, gamma):
    params = SpeciesParams(tau=tau, gamma=gamma)
    bar = critical_lambda_two_species(params).value
    with pytest.raises(InfeasibleError):
        bubbles.t_gamma(params, bar)
    assert bubbles.t_gamma(params, 1.01 * bar).value > 0.5


def test_case_preconditions():
    with pytest.raises(ParameterError):
        bubbles.t_gamma_case1(SpeciesParams(tau=0.5, gamma=0.3), 100.0)
    with pytest.raises(ParameterError):
        bubbles.t_gamma_case2(SpeciesParams(tau=0.5, gamma=0.6), 100.0)


def test_functional_on_bubble_uses_closed_forms():
    lam, t, delta = 40.0, 0.7, 0.2
    expected = (
        0.5 * t * t * bubbles.gradient_energy(delta)
        - lam * MIXED.tau * math.log(bubbles.exp_integral_quadrature(delta, t))
        - lam * (1 - MIXED.tau) * math.log(bubbles.exp_integral_quadrature(delta, MIXED.gamma * t))
    )
    assert bubbles.functional_on_bubble(MIXED, lam, t, delta) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("params", [PERTURBATIVE, MIXED], ids=["perturbative", "mixed"])
def test_blowdown_slope(params, settings):
    bar = critical_lambda_two_species(params).value
    series = bubbles.blowdown_series(params, 1.05 * bar, bubbles.geometric_deltas(5, 12), settings)
    assert np.all(np.diff(series.values) < 0)
    rel = abs(series.fitted_slope - series.predicted_slope) / abs(series.predicted_slope)
    assert rel <= settings.slope_tol


def test_blowdown_needs_supercritical_lambda(settings):
    bar = critical_lambda_two_species(MIXED).value
    with pytest.raises(InfeasibleError):
        bubbles.blowdown_series(MIXED, bar, bubbles.geometric_deltas(), settings)
    with pytest.raises(ParameterError):
        bubbles.blowdown_series(MIXED, 1.05 * bar, [0.1, 0.01], settings)


def test_geometric_deltas():
    deltas = bubbles.geometric_deltas(5, 12)
    assert len(deltas) == 8
    assert deltas[0] == 1 / 32
    assert deltas[-1] == 2.0 ** -12
