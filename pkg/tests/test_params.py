import math

import numpy as np
import pytest
from pydantic import ValidationError

from meanfield.errors import ParameterError
from meanfield.params import (
    MAX_ATOMS_PER_SIGN,
    beta_boundary,
    critical_lambda,
    critical_lambda_discrete,
    critical_lambda_two_species,
    gamma_threshold,
    measure_from_pairs,
    ordering_check,
    stochastic_critical_lambda,
)
from meanfield.schemas import EIGHT_PI, DiscreteMeasure, SpeciesParams


def test_two_species_perturbative_branch():
    mt = critical_lambda_two_species(SpeciesParams(tau=0.5, gamma=0.25))
    assert mt.value == pytest.approx(16 * math.pi, rel=1e-15)
    assert mt.branch == "perturbative"


def test_two_species_mixed_branch():
    mt = critical_lambda_two_species(SpeciesParams(tau=0.5, gamma=0.8))
    assert mt.value == pytest.approx(EIGHT_PI / 0.81, rel=1e-14)
    assert mt.value == pytest.approx(31.0281, abs=1e-4)
    assert mt.branch == "mixed"


def test_branches_meet_at_threshold():
    tau = 0.25
    g = gamma_threshold(tau)
    assert g == pytest.approx(1 / 3, rel=1e-15)
    at = critical_lambda_two_species(SpeciesParams(tau=tau, gamma=g)).value
    mixed = EIGHT_PI / (tau + (1 - tau) * g) ** 2
    assert at == pytest.approx(32 * math.pi, rel=1e-14)
    assert mixed == pytest.approx(at, rel=1e-14)


@pytest.mark.parametrize("tau", [0.05, 0.25, 0.5, 0.75, 0.95])
def test_branch_continuity(tau):
    g = gamma_threshold(tau)
    lo = critical_lambda_two_species(SpeciesParams(tau=tau, gamma=g * (1 - 1e-12))).value
    hi = critical_lambda_two_species(SpeciesParams(tau=tau, gamma=g * (1 + 1e-12))).value
    assert abs(hi - lo) / lo < 1e-10


def test_two_species_rejects_standard_case():
    with pytest.raises(ParameterError):
        critical_lambda_two_species(SpeciesParams(tau=1.0, gamma=0.5))


@pytest.mark.parametrize("tau,gamma", [(0.0, 0.5), (1.2, 0.5), (0.5, 0.0), (0.5, 1.0), (0.5, 1.2)])
def test_species_params_domain(tau, gamma):
    with pytest.raises(ValidationError):
        SpeciesParams(tau=tau, gamma=gamma)


def test_standard_case_dispatch():
    mt = critical_lambda(SpeciesParams(tau=1.0, gamma=0.5))
    assert mt.value == EIGHT_PI
    assert stochastic_critical_lambda() == EIGHT_PI


def test_discrete_dirac_one():
    mt = critical_lambda_discrete(measure_from_pairs([(1.0, 1.0)]))
    assert mt.value == pytest.approx(EIGHT_PI, rel=1e-15)
    assert mt.branch == "perturbative"


def test_discrete_two_atom_matches_closed_form():
    mt = critical_lambda_discrete(measure_from_pairs([(0.5, 1.0), (0.5, 0.8)]))
    assert mt.value == pytest.approx(EIGHT_PI / 0.81, rel=1e-12)
    assert mt.branch == "mixed"
    assert set(mt.subset) == {0, 1}


def test_discrete_signed_measure():
    mt = critical_lambda_discrete(measure_from_pairs([(0.5, 1.0), (0.5, -1.0)]))
    assert mt.value == pytest.approx(16 * math.pi, rel=1e-14)


def test_discrete_specialization_random_pairs():
    rng = np.random.default_rng(7)
    for tau, g in zip(rng.uniform(0.01, 0.99, 50), rng.uniform(0.01, 0.99, 50)):
        params = SpeciesParams(tau=float(tau), gamma=float(g))
        closed = critical_lambda_two_species(params).value
        assert critical_lambda_discrete(params.to_measure()).value == pytest.approx(closed, rel=1e-12)


def test_discrete_rejects_empty_measure():
    with pytest.raises(ParameterError):
        critical_lambda_discrete(DiscreteMeasure())


def test_discrete_zero_intensities_are_degenerate():
    mt = critical_lambda_discrete(measure_from_pairs([(0.5, 0.0), (0.5, 0.0)]))
    assert math.isinf(mt.value)
    assert mt.branch == "degenerate"


def test_zero_intensity_atom_only_adds_weight():
    # P(K) grows by the zero atom while the moment does not, so it never helps
    mt = critical_lambda_discrete(measure_from_pairs([(0.5, 1.0), (0.5, 0.0)]))
    assert mt.value == pytest.approx(16 * math.pi, rel=1e-14)
    assert mt.subset == (0,)


def test_discrete_atom_cap():
    n = MAX_ATOMS_PER_SIGN + 1
    with pytest.raises(ParameterError):
        critical_lambda_discrete(measure_from_pairs([(1.0 / n, 0.5)] * n))


def test_measure_weights_must_sum_to_one():
    with pytest.raises(ValidationError):
        measure_from_pairs([(0.5, 1.0), (0.4, 0.3)])


def test_beta_boundary_values():
    assert beta_boundary(SpeciesParams(tau=0.5, gamma=0.5)) == pytest.approx(2 * math.log(2), rel=1e-14)
    g = 0.6
    assert beta_boundary(SpeciesParams(tau=g / (1 + g), gamma=g)) == pytest.approx(0.0, abs=1e-14)
    assert beta_boundary(SpeciesParams(tau=1e-3, gamma=0.5)) == pytest.approx(-12.43, abs=5e-3)


def test_beta_boundary_increasing_in_tau():
    taus = np.array([1e-6, 1e-5, 1e-4, 1e-3, 0.01, 0.1, 0.3, 0.5, 0.9, 0.999])
    values = [beta_boundary(SpeciesParams(tau=float(t), gamma=0.5)) for t in taus]
    assert np.all(np.diff(values) > 0)


def test_beta_boundary_rejects_standard_case():
    with pytest.raises(ParameterError):
        beta_boundary(SpeciesParams(tau=1.0, gamma=0.5))


def test_gamma_threshold_ordering():
    assert gamma_threshold(0.5) == pytest.approx(0.41421356, rel=1e-8)
    assert gamma_threshold(0.999) == pytest.approx(0.499875, abs=1e-6)
    assert gamma_threshold(0.999) < 0.5
    for tau in (1e-4, 0.25, 0.5, 0.999):
        assert ordering_check(tau)
    with pytest.raises(ParameterError):
        gamma_threshold(1.0)


def test_to_measure():
    m = SpeciesParams(tau=0.3, gamma=0.6).to_measure()
    assert [(a.weight, a.intensity) for a in m.atoms] == [(0.3, 1.0), (0.7, 0.6)]
    assert SpeciesParams(tau=1.0, gamma=0.6).to_measure().is_dirac_one
