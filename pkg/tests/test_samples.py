import math

import numpy as np
import pytest

from meanfield.errors import ParameterError
from meanfield.samples import RadialSamples


@pytest.fixture
def quadratic():
    # y = 1 - r² on [0, 2]
    r = np.linspace(0.0, 2.0, 9)
    return RadialSamples(r, 1.0 - r * r, -2.0 * r, np.full_like(r, -2.0))


def test_interpolation_reproduces_polynomials(quadratic):
    x = np.linspace(0.0, 2.0, 37)
    np.testing.assert_allclose(quadratic.value(x), 1.0 - x * x, atol=1e-14)
    np.testing.assert_allclose(quadratic.slope(x), -2.0 * x, atol=1e-13)
    np.testing.assert_allclose(quadratic.curvature(x), -2.0, atol=1e-11)


def test_radial_integral(quadratic):
    # 2π∫₀¹ (1 - r²) r dr = π/2
    assert quadratic.radial_integral(lambda r, y, dy: y, upper=1.0) == pytest.approx(math.pi / 2, rel=1e-13)
    assert quadratic.radial_integral(lambda r, y, dy: y, upper=0.0) == 0.0


def test_cumulative_and_integral_to(quadratic):
    g = lambda r, y, dy: np.ones_like(r)
    cum = quadratic.cumulative("area", g)
    np.testing.assert_allclose(cum, math.pi * quadratic.r ** 2, rtol=1e-13, atol=1e-15)
    assert quadratic.integral_to("area", g, 1.3) == pytest.approx(math.pi * 1.69, rel=1e-13)


def test_scaled_maps_onto_unit_disc(quadratic):
    v = quadratic.scaled(1.0, 0.0)
    assert v.r_max == 1.0
    assert float(v.y[-1]) == pytest.approx(0.0, abs=1e-15)
    w = quadratic.scaled(0.5, 0.75, factor=2.0)
    # 2((1 - (x/2)²) - 3/4) = (1 - x²)/2
    x = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(w.value(x), 0.5 * (1.0 - x * x), atol=1e-14)


@pytest.mark.parametrize("r", [[0.0], [0.0, 0.0], [1.0, 0.5], [-1.0, 1.0]])
def test_rejects_bad_radii(r):
    n = len(r)
    with pytest.raises(ParameterError):
        RadialSamples(r, np.zeros(n), np.zeros(n), np.zeros(n))


def test_rejects_out_of_range(quadratic):
    with pytest.raises(ParameterError):
        quadratic.value(2.5)


@pytest.fixture
def harmonic():
    # y = 3 - 4 ln r on [0.5, 1e3], interpolated in ln r from 0.5
    r = np.geomspace(0.5, 1e3, 30)
    return RadialSamples(r, 3.0 - 4.0 * np.log(r), -4.0 / r, 4.0 / (r * r), log_from=0.5)


def test_log_region_reproduces_harmonic(harmonic):
    x = np.geomspace(0.5, 1e3, 101)
    y, dy, d2, lap = harmonic.derivatives(x)
    np.testing.assert_allclose(y, 3.0 - 4.0 * np.log(x), rtol=1e-13, atol=1e-12)
    np.testing.assert_allclose(dy * x, -4.0, rtol=1e-12)
    np.testing.assert_allclose(d2 * x * x, 4.0, rtol=1e-11)
    assert np.max(np.abs(lap * x * x)) <= 1e-11


def test_laplacian_at_nodes_is_taken_as_given():
    r = np.linspace(0.0, 2.0, 9)
    lap = np.full_like(r, -7.0)
    v = RadialSamples(r, 1.0 - r * r, -2.0 * r, np.full_like(r, -2.0), laplacian=lap)
    np.testing.assert_array_equal(v.lap, lap)


def test_mixed_layout_is_continuous():
    r = np.concatenate((np.linspace(0.0, 1.0, 11), np.geomspace(1.0, 10.0, 11)[1:]))
    y, dy, d2 = 1.0 - r * r, -2.0 * r, np.full_like(r, -2.0)
    v = RadialSamples(r, y, dy, d2, log_from=1.0)
    x = np.linspace(0.0, 10.0, 201)
    np.testing.assert_allclose(v.value(x), 1.0 - x * x, rtol=1e-6, atol=1e-5)
    assert float(v.value(1.0)) == pytest.approx(0.0, abs=1e-15)


def test_scaled_drops_node_crowding_the_cut(quadratic):
    # nodes every 0.25; a cut just past 1.0 would leave a sliver interval
    v = quadratic.scaled(1.0 + 1e-9, 0.0)
    assert len(v) == 5
    assert np.min(np.diff(v.r)) > 0.2
    x = np.linspace(0.0, 1.0, 21)
    np.testing.assert_allclose(v.value(x), 1.0 - (1.0 + 1e-9) ** 2 * x * x, atol=1e-13)


def test_scaled_keeps_log_region(harmonic):
    v = harmonic.scaled(100.0, 3.0 - 4.0 * math.log(100.0))
    assert v.log_from == pytest.approx(0.005)
    x = np.geomspace(0.005, 1.0, 17)
    np.testing.assert_allclose(v.value(x), -4.0 * np.log(x), atol=1e-12)


def test_affine_maps_values_and_radii(quadratic):
    v = quadratic.affine(factor=2.0, shift=1.0, stretch=4.0)
    assert v.r_max == 8.0
    x = np.linspace(0.0, 8.0, 17)
    # 2(1 - (x/4)²) + 1
    np.testing.assert_allclose(v.value(x), 3.0 - x * x / 8.0, atol=1e-13)
    np.testing.assert_allclose(v.laplacian(x[1:]), -0.5, rtol=1e-10)


def test_with_boundary_replaces_last_value(quadratic):
    v = quadratic.with_boundary(0.25)
    assert float(v.y[-1]) == 0.25
    np.testing.assert_array_equal(v.y[:-1], quadratic.y[:-1])
    assert v.log_from is None


def test_rejects_nonpositive_log_from():
    r = np.linspace(0.0, 1.0, 3)
    with pytest.raises(ParameterError):
        RadialSamples(r, r, r, r, log_from=0.0)
