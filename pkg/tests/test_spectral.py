import math

import numpy as np
import pytest

from thermal_g2.errors import ConfigurationError
from thermal_g2.spectral import (
    FrequencyGrid,
    SourceSpectrum,
    build_grid,
    mean_occupation,
    sample_block,
    sample_realization,
)


def test_mean_occupation_peak():
    s = SourceSpectrum(100.0, 1.0, 1.0)
    assert mean_occupation(s, 100.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-14)
    assert mean_occupation(s, 100.0) == pytest.approx(0.398942, abs=1e-6)


def test_mean_occupation_two_sigma():
    s = SourceSpectrum(100.0, 1.0, 1.0)
    assert mean_occupation(s, 102.0) == pytest.approx(0.053991, abs=1e-6)
    assert mean_occupation(s, 98.0) == pytest.approx(math.exp(-2) / math.sqrt(2 * math.pi), rel=1e-14)


def test_mean_occupation_tails_vanish():
    s = SourceSpectrum(100.0, 1.0, 3.0)
    assert mean_occupation(s, 1e6) == 0.0
    assert mean_occupation(s, -1e6) == 0.0
    omegas = np.linspace(90, 110, 401)
    values = mean_occupation(s, omegas)
    assert np.all(values >= 0)
    assert omegas[np.argmax(values)] == pytest.approx(100.0)


@pytest.mark.parametrize(
    "args",
    [(0.0, 1.0, 1.0), (100.0, 0.0, 1.0), (100.0, 1.0, 0.0), (100.0, -1.0, 1.0), (5.0, 1.0, 1.0)],
)
def test_spectrum_rejects_invalid(args):
    with pytest.raises(ConfigurationError):
        SourceSpectrum(*args)


def test_build_grid_three_modes():
    g = build_grid(SourceSpectrum(100.0, 1.0, 1.0), n_modes=3, span_sigma=1.0)
    np.testing.assert_array_equal(g.omegas, [99.0, 100.0, 101.0])
    assert g.spacing == 1.0


def test_build_grid_mass_matches_gaussian_integral():
    g = build_grid(SourceSpectrum(100.0, 1.0, 1.0), n_modes=201, span_sigma=5.0)
    # mass of a unit Gaussian within +-5 sigma
    assert g.total_occupation == pytest.approx(math.erf(5 / math.sqrt(2)), abs=1e-3)
    assert g.total_occupation == pytest.approx(0.99999, abs=1e-3)
    assert g.total_occupation <= 1.0 * (1 + 1e-3)


@pytest.mark.parametrize("n_modes", [2, 3, 16, 256, 1000])
def test_grid_invariants(n_modes):
    s = SourceSpectrum(50.0, 2.0, 3.5)
    g = build_grid(s, n_modes=n_modes, span_sigma=4.0)
    steps = np.diff(g.omegas)
    assert np.all(steps > 0)
    np.testing.assert_allclose(steps, g.spacing, rtol=1e-9)
    assert np.all(g.occupations >= 0)
    assert g.total_occupation <= s.mean_rate * (1 + 1e-3)


def test_build_grid_rejects_negative_frequencies():
    # omega0 = 2, delta_omega = 1 already fails the quasi-monochromatic rule
    with pytest.raises(ConfigurationError):
        build_grid(SourceSpectrum(2.0, 1.0, 1.0), n_modes=3, span_sigma=5.0)
    with pytest.raises(ConfigurationError, match="above zero"):
        build_grid(SourceSpectrum(10.0, 1.0, 1.0), n_modes=11, span_sigma=11.0)


def test_coarse_grid_total_is_capped():
    s = SourceSpectrum(50.0, 2.0, 3.5)
    g = build_grid(s, n_modes=3, span_sigma=4.0)
    assert g.total_occupation == pytest.approx(3.5, rel=1e-12)
    # shape is preserved
    assert g.occupations[0] == pytest.approx(g.occupations[2])
    assert g.occupations[1] / g.occupations[0] == pytest.approx(math.exp(8.0))


@pytest.mark.parametrize("n_modes,span", [(1, 5.0), (0, 5.0), (10, 0.0), (10, -1.0)])
def test_build_grid_rejects_bad_arguments(n_modes, span):
    with pytest.raises(ConfigurationError):
        build_grid(SourceSpectrum(100.0, 1.0, 1.0), n_modes, span)


def test_zero_occupation_mode_is_exactly_zero(rng):
    g = FrequencyGrid(100.0, np.array([-1.0, 0.0, 1.0]), 1.0, np.array([0.0, 0.3, 0.0]))
    for _ in range(20):
        a = sample_realization(g, rng).alphas
        assert a[0] == 0 and a[2] == 0
        assert a[1] != 0


def test_sampling_is_deterministic(grid):
    a = sample_realization(grid, np.random.default_rng(7)).alphas
    b = sample_realization(grid, np.random.default_rng(7)).alphas
    assert a.tobytes() == b.tobytes()
    assert len(a) == grid.n_modes


def test_block_rows_equal_successive_realizations(grid):
    block = sample_block(grid, np.random.default_rng(3), 5)
    rng = np.random.default_rng(3)
    for row in block:
        assert row.tobytes() == sample_realization(grid, rng).alphas.tobytes()


def test_realization_polar_form(grid, rng):
    r = sample_realization(grid, rng)
    np.testing.assert_allclose(r.amplitudes * np.exp(1j * r.phases), r.alphas, atol=1e-15)
    assert np.all(r.amplitudes >= 0)


def test_single_mode_occupation_statistics():
    n_bar = 0.5
    g = FrequencyGrid(100.0, np.array([0.0]), 1.0, np.array([n_bar]))
    a = sample_block(g, np.random.default_rng(2024), 100_000)[:, 0]
    w = np.abs(a) ** 2
    assert abs(w.mean() - n_bar) < 5 * n_bar / math.sqrt(a.size)
