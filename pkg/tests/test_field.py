import math

import numpy as np
import pytest

from thermal_g2.errors import ConfigurationError, EstimationError
from thermal_g2.field import (
    estimate_fluctuation_correlation,
    estimate_intensity_correlation,
    estimate_means,
    point_statistics,
    simulate_fields,
    synthesize_field,
    transfer_vector,
)
from thermal_g2.layout import Layout, LayoutKind, PathArm, double_mz_layout, hbt_layout
from thermal_g2.spectral import FrequencyGrid, ThermalRealization, sample_block
from thermal_g2.stats import combined_stderr, covariance_estimate

N = 40_000


def single_mode_grid(n_bar=1.0):
    return FrequencyGrid(100.0, np.array([0.0]), 1.0, np.array([n_bar]))


def test_single_arm_single_mode_modulus():
    g = single_mode_grid()
    alpha = 0.3 - 1.1j
    e = synthesize_field(ThermalRealization(np.array([alpha])), g, hbt_layout(2.5, 0.0), "C", 0.7)
    assert abs(e) == pytest.approx(abs(alpha) / math.sqrt(2), rel=1e-14)


def test_half_wave_arms_cancel():
    g = single_mode_grid()
    half_wave = math.pi / 100.0
    lay = Layout(
        (PathArm("C", 0.0, 0.5), PathArm("C", half_wave, 0.5), PathArm("T", 0.0, 0.5)), LayoutKind.CUSTOM
    )
    e = synthesize_field(ThermalRealization(np.array([1.0 + 0.5j])), g, lay, "C", 0.0)
    assert abs(e) < 1e-12


def test_vacuum_field_is_zero(grid):
    real = ThermalRealization(np.zeros(grid.n_modes, dtype=complex))
    assert synthesize_field(real, grid, double_mz_layout(51.0, 1.0, 51.0, 1.0), "T", 3.0) == 0


def test_synthesize_matches_explicit_sum(grid, rng):
    from thermal_g2.spectral import sample_realization

    lay = double_mz_layout(7.0, 1.0, 7.25, 1.5, 0.4, -0.2)
    real = sample_realization(grid, rng)
    t = 0.3
    expected = 0j
    for k, omega in enumerate(grid.omegas):
        for arm in lay.arms_for("C"):
            expected += arm.coefficient * np.exp(1j * arm.extra_phase) * real.alphas[k] * np.exp(
                -1j * omega * (t - arm.length / lay.c)
            )
    assert synthesize_field(real, grid, lay, "C", t) == pytest.approx(expected, abs=1e-12)


def test_synthesize_rejects_mismatched_realization(grid):
    with pytest.raises(ConfigurationError):
        synthesize_field(ThermalRealization(np.zeros(3, complex)), grid, hbt_layout(0, 0), "C", 0.0)
    with pytest.raises(ConfigurationError):
        transfer_vector(grid, hbt_layout(0, 0), "X", 0.0)


def test_hbt_mean_intensity(spectrum, grid):
    m_C, m_T = estimate_means(hbt_layout(0.0, 0.0), spectrum, grid, 0.0, 0.0, N, seed=1)
    expected = 0.5 * grid.total_occupation
    assert abs(m_C.mean - expected) < 5 * m_C.stderr
    assert abs(m_T.mean - expected) < 5 * m_T.stderr


def test_double_mz_mean_intensity(spectrum, grid):
    # two arms of amplitude 1/2: |1/2|^2 + |1/2|^2 = 1/2 of the source, cross term beyond coherence
    m_C, m_T = estimate_means(double_mz_layout(51.0, 1.0, 51.0, 1.0), spectrum, grid, 0.0, 0.0, N, seed=2)
    expected = 0.5 * grid.total_occupation
    assert abs(m_C.mean - expected) < 5 * m_C.stderr
    assert abs(m_T.mean - expected) < 5 * m_T.stderr


def test_zero_occupation_grid_gives_exact_zeros(grid):
    empty = FrequencyGrid(grid.omega0, grid.detunings, grid.spacing, np.zeros(grid.n_modes))
    lay = double_mz_layout(51.0, 1.0, 51.0, 1.0)
    m_C, m_T = estimate_means(lay, None, empty, 0.0, 0.0, 1000, seed=0)
    assert m_C.mean == 0.0 and m_T.mean == 0.0
    assert estimate_intensity_correlation(lay, None, empty, 0.0, 0.0, 1000, seed=0).mean == 0.0
    assert estimate_fluctuation_correlation(lay, None, empty, 0.0, 0.0, 1000, seed=0).mean == 0.0


def test_hbt_bunching_at_zero_delay(spectrum, grid):
    s = point_statistics(hbt_layout(0.0, 0.0), spectrum, grid, 0.0, 0.0, N, seed=3)
    assert abs(s.g2.mean - 2.0) < 5 * s.g2.stderr
    corr = estimate_intensity_correlation(hbt_layout(0.0, 0.0), spectrum, grid, 0.0, 0.0, N, seed=3)
    assert corr.mean == s.intensity_correlation.mean


def test_hbt_no_bunching_beyond_coherence(spectrum, grid):
    s = point_statistics(hbt_layout(0.0, 0.0), spectrum, grid, 5.0, 0.0, N, seed=4)
    assert abs(s.g2.mean - 1.0) < 5 * s.g2.stderr


def test_hbt_covariance_equals_background(spectrum, grid):
    s = point_statistics(hbt_layout(0.0, 0.0), spectrum, grid, 0.0, 0.0, N, seed=5)
    cov = s.fluctuation_correlation
    assert abs(cov.mean - s.background) < 5 * math.hypot(cov.stderr, s.background_stderr)


def test_double_mz_antiphase_covariance_vanishes(spectrum, grid):
    lay = double_mz_layout(51.0, 1.0, 51.0, 1.0, extra_phase_C=math.pi)
    cov = estimate_fluctuation_correlation(lay, spectrum, grid, 0.0, 0.0, N, seed=6)
    assert abs(cov.mean) < 5 * cov.stderr


def test_disjoint_modes_are_uncorrelated(spectrum, grid):
    alphas = sample_block(grid, np.random.default_rng(8), N)
    half = grid.n_modes // 2
    h = transfer_vector(grid, hbt_layout(0.0, 0.0), "C", 0.0)
    e_C = alphas[:, :half] @ h[:half]
    e_T = alphas[:, half:] @ h[half:]
    cov = covariance_estimate(np.abs(e_C) ** 2, np.abs(e_T) ** 2)
    assert abs(cov.mean) < 5 * cov.stderr


def test_global_phase_invariance(grid):
    lay = double_mz_layout(51.0, 1.0, 51.3, 1.3, 0.7, 0.0)
    h = transfer_vector(grid, lay, "C", 0.2)
    alphas = sample_block(grid, np.random.default_rng(9), 500)
    rotated = alphas * np.exp(1j * 0.918)
    np.testing.assert_allclose(np.abs(rotated @ h) ** 2, np.abs(alphas @ h) ** 2, rtol=1e-12)


@pytest.mark.parametrize(
    "layout,t_C",
    [
        (hbt_layout(0.0, 0.3), 0.0),
        (double_mz_layout(51.0, 1.0, 51.0, 1.0, 0.0, 0.0), 0.0),
        (double_mz_layout(51.0, 1.0, 51.05, 1.0, 1.0, 0.0), 0.02),
    ],
)
def test_gaussian_moment_consistency(spectrum, grid, layout, t_C):
    s = point_statistics(layout, spectrum, grid, t_C, 0.0, N, seed=10)
    gap = s.intensity_correlation.mean - s.background - abs(s.cross_correlation) ** 2
    assert abs(gap) < 5 * combined_stderr(s.fluctuation_correlation)


def test_exchange_symmetry(spectrum, grid):
    lay = double_mz_layout(51.0, 1.0, 51.04, 1.02, 0.9, 0.1)
    a = estimate_fluctuation_correlation(lay, spectrum, grid, 0.03, -0.01, 5000, seed=11)
    b = estimate_fluctuation_correlation(lay.swapped(), spectrum, grid, -0.01, 0.03, 5000, seed=11)
    assert a == b


def test_worker_count_does_not_change_samples(spectrum, grid):
    lay = double_mz_layout(51.0, 1.0, 51.0, 1.0, 0.3)
    one = simulate_fields(lay, grid, 0.0, 0.0, 10_000, 5, workers=1)
    three = simulate_fields(lay, grid, 0.0, 0.0, 10_000, 5, workers=3)
    assert all(a.tobytes() == b.tobytes() for a, b in zip(one, three))


def test_stderr_convergence(spectrum, grid):
    # I_C * I_T is heavy-tailed, so a single stderr estimate scatters by ~10%;
    # average over independent replicates before forming the ratio
    lay = double_mz_layout(51.0, 1.0, 51.0, 1.0)
    names = ("mean_C", "intensity_correlation", "fluctuation_correlation")
    small = [point_statistics(lay, spectrum, grid, 0.0, 0.0, 10_000, seed=100 + r, batches=256) for r in range(4)]
    large = [point_statistics(lay, spectrum, grid, 0.0, 0.0, 40_000, seed=200 + r, batches=256) for r in range(4)]
    for name in names:
        ratio = np.mean([getattr(s, name).stderr for s in small]) / np.mean([getattr(s, name).stderr for s in large])
        assert ratio == pytest.approx(2.0, rel=0.2), name


def test_stderr_doubling(spectrum, grid):
    lay = hbt_layout(0.0, 0.0)
    a = estimate_intensity_correlation(lay, spectrum, grid, 0.0, 0.0, 20_000, seed=14)
    b = estimate_intensity_correlation(lay, spectrum, grid, 0.0, 0.0, 40_000, seed=15)
    assert a.stderr / b.stderr == pytest.approx(math.sqrt(2), rel=0.2)
    assert a.n_samples == 20_000 and a.stderr >= 0


def test_estimation_errors(spectrum, grid):
    lay = hbt_layout(0.0, 0.0)
    with pytest.raises(EstimationError):
        estimate_fluctuation_correlation(lay, spectrum, grid, 0.0, 0.0, 10, seed=0, batches=32)
    with pytest.raises(EstimationError):
        estimate_means(lay, spectrum, grid, 0.0, 0.0, 1, seed=0)
