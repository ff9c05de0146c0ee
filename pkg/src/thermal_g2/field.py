"""Detector fields from thermal realizations and Monte Carlo intensity moments.

Each detector field is linear in the mode amplitudes, ``E_d = sum_k alpha_k h_d[k]``,
with a transfer vector ``h_d`` fixed by the layout and the detection time.
Realizations are drawn in fixed-size blocks, each block from its own child
of the master seed, so the sample set does not depend on how many workers
process the blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, EstimationError
from .layout import DETECTORS, Layout, carrier_phase
from .spectral import FrequencyGrid, SourceSpectrum, ThermalRealization, sample_block
from .stats import (
    DEFAULT_BATCHES,
    CorrelationEstimate,
    covariance_estimate,
    g2_estimate,
    sample_mean,
)

BLOCK_SIZE = 4096
DEFAULT_N_SAMPLES = 100_000


@dataclass(frozen=True)
class FieldSample:
    e_C: complex
    e_T: complex
    t_C: float
    t_T: float


def arm_factor(grid: FrequencyGrid, arm, t: float, c: float) -> np.ndarray:
    """Per-mode factor ``coef * exp(i*extra) * exp(-i*omega_k*(t - l/c))`` of one arm."""
    carrier = carrier_phase(grid.omega0, arm.length, c, t) + arm.extra_phase
    delay = t - arm.length / c
    return arm.coefficient * np.exp(1j * carrier) * np.exp(-1j * grid.detunings * delay)


def transfer_vector(grid: FrequencyGrid, layout: Layout, detector: str, t: float) -> np.ndarray:
    if detector not in DETECTORS:
        raise ConfigurationError(f"unknown detector {detector!r}")
    arms = layout.arms_for(detector)
    if not arms:
        raise ConfigurationError(f"detector {detector} has no arms")
    h = np.zeros(grid.n_modes, dtype=complex)
    for arm in arms:
        h += arm_factor(grid, arm, t, layout.c)
    return h


def synthesize_field(
    real: ThermalRealization, grid: FrequencyGrid, layout: Layout, detector: str, t: float
) -> complex:
    if real.alphas.shape != (grid.n_modes,):
        raise ConfigurationError("realization does not match the frequency grid")
    return complex(real.alphas @ transfer_vector(grid, layout, detector, t))


def run_blocks(grid: FrequencyGrid, n_samples: int, seed: int, kernel, workers: int = 1):
    """Apply ``kernel(alphas_block)`` to every block; concatenate each output in order.

    ``kernel`` must return a tuple of 1-D arrays, one entry per realization.
    """
    if n_samples < 1:
        raise EstimationError(f"n_samples must be >= 1, got {n_samples}")
    n_blocks = -(-n_samples // BLOCK_SIZE)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    sizes = [min(BLOCK_SIZE, n_samples - i * BLOCK_SIZE) for i in range(n_blocks)]

    def work(i):
        rng = np.random.default_rng(children[i])
        return kernel(sample_block(grid, rng, sizes[i]))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, range(n_blocks)))
    else:
        parts = [work(i) for i in range(n_blocks)]
    return tuple(np.concatenate(column) for column in zip(*parts))


def simulate_fields(layout, grid, t_C, t_T, n_samples, seed, workers=1):
    """Detector fields ``(E_C, E_T)`` for every realization of the ensemble."""
    h_C = transfer_vector(grid, layout, "C", t_C)
    h_T = transfer_vector(grid, layout, "T", t_T)
    return run_blocks(grid, n_samples, seed, lambda a: (a @ h_C, a @ h_T), workers)


def _check_grid(spectrum: SourceSpectrum | None, grid: FrequencyGrid):
    if spectrum is not None and spectrum.omega0 != grid.omega0:
        raise ConfigurationError("grid was not built for this spectrum")


def intensities(layout, spectrum, grid, t_C, t_T, n_samples, seed, workers=1):
    _check_grid(spectrum, grid)
    e_C, e_T = simulate_fields(layout, grid, t_C, t_T, n_samples, seed, workers)
    return np.abs(e_C) ** 2, np.abs(e_T) ** 2


def estimate_means(layout, spectrum, grid, t_C, t_T, n_samples=DEFAULT_N_SAMPLES, seed=0, workers=1):
    i_C, i_T = intensities(layout, spectrum, grid, t_C, t_T, n_samples, seed, workers)
    return sample_mean(i_C), sample_mean(i_T)


def estimate_intensity_correlation(
    layout, spectrum, grid, t_C, t_T, n_samples=DEFAULT_N_SAMPLES, seed=0, workers=1
) -> CorrelationEstimate:
    i_C, i_T = intensities(layout, spectrum, grid, t_C, t_T, n_samples, seed, workers)
    return sample_mean(i_C * i_T)


def estimate_fluctuation_correlation(
    layout,
    spectrum,
    grid,
    t_C,
    t_T,
    n_samples=DEFAULT_N_SAMPLES,
    seed=0,
    batches=DEFAULT_BATCHES,
    workers=1,
) -> CorrelationEstimate:
    """Unbiased covariance of ``I_C`` and ``I_T`` across realizations."""
    if n_samples < batches:
        raise EstimationError(f"{n_samples} samples cannot fill {batches} batches")
    i_C, i_T = intensities(layout, spectrum, grid, t_C, t_T, n_samples, seed, workers)
    return covariance_estimate(i_C, i_T, batches)


@dataclass(frozen=True)
class PointStatistics:
    """Every field-engine estimate for one detection configuration, from one sample set."""

    mean_C: CorrelationEstimate
    mean_T: CorrelationEstimate
    intensity_correlation: CorrelationEstimate
    fluctuation_correlation: CorrelationEstimate
    g2: CorrelationEstimate
    cross_correlation: complex

    @property
    def background(self) -> float:
        return self.mean_C.mean * self.mean_T.mean

    @property
    def background_stderr(self) -> float:
        a, b = self.mean_C, self.mean_T
        return math.hypot(a.mean * b.stderr, b.mean * a.stderr)


def point_statistics_from_fields(e_C, e_T, batches=DEFAULT_BATCHES) -> PointStatistics:
    i_C = np.abs(e_C) ** 2
    i_T = np.abs(e_T) ** 2
    if i_C.size < batches:
        raise EstimationError(f"{i_C.size} samples cannot fill {batches} batches")
    return PointStatistics(
        mean_C=sample_mean(i_C),
        mean_T=sample_mean(i_T),
        intensity_correlation=sample_mean(i_C * i_T),
        fluctuation_correlation=covariance_estimate(i_C, i_T, batches),
        g2=g2_estimate(i_C, i_T, batches),
        cross_correlation=complex(np.mean(np.conj(e_C) * e_T)),
    )


def point_statistics(
    layout, spectrum, grid, t_C, t_T, n_samples=DEFAULT_N_SAMPLES, seed=0, batches=DEFAULT_BATCHES, workers=1
) -> PointStatistics:
    _check_grid(spectrum, grid)
    if n_samples < batches:
        raise EstimationError(f"{n_samples} samples cannot fill {batches} batches")
    e_C, e_T = simulate_fields(layout, grid, t_C, t_T, n_samples, seed, workers)
    return point_statistics_from_fields(e_C, e_T, batches)
