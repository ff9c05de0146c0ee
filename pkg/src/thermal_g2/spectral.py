"""Gaussian thermal source spectrum and Glauber-Sudarshan field sampling.

The continuous product over frequencies of the thermal P function is
replaced by a uniform grid of independent modes. Each mode carries a mean
photon number ``n_k = n(omega_k) * spacing`` so the total photon number
stays close to the mean rate whatever the grid resolution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

MIN_QUALITY_FACTOR = 10.0
DEFAULT_N_MODES = 256
DEFAULT_SPAN_SIGMA = 5.0


@dataclass(frozen=True)
class SourceSpectrum:
    """Quasi-monochromatic Gaussian source.

    ``omega0`` and ``delta_omega`` are angular frequencies, ``mean_rate`` is
    the mean photon rate.
    """

    omega0: float
    delta_omega: float
    mean_rate: float = 1.0

    def __post_init__(self):
        for name in ("omega0", "delta_omega", "mean_rate"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigurationError(f"{name} must be a positive finite number, got {value!r}")
        if self.omega0 / self.delta_omega < MIN_QUALITY_FACTOR:
            raise ConfigurationError(
                f"omega0/delta_omega = {self.omega0 / self.delta_omega:.3g} is below "
                f"{MIN_QUALITY_FACTOR:g}; source is not quasi-monochromatic"
            )

    @property
    def coherence_time(self) -> float:
        return 1.0 / self.delta_omega


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Uniform frequency grid centred on the carrier.

    ``detunings`` holds ``omega_k - omega0`` computed without cancellation,
    which the phase kernels need when ``omega0`` is many orders of magnitude
    larger than the spectral width.
    """

    omega0: float
    detunings: np.ndarray
    spacing: float
    occupations: np.ndarray

    @property
    def omegas(self) -> np.ndarray:
        return self.omega0 + self.detunings

    @property
    def n_modes(self) -> int:
        return self.detunings.size

    @property
    def total_occupation(self) -> float:
        return math.fsum(self.occupations)

    @property
    def revival_delay(self) -> float:
        """Delay after which the discretized first-order correlation repeats."""
        return 2.0 * math.pi / self.spacing


@dataclass(frozen=True, eq=False)
class ThermalRealization:
    """One draw of the complex mode amplitudes."""

    alphas: np.ndarray

    @property
    def amplitudes(self) -> np.ndarray:
        return np.abs(self.alphas)

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.alphas)


def mean_occupation(spectrum: SourceSpectrum, omega):
    """Mean photon number density at ``omega`` (scalar or array)."""
    width = spectrum.delta_omega
    offset = np.asarray(omega, dtype=float) - spectrum.omega0
    density = spectrum.mean_rate / (math.sqrt(2.0 * math.pi) * width) * np.exp(
        -(offset**2) / (2.0 * width**2)
    )
    if density.ndim == 0:
        return float(density)
    return density


def build_grid(
    spectrum: SourceSpectrum,
    n_modes: int = DEFAULT_N_MODES,
    span_sigma: float = DEFAULT_SPAN_SIGMA,
) -> FrequencyGrid:
    if int(n_modes) != n_modes or n_modes < 2:
        raise ConfigurationError(f"n_modes must be an integer >= 2, got {n_modes!r}")
    if not span_sigma > 0:
        raise ConfigurationError(f"span_sigma must be positive, got {span_sigma!r}")
    half_span = span_sigma * spectrum.delta_omega
    if spectrum.omega0 - half_span <= 0:
        raise ConfigurationError(
            f"grid extends to omega = {spectrum.omega0 - half_span:g}; "
            "frequencies must stay above zero"
        )
    detunings = np.linspace(-half_span, half_span, int(n_modes))
    spacing = 2.0 * half_span / (n_modes - 1)
    width = spectrum.delta_omega
    density = spectrum.mean_rate / (math.sqrt(2.0 * math.pi) * width) * np.exp(
        -(detunings**2) / (2.0 * width**2)
    )
    occupations = density * spacing
    total = math.fsum(occupations)
    if total > spectrum.mean_rate:
        # coarse grids overshoot the Gaussian mass; cap the total at the mean rate
        occupations = occupations * (spectrum.mean_rate / total)
    return FrequencyGrid(
        omega0=spectrum.omega0,
        detunings=detunings,
        spacing=spacing,
        occupations=occupations,
    )


def sample_block(grid: FrequencyGrid, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` realizations at once, shape ``(size, n_modes)``.

    Row ``i`` equals the ``i``-th successive call of :func:`sample_realization`
    on the same generator.
    """
    scale = np.sqrt(grid.occupations / 2.0)
    draws = rng.standard_normal((size, 2, grid.n_modes))
    return scale * draws[:, 0, :] + 1j * (scale * draws[:, 1, :])


def sample_realization(grid: FrequencyGrid, rng: np.random.Generator) -> ThermalRealization:
    """Circularly symmetric complex Gaussian amplitudes with ``<|a_k|^2> = n_k``."""
    return ThermalRealization(sample_block(grid, rng, 1)[0])
