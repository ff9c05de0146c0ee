import numpy as np
import pytest

from thermal_g2.spectral import SourceSpectrum, build_grid


@pytest.fixture
def spectrum():
    return SourceSpectrum(omega0=100.0, delta_omega=1.0, mean_rate=1.0)


@pytest.fixture
def grid(spectrum):
    return build_grid(spectrum, n_modes=64, span_sigma=5.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
