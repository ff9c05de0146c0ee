"""Two-photon detection amplitudes and the four-group split of the intensity covariance.

For a pair of distinct modes ``m != n`` the product of a two-photon amplitude
with the conjugate of its exchange amplitude factorizes into a part that
depends only on ``m`` and a part that depends only on ``n``. With
``w_k = |alpha_k|^2`` and ``P^X_k = f_C^X[k] * conj(f_T^X[k])`` for path type
``X`` in {L, S}, the four interfering groups are::

    g_LL = sum_{m != n} w_m P^L_m * w_n conj(P^L_n)
    g_SS = sum_{m != n} w_m P^S_m * w_n conj(P^S_n)
    g_LS = sum_{m != n} w_m P^L_m * w_n conj(P^S_n)
    g_SL = sum_{m != n} w_m P^S_m * w_n conj(P^L_n)

``g_LL + g_SS`` is the phase-insensitive HBT part, ``g_LS + g_SL`` the part
carrying the fringe.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, InvalidPairError, UnsupportedLayoutError
from .field import DEFAULT_N_SAMPLES, _check_grid, arm_factor, run_blocks, transfer_vector
from .layout import Layout, LayoutKind, PathArm
from .spectral import FrequencyGrid, ThermalRealization
from .stats import DEFAULT_BATCHES, CorrelationEstimate, covariance_estimate, sample_mean

# grids up to this size are reduced in exact rational arithmetic by default
EXACT_MODE_LIMIT = 16
GROUPS = ("LL", "SS", "LS", "SL")


@dataclass(frozen=True)
class TwoPhotonAmplitude:
    value: complex
    m: int
    n: int
    path_C: PathArm
    path_T: PathArm


@dataclass(frozen=True)
class DecompositionEstimate:
    hbt_term: CorrelationEstimate
    non_hbt_term: CorrelationEstimate
    total: CorrelationEstimate
    reference_covariance: CorrelationEstimate


def two_photon_amplitude(
    real: ThermalRealization,
    grid: FrequencyGrid,
    layout: Layout,
    m: int,
    n: int,
    arm_C: PathArm,
    arm_T: PathArm,
    t_C: float,
    t_T: float,
) -> complex:
    """Amplitude for mode ``m`` reaching C via ``arm_C`` and mode ``n`` reaching T via ``arm_T``."""
    if m == n:
        raise InvalidPairError(f"two-photon amplitude needs distinct modes, got m = n = {m}")
    if arm_C not in layout.arms_for("C") or arm_T not in layout.arms_for("T"):
        raise ConfigurationError("arm_C and arm_T must be arms of detectors C and T of this layout")
    a = real.alphas[m] * arm_factor(grid, arm_C, t_C, layout.c)[m]
    b = real.alphas[n] * arm_factor(grid, arm_T, t_T, layout.c)[n]
    return complex(a * b)


def amplitude_record(real, grid, layout, m, n, arm_C, arm_T, t_C, t_T) -> TwoPhotonAmplitude:
    value = two_photon_amplitude(real, grid, layout, m, n, arm_C, arm_T, t_C, t_T)
    return TwoPhotonAmplitude(value, m, n, arm_C, arm_T)


def path_products(grid: FrequencyGrid, layout: Layout, t_C: float, t_T: float) -> dict:
    """``P^X = f_C^X * conj(f_T^X)`` for ``X`` in {L, S}."""
    if layout.kind is not LayoutKind.DOUBLE_MZ:
        raise UnsupportedLayoutError(f"decomposition needs a DOUBLE_MZ layout, got {layout.kind.value}")
    out = {}
    for x, pick in (("L", layout.long_arm), ("S", layout.short_arm)):
        f_C = arm_factor(grid, pick("C"), t_C, layout.c)
        f_T = arm_factor(grid, pick("T"), t_T, layout.c)
        out[x] = f_C * np.conj(f_T)
    return out


def group_factors(products: dict) -> dict:
    """Per-group ``(u, v)`` so that group ``XY = sum_{m != n} w_m u_m w_n v_n``."""
    return {x + y: (products[x], np.conj(products[y])) for x in "LS" for y in "LS"}


def _pair_sum_factorized(w, u, v):
    return (w @ u) * (w @ v) - (w * w) @ (u * v)


def _pair_sum_direct(w, u, v, chunk=64):
    out = np.empty(w.shape[0], dtype=complex)
    off_diagonal = ~np.eye(w.shape[1], dtype=bool)
    for lo in range(0, w.shape[0], chunk):
        a = w[lo : lo + chunk] * u
        b = w[lo : lo + chunk] * v
        outer = a[:, :, None] * b[:, None, :]
        out[lo : lo + chunk] = np.sum(outer * off_diagonal, axis=(1, 2))
    return out


def _cfrac(z):
    return Fraction(float(z.real)), Fraction(float(z.imag))


def _cmul(p, q):
    return p[0] * q[0] - p[1] * q[1], p[0] * q[1] + p[1] * q[0]


def _pair_sum_exact(w, u, v, direct: bool):
    """Rationally exact reduction of the same float summands; both routes round once."""
    out = np.empty(w.shape[0], dtype=complex)
    for r in range(w.shape[0]):
        a = [_cfrac(z) for z in w[r] * u]
        b = [_cfrac(z) for z in w[r] * v]
        if direct:
            re = im = Fraction(0)
            for i, ai in enumerate(a):
                for j, bj in enumerate(b):
                    if i != j:
                        pr, pi = _cmul(ai, bj)
                        re += pr
                        im += pi
        else:
            sa = (sum(z[0] for z in a), sum(z[1] for z in a))
            sb = (sum(z[0] for z in b), sum(z[1] for z in b))
            re, im = _cmul(sa, sb)
            for ai, bi in zip(a, b):
                pr, pi = _cmul(ai, bi)
                re -= pr
                im -= pi
        out[r] = complex(float(re), float(im))
    return out


def pair_sums(w, factors: dict, brute_force=False, exact=False) -> dict:
    """Group sums for a block of occupations ``w`` of shape (realizations, modes)."""
    out = {}
    for name, (u, v) in factors.items():
        if exact:
            out[name] = _pair_sum_exact(w, u, v, direct=brute_force)
        elif brute_force:
            out[name] = _pair_sum_direct(w, u, v)
        else:
            out[name] = _pair_sum_factorized(w, u, v)
    return out


def realization_groups(real: ThermalRealization, grid, layout, t_C, t_T, brute_force=False, exact=None) -> dict:
    """The four complex group sums for a single realization."""
    if exact is None:
        exact = grid.n_modes <= EXACT_MODE_LIMIT
    factors = group_factors(path_products(grid, layout, t_C, t_T))
    w = (np.abs(real.alphas) ** 2)[None, :]
    return {k: complex(v[0]) for k, v in pair_sums(w, factors, brute_force, exact).items()}


def group_samples(layout, grid, t_C, t_T, n_samples, seed, brute_force=False, exact=None, workers=1):
    """Per-realization HBT and non-HBT sums plus the detector fields."""
    if exact is None:
        exact = grid.n_modes <= EXACT_MODE_LIMIT
    factors = group_factors(path_products(grid, layout, t_C, t_T))
    h_C = transfer_vector(grid, layout, "C", t_C)
    h_T = transfer_vector(grid, layout, "T", t_T)

    def kernel(alphas):
        w = np.abs(alphas) ** 2
        g = pair_sums(w, factors, brute_force, exact)
        hbt = (g["LL"] + g["SS"]).real
        non_hbt = (g["LS"] + g["SL"]).real
        return hbt, non_hbt, alphas @ h_C, alphas @ h_T

    return run_blocks(grid, n_samples, seed, kernel, workers)


def decompose_correlation(
    layout,
    spectrum,
    grid,
    t_C,
    t_T,
    n_samples=DEFAULT_N_SAMPLES,
    seed=0,
    batches=DEFAULT_BATCHES,
    brute_force=False,
    exact=None,
    workers=1,
) -> DecompositionEstimate:
    if layout.kind is not LayoutKind.DOUBLE_MZ:
        raise UnsupportedLayoutError(f"decomposition needs a DOUBLE_MZ layout, got {layout.kind.value}")
    _check_grid(spectrum, grid)
    hbt, non_hbt, e_C, e_T = group_samples(layout, grid, t_C, t_T, n_samples, seed, brute_force, exact, workers)
    return decomposition_from_samples(hbt, non_hbt, np.abs(e_C) ** 2, np.abs(e_T) ** 2, batches)


def decomposition_from_samples(hbt, non_hbt, i_C, i_T, batches=DEFAULT_BATCHES) -> DecompositionEstimate:
    hbt_est = sample_mean(hbt)
    non_est = sample_mean(non_hbt)
    total_spread = sample_mean(hbt + non_hbt)
    total = CorrelationEstimate(hbt_est.mean + non_est.mean, total_spread.stderr, total_spread.n_samples)
    return DecompositionEstimate(hbt_est, non_est, total, covariance_estimate(i_C, i_T, batches))
