"""Closed-form second-order correlations for the HBT and twin Mach-Zehnder layouts.

The scale constant of the two-path contributions is fixed to 1; callers
comparing against Monte Carlo pass a fitted ``normalization`` instead.
The length-difference envelope decays, ``exp(-(l_C - l_T)^2 dw^2 / 2c^2)``,
mirroring the detection-time envelope. A growing exponent would make the
contribution diverge with the path mismatch.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import UnsupportedLayoutError
from .layout import Layout, LayoutKind, carrier_phase, phase_difference
from .spectral import SourceSpectrum

FLUCTUATION_VISIBILITY = 1.0
RAW_VISIBILITY = 1.0 / 3.0


@dataclass(frozen=True)
class AnalyticPrediction:
    fluctuation_correlation: float
    raw_g2: float
    background: float
    fringe_phase: float
    envelope: float
    normalization: float


def g_two_path(l_C, l_T, t_C, t_T, spectrum: SourceSpectrum, c: float = 1.0) -> complex:
    """Two-path contribution for a pair of same-type paths ending at C and T."""
    dw = spectrum.delta_omega
    dl = l_C - l_T
    tau = t_C - t_T
    # carrier phase omega0*(t_C - t_T) - omega0*(l_C - l_T)/c, reduced in extended precision
    phase = -carrier_phase(spectrum.omega0, dl, c, tau)
    envelope = math.exp(-(dl * dw / c) ** 2 / 2.0) * math.exp(-(tau * dw) ** 2 / 2.0)
    return 1j * spectrum.mean_rate * envelope * cmath.exp(1j * phase)


def predict(
    layout: Layout,
    spectrum: SourceSpectrum,
    t_C: float = 0.0,
    t_T: float = 0.0,
    normalization: float | None = None,
) -> AnalyticPrediction:
    """Background-free and raw correlations, cross-type leakage excluded.

    ``normalization`` is the scale multiplying ``|G/r|^2``; by default
    ``r^2``, i.e. the unit constant.
    """
    rate = spectrum.mean_rate
    scale = rate**2 if normalization is None else normalization
    if layout.kind is LayoutKind.HBT:
        (arm_C,), (arm_T,) = layout.arms_for("C"), layout.arms_for("T")
        g = g_two_path(arm_C.length, arm_T.length, t_C, t_T, spectrum, layout.c)
        envelope = abs(g) / rate
        fluct = scale * envelope**2
        background = scale
        fringe = 0.0
    elif layout.kind is LayoutKind.DOUBLE_MZ:
        lc, lt = layout.long_arm("C"), layout.long_arm("T")
        sc, st = layout.short_arm("C"), layout.short_arm("T")
        g_long = g_two_path(lc.length, lt.length, t_C, t_T, spectrum, layout.c)
        g_short = g_two_path(sc.length, st.length, t_C, t_T, spectrum, layout.c)
        fringe = phase_difference(layout, spectrum.omega0)
        # moduli carry the envelopes; the relative phase is the fringe phase exactly
        e_long, e_short = abs(g_long) / rate, abs(g_short) / rate
        total = e_long**2 + e_short**2 + 2.0 * e_long * e_short * math.cos(fringe)
        envelope = e_long * e_short
        fluct = scale * total
        background = 4.0 * scale
    else:
        raise UnsupportedLayoutError("no closed form for CUSTOM layouts")
    return AnalyticPrediction(
        fluctuation_correlation=fluct,
        raw_g2=background + fluct,
        background=background,
        fringe_phase=fringe,
        envelope=envelope,
        normalization=scale,
    )


def model_normalization(layout: Layout, spectrum: SourceSpectrum) -> float:
    """Scale implied by the layout's own arm coefficients (product of |coef|^2 over C and T)."""
    if layout.kind is LayoutKind.CUSTOM:
        raise UnsupportedLayoutError("no closed form for CUSTOM layouts")
    arm_C, arm_T = layout.arms_for("C")[0], layout.arms_for("T")[0]
    return spectrum.mean_rate**2 * abs(arm_C.coefficient) ** 2 * abs(arm_T.coefficient) ** 2


def hbt_g2(tau: float, spectrum: SourceSpectrum) -> float:
    return 1.0 + math.exp(-((spectrum.delta_omega * tau) ** 2))


def visibility(mode: str) -> float:
    if mode == "fluctuation":
        return FLUCTUATION_VISIBILITY
    if mode == "raw":
        return RAW_VISIBILITY
    raise ValueError(f"mode must be 'fluctuation' or 'raw', got {mode!r}")


def raw_visibility(background: float, fluctuation_max: float, fluctuation_min: float = 0.0) -> float:
    high = background + fluctuation_max
    low = background + fluctuation_min
    return (high - low) / (high + low)
