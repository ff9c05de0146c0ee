"""Bundled experiment configs.

``dimensionless`` works in coherence units (c = 1, delta_omega = 1) and runs
in seconds per point. ``kim2018`` uses SI units for a 780 nm source with a
120 m coherence length and a 680 m long-short unbalance.
"""
from __future__ import annotations

from .config import ExperimentConfig, parse_config

DIMENSIONLESS = """\
spectrum.omega0 = 100.0
spectrum.delta_omega = 1.0
spectrum.mean_rate = 1.0
grid.n_modes = 256
grid.span_sigma = 5.0
layout.kind = DOUBLE_MZ
layout.c = 1.0
layout.L_C = 51.0
layout.S_C = 1.0
layout.L_T = 51.0
layout.S_T = 1.0
layout.extra_phase_C = 0.0
layout.extra_phase_T = 0.0
run.n_samples = 100000
run.seed = 20180601
run.batches = 32
run.factor = 10.0
run.t_C = 0.0
run.t_T = 0.0
scan.variable = phase_diff
scan.start = 0.0
scan.stop = 6.283185307179586
scan.steps = 9
scan.sweep_mode = ideal
scan.spacing = linear
"""

# omega0 = 2*pi*c / 780 nm, delta_omega = c / 120 m. The 680 m unbalance is
# about 5.7 coherence lengths, so the regime factor is relaxed to 5.
KIM2018 = """\
spectrum.omega0 = 2414937906806222.0
spectrum.delta_omega = 2498270.4833333334
spectrum.mean_rate = 1.0
grid.n_modes = 256
grid.span_sigma = 5.0
layout.kind = DOUBLE_MZ
layout.c = 299792458.0
layout.L_C = 681.0
layout.S_C = 1.0
layout.L_T = 681.0
layout.S_T = 1.0
layout.extra_phase_C = 0.0
layout.extra_phase_T = 0.0
run.n_samples = 100000
run.seed = 20180601
run.batches = 32
run.factor = 5.0
run.t_C = 0.0
run.t_T = 0.0
scan.variable = phase_diff
scan.start = 0.0
scan.stop = 6.283185307179586
scan.steps = 9
scan.sweep_mode = ideal
scan.spacing = linear
"""

PRESETS = {"dimensionless": DIMENSIONLESS, "kim2018": KIM2018}


def preset(name: str) -> ExperimentConfig:
    try:
        text = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return parse_config(text)
