"""Thermal-light second-order interference in twin unbalanced Mach-Zehnder interferometers."""

from .config import ExperimentConfig, load_config, parse_config, serialize_config
from .decomposition import (
    DecompositionEstimate,
    TwoPhotonAmplitude,
    decompose_correlation,
    realization_groups,
    two_photon_amplitude,
)
from .errors import (
    ConfigParseError,
    ConfigurationError,
    EstimationError,
    InvalidPairError,
    ThermalG2Error,
    UnsupportedLayoutError,
)
from .experiment import ScanRow, run_decompose, run_hbt, run_scan
from .field import (
    FieldSample,
    estimate_fluctuation_correlation,
    estimate_intensity_correlation,
    estimate_means,
    point_statistics,
    synthesize_field,
)
from .layout import (
    Layout,
    LayoutKind,
    PathArm,
    RegimeReport,
    double_mz_layout,
    hbt_layout,
    phase_difference,
    relative_phase,
    validate_regime,
)
from .oracle import AnalyticPrediction, g_two_path, predict, visibility
from .presets import preset
from .spectral import (
    FrequencyGrid,
    SourceSpectrum,
    ThermalRealization,
    build_grid,
    mean_occupation,
    sample_realization,
)
from .stats import CorrelationEstimate

__version__ = "0.1.0"
