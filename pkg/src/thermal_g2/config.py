"""Flat ``section.key = value`` experiment configs.

Lines starting with ``#`` and blank lines are ignored. Every key belongs to
one of the sections below; unknown sections or keys are rejected with the
offending dotted path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigParseError, ConfigurationError
from .field import DEFAULT_N_SAMPLES
from .layout import DEFAULT_FACTOR, Layout, LayoutKind, double_mz_layout, hbt_layout
from .spectral import DEFAULT_N_MODES, DEFAULT_SPAN_SIGMA, SourceSpectrum, build_grid
from .stats import DEFAULT_BATCHES

SCAN_VARIABLES = ("phase_diff", "common_phase", "time_delay", "unbalance")
SWEEP_MODES = ("ideal", "physical")
SPACINGS = ("linear", "log")
REQUIRED = object()


@dataclass(frozen=True)
class SpectrumBlock:
    omega0: float = REQUIRED
    delta_omega: float = REQUIRED
    mean_rate: float = REQUIRED


@dataclass(frozen=True)
class GridBlock:
    n_modes: int = DEFAULT_N_MODES
    span_sigma: float = DEFAULT_SPAN_SIGMA


@dataclass(frozen=True)
class LayoutBlock:
    kind: str = REQUIRED
    c: float = 1.0
    L_C: float | None = None
    S_C: float | None = None
    L_T: float | None = None
    S_T: float | None = None
    l_C: float | None = None
    l_T: float | None = None
    extra_phase_C: float = 0.0
    extra_phase_T: float = 0.0


@dataclass(frozen=True)
class RunBlock:
    n_samples: int = DEFAULT_N_SAMPLES
    seed: int = 0
    batches: int = DEFAULT_BATCHES
    factor: float = DEFAULT_FACTOR
    t_C: float = 0.0
    t_T: float = 0.0


@dataclass(frozen=True)
class ScanBlock:
    variable: str = REQUIRED
    start: float = REQUIRED
    stop: float = REQUIRED
    steps: int = REQUIRED
    sweep_mode: str = "ideal"
    spacing: str = "linear"


BLOCKS = {
    "spectrum": SpectrumBlock,
    "grid": GridBlock,
    "layout": LayoutBlock,
    "run": RunBlock,
    "scan": ScanBlock,
}
_INT_KEYS = {"n_modes", "n_samples", "seed", "batches", "steps"}
_STR_KEYS = {"kind", "variable", "sweep_mode", "spacing"}


@dataclass(frozen=True)
class ExperimentConfig:
    spectrum: SpectrumBlock
    grid: GridBlock
    layout: LayoutBlock
    run: RunBlock
    scan: ScanBlock | None = None

    def source(self) -> SourceSpectrum:
        s = self.spectrum
        return SourceSpectrum(s.omega0, s.delta_omega, s.mean_rate)

    def build_layout(self, **overrides) -> Layout:
        b = replace(self.layout, **overrides) if overrides else self.layout
        if b.kind == LayoutKind.HBT.value:
            return hbt_layout(b.l_C, b.l_T, c=b.c)
        return double_mz_layout(b.L_C, b.S_C, b.L_T, b.S_T, b.extra_phase_C, b.extra_phase_T, c=b.c)

    def with_seed(self, seed: int) -> ExperimentConfig:
        return replace(self, run=replace(self.run, seed=seed))

    def scan_values(self) -> list[float]:
        if self.scan is None:
            raise ConfigParseError("scan", "section is required for this command")
        s = self.scan
        if s.steps == 1:
            return [s.start]
        if s.spacing == "log":
            ratio = (s.stop / s.start) ** (1.0 / (s.steps - 1))
            return [s.start * ratio**i for i in range(s.steps)]
        step = (s.stop - s.start) / (s.steps - 1)
        return [s.start + i * step for i in range(s.steps)]


def _convert(section: str, key: str, raw: str):
    path = f"{section}.{key}"
    if key in _STR_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            value = int(raw)
        else:
            value = float(raw)
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigParseError(path, f"expected {kind}, got {raw!r}") from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ConfigParseError(path, f"value must be finite, got {raw!r}")
    return value


def parse_config(text: str) -> ExperimentConfig:
    entries: dict[str, dict] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"line {lineno}", f"expected 'section.key = value', got {line!r}")
        dotted, raw = (part.strip() for part in line.split("=", 1))
        section, _, key = dotted.partition(".")
        if section not in BLOCKS:
            raise ConfigParseError(dotted, f"unknown section {section!r}")
        names = {f.name for f in fields(BLOCKS[section])}
        if key not in names:
            raise ConfigParseError(dotted, "unknown key")
        block = entries.setdefault(section, {})
        if key in block:
            raise ConfigParseError(dotted, "duplicate key")
        block[key] = _convert(section, key, raw)

    built = {}
    for section, cls in BLOCKS.items():
        if section not in entries:
            if section == "scan":
                built[section] = None
                continue
            raise ConfigParseError(section, "section is missing")
        values = entries[section]
        for f in fields(cls):
            if f.default is REQUIRED and f.name not in values:
                raise ConfigParseError(f"{section}.{f.name}", "required key is missing")
        built[section] = cls(**values)
    config = ExperimentConfig(**built)
    _validate(config)
    return config


def _validate(config: ExperimentConfig):
    try:
        config.source()
    except ConfigurationError as exc:
        raise ConfigParseError("spectrum", str(exc)) from None

    b = config.layout
    if b.kind not in (LayoutKind.HBT.value, LayoutKind.DOUBLE_MZ.value):
        raise ConfigParseError("layout.kind", f"must be HBT or DOUBLE_MZ, got {b.kind!r}")
    needed = ("l_C", "l_T") if b.kind == LayoutKind.HBT.value else ("L_C", "S_C", "L_T", "S_T")
    other = {"l_C", "l_T", "L_C", "S_C", "L_T", "S_T"} - set(needed)
    for key in needed:
        if getattr(b, key) is None:
            raise ConfigParseError(f"layout.{key}", f"required for {b.kind} layouts")
    for key in sorted(other):
        if getattr(b, key) is not None:
            raise ConfigParseError(f"layout.{key}", f"not used by {b.kind} layouts")
    try:
        config.build_layout()
    except ConfigurationError as exc:
        raise ConfigParseError("layout", str(exc)) from None

    r = config.run
    if r.n_samples < 2:
        raise ConfigParseError("run.n_samples", "must be >= 2")
    if r.batches < 2 or r.batches > r.n_samples:
        raise ConfigParseError("run.batches", "must be between 2 and run.n_samples")
    if not r.factor > 1:
        raise ConfigParseError("run.factor", "must exceed 1")
    if r.seed < 0:
        raise ConfigParseError("run.seed", "must be non-negative")
    try:
        build_grid(config.source(), config.grid.n_modes, config.grid.span_sigma)
    except ConfigurationError as exc:
        raise ConfigParseError("grid", str(exc)) from None

    s = config.scan
    if s is None:
        return
    if s.variable not in SCAN_VARIABLES:
        raise ConfigParseError("scan.variable", f"must be one of {SCAN_VARIABLES}, got {s.variable!r}")
    if s.sweep_mode not in SWEEP_MODES:
        raise ConfigParseError("scan.sweep_mode", f"must be one of {SWEEP_MODES}, got {s.sweep_mode!r}")
    if s.spacing not in SPACINGS:
        raise ConfigParseError("scan.spacing", f"must be one of {SPACINGS}, got {s.spacing!r}")
    if s.steps < 1:
        raise ConfigParseError("scan.steps", "must be >= 1")
    if s.stop < s.start:
        raise ConfigParseError("scan.stop", "must be >= scan.start")
    if s.spacing == "log" and s.start <= 0:
        raise ConfigParseError("scan.start", "log spacing needs a positive start")


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config: ExperimentConfig) -> str:
    lines = []
    for section in BLOCKS:
        block = getattr(config, section)
        if block is None:
            continue
        for f in fields(block):
            value = getattr(block, f.name)
            if value is None:
                continue
            lines.append(f"{section}.{f.name} = {_format_value(value)}")
        lines.append("")
    return "\n".join(lines)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
