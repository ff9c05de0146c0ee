"""Interferometer geometries and the coherence-regime check.

A layout is a flat list of propagation arms from the source to the two
detectors ``C`` and ``T``. Carrier phases ``omega0 * l / c`` are reduced
modulo 2*pi in extended precision, so SI-scale geometries (optical carrier,
hundreds of metres of path) keep sub-microradian phase accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import mpmath

from .errors import ConfigurationError, UnsupportedLayoutError
from .spectral import SourceSpectrum

DETECTORS = ("C", "T")
TWO_PI = 2.0 * math.pi
DEFAULT_FACTOR = 10.0
_PHASE_DPS = 60


class LayoutKind(str, Enum):
    HBT = "HBT"
    DOUBLE_MZ = "DOUBLE_MZ"
    CUSTOM = "CUSTOM"


@dataclass(frozen=True)
class PathArm:
    detector: str
    length: float
    coefficient: complex
    extra_phase: float = 0.0

    def __post_init__(self):
        if self.detector not in DETECTORS:
            raise ConfigurationError(f"detector must be one of {DETECTORS}, got {self.detector!r}")
        if not math.isfinite(self.length) or self.length < 0:
            raise ConfigurationError(f"arm length must be finite and >= 0, got {self.length!r}")
        if abs(self.coefficient) > 1.0 + 1e-12:
            raise ConfigurationError(f"|coefficient| must be <= 1, got {abs(self.coefficient)!r}")


@dataclass(frozen=True)
class Layout:
    arms: tuple[PathArm, ...]
    kind: LayoutKind = LayoutKind.CUSTOM
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(self.arms))
        object.__setattr__(self, "kind", LayoutKind(self.kind))
        if not math.isfinite(self.c) or self.c <= 0:
            raise ConfigurationError(f"speed of light must be positive, got {self.c!r}")
        counts = {d: len(self.arms_for(d)) for d in DETECTORS}
        for d, n in counts.items():
            if n == 0:
                raise ConfigurationError(f"detector {d} has no arms")
        if self.kind is LayoutKind.HBT and set(counts.values()) != {1}:
            raise ConfigurationError("HBT layout needs exactly one arm per detector")
        if self.kind is LayoutKind.DOUBLE_MZ:
            if set(counts.values()) != {2}:
                raise ConfigurationError("DOUBLE_MZ layout needs exactly two arms per detector")
            for d in DETECTORS:
                short, long_ = sorted(self.arms_for(d), key=lambda a: a.length)
                if not long_.length > short.length:
                    raise ConfigurationError(f"detector {d}: long arm must be longer than short arm")

    def arms_for(self, detector: str) -> tuple[PathArm, ...]:
        return tuple(a for a in self.arms if a.detector == detector)

    def long_arm(self, detector: str) -> PathArm:
        self._require_double_mz()
        return max(self.arms_for(detector), key=lambda a: a.length)

    def short_arm(self, detector: str) -> PathArm:
        self._require_double_mz()
        return min(self.arms_for(detector), key=lambda a: a.length)

    def swapped(self) -> Layout:
        """Same geometry with the C and T labels exchanged."""
        other = {"C": "T", "T": "C"}
        arms = [replace(a, detector=other[a.detector]) for a in self.arms]
        arms.sort(key=lambda a: a.detector)
        return replace(self, arms=tuple(arms))

    def _require_double_mz(self):
        if self.kind is not LayoutKind.DOUBLE_MZ:
            raise UnsupportedLayoutError(f"operation needs a DOUBLE_MZ layout, got {self.kind.value}")


@dataclass(frozen=True)
class RegimeReport:
    same_type_ratios: list = field(default_factory=list)
    cross_type_ratios: list = field(default_factory=list)
    detection_ratio: float = 0.0
    factor: float = DEFAULT_FACTOR
    passed: bool = True

    def format(self) -> str:
        lines = [f"threshold factor: {self.factor:g}"]
        for label, value in self.same_type_ratios:
            lines.append(f"same-type  {label}: {value:.6g} (need < {1 / self.factor:.6g})")
        for label, value in self.cross_type_ratios:
            lines.append(f"cross-type {label}: {value:.6g} (need > {self.factor:.6g})")
        lines.append(f"detection  t_C-t_T: {self.detection_ratio:.6g} (need < {1 / self.factor:.6g})")
        lines.append("regime: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def hbt_layout(l_C: float, l_T: float, c: float = 1.0) -> Layout:
    coefficient = complex(1.0 / math.sqrt(2.0))
    return Layout(
        arms=(PathArm("C", float(l_C), coefficient), PathArm("T", float(l_T), coefficient)),
        kind=LayoutKind.HBT,
        c=c,
    )


def double_mz_layout(
    L_C: float,
    S_C: float,
    L_T: float,
    S_T: float,
    extra_phase_C: float = 0.0,
    extra_phase_T: float = 0.0,
    c: float = 1.0,
) -> Layout:
    """Twin unbalanced Mach-Zehnder layout; extra phases sit on the long arms.

    Every arm carries amplitude 1/2: a balanced splitter feeds the two
    interferometers and only one output port of each is detected.
    """
    for d, long_, short in (("C", L_C, S_C), ("T", L_T, S_T)):
        if not short >= 0:
            raise ConfigurationError(f"S_{d} must be >= 0, got {short!r}")
        if not long_ > short:
            raise ConfigurationError(f"L_{d} must exceed S_{d}, got L={long_!r}, S={short!r}")
    half = complex(0.5)
    arms = (
        PathArm("C", float(L_C), half, float(extra_phase_C)),
        PathArm("C", float(S_C), half),
        PathArm("T", float(L_T), half, float(extra_phase_T)),
        PathArm("T", float(S_T), half),
    )
    return Layout(arms=arms, kind=LayoutKind.DOUBLE_MZ, c=c)


def wrap_phase(x) -> float:
    """Reduce an mpmath or float phase to [0, 2*pi) in extended precision."""
    with mpmath.workdps(_PHASE_DPS):
        twopi = 2 * mpmath.pi
        r = mpmath.fmod(mpmath.mpf(x), twopi)
        if r < 0:
            r += twopi
        out = float(r)
    # rounding to float can land exactly on 2*pi
    return 0.0 if out >= TWO_PI else out


def carrier_phase(omega0: float, length: float, c: float, t: float = 0.0) -> float:
    """``omega0 * (length / c - t)`` reduced to [0, 2*pi) without float cancellation."""
    with mpmath.workdps(_PHASE_DPS):
        x = mpmath.mpf(omega0) * (mpmath.mpf(length) / mpmath.mpf(c) - mpmath.mpf(t))
        return wrap_phase(x)


def relative_phase(layout: Layout, detector: str, omega0: float) -> float:
    long_, short = layout.long_arm(detector), layout.short_arm(detector)
    with mpmath.workdps(_PHASE_DPS):
        x = mpmath.mpf(omega0) * (mpmath.mpf(long_.length) - mpmath.mpf(short.length)) / mpmath.mpf(layout.c)
        x += mpmath.mpf(long_.extra_phase) - mpmath.mpf(short.extra_phase)
        return wrap_phase(x)


def phase_difference(layout: Layout, omega0: float) -> float:
    """Fringe phase ``phi_C - phi_T`` in [0, 2*pi)."""
    lc, sc = layout.long_arm("C"), layout.short_arm("C")
    lt, st = layout.long_arm("T"), layout.short_arm("T")
    mpf = mpmath.mpf
    with mpmath.workdps(_PHASE_DPS):
        geometric = (mpf(lc.length) - mpf(sc.length)) - (mpf(lt.length) - mpf(st.length))
        x = mpf(omega0) * geometric / mpf(layout.c)
        x += (mpf(lc.extra_phase) - mpf(sc.extra_phase)) - (mpf(lt.extra_phase) - mpf(st.extra_phase))
        return wrap_phase(x)


def validate_regime(
    layout: Layout,
    spectrum: SourceSpectrum,
    t_C: float = 0.0,
    t_T: float = 0.0,
    factor: float = DEFAULT_FACTOR,
) -> RegimeReport:
    """Compare path and detection delays against the coherence time.

    Never raises for an out-of-regime geometry; ``passed`` carries the verdict.
    For CUSTOM layouts path types are undefined and only the detection-time
    clause is evaluated.
    """
    if not factor > 1:
        raise ConfigurationError(f"factor must exceed 1, got {factor!r}")
    scale = spectrum.delta_omega / layout.c
    same, cross = [], []
    if layout.kind is LayoutKind.HBT:
        (a,), (b,) = layout.arms_for("C"), layout.arms_for("T")
        same.append(("l_C-l_T", scale * abs(a.length - b.length)))
    elif layout.kind is LayoutKind.DOUBLE_MZ:
        same.append(("L_C-L_T", scale * abs(layout.long_arm("C").length - layout.long_arm("T").length)))
        same.append(("S_C-S_T", scale * abs(layout.short_arm("C").length - layout.short_arm("T").length)))
        for d in DETECTORS:
            cross.append((f"L_{d}-S_{d}", scale * abs(layout.long_arm(d).length - layout.short_arm(d).length)))
    detection = spectrum.delta_omega * abs(t_C - t_T)
    passed = (
        all(v < 1.0 / factor for _, v in same)
        and all(v > factor for _, v in cross)
        and detection < 1.0 / factor
    )
    return RegimeReport(same, cross, detection, factor, passed)
