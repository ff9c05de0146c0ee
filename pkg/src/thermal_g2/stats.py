"""Ensemble statistics: estimates with error bars, batch means, fringe fits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError

DEFAULT_BATCHES = 32


@dataclass(frozen=True)
class CorrelationEstimate:
    mean: float
    stderr: float
    n_samples: int

    def ratio_to(self, other: CorrelationEstimate) -> float:
        return self.mean / other.mean


def combined_stderr(*estimates) -> float:
    return math.sqrt(sum(e.stderr**2 for e in estimates))


def sample_mean(values: np.ndarray) -> CorrelationEstimate:
    """Plain mean with the i.i.d. standard error."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        raise EstimationError(f"need at least 2 samples, got {n}")
    return CorrelationEstimate(float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(n)), n)


def batch_stderr(statistic, arrays, batches: int = DEFAULT_BATCHES) -> float:
    """Standard error of ``statistic(*arrays)`` from contiguous batch means."""
    n = len(arrays[0])
    if batches < 2:
        raise EstimationError(f"need at least 2 batches, got {batches}")
    if n < batches:
        raise EstimationError(f"{n} samples cannot fill {batches} batches")
    bounds = np.linspace(0, n, batches + 1).astype(int)
    values = np.array(
        [statistic(*(a[lo:hi] for a in arrays)) for lo, hi in zip(bounds[:-1], bounds[1:])]
    )
    # batches of unequal size differ by at most one sample
    return float(np.std(values, ddof=1) / math.sqrt(batches))


def covariance(x: np.ndarray, y: np.ndarray) -> float:
    n = len(x)
    return float(np.sum((x - np.mean(x)) * (y - np.mean(y))) / (n - 1))


def covariance_estimate(x, y, batches: int = DEFAULT_BATCHES) -> CorrelationEstimate:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    stderr = batch_stderr(covariance, (x, y), batches)
    return CorrelationEstimate(covariance(x, y), stderr, x.size)


def _g2(x, y):
    return float(np.mean(x * y) / (np.mean(x) * np.mean(y)))


def g2_estimate(x, y, batches: int = DEFAULT_BATCHES) -> CorrelationEstimate:
    """Normalized correlation ``<xy> / (<x><y>)`` with a batch-means error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    stderr = batch_stderr(_g2, (x, y), batches)
    return CorrelationEstimate(_g2(x, y), stderr, x.size)


@dataclass(frozen=True)
class SinusoidFit:
    """``offset + amplitude * cos(x - phase)`` fitted by weighted least squares."""

    offset: float
    amplitude: float
    phase: float
    visibility: float
    visibility_stderr: float
    relative_residual: float

    def __call__(self, x):
        return self.offset + self.amplitude * np.cos(np.asarray(x) - self.phase)


def fit_sinusoid(x, y, sigma=None) -> SinusoidFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if sigma is None or np.any(np.asarray(sigma) <= 0):
        w = np.ones_like(y)
    else:
        w = 1.0 / np.asarray(sigma, dtype=float)
    design = np.column_stack([np.ones_like(x), np.cos(x), np.sin(x)])
    if np.linalg.matrix_rank(design) < 3:
        raise EstimationError("phase samples do not determine a sinusoid")
    coef, *_ = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)
    m, a, b = coef
    amplitude = math.hypot(a, b)
    visibility = amplitude / m if m != 0 else math.nan

    # first-order propagation of the weighted-fit covariance into amplitude/offset
    if sigma is None:
        vis_err = math.nan
    else:
        cov = np.linalg.inv((design * w[:, None]).T @ (design * w[:, None]))
        if amplitude > 0:
            grad = np.array([-amplitude / m**2, a / (amplitude * m), b / (amplitude * m)])
        else:
            grad = np.array([0.0, 1.0 / m, 0.0])
        vis_err = float(math.sqrt(max(grad @ cov @ grad, 0.0)))

    fitted = design @ coef
    scale = np.max(np.abs(fitted))
    residual = float(np.sqrt(np.mean((y - fitted) ** 2)) / scale) if scale > 0 else math.nan
    return SinusoidFit(float(m), amplitude, float(math.atan2(b, a)), visibility, vis_err, residual)


def fit_raised_cosine(x, y) -> tuple[float, float]:
    """Best ``A`` for ``y ~ A * (1 + cos x)`` and the relative RMS residual."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = 1.0 + np.cos(x)
    amplitude = float(shape @ y / (shape @ shape))
    fitted = amplitude * shape
    residual = float(np.sqrt(np.mean((y - fitted) ** 2)) / np.max(np.abs(fitted)))
    return amplitude, residual


def fit_scale(model, data, sigma=None) -> float:
    """Least-squares factor ``s`` minimising ``|data - s * model|`` (weighted)."""
    model = np.asarray(model, dtype=float)
    data = np.asarray(data, dtype=float)
    w = np.ones_like(data) if sigma is None else 1.0 / np.asarray(sigma, dtype=float) ** 2
    denom = float(np.sum(w * model * model))
    if denom == 0:
        return 0.0
    return float(np.sum(w * model * data) / denom)
