"""Low-frequency retention on DCT spectra.

Two strategies:

* box: keep the top-left ``floor(h*sqrt(r)) x floor(w*sqrt(r))`` block, so
  ``r`` is the retained area fraction.
* gradient: keep coefficients whose local gradient magnitude inside the
  coefficient matrix is at most ``mean + k * std`` of all magnitudes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .transform import Spectrum

__all__ = [
    "Strategy",
    "LowpassParams",
    "GradientStats",
    "box_bounds",
    "box_lowpass",
    "gradient_magnitudes",
    "gradient_stats",
    "gradient_lowpass",
    "apply_lowpass",
    "count_retained",
]

DEFAULT_RETENTION_RATIO = 0.15
DEFAULT_SIGMA_MULTIPLIER = 2.0


class Strategy(str, enum.Enum):
    BOX = "box"
    GRADIENT = "gradient"


@dataclass(frozen=True)
class LowpassParams:
    strategy: Strategy = Strategy.BOX
    retention_ratio: float = DEFAULT_RETENTION_RATIO
    sigma_multiplier: float = DEFAULT_SIGMA_MULTIPLIER

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        _check_ratio(self.retention_ratio)
        _check_multiplier(self.sigma_multiplier)

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "retention_ratio": self.retention_ratio,
            "sigma_multiplier": self.sigma_multiplier,
        }


@dataclass(frozen=True)
class GradientStats:
    mean: float
    stddev: float
    threshold: float


def _check_ratio(r):
    if not (0.0 <= r <= 1.0):
        raise ValueError(f"retention ratio must lie in [0, 1], got {r}")


def _check_multiplier(k):
    if math.isnan(k) or k < 0:
        raise ValueError(f"sigma multiplier must be non-negative, got {k}")


def box_bounds(height: int, width: int, r: float) -> tuple[int, int]:
    """Number of retained rows and columns for retention ratio ``r``."""
    _check_ratio(r)
    s = math.sqrt(r)
    return math.floor(height * s), math.floor(width * s)


def box_lowpass(spectrum: Spectrum, r: float = DEFAULT_RETENTION_RATIO) -> Spectrum:
    rows, cols = box_bounds(spectrum.height, spectrum.width, r)
    out = np.zeros(spectrum.shape)
    out[:rows, :cols] = spectrum.coeffs[:rows, :cols]
    return spectrum.replace(out)


def _require_2x2(spectrum: Spectrum):
    if spectrum.height < 2 or spectrum.width < 2:
        raise ValueError(
            f"gradient filter needs at least 2x2 coefficients, got {spectrum.shape}")


def gradient_magnitudes(spectrum: Spectrum) -> np.ndarray:
    """Per-coefficient gradient magnitude of the coefficient matrix.

    Central differences in the interior, first-order one-sided differences
    on the borders (the ``numpy.gradient`` stencil with unit spacing).
    """
    _require_2x2(spectrum)
    d_rows, d_cols = np.gradient(spectrum.coeffs)
    return np.sqrt(d_cols * d_cols + d_rows * d_rows)


def gradient_stats(magnitudes: np.ndarray, k: float = DEFAULT_SIGMA_MULTIPLIER) -> GradientStats:
    _check_multiplier(k)
    mu = float(np.mean(magnitudes))
    sigma = float(np.std(magnitudes))  # population (ddof=0)
    threshold = math.inf if math.isinf(k) else mu + k * sigma
    return GradientStats(mu, sigma, threshold)


def gradient_lowpass(spectrum: Spectrum, k: float = DEFAULT_SIGMA_MULTIPLIER) -> Spectrum:
    mags = gradient_magnitudes(spectrum)
    stats = gradient_stats(mags, k)
    out = np.where(mags <= stats.threshold, spectrum.coeffs, 0.0)
    return spectrum.replace(out)


def apply_lowpass(spectrum: Spectrum, params: LowpassParams) -> Spectrum:
    if params.strategy is Strategy.BOX:
        return box_lowpass(spectrum, params.retention_ratio)
    return gradient_lowpass(spectrum, params.sigma_multiplier)


def count_retained(before: Spectrum, after: Spectrum) -> int:
    """Positions where ``after`` still holds the original, nonzero value."""
    if before.shape != after.shape:
        raise ValueError(f"shape mismatch: {before.shape} vs {after.shape}")
    kept = (after.coeffs == before.coeffs) & (after.coeffs != 0.0)
    return int(np.count_nonzero(kept))
