"""Spatial/frequency fusion: low-pass reconstruction added back onto the image."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .lowpass import LowpassParams, apply_lowpass
from .transform import ScalingMode, as_gray, dct2_forward, dct2_inverse

__all__ = [
    "Combine",
    "FusionParams",
    "FusedImage",
    "reconstruct_lowfreq",
    "fuse",
    "preprocess",
]


class Combine(str, enum.Enum):
    ADD_CLAMP = "addclamp"
    AVERAGE = "average"


@dataclass(frozen=True)
class FusionParams:
    lowpass: LowpassParams = field(default_factory=LowpassParams)
    combine: Combine = Combine.ADD_CLAMP
    scaling: ScalingMode = ScalingMode.ORTHONORMAL

    def __post_init__(self):
        object.__setattr__(self, "combine", Combine(self.combine))
        object.__setattr__(self, "scaling", ScalingMode.parse(self.scaling))

    def as_dict(self) -> dict:
        return {
            **self.lowpass.as_dict(),
            "combine": self.combine.value,
            "scaling": self.scaling.value,
        }


@dataclass(frozen=True, eq=False)
class FusedImage:
    image: np.ndarray
    params: FusionParams


def reconstruct_lowfreq(image, params: FusionParams) -> np.ndarray:
    """``idct(lowpass(dct(image)))``. Not clamped."""
    spectrum = dct2_forward(image, params.scaling)
    return dct2_inverse(apply_lowpass(spectrum, params.lowpass), params.scaling)


def fuse(image, params: FusionParams) -> FusedImage:
    x = as_gray(image)
    recon = reconstruct_lowfreq(x, params)
    if params.combine is Combine.ADD_CLAMP:
        out = np.clip(x + recon, 0.0, 1.0)
    else:
        # clip only guards rounding when recon leaves [0, 1]
        out = np.clip(0.5 * x + 0.5 * recon, 0.0, 1.0)
    return FusedImage(out, params)


def preprocess(image, params: FusionParams) -> np.ndarray:
    """Fuse every channel of an ``(H, W)`` or ``(H, W, C)`` image independently.

    Accepts a float array in [0, 1] or a :class:`~freqfuse.imageio.PixelImage`;
    returns a float array of the same shape as the input channels.
    """
    from .imageio import PixelImage

    if isinstance(image, PixelImage):
        arr = image.to_float()
    else:
        arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        return fuse(arr, params).image
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ValueError(f"expected 1 or 3 channels, got shape {arr.shape}")
    channels = [fuse(arr[:, :, c], params).image for c in range(arr.shape[2])]
    return np.stack(channels, axis=2)
