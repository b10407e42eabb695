"""DCT low-frequency fusion preprocessing and a few-shot evaluation harness."""

__version__ = "0.1.0"

from .transform import ScalingMode, Spectrum, dct2_forward, dct2_inverse
from .lowpass import LowpassParams, Strategy, box_lowpass, gradient_lowpass
from .fusion import Combine, FusionParams, FusedImage, fuse, preprocess, reconstruct_lowfreq
from .imageio import PixelImage, read_pnm, write_pnm

__all__ = [
    "ScalingMode", "Spectrum", "dct2_forward", "dct2_inverse",
    "LowpassParams", "Strategy", "box_lowpass", "gradient_lowpass",
    "Combine", "FusionParams", "FusedImage", "fuse", "preprocess", "reconstruct_lowfreq",
    "PixelImage", "read_pnm", "write_pnm",
]
