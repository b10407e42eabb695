"""Binary PGM (P5) / PPM (P6) reading and writing, maxval 255 only."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PnmError",
    "BadMagicError",
    "BadHeaderError",
    "UnsupportedMaxvalError",
    "TruncatedPayloadError",
    "PixelImage",
    "read_pnm",
    "write_pnm",
    "load_pnm",
    "save_pnm",
    "to_unit_interval",
    "from_unit_interval",
    "to_grayscale",
    "LUMA_WEIGHTS",
]

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
_WHITESPACE = b" \t\n\r\v\f"
_MAGIC_CHANNELS = {b"P5": 1, b"P6": 3}


class PnmError(ValueError):
    pass


class BadMagicError(PnmError):
    pass


class BadHeaderError(PnmError):
    pass


class UnsupportedMaxvalError(PnmError):
    pass


class TruncatedPayloadError(PnmError):
    pass


@dataclass(frozen=True, eq=False)
class PixelImage:
    """8-bit image, ``samples`` shaped ``(height, width, channels)``."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim == 2:
            s = s[:, :, None]
        if s.ndim != 3 or s.shape[2] not in (1, 3):
            raise ValueError(f"expected (H, W, 1|3) samples, got shape {s.shape}")
        if s.shape[0] < 1 or s.shape[1] < 1:
            raise ValueError("image dimensions must be positive")
        if s.dtype != np.uint8:
            if np.any(s < 0) or np.any(s > 255) or np.any(s != np.round(s)):
                raise ValueError("samples must be integers in [0, 255]")
            s = s.astype(np.uint8)
        s = np.ascontiguousarray(s)
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    def __eq__(self, other):
        if not isinstance(other, PixelImage):
            return NotImplemented
        return (self.samples.shape == other.samples.shape
                and bool(np.array_equal(self.samples, other.samples)))

    def to_float(self) -> np.ndarray:
        """Samples divided by 255, shape ``(H, W, C)``."""
        return self.samples.astype(np.float64) / 255.0


def _tokens(data: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        if pos >= n:
            raise BadHeaderError("header ended before width/height/maxval")
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        out.append(data[start:pos])
    return out, pos


def read_pnm(data: bytes) -> PixelImage:
    data = bytes(data)
    magic = data[:2]
    if magic not in _MAGIC_CHANNELS:
        raise BadMagicError(f"unsupported magic number {magic!r}; expected P5 or P6")
    channels = _MAGIC_CHANNELS[magic]
    fields, pos = _tokens(data, 3, 2)
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise BadHeaderError(f"non-integer header field in {fields!r}") from None
    if width < 1 or height < 1:
        raise BadHeaderError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxvalError(f"maxval {maxval} unsupported; only 255")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise BadHeaderError("missing whitespace after maxval")
    pos += 1
    size = width * height * channels
    payload = data[pos:pos + size]
    if len(payload) < size:
        raise TruncatedPayloadError(f"expected {size} sample bytes, found {len(payload)}")
    samples = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return PixelImage(samples.copy())


def write_pnm(image: PixelImage) -> bytes:
    magic = "P5" if image.channels == 1 else "P6"
    header = f"{magic} {image.width} {image.height} 255\n".encode("ascii")
    return header + image.samples.tobytes()


def load_pnm(path) -> PixelImage:
    with open(path, "rb") as fh:
        return read_pnm(fh.read())


def save_pnm(image: PixelImage, path) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(write_pnm(image))
    os.replace(tmp, path)


def to_unit_interval(image: PixelImage) -> list[np.ndarray]:
    """One ``(H, W)`` float64 matrix per channel, ``v / 255``."""
    f = image.to_float()
    return [f[:, :, c].copy() for c in range(image.channels)]


def from_unit_interval(matrices) -> PixelImage:
    """Quantize per-channel matrices back to 8 bits.

    Values are clamped to [0, 1], scaled by 255 and rounded half away from
    zero. Accepts a list of ``(H, W)`` matrices, a single ``(H, W)`` matrix,
    or an ``(H, W, C)`` array.
    """
    if isinstance(matrices, np.ndarray):
        arr = matrices.astype(np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
    else:
        arr = np.stack([np.asarray(m, dtype=np.float64) for m in matrices], axis=2)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite values cannot be quantized")
    scaled = np.clip(arr, 0.0, 1.0) * 255.0
    q = np.floor(scaled + 0.5)  # half away from zero; scaled is >= 0
    return PixelImage(np.clip(q, 0, 255).astype(np.uint8))


def to_grayscale(image: PixelImage) -> np.ndarray:
    """Single ``(H, W)`` matrix in [0, 1]; RGB uses Rec. 601 luma weights."""
    f = image.to_float()
    if image.channels == 1:
        return f[:, :, 0]
    r, g, b = LUMA_WEIGHTS
    return r * f[:, :, 0] + g * f[:, :, 1] + b * f[:, :, 2]
