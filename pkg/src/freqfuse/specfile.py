"""Spectrum file format.

Layout, byte for byte::

    b"FFSPEC1\\n"
    b"<height> <width> <scaling>\\n"      # ASCII decimal, one space, tag is
                                         # "orthonormal" or "paper"
    height * width little-endian IEEE-754 float64, row-major
"""

from __future__ import annotations

import numpy as np

from .transform import ScalingMode, Spectrum

__all__ = ["SpectrumFileError", "write_spectrum", "read_spectrum", "save_spectrum", "load_spectrum"]

MAGIC = b"FFSPEC1\n"


class SpectrumFileError(ValueError):
    pass


def write_spectrum(spectrum: Spectrum) -> bytes:
    h, w = spectrum.shape
    header = f"{h} {w} {spectrum.scaling.value}\n".encode("ascii")
    return MAGIC + header + spectrum.coeffs.astype("<f8").tobytes()


def read_spectrum(data: bytes) -> Spectrum:
    if not data.startswith(MAGIC):
        raise SpectrumFileError("not a spectrum file (bad magic)")
    end = data.find(b"\n", len(MAGIC))
    if end < 0:
        raise SpectrumFileError("unterminated header")
    try:
        h, w, tag = data[len(MAGIC):end].decode("ascii").split(" ")
        h, w = int(h), int(w)
        scaling = ScalingMode.parse(tag)
    except ValueError as exc:
        raise SpectrumFileError(f"bad header: {exc}") from None
    if h < 1 or w < 1:
        raise SpectrumFileError(f"invalid dimensions {h}x{w}")
    payload = data[end + 1:]
    if len(payload) != h * w * 8:
        raise SpectrumFileError(f"expected {h * w * 8} payload bytes, found {len(payload)}")
    coeffs = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(h, w)
    try:
        return Spectrum(coeffs, scaling)
    except ValueError as exc:
        raise SpectrumFileError(str(exc)) from None


def save_spectrum(spectrum: Spectrum, path) -> None:
    with open(path, "wb") as fh:
        fh.write(write_spectrum(spectrum))


def load_spectrum(path) -> Spectrum:
    with open(path, "rb") as fh:
        return read_spectrum(fh.read())
