"""Global 2-D discrete cosine transform (DCT-II) and its inverse.

Images are ``(height, width)`` float64 arrays. Rows are indexed by ``y``
(vertical frequency ``v``), columns by ``x`` (horizontal frequency ``u``).

Two scalings are supported:

* ``ORTHONORMAL``: prefactor ``2/sqrt(N*M) * C(u) * C(v)``. The transform is
  an isometry and the inverse is exact for every size.
* ``PAPER_QUARTER``: the literal ``1/4 * C(u) * C(v)`` prefactor. Forward and
  inverse are only mutually inverse for 8x8 inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "ScalingMode",
    "Spectrum",
    "as_gray",
    "normalization_coefficient",
    "dct_matrix",
    "dct2_forward",
    "dct2_inverse",
    "dct2_naive_oracle",
    "idct2_naive_oracle",
]

ORACLE_MAX_PIXELS = 64 * 64


class ScalingMode(str, enum.Enum):
    ORTHONORMAL = "orthonormal"
    PAPER_QUARTER = "paper"

    @classmethod
    def parse(cls, value: "str | ScalingMode") -> "ScalingMode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"orthonormal": cls.ORTHONORMAL, "ortho": cls.ORTHONORMAL,
                   "paper": cls.PAPER_QUARTER, "paperquarter": cls.PAPER_QUARTER,
                   "paper_quarter": cls.PAPER_QUARTER}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown scaling mode {value!r}") from None


def as_gray(image) -> np.ndarray:
    """Validate and return ``image`` as a 2-D float64 array."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be positive, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains non-finite values")
    return arr


@dataclass(frozen=True, eq=False)
class Spectrum:
    """DCT coefficients tagged with the scaling that produced them."""

    coeffs: np.ndarray
    scaling: ScalingMode = ScalingMode.ORTHONORMAL

    def __post_init__(self):
        coeffs = as_gray(self.coeffs).copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "scaling", ScalingMode.parse(self.scaling))

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape

    @property
    def height(self) -> int:
        return self.coeffs.shape[0]

    @property
    def width(self) -> int:
        return self.coeffs.shape[1]

    def replace(self, coeffs) -> "Spectrum":
        """New spectrum with the same scaling tag."""
        return Spectrum(coeffs, self.scaling)


def normalization_coefficient(index: int) -> float:
    if index < 0:
        raise ValueError("index must be non-negative")
    return math.sqrt(0.5) if index == 0 else 1.0


@lru_cache(maxsize=64)
def _dct_matrix_cached(n: int) -> np.ndarray:
    k = np.arange(n, dtype=np.float64)[:, None]
    x = np.arange(n, dtype=np.float64)[None, :]
    basis = np.cos((2.0 * x + 1.0) * k * math.pi / (2.0 * n))
    basis *= math.sqrt(2.0 / n)
    basis[0, :] *= math.sqrt(0.5)
    basis.flags.writeable = False
    return basis


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal 1-D DCT-II matrix ``T`` with ``T @ T.T == I``.

    ``T[k, x] = sqrt(2/n) * C(k) * cos((2x+1) k pi / 2n)``.
    """
    if n < 1:
        raise ValueError("transform length must be positive")
    return _dct_matrix_cached(int(n))


def _paper_factor(shape: tuple[int, int]) -> float:
    # ratio of the 1/4 prefactor to 2/sqrt(N*M)
    return math.sqrt(shape[0] * shape[1]) / 8.0


def dct2_forward(image, mode: ScalingMode | str = ScalingMode.ORTHONORMAL) -> Spectrum:
    """Separable 2-D DCT: 1-D transform along rows, then along columns."""
    mode = ScalingMode.parse(mode)
    f = as_gray(image)
    h, w = f.shape
    rows = f @ dct_matrix(w).T
    coeffs = dct_matrix(h) @ rows
    if mode is ScalingMode.PAPER_QUARTER:
        coeffs = coeffs * _paper_factor(f.shape)
    return Spectrum(coeffs, mode)


def dct2_inverse(spectrum: Spectrum, mode: ScalingMode | str | None = None) -> np.ndarray:
    """Inverse of :func:`dct2_forward`.

    ``mode`` defaults to the spectrum's own tag; passing a different mode
    raises ``ValueError`` since it means two stages disagree on scaling.
    """
    mode = spectrum.scaling if mode is None else ScalingMode.parse(mode)
    if mode is not spectrum.scaling:
        raise ValueError(
            f"scaling mismatch: spectrum is {spectrum.scaling.value}, "
            f"inverse requested with {mode.value}")
    coeffs = spectrum.coeffs
    h, w = coeffs.shape
    rows = coeffs @ dct_matrix(w)
    image = dct_matrix(h).T @ rows
    if mode is ScalingMode.PAPER_QUARTER:
        image = image * _paper_factor(coeffs.shape)
    return image


def _check_oracle_size(shape):
    if shape[0] * shape[1] > ORACLE_MAX_PIXELS:
        raise ValueError(
            f"naive oracle limited to {ORACLE_MAX_PIXELS} pixels, got {shape}")


def _prefactor(mode: ScalingMode, h: int, w: int) -> float:
    if mode is ScalingMode.PAPER_QUARTER:
        return 0.25
    return 2.0 / math.sqrt(h * w)


def _cos_column(n: int, freq: int) -> np.ndarray:
    pos = np.arange(n, dtype=np.float64)
    return np.cos((2.0 * pos + 1.0) * freq * math.pi / (2.0 * n))


def dct2_naive_oracle(image, mode: ScalingMode | str = ScalingMode.ORTHONORMAL) -> Spectrum:
    """Direct per-coefficient evaluation of the forward DCT, for tests only.

    Every output coefficient is an independent double sum over all pixels,
    O(N^2 M^2) overall. The inner double sum is vectorized but no basis
    matrix or row/column factorization is shared with :func:`dct2_forward`.
    """
    mode = ScalingMode.parse(mode)
    f = as_gray(image)
    _check_oracle_size(f.shape)
    M, N = f.shape  # M rows (height), N columns (width)
    pre = _prefactor(mode, M, N)
    out = np.zeros((M, N))
    for v in range(M):
        cy = _cos_column(M, v)
        for u in range(N):
            cx = _cos_column(N, u)
            acc = np.sum(f * cy[:, None] * cx[None, :])
            out[v, u] = (pre * normalization_coefficient(u)
                         * normalization_coefficient(v) * acc)
    return Spectrum(out, mode)


def idct2_naive_oracle(spectrum: Spectrum) -> np.ndarray:
    """Direct per-pixel evaluation of the inverse DCT, for tests only."""
    F = spectrum.coeffs
    _check_oracle_size(F.shape)
    M, N = F.shape
    pre = _prefactor(spectrum.scaling, M, N)
    cu = np.array([normalization_coefficient(u) for u in range(N)])
    cv = np.array([normalization_coefficient(v) for v in range(M)])
    weighted = F * cv[:, None] * cu[None, :]
    out = np.zeros((M, N))
    ky = np.arange(M, dtype=np.float64)
    kx = np.arange(N, dtype=np.float64)
    for y in range(M):
        cy = np.cos((2.0 * y + 1.0) * ky * math.pi / (2.0 * M))
        for x in range(N):
            cx = np.cos((2.0 * x + 1.0) * kx * math.pi / (2.0 * N))
            out[y, x] = pre * np.sum(weighted * cy[:, None] * cx[None, :])
    return out
