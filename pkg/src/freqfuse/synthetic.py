"""Synthetic few-shot dataset whose classes live in the low-frequency band.

Each class is a fixed random pattern on the DCT coefficients with
``1 <= u + v`` and ``u, v < pattern_band``. Every image adds i.i.d. Gaussian
noise to the coefficients *outside* the box that a ``retention_ratio`` box
low-pass keeps, so that filter removes the noise exactly and leaves the class
pattern intact. Images are written as 8-bit PGM files with train/val/test
manifests over disjoint class sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .episodes import DatasetSplit, Role, write_split_manifest
from .imageio import from_unit_interval, save_pnm
from .lowpass import box_bounds
from .transform import Spectrum, dct2_inverse

__all__ = ["SyntheticSpec", "class_pattern", "synthesize_image", "generate_dataset"]


@dataclass(frozen=True)
class SyntheticSpec:
    size: int = 84
    classes: tuple[int, int, int] = (10, 5, 10)  # train, val, test
    images_per_class: int = 20
    pattern_band: int = 6
    pattern_std: float = 0.06
    noise_std: float = 0.05
    background: float = 0.25
    retention_ratio: float = 0.15
    seed: int = 2024


def class_pattern(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    """Low-band orthonormal DCT coefficients defining one class (DC excluded)."""
    coeffs = np.zeros((spec.size, spec.size))
    b = spec.pattern_band
    coeffs[:b, :b] = rng.normal(0.0, spec.pattern_std, size=(b, b))
    coeffs[0, 0] = 0.0
    return coeffs


def synthesize_image(spec: SyntheticSpec, pattern: np.ndarray,
                     rng: np.random.Generator) -> np.ndarray:
    """Float image in [0, 1]: background + class pattern + high-band noise."""
    n = spec.size
    rows, cols = box_bounds(n, n, spec.retention_ratio)
    if spec.pattern_band > min(rows, cols):
        raise ValueError("pattern band must fit inside the retained box")
    noise = rng.normal(0.0, spec.noise_std, size=(n, n))
    noise[:rows, :cols] = 0.0
    coeffs = pattern + noise
    coeffs[0, 0] = spec.background * n  # orthonormal DC of a constant image
    return np.clip(dct2_inverse(Spectrum(coeffs)), 0.0, 1.0)


def generate_dataset(out_dir, spec: SyntheticSpec = SyntheticSpec()) -> dict[Role, Path]:
    """Write images and ``train.txt``/``val.txt``/``test.txt``; return manifest paths."""
    out = Path(out_dir)
    rng = np.random.default_rng(spec.seed)
    manifests = {}
    class_id = 0
    for role, n_classes in zip(Role, spec.classes):
        classes = {}
        for _ in range(n_classes):
            label = f"class{class_id:03d}"
            class_id += 1
            folder = out / role.value / label
            folder.mkdir(parents=True, exist_ok=True)
            pattern = class_pattern(spec, rng)
            paths = []
            for j in range(spec.images_per_class):
                img = synthesize_image(spec, pattern, rng)
                path = folder / f"{j:03d}.pgm"
                save_pnm(from_unit_interval(img), path)
                paths.append(str(path))
            classes[label] = paths
        manifest = out / f"{role.value}.txt"
        write_split_manifest(DatasetSplit(f"synthetic-{role.value}", classes, role), manifest)
        manifests[role] = manifest
    return manifests
