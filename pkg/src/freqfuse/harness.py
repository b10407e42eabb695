"""Few-shot evaluation harness: fixed feature extractors + nearest-centroid scoring.

Stands in for a trained backbone so that raw and fused preprocessing can be
compared on the same episodes.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

from .episodes import Episode, EvalReport, load_split_manifest, sample_episode, score_tasks
from .fusion import Combine, FusionParams, preprocess
from .imageio import PixelImage, from_unit_interval, load_pnm, to_grayscale
from .lowpass import LowpassParams, Strategy
from .rng import derive_seed
from .transform import ScalingMode, dct_matrix

__all__ = [
    "DownsampledPixels",
    "BlockDctEnergy",
    "ExperimentConfig",
    "ConfigError",
    "ImageLoadError",
    "extract_features",
    "mean_pool",
    "nearest_centroid_classify",
    "episode_accuracy",
    "apply_preprocessing",
    "run_experiment",
    "parse_config",
    "load_config",
    "thread_count",
]

THREADS_ENV = "FREQFUSE_THREADS"


@dataclass(frozen=True)
class DownsampledPixels:
    target_height: int = 84
    target_width: int = 84

    name = "downsampled_pixels"

    def as_dict(self) -> dict:
        return {"extractor": self.name, "target_height": self.target_height,
                "target_width": self.target_width}


@dataclass(frozen=True)
class BlockDctEnergy:
    """Per block: energy in anti-diagonal bands ``u + v = 0 .. bands-1``."""

    block_size: int = 8
    bands: int = 4

    name = "block_dct_energy"

    def __post_init__(self):
        if self.block_size < 1:
            raise ValueError("block_size must be positive")
        if not 1 <= self.bands <= 2 * self.block_size - 1:
            raise ValueError(f"bands must lie in [1, {2 * self.block_size - 1}]")

    def as_dict(self) -> dict:
        return {"extractor": self.name, "block_size": self.block_size, "bands": self.bands}


Extractor = Union[DownsampledPixels, BlockDctEnergy]


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


class ImageLoadError(RuntimeError):
    def __init__(self, path: str, cause: Exception):
        super().__init__(f"cannot read image {path}: {cause}")
        self.path = path


def _l2_normalize(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


def mean_pool(matrix: np.ndarray, target_height: int, target_width: int) -> np.ndarray:
    """Area-average ``matrix`` down to the target size.

    Bin ``i`` along an axis of length ``n`` covers ``[floor(i*n/t), floor((i+1)*n/t))``.
    """
    h, w = matrix.shape
    if target_height > h or target_width > w or target_height < 1 or target_width < 1:
        raise ValueError(
            f"cannot pool {h}x{w} image to {target_height}x{target_width}")
    rows = (np.arange(target_height) * h) // target_height
    cols = (np.arange(target_width) * w) // target_width
    sums = np.add.reduceat(np.add.reduceat(matrix, rows, axis=0), cols, axis=1)
    counts = np.outer(np.diff(np.append(rows, h)), np.diff(np.append(cols, w)))
    return sums / counts


def _block_energy(gray: np.ndarray, ex: BlockDctEnergy) -> np.ndarray:
    b = ex.block_size
    h, w = gray.shape
    if h < b or w < b:
        raise ValueError(f"image {h}x{w} smaller than block size {b}")
    nb_r, nb_c = h // b, w // b
    blocks = gray[:nb_r * b, :nb_c * b].reshape(nb_r, b, nb_c, b).transpose(0, 2, 1, 3)
    t = dct_matrix(b)
    coeffs = t @ blocks @ t.T  # (nb_r, nb_c, b, b)
    band = np.add.outer(np.arange(b), np.arange(b))
    energy = coeffs * coeffs
    feats = np.stack([energy[..., band == k].sum(axis=-1) for k in range(ex.bands)], axis=-1)
    return feats.reshape(-1)


def extract_features(image: PixelImage, extractor: Extractor) -> np.ndarray:
    gray = to_grayscale(image)
    if isinstance(extractor, DownsampledPixels):
        vec = mean_pool(gray, extractor.target_height, extractor.target_width).reshape(-1)
    elif isinstance(extractor, BlockDctEnergy):
        vec = _block_energy(gray, extractor)
    else:
        raise TypeError(f"unknown extractor {extractor!r}")
    return _l2_normalize(vec)


def nearest_centroid_classify(episode: Episode, features: Mapping[str, np.ndarray]) -> list[int]:
    """Predicted class index for each query, in ``episode.query`` order.

    Centroids are summed in sorted-path order so they do not depend on the
    order of the support list. Ties go to the lowest class index.
    """
    missing = [p for p, _ in episode.support + episode.query if p not in features]
    if missing:
        raise KeyError(f"no features for {missing[0]!r}")
    by_class: list[list[str]] = [[] for _ in range(episode.n_way)]
    for path, idx in episode.support:
        by_class[idx].append(path)
    centroids = np.stack([
        np.mean(np.stack([features[p] for p in sorted(paths)]), axis=0)
        for paths in by_class
    ])
    preds = []
    for path, _ in episode.query:
        diff = centroids - features[path]
        dist = np.einsum("ij,ij->i", diff, diff)
        preds.append(int(np.argmin(dist)))
    return preds


def episode_accuracy(episode: Episode, features: Mapping[str, np.ndarray]) -> float:
    preds = nearest_centroid_classify(episode, features)
    correct = sum(p == idx for p, (_, idx) in zip(preds, episode.query))
    return correct / len(episode.query)


@dataclass(frozen=True)
class ExperimentConfig:
    """One evaluation arm. ``preprocessing=None`` means raw images."""

    manifest: str
    n_way: int = 5
    k_shot: int = 1
    q_query: int = 15
    n_tasks: int = 1000
    seed: int = 0
    preprocessing: Optional[FusionParams] = None
    extractor: Extractor = field(default_factory=DownsampledPixels)

    def __post_init__(self):
        if self.n_tasks < 2:
            raise ConfigError("n_tasks", f"must be >= 2, got {self.n_tasks}")
        for key in ("n_way", "k_shot"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be positive")
        if self.q_query < 1:
            raise ConfigError("q_query", "must be positive")

    @property
    def arm(self) -> str:
        return "raw" if self.preprocessing is None else "fused"

    def as_dict(self) -> dict:
        return {
            "manifest": str(self.manifest),
            "n_way": self.n_way,
            "k_shot": self.k_shot,
            "q_query": self.q_query,
            "n_tasks": self.n_tasks,
            "seed": self.seed,
            "preprocessing": self.arm,
            "fusion": None if self.preprocessing is None else self.preprocessing.as_dict(),
            "extractor": self.extractor.as_dict(),
        }


def thread_count(default: int | None = None) -> int:
    """Worker cap from ``FREQFUSE_THREADS`` (positive integer)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default or min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def apply_preprocessing(image: PixelImage, params: Optional[FusionParams]) -> PixelImage:
    """Fuse and re-quantize to 8 bits; ``None`` returns the image unchanged."""
    if params is None:
        return image
    return from_unit_interval(preprocess(image, params))


def _features_for(path: str, config: ExperimentConfig) -> np.ndarray:
    try:
        image = load_pnm(path)
    except (OSError, ValueError) as exc:
        raise ImageLoadError(path, exc) from exc
    return extract_features(apply_preprocessing(image, config.preprocessing), config.extractor)


def run_experiment(config: ExperimentConfig, use_cache: bool = True,
                   workers: int | None = None) -> EvalReport:
    """Sample ``n_tasks`` episodes, classify their queries and score them.

    Task ``i`` uses the episode seed ``derive_seed(config.seed, i)``. With the
    cache on, each distinct image is featurized once (in parallel); with it
    off, every episode featurizes its own images from scratch.
    """
    split = load_split_manifest(config.manifest)
    episodes = [
        sample_episode(split, config.n_way, config.k_shot, config.q_query,
                       derive_seed(config.seed, i))
        for i in range(config.n_tasks)
    ]
    workers = workers or thread_count()
    if use_cache:
        needed = sorted({p for ep in episodes for p, _ in ep.support + ep.query})
        with ThreadPoolExecutor(max_workers=workers) as pool:
            feats = dict(zip(needed, pool.map(lambda p: _features_for(p, config), needed)))
        accuracies = [episode_accuracy(ep, feats) for ep in episodes]
    else:
        accuracies = []
        for ep in episodes:
            paths = [p for p, _ in ep.support + ep.query]
            accuracies.append(episode_accuracy(ep, {p: _features_for(p, config) for p in paths}))
    meta = {"config": config.as_dict(), "rng": "splitmix64", "classifier": "nearest_centroid"}
    return score_tasks(accuracies, meta)


# --- config files -------------------------------------------------------

_INT_KEYS = ("n_way", "k_shot", "q_query", "n_tasks", "seed",
             "target_height", "target_width", "block_size", "bands")
_FLOAT_KEYS = ("retention_ratio", "sigma_multiplier")
_KNOWN_KEYS = frozenset(("manifest", "preprocessing", "extractor", "strategy",
                         "combine", "scaling") + _INT_KEYS + _FLOAT_KEYS)


def _parse_lines(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)\s*[=:]\s*(.*)$", line)
        if not m:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = m.group(1), m.group(2).strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "given more than once")
        values[key] = value
    return values


def parse_config(text: str, base_dir: str | os.PathLike = ".") -> list[ExperimentConfig]:
    """Parse ``key = value`` text into one config per preprocessing arm.

    ``preprocessing`` is a comma-separated list of ``raw`` / ``fused``.
    Fusion keys: ``retention_ratio``, ``strategy``, ``sigma_multiplier``,
    ``combine``, ``scaling``. Extractor keys: ``extractor``
    (``downsampled_pixels`` | ``block_dct_energy``), ``target_height``,
    ``target_width``, ``block_size``, ``bands``.
    """
    values = _parse_lines(text)
    if not values.get("manifest"):
        raise ConfigError("manifest", "required key is missing")
    manifest = Path(values["manifest"])
    if not manifest.is_absolute():
        manifest = Path(os.path.normpath(Path(base_dir) / manifest))

    parsed: dict = {}
    for key in _INT_KEYS:
        if key in values:
            try:
                parsed[key] = int(values[key])
            except ValueError:
                raise ConfigError(key, f"expected an integer, got {values[key]!r}") from None
    for key in _FLOAT_KEYS:
        if key in values:
            try:
                parsed[key] = float(values[key])
            except ValueError:
                raise ConfigError(key, f"expected a number, got {values[key]!r}") from None

    r = parsed.get("retention_ratio", 0.15)
    if not 0.0 <= r <= 1.0:
        raise ConfigError("retention_ratio", f"must lie in [0, 1], got {r}")
    k = parsed.get("sigma_multiplier", 2.0)
    if not k >= 0.0:
        raise ConfigError("sigma_multiplier", f"must be non-negative, got {k}")

    ex_name = values.get("extractor", DownsampledPixels.name).lower()
    if ex_name == DownsampledPixels.name:
        extractor = DownsampledPixels(parsed.get("target_height", 84),
                                      parsed.get("target_width", 84))
    elif ex_name == BlockDctEnergy.name:
        try:
            extractor = BlockDctEnergy(parsed.get("block_size", 8), parsed.get("bands", 4))
        except ValueError as exc:
            raise ConfigError("bands", str(exc)) from None
    else:
        raise ConfigError("extractor", f"unknown extractor {ex_name!r}")

    strategy = _choice(values, "strategy", "box", ("box", "gradient"))
    combine = _choice(values, "combine", "addclamp", ("addclamp", "average"))
    scaling = _choice(values, "scaling", "orthonormal", ("orthonormal", "paper"))
    fusion = FusionParams(LowpassParams(Strategy(strategy), r, k),
                          Combine(combine), ScalingMode.parse(scaling))

    arms = [a.strip().lower() for a in values.get("preprocessing", "raw, fused").split(",")
            if a.strip()]
    if not arms:
        raise ConfigError("preprocessing", "no arms listed")
    configs = []
    for arm in arms:
        if arm not in ("raw", "fused"):
            raise ConfigError("preprocessing", f"unknown arm {arm!r}")
        counts = {key: parsed[key] for key in ("n_way", "k_shot", "q_query", "n_tasks", "seed")
                  if key in parsed}
        configs.append(ExperimentConfig(
            manifest=str(manifest), **counts, extractor=extractor,
            preprocessing=fusion if arm == "fused" else None))
    return configs


def _choice(values: dict, key: str, default: str, choices: tuple) -> str:
    value = values.get(key, default).lower()
    if value not in choices:
        raise ConfigError(key, f"expected one of {', '.join(choices)}, got {value!r}")
    return value


def load_config(path) -> list[ExperimentConfig]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    return parse_config(text, path.parent)
