"""Dataset split manifests, n-way k-shot episode sampling and task scoring.

Manifest format: UTF-8 text, one ``<class-label>\\t<relative-path>`` record
per line. Blank lines and lines starting with ``#`` are ignored. Paths are
resolved relative to the manifest's directory.
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .rng import SplitMix64

__all__ = [
    "Role",
    "ManifestError",
    "SamplingError",
    "DatasetSplit",
    "Episode",
    "EvalReport",
    "load_split_manifest",
    "write_split_manifest",
    "check_disjoint",
    "load_dataset",
    "sample_episode",
    "score_tasks",
    "format_accuracy",
    "CI_Z",
]

CI_Z = 1.96
CI_DEFINITION = "95% normal-approximation CI: 1.96 * sample stddev / sqrt(n_tasks)"


class Role(str, enum.Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class ManifestError(ValueError):
    pass


class SamplingError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetSplit:
    name: str
    classes: Mapping[str, tuple[str, ...]]
    role: Role = Role.TEST

    def __post_init__(self):
        seen = {}
        frozen = {}
        for label, paths in self.classes.items():
            paths = tuple(str(p) for p in paths)
            if not paths:
                raise ManifestError(f"class {label!r} has no images")
            for p in paths:
                if p in seen:
                    raise ManifestError(
                        f"duplicate image path {p!r} (classes {seen[p]!r} and {label!r})")
                seen[p] = label
            frozen[label] = paths
        object.__setattr__(self, "classes", frozen)
        object.__setattr__(self, "role", Role(self.role))

    @property
    def labels(self) -> list[str]:
        """Class labels in sorted order; sampling indexes into this list."""
        return sorted(self.classes)

    def __len__(self):
        return len(self.classes)


def _infer_role(path: Path) -> Role | None:
    stem = path.stem.lower()
    for role in Role:
        if stem == role.value or stem.endswith(("_" + role.value, "-" + role.value, "." + role.value)):
            return role
    return None


def load_split_manifest(path, role: Role | str | None = None, name: str | None = None) -> DatasetSplit:
    """Parse and validate a manifest file.

    ``role`` defaults to a ``train``/``val``/``test`` suffix of the file stem,
    else ``test``.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    base = path.parent
    classes: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ManifestError(f"{path}:{lineno}: expected '<label>\\t<path>', got {raw!r}")
        label, rel = parts[0].strip(), parts[1].strip()
        full = rel if os.path.isabs(rel) else os.path.normpath(base / rel)
        classes.setdefault(label, []).append(str(full))
    if not classes:
        raise ManifestError(f"{path}: manifest lists no images")
    if role is None:
        role = _infer_role(path) or Role.TEST
    return DatasetSplit(name or path.stem, classes, Role(role))


def write_split_manifest(split: DatasetSplit, path) -> None:
    path = Path(path)
    lines = [f"# split {split.name} ({split.role.value})"]
    for label in split.labels:
        for p in split.classes[label]:
            try:
                rel = os.path.relpath(p, path.parent)
            except ValueError:
                rel = p
            lines.append(f"{label}\t{rel}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def check_disjoint(splits) -> None:
    """Raise if any class label appears in more than one split."""
    owner = {}
    for split in splits:
        for label in split.classes:
            if label in owner:
                raise ManifestError(
                    f"class {label!r} appears in both {owner[label]} and {split.role.value} splits")
            owner[label] = split.role.value


def load_dataset(manifests: Mapping[Role | str, str | os.PathLike]) -> dict[Role, DatasetSplit]:
    splits = {Role(r): load_split_manifest(p, role=r) for r, p in manifests.items()}
    check_disjoint(splits.values())
    return splits


@dataclass(frozen=True)
class Episode:
    n_way: int
    k_shot: int
    q_query: int
    support: tuple[tuple[str, int], ...]
    query: tuple[tuple[str, int], ...]
    class_map: tuple[str, ...]

    def validate(self) -> None:
        """Raise ``ValueError`` if any structural invariant is broken."""
        def fail(msg):
            raise ValueError(f"invalid episode: {msg}")

        if len(self.class_map) != self.n_way or len(set(self.class_map)) != self.n_way:
            fail(f"expected {self.n_way} distinct classes, got {self.class_map}")
        for name, items, per_class in (("support", self.support, self.k_shot),
                                       ("query", self.query, self.q_query)):
            counts = [0] * self.n_way
            for _, idx in items:
                if not 0 <= idx < self.n_way:
                    fail(f"{name} class index {idx} out of range")
                counts[idx] += 1
            if counts != [per_class] * self.n_way:
                fail(f"{name} per-class counts {counts}, expected {per_class} each")
            paths = [p for p, _ in items]
            if len(set(paths)) != len(paths):
                fail(f"repeated {name} item")
        if {p for p, _ in self.support} & {p for p, _ in self.query}:
            fail("support and query overlap")


def sample_episode(split: DatasetSplit, n_way: int, k_shot: int, q_query: int, seed: int) -> Episode:
    """Draw classes, then ``k_shot + q_query`` images per class, without replacement."""
    if n_way < 1 or k_shot < 1 or q_query < 0:
        raise SamplingError(f"invalid episode shape n={n_way} k={k_shot} q={q_query}")
    labels = split.labels
    if len(labels) < n_way:
        raise SamplingError(f"split {split.name!r} has {len(labels)} classes, need {n_way}")
    rng = SplitMix64(seed)
    chosen = rng.sample(labels, n_way)
    support, query = [], []
    for idx, label in enumerate(chosen):
        paths = split.classes[label]
        need = k_shot + q_query
        if len(paths) < need:
            raise SamplingError(
                f"class {label!r} has {len(paths)} images, need {need}")
        picked = rng.sample(paths, need)
        support.extend((p, idx) for p in picked[:k_shot])
        query.extend((p, idx) for p in picked[k_shot:])
    return Episode(n_way, k_shot, q_query, tuple(support), tuple(query), tuple(chosen))


def format_accuracy(mean: float, ci: float) -> str:
    """Percent with two decimals, e.g. ``93.66 ± 0.13``."""
    return f"{100.0 * mean:.2f} ± {100.0 * ci:.2f}"


@dataclass
class EvalReport:
    n_tasks: int
    mean_accuracy: float
    ci_half_width: float
    per_task_accuracies: list[float]
    metadata: dict = field(default_factory=dict)

    @property
    def summary(self) -> str:
        return format_accuracy(self.mean_accuracy, self.ci_half_width)

    def to_dict(self) -> dict:
        return {
            "n_tasks": self.n_tasks,
            "mean_accuracy": self.mean_accuracy,
            "ci_half_width": self.ci_half_width,
            "summary": self.summary,
            "per_task_accuracies": list(self.per_task_accuracies),
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [
            f"n_tasks={self.n_tasks}",
            f"mean_accuracy={self.mean_accuracy!r}",
            f"ci_half_width={self.ci_half_width!r}",
            f"summary={self.summary}",
        ]
        for key in sorted(self.metadata):
            value = self.metadata[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(int(data["n_tasks"]), float(data["mean_accuracy"]),
                   float(data["ci_half_width"]),
                   [float(a) for a in data.get("per_task_accuracies", [])],
                   dict(data.get("metadata", {})))


def score_tasks(per_task_accuracies, metadata: dict | None = None) -> EvalReport:
    accs = [float(a) for a in per_task_accuracies]
    n = len(accs)
    if n < 2:
        raise ValueError(f"need at least 2 tasks to score, got {n}")
    mean = math.fsum(accs) / n
    var = math.fsum((a - mean) ** 2 for a in accs) / (n - 1)
    ci = CI_Z * math.sqrt(var) / math.sqrt(n)
    meta = {"interval": CI_DEFINITION}
    meta.update(metadata or {})
    return EvalReport(n, mean, ci, accs, meta)
