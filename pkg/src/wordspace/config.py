"""Run configuration: one flat key=value file drives every pipeline.

Lines look like ``seed = 7``; ``#`` starts a comment. Unknown keys and
duplicate keys are rejected with line numbers, referenced paths must
exist at load time, and every numeric parameter is range-checked so a
bad config fails before any computation starts.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .distortion import RADIUS_MODES
from .errors import FormatError, InputError
from .geo import SIMILARITY_AGGREGATES


def _parse_edges(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _parse_bool(text: str) -> bool:
    if text in ("true", "false"):
        return text == "true"
    raise ValueError(f"expected true or false, got '{text}'")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    epsilon: float = 1e-3
    sample_size: int = 10
    trials: int = 5
    l2_strength: float = 1.0
    tol: float = 1e-6
    max_iter: int = 1000
    classes_per_model: int = 10
    balance_classes: bool = False
    templates_per_word: int = 30
    threshold: float = 0.7
    instances: int = 10
    radius_mode: str = "union"
    aggregate: str = "mean"
    frequency_edges: tuple[float, ...] = (1e2, 1e3, 1e4, 1e5, 1e6, 1e7)
    embeddings_path: Path | None = None
    lexicon_path: Path | None = None
    pairs_path: Path | None = None
    countries_path: Path | None = None
    cities_path: Path | None = None
    vocab_path: Path | None = None
    templates_path: Path | None = None

    def validate(self) -> "RunConfig":
        if not 0 < self.epsilon <= 0.5:
            raise InputError(f"epsilon {self.epsilon} outside (0, 0.5]")
        if self.sample_size < 1:
            raise InputError("sample_size must be >= 1")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.l2_strength < 0:
            raise InputError("l2_strength must be >= 0")
        if self.tol <= 0:
            raise InputError("tol must be > 0")
        if self.max_iter < 1:
            raise InputError("max_iter must be >= 1")
        if self.classes_per_model < 2:
            raise InputError("classes_per_model must be >= 2")
        if self.templates_per_word < 2:
            raise InputError("templates_per_word must be >= 2")
        if not -1.0 <= self.threshold <= 1.0:
            raise InputError(f"threshold {self.threshold} outside [-1, 1]")
        if self.instances < 1:
            raise InputError("instances must be >= 1")
        if self.radius_mode not in RADIUS_MODES:
            raise InputError(f"unknown radius_mode '{self.radius_mode}'")
        if self.aggregate not in SIMILARITY_AGGREGATES:
            raise InputError(f"unknown aggregate '{self.aggregate}'")
        edges = self.frequency_edges
        if len(edges) < 2 or any(e <= 0 for e in edges):
            raise InputError("frequency_edges need >= 2 positive values")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise InputError("frequency_edges must be strictly increasing")
        for f_ in dataclasses.fields(self):
            value = getattr(self, f_.name)
            if f_.name.endswith("_path") and value is not None and not Path(value).exists():
                raise InputError(f"{f_.name} does not exist: {value}")
        return self


_PARSERS = {
    "seed": int,
    "epsilon": float,
    "sample_size": int,
    "trials": int,
    "l2_strength": float,
    "tol": float,
    "max_iter": int,
    "classes_per_model": int,
    "balance_classes": _parse_bool,
    "templates_per_word": int,
    "threshold": float,
    "instances": int,
    "radius_mode": str,
    "aggregate": str,
    "frequency_edges": _parse_edges,
    "embeddings_path": Path,
    "lexicon_path": Path,
    "pairs_path": Path,
    "countries_path": Path,
    "cities_path": Path,
    "vocab_path": Path,
    "templates_path": Path,
}


def load_config(path) -> RunConfig:
    """Parse a key=value file into a validated RunConfig."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"config file does not exist: {path}")
    values = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise FormatError("expected key = value", path=path, line=lineno)
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _PARSERS:
                raise FormatError(f"unknown config key '{key}'", path=path, line=lineno)
            if key in values:
                raise FormatError(f"duplicate config key '{key}'", path=path, line=lineno)
            try:
                values[key] = _PARSERS[key](value)
            except ValueError as exc:
                raise FormatError(
                    f"bad value for '{key}': {exc}", path=path, line=lineno
                ) from None
    return RunConfig(**values).validate()
