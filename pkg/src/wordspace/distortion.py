"""Cosine-vs-human similarity calibration and its residual analysis.

The pipeline: score every word pair by cosine similarity of its two
contextual embeddings, regress human judgments on those cosines, and
study the signed residual (human minus predicted). Grouping by human
score quartiles controls the heteroscedasticity of the residuals before
correlating them with enclosing-ball size.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError
from .geometry import SiblingCohort, cohort_radius, meb_coreset
from .stats import LinearFit, PairedSeries, linear_fit, pearson, quartile_split

RADIUS_MODES = ("union", "sum", "mean")


@dataclass(frozen=True)
class SimilarityPair:
    """One human-rated word pair in context, with derived similarity fields."""

    word1: str
    word2: str
    context1_id: int
    context2_id: int
    human_score: float
    cosine: float | None = None
    predicted: float | None = None
    residual: float | None = None
    radius1: float | None = None
    radius2: float | None = None
    union_radius: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.human_score <= 10.0):
            raise InputError(f"human score {self.human_score} outside [0, 10]")
        if self.cosine is not None and not (-1.0 <= self.cosine <= 1.0):
            raise InputError(f"cosine {self.cosine} outside [-1, 1]")
        if self.predicted is not None and self.residual is not None:
            if self.residual != self.human_score - self.predicted:
                raise InputError("residual must equal human_score - predicted")


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two nonzero vectors, clamped to [-1, 1]."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape:
        raise InputError("cosine similarity requires equal dimensions")
    na = float(np.linalg.norm(av))
    nb = float(np.linalg.norm(bv))
    if na == 0.0 or nb == 0.0:
        raise InputError("cosine similarity undefined for zero vector")
    return float(min(1.0, max(-1.0, float(av @ bv) / (na * nb))))


def calibrate_and_score(pairs: Sequence[SimilarityPair]) -> tuple[list[SimilarityPair], LinearFit]:
    """Regress human scores on cosines; fill predicted and residual per pair."""
    if len(pairs) < 2:
        raise InputError("need at least 2 pairs to calibrate")
    if any(p.cosine is None for p in pairs):
        raise InputError("all pairs need a cosine before calibration")
    cosines = np.asarray([p.cosine for p in pairs])
    humans = np.asarray([p.human_score for p in pairs])
    fit = linear_fit(PairedSeries(cosines, humans))
    scored = []
    for p in pairs:
        predicted = fit.slope * p.cosine + fit.intercept
        scored.append(
            dataclasses.replace(
                p, predicted=predicted, residual=p.human_score - predicted
            )
        )
    return scored, fit


def pair_radius_metric(
    pair: SimilarityPair,
    cohorts: Mapping[str, SiblingCohort],
    mode: str = "union",
    sample_size: int = 10,
    trials: int = 5,
    epsilon: float = 1e-3,
    seed: int = 0,
) -> float:
    """Ball-size metric for a pair: joint enclosing ball or per-word aggregate.

    "union" samples both cohorts and encloses the combined sample; "sum"
    and "mean" aggregate the two per-word radii instead.
    """
    if mode not in RADIUS_MODES:
        raise InputError(f"unknown radius mode '{mode}'")
    for word in (pair.word1, pair.word2):
        if word not in cohorts:
            raise InputError(f"missing cohort for word '{word}'")
    c1 = cohorts[pair.word1]
    c2 = cohorts[pair.word2]
    if mode == "union":
        rng = np.random.default_rng(seed)
        parts = []
        for c in (c1, c2):
            if len(c) < sample_size:
                raise InputError(
                    f"cohort '{c.word}' has {len(c)} points, fewer than sample_size={sample_size}"
                )
            idx = rng.choice(len(c), size=sample_size, replace=False)
            parts.append(c.points[idx])
        return meb_coreset(np.vstack(parts), epsilon).radius
    r1 = cohort_radius(c1, sample_size, trials, epsilon, seed)
    r2 = cohort_radius(c2, sample_size, trials, epsilon, seed)
    return r1 + r2 if mode == "sum" else 0.5 * (r1 + r2)


def radius_metric_values(pairs: Sequence[SimilarityPair], mode: str = "union") -> np.ndarray:
    """Pull the selected radius metric out of already-annotated pairs."""
    if mode not in RADIUS_MODES:
        raise InputError(f"unknown radius mode '{mode}'")
    out = np.empty(len(pairs))
    for i, p in enumerate(pairs):
        if mode == "union":
            if p.union_radius is None:
                raise InputError("pair lacks union_radius")
            out[i] = p.union_radius
        else:
            if p.radius1 is None or p.radius2 is None:
                raise InputError("pair lacks per-word radii")
            out[i] = p.radius1 + p.radius2 if mode == "sum" else 0.5 * (p.radius1 + p.radius2)
    return out


def quartile_residual_correlation(
    pairs: Sequence[SimilarityPair], mode: str = "union"
) -> list[float]:
    """Pearson(residual, ball size) inside each human-score quartile."""
    if len(pairs) < 16:
        raise InputError("need at least 16 pairs for quartile correlations")
    if any(p.residual is None for p in pairs):
        raise InputError("pairs must be calibrated first")
    residuals = np.asarray([p.residual for p in pairs])
    humans = [p.human_score for p in pairs]
    metric = radius_metric_values(pairs, mode)
    groups = quartile_split(residuals, humans)
    out = []
    for q, idx in enumerate(groups):
        try:
            out.append(pearson(PairedSeries(residuals[idx], metric[idx])))
        except InputError as exc:
            raise InputError(f"degenerate quartile {q + 1}: {exc}") from exc
    return out
