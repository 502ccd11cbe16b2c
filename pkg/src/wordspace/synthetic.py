"""Deterministic synthetic fixtures with planted effects.

Every generator here plants a known structure (cloud size growing with
frequency, context signal growing with frequency, region-scaled radii,
separable class blobs) so that analysis code can be checked against a
known answer. All randomness flows from explicit seeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .distortion import SimilarityPair
from .errors import InputError
from .formats import EmbeddingRecord, LexiconEntry
from .geo import CountryRecord
from .geometry import SiblingCohort
from .probes import ProbeDataset

MASK_TOKEN = "[MASK]"
DEFAULT_SOURCE = "synthetic"


def sample_in_ball(center, radius: float, n: int, seed: int = 0) -> np.ndarray:
    """Uniform samples from the solid ball of the given center and radius."""
    center = np.asarray(center, dtype=np.float64)
    if radius < 0:
        raise InputError("radius must be nonnegative")
    rng = np.random.default_rng(seed)
    d = center.size
    directions = rng.normal(size=(n, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=(n, 1)) ** (1.0 / d)
    return center + directions * radii


def gaussian_cohorts(
    n_words: int = 40,
    points_per_word: int = 60,
    dim: int = 24,
    seed: int = 3,
    sigma_scale: float = 0.25,
    source: str = DEFAULT_SOURCE,
) -> tuple[dict[str, SiblingCohort], dict[str, LexiconEntry]]:
    """Gaussian clouds whose scale grows linearly with log10 frequency.

    Frequencies are drawn log-uniformly over [1e2, 1e7); the per-word
    standard deviation is sigma_scale times log10(frequency), so ball
    radius correlates strongly with log frequency by construction.
    """
    rng = np.random.default_rng(seed)
    log_freq = rng.uniform(2.0, 7.0, size=n_words)
    cohorts: dict[str, SiblingCohort] = {}
    lexicon: dict[str, LexiconEntry] = {}
    for i in range(n_words):
        word = f"word{i:03d}"
        center = rng.normal(size=dim) * 2.0
        sigma = sigma_scale * log_freq[i]
        points = center + rng.normal(size=(points_per_word, dim)) * sigma
        cohorts[word] = SiblingCohort(word=word, source=source, points=points)
        lexicon[word] = LexiconEntry(
            word=word,
            frequency=int(round(10.0 ** log_freq[i])),
            sense_count=1,
            token_count=1,
            first_token_category="in_vocab_word",
        )
    return cohorts, lexicon


@dataclass(frozen=True)
class IdentityFixture:
    dataset: ProbeDataset
    lexicon: dict[str, LexiconEntry]
    bin_of_word: dict[str, int]


def identity_trend_fixture(
    words_per_bin: int = 30,
    dim: int = 16,
    tests_per_word: int = 10,
    seed: int = 7,
    sigma_scale: float = 0.32,
) -> IdentityFixture:
    """One-shot word-identity task over 5 frequency decades.

    Each word in decade bin b gets frequency 10^(b+2.5) and a Gaussian
    cloud of standard deviation sigma_scale * log10(frequency), so
    higher-frequency bins are strictly harder to separate.
    """
    rng = np.random.default_rng(seed)
    n_bins = 5
    k = n_bins * words_per_bin
    centers = rng.normal(size=(k, dim)) * 2.0
    words = [f"w{i:03d}" for i in range(k)]
    train_x = np.empty((k, dim))
    test_x = np.empty((k * tests_per_word, dim))
    test_y = np.repeat(np.arange(k), tests_per_word)
    lexicon: dict[str, LexiconEntry] = {}
    bin_of_word: dict[str, int] = {}
    for i in range(k):
        b = i // words_per_bin
        log_freq = b + 2.5
        sigma = sigma_scale * log_freq
        train_x[i] = centers[i] + rng.normal(size=dim) * sigma
        test_x[i * tests_per_word : (i + 1) * tests_per_word] = (
            centers[i] + rng.normal(size=(tests_per_word, dim)) * sigma
        )
        lexicon[words[i]] = LexiconEntry(
            word=words[i],
            frequency=int(round(10.0**log_freq)),
            sense_count=1,
            token_count=1,
            first_token_category="in_vocab_word",
        )
        bin_of_word[words[i]] = b
    dataset = ProbeDataset(
        classes=tuple(words), train_x=train_x, test_x=test_x, test_y=test_y
    )
    return IdentityFixture(dataset=dataset, lexicon=lexicon, bin_of_word=bin_of_word)


@dataclass(frozen=True)
class ContextFixture:
    records: list[EmbeddingRecord]
    lexicon: dict[str, LexiconEntry]
    log_frequencies: dict[str, float]
    n_contexts: int


def context_trend_fixture(
    n_words: int = 120,
    n_contexts: int = 30,
    dim: int = 24,
    seed: int = 11,
    noise: float = 0.55,
    source: str = DEFAULT_SOURCE,
) -> ContextFixture:
    """Context-retrieval task where frequent words carry stronger context signal.

    Mask rows are unit context signatures; a word's embedding in context j
    is beta * signature_j plus Gaussian noise, with beta growing linearly
    in log10 frequency. Frequent words are therefore easier to place, so
    retrieval error correlates negatively with log frequency.
    """
    rng = np.random.default_rng(seed)
    signatures = rng.normal(size=(n_contexts, dim))
    signatures /= np.linalg.norm(signatures, axis=1, keepdims=True)
    records: list[EmbeddingRecord] = []
    for j in range(n_contexts):
        records.append(
            EmbeddingRecord(
                token=MASK_TOKEN,
                context_id=j,
                source=source,
                vector=signatures[j],
                is_mask=True,
            )
        )
    log_freq = rng.uniform(2.0, 7.0, size=n_words)
    beta = 0.2 + (log_freq - 2.0) * 0.4
    lexicon: dict[str, LexiconEntry] = {}
    log_frequencies: dict[str, float] = {}
    for i in range(n_words):
        word = f"ctx{i:03d}"
        vectors = beta[i] * signatures + rng.normal(size=(n_contexts, dim)) * noise
        for j in range(n_contexts):
            records.append(
                EmbeddingRecord(
                    token=word,
                    context_id=j,
                    source=source,
                    vector=vectors[j],
                    is_mask=False,
                )
            )
        lexicon[word] = LexiconEntry(
            word=word,
            frequency=int(round(10.0 ** log_freq[i])),
            sense_count=1,
            token_count=1,
            first_token_category="in_vocab_word",
        )
        log_frequencies[word] = float(log_freq[i])
    return ContextFixture(
        records=records,
        lexicon=lexicon,
        log_frequencies=log_frequencies,
        n_contexts=n_contexts,
    )


def blob_dataset(
    classes: int = 10,
    dim: int = 32,
    tests_per_class: int = 10,
    seed: int = 0,
    separation: float = 10.0,
) -> ProbeDataset:
    """Well-separated Gaussian blobs: inter-center distance ~separation * sigma."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(classes, dim)) * (separation / np.sqrt(2 * dim))
    train_x = centers + rng.normal(size=(classes, dim))
    test_x = np.repeat(centers, tests_per_class, axis=0) + rng.normal(
        size=(classes * tests_per_class, dim)
    )
    test_y = np.repeat(np.arange(classes), tests_per_class)
    return ProbeDataset(
        classes=tuple(str(c) for c in range(classes)),
        train_x=train_x,
        test_x=test_x,
        test_y=test_y,
    )


DEFAULT_REGION_SCALES: Mapping[str, float] = {
    "North America": 1.0,
    "Europe": 0.9,
    "Africa": 0.8,
}


def region_fixture(
    scales: Mapping[str, float] = DEFAULT_REGION_SCALES,
    countries_per_region: int = 6,
    points_per_country: int = 30,
    dim: int = 16,
    seed: int = 5,
    sources: tuple[str, ...] = ("base",),
) -> tuple[list[CountryRecord], dict[str, dict[str, SiblingCohort]]]:
    """Country cohorts whose radii are exactly proportional to region scales.

    Every country shares one base point cloud, scaled by its region's
    factor and translated to a country-specific center, so region mean
    radii reproduce the planted ratios exactly (enclosing-ball radius is
    translation invariant and positively homogeneous).
    """
    rng = np.random.default_rng(seed)
    base = rng.normal(size=(points_per_country, dim))
    countries: list[CountryRecord] = []
    cohorts_by_source: dict[str, dict[str, SiblingCohort]] = {s: {} for s in sources}
    idx = 0
    for region in scales:
        for _ in range(countries_per_region):
            name = f"Country{idx:02d}"
            idx += 1
            gdp = float(10.0 ** rng.uniform(9.0, 13.0))
            countries.append(CountryRecord(name=name, region=region, gdp=gdp))
            for source in sources:
                center = rng.normal(size=dim) * 3.0
                points = scales[region] * base + center
                cohorts_by_source[source][name] = SiblingCohort(
                    word=name, source=source, points=points
                )
    return countries, cohorts_by_source


def distortion_fixture(
    n_pairs: int = 800,
    seed: int = 13,
    coupling: float = 0.0,
) -> list[SimilarityPair]:
    """Annotated similarity pairs with controllable residual-radius coupling.

    With coupling 0 the ball sizes are independent of the calibration
    residuals (a null fixture); positive coupling adds the human-score
    noise term into the radius so residual and radius correlate.
    """
    rng = np.random.default_rng(seed)
    cosines = rng.uniform(-0.2, 1.0, size=n_pairs)
    noise = rng.normal(size=n_pairs) * 0.8
    humans = np.clip(1.2 + 6.5 * cosines + noise, 0.0, 10.0)
    radii = np.exp(rng.normal(loc=3.0, scale=0.5, size=n_pairs)) + coupling * noise
    radii = np.maximum(radii, 0.1)
    pairs = []
    for i in range(n_pairs):
        pairs.append(
            SimilarityPair(
                word1=f"a{i:04d}",
                word2=f"b{i:04d}",
                context1_id=i,
                context2_id=i,
                human_score=float(humans[i]),
                cosine=float(cosines[i]),
                radius1=float(radii[i]) / 2.0,
                radius2=float(radii[i]) / 2.0,
                union_radius=float(radii[i]),
            )
        )
    return pairs
