"""Geographic bias analyses over country and city name embeddings.

Covers four measurements: vocabulary coverage of city names by region,
region-level enclosing-ball radii relative to North America, correlation
of country radii with log GDP, and counts of countries whose embedding
instances look alike under cosine similarity. Embeddings arrive as
sibling cohorts keyed by country name; this module never loads models.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError
from .geometry import SiblingCohort, cohort_radius
from .stats import PairedSeries, pearson

REGIONS = frozenset(
    {
        "North America",
        "Europe",
        "Middle East",
        "Asia",
        "South America",
        "Oceania",
        "Central America",
        "Africa",
    }
)
BASE_REGION = "North America"
LOW_GDP_THRESHOLD = 1e10
SIMILARITY_AGGREGATES = ("mean", "max", "per_instance")
SLOT_MARKER = "{}"


@dataclass(frozen=True)
class CountryRecord:
    """Country metadata row; gdp in USD, excluded carries a reason or None."""

    name: str
    region: str
    gdp: float | None = None
    token_count: int = 1
    excluded: str | None = None

    def __post_init__(self):
        if not self.name:
            raise InputError("country name must be nonempty")
        if self.region not in REGIONS:
            raise InputError(f"unknown region '{self.region}' for '{self.name}'")
        if self.gdp is not None and self.gdp <= 0:
            raise InputError(f"gdp must be positive for '{self.name}'")
        if self.token_count < 1:
            raise InputError(f"token_count must be >= 1 for '{self.name}'")


@dataclass(frozen=True)
class CityRecord:
    name: str
    country: str
    region: str
    population: int
    in_vocab: bool | None = None

    def __post_init__(self):
        if not self.name:
            raise InputError("city name must be nonempty")
        if self.region not in REGIONS:
            raise InputError(f"unknown region '{self.region}' for city '{self.name}'")
        if self.population < 0:
            raise InputError(f"negative population for city '{self.name}'")


@dataclass(frozen=True)
class CoverageStat:
    covered: int
    total: int

    @property
    def percent(self) -> float:
        return 100.0 * self.covered / self.total


def default_excluded_countries() -> frozenset[str]:
    """Country names dropped by default because they collide with common words."""
    text = resources.files("wordspace").joinpath("data/excluded_countries.txt").read_text()
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def mark_excluded(
    countries: Sequence[CountryRecord],
    names: Iterable[str],
    reason: str = "polysemous name",
) -> list[CountryRecord]:
    """Return records with the excluded flag set on the named countries."""
    nameset = set(names)
    return [
        dataclasses.replace(c, excluded=reason) if c.name in nameset else c
        for c in countries
    ]


def active_countries(countries: Sequence[CountryRecord]) -> list[CountryRecord]:
    return [c for c in countries if c.excluded is None]


def vocab_coverage(
    cities: Sequence[CityRecord],
    vocab: Iterable[str],
    min_population: int = 100_000,
    group_by: str = "region",
) -> dict[str, CoverageStat]:
    """Share of city names present in a vocabulary, grouped by region or country.

    Cities below min_population are ignored; matching is exact and
    case-sensitive on the city name.
    """
    if group_by not in ("region", "country"):
        raise InputError(f"unknown group_by '{group_by}'")
    if not cities:
        raise InputError("empty city list")
    vocabset = set(vocab)
    covered: dict[str, int] = {}
    total: dict[str, int] = {}
    for city in cities:
        if city.population < min_population:
            continue
        key = city.region if group_by == "region" else city.country
        total[key] = total.get(key, 0) + 1
        if city.name in vocabset:
            covered[key] = covered.get(key, 0) + 1
    if not total:
        raise InputError(f"no cities with population >= {min_population}")
    return {
        key: CoverageStat(covered.get(key, 0), total[key]) for key in sorted(total)
    }


def region_radius_table(
    countries: Sequence[CountryRecord],
    cohorts_by_source: Mapping[str, Mapping[str, SiblingCohort]],
    sample_size: int = 10,
    trials: int = 5,
    epsilon: float = 1e-3,
    seed: int = 0,
) -> dict[str, dict[str, float]]:
    """Mean radius per region and source, as a percentage of North America.

    Returns {source: {region: percent}}; the North America cell is 100 by
    construction. Countries flagged as excluded are skipped.
    """
    usable = active_countries(countries)
    if not usable:
        raise InputError("no usable countries")
    by_region: dict[str, list[CountryRecord]] = {}
    for c in usable:
        by_region.setdefault(c.region, []).append(c)
    if BASE_REGION not in by_region:
        raise InputError(f"no countries in region '{BASE_REGION}'")
    table: dict[str, dict[str, float]] = {}
    for source in sorted(cohorts_by_source):
        cohorts = cohorts_by_source[source]
        radii: dict[str, float] = {}
        for region, members in sorted(by_region.items()):
            values = []
            for c in members:
                if c.name not in cohorts:
                    raise InputError(
                        f"missing cohort for country '{c.name}' in source '{source}'"
                    )
                values.append(
                    cohort_radius(cohorts[c.name], sample_size, trials, epsilon, seed)
                )
            radii[region] = float(np.mean(values))
        base = radii[BASE_REGION]
        if base <= 0:
            raise InputError(f"degenerate base region radius in source '{source}'")
        table[source] = {region: 100.0 * r / base for region, r in sorted(radii.items())}
    return table


@dataclass(frozen=True)
class GdpRadiusResult:
    correlation: float
    n_used: int
    skipped: tuple[str, ...]
    low_gdp_mean: float | None
    top_mean: float | None

    @property
    def gap_percent(self) -> float | None:
        """How much smaller low-GDP radii are than the top economies, in percent."""
        if self.low_gdp_mean is None or self.top_mean is None or self.top_mean == 0:
            return None
        return 100.0 * (self.top_mean - self.low_gdp_mean) / self.top_mean


def gdp_radius_correlation(
    countries: Sequence[CountryRecord],
    radii: Mapping[str, float],
    low_gdp_threshold: float = LOW_GDP_THRESHOLD,
) -> GdpRadiusResult:
    """Pearson correlation of cohort radius against log10 GDP.

    Countries without a GDP value are skipped with a warning. Also compares
    the mean radius of countries under low_gdp_threshold against the mean
    of the two largest economies.
    """
    usable: list[tuple[str, float, float]] = []
    skipped: list[str] = []
    for c in active_countries(countries):
        if c.gdp is None:
            skipped.append(c.name)
            continue
        if c.name not in radii:
            raise InputError(f"missing radius for country '{c.name}'")
        usable.append((c.name, c.gdp, float(radii[c.name])))
    if skipped:
        warnings.warn(
            f"skipping {len(skipped)} countries without GDP: {', '.join(sorted(skipped))}",
            stacklevel=2,
        )
    if len(usable) < 10:
        raise InputError(f"only {len(usable)} countries with GDP; need at least 10")
    gdps = np.asarray([u[1] for u in usable])
    rads = np.asarray([u[2] for u in usable])
    r = pearson(PairedSeries(rads, np.log10(gdps)))
    low = rads[gdps < low_gdp_threshold]
    top = rads[np.argsort(gdps)[-2:]]
    return GdpRadiusResult(
        correlation=r,
        n_used=len(usable),
        skipped=tuple(sorted(skipped)),
        low_gdp_mean=float(low.mean()) if low.size else None,
        top_mean=float(top.mean()),
    )


def artificial_sentences(templates: Sequence[str], country: str) -> list[str]:
    """Substitute a country name into single-slot templates, preserving order."""
    if not templates:
        raise InputError("no templates given")
    out = []
    for i, template in enumerate(templates):
        slots = template.count(SLOT_MARKER)
        if slots != 1:
            raise InputError(
                f"template {i} has {slots} slot markers '{SLOT_MARKER}'; need exactly 1"
            )
        out.append(template.replace(SLOT_MARKER, country))
    return out


def _unit_rows(points: np.ndarray, name: str) -> np.ndarray:
    norms = np.linalg.norm(points, axis=1)
    if np.any(norms == 0):
        raise InputError(f"zero embedding vector in cohort '{name}'")
    return points / norms[:, None]


def similar_country_count(
    country: str,
    cohorts: Mapping[str, SiblingCohort],
    threshold: float = 0.7,
    instances: int = 10,
    seed: int = 0,
    aggregate: str = "mean",
) -> float:
    """How many other countries look like this one under cosine similarity.

    Samples `instances` embeddings per country (seeded) and compares the
    target's sample against every other country's via the instances-by-
    instances cosine matrix. Aggregation modes: "mean" counts a country
    when the matrix mean reaches the threshold, "max" when any entry does,
    and "per_instance" counts per target instance (any entry in its row)
    and returns the mean count across target instances.
    """
    if aggregate not in SIMILARITY_AGGREGATES:
        raise InputError(f"unknown aggregate '{aggregate}'")
    if country not in cohorts:
        raise InputError(f"no cohort for country '{country}'")
    if instances < 1:
        raise InputError("instances must be >= 1")
    rng = np.random.default_rng(seed)
    samples: dict[str, np.ndarray] = {}
    for name in sorted(cohorts):
        cohort = cohorts[name]
        if len(cohort) < instances:
            raise InputError(
                f"cohort '{name}' has {len(cohort)} points, fewer than instances={instances}"
            )
        idx = rng.choice(len(cohort), size=instances, replace=False)
        samples[name] = _unit_rows(cohort.points[idx], name)
    target = samples[country]
    if aggregate == "per_instance":
        counts = np.zeros(instances)
    else:
        counts = None
    total = 0.0
    for name, sample in samples.items():
        if name == country:
            continue
        sims = target @ sample.T
        if aggregate == "mean":
            total += float(sims.mean() >= threshold)
        elif aggregate == "max":
            total += float(sims.max() >= threshold)
        else:
            counts += (sims.max(axis=1) >= threshold).astype(float)
    if aggregate == "per_instance":
        return float(counts.mean())
    return total
