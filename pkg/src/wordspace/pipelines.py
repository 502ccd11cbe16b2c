"""Analysis drivers: each one turns input files into report tables.

These functions sit between the CLI and the library modules. They read
what the RunConfig points at, run one analysis end to end, and return
ReportTable objects ready for emit_report. All sampling is seeded from
the config, so a fixed config yields byte-identical reports.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import RunConfig
from .cosine_range import CosineRangeQuery, cosine_distance_range, range_width_monotone
from .distortion import (
    SimilarityPair,
    calibrate_and_score,
    cosine_similarity,
    pair_radius_metric,
    quartile_residual_correlation,
)
from .errors import InputError
from .formats import (
    EmbeddingRecord,
    ReportTable,
    read_city_table,
    read_country_table,
    read_embeddings,
    read_lexicon,
    read_similarity_pairs,
    read_vocab,
)
from .geo import (
    default_excluded_countries,
    gdp_radius_correlation,
    mark_excluded,
    region_radius_table,
    similar_country_count,
    vocab_coverage,
)
from .geometry import SiblingCohort, cohort_radius, meb_coreset, pairwise_mean_distance
from .probes import (
    ProbeDataset,
    bin_error_rates,
    build_context_retrieval_dataset,
    evaluate,
    partition_classes,
    train_ovr_logistic,
)
from .stats import PairedSeries, linear_fit, pearson, spearman
from .synthetic import sample_in_ball


def _require_path(config: RunConfig, field: str, what: str):
    value = getattr(config, field)
    if value is None:
        raise InputError(f"{what} requires {field} in the config")
    return value


def cohorts_from_records(
    records: Iterable[EmbeddingRecord], min_points: int = 1
) -> dict[str, dict[str, SiblingCohort]]:
    """Group non-mask records into {source: {token: cohort}}."""
    grouped: dict[str, dict[str, list[np.ndarray]]] = {}
    for r in records:
        if r.is_mask:
            continue
        grouped.setdefault(r.source, {}).setdefault(r.token, []).append(r.vector)
    out: dict[str, dict[str, SiblingCohort]] = {}
    for source, words in grouped.items():
        out[source] = {}
        for word, vectors in words.items():
            if len(vectors) < min_points:
                continue
            out[source][word] = SiblingCohort(
                word=word, source=source, points=np.vstack(vectors)
            )
    if not out:
        raise InputError("no non-mask embedding records found")
    return out


def meb_pipeline(config: RunConfig) -> list[ReportTable]:
    """Per-word ball radii, optionally correlated against log frequency."""
    path = _require_path(config, "embeddings_path", "meb")
    records = read_embeddings(path)
    by_source = cohorts_from_records(records, min_points=2)
    lexicon = (
        read_lexicon(config.lexicon_path) if config.lexicon_path is not None else None
    )
    rows = []
    series: dict[str, tuple[list[float], list[float]]] = {}
    for source in sorted(by_source):
        for word in sorted(by_source[source]):
            cohort = by_source[source][word]
            if len(cohort) >= config.sample_size:
                radius = cohort_radius(
                    cohort,
                    config.sample_size,
                    config.trials,
                    config.epsilon,
                    config.seed,
                )
            else:
                radius = meb_coreset(cohort.points, config.epsilon).radius
            mean_dist = (
                pairwise_mean_distance(cohort.points) if len(cohort) >= 2 else None
            )
            frequency = None
            if lexicon is not None and word in lexicon:
                frequency = lexicon[word].frequency
                series.setdefault(source, ([], []))[0].append(radius)
                series[source][1].append(math.log10(frequency))
            rows.append((source, word, len(cohort), radius, mean_dist, frequency))
    tables = [
        ReportTable(
            name="cohort_radii",
            columns=("source", "word", "n_points", "radius", "mean_pairwise_distance", "frequency"),
            rows=tuple(rows),
        )
    ]
    corr_rows = []
    for source in sorted(series):
        radii, logf = series[source]
        if len(radii) >= 3:
            s = PairedSeries(np.asarray(radii), np.asarray(logf))
            corr_rows.append((source, len(radii), pearson(s), spearman(s)))
    if corr_rows:
        tables.append(
            ReportTable(
                name="radius_frequency_correlation",
                columns=("source", "n_words", "pearson_r", "spearman_r"),
                rows=tuple(corr_rows),
            )
        )
    return tables


def build_identity_datasets(
    records: Sequence[EmbeddingRecord],
    classes_per_model: int,
    seed: int,
    source: str | None = None,
) -> list[ProbeDataset]:
    """One-shot identity datasets: first context trains, the rest test.

    Words are shuffled and cut into disjoint models of classes_per_model
    words each; leftover words beyond the last full model are dropped.
    """
    per_word: dict[str, list[EmbeddingRecord]] = {}
    for r in records:
        if r.is_mask or (source is not None and r.source != source):
            continue
        per_word.setdefault(r.token, []).append(r)
    words = sorted(w for w, rs in per_word.items() if len(rs) >= 2)
    if not words:
        raise InputError("no word has at least 2 embedding records")
    if len(words) < classes_per_model:
        raise InputError(
            f"{len(words)} usable words but classes_per_model={classes_per_model}"
        )
    models = len(words) // classes_per_model
    partitions = partition_classes(words, models, classes_per_model, seed)
    datasets = []
    for classes in partitions:
        train_rows = []
        test_rows = []
        test_labels = []
        for label, word in enumerate(classes):
            rows = sorted(per_word[word], key=lambda r: r.context_id)
            train_rows.append(rows[0].vector)
            for r in rows[1:]:
                test_rows.append(r.vector)
                test_labels.append(label)
        datasets.append(
            ProbeDataset(
                classes=tuple(classes),
                train_x=np.vstack(train_rows),
                test_x=np.vstack(test_rows),
                test_y=np.asarray(test_labels),
            )
        )
    return datasets


def probe_identity_pipeline(config: RunConfig) -> list[ReportTable]:
    """Train word-identity probes and bin their errors by lexicon facets."""
    emb_path = _require_path(config, "embeddings_path", "probe-identity")
    lex_path = _require_path(config, "lexicon_path", "probe-identity")
    records = read_embeddings(emb_path)
    lexicon = read_lexicon(lex_path)
    datasets = build_identity_datasets(records, config.classes_per_model, config.seed)
    reports = []
    summary_rows = []
    for i, dataset in enumerate(datasets):
        model = train_ovr_logistic(
            dataset,
            l2_strength=config.l2_strength,
            tol=config.tol,
            max_iter=config.max_iter,
            seed=config.seed,
            balance_classes=config.balance_classes,
        )
        report = evaluate(model, dataset)
        reports.append(report)
        summary_rows.append((i, len(dataset.classes), report.overall_accuracy))
    tables = [
        ReportTable(
            name="identity_models",
            columns=("model", "n_classes", "accuracy"),
            rows=tuple(summary_rows),
        )
    ]
    for by in ("frequency", "senses", "tokens", "first_token"):
        bins = bin_error_rates(
            reports, lexicon, by=by, frequency_edges=config.frequency_edges
        )
        tables.append(
            ReportTable(
                name=f"identity_errors_by_{by}",
                columns=("bin", "error_percent", "n_instances"),
                rows=tuple(bins),
            )
        )
    return tables


def probe_context_pipeline(config: RunConfig) -> list[ReportTable]:
    """Context-retrieval probe: one shared model, per-word error rates."""
    emb_path = _require_path(config, "embeddings_path", "probe-context")
    records = read_embeddings(emb_path)
    words = sorted({r.token for r in records if not r.is_mask})
    if not words:
        raise InputError("no word rows in embedding file")
    datasets = {
        w: build_context_retrieval_dataset(records, w, config.templates_per_word)
        for w in words
    }
    model = train_ovr_logistic(
        datasets[words[0]],
        l2_strength=config.l2_strength,
        tol=config.tol,
        max_iter=config.max_iter,
        seed=config.seed,
    )
    lexicon = (
        read_lexicon(config.lexicon_path) if config.lexicon_path is not None else None
    )
    rows = []
    errors = []
    logf = []
    for w in words:
        report = evaluate(model, datasets[w])
        error_rate = 1.0 - report.overall_accuracy
        frequency = None
        if lexicon is not None and w in lexicon:
            frequency = lexicon[w].frequency
            errors.append(error_rate)
            logf.append(math.log10(frequency))
        rows.append((w, error_rate, frequency))
    tables = [
        ReportTable(
            name="context_retrieval",
            columns=("word", "error_rate", "frequency"),
            rows=tuple(rows),
        )
    ]
    if len(errors) >= 3:
        s = PairedSeries(np.asarray(errors), np.asarray(logf))
        tables.append(
            ReportTable(
                name="context_frequency_correlation",
                columns=("n_words", "pearson_r", "spearman_r"),
                rows=((len(errors), pearson(s), spearman(s)),),
            )
        )
    return tables


def _pair_embedding(
    records: Sequence[EmbeddingRecord], token: str, context_id: int
) -> np.ndarray:
    for r in records:
        if not r.is_mask and r.token == token and r.context_id == context_id:
            return r.vector
    raise InputError(f"no embedding for '{token}' in context {context_id}")


def distortion_pipeline(config: RunConfig) -> list[ReportTable]:
    """Calibrate cosine to human scores; correlate residuals with ball size."""
    emb_path = _require_path(config, "embeddings_path", "distortion")
    pairs_path = _require_path(config, "pairs_path", "distortion")
    records = read_embeddings(emb_path)
    skeletons = read_similarity_pairs(pairs_path)
    if not skeletons:
        raise InputError("no similarity pairs in input")
    by_source = cohorts_from_records(records, min_points=2)
    if len(by_source) != 1:
        raise InputError(
            f"distortion needs a single-source embedding file, got {sorted(by_source)}"
        )
    cohorts = next(iter(by_source.values()))
    annotated = []
    for p in skeletons:
        v1 = _pair_embedding(records, p.word1, p.context1_id)
        v2 = _pair_embedding(records, p.word2, p.context2_id)
        cos = cosine_similarity(v1, v2)
        union = pair_radius_metric(
            p,
            cohorts,
            mode="union",
            sample_size=config.sample_size,
            trials=config.trials,
            epsilon=config.epsilon,
            seed=config.seed,
        )
        r1 = cohort_radius(
            cohorts[p.word1], config.sample_size, config.trials, config.epsilon, config.seed
        )
        r2 = cohort_radius(
            cohorts[p.word2], config.sample_size, config.trials, config.epsilon, config.seed
        )
        annotated.append(
            dataclasses.replace(p, cosine=cos, union_radius=union, radius1=r1, radius2=r2)
        )
    scored, fit = calibrate_and_score(annotated)
    pair_rows = tuple(
        (
            p.word1,
            p.word2,
            p.human_score,
            p.cosine,
            p.predicted,
            p.residual,
            p.union_radius,
        )
        for p in scored
    )
    tables = [
        ReportTable(
            name="distortion_pairs",
            columns=(
                "word1",
                "word2",
                "human_score",
                "cosine",
                "predicted",
                "residual",
                "union_radius",
            ),
            rows=pair_rows,
        ),
        ReportTable(
            name="distortion_fit",
            columns=("slope", "intercept", "r_squared", "n_pairs"),
            rows=((fit.slope, fit.intercept, fit.r_squared, len(scored)),),
        ),
    ]
    if len(scored) >= 16:
        qs = quartile_residual_correlation(scored, mode=config.radius_mode)
        tables.append(
            ReportTable(
                name="distortion_quartiles",
                columns=("quartile", "pearson_r"),
                rows=tuple((i + 1, r) for i, r in enumerate(qs)),
            )
        )
    return tables


def geo_pipeline(config: RunConfig) -> list[ReportTable]:
    """Region radii, GDP correlation, similarity counts, vocab coverage."""
    countries_path = _require_path(config, "countries_path", "geo")
    emb_path = _require_path(config, "embeddings_path", "geo")
    countries = mark_excluded(
        read_country_table(countries_path), default_excluded_countries()
    )
    records = read_embeddings(emb_path)
    by_source = cohorts_from_records(records, min_points=2)
    tables = []
    if config.cities_path is not None and config.vocab_path is not None:
        cities = read_city_table(config.cities_path)
        vocab = read_vocab(config.vocab_path)
        coverage = vocab_coverage(cities, vocab)
        tables.append(
            ReportTable(
                name="city_vocab_coverage",
                columns=("region", "covered", "total", "percent"),
                rows=tuple(
                    (region, stat.covered, stat.total, stat.percent)
                    for region, stat in coverage.items()
                ),
            )
        )
    usable = [c for c in countries if c.excluded is None]
    table = region_radius_table(
        countries,
        by_source,
        sample_size=config.sample_size,
        trials=config.trials,
        epsilon=config.epsilon,
        seed=config.seed,
    )
    tables.append(
        ReportTable(
            name="region_radius",
            columns=("source", "region", "percent_of_base"),
            rows=tuple(
                (source, region, pct)
                for source in sorted(table)
                for region, pct in sorted(table[source].items())
            ),
        )
    )
    gdp_rows = []
    for source in sorted(by_source):
        cohorts = by_source[source]
        radii = {
            c.name: cohort_radius(
                cohorts[c.name],
                config.sample_size,
                config.trials,
                config.epsilon,
                config.seed,
            )
            for c in usable
            if c.name in cohorts
        }
        present = [c for c in countries if c.name in radii or c.excluded is not None]
        result = gdp_radius_correlation(present, radii)
        gdp_rows.append(
            (
                source,
                result.correlation,
                result.n_used,
                result.low_gdp_mean,
                result.top_mean,
                result.gap_percent,
            )
        )
    tables.append(
        ReportTable(
            name="gdp_correlation",
            columns=(
                "source",
                "pearson_r",
                "n_countries",
                "low_gdp_mean_radius",
                "top_mean_radius",
                "gap_percent",
            ),
            rows=tuple(gdp_rows),
        )
    )
    count_rows = []
    for source in sorted(by_source):
        cohorts = {
            c.name: by_source[source][c.name]
            for c in usable
            if c.name in by_source[source]
        }
        eligible = sorted(
            name for name, c in cohorts.items() if len(c) >= config.instances
        )
        for name in eligible:
            count = similar_country_count(
                name,
                {n: cohorts[n] for n in eligible},
                threshold=config.threshold,
                instances=config.instances,
                seed=config.seed,
                aggregate=config.aggregate,
            )
            count_rows.append((source, name, count))
    tables.append(
        ReportTable(
            name="similar_counts",
            columns=("source", "country", "count"),
            rows=tuple(count_rows),
        )
    )
    return tables


THEORY_DIMS = (2, 8, 768)


def theory_check_pipeline(
    config: RunConfig, samples_per_case: int = 2000
) -> list[ReportTable]:
    """Monte Carlo check that in-ball cosine distances obey predicted bounds."""
    rng = np.random.default_rng(config.seed)
    rows = []
    monotone_rows = []
    for dim in THEORY_DIMS:
        center = rng.normal(size=dim)
        center *= (2.0 + rng.uniform()) / np.linalg.norm(center)
        target = rng.normal(size=dim)
        target /= np.linalg.norm(target)
        norm_c = float(np.linalg.norm(center))
        for radius_frac in (0.25, 0.6, 0.95):
            radius = radius_frac * norm_c
            query = CosineRangeQuery(center=center, radius=radius, target=target)
            lo, hi = cosine_distance_range(query)
            points = sample_in_ball(center, radius, samples_per_case, config.seed + dim)
            units = points / np.linalg.norm(points, axis=1, keepdims=True)
            distances = 1.0 - units @ target
            margin_lo = float(distances.min() - lo)
            margin_hi = float(hi - distances.max())
            rows.append(
                (
                    dim,
                    radius_frac,
                    samples_per_case,
                    lo,
                    hi,
                    margin_lo,
                    margin_hi,
                    bool(margin_lo >= -1e-9 and margin_hi >= -1e-9),
                )
            )
        radii = np.linspace(0.05, 0.95, 10) * norm_c
        monotone_rows.append(
            (dim, bool(range_width_monotone(center, target, radii)))
        )
    return [
        ReportTable(
            name="theory_containment",
            columns=(
                "dim",
                "radius_fraction",
                "n_samples",
                "bound_lo",
                "bound_hi",
                "margin_lo",
                "margin_hi",
                "inside",
            ),
            rows=tuple(rows),
        ),
        ReportTable(
            name="theory_width_monotone",
            columns=("dim", "nondecreasing"),
            rows=tuple(monotone_rows),
        ),
    ]


PIPELINES: Mapping[str, object] = {
    "meb": meb_pipeline,
    "probe-identity": probe_identity_pipeline,
    "probe-context": probe_context_pipeline,
    "distortion": distortion_pipeline,
    "geo": geo_pipeline,
    "theory-check": theory_check_pipeline,
}


def report_pipeline(config: RunConfig) -> list[ReportTable]:
    """Run every pipeline whose required inputs are configured."""
    tables = list(theory_check_pipeline(config))
    if config.embeddings_path is not None:
        tables.extend(meb_pipeline(config))
        if config.lexicon_path is not None:
            tables.extend(probe_identity_pipeline(config))
        if config.pairs_path is not None:
            tables.extend(distortion_pipeline(config))
        if config.countries_path is not None:
            tables.extend(geo_pipeline(config))
    return tables
