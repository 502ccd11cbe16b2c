"""Geometry of contextualized word-embedding clouds.

Tools for measuring how large the cloud of a word's contextual
embeddings is (minimum enclosing balls), how linearly identifiable
words and contexts are (one-shot probes), how cosine similarity
distorts against human judgment as clouds grow, and how those cloud
sizes pattern geographically.
"""

from .config import RunConfig, load_config
from .cosine_range import (
    ArcHalfAngle,
    CosineRangeQuery,
    arc_half_angle,
    cosine_distance_range,
    range_width_monotone,
)
from .distortion import (
    SimilarityPair,
    calibrate_and_score,
    cosine_similarity,
    pair_radius_metric,
    quartile_residual_correlation,
)
from .errors import FormatError, InputError, InvariantError, WordspaceError
from .formats import (
    EmbeddingRecord,
    LexiconEntry,
    ReportTable,
    emit_report,
    iter_embeddings,
    read_embeddings,
    read_lexicon,
    read_similarity_pairs,
    write_embeddings,
)
from .geo import (
    CityRecord,
    CountryRecord,
    GdpRadiusResult,
    artificial_sentences,
    gdp_radius_correlation,
    region_radius_table,
    similar_country_count,
    vocab_coverage,
)
from .geometry import (
    Ball,
    SiblingCohort,
    cohort_radius,
    meb_coreset,
    meb_exact_small,
    pairwise_mean_distance,
    volume_ratio,
)
from .probes import (
    LinearClassifier,
    ProbeDataset,
    ProbeReport,
    bin_error_rates,
    build_context_retrieval_dataset,
    evaluate,
    partition_classes,
    predict,
    train_ovr_logistic,
)
from .stats import (
    LinearFit,
    PairedSeries,
    linear_fit,
    log_bin,
    pearson,
    quartile_split,
    spearman,
)

__version__ = "0.1.0"

__all__ = [
    "ArcHalfAngle",
    "Ball",
    "CityRecord",
    "CosineRangeQuery",
    "CountryRecord",
    "EmbeddingRecord",
    "FormatError",
    "GdpRadiusResult",
    "InputError",
    "InvariantError",
    "LexiconEntry",
    "LinearClassifier",
    "LinearFit",
    "PairedSeries",
    "ProbeDataset",
    "ProbeReport",
    "ReportTable",
    "RunConfig",
    "SiblingCohort",
    "SimilarityPair",
    "WordspaceError",
    "arc_half_angle",
    "artificial_sentences",
    "bin_error_rates",
    "build_context_retrieval_dataset",
    "calibrate_and_score",
    "cohort_radius",
    "cosine_distance_range",
    "cosine_similarity",
    "emit_report",
    "evaluate",
    "gdp_radius_correlation",
    "iter_embeddings",
    "linear_fit",
    "load_config",
    "log_bin",
    "meb_coreset",
    "meb_exact_small",
    "pair_radius_metric",
    "pairwise_mean_distance",
    "partition_classes",
    "pearson",
    "predict",
    "quartile_residual_correlation",
    "quartile_split",
    "range_width_monotone",
    "read_embeddings",
    "read_lexicon",
    "read_similarity_pairs",
    "region_radius_table",
    "similar_country_count",
    "spearman",
    "train_ovr_logistic",
    "volume_ratio",
    "vocab_coverage",
    "write_embeddings",
]
