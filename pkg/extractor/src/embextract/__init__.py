"""Keyword-occurrence embeddings from masked language models, in EMB1 files."""

from .errors import ExtractionError
from .extract import (
    ExtractionJob,
    ExtractionSummary,
    default_source_tag,
    extract,
    read_keywords,
)
from .matching import find_subsequence
from .writer import Emb1Record, write_emb1

__all__ = [
    "Emb1Record",
    "ExtractionError",
    "ExtractionJob",
    "ExtractionSummary",
    "default_source_tag",
    "extract",
    "find_subsequence",
    "read_keywords",
    "write_emb1",
]
