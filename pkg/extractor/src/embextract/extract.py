"""Keyword-occurrence embedding extraction from masked language models.

Given a transformer encoder, a sentence corpus, and a keyword list, this
module locates every keyword occurrence inside the tokenized sentences,
runs the encoder once per retained sentence, and stores one vector per
occurrence: the mean of the last four hidden layers at the occurrence's
first subword position. In mask mode each occurrence is encoded
separately with its subwords replaced by a single mask token, and the
vector is taken at the mask position instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
import torch

from .errors import ExtractionError
from .matching import find_subsequence
from .writer import SOURCE_TAG_BYTES, Emb1Record, write_emb1

LAST_LAYERS = 4


@dataclass(frozen=True)
class ExtractionJob:
    """Parameters for one extraction run."""

    model: str
    corpus_path: Path
    keywords: tuple[str, ...]
    out_path: Path
    mask_mode: bool = False
    min_chars: int = 20
    max_chars: int = 512
    batch_size: int = 16
    source: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "corpus_path", Path(self.corpus_path))
        object.__setattr__(self, "out_path", Path(self.out_path))
        object.__setattr__(self, "keywords", tuple(self.keywords))
        if not self.keywords:
            raise ExtractionError("at least one keyword is required")
        seen = set()
        for keyword in self.keywords:
            if not keyword or keyword != keyword.strip():
                raise ExtractionError(
                    f"keyword {keyword!r} is empty or has surrounding whitespace"
                )
            if keyword in seen:
                raise ExtractionError(f"duplicate keyword '{keyword}'")
            seen.add(keyword)
        if self.min_chars < 1:
            raise ExtractionError(f"min_chars must be >= 1, got {self.min_chars}")
        if self.max_chars < self.min_chars:
            raise ExtractionError(
                f"max_chars ({self.max_chars}) must be >= min_chars ({self.min_chars})"
            )
        if self.batch_size < 1:
            raise ExtractionError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.source is not None:
            if len(self.source.encode("utf-8")) > SOURCE_TAG_BYTES:
                raise ExtractionError(
                    f"source tag '{self.source}' exceeds {SOURCE_TAG_BYTES} bytes"
                )


@dataclass(frozen=True)
class ExtractionSummary:
    """Counts reported by :func:`extract`."""

    sentences: int
    skipped_short: int
    skipped_long: int
    skipped_over_limit: int
    records: int
    records_by_keyword: dict[str, int]


class _Occurrence(NamedTuple):
    context_id: int
    keyword: str
    kept_index: int
    position: int
    n_pieces: int


def read_keywords(path) -> tuple[str, ...]:
    """Read one keyword per line; blank lines are skipped, duplicates rejected."""
    p = Path(path)
    if not p.is_file():
        raise ExtractionError(f"keywords file not found: {p}")
    out: list[str] = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(p.read_text("utf-8").splitlines(), start=1):
        word = raw.strip()
        if not word:
            continue
        if word in seen:
            raise ExtractionError(
                f"duplicate keyword '{word}' on line {lineno}"
                f" (first seen on line {seen[word]})"
            )
        seen[word] = lineno
        out.append(word)
    if not out:
        raise ExtractionError(f"no keywords in {p}")
    return tuple(out)


def default_source_tag(model: str) -> str:
    """Source tag derived from the model name: its sanitized, truncated tail."""
    tail = model.replace("\\", "/").rstrip("/").rsplit("/", 1)[-1]
    clean = "".join(
        ch for ch in tail if ch.isascii() and (ch.isalnum() or ch in "._-")
    )
    return clean[:SOURCE_TAG_BYTES] or "mlm"


def _load_model(name: str):
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(name)
        model = AutoModel.from_pretrained(name)
    except (OSError, ValueError) as exc:
        raise ExtractionError(f"cannot load model '{name}': {exc}") from exc
    model.eval()
    return tokenizer, model


def _token_limit(tokenizer, model) -> int:
    limit = int(getattr(model.config, "max_position_embeddings", 0) or 0)
    if limit > 0:
        return limit
    # Tokenizers without a real limit advertise a huge sentinel value.
    declared = int(getattr(tokenizer, "model_max_length", 0) or 0)
    if 0 < declared < 1_000_000:
        return declared
    return 512


@torch.no_grad()
def _mean_last_layers(model, sequences, pad_id):
    """Mean of the last hidden layers, shape (batch, max_len, hidden)."""
    width = max(len(seq) for seq in sequences)
    input_ids = torch.full((len(sequences), width), pad_id, dtype=torch.long)
    attention = torch.zeros((len(sequences), width), dtype=torch.long)
    for row, seq in enumerate(sequences):
        input_ids[row, : len(seq)] = torch.tensor(seq, dtype=torch.long)
        attention[row, : len(seq)] = 1
    output = model(
        input_ids=input_ids, attention_mask=attention, output_hidden_states=True
    )
    states = output.hidden_states
    if len(states) < LAST_LAYERS + 1:
        raise ExtractionError(
            f"model has {len(states) - 1} hidden layers, need at least {LAST_LAYERS}"
        )
    return torch.stack(states[-LAST_LAYERS:]).mean(dim=0)


def _chunks(items, size):
    for start in range(0, len(items), size):
        yield items[start : start + size]


def _plain_vectors(model, kept, occurrences, pad_id, batch_size):
    """One forward pass per retained sentence, shared by its occurrences."""
    wanted: dict[int, set[int]] = {}
    for occ in occurrences:
        wanted.setdefault(occ.kept_index, set()).add(occ.position)
    pulled: dict[tuple[int, int], np.ndarray] = {}
    for group in _chunks(sorted(wanted), batch_size):
        hidden = _mean_last_layers(model, [kept[i] for i in group], pad_id)
        for row, kept_index in enumerate(group):
            for pos in wanted[kept_index]:
                pulled[(kept_index, pos)] = (
                    hidden[row, pos].to(torch.float32).numpy().copy()
                )
    return [pulled[(occ.kept_index, occ.position)] for occ in occurrences]


def _mask_vectors(model, kept, occurrences, mask_id, pad_id, batch_size):
    """One forward pass per occurrence, its subwords collapsed to one mask."""
    out: list[np.ndarray] = []
    for group in _chunks(occurrences, batch_size):
        sequences = []
        for occ in group:
            ids = kept[occ.kept_index]
            sequences.append(
                ids[: occ.position] + [mask_id] + ids[occ.position + occ.n_pieces :]
            )
        hidden = _mean_last_layers(model, sequences, pad_id)
        for row, occ in enumerate(group):
            out.append(hidden[row, occ.position].to(torch.float32).numpy().copy())
    return out


def extract(job: ExtractionJob) -> ExtractionSummary:
    """Run the extraction described by ``job`` and write its output file.

    Sentences are one per line; lines outside the character bounds or over
    the model's position limit are skipped and counted. Every surviving
    keyword occurrence yields one record. Context ids number distinct
    (sentence, subword position) slots in scan order, so plain and mask
    runs over the same inputs assign identical ids.
    """
    if not job.corpus_path.is_file():
        raise ExtractionError(f"corpus file not found: {job.corpus_path}")
    lines = job.corpus_path.read_text("utf-8").splitlines()
    sentences = [line.strip() for line in lines if line.strip()]

    tokenizer, model = _load_model(job.model)
    limit = _token_limit(tokenizer, model)
    pad_id = tokenizer.pad_token_id if tokenizer.pad_token_id is not None else 0

    unk = tokenizer.unk_token_id
    keyword_ids: list[list[int]] = []
    for keyword in job.keywords:
        ids = tokenizer(keyword, add_special_tokens=False)["input_ids"]
        if not ids:
            raise ExtractionError(f"keyword '{keyword}' tokenizes to nothing")
        if unk is not None and unk in ids:
            raise ExtractionError(
                f"keyword '{keyword}' contains out-of-vocabulary pieces"
            )
        keyword_ids.append(list(ids))

    skipped_short = skipped_long = skipped_over = 0
    kept: list[list[int]] = []
    for text in sentences:
        if len(text) < job.min_chars:
            skipped_short += 1
            continue
        if len(text) > job.max_chars:
            skipped_long += 1
            continue
        ids = tokenizer(text, add_special_tokens=True)["input_ids"]
        if len(ids) > limit:
            skipped_over += 1
            continue
        kept.append(list(ids))

    registry: dict[tuple[int, int], int] = {}
    occurrences: list[_Occurrence] = []
    for kept_index, ids in enumerate(kept):
        for keyword, kw_ids in zip(job.keywords, keyword_ids):
            for pos in find_subsequence(ids, kw_ids):
                key = (kept_index, pos)
                if key not in registry:
                    registry[key] = len(registry)
                occurrences.append(
                    _Occurrence(registry[key], keyword, kept_index, pos, len(kw_ids))
                )

    if job.mask_mode:
        mask_id = tokenizer.mask_token_id
        if mask_id is None:
            raise ExtractionError(
                "model tokenizer has no mask token; mask mode unavailable"
            )
        vectors = _mask_vectors(
            model, kept, occurrences, mask_id, pad_id, job.batch_size
        )
    else:
        vectors = _plain_vectors(model, kept, occurrences, pad_id, job.batch_size)

    source = job.source if job.source is not None else default_source_tag(job.model)
    by_keyword = {keyword: 0 for keyword in job.keywords}
    records = []
    for occ, vec in zip(occurrences, vectors):
        by_keyword[occ.keyword] += 1
        records.append(
            Emb1Record(
                token=occ.keyword,
                context_id=occ.context_id,
                source=source,
                vector=vec,
                is_mask=job.mask_mode,
            )
        )
    write_emb1(job.out_path, int(model.config.hidden_size), records)
    return ExtractionSummary(
        sentences=len(sentences),
        skipped_short=skipped_short,
        skipped_long=skipped_long,
        skipped_over_limit=skipped_over,
        records=len(records),
        records_by_keyword=by_keyword,
    )
