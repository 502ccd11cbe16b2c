"""File formats: embedding binaries, TSV tables, and report emission.

The embedding container is a little-endian binary: magic ``EMB1``, a
u32 dimension, a u64 record count, then per record a u16 token byte
length, the UTF-8 token, a u32 context id, a u8 flag byte (bit 0 marks
mask rows), a 16-byte space-padded source tag, and the vector as 32-bit
floats. Vectors are widened to 64-bit in memory. A tab-separated text
twin exists for hand-written fixtures. Lexicon, similarity-pair, and
country/city metadata all travel as TSV with fixed headers. Reports are
emitted as CSV or JSON lines with floats at 6 significant digits.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .distortion import SimilarityPair
from .errors import FormatError, InputError
from .geo import CityRecord, CountryRecord

MAGIC = b"EMB1"
SOURCE_TAG_BYTES = 16
MASK_FLAG = 0x01
FIRST_TOKEN_CATEGORIES = ("in_vocab_word", "short_nonword", "other")
LEXICON_HEADER = ("word", "frequency", "senses", "tokens", "first_token_category")
PAIRS_HEADER = ("word1", "word2", "context1_id", "context2_id", "human_score")
COUNTRY_HEADER = ("name", "region", "gdp", "tokens")
CITY_HEADER = ("name", "country", "region", "population")
REPORT_FORMATS = ("csv", "json-lines")


@dataclass(frozen=True)
class EmbeddingRecord:
    """One stored embedding: a token in one context from one source."""

    token: str
    context_id: int
    source: str
    vector: np.ndarray
    is_mask: bool = False

    def __post_init__(self):
        if not self.token:
            raise InputError("token must be nonempty")
        if not 0 <= self.context_id < 2**32:
            raise InputError(f"context_id {self.context_id} outside u32 range")
        if len(self.source.encode("utf-8")) > SOURCE_TAG_BYTES:
            raise InputError(f"source tag '{self.source}' exceeds {SOURCE_TAG_BYTES} bytes")
        v = np.asarray(self.vector, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise InputError("vector must be a nonempty 1-D array")
        object.__setattr__(self, "vector", v)


@dataclass(frozen=True)
class LexiconEntry:
    """Per-word metadata: corpus frequency, sense count, tokenization shape."""

    word: str
    frequency: int
    sense_count: int | None
    token_count: int
    first_token_category: str

    def __post_init__(self):
        if not self.word:
            raise InputError("lexicon word must be nonempty")
        if self.frequency < 1:
            raise InputError(f"frequency must be >= 1 for '{self.word}'")
        if self.sense_count is not None and self.sense_count < 1:
            raise InputError(f"sense_count must be >= 1 for '{self.word}'")
        if self.token_count < 1:
            raise InputError(f"token_count must be >= 1 for '{self.word}'")
        if self.first_token_category not in FIRST_TOKEN_CATEGORIES:
            raise InputError(
                f"unknown first_token_category '{self.first_token_category}' for '{self.word}'"
            )


def _read_exact(f: IO[bytes], n: int, what: str, path) -> bytes:
    offset = f.tell()
    data = f.read(n)
    if len(data) != n:
        raise FormatError(f"truncated file while reading {what}", path=path, offset=offset)
    return data


def iter_embeddings(path) -> Iterator[EmbeddingRecord]:
    """Stream records from an EMB1 file, one at a time."""
    path = Path(path)
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic", path)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", path=path, offset=0)
        dim, count = struct.unpack("<IQ", _read_exact(f, 12, "header", path))
        if dim < 1:
            raise FormatError("dimension must be >= 1", path=path, offset=4)
        for i in range(count):
            token_len = struct.unpack(
                "<H", _read_exact(f, 2, f"token length of record {i}", path)
            )[0]
            if token_len == 0:
                raise FormatError(
                    f"record {i} has empty token", path=path, offset=f.tell() - 2
                )
            token_bytes = _read_exact(f, token_len, f"token of record {i}", path)
            try:
                token = token_bytes.decode("utf-8")
            except UnicodeDecodeError:
                raise FormatError(
                    f"record {i} token is not valid UTF-8",
                    path=path,
                    offset=f.tell() - token_len,
                ) from None
            context_id = struct.unpack(
                "<I", _read_exact(f, 4, f"context id of record {i}", path)
            )[0]
            flags = _read_exact(f, 1, f"flags of record {i}", path)[0]
            if flags & ~MASK_FLAG:
                raise FormatError(
                    f"record {i} has unknown flag bits 0x{flags:02x}",
                    path=path,
                    offset=f.tell() - 1,
                )
            source = (
                _read_exact(f, SOURCE_TAG_BYTES, f"source tag of record {i}", path)
                .decode("utf-8")
                .rstrip(" ")
            )
            raw = _read_exact(f, 4 * dim, f"vector of record {i}", path)
            vector = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            yield EmbeddingRecord(token, context_id, source, vector, bool(flags & MASK_FLAG))
        trailing = f.read(1)
        if trailing:
            raise FormatError(
                "trailing data after final record", path=path, offset=f.tell() - 1
            )


def read_embeddings(path) -> list[EmbeddingRecord]:
    return list(iter_embeddings(path))


def write_embeddings(records: Sequence[EmbeddingRecord], path, dim: int | None = None) -> None:
    """Write records as EMB1; dim is only needed for an empty file."""
    records = list(records)
    if records:
        dims = {r.vector.size for r in records}
        if dim is not None:
            dims.add(dim)
        if len(dims) > 1:
            raise InputError(f"dimension mismatch across records: {sorted(dims)}")
        dim = records[0].vector.size
    elif dim is None:
        raise InputError("dimension required to write an empty embedding file")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IQ", dim, len(records)))
        for r in records:
            token_bytes = r.token.encode("utf-8")
            if len(token_bytes) > 0xFFFF:
                raise InputError(f"token '{r.token[:20]}...' exceeds 65535 bytes")
            f.write(struct.pack("<H", len(token_bytes)))
            f.write(token_bytes)
            f.write(struct.pack("<I", r.context_id))
            f.write(struct.pack("<B", MASK_FLAG if r.is_mask else 0))
            f.write(r.source.encode("utf-8").ljust(SOURCE_TAG_BYTES, b" "))
            f.write(np.asarray(r.vector, dtype="<f4").tobytes())


def write_embeddings_text(records: Sequence[EmbeddingRecord], path) -> None:
    """Text twin of EMB1: token, context id, source, flags, then decimals."""
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            if "\t" in r.token or "\n" in r.token:
                raise InputError(f"token {r.token!r} cannot contain tab or newline")
            values = " ".join(
                format(float(np.float32(x)), ".9g") for x in r.vector
            )
            flags = MASK_FLAG if r.is_mask else 0
            f.write(f"{r.token}\t{r.context_id}\t{r.source}\t{flags}\t{values}\n")


def read_embeddings_text(path) -> list[EmbeddingRecord]:
    path = Path(path)
    records = []
    dim = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise FormatError(
                    f"expected 5 tab-separated fields, got {len(parts)}",
                    path=path,
                    line=lineno,
                )
            token, cid_s, source, flags_s, values_s = parts
            try:
                cid = int(cid_s)
                flags = int(flags_s)
                vector = np.array(
                    [np.float32(x) for x in values_s.split()], dtype=np.float64
                )
            except ValueError as exc:
                raise FormatError(str(exc), path=path, line=lineno) from None
            if dim is None:
                dim = vector.size
            elif vector.size != dim:
                raise FormatError(
                    f"vector length {vector.size} != {dim}", path=path, line=lineno
                )
            try:
                records.append(
                    EmbeddingRecord(token, cid, source, vector, bool(flags & MASK_FLAG))
                )
            except InputError as exc:
                raise FormatError(str(exc), path=path, line=lineno) from None
    return records


def _strict_uint(text: str, field: str, path, lineno: int) -> int:
    if not text or any(c not in "0123456789" for c in text):
        raise FormatError(f"bad {field} value '{text}'", path=path, line=lineno)
    return int(text)


def _read_tsv(path, header: tuple[str, ...]) -> Iterator[tuple[int, list[str]]]:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        first = f.readline()
        if first.rstrip("\n").split("\t") != list(header):
            raise FormatError(
                f"expected header {chr(9).join(header)!r}", path=path, line=1
            )
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(header):
                raise FormatError(
                    f"expected {len(header)} fields, got {len(parts)}",
                    path=path,
                    line=lineno,
                )
            yield lineno, parts


def read_lexicon(path) -> dict[str, LexiconEntry]:
    path = Path(path)
    lexicon: dict[str, LexiconEntry] = {}
    for lineno, (word, freq_s, senses_s, tokens_s, category) in (
        (n, p) for n, p in _read_tsv(path, LEXICON_HEADER)
    ):
        if word in lexicon:
            raise FormatError(f"duplicate word '{word}'", path=path, line=lineno)
        senses = None if senses_s == "" else _strict_uint(senses_s, "senses", path, lineno)
        try:
            entry = LexiconEntry(
                word=word,
                frequency=_strict_uint(freq_s, "frequency", path, lineno),
                sense_count=senses,
                token_count=_strict_uint(tokens_s, "tokens", path, lineno),
                first_token_category=category,
            )
        except InputError as exc:
            raise FormatError(str(exc), path=path, line=lineno) from None
        lexicon[word] = entry
    return lexicon


def write_lexicon(entries: Iterable[LexiconEntry], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("\t".join(LEXICON_HEADER) + "\n")
        for e in entries:
            senses = "" if e.sense_count is None else str(e.sense_count)
            f.write(
                f"{e.word}\t{e.frequency}\t{senses}\t{e.token_count}\t{e.first_token_category}\n"
            )


def read_similarity_pairs(path) -> list[SimilarityPair]:
    path = Path(path)
    pairs = []
    for lineno, (w1, w2, c1_s, c2_s, score_s) in _read_tsv(path, PAIRS_HEADER):
        try:
            score = float(score_s)
        except ValueError:
            raise FormatError(
                f"bad human_score value '{score_s}'", path=path, line=lineno
            ) from None
        try:
            pairs.append(
                SimilarityPair(
                    word1=w1,
                    word2=w2,
                    context1_id=_strict_uint(c1_s, "context1_id", path, lineno),
                    context2_id=_strict_uint(c2_s, "context2_id", path, lineno),
                    human_score=score,
                )
            )
        except InputError as exc:
            raise FormatError(str(exc), path=path, line=lineno) from None
    return pairs


def write_similarity_pairs(pairs: Iterable[SimilarityPair], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("\t".join(PAIRS_HEADER) + "\n")
        for p in pairs:
            f.write(
                f"{p.word1}\t{p.word2}\t{p.context1_id}\t{p.context2_id}\t{p.human_score:g}\n"
            )


def read_country_table(path) -> list[CountryRecord]:
    path = Path(path)
    countries = []
    seen = set()
    for lineno, (name, region, gdp_s, tokens_s) in _read_tsv(path, COUNTRY_HEADER):
        if name in seen:
            raise FormatError(f"duplicate country '{name}'", path=path, line=lineno)
        seen.add(name)
        if gdp_s == "":
            gdp = None
        else:
            try:
                gdp = float(gdp_s)
            except ValueError:
                raise FormatError(f"bad gdp value '{gdp_s}'", path=path, line=lineno) from None
        try:
            countries.append(
                CountryRecord(
                    name=name,
                    region=region,
                    gdp=gdp,
                    token_count=_strict_uint(tokens_s, "tokens", path, lineno),
                )
            )
        except InputError as exc:
            raise FormatError(str(exc), path=path, line=lineno) from None
    return countries


def write_country_table(countries: Iterable[CountryRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("\t".join(COUNTRY_HEADER) + "\n")
        for c in countries:
            gdp = "" if c.gdp is None else format(c.gdp, "g")
            f.write(f"{c.name}\t{c.region}\t{gdp}\t{c.token_count}\n")


def read_city_table(path) -> list[CityRecord]:
    path = Path(path)
    cities = []
    for lineno, (name, country, region, pop_s) in _read_tsv(path, CITY_HEADER):
        try:
            cities.append(
                CityRecord(
                    name=name,
                    country=country,
                    region=region,
                    population=_strict_uint(pop_s, "population", path, lineno),
                )
            )
        except InputError as exc:
            raise FormatError(str(exc), path=path, line=lineno) from None
    return cities


def write_city_table(cities: Iterable[CityRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("\t".join(CITY_HEADER) + "\n")
        for c in cities:
            f.write(f"{c.name}\t{c.country}\t{c.region}\t{c.population}\n")


def read_vocab(path) -> frozenset[str]:
    """One vocabulary entry per line; blank lines ignored."""
    with open(path, encoding="utf-8") as f:
        return frozenset(line.strip() for line in f if line.strip())


def read_templates(path) -> list[str]:
    """One sentence template per line; blank lines ignored."""
    with open(path, encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip()]


@dataclass(frozen=True)
class ReportTable:
    """Named long-format table; column order is the emission order."""

    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        if not self.name or not all(
            ch.isalnum() or ch in "_-." for ch in self.name
        ):
            raise InputError(f"report table name '{self.name}' is not filesystem-safe")
        if not self.columns:
            raise InputError("report table needs at least one column")
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        for r in self.rows:
            if len(r) != len(self.columns):
                raise InputError(
                    f"row width {len(r)} != {len(self.columns)} in table '{self.name}'"
                )


def render_cell(value) -> str:
    """Stable text form of a cell; floats at 6 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".6g")
    return str(value)


def _json_cell(value):
    if isinstance(value, (float, np.floating)):
        return float(format(float(value), ".6g"))
    if isinstance(value, np.integer):
        return int(value)
    return value


def _write_table(table: ReportTable, path: Path, fmt: str) -> None:
    try:
        if fmt == "csv":
            with open(path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(table.columns)
                for row in table.rows:
                    writer.writerow([render_cell(v) for v in row])
        else:
            with open(path, "w", encoding="utf-8") as f:
                for row in table.rows:
                    obj = {c: _json_cell(v) for c, v in zip(table.columns, row)}
                    f.write(json.dumps(obj) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write report to '{path}': {exc}") from exc


def emit_report(tables, path, fmt: str = "csv") -> list[Path]:
    """Write one table to a file, or several tables into a directory.

    Returns the written paths. Output is deterministic: fixed column
    order, floats at 6 significant digits, newline line endings.
    """
    if fmt not in REPORT_FORMATS:
        raise InputError(f"unknown report format '{fmt}'")
    suffix = ".csv" if fmt == "csv" else ".jsonl"
    path = Path(path)
    if isinstance(tables, ReportTable):
        _write_table(tables, path, fmt)
        return [path]
    tables = list(tables)
    if not tables:
        raise InputError("no tables to emit")
    if len(tables) == 1:
        _write_table(tables[0], path, fmt)
        return [path]
    names = [t.name for t in tables]
    if len(set(names)) != len(names):
        raise InputError("duplicate table names in report")
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create report directory '{path}': {exc}") from exc
    written = []
    for t in tables:
        target = path / f"{t.name}{suffix}"
        _write_table(t, target, fmt)
        written.append(target)
    return written


def read_report_csv(path) -> ReportTable:
    """Re-parse an emitted CSV; cells come back as strings."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            columns = tuple(next(reader))
        except StopIteration:
            raise FormatError("empty report file", path=path, line=1) from None
        rows = tuple(tuple(row) for row in reader)
    return ReportTable(name=path.stem, columns=columns, rows=rows)
