"""The writer's output must satisfy the reference EMB1 reader."""

import struct

import numpy as np
import pytest
from wordspace.formats import read_embeddings

from embextract.errors import ExtractionError
from embextract.writer import Emb1Record, write_emb1


def test_round_trip_through_reference_reader(tmp_path):
    rng = np.random.default_rng(3)
    records = [
        Emb1Record("naïve", 0, "unit", rng.normal(size=5).astype(np.float32)),
        Emb1Record(
            "東京", 1, "unit", rng.normal(size=5).astype(np.float32), is_mask=True
        ),
        Emb1Record("cat", 2**32 - 1, "x" * 16, rng.normal(size=5).astype(np.float32)),
    ]
    path = tmp_path / "out.emb"
    assert write_emb1(path, 5, records) == 3
    back = read_embeddings(path)
    assert [r.token for r in back] == ["naïve", "東京", "cat"]
    assert [r.context_id for r in back] == [0, 1, 2**32 - 1]
    assert [r.is_mask for r in back] == [False, True, False]
    assert [r.source for r in back] == ["unit", "unit", "x" * 16]
    for mine, theirs in zip(records, back):
        # The reference reader widens stored binary32 values to float64,
        # which is lossless, so equality here means a bit-exact round trip.
        assert theirs.vector.dtype == np.float64
        np.testing.assert_array_equal(mine.vector.astype(np.float64), theirs.vector)


def test_empty_file_keeps_dimension(tmp_path):
    path = tmp_path / "none.emb"
    assert write_emb1(path, 8, []) == 0
    raw = path.read_bytes()
    assert raw[:4] == b"EMB1"
    assert struct.unpack("<IQ", raw[4:16]) == (8, 0)
    assert read_embeddings(path) == []


def test_vector_size_must_match_dimension(tmp_path):
    bad = Emb1Record("cat", 0, "unit", np.zeros(3, dtype=np.float32))
    with pytest.raises(ExtractionError, match="size 3, expected 4"):
        write_emb1(tmp_path / "bad.emb", 4, [bad])


def test_dimension_must_be_positive(tmp_path):
    with pytest.raises(ExtractionError, match=">= 1"):
        write_emb1(tmp_path / "bad.emb", 0, [])


def test_record_validation():
    vec = np.zeros(2, dtype=np.float32)
    with pytest.raises(ExtractionError, match="nonempty"):
        Emb1Record("", 0, "unit", vec)
    with pytest.raises(ExtractionError, match="u32"):
        Emb1Record("cat", -1, "unit", vec)
    with pytest.raises(ExtractionError, match="u32"):
        Emb1Record("cat", 2**32, "unit", vec)
    with pytest.raises(ExtractionError, match="16 bytes"):
        Emb1Record("cat", 0, "x" * 17, vec)
    with pytest.raises(ExtractionError, match="1-D"):
        Emb1Record("cat", 0, "unit", np.zeros((2, 2), dtype=np.float32))
