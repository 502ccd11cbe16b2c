"""Writer for the EMB1 embedding container.

Layout: magic ``EMB1``, little-endian u32 dimension, u64 record count;
per record a u16 token byte length, the UTF-8 token, a u32 context id,
a u8 flag byte (bit 0 marks mask rows), a 16-byte space-padded source
tag, and the vector as 32-bit little-endian floats. The payload is
assembled in memory and written in one exclusive pass so the count in
the header is always consistent with the records that follow.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ExtractionError

MAGIC = b"EMB1"
SOURCE_TAG_BYTES = 16
MASK_FLAG = 0x01


@dataclass(frozen=True)
class Emb1Record:
    """One embedding row destined for an EMB1 file."""

    token: str
    context_id: int
    source: str
    vector: np.ndarray
    is_mask: bool = False

    def __post_init__(self):
        if not self.token:
            raise ExtractionError("record token must be nonempty")
        if len(self.token.encode("utf-8")) > 0xFFFF:
            raise ExtractionError(f"token '{self.token[:20]}...' exceeds 65535 bytes")
        if not 0 <= self.context_id < 2**32:
            raise ExtractionError(f"context_id {self.context_id} outside u32 range")
        if len(self.source.encode("utf-8")) > SOURCE_TAG_BYTES:
            raise ExtractionError(
                f"source tag '{self.source}' exceeds {SOURCE_TAG_BYTES} bytes"
            )
        v = np.asarray(self.vector, dtype=np.float32)
        if v.ndim != 1 or v.size < 1:
            raise ExtractionError("vector must be a nonempty 1-D array")
        object.__setattr__(self, "vector", v)


def write_emb1(path, dim: int, records: Iterable[Emb1Record]) -> int:
    """Write records to an EMB1 file; returns the record count."""
    if dim < 1:
        raise ExtractionError(f"dimension must be >= 1, got {dim}")
    payload = bytearray()
    count = 0
    for r in records:
        if r.vector.size != dim:
            raise ExtractionError(
                f"vector of '{r.token}' has size {r.vector.size}, expected {dim}"
            )
        token_bytes = r.token.encode("utf-8")
        payload += struct.pack("<H", len(token_bytes))
        payload += token_bytes
        payload += struct.pack("<I", r.context_id)
        payload += struct.pack("<B", MASK_FLAG if r.is_mask else 0)
        payload += r.source.encode("utf-8").ljust(SOURCE_TAG_BYTES, b" ")
        payload += np.ascontiguousarray(r.vector, dtype="<f4").tobytes()
        count += 1
    with open(Path(path), "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IQ", dim, count))
        f.write(bytes(payload))
    return count
