"""Stable short hashes for provenance checks between artifacts."""

from __future__ import annotations

import hashlib
import struct
from typing import Iterable


def stable_hash(tag: str, values: Iterable) -> str:
    """16-hex-digit digest of a tag plus a sequence of ints/floats.

    Integers and floats hash differently on purpose; the caller fixes the
    order and types, which makes the digest reproducible across runs and
    machines.
    """
    h = hashlib.sha256(tag.encode("utf-8"))
    for v in values:
        if isinstance(v, bool):
            raise TypeError("booleans are not hashable config values")
        if isinstance(v, int):
            h.update(b"i")
            h.update(struct.pack("<q", v))
        else:
            h.update(b"f")
            h.update(struct.pack("<d", float(v)))
    return h.hexdigest()[:16]
