"""Canonical JSON helpers shared by the file formats and the CLI.

Every artifact this package writes goes through `canonical_json` so that
identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import json


def canonical_json(obj) -> str:
    """Serialize with sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def subset_key(subset) -> str:
    """Render a destination subset as a sorted comma-joined key ('' = empty)."""
    return ",".join(str(j) for j in sorted(subset))


def parse_subset_key(key: str) -> frozenset[int]:
    key = key.strip()
    if not key:
        return frozenset()
    try:
        return frozenset(int(part) for part in key.split(","))
    except ValueError as exc:
        raise ValueError(f"bad subset key {key!r}") from exc
