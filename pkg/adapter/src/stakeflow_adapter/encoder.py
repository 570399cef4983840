"""Deterministic sentence encoder for optional mention vectors.

Stands in for a neural encoder when running offline: hashed character
3-grams and word unigrams with BLAKE2b-derived sign and bucket, L2
normalized. The dimension must match the consuming engine's configuration
(its ``--dim``); the engine treats these vectors as opaque.
"""

from __future__ import annotations

import hashlib
import math


def _normalize(text: str) -> str:
    return " ".join(text.lower().split())


def encode_text(text: str, dim: int, seed: int = 0) -> list[float]:
    if dim <= 0:
        raise ValueError(f"dimension must be positive, got {dim}")
    normalized = _normalize(text)
    vec = [0.0] * dim
    features = ["c3:" + normalized[i : i + 3] for i in range(len(normalized) - 2)]
    features += ["w:" + w for w in normalized.split(" ") if w]
    for feature in features:
        digest = hashlib.blake2b(
            feature.encode("utf-8"), digest_size=8, key=seed.to_bytes(8, "little")
        ).digest()
        h = int.from_bytes(digest, "little")
        vec[h % dim] += 1.0 if h < 2**63 else -1.0
    norm = math.sqrt(sum(x * x for x in vec))
    if norm > 0.0:
        vec = [x / norm for x in vec]
    return vec
