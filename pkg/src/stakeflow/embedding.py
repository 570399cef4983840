"""Mention representations: contextual feature + knowledge-base feature.

The deterministic baseline encoder is a feature-hashing embedder. Its exact
hash contract (stable across processes and platforms):

* the input text is normalized with :func:`stakeflow.corpus.normalize_surface`;
* features are the character 3-grams of the normalized text, each prefixed
  ``"c3:"``, plus its space-separated word unigrams prefixed ``"w:"``;
* each feature is hashed with BLAKE2b (digest 8 bytes, key = the hash seed as
  an 8-byte little-endian unsigned integer) over its UTF-8 bytes, read as a
  little-endian unsigned 64-bit integer ``h``;
* the feature adds ``+1`` to bucket ``h % D`` when bit 63 of ``h`` is zero,
  else ``-1``;
* the bucket vector is L2-normalized, except that empty input (or exact
  cancellation) yields the zero vector.

External vectors computed by an enrichment sidecar enter through the mention
wire record and pass through untouched.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator, Mapping, Sequence

import numpy as np

from .corpus import Mention, normalize_surface
from .errors import CorpusError, EmbeddingError

__all__ = [
    "DEFAULT_DIMENSION",
    "DEFAULT_HASH_SEED",
    "embed_text_hashed",
    "EmbeddingProvider",
    "HashedTextProvider",
    "ExternalVectorProvider",
    "KnowledgeBase",
    "load_kb",
    "embed_context",
    "embed_kb",
    "combine",
    "cosine_similarity",
]

DEFAULT_DIMENSION = 256
DEFAULT_HASH_SEED = 0


def _hash64(feature: str, seed: int) -> int:
    key = seed.to_bytes(8, "little")
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little")


def _features(normalized: str) -> Iterator[str]:
    for i in range(len(normalized) - 2):
        yield "c3:" + normalized[i : i + 3]
    for word in normalized.split(" "):
        if word:
            yield "w:" + word


def embed_text_hashed(text: str, dim: int = DEFAULT_DIMENSION, seed: int = DEFAULT_HASH_SEED) -> np.ndarray:
    """Feature-hashing embedding of ``text``; pure function of (text, dim, seed)."""
    if dim <= 0:
        raise EmbeddingError(f"dimension must be positive, got {dim}")
    if seed < 0:
        raise EmbeddingError(f"hash seed must be non-negative, got {seed}")
    vec = np.zeros(dim, dtype=np.float64)
    for feature in _features(normalize_surface(text)):
        h = _hash64(feature, seed)
        sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
        vec[h % dim] += sign
    norm = math.sqrt(float(np.dot(vec, vec)))
    if norm > 0.0:
        vec /= norm
    return vec


class EmbeddingProvider:
    """Common surface of the pluggable embedding backends."""

    kind: str
    dimension: int

    def embed_text(self, text: str) -> np.ndarray | None:
        """Embed free text, or None if this backend cannot embed text."""
        raise NotImplementedError

    def _check_dim(self, vector: np.ndarray, what: str) -> np.ndarray:
        if vector.shape != (self.dimension,):
            raise EmbeddingError(
                f"{what} has dimension {vector.shape}, provider expects ({self.dimension},)"
            )
        if not np.all(np.isfinite(vector)):
            raise EmbeddingError(f"{what} contains non-finite components")
        return vector


class HashedTextProvider(EmbeddingProvider):
    """Deterministic feature-hashing backend (the shipped baseline)."""

    kind = "hashed_baseline"

    def __init__(self, dimension: int = DEFAULT_DIMENSION, hash_seed: int = DEFAULT_HASH_SEED):
        if dimension <= 0:
            raise EmbeddingError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.hash_seed = hash_seed

    def embed_text(self, text: str) -> np.ndarray:
        return embed_text_hashed(text, self.dimension, self.hash_seed)


class ExternalVectorProvider(EmbeddingProvider):
    """Pass-through backend for vectors precomputed by an external encoder.

    Cannot embed free text, so knowledge-base descriptions contribute nothing
    under this provider; external vectors are expected to already carry
    whatever knowledge their encoder baked in.
    """

    kind = "external_vectors"

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension <= 0:
            raise EmbeddingError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.hash_seed = None

    def embed_text(self, text: str) -> None:
        return None


@dataclass
class KnowledgeBase:
    """Entity descriptions plus (subject, predicate, object) triplets.

    Immutable after load; triplet subjects/objects are indexed by normalized
    surface so candidate phrases can be matched against them.
    """

    entries: Mapping[str, str]
    triplets: Sequence[tuple[str, str, str]]
    _triplet_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for key in self.entries:
            if not key:
                raise CorpusError("knowledge base contains an empty kb_key")
        index: dict[str, int] = {}
        for i, (s, p, o) in enumerate(self.triplets):
            if not (s and p and o):
                raise CorpusError(f"triplet {i} has an empty field")
            for anchor in (s, o):
                index.setdefault(normalize_surface(anchor), i)
        self._triplet_index = index

    def lookup_triplet(self, normalized_surface: str) -> tuple[str, str, str] | None:
        i = self._triplet_index.get(normalized_surface)
        return self.triplets[i] if i is not None else None


def load_kb(source: str | Path | IO[str]) -> KnowledgeBase:
    """Load a KB JSONL file of description records and triplet records."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return load_kb(fh)
    entries: dict[str, str] = {}
    triplets: list[tuple[str, str, str]] = []
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"kb line {lineno}: invalid JSON ({exc.msg})") from exc
        if "triplet" in record:
            triplet = record["triplet"]
            if not (isinstance(triplet, list) and len(triplet) == 3):
                raise CorpusError(f"kb line {lineno}: triplet must be [s, p, o]")
            triplets.append((str(triplet[0]), str(triplet[1]), str(triplet[2])))
        elif "kb_key" in record:
            key = str(record["kb_key"])
            if not key:
                raise CorpusError(f"kb line {lineno}: empty kb_key")
            if key in entries:
                raise CorpusError(f"kb line {lineno}: duplicate kb_key '{key}'")
            entries[key] = str(record.get("description", ""))
        else:
            raise CorpusError(f"kb line {lineno}: record has neither kb_key nor triplet")
    return KnowledgeBase(entries=entries, triplets=triplets)


def embed_context(mention: Mention, provider: EmbeddingProvider) -> np.ndarray:
    """Contextual feature of a mention: its span text plus local context."""
    if isinstance(provider, ExternalVectorProvider):
        if mention.vector is None:
            raise EmbeddingError(
                f"mention {mention.doc_id}/{mention.mention_id} has no external vector"
            )
        return provider._check_dim(
            np.asarray(mention.vector, dtype=np.float64), "external mention vector"
        )
    if not mention.surface:
        raise EmbeddingError(
            f"mention {mention.doc_id}/{mention.mention_id} has an empty surface"
        )
    text = " ".join((mention.surface, mention.head, mention.context_window))
    return provider._check_dim(provider.embed_text(text), "context embedding")


def embed_kb(
    mention: Mention,
    kb: KnowledgeBase | None,
    provider: EmbeddingProvider,
) -> np.ndarray | None:
    """Knowledge-base feature of a mention, or None when nothing resolves.

    Resolution order: the mention's kb_key against the description entries,
    then the normalized surface against triplet subjects/objects (the matching
    triplet is embedded joined as ``"subject predicate object"``). A miss is a
    normal outcome, not an error.
    """
    if kb is None:
        return None
    text: str | None = None
    if mention.kb_key is not None and mention.kb_key in kb.entries:
        text = kb.entries[mention.kb_key]
    else:
        triplet = kb.lookup_triplet(normalize_surface(mention.surface))
        if triplet is not None:
            text = " ".join(triplet)
    if not text:
        return None
    embedded = provider.embed_text(text)
    if embedded is None:
        return None
    return provider._check_dim(embedded, "kb embedding")


def combine(h_e: np.ndarray, h_kb: np.ndarray | None) -> np.ndarray:
    """Mean-pool the contextual and knowledge features into one vector.

    With no knowledge feature the contextual feature passes through unchanged;
    zero-padding the missing half would only shrink the norm. The mean equals
    the sum up to a positive scalar, so downstream cosine decisions are
    unaffected by the choice between the two.
    """
    if h_kb is None:
        return h_e
    if h_e.shape != h_kb.shape:
        raise EmbeddingError(
            f"cannot combine vectors of dimension {h_e.shape} and {h_kb.shape}"
        )
    return (h_e + h_kb) / 2.0


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between u and v, clamped into [-1, 1].

    A zero vector on either side returns -1: the worst similarity, which
    routes degenerate mentions to the new-singleton branch deterministically.
    """
    if u.shape != v.shape:
        raise EmbeddingError(
            f"cosine of vectors with dimensions {u.shape} and {v.shape}"
        )
    norm_u = math.sqrt(float(np.dot(u, u)))
    norm_v = math.sqrt(float(np.dot(v, v)))
    if norm_u == 0.0 or norm_v == 0.0:
        return -1.0
    value = float(np.dot(u, v)) / (norm_u * norm_v)
    return max(-1.0, min(1.0, value))
