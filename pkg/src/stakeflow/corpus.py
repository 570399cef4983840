"""Document stream parsing, gazetteer mention detection, surface normalization.

Wire formats (all JSONL, UTF-8, one record per line):

* document: ``{"doc_id", "media_house", "topic", "publish_date", "text"}``
* mention: ``{"doc_id", "mention_id", "span": [start, end], "surface",
  "head", "coarse_type", "kb_key"?, "vector"?}`` where ``span`` holds
  half-open **byte** offsets into the UTF-8 encoding of the document text
* gazetteer: ``{"surface", "coarse_type", "kb_key"?, "head"?}``
"""

from __future__ import annotations

import json
import logging
import re
from bisect import bisect_right
from dataclasses import dataclass, field
from datetime import date, datetime
from itertools import accumulate
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

from .errors import CorpusError, MentionIntegrityError

__all__ = [
    "COARSE_TYPES",
    "DEFAULT_CONTEXT_WINDOW",
    "Document",
    "Mention",
    "GazetteerEntry",
    "Gazetteer",
    "load_gazetteer",
    "parse_corpus",
    "normalize_surface",
    "detect_mentions",
    "load_mentions",
]

logger = logging.getLogger(__name__)

COARSE_TYPES = frozenset({"PERSON", "ORG"})
DEFAULT_CONTEXT_WINDOW = 200

_WORD_RE = re.compile(r"\w+", re.UNICODE)
_WS_RE = re.compile(r"\s+")
_TERMINAL_PUNCT = ".,;:"
_POSSESSIVE_SUFFIXES = ("'s", "’s")


@dataclass(frozen=True)
class Document:
    doc_id: str
    media_house: str
    topic: str
    publish_date: str
    text: str


@dataclass(eq=False)
class Mention:
    """One candidate stakeholder phrase occurrence inside a document."""

    doc_id: str
    mention_id: int
    span: tuple[int, int]
    surface: str
    head: str
    coarse_type: str
    context_window: str
    kb_key: str | None = None
    vector: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class GazetteerEntry:
    coarse_type: str
    kb_key: str | None
    head: str


def normalize_surface(s: str) -> str:
    """Canonical lookup key for a surface form.

    Lowercases, collapses whitespace runs, strips the edges, then repeatedly
    drops terminal ``. , ; :`` characters and a possessive ``'s`` suffix.
    Total function; may return the empty string.
    """
    s = _WS_RE.sub(" ", s.lower()).strip()
    while s:
        if s[-1] in _TERMINAL_PUNCT:
            s = s[:-1].rstrip()
            continue
        for suffix in _POSSESSIVE_SUFFIXES:
            if s.endswith(suffix):
                s = s[: -len(suffix)].rstrip()
                break
        else:
            break
    return s


class Gazetteer:
    """Normalized surface form -> entry lookup used by the baseline detector."""

    def __init__(self, entries: Mapping[str, GazetteerEntry]):
        for key, entry in entries.items():
            if not key:
                raise CorpusError("gazetteer contains an empty normalized surface")
            if key != normalize_surface(key):
                raise CorpusError(f"gazetteer key '{key}' is not normalized")
            if entry.coarse_type not in COARSE_TYPES:
                raise CorpusError(
                    f"gazetteer entry '{key}' has coarse_type '{entry.coarse_type}' "
                    f"(must be PERSON or ORG)"
                )
        self.entries = dict(entries)
        self.max_tokens = max(
            (len(_WORD_RE.findall(key)) for key in self.entries), default=0
        )

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, normalized: str) -> bool:
        return normalized in self.entries


def load_gazetteer(source: str | Path | IO[str]) -> Gazetteer:
    """Load a gazetteer JSONL file; surfaces are normalized on load."""
    entries: dict[str, GazetteerEntry] = {}
    for lineno, record in _iter_jsonl(source, what="gazetteer"):
        try:
            surface = record["surface"]
            coarse_type = record["coarse_type"]
        except KeyError as exc:
            raise CorpusError(f"gazetteer line {lineno}: missing field {exc}") from None
        key = normalize_surface(str(surface))
        if not key:
            raise CorpusError(f"gazetteer line {lineno}: surface normalizes to empty")
        if key in entries:
            raise CorpusError(f"gazetteer line {lineno}: duplicate surface '{key}'")
        head = record.get("head") or key.split(" ")[-1]
        kb_key = record.get("kb_key")
        if coarse_type not in COARSE_TYPES:
            raise CorpusError(
                f"gazetteer line {lineno}: coarse_type '{coarse_type}' not in PERSON/ORG"
            )
        entries[key] = GazetteerEntry(
            coarse_type=str(coarse_type),
            kb_key=str(kb_key) if kb_key is not None else None,
            head=str(head),
        )
    return Gazetteer(entries)


def _iter_jsonl(
    source: str | Path | IO[str], what: str, lenient: bool = False
) -> Iterator[tuple[int, dict]]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            yield from _iter_jsonl(fh, what, lenient)
        return
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            if lenient:
                logger.warning("%s line %d skipped: %s", what, lineno, exc.msg)
                continue
            raise CorpusError(f"{what} line {lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            if lenient:
                logger.warning("%s line %d skipped: not an object", what, lineno)
                continue
            raise CorpusError(f"{what} line {lineno}: record is not an object")
        yield lineno, record


def parse_corpus(
    source: str | Path | IO[str],
    known_topics: Iterable[str] | None = None,
    lenient: bool = False,
) -> Iterator[Document]:
    """Yield documents from a JSONL stream in input order.

    Order is preserved downstream: the clusterer is order-sensitive. Malformed
    lines abort the run with their line number unless ``lenient`` is set, in
    which case they are skipped with a warning. Duplicate doc_ids always abort.
    """
    topics = frozenset(known_topics) if known_topics is not None else None
    seen: set[str] = set()
    for lineno, record in _iter_jsonl(source, what="corpus", lenient=lenient):
        try:
            doc = _parse_document(record, lineno, topics)
        except CorpusError as exc:
            if lenient:
                logger.warning("corpus line %d skipped: %s", lineno, exc)
                continue
            raise
        if doc.doc_id in seen:
            raise CorpusError(f"corpus line {lineno}: duplicate doc_id '{doc.doc_id}'")
        seen.add(doc.doc_id)
        yield doc


def _parse_document(
    record: dict, lineno: int, topics: frozenset[str] | None
) -> Document:
    missing = [
        key
        for key in ("doc_id", "media_house", "topic", "publish_date", "text")
        if key not in record
    ]
    if missing:
        raise CorpusError(f"corpus line {lineno}: missing field(s) {', '.join(missing)}")
    publish_date = str(record["publish_date"])
    try:
        datetime.fromisoformat(publish_date)
    except ValueError:
        try:
            date.fromisoformat(publish_date)
        except ValueError:
            raise CorpusError(
                f"corpus line {lineno}: publish_date '{publish_date}' is not ISO-8601"
            ) from None
    topic = str(record["topic"])
    if topics is not None and topic not in topics:
        raise CorpusError(f"corpus line {lineno}: unconfigured topic '{topic}'")
    return Document(
        doc_id=str(record["doc_id"]),
        media_house=str(record["media_house"]),
        topic=topic,
        publish_date=publish_date,
        text=str(record["text"]),
    )


class _ByteOffsets:
    """Char index <-> UTF-8 byte offset mapping for one document text."""

    def __init__(self, text: str):
        # _starts[i] is the byte offset where character i starts.
        self._starts = list(accumulate((len(c.encode("utf-8")) for c in text), initial=0))

    def byte_of(self, char_index: int) -> int:
        return self._starts[char_index]

    def char_of(self, byte_offset: int) -> int:
        i = bisect_right(self._starts, byte_offset) - 1
        if self._starts[i] != byte_offset:
            raise MentionIntegrityError(
                f"byte offset {byte_offset} is not a character boundary"
            )
        return i


def detect_mentions(
    doc: Document,
    gazetteer: Gazetteer,
    window: int = DEFAULT_CONTEXT_WINDOW,
) -> list[Mention]:
    """Gazetteer baseline detector: maximal, non-overlapping, word-aligned hits.

    Scans left to right; at each token position the longest candidate token
    span whose normalized form is a gazetteer key wins. Matches never overlap,
    mention_ids are assigned in text order, and spans are byte offsets with
    ``text[span] == surface`` byte-exact.
    """
    text = doc.text
    tokens = [(m.start(), m.end()) for m in _WORD_RE.finditer(text)]
    offsets = _ByteOffsets(text)
    # +1 token of slack lets a possessive "'s" ride along with the last word.
    max_span = gazetteer.max_tokens + 1
    mentions: list[Mention] = []
    i = 0
    while i < len(tokens):
        hit = None
        for j in range(min(i + max_span, len(tokens)) - 1, i - 1, -1):
            start, end = tokens[i][0], tokens[j][1]
            candidate = text[start:end]
            entry = gazetteer.entries.get(normalize_surface(candidate))
            if entry is not None:
                hit = (j, start, end, candidate, entry)
                break
        if hit is None:
            i += 1
            continue
        j, start, end, surface, entry = hit
        mentions.append(
            Mention(
                doc_id=doc.doc_id,
                mention_id=len(mentions),
                span=(offsets.byte_of(start), offsets.byte_of(end)),
                surface=surface,
                head=entry.head,
                coarse_type=entry.coarse_type,
                context_window=text[max(0, start - window) : end + window],
                kb_key=entry.kb_key,
            )
        )
        i = j + 1
    return mentions


def load_mentions(
    source: str | Path | IO[str],
    docs: Iterable[Document] | Mapping[str, Document],
    window: int = DEFAULT_CONTEXT_WINDOW,
    lenient: bool = False,
) -> dict[str, list[Mention]]:
    """Load mention records (e.g. from an enrichment sidecar) grouped per doc.

    Every record must reference a known doc_id and carry a span whose byte
    slice of the document text reproduces the surface exactly; a mismatch
    means the producer and this engine saw different text. Only PERSON/ORG
    mentions are admitted. Returns a map containing every document of the
    corpus, with mentions sorted by span start.
    """
    if isinstance(docs, Mapping):
        doc_map = dict(docs)
    else:
        doc_map = {d.doc_id: d for d in docs}
    by_doc: dict[str, list[Mention]] = {doc_id: [] for doc_id in doc_map}
    encoded: dict[str, bytes] = {}
    offsets: dict[str, _ByteOffsets] = {}

    for lineno, record in _iter_jsonl(source, what="mentions", lenient=lenient):
        try:
            mention = _parse_mention(record, lineno, doc_map, encoded, offsets, window)
        except MentionIntegrityError:
            raise
        except CorpusError as exc:
            if lenient:
                logger.warning("mentions line %d skipped: %s", lineno, exc)
                continue
            raise
        by_doc[mention.doc_id].append(mention)

    for doc_id, mentions in by_doc.items():
        mentions.sort(key=lambda m: m.span)
        ids = [m.mention_id for m in mentions]
        if len(set(ids)) != len(ids):
            raise CorpusError(f"doc '{doc_id}': duplicate mention_id")
        if any(b <= a for a, b in zip(ids, ids[1:])):
            raise CorpusError(
                f"doc '{doc_id}': mention_ids are not increasing in span order"
            )
    return by_doc


def _parse_mention(
    record: dict,
    lineno: int,
    doc_map: Mapping[str, Document],
    encoded: dict[str, bytes],
    offsets: dict[str, _ByteOffsets],
    window: int,
) -> Mention:
    for key in ("doc_id", "mention_id", "span", "surface", "head", "coarse_type"):
        if key not in record:
            raise CorpusError(f"mentions line {lineno}: missing field {key}")
    doc_id = str(record["doc_id"])
    if doc_id not in doc_map:
        raise CorpusError(f"mentions line {lineno}: unknown doc_id '{doc_id}'")
    span = record["span"]
    if not (isinstance(span, (list, tuple)) and len(span) == 2):
        raise CorpusError(f"mentions line {lineno}: span must be [start, end]")
    start, end = int(span[0]), int(span[1])
    coarse_type = str(record["coarse_type"])
    if coarse_type not in COARSE_TYPES:
        raise CorpusError(
            f"mentions line {lineno}: coarse_type '{coarse_type}' rejected "
            f"(only PERSON/ORG are viable stakeholders)"
        )
    doc = doc_map[doc_id]
    if doc_id not in encoded:
        encoded[doc_id] = doc.text.encode("utf-8")
        offsets[doc_id] = _ByteOffsets(doc.text)
    text_bytes = encoded[doc_id]
    if not (0 <= start < end <= len(text_bytes)):
        raise MentionIntegrityError(
            f"mentions line {lineno}: span [{start}, {end}) out of bounds for "
            f"doc '{doc_id}' ({len(text_bytes)} bytes)"
        )
    surface = str(record["surface"])
    if text_bytes[start:end] != surface.encode("utf-8"):
        raise MentionIntegrityError(
            f"mentions line {lineno}: surface mismatch for mention_id "
            f"{record['mention_id']} of doc '{doc_id}' (document text and "
            f"mention producer disagree)"
        )
    char_start = offsets[doc_id].char_of(start)
    char_end = offsets[doc_id].char_of(end)
    vector = record.get("vector")
    return Mention(
        doc_id=doc_id,
        mention_id=int(record["mention_id"]),
        span=(start, end),
        surface=surface,
        head=str(record["head"]),
        coarse_type=coarse_type,
        context_window=doc.text[max(0, char_start - window) : char_end + window],
        kb_key=str(record["kb_key"]) if record.get("kb_key") is not None else None,
        vector=np.asarray(vector, dtype=np.float64) if vector is not None else None,
    )
