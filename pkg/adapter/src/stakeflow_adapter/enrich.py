"""Turn raw documents into engine wire-format mention records."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from itertools import accumulate
from pathlib import Path
from typing import IO, Iterable, Iterator

from .encoder import encode_text
from .ner import EntitySpan, load_recognizer
from .wiki import PageCache, build_alias_index

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 200


class EnrichmentError(RuntimeError):
    pass


@dataclass
class EnrichConfig:
    backend: str = "rules"
    model_path: str | None = None
    kb_cache: str | None = None
    emit_vectors: bool = False
    dim: int = 256
    hash_seed: int = 0
    window: int = DEFAULT_WINDOW
    lenient: bool = False


def read_documents(source: str | Path | IO[str]) -> Iterator[dict]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            yield from read_documents(fh)
        return
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EnrichmentError(f"documents line {lineno}: invalid JSON ({exc.msg})") from exc
        for key in ("doc_id", "text"):
            if key not in record:
                raise EnrichmentError(f"documents line {lineno}: missing field {key}")
        yield record


def _byte_offsets(text: str) -> list[int]:
    return list(accumulate((len(c.encode("utf-8")) for c in text), initial=0))


def mention_records(
    doc: dict,
    spans: list[EntitySpan],
    config: EnrichConfig,
    alias_index: dict[str, str] | None,
) -> list[dict]:
    text = doc["text"]
    offsets = _byte_offsets(text)
    records = []
    for mention_id, span in enumerate(spans):
        record = {
            "doc_id": doc["doc_id"],
            "mention_id": mention_id,
            "span": [offsets[span.start], offsets[span.end]],
            "surface": span.surface,
            "head": span.head,
            "coarse_type": span.coarse_type,
        }
        if alias_index is not None:
            key = alias_index.get(" ".join(span.surface.lower().split()))
            if key is not None:
                record["kb_key"] = key
        if config.emit_vectors:
            window = text[max(0, span.start - config.window) : span.end + config.window]
            record["vector"] = encode_text(
                " ".join((span.surface, span.head, window)), config.dim, config.hash_seed
            )
        records.append(record)
    return records


def enrich_documents(
    documents: Iterable[dict], config: EnrichConfig
) -> Iterator[dict]:
    """Yield mention records for a document stream, in document order."""
    recognizer = load_recognizer(config.backend, config.model_path)
    alias_index = None
    if config.kb_cache:
        alias_index = build_alias_index(PageCache(config.kb_cache).all_pages())
    for doc in documents:
        try:
            spans = recognizer.recognize(doc["text"])
            records = mention_records(doc, spans, config, alias_index)
        except Exception as exc:
            if config.lenient:
                logger.warning("doc '%s' skipped: %s", doc.get("doc_id"), exc)
                continue
            raise EnrichmentError(f"doc '{doc.get('doc_id')}': {exc}") from exc
        yield from records


def write_mentions(records: Iterable[dict], destination: str | Path | IO[str]) -> int:
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            return write_mentions(records, fh)
    count = 0
    for record in records:
        destination.write(json.dumps(record, ensure_ascii=False) + "\n")
        count += 1
    return count
