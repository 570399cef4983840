"""Visibility counts and coverage shares per (topic, media house, type).

Visibility counts mentions, not documents: every classified pair increments
the (topic, media house, stakeholder type) cell of its document. Document
presence is tracked separately in ``doc_counts``. Matrices are commutative
mergeable structures, so per-shard counts can be combined in any order.
"""

from __future__ import annotations

import csv
import json
import re
from collections import Counter
from pathlib import Path
from typing import IO, Sequence

from .clustering import StakeholderEntry
from .corpus import Document
from .errors import CoverageError, EmptyCoverageError
from .ontology import Ontology, topic_stakeholders

__all__ = [
    "OTHER_BUCKET",
    "CoverageMatrix",
    "accumulate",
    "visibility",
    "coverage_share",
    "coverage_rows",
    "export",
    "export_by_topic",
    "read_coverage_csv",
    "write_coverage_rows",
    "topic_slug",
]

OTHER_BUCKET = "other"
CSV_COLUMNS = ("topic", "media_house", "stakeholder_type", "count", "share_pct", "doc_count")


class CoverageMatrix:
    """Counts keyed by (topic, media_house, stakeholder_type), plus doc counts."""

    def __init__(self) -> None:
        self.counts: Counter[tuple[str, str, str]] = Counter()
        self.doc_counts: Counter[tuple[str, str]] = Counter()

    def merge(self, other: "CoverageMatrix") -> "CoverageMatrix":
        """Add another shard's counts into this matrix; order-independent."""
        self.counts.update(other.counts)
        self.doc_counts.update(other.doc_counts)
        return self

    def pairs(self) -> list[tuple[str, str]]:
        keys = {(t, h) for t, h, _ in self.counts} | set(self.doc_counts)
        return sorted(keys)

    @property
    def total_mentions(self) -> int:
        return sum(self.counts.values())


def accumulate(
    matrix: CoverageMatrix, doc: Document, fragment: Sequence[StakeholderEntry]
) -> CoverageMatrix:
    """Fold one document's stakeholder pairs into the matrix."""
    key = (doc.topic, doc.media_house)
    for entry in fragment:
        matrix.counts[(doc.topic, doc.media_house, entry.label)] += 1
    matrix.doc_counts[key] += 1
    return matrix


def visibility(matrix: CoverageMatrix, topic: str, media_house: str, stakeholder_type: str) -> int:
    """Times candidates of this type were referenced by this (topic, house)."""
    return matrix.counts.get((topic, media_house, stakeholder_type), 0)


def coverage_share(
    matrix: CoverageMatrix, topic: str, media_house: str, ontology: Ontology
) -> dict[str, float]:
    """Percentage share per stakeholder type for one (topic, media house).

    Restricted to the topic's configured stakeholder set; counts for types
    outside the set are pooled under ``"other"``. Types with zero counts are
    omitted. Shares sum to 100 within 1e-9. Raises
    :class:`EmptyCoverageError` when the pair has no counts at all.
    """
    topic_set = topic_stakeholders(ontology, topic)
    in_set: dict[str, int] = {}
    other = 0
    for (t, h, s), count in matrix.counts.items():
        if (t, h) != (topic, media_house):
            continue
        if s in topic_set:
            in_set[s] = in_set.get(s, 0) + count
        else:
            other += count
    total = sum(in_set.values()) + other
    if total == 0:
        raise EmptyCoverageError(
            f"no stakeholder mentions recorded for topic '{topic}' and "
            f"media house '{media_house}'"
        )
    shares = {s: count / total * 100.0 for s, count in in_set.items() if count}
    if other:
        shares[OTHER_BUCKET] = other / total * 100.0
    return shares


def coverage_rows(matrix: CoverageMatrix, ontology: Ontology) -> list[dict]:
    """Flatten the matrix into export rows, sorted lexicographically."""
    rows = []
    for topic, house in matrix.pairs():
        try:
            shares = coverage_share(matrix, topic, house, ontology)
        except EmptyCoverageError:
            continue  # documents seen but zero classified mentions
        topic_set = topic_stakeholders(ontology, topic)
        doc_count = matrix.doc_counts.get((topic, house), 0)
        for stakeholder_type, share in shares.items():
            if stakeholder_type == OTHER_BUCKET:
                count = sum(
                    c
                    for (t, h, s), c in matrix.counts.items()
                    if (t, h) == (topic, house) and s not in topic_set
                )
            else:
                count = visibility(matrix, topic, house, stakeholder_type)
            rows.append(
                {
                    "topic": topic,
                    "media_house": house,
                    "stakeholder_type": stakeholder_type,
                    "count": count,
                    "share_pct": share,
                    "doc_count": doc_count,
                }
            )
    rows.sort(key=lambda r: (r["topic"], r["media_house"], r["stakeholder_type"]))
    return rows


def _write_rows_csv(rows: list[dict], destination: IO[str]) -> None:
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([row[col] for col in CSV_COLUMNS])


def export(
    matrix: CoverageMatrix,
    ontology: Ontology,
    fmt: str,
    destination: str | Path | IO[str],
) -> list[dict]:
    """Write the coverage table as ``csv`` or ``json``; returns the rows.

    Output is byte-stable: identical matrices export to identical files.
    """
    rows = coverage_rows(matrix, ontology)
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            write_coverage_rows(rows, fmt, fh)
    else:
        write_coverage_rows(rows, fmt, destination)
    return rows


def write_coverage_rows(rows: list[dict], fmt: str, fh: IO[str]) -> None:
    """Write already-built coverage rows; used for byte-stable re-export."""
    if fmt == "csv":
        _write_rows_csv(rows, fh)
    elif fmt == "json":
        fh.write(json.dumps(rows, indent=2, ensure_ascii=False) + "\n")
    else:
        raise CoverageError(f"unknown export format '{fmt}' (use csv or json)")


def topic_slug(topic: str) -> str:
    """Filesystem-safe topic name for per-topic export files."""
    return re.sub(r"[^a-z0-9]+", "_", topic.lower()).strip("_")


def export_by_topic(
    matrix: CoverageMatrix, ontology: Ontology, out_dir: str | Path
) -> list[Path]:
    """Write ``coverage_<topic>.csv`` per topic plus combined csv and json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    rows = coverage_rows(matrix, ontology)
    topics = sorted({row["topic"] for row in rows})
    for topic in topics:
        path = out / f"coverage_{topic_slug(topic)}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            _write_rows_csv([r for r in rows if r["topic"] == topic], fh)
        written.append(path)
    combined_csv = out / "coverage_all.csv"
    with open(combined_csv, "w", encoding="utf-8", newline="\n") as fh:
        _write_rows_csv(rows, fh)
    written.append(combined_csv)
    combined_json = out / "coverage_all.json"
    with open(combined_json, "w", encoding="utf-8", newline="\n") as fh:
        write_coverage_rows(rows, "json", fh)
    written.append(combined_json)
    return written


def read_coverage_csv(source: str | Path | IO[str]) -> list[dict]:
    """Parse an exported coverage CSV back into typed rows."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return read_coverage_csv(fh)
    reader = csv.DictReader(source)
    rows = []
    for raw in reader:
        rows.append(
            {
                "topic": raw["topic"],
                "media_house": raw["media_house"],
                "stakeholder_type": raw["stakeholder_type"],
                "count": int(raw["count"]),
                "share_pct": float(raw["share_pct"]),
                "doc_count": int(raw["doc_count"]),
            }
        )
    return rows
