"""Scoring against gold annotations and complexity-claim verification.

Span matching is exact: a prediction is a true positive for a label when a
gold annotation with the same (doc_id, byte span) carries that label. Macro-F
averages F over the types that actually occur in the gold data.

The complexity side checks the instrumented similarity-operation count of a
sequential run against its guaranteed ceiling (final cluster count x mention
count) and against the all-pairs baseline that a graph-based clusterer would
pay, which needs M(M-1)/2 score computations regardless.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .clustering import SeedCluster, SeedMember, SeedTable
from .corpus import Document, Mention, normalize_surface
from .errors import ComplexityBoundError, EvaluationError
from .ontology import Ontology

__all__ = [
    "GoldAnnotation",
    "load_gold",
    "Prediction",
    "TypeMetrics",
    "MetricReport",
    "score",
    "complexity_report",
    "PairwiseResult",
    "run_pairwise_baseline",
    "pairwise_agreement",
    "make_synthetic_stream",
    "SyntheticStream",
]


@dataclass(frozen=True)
class GoldAnnotation:
    doc_id: str
    span: tuple[int, int]
    surface: str
    label: str


@dataclass(frozen=True)
class Prediction:
    doc_id: str
    span: tuple[int, int]
    label: str


def load_gold(
    source: str | Path | IO[str], ontology: Ontology | None = None
) -> list[GoldAnnotation]:
    """Load gold annotations: ``{"doc_id", "span": [s, e], "surface", "label"}``."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return load_gold(fh, ontology)
    gold = []
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EvaluationError(f"gold line {lineno}: invalid JSON ({exc.msg})") from exc
        try:
            span = record["span"]
            annotation = GoldAnnotation(
                doc_id=str(record["doc_id"]),
                span=(int(span[0]), int(span[1])),
                surface=str(record["surface"]),
                label=str(record["label"]),
            )
        except (KeyError, IndexError, TypeError) as exc:
            raise EvaluationError(f"gold line {lineno}: malformed record ({exc})") from None
        if annotation.span[0] >= annotation.span[1]:
            raise EvaluationError(f"gold line {lineno}: empty or inverted span")
        if ontology is not None and annotation.label not in ontology.types:
            raise EvaluationError(
                f"gold line {lineno}: label '{annotation.label}' not in the ontology"
            )
        gold.append(annotation)
    return gold


@dataclass(frozen=True)
class TypeMetrics:
    precision: float
    recall: float
    f_score: float


@dataclass
class MetricReport:
    per_type: dict[str, TypeMetrics]
    macro_f: float
    support: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "per_type": {
                label: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f_score": m.f_score,
                }
                for label, m in sorted(self.per_type.items())
            },
            "macro_f": self.macro_f,
            "support": dict(sorted(self.support.items())),
        }

    def to_table_rows(self) -> list[list[str]]:
        """Rows in the classic performance-table layout (percent values)."""
        rows = [["stakeholder_type", "precision", "recall", "f_score"]]
        for label in sorted(self.per_type):
            m = self.per_type[label]
            rows.append(
                [
                    label,
                    f"{m.precision * 100:.1f}",
                    f"{m.recall * 100:.1f}",
                    f"{m.f_score * 100:.1f}",
                ]
            )
        rows.append(["Macro-Fscore", "-", "-", f"{self.macro_f * 100:.1f}"])
        return rows


def _prf(tp: int, fp: int, fn: int) -> TypeMetrics:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f_score = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return TypeMetrics(precision=precision, recall=recall, f_score=f_score)


def score(predictions: Iterable[Prediction], gold: Iterable[GoldAnnotation]) -> MetricReport:
    """Mention-level exact-span precision/recall/F per type plus macro-F."""
    gold_by_span: dict[tuple[str, tuple[int, int]], str] = {}
    support: dict[str, int] = {}
    for annotation in gold:
        key = (annotation.doc_id, annotation.span)
        if key in gold_by_span:
            raise EvaluationError(
                f"duplicate gold annotation for doc '{annotation.doc_id}' "
                f"span {list(annotation.span)}"
            )
        gold_by_span[key] = annotation.label
        support[annotation.label] = support.get(annotation.label, 0) + 1

    tp: dict[str, int] = {}
    fp: dict[str, int] = {}
    seen_pred: set[tuple[str, tuple[int, int]]] = set()
    matched: set[tuple[str, tuple[int, int]]] = set()
    for pred in predictions:
        key = (pred.doc_id, tuple(pred.span))
        if key in seen_pred:
            raise EvaluationError(
                f"duplicate prediction for doc '{pred.doc_id}' span {list(pred.span)}"
            )
        seen_pred.add(key)
        gold_label = gold_by_span.get(key)
        if gold_label == pred.label:
            tp[pred.label] = tp.get(pred.label, 0) + 1
            matched.add(key)
        else:
            fp[pred.label] = fp.get(pred.label, 0) + 1

    fn: dict[str, int] = {}
    for key, label in gold_by_span.items():
        if key not in matched:
            fn[label] = fn.get(label, 0) + 1

    labels = set(support) | set(tp) | set(fp) | set(fn)
    per_type = {
        label: _prf(tp.get(label, 0), fp.get(label, 0), fn.get(label, 0))
        for label in labels
    }
    supported = [per_type[label].f_score for label in per_type if support.get(label, 0) > 0]
    macro_f = sum(supported) / len(supported) if supported else 0.0
    return MetricReport(per_type=per_type, macro_f=macro_f, support=support)


def complexity_report(
    manifest: Mapping,
    mention_count: int | None = None,
    cluster_count: int | None = None,
) -> dict:
    """Compare a run's instrumented op count against its CxM ceiling.

    Raises :class:`ComplexityBoundError` if the count exceeds the bound; that
    would indicate an engine bug, not a data problem.
    """
    m = int(manifest["mention_count"] if mention_count is None else mention_count)
    c = int(manifest["cluster_count"] if cluster_count is None else cluster_count)
    ops = int(manifest["similarity_op_count"])
    bound = c * m
    baseline = m * (m - 1) // 2
    if ops > bound:
        raise ComplexityBoundError(
            f"similarity_op_count {ops} exceeds the cluster_count x mention_count "
            f"bound {bound}"
        )
    return {
        "mention_count": m,
        "cluster_count": c,
        "similarity_op_count": ops,
        "sequential_bound": bound,
        "pairwise_baseline": baseline,
        "ratio_vs_pairwise": baseline / ops if ops else None,
    }


@dataclass
class PairwiseResult:
    op_count: int
    components: list[list[int]]
    labels: list[str | None]
    assignment: list[int]

    @property
    def unlabeled_count(self) -> int:
        return sum(1 for label in self.labels if label is None)


def run_pairwise_baseline(
    mentions: Sequence[Mention],
    embeddings: Sequence[np.ndarray],
    threshold: float,
    seeds: SeedTable | None = None,
) -> PairwiseResult:
    """Graph-style baseline: all-pairs similarities, link > threshold, components.

    Costs exactly M(M-1)/2 score computations. Components are labeled by
    majority vote over members whose normalized surface appears in the seed
    table (ties broken by lexicographically smallest label); components with
    no such member stay unlabeled. Quality comparison only.
    """
    m = len(mentions)
    if len(embeddings) != m:
        raise EvaluationError(f"{m} mentions but {len(embeddings)} embeddings")
    op_count = m * (m - 1) // 2

    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    if m:
        matrix = np.stack([np.asarray(e, dtype=np.float64) for e in embeddings], axis=0)
        norms = np.sqrt((matrix * matrix).sum(axis=1))
        safe = np.where(norms == 0.0, 1.0, norms)
        unit = matrix / safe[:, None]
        sims = np.clip(unit @ unit.T, -1.0, 1.0)
        zero = norms == 0.0
        sims[zero, :] = -1.0
        sims[:, zero] = -1.0
        ii, jj = np.triu_indices(m, k=1)
        for i, j in zip(ii[sims[ii, jj] > threshold], jj[sims[ii, jj] > threshold]):
            union(int(i), int(j))

    roots: dict[int, int] = {}
    components: list[list[int]] = []
    assignment = []
    for i in range(m):
        root = find(i)
        if root not in roots:
            roots[root] = len(components)
            components.append([])
        components[roots[root]].append(i)
        assignment.append(roots[root])

    seed_labels: dict[str, str] = {}
    if seeds is not None:
        for cluster in seeds.clusters:
            for member in cluster.members:
                seed_labels.setdefault(normalize_surface(member.surface), cluster.label)

    labels: list[str | None] = []
    for component in components:
        votes: dict[str, int] = {}
        for i in component:
            label = seed_labels.get(normalize_surface(mentions[i].surface))
            if label is not None:
                votes[label] = votes.get(label, 0) + 1
        if votes:
            top = max(votes.values())
            labels.append(min(label for label, n in votes.items() if n == top))
        else:
            labels.append(None)
    return PairwiseResult(
        op_count=op_count, components=components, labels=labels, assignment=assignment
    )


def pairwise_agreement(assignment_a: Sequence[int], assignment_b: Sequence[int]) -> float:
    """Fraction of mention pairs on which two partitions agree (Rand index)."""
    if len(assignment_a) != len(assignment_b):
        raise EvaluationError("partitions cover different mention counts")
    m = len(assignment_a)
    if m < 2:
        return 1.0
    agree = 0
    total = 0
    for i in range(m):
        for j in range(i + 1, m):
            same_a = assignment_a[i] == assignment_a[j]
            same_b = assignment_b[i] == assignment_b[j]
            agree += same_a == same_b
            total += 1
    return agree / total


@dataclass
class SyntheticStream:
    """A generated corpus with planted cluster structure, for benchmarking."""

    documents: list[Document]
    mentions_by_doc: dict[str, list[Mention]]
    seeds: SeedTable
    planted_clusters: int


def make_synthetic_stream(
    n_mentions: int = 1000,
    n_clusters: int = 20,
    dim: int = 64,
    rng_seed: int = 7,
    mentions_per_doc: int = 25,
    topic: str = "CAB Bill",
    labels: Sequence[str] = ("Government", "Opposition", "Citizen/Activist", "International-figure"),
    noise: float = 0.05,
) -> SyntheticStream:
    """Plant ``n_clusters`` well-separated centers and stream mentions near them.

    Every mention carries a distinct surface (so the dictionary never hits)
    and an external vector close to its center (so it joins an existing
    cluster rather than opening a new one at any reasonable threshold).
    Document texts embed the surfaces byte-exactly.
    """
    rng = np.random.default_rng(rng_seed)
    centers = rng.normal(size=(n_clusters, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)

    seeds = SeedTable(
        clusters=tuple(
            SeedCluster(
                cluster_id=c,
                label=labels[c % len(labels)],
                members=(SeedMember(surface=f"seed entity {c:03d}", vector=centers[c]),),
            )
            for c in range(n_clusters)
        )
    )

    documents: list[Document] = []
    mentions_by_doc: dict[str, list[Mention]] = {}
    houses = ("Wire Alpha", "Wire Beta", "Wire Gamma")
    for start in range(0, n_mentions, mentions_per_doc):
        indices = range(start, min(start + mentions_per_doc, n_mentions))
        doc_id = f"synthetic-{start // mentions_per_doc:04d}"
        surfaces = [f"Entity {i:05d}" for i in indices]
        text = " . ".join(surfaces)
        doc = Document(
            doc_id=doc_id,
            media_house=houses[(start // mentions_per_doc) % len(houses)],
            topic=topic,
            publish_date="2021-06-01",
            text=text,
        )
        documents.append(doc)
        mentions = []
        cursor = 0
        for k, (i, surface) in enumerate(zip(indices, surfaces)):
            begin = text.index(surface, cursor)
            end = begin + len(surface)
            cursor = end
            center = centers[i % n_clusters]
            vector = center + noise * rng.normal(size=dim)
            mentions.append(
                Mention(
                    doc_id=doc_id,
                    mention_id=k,
                    span=(begin, end),  # ascii text: byte offsets == char offsets
                    surface=surface,
                    head=surface.split(" ")[-1],
                    coarse_type="PERSON",
                    context_window=text[max(0, begin - 40) : end + 40],
                    vector=vector,
                )
            )
        mentions_by_doc[doc_id] = mentions
    return SyntheticStream(
        documents=documents,
        mentions_by_doc=mentions_by_doc,
        seeds=seeds,
        planted_clusters=n_clusters,
    )
