"""Sequential cross-document candidate clustering with seed clusters.

The engine consumes mentions strictly in corpus order and, for each one:

1. looks the normalized surface up in the known-entity dictionary and, on a
   hit, reuses that cluster's label without computing any similarity;
2. otherwise scores the mention vector against the running mean vector of
   every cluster (counting one similarity operation per cluster);
3. joins the argmax cluster when the best score strictly exceeds the
   threshold, appending the mention's head and document id to it;
4. below or at the threshold, opens a new cluster seeded with this mention,
   inheriting the argmax cluster's label.

Every processed surface is registered in the dictionary, so reprocessing the
same stream against a finished state resolves entirely by lookup. The state
is a strictly single-writer sequential structure; assignment calls must be
totally ordered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .corpus import Document, Mention, normalize_surface
from .embedding import EmbeddingProvider, KnowledgeBase, combine, cosine_similarity, embed_context, embed_kb
from .errors import ClusteringError, EmbeddingError
from .ontology import Ontology

__all__ = [
    "DecisionKind",
    "AssignmentDecision",
    "SeedMember",
    "SeedCluster",
    "SeedTable",
    "load_seed_table",
    "Cluster",
    "ClusterState",
    "StakeholderEntry",
    "StakeholderTable",
    "init_state",
    "cluster_vector",
    "assign",
    "process_document",
    "run",
    "RunResult",
    "write_stakeholder_table",
    "write_cluster_dump",
    "write_manifest",
]


class DecisionKind(str, Enum):
    KNOWN_ENTITY = "known_entity"
    MATCHED_EXISTING = "matched_existing"
    NEW_SINGLETON = "new_singleton"


@dataclass(frozen=True)
class AssignmentDecision:
    kind: DecisionKind
    cluster_id: int
    label: str
    score: float | None = None
    nearest_cluster_id: int | None = None


@dataclass(frozen=True)
class SeedMember:
    surface: str
    vector: np.ndarray | None = None


@dataclass(frozen=True)
class SeedCluster:
    cluster_id: int
    label: str
    members: tuple[SeedMember, ...]


@dataclass(frozen=True)
class SeedTable:
    clusters: tuple[SeedCluster, ...]


def load_seed_table(source: str | Path | IO[str]) -> SeedTable:
    """Load a seed table JSONL file: ``{"cluster_id", "label", "members"}``."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return load_seed_table(fh)
    clusters: list[SeedCluster] = []
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ClusteringError(f"seed line {lineno}: invalid JSON ({exc.msg})") from exc
        try:
            cluster_id = int(record["cluster_id"])
            label = str(record["label"])
            raw_members = record["members"]
        except KeyError as exc:
            raise ClusteringError(f"seed line {lineno}: missing field {exc}") from None
        members = []
        for raw in raw_members:
            vector = raw.get("vector")
            members.append(
                SeedMember(
                    surface=str(raw["surface"]),
                    vector=np.asarray(vector, dtype=np.float64) if vector is not None else None,
                )
            )
        clusters.append(SeedCluster(cluster_id=cluster_id, label=label, members=tuple(members)))
    return SeedTable(clusters=tuple(clusters))


class Cluster:
    """One synonymous-candidate cluster: (head, doc_id) members plus vectors.

    Seed members carry ``doc_id=None``. The cluster vector is the mean of its
    member vectors; seed surfaces without supplied vectors are embedded by the
    provider on first use. The mean is cached and recomputed from scratch on
    membership change, so it always equals a full recompute.
    """

    def __init__(self, cluster_id: int, label: str, seed_members: Sequence[SeedMember] = ()):
        self.cluster_id = cluster_id
        self.label = label
        self.members: list[tuple[str, str | None]] = [(m.surface, None) for m in seed_members]
        self._seed_members = tuple(seed_members)
        self._seed_vectors: list[np.ndarray] | None = None
        self.member_vectors: list[np.ndarray] = []
        self._mean: np.ndarray | None = None

    def add_member(self, head: str, doc_id: str, vector: np.ndarray) -> None:
        self.members.append((head, doc_id))
        self.member_vectors.append(vector)
        self._mean = None

    def _embeddable_rows(self, provider: EmbeddingProvider) -> list[np.ndarray]:
        if self._seed_vectors is None:
            rows = []
            for member in self._seed_members:
                if member.vector is not None:
                    rows.append(np.asarray(member.vector, dtype=np.float64))
                else:
                    embedded = provider.embed_text(member.surface)
                    if embedded is not None:
                        rows.append(embedded)
            self._seed_vectors = rows
        return self._seed_vectors + self.member_vectors

    def vector(self, provider: EmbeddingProvider) -> np.ndarray:
        if self._mean is None:
            rows = self._embeddable_rows(provider)
            if not rows:
                raise ClusteringError(
                    f"cluster {self.cluster_id} has no embeddable content "
                    f"(no member vectors and the provider cannot embed seed surfaces)"
                )
            self._mean = np.mean(np.stack(rows, axis=0), axis=0)
        return self._mean


def cluster_vector(cluster: Cluster, provider: EmbeddingProvider) -> np.ndarray:
    """Mean vector of a cluster's members under the given provider."""
    return cluster.vector(provider)


class ClusterState:
    """The evolving cluster list, its label list, and the known-entity table."""

    def __init__(self, threshold: float, provider: EmbeddingProvider):
        self.clusters: list[Cluster] = []
        self.labels: list[str] = []
        self.known_lookup: dict[str, int] = {}
        self.threshold = threshold
        self.provider = provider
        self.similarity_op_count = 0
        self._by_id: dict[int, Cluster] = {}
        self._next_id = 0

    def cluster_by_id(self, cluster_id: int) -> Cluster:
        return self._by_id[cluster_id]

    def _append(self, cluster: Cluster) -> None:
        self.clusters.append(cluster)
        self.labels.append(cluster.label)
        self._by_id[cluster.cluster_id] = cluster
        self._next_id = cluster.cluster_id + 1


def init_state(
    seeds: SeedTable,
    threshold: float,
    ontology: Ontology,
    provider: EmbeddingProvider,
) -> ClusterState:
    """Bootstrap the cluster state from pre-labeled seed clusters."""
    if not (-1.0 <= threshold <= 1.0):
        raise ClusteringError(f"threshold {threshold} outside [-1, 1]")
    if not seeds.clusters:
        raise ClusteringError("seed table is empty")
    state = ClusterState(threshold=threshold, provider=provider)
    last_id = -1
    for seed in seeds.clusters:
        if seed.cluster_id <= last_id:
            raise ClusteringError(
                f"seed cluster ids must be strictly increasing, got {seed.cluster_id} "
                f"after {last_id}"
            )
        last_id = seed.cluster_id
        if seed.label not in ontology.types:
            raise ClusteringError(
                f"seed cluster {seed.cluster_id} has label '{seed.label}' "
                f"not present in the ontology"
            )
        if not seed.members:
            raise ClusteringError(f"seed cluster {seed.cluster_id} has no members")
        for member in seed.members:
            if member.vector is not None and member.vector.shape != (provider.dimension,):
                raise ClusteringError(
                    f"seed cluster {seed.cluster_id}: member vector of dimension "
                    f"{member.vector.shape} does not match provider ({provider.dimension},)"
                )
            key = normalize_surface(member.surface)
            if not key:
                raise ClusteringError(
                    f"seed cluster {seed.cluster_id}: member surface normalizes to empty"
                )
            existing = state.known_lookup.get(key)
            if existing is not None and existing != seed.cluster_id:
                raise ClusteringError(
                    f"surface '{key}' appears in seed clusters {existing} and "
                    f"{seed.cluster_id}; the dictionary would be ambiguous"
                )
            state.known_lookup[key] = seed.cluster_id
        state._append(Cluster(seed.cluster_id, seed.label, seed.members))
    return state


def assign(state: ClusterState, mention: Mention, h_x: np.ndarray) -> AssignmentDecision:
    """Route one mention through dictionary lookup / cluster match / singleton."""
    if not state.clusters:
        raise ClusteringError("cluster state has no clusters")
    if h_x.shape != (state.provider.dimension,):
        raise EmbeddingError(
            f"mention vector dimension {h_x.shape} does not match provider "
            f"({state.provider.dimension},)"
        )
    key = normalize_surface(mention.surface)
    known = state.known_lookup.get(key)
    if known is not None:
        return AssignmentDecision(
            kind=DecisionKind.KNOWN_ENTITY,
            cluster_id=known,
            label=state.cluster_by_id(known).label,
        )

    best_index = 0
    best_score = -np.inf
    for index, cluster in enumerate(state.clusters):
        score = cosine_similarity(h_x, cluster.vector(state.provider))
        if score > best_score:  # ties keep the earliest (lowest) cluster id
            best_score = score
            best_index = index
    state.similarity_op_count += len(state.clusters)
    nearest = state.clusters[best_index]

    if best_score > state.threshold:
        nearest.add_member(mention.head, mention.doc_id, h_x)
        state.known_lookup[key] = nearest.cluster_id
        return AssignmentDecision(
            kind=DecisionKind.MATCHED_EXISTING,
            cluster_id=nearest.cluster_id,
            label=nearest.label,
            score=float(best_score),
        )

    fresh = Cluster(state._next_id, nearest.label)
    fresh.add_member(mention.head, mention.doc_id, h_x)
    state._append(fresh)
    state.known_lookup[key] = fresh.cluster_id
    return AssignmentDecision(
        kind=DecisionKind.NEW_SINGLETON,
        cluster_id=fresh.cluster_id,
        label=nearest.label,
        score=float(best_score),
        nearest_cluster_id=nearest.cluster_id,
    )


@dataclass(frozen=True)
class StakeholderEntry:
    """One (entity phrase, stakeholder type) pair with decision provenance."""

    surface: str
    label: str
    mention_id: int
    cluster_id: int
    decision: DecisionKind
    score: float | None
    nearest_cluster_id: int | None
    span: tuple[int, int]


class StakeholderTable:
    """Per-document ordered (entity phrase, stakeholder type) pairs."""

    def __init__(self) -> None:
        self._fragments: dict[str, list[StakeholderEntry]] = {}

    def add_fragment(self, doc_id: str, fragment: list[StakeholderEntry]) -> None:
        if doc_id in self._fragments:
            raise ClusteringError(f"doc '{doc_id}' already has a fragment")
        self._fragments[doc_id] = fragment

    def fragment(self, doc_id: str) -> list[StakeholderEntry]:
        return self._fragments.get(doc_id, [])

    def __iter__(self) -> Iterator[tuple[str, list[StakeholderEntry]]]:
        return iter(self._fragments.items())

    def __len__(self) -> int:
        return len(self._fragments)

    @property
    def total_pairs(self) -> int:
        return sum(len(f) for f in self._fragments.values())

    def to_records(self) -> list[dict]:
        records = []
        for doc_id, fragment in self._fragments.items():
            for entry in fragment:
                record: dict = {
                    "doc_id": doc_id,
                    "mention_id": entry.mention_id,
                    "surface": entry.surface,
                    "label": entry.label,
                    "decision": entry.decision.value,
                    "cluster_id": entry.cluster_id,
                }
                if entry.score is not None:
                    record["score"] = entry.score
                if entry.nearest_cluster_id is not None:
                    record["nearest_cluster_id"] = entry.nearest_cluster_id
                records.append(record)
        return records


def process_document(
    state: ClusterState,
    doc: Document,
    mentions: Sequence[Mention],
    embeddings: Sequence[np.ndarray],
) -> list[StakeholderEntry]:
    """Assign every mention of one document, in text order, mutating state."""
    if len(mentions) != len(embeddings):
        raise ClusteringError(
            f"doc '{doc.doc_id}': {len(mentions)} mentions but {len(embeddings)} embeddings"
        )
    fragment: list[StakeholderEntry] = []
    for mention, h_x in zip(mentions, embeddings):
        if mention.doc_id != doc.doc_id:
            raise ClusteringError(
                f"mention {mention.mention_id} belongs to doc '{mention.doc_id}', "
                f"not '{doc.doc_id}'"
            )
        decision = assign(state, mention, h_x)
        fragment.append(
            StakeholderEntry(
                surface=mention.surface,
                label=decision.label,
                mention_id=mention.mention_id,
                cluster_id=decision.cluster_id,
                decision=decision.kind,
                score=decision.score,
                nearest_cluster_id=decision.nearest_cluster_id,
                span=mention.span,
            )
        )
    return fragment


@dataclass
class RunResult:
    state: ClusterState
    table: StakeholderTable
    manifest: dict


def run(
    documents: Iterable[Document],
    mentions_by_doc: Mapping[str, Sequence[Mention]],
    seeds: SeedTable,
    threshold: float,
    provider: EmbeddingProvider,
    ontology: Ontology,
    kb: KnowledgeBase | None = None,
) -> RunResult:
    """Run the full sequential clustering pass over an ordered corpus.

    Documents are processed strictly in iteration order; permuting the input
    may change the output, so callers must never reorder. Returns the final
    state, the stakeholder table, and a manifest describing the run.
    """
    state = init_state(seeds, threshold, ontology, provider)
    table = StakeholderTable()
    mention_count = 0
    for doc in documents:
        mentions = list(mentions_by_doc.get(doc.doc_id, ()))
        embeddings = []
        for mention in mentions:
            try:
                h_e = embed_context(mention, provider)
                h_kb = embed_kb(mention, kb, provider)
                embeddings.append(combine(h_e, h_kb))
            except (EmbeddingError, ClusteringError) as exc:
                raise type(exc)(
                    f"doc '{doc.doc_id}' mention {mention.mention_id}: {exc}"
                ) from exc
        fragment = process_document(state, doc, mentions, embeddings)
        table.add_fragment(doc.doc_id, fragment)
        mention_count += len(mentions)
    manifest = {
        "threshold": threshold,
        "dimension": provider.dimension,
        "seed": getattr(provider, "hash_seed", None),
        "provider": provider.kind,
        "mention_count": mention_count,
        "cluster_count": len(state.clusters),
        "similarity_op_count": state.similarity_op_count,
    }
    return RunResult(state=state, table=table, manifest=manifest)


def _dump_jsonl(records: Iterable[dict], destination: str | Path | IO[str]) -> None:
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            _dump_jsonl(records, fh)
        return
    for record in records:
        destination.write(json.dumps(record, ensure_ascii=False) + "\n")


def write_stakeholder_table(table: StakeholderTable, destination: str | Path | IO[str]) -> None:
    _dump_jsonl(table.to_records(), destination)


def write_cluster_dump(state: ClusterState, destination: str | Path | IO[str]) -> None:
    _dump_jsonl(
        (
            {
                "cluster_id": c.cluster_id,
                "label": c.label,
                "members": [[head, doc_id] for head, doc_id in c.members],
            }
            for c in state.clusters
        ),
        destination,
    )


def write_manifest(manifest: dict, destination: str | Path | IO[str]) -> None:
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            write_manifest(manifest, fh)
        return
    destination.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
