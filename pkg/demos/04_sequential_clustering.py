"""Sequential cross-document clustering over the bundled fixture stream.

Ten documents stream through in order against six pre-labeled seed clusters.
Watch the three decision kinds fire: dictionary hits on known surfaces,
threshold-gated joins of existing clusters, and below-threshold singletons
that inherit the nearest cluster's label and then become known entities
themselves.

Run from the repository root:  python demos/04_sequential_clustering.py
"""

from pathlib import Path

from stakeflow import (
    ExternalVectorProvider,
    default_ontology,
    load_mentions,
    load_seed_table,
    parse_corpus,
    run,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"
THRESHOLD = 0.75

documents = list(parse_corpus(FIXTURES / "docs.jsonl"))
mentions_by_doc = load_mentions(FIXTURES / "mentions.jsonl", documents)
seeds = load_seed_table(FIXTURES / "seeds.jsonl")

print("seed clusters:")
for seed in seeds.clusters:
    members = ", ".join(m.surface for m in seed.members)
    print(f"  [{seed.cluster_id}] {seed.label}: {members}")

result = run(
    documents,
    mentions_by_doc,
    seeds,
    THRESHOLD,
    ExternalVectorProvider(dimension=8),
    default_ontology(),
)

print(f"\ndecision trace (threshold {THRESHOLD}):")
for doc in documents:
    fragment = result.table.fragment(doc.doc_id)
    if not fragment:
        print(f"  {doc.doc_id}: no stakeholder candidates")
        continue
    for entry in fragment:
        score = "" if entry.score is None else f" score={entry.score:+.3f}"
        extra = "" if entry.nearest_cluster_id is None else f" nearest={entry.nearest_cluster_id}"
        print(f"  {doc.doc_id} {entry.surface!r:32s} -> [{entry.cluster_id}] "
              f"{entry.label:22s} {entry.decision.value}{score}{extra}")

print("\nfinal clusters:")
for cluster in result.state.clusters:
    members = ", ".join(
        f"{head}@{doc_id}" if doc_id else f"{head} (seed)" for head, doc_id in cluster.members
    )
    print(f"  [{cluster.cluster_id}] {cluster.label}: {members}")

m = result.manifest
print(f"\nmanifest: {m['mention_count']} mentions, {m['cluster_count']} clusters, "
      f"{m['similarity_op_count']} similarity ops "
      f"(ceiling {m['cluster_count'] * m['mention_count']})")
