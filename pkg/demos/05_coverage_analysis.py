"""Visibility and coverage-share analysis per (topic, media house, type).

Counts every classified stakeholder mention into a (topic, media house,
stakeholder type) matrix, then reports percentage shares restricted to each
topic's configured stakeholder set, with everything else pooled under
"other". Exports land as plotter-ready CSV/JSON tables.

Run from the repository root:  python demos/05_coverage_analysis.py
"""

import tempfile
from pathlib import Path

from stakeflow import (
    CoverageMatrix,
    ExternalVectorProvider,
    accumulate,
    coverage_share,
    default_ontology,
    export_by_topic,
    load_mentions,
    load_seed_table,
    parse_corpus,
    run,
    visibility,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

onto = default_ontology()
documents = list(parse_corpus(FIXTURES / "docs.jsonl"))
mentions_by_doc = load_mentions(FIXTURES / "mentions.jsonl", documents)
seeds = load_seed_table(FIXTURES / "seeds.jsonl")
result = run(documents, mentions_by_doc, seeds, 0.75,
             ExternalVectorProvider(dimension=8), onto)

matrix = CoverageMatrix()
for doc in documents:
    accumulate(matrix, doc, result.table.fragment(doc.doc_id))

print("visibility counts (mentions, not documents):")
for topic, house in matrix.pairs():
    labels = sorted({s for (t, h, s) in matrix.counts if (t, h) == (topic, house)})
    counts = ", ".join(f"{s}={visibility(matrix, topic, house, s)}" for s in labels)
    docs = matrix.doc_counts[(topic, house)]
    print(f"  {topic} / {house} ({docs} docs): {counts}")

print("\ncoverage shares per media house (sum to 100 within 1e-9):")
for topic, house in matrix.pairs():
    try:
        shares = coverage_share(matrix, topic, house, onto)
    except Exception:
        continue
    rendered = ", ".join(f"{s} {pct:.1f}%" for s, pct in sorted(shares.items()))
    print(f"  {topic} / {house}: {rendered}")

with tempfile.TemporaryDirectory() as tmp:
    written = export_by_topic(matrix, onto, tmp)
    print("\nexported files:")
    for path in written:
        print(f"  {path.name} ({path.stat().st_size} bytes)")
    combined = next(p for p in written if p.name == "coverage_all.csv")
    print("\ncoverage_all.csv:")
    print(combined.read_text())
