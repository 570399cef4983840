"""Gazetteer mention detection over the bundled news fixture.

Shows longest-match-wins behaviour, byte-exact spans (note the rupee sign and
the curly apostrophe in the fixture texts), and surface normalization.

Run from the repository root:  python demos/02_gazetteer_extraction.py
"""

from pathlib import Path

from stakeflow import detect_mentions, load_gazetteer, normalize_surface, parse_corpus

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

gazetteer = load_gazetteer(FIXTURES / "gazetteer.jsonl")
print(f"gazetteer: {len(gazetteer)} normalized surfaces, "
      f"longest key has {gazetteer.max_tokens} tokens\n")

for raw in ("  Narendra  MODI ", "Modi's", "WHO", "Raghuram Rajan’s"):
    print(f"  normalize_surface({raw!r}) = {normalize_surface(raw)!r}")
print()

for doc in parse_corpus(FIXTURES / "docs.jsonl"):
    mentions = detect_mentions(doc, gazetteer)
    print(f"{doc.doc_id} [{doc.topic} / {doc.media_house}] {len(mentions)} mentions")
    raw = doc.text.encode("utf-8")
    for m in mentions:
        sliced = raw[m.span[0] : m.span[1]].decode("utf-8")
        assert sliced == m.surface  # byte-exact by contract
        print(f"    #{m.mention_id} bytes {m.span[0]:4d}..{m.span[1]:4d} "
              f"{m.coarse_type:6s} {m.surface!r} (head={m.head})")
