"""Mention representations: hashed contextual features plus knowledge features.

The feature-hashing encoder is a deterministic stand-in for a neural text
encoder: pure function of (text, dimension, seed), unit L2 norm, and stable
across processes. The knowledge feature comes from entity descriptions or
(subject, predicate, object) triplets and is mean-pooled with the context.

Run from the repository root:  python demos/03_embeddings_and_similarity.py
"""

from pathlib import Path

import numpy as np

from stakeflow import (
    HashedTextProvider,
    Mention,
    combine,
    cosine_similarity,
    embed_context,
    embed_kb,
    embed_text_hashed,
    load_kb,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

print("hashing determinism and norms:")
for text in ("Narendra Modi", "narendra  MODI", "Supreme Court", ""):
    v = embed_text_hashed(text, dim=256, seed=0)
    print(f"  {text!r:20s} norm={np.linalg.norm(v):.6f}")
print("  (case and whitespace variants share a vector: "
      f"{np.array_equal(embed_text_hashed('Narendra Modi', 256, 0), embed_text_hashed('narendra  MODI', 256, 0))})\n")

print("surface similarity under the hashed encoder (dim 256):")
pairs = [
    ("Narendra Modi", "Modi"),
    ("Narendra Modi", "Supreme Court"),
    ("Supreme Court", "Supreme Court of India"),
    ("Reserve Bank of India", "State Bank of India"),
]
for a, b in pairs:
    sim = cosine_similarity(embed_text_hashed(a, 256, 0), embed_text_hashed(b, 256, 0))
    print(f"  cos({a!r}, {b!r}) = {sim:+.4f}")

provider = HashedTextProvider(dimension=256, hash_seed=0)
kb = load_kb(FIXTURES / "kb.jsonl")

mention = Mention(
    doc_id="demo", mention_id=0, span=(15, 28), surface="Narendra Modi",
    head="Modi", coarse_type="PERSON",
    context_window="Prime Minister Narendra Modi defended the citizenship law",
    kb_key="Q1058",
)
h_e = embed_context(mention, provider)
h_kb = embed_kb(mention, kb, provider)
h_x = combine(h_e, h_kb)
print("\nfull mention representation:")
print(f"  context feature norm   {np.linalg.norm(h_e):.4f}")
print(f"  knowledge feature norm {np.linalg.norm(h_kb):.4f} (description of kb_key Q1058)")
print(f"  pooled norm            {np.linalg.norm(h_x):.4f}")
print(f"  cos(pooled, context)   {cosine_similarity(h_x, h_e):.4f}")

triplet_mention = Mention(
    doc_id="demo", mention_id=1, span=(0, 12), surface="Arun Jaitley",
    head="Jaitley", coarse_type="PERSON", context_window="Arun Jaitley defended it",
)
h_kb_triplet = embed_kb(triplet_mention, kb, provider)
print("\ntriplet-matched knowledge feature:")
print(f"  'Arun Jaitley' resolves via a stored triplet -> norm {np.linalg.norm(h_kb_triplet):.4f}")

nobody = Mention(
    doc_id="demo", mention_id=2, span=(0, 5), surface="Nobody Known",
    head="Known", coarse_type="PERSON", context_window="",
)
print(f"  unknown phrase resolves to: {embed_kb(nobody, kb, provider)} (absent is a normal outcome)")
