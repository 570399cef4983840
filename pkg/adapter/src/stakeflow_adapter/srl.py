"""Light predicate-argument extraction for (subject, predicate, object) triplets.

A deterministic pattern pass over sentences: a capitalized subject phrase, a
predicate from a fixed verb lexicon (multi-word forms like "served as"
included), and the following object phrase up to the clause boundary. Good
enough to mine relation triplets from encyclopedia-style introductions; not a
general-purpose role labeler.
"""

from __future__ import annotations

import re

PREDICATES = [
    "served as", "serves as", "is known as", "was appointed",
    "is", "was", "are", "were", "became", "heads", "headed", "leads", "led",
    "founded", "chairs", "chaired", "governs", "oversees", "runs", "remains",
    "represents", "represented", "won", "wrote", "criticised", "criticized",
    "defended", "announced", "launched",
]

_SENTENCE_RE = re.compile(r"[^.!?\n]+[.!?]?")
_SUBJECT_RE = re.compile(r"^[\s\"'“]*((?:[A-Z][\w'’.\-]*)(?:\s+(?:of|the|and|for|[A-Z][\w'’.\-]*))*)")
_CLAUSE_END = re.compile(r"[,;:]")

_PREDICATE_RE = re.compile(
    r"\b(" + "|".join(re.escape(p) for p in sorted(PREDICATES, key=len, reverse=True)) + r")\s+",
)


def sentences(text: str) -> list[str]:
    return [m.group().strip() for m in _SENTENCE_RE.finditer(text) if m.group().strip()]


def extract_triplets(text: str) -> list[tuple[str, str, str]]:
    """Mine (subject, predicate, object) triplets, one per matching sentence."""
    triplets = []
    for sentence in sentences(text):
        subject_match = _SUBJECT_RE.match(sentence)
        if not subject_match:
            continue
        subject = subject_match.group(1).strip()
        if not subject or subject.lower() in ("the", "a", "an", "it", "he", "she", "they"):
            continue
        rest = sentence[subject_match.end():]
        predicate_match = _PREDICATE_RE.search(rest)
        if not predicate_match:
            continue
        predicate = predicate_match.group(1)
        obj = rest[predicate_match.end():].strip()
        clause = _CLAUSE_END.search(obj)
        if clause:
            obj = obj[: clause.start()]
        obj = obj.strip().rstrip(".!?").strip()
        if len(obj.split()) < 2:
            continue
        triplets.append((subject, predicate, obj))
    return triplets
