"""Rule-based named entity recognition with byte-exact spans.

The default backend needs no model downloads: it finds capitalized token runs
(allowing internal connectors like "of"), filters sentence starters, dates and
places, and classifies PERSON vs ORG from title cues, organization suffixes
and acronym shape. A document-consistency pass then recovers single-token
aliases of entities already found in the same document ("Modi" after
"Narendra Modi"). Spans are byte offsets into the UTF-8 text and slicing the
encoded text with them reproduces the surface exactly.

A transformer backend can be plugged in behind the same interface by passing
``backend="transformers"`` with a local model path; loading failures surface
as :class:`ModelLoadError` so callers can fall back or abort.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ModelLoadError(RuntimeError):
    pass


TOKEN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9'’.\-]*")

# run extension across a connector only continues organization names
# ("Bank of India", "Council of Medical Research"), never person-of-org
CONNECTORS = {"of", "de"}

TITLE_MODIFIERS = {
    "prime", "home", "finance", "defence", "defense", "union", "deputy",
    "senior", "junior", "external", "railway",
}

SENTENCE_STARTERS = {
    "The", "A", "An", "In", "On", "At", "By", "For", "With", "But", "And", "Or",
    "His", "Her", "Its", "Their", "Our", "This", "That", "These", "Those", "It",
    "He", "She", "They", "We", "You", "I", "Outside", "Inside", "Meanwhile",
    "However", "Earlier", "Later", "After", "Before", "As", "While", "When",
    "Senior", "Governor", "Prime", "Home", "Finance", "Chief",
}

PERSON_CUES = {
    "minister", "chief", "justice", "advocate", "governor", "president",
    "leader", "secretary", "spokesperson", "spokesman", "mr", "ms", "mrs",
    "dr", "prof", "mp", "mla", "commissioner", "predecessor", "economist",
    "activist", "lawyer", "judge", "professor", "chairman", "chairperson",
}

ORG_SUFFIXES = {
    "court", "bank", "commission", "ministry", "party", "organization",
    "organisation", "university", "corporation", "nations", "authority",
    "board", "council", "association", "institute", "agency", "company",
    "group", "congress", "aayog", "fund", "firm", "international", "sector",
    "union",
}

PLACE_DATE_STOP = {
    "india", "delhi", "mumbai", "kolkata", "chennai", "bengaluru", "hyderabad",
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday",
    "january", "february", "march", "april", "may", "june", "july", "august",
    "september", "october", "november", "december", "parliament", "centre",
    "lok", "sabha", "rajya", "yesterday", "today", "tomorrow",
}


@dataclass(frozen=True)
class EntitySpan:
    start: int          # character offset
    end: int            # character offset, half-open
    surface: str
    coarse_type: str    # PERSON or ORG
    head: str


@dataclass(frozen=True)
class _Token:
    start: int
    end: int
    text: str

    @property
    def shape(self) -> str:
        raw = self.text.rstrip(".,'’")
        if len(raw) >= 2 and raw.isupper():
            return "ACRONYM"
        if raw[:1].isupper():
            return "CAP"
        return "LOWER"


def _tokens(text: str) -> list[_Token]:
    return [_Token(m.start(), m.end(), m.group()) for m in TOKEN_RE.finditer(text)]


def _sentence_start(text: str, token_start: int) -> bool:
    i = token_start - 1
    while i >= 0 and text[i] in " \t\"'’“”(":
        i -= 1
    return i < 0 or text[i] in ".!?\n;"


def _strip_possessive(token_text: str) -> str:
    for suffix in ("'s", "’s"):
        if token_text.endswith(suffix):
            return token_text[: -len(suffix)]
    return token_text.rstrip(".,;:")


def _trim_span_end(text: str, start: int, end: int) -> int:
    while end > start:
        if text[end - 1] in ".,;:":
            end -= 1
            continue
        if text[start:end].endswith(("'s", "’s")):
            end -= 2
            continue
        break
    return end


class RuleBasedRecognizer:
    """Deterministic PERSON/ORG recognizer; safe to run offline."""

    def recognize(self, text: str) -> list[EntitySpan]:
        tokens = _tokens(text)
        runs = self._candidate_runs(text, tokens)
        spans: list[EntitySpan] = []
        for run in runs:
            span = self._classify(text, tokens, run)
            if span is not None:
                spans.append(span)
        spans.extend(self._alias_pass(text, tokens, runs, spans))
        spans.sort(key=lambda s: s.start)
        return spans

    def _candidate_runs(self, text: str, tokens: list[_Token]) -> list[list[int]]:
        runs: list[list[int]] = []
        i = 0
        while i < len(tokens):
            if tokens[i].shape == "LOWER":
                i += 1
                continue
            run = [i]
            j = i + 1
            while j < len(tokens):
                token = tokens[j]
                if token.shape in ("CAP", "ACRONYM") and not _sentence_start(
                    text, token.start
                ):
                    run.append(j)
                    j += 1
                    continue
                if (
                    token.text.lower() in CONNECTORS
                    and j + 1 < len(tokens)
                    and tokens[j + 1].shape in ("CAP", "ACRONYM")
                    and _strip_possessive(tokens[j - 1].text).lower() in ORG_SUFFIXES
                    # a sentence boundary between words breaks the run
                    and not _sentence_start(text, token.start)
                    and not _sentence_start(text, tokens[j + 1].start)
                ):
                    run.append(j)
                    run.append(j + 1)
                    j += 2
                    continue
                break
            runs.append(run)
            i = j if j > i + 1 else i + 1
        return runs

    @staticmethod
    def _is_cue(word: str) -> bool:
        word = word.lower()
        if word in PERSON_CUES or word in TITLE_MODIFIERS:
            return True
        return word.endswith("s") and word[:-1] in PERSON_CUES

    def _trim(self, text: str, tokens: list[_Token], run: list[int]) -> list[int]:
        run = list(run)
        # the phases interact ("Yesterday Governor Urjit Patel"), so repeat
        # until the run stops shrinking
        while True:
            before = len(run)
            # leading sentence starters ("The Supreme Court" -> "Supreme Court")
            while run and (
                tokens[run[0]].text in SENTENCE_STARTERS
                and _sentence_start(text, tokens[run[0]].start)
            ):
                run.pop(0)
            # leading/trailing connectors can never delimit an entity
            while run and tokens[run[0]].text.lower() in CONNECTORS:
                run.pop(0)
            while run and tokens[run[-1]].text.lower() in CONNECTORS:
                run.pop()
            # titles often precede names: "Governor Urjit Patel",
            # "Home Minister Amit Shah", "Leaders Mamata Banerjee"
            while len(run) >= 2 and self._is_cue(_strip_possessive(tokens[run[0]].text)):
                run.pop(0)
            while run and _strip_possessive(tokens[run[0]].text).lower() in PLACE_DATE_STOP:
                run.pop(0)
            while run and _strip_possessive(tokens[run[-1]].text).lower() in PLACE_DATE_STOP:
                # "of India" endings stay: only trim a stop word if it is not
                # the object of an internal connector
                if len(run) >= 2 and tokens[run[-2]].text.lower() in CONNECTORS:
                    break
                run.pop()
            if len(run) == before:
                return run

    def _classify(
        self, text: str, tokens: list[_Token], raw_run: list[int]
    ) -> EntitySpan | None:
        run = self._trim(text, tokens, raw_run)
        if not run:
            return None
        words = [tokens[k].text for k in run]
        cleaned = [_strip_possessive(w) for w in words]
        lower = [w.lower() for w in cleaned]
        if all(w in PLACE_DATE_STOP for w in lower):
            return None

        has_connector = any(w in CONNECTORS for w in lower)
        is_acronym_only = len(run) == 1 and tokens[run[0]].shape == "ACRONYM"
        org_suffix = lower[-1] in ORG_SUFFIXES or (has_connector and lower[0] in ORG_SUFFIXES)
        org_like = org_suffix or is_acronym_only or (
            has_connector and any(w in ORG_SUFFIXES for w in lower)
        )

        cue = self._preceding_cue(text, tokens, run[0])
        if not org_like and len(run) == 1:
            if cue is None:
                return None  # bare capitalized word: alias pass may recover it
        coarse = "ORG" if org_like else "PERSON"

        start = tokens[run[0]].start
        end = _trim_span_end(text, start, tokens[run[-1]].end)
        surface = text[start:end]
        head = self._head(cleaned, lower, coarse)
        return EntitySpan(start=start, end=end, surface=surface, coarse_type=coarse, head=head)

    def _preceding_cue(self, text: str, tokens: list[_Token], index: int) -> str | None:
        for back in (1, 2):
            k = index - back
            if k < 0:
                break
            word = _strip_possessive(tokens[k].text).lower()
            if word in PERSON_CUES:
                return word
        return None

    def _head(self, cleaned: list[str], lower: list[str], coarse: str) -> str:
        if coarse == "ORG" and "of" in lower:
            # lexical head precedes the "of" complement: "State Bank of India"
            return cleaned[lower.index("of") - 1]
        return cleaned[-1]

    def _alias_pass(
        self,
        text: str,
        tokens: list[_Token],
        runs: list[list[int]],
        spans: list[EntitySpan],
    ) -> list[EntitySpan]:
        """Recover bare-name aliases of entities already seen in this text."""
        alias_to_entity: dict[str, EntitySpan] = {}
        for span in spans:
            for word in span.surface.split():
                word = _strip_possessive(word)
                if word[:1].isupper() and word.lower() not in PLACE_DATE_STOP:
                    alias_to_entity.setdefault(word, span)
        taken = [(s.start, s.end) for s in spans]
        recovered = []
        for run in runs:
            if len(run) != 1:
                continue
            token = tokens[run[0]]
            if any(a <= token.start < b for a, b in taken):
                continue
            word = _strip_possessive(token.text)
            parent = alias_to_entity.get(word)
            if parent is None or parent.surface == word:
                continue
            end = token.start + len(word)
            recovered.append(
                EntitySpan(
                    start=token.start,
                    end=end,
                    surface=text[token.start : end],
                    coarse_type=parent.coarse_type,
                    head=parent.head if parent.head == word else word,
                )
            )
        return recovered


def load_recognizer(backend: str = "rules", model_path: str | None = None):
    """Instantiate a recognizer backend.

    ``rules`` is the self-contained default. ``transformers`` expects a local
    token-classification model directory and raises :class:`ModelLoadError`
    when it cannot be loaded, so offline runs fail loudly rather than
    silently degrading.
    """
    if backend == "rules":
        return RuleBasedRecognizer()
    if backend == "transformers":
        if not model_path:
            raise ModelLoadError("transformers backend needs --model PATH")
        try:
            from .transformer_backend import TransformerRecognizer

            return TransformerRecognizer(model_path)
        except ModelLoadError:
            raise
        except Exception as exc:  # import or weight loading failed
            raise ModelLoadError(f"cannot load model from '{model_path}': {exc}") from exc
    raise ModelLoadError(f"unknown NER backend '{backend}'")
