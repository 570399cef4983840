"""Optional transformer-based recognizer behind the same interface.

Only imported when explicitly requested; it needs a local model directory
(no downloads) with a token-classification head emitting PER/ORG labels.
"""

from __future__ import annotations

from .ner import EntitySpan, ModelLoadError

_KEEP = {"PER": "PERSON", "PERSON": "PERSON", "ORG": "ORG"}


class TransformerRecognizer:
    def __init__(self, model_path: str):
        try:
            from transformers import pipeline
        except ImportError as exc:
            raise ModelLoadError("transformers is not installed") from exc
        try:
            self._pipe = pipeline(
                "token-classification",
                model=model_path,
                tokenizer=model_path,
                aggregation_strategy="simple",
            )
        except Exception as exc:
            raise ModelLoadError(f"cannot load model from '{model_path}': {exc}") from exc

    def recognize(self, text: str) -> list[EntitySpan]:
        spans = []
        for hit in self._pipe(text):
            group = _KEEP.get(hit.get("entity_group", ""))
            if group is None:
                continue
            start, end = int(hit["start"]), int(hit["end"])
            surface = text[start:end]
            spans.append(
                EntitySpan(
                    start=start,
                    end=end,
                    surface=surface,
                    coarse_type=group,
                    head=surface.split()[-1] if surface.split() else surface,
                )
            )
        spans.sort(key=lambda s: s.start)
        return spans
