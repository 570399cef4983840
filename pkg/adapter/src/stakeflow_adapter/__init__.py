"""Preprocessing sidecar for the stakeflow engine.

Runs named entity recognition, light predicate-argument (triplet) extraction,
and cached Wikipedia description lookup over raw documents, emitting mention
and knowledge-base records in the engine's JSONL wire formats. The engine is
consumed only through those formats; this package never imports it.
"""

__version__ = "0.1.0"

from .encoder import encode_text
from .enrich import (
    EnrichConfig,
    EnrichmentError,
    enrich_documents,
    mention_records,
    read_documents,
    write_mentions,
)
from .ner import EntitySpan, ModelLoadError, RuleBasedRecognizer, load_recognizer
from .srl import extract_triplets, sentences
from .wiki import FetchError, PageCache, WikiPage, build_alias_index, fetch_page, slugify
