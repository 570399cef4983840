"""Adapter output integrity and the full pipe into the engine CLI."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from stakeflow_adapter import EnrichConfig, enrich_documents, read_documents
from stakeflow_adapter.cli import main


def enrich_records(fixtures, **overrides):
    config = EnrichConfig(kb_cache=str(fixtures / "wiki_cache"), **overrides)
    return list(enrich_documents(read_documents(fixtures / "articles.jsonl"), config))


class TestEnrichOutput:
    def test_spans_byte_exact_against_article_bytes(self, fixtures, articles):
        texts = {a["doc_id"]: a["text"].encode("utf-8") for a in articles}
        records = enrich_records(fixtures)
        assert records
        for record in records:
            start, end = record["span"]
            assert texts[record["doc_id"]][start:end] == record["surface"].encode("utf-8")

    def test_mention_ids_sequential_in_span_order(self, fixtures):
        by_doc: dict[str, list[dict]] = {}
        for record in enrich_records(fixtures):
            by_doc.setdefault(record["doc_id"], []).append(record)
        for records in by_doc.values():
            assert [r["mention_id"] for r in records] == list(range(len(records)))
            spans = [tuple(r["span"]) for r in records]
            assert spans == sorted(spans)

    def test_only_person_org_emitted(self, fixtures):
        for record in enrich_records(fixtures):
            assert record["coarse_type"] in ("PERSON", "ORG")

    def test_kb_keys_attached_from_cache(self, fixtures):
        records = enrich_records(fixtures)
        keyed = {r["surface"]: r.get("kb_key") for r in records}
        assert keyed.get("Narendra Modi") == "narendra_modi"
        assert keyed.get("Reserve Bank of India") == "reserve_bank_of_india"
        assert keyed.get("WHO") == "world_health_organization"

    def test_zero_entity_document_emits_nothing(self, fixtures):
        assert not [r for r in enrich_records(fixtures) if r["doc_id"] == "a05"]

    def test_vectors_emitted_with_requested_dimension(self, fixtures):
        records = enrich_records(fixtures, emit_vectors=True, dim=32)
        for record in records:
            assert len(record["vector"]) == 32

    def test_deterministic_across_runs(self, fixtures):
        assert enrich_records(fixtures, emit_vectors=True, dim=16) == enrich_records(
            fixtures, emit_vectors=True, dim=16
        )

    def test_cli_writes_mention_file(self, fixtures, tmp_path):
        out = tmp_path / "mentions.jsonl"
        code = main([
            "enrich",
            "--documents", str(fixtures / "articles.jsonl"),
            "--kb-cache", str(fixtures / "wiki_cache"),
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == len(enrich_records(fixtures))


class TestEngineIntegration:
    """The adapter talks to the engine only through files, pipes, and its CLI."""

    def engine_loads_cleanly(self, fixtures, records):
        from stakeflow import load_mentions, parse_corpus

        documents = list(parse_corpus(fixtures / "articles.jsonl"))
        mention_text = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)
        import io

        by_doc = load_mentions(io.StringIO(mention_text), documents)
        return sum(len(v) for v in by_doc.values())

    def test_engine_integrity_checks_pass(self, fixtures):
        records = enrich_records(fixtures)
        assert self.engine_loads_cleanly(fixtures, records) == len(records)

    def test_pipe_into_cluster_exits_zero(self, fixtures, tmp_path):
        enrich = subprocess.run(
            [
                sys.executable, "-m", "stakeflow_adapter.cli",
                "enrich",
                "--documents", str(fixtures / "articles.jsonl"),
                "--kb-cache", str(fixtures / "wiki_cache"),
                "--out", "-",
            ],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert enrich.returncode == 0, enrich.stderr
        assert enrich.stdout.strip(), "adapter emitted no mention records"

        cluster = subprocess.run(
            [
                sys.executable, "-m", "stakeflow.cli",
                "cluster",
                "--corpus", str(fixtures / "articles.jsonl"),
                "--mentions", "-",
                "--seeds", str(fixtures / "seeds.jsonl"),
                "--threshold", "0.4",
                "--dim", "128",
                "--provider", "hashed",
                "--ontology", self.default_ontology_path(),
                "--out", str(tmp_path),
            ],
            input=enrich.stdout,
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert cluster.returncode == 0, cluster.stderr
        stakeholder_lines = (tmp_path / "stakeholders.jsonl").read_text().splitlines()
        assert len(stakeholder_lines) == len(enrich.stdout.strip().splitlines())
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["mention_count"] == len(stakeholder_lines)

    @staticmethod
    def default_ontology_path() -> str:
        from stakeflow import default_ontology_path

        return str(default_ontology_path())
