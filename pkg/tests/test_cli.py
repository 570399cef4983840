from __future__ import annotations

import io
import json
from pathlib import Path

import pytest

from stakeflow.cli import main


def invoke(*argv) -> int:
    return main(list(argv))


def invoke_expect_usage_error(*argv) -> int:
    with pytest.raises(SystemExit) as excinfo:
        invoke(*argv)
    return excinfo.value.code


@pytest.fixture(scope="module")
def paths(fixtures):
    from stakeflow import default_ontology_path

    return {
        "ontology": str(default_ontology_path()),
        "corpus": str(fixtures / "docs.jsonl"),
        "gazetteer": str(fixtures / "gazetteer.jsonl"),
        "mentions": str(fixtures / "mentions.jsonl"),
        "seeds": str(fixtures / "seeds.jsonl"),
        "kb": str(fixtures / "kb.jsonl"),
        "gold": str(fixtures / "golden" / "gold_perfect.jsonl"),
        "seeds_text": str(fixtures / "seeds_text.jsonl"),
        "golden_mentions": str(fixtures / "golden" / "mentions_gazetteer.jsonl"),
    }


def cluster_args(paths, out, threshold="0.75"):
    return [
        "cluster",
        "--ontology", paths["ontology"],
        "--corpus", paths["corpus"],
        "--mentions", paths["mentions"],
        "--seeds", paths["seeds"],
        "--threshold", threshold,
        "--dim", "8",
        "--provider", "external",
        "--out", str(out),
    ]


class TestExtract:
    def test_matches_golden_fixture(self, paths, tmp_path):
        code = invoke(
            "extract",
            "--ontology", paths["ontology"],
            "--corpus", paths["corpus"],
            "--gazetteer", paths["gazetteer"],
            "--out", str(tmp_path),
        )
        assert code == 0
        got = (tmp_path / "mentions.jsonl").read_bytes()
        expected = Path(paths["golden_mentions"]).read_bytes()
        assert got == expected

    def test_empty_corpus_succeeds_with_empty_output(self, paths, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        code = invoke(
            "extract",
            "--ontology", paths["ontology"],
            "--corpus", str(empty),
            "--gazetteer", paths["gazetteer"],
            "--out", str(tmp_path / "out"),
        )
        assert code == 0
        assert (tmp_path / "out" / "mentions.jsonl").read_text() == ""

    def test_missing_gazetteer_is_usage_error(self, paths, tmp_path):
        code = invoke_expect_usage_error(
            "extract",
            "--ontology", paths["ontology"],
            "--corpus", paths["corpus"],
            "--out", str(tmp_path),
        )
        assert code == 2

    def test_nonexistent_gazetteer_path_is_usage_error(self, paths, tmp_path):
        code = invoke_expect_usage_error(
            "extract",
            "--ontology", paths["ontology"],
            "--corpus", paths["corpus"],
            "--gazetteer", str(tmp_path / "missing.jsonl"),
            "--out", str(tmp_path),
        )
        assert code == 2


class TestCluster:
    def test_artifacts_byte_identical_across_invocations(self, paths, tmp_path):
        for sub in ("a", "b"):
            assert invoke(*cluster_args(paths, tmp_path / sub)) == 0
        for name in ("stakeholders.jsonl", "clusters.jsonl", "manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_threshold_out_of_range_rejected(self, paths, tmp_path):
        code = invoke_expect_usage_error(*cluster_args(paths, tmp_path, threshold="2.0"))
        assert code == 2

    def test_stakeholder_table_matches_reference_trace(self, paths, tmp_path, fixtures):
        from oracle_sequential import reference_run

        assert invoke(*cluster_args(paths, tmp_path)) == 0
        written = [
            json.loads(line)
            for line in (tmp_path / "stakeholders.jsonl").read_text().splitlines()
        ]
        oracle_records, _, _ = reference_run(
            fixtures / "docs.jsonl",
            fixtures / "mentions.jsonl",
            fixtures / "seeds.jsonl",
            0.75,
        )
        assert written == oracle_records

    def test_manifest_contents(self, paths, tmp_path):
        assert invoke(*cluster_args(paths, tmp_path)) == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["threshold"] == 0.75
        assert manifest["dimension"] == 8
        assert manifest["provider"] == "external_vectors"
        assert manifest["mention_count"] == 40
        assert manifest["cluster_count"] == 9
        assert manifest["similarity_op_count"] <= 9 * 40

    def test_rerun_from_manifest_reproduces_artifacts(self, paths, tmp_path):
        assert invoke(*cluster_args(paths, tmp_path / "first")) == 0
        code = invoke(
            "cluster",
            "--config", str(tmp_path / "first" / "manifest.json"),
            "--out", str(tmp_path / "second"),
        )
        assert code == 0
        for name in ("stakeholders.jsonl", "clusters.jsonl", "manifest.json"):
            assert (tmp_path / "first" / name).read_bytes() == (
                tmp_path / "second" / name
            ).read_bytes()

    def test_mentions_from_stdin(self, paths, tmp_path, monkeypatch):
        data = Path(paths["mentions"]).read_text()
        monkeypatch.setattr("sys.stdin", io.StringIO(data))
        code = invoke(
            "cluster",
            "--ontology", paths["ontology"],
            "--corpus", paths["corpus"],
            "--mentions", "-",
            "--seeds", paths["seeds"],
            "--threshold", "0.75",
            "--dim", "8",
            "--provider", "external",
            "--out", str(tmp_path),
        )
        assert code == 0
        assert (tmp_path / "stakeholders.jsonl").exists()

    def test_inline_gazetteer_detection_with_hashed_provider(self, paths, tmp_path):
        code = invoke(
            "cluster",
            "--ontology", paths["ontology"],
            "--corpus", paths["corpus"],
            "--gazetteer", paths["gazetteer"],
            "--seeds", paths["seeds_text"],
            "--kb", paths["kb"],
            "--threshold", "0.3",
            "--dim", "64",
            "--provider", "hashed",
            "--out", str(tmp_path),
        )
        assert code == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["provider"] == "hashed_baseline"
        assert manifest["seed"] == 0
        assert manifest["mention_count"] == 40

    def test_env_variable_override(self, paths, tmp_path, monkeypatch):
        monkeypatch.setenv("STAKEFLOW_THRESHOLD", "1.0")
        args = cluster_args(paths, tmp_path)
        idx = args.index("--threshold")
        del args[idx : idx + 2]
        assert invoke(*args) == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["threshold"] == 1.0
        # 1.0 with strict > comparison means nothing can match
        for line in (tmp_path / "stakeholders.jsonl").read_text().splitlines():
            assert json.loads(line)["decision"] != "matched_existing"

    def test_flag_beats_env_and_config(self, paths, tmp_path, monkeypatch):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"threshold": 0.1}))
        monkeypatch.setenv("STAKEFLOW_THRESHOLD", "0.2")
        args = cluster_args(paths, tmp_path, threshold="0.75") + ["--config", str(config)]
        assert invoke(*args) == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["threshold"] == 0.75


class TestCoverage:
    @pytest.fixture()
    def clustered(self, paths, tmp_path):
        assert invoke(*cluster_args(paths, tmp_path / "run")) == 0
        return tmp_path / "run"

    def test_csv_matches_independent_recount(self, paths, tmp_path, clustered):
        out = tmp_path / "cov"
        code = invoke(
            "coverage",
            "--ontology", paths["ontology"],
            "--corpus", paths["corpus"],
            "--stakeholders", str(clustered / "stakeholders.jsonl"),
            "--out", str(out),
        )
        assert code == 0
        import csv

        with open(out / "coverage_all.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        # recount straight from the wire files
        docs = {
            json.loads(l)["doc_id"]: json.loads(l)
            for l in open(paths["corpus"], encoding="utf-8")
        }
        recount: dict[tuple[str, str, str], int] = {}
        for line in open(clustered / "stakeholders.jsonl", encoding="utf-8"):
            record = json.loads(line)
            doc = docs[record["doc_id"]]
            key = (doc["topic"], doc["media_house"], record["label"])
            recount[key] = recount.get(key, 0) + 1
        for row in rows:
            if row["stakeholder_type"] == "other":
                continue
            key = (row["topic"], row["media_house"], row["stakeholder_type"])
            assert int(row["count"]) == recount[key], key
        # conservation per (topic, house)
        by_pair: dict[tuple[str, str], int] = {}
        for (topic, house, _), count in recount.items():
            by_pair[(topic, house)] = by_pair.get((topic, house), 0) + count
        csv_by_pair: dict[tuple[str, str], int] = {}
        for row in rows:
            key = (row["topic"], row["media_house"])
            csv_by_pair[key] = csv_by_pair.get(key, 0) + int(row["count"])
        assert csv_by_pair == by_pair

    def test_single_document_single_row_group(self, paths, tmp_path):
        single = tmp_path / "single.jsonl"
        with open(paths["corpus"], encoding="utf-8") as fh:
            single.write_text(fh.readline())
        run_dir = tmp_path / "run"
        code = invoke(
            "cluster",
            "--ontology", paths["ontology"],
            "--corpus", str(single),
            "--mentions", paths["mentions"],
            "--seeds", paths["seeds"],
            "--threshold", "0.75",
            "--dim", "8",
            "--provider", "external",
            "--out", str(run_dir),
            "--lenient",
        )
        assert code == 0
        out = tmp_path / "cov"
        code = invoke(
            "coverage",
            "--ontology", paths["ontology"],
            "--corpus", str(single),
            "--stakeholders", str(run_dir / "stakeholders.jsonl"),
            "--out", str(out),
        )
        assert code == 0
        import csv

        with open(out / "coverage_all.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert {(r["topic"], r["media_house"]) for r in rows} == {("CAB Bill", "The Hindu")}

    def test_missing_stakeholders_usage_error(self, paths, tmp_path):
        code = invoke_expect_usage_error(
            "coverage",
            "--ontology", paths["ontology"],
            "--corpus", paths["corpus"],
            "--out", str(tmp_path),
        )
        assert code == 2


class TestEval:
    def test_perfect_gold_gives_macro_one(self, paths, tmp_path):
        run_dir = tmp_path / "run"
        assert invoke(*cluster_args(paths, run_dir)) == 0
        out = tmp_path / "eval"
        code = invoke(
            "eval",
            "--ontology", paths["ontology"],
            "--corpus", paths["corpus"],
            "--stakeholders", str(run_dir / "stakeholders.jsonl"),
            "--mentions", paths["mentions"],
            "--gold", paths["gold"],
            "--out", str(out),
        )
        assert code == 0
        metrics = json.loads((out / "metrics.json").read_text())
        assert metrics["macro_f"] == 1.0
        table = (out / "metrics.csv").read_text().splitlines()
        assert table[0] == "stakeholder_type,precision,recall,f_score"
        assert table[-1].startswith("Macro-Fscore,-,-,")


class TestBench:
    def test_manifest_report(self, paths, tmp_path, capsys):
        run_dir = tmp_path / "run"
        assert invoke(*cluster_args(paths, run_dir)) == 0
        code = invoke("bench", "--manifest", str(run_dir / "manifest.json"))
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["sequential"]["similarity_op_count"] <= report["sequential"]["sequential_bound"]

    def test_synthetic_with_pairwise_comparison(self, tmp_path, capsys):
        code = invoke(
            "bench",
            "--synthetic-mentions", "120",
            "--synthetic-clusters", "6",
            "--dim", "32",
            "--threshold", "0.75",
            "--pairwise",
            "--out", str(tmp_path),
        )
        assert code == 0
        report = json.loads((tmp_path / "bench.json").read_text())
        assert report["sequential"]["pairwise_baseline"] == 120 * 119 // 2
        assert report["pairwise"]["op_count"] == 120 * 119 // 2
        assert report["sequential"]["similarity_op_count"] <= 6 * 120
        assert 0.0 <= report["pairwise"]["agreement_with_sequential"] <= 1.0

    def test_bench_without_inputs_is_usage_error(self):
        assert invoke_expect_usage_error("bench") == 2
