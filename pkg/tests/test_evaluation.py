from __future__ import annotations

import math
import random

import numpy as np
import pytest

from stakeflow import (
    ComplexityBoundError,
    EvaluationError,
    ExternalVectorProvider,
    GoldAnnotation,
    Mention,
    Prediction,
    SeedCluster,
    SeedMember,
    SeedTable,
    complexity_report,
    make_synthetic_stream,
    pairwise_agreement,
    run,
    run_pairwise_baseline,
    score,
)
from stakeflow.ontology import default_ontology


def gold(i, label, doc="d"):
    return GoldAnnotation(doc_id=doc, span=(i * 10, i * 10 + 5), surface=f"s{i}", label=label)


def pred(i, label, doc="d"):
    return Prediction(doc_id=doc, span=(i * 10, i * 10 + 5), label=label)


class TestScore:
    def test_perfect_predictions(self):
        golds = [gold(i, "Judiciary") for i in range(4)] + [gold(i, "Government", doc="e") for i in range(3)]
        preds = [pred(i, "Judiciary") for i in range(4)] + [pred(i, "Government", doc="e") for i in range(3)]
        report = score(preds, golds)
        assert report.macro_f == 1.0
        for metrics in report.per_type.values():
            assert (metrics.precision, metrics.recall, metrics.f_score) == (1.0, 1.0, 1.0)

    def test_empty_predictions_zero_recall(self):
        golds = [gold(0, "Judiciary"), gold(1, "Government")]
        report = score([], golds)
        for label in ("Judiciary", "Government"):
            assert report.per_type[label].recall == 0.0
            assert report.per_type[label].f_score == 0.0
        assert report.macro_f == 0.0

    def test_confusion_fixture_hand_computed(self):
        # 100 gold spans of one type; the engine predicts 96 spans of that
        # type, 83 of them on correct gold spans and 13 on spans with no gold:
        # precision 83/96, recall 83/100.
        golds = [gold(i, "Judiciary") for i in range(100)]
        preds = [pred(i, "Judiciary") for i in range(83)]
        preds += [pred(i, "Judiciary") for i in range(200, 213)]
        report = score(preds, golds)
        j = report.per_type["Judiciary"]
        assert math.isclose(j.precision, 83 / 96, abs_tol=1e-9)
        assert math.isclose(j.recall, 83 / 100, abs_tol=1e-9)
        expected_f = 2 * (83 / 96) * 0.83 / ((83 / 96) + 0.83)
        assert math.isclose(j.f_score, expected_f, abs_tol=1e-9)
        # macro averages only gold-supported types, so the spurious
        # "Government" predictions do not contribute an F of their own
        assert math.isclose(report.macro_f, expected_f, abs_tol=1e-9)
        assert report.support == {"Judiciary": 100}

    def test_label_confusion_counts_fp_and_fn(self):
        golds = [gold(0, "Judiciary")]
        preds = [pred(0, "Government")]
        report = score(preds, golds)
        assert report.per_type["Judiciary"].recall == 0.0
        assert report.per_type["Government"].precision == 0.0

    def test_permutation_invariant(self):
        golds = [gold(i, "Judiciary") for i in range(10)]
        preds = [pred(i, "Judiciary" if i % 2 else "Government") for i in range(10)]
        base = score(preds, golds)
        rng = random.Random(5)
        for _ in range(3):
            shuffled = preds[:]
            rng.shuffle(shuffled)
            again = score(shuffled, golds)
            assert again.per_type == base.per_type
            assert again.macro_f == base.macro_f

    def test_duplicate_gold_rejected(self):
        with pytest.raises(EvaluationError, match="duplicate gold"):
            score([], [gold(0, "Judiciary"), gold(0, "Government")])

    def test_metrics_bounded(self):
        golds = [gold(i, "Judiciary") for i in range(5)]
        preds = [pred(i + 3, "Judiciary") for i in range(5)]
        report = score(preds, golds)
        for m in report.per_type.values():
            assert 0.0 <= m.precision <= 1.0
            assert 0.0 <= m.recall <= 1.0
            assert 0.0 <= m.f_score <= 1.0

    def test_table_layout(self):
        golds = [gold(0, "Judiciary")]
        report = score([pred(0, "Judiciary")], golds)
        rows = report.to_table_rows()
        assert rows[0] == ["stakeholder_type", "precision", "recall", "f_score"]
        assert rows[-1][0] == "Macro-Fscore"
        assert rows[-1][1] == rows[-1][2] == "-"
        assert rows[-1][3] == "100.0"


class TestComplexityReport:
    def test_trace_counts_five_singletons_two_seeds(self):
        # two seed clusters; five mentions, all distinct surfaces, all forced
        # to the singleton branch: ops per mention are 2, 3, 4, 5, 6.
        onto = default_ontology()
        dim = 8
        seeds = SeedTable(
            clusters=tuple(
                SeedCluster(
                    cluster_id=c,
                    label="Government",
                    members=(SeedMember(f"seed {c}", vector=np.eye(dim)[c]),),
                )
                for c in range(2)
            )
        )
        stream = make_synthetic_stream(
            n_mentions=5, n_clusters=2, dim=dim, mentions_per_doc=5
        )
        # orthogonal directions guarantee the singleton branch at T=0.99
        for k, m in enumerate(stream.mentions_by_doc[stream.documents[0].doc_id]):
            m.vector = np.eye(dim)[k + 3]
        result = run(
            stream.documents, stream.mentions_by_doc, seeds, 0.99,
            ExternalVectorProvider(dimension=dim), onto,
        )
        assert result.manifest["similarity_op_count"] == 2 + 3 + 4 + 5 + 6
        report = complexity_report(result.manifest)
        assert report["sequential_bound"] == 7 * 5
        assert report["pairwise_baseline"] == 10

    def test_all_known_entities_zero_ops(self, fixtures, documents):
        from stakeflow import load_mentions, load_seed_table

        mentions_by_doc = load_mentions(fixtures / "mentions.jsonl", documents)
        seeds = load_seed_table(fixtures / "seeds.jsonl")
        onto = default_ontology()
        first = run(documents, mentions_by_doc, seeds, 0.75,
                    ExternalVectorProvider(dimension=8), onto)
        # replay the same corpus against the final state
        from stakeflow.clustering import process_document

        ops_before = first.state.similarity_op_count
        for doc in documents:
            ms = mentions_by_doc[doc.doc_id]
            process_document(first.state, doc, ms, [m.vector for m in ms])
        manifest = {
            "mention_count": 40,
            "cluster_count": len(first.state.clusters),
            "similarity_op_count": first.state.similarity_op_count - ops_before,
        }
        report = complexity_report(manifest)
        assert report["similarity_op_count"] == 0
        assert report["ratio_vs_pairwise"] is None

    def test_bound_violation_raises(self):
        with pytest.raises(ComplexityBoundError):
            complexity_report(
                {"mention_count": 10, "cluster_count": 2, "similarity_op_count": 21}
            )

    def test_synthetic_stream_stays_under_bound(self):
        stream = make_synthetic_stream(n_mentions=200, n_clusters=10, dim=32)
        result = run(
            stream.documents, stream.mentions_by_doc, stream.seeds, 0.75,
            ExternalVectorProvider(dimension=32), default_ontology(),
        )
        assert result.manifest["cluster_count"] == 10
        report = complexity_report(result.manifest)
        assert report["similarity_op_count"] <= report["sequential_bound"] == 2000


class TestPairwiseBaseline:
    def make_mentions(self, vectors):
        return [
            Mention(
                doc_id="d", mention_id=i, span=(i, i + 1), surface=f"m{i}",
                head=f"m{i}", coarse_type="PERSON", context_window="",
            )
            for i in range(len(vectors))
        ]

    def test_exact_op_count(self):
        vectors = [np.eye(4)[i % 4] for i in range(5)]
        result = run_pairwise_baseline(self.make_mentions(vectors), vectors, 0.5)
        assert result.op_count == 10

    def test_identical_vectors_one_component(self):
        vectors = [np.array([1.0, 0.0])] * 6
        result = run_pairwise_baseline(self.make_mentions(vectors), vectors, 0.99)
        assert len(result.components) == 1
        assert result.assignment == [0] * 6

    def test_orthogonal_vectors_all_singletons(self):
        vectors = [np.eye(5)[i] for i in range(5)]
        result = run_pairwise_baseline(self.make_mentions(vectors), vectors, 0.1)
        assert len(result.components) == 5

    def test_component_labels_from_seed_majority(self):
        vectors = [np.array([1.0, 0.0])] * 3 + [np.array([0.0, 1.0])]
        mentions = self.make_mentions(vectors)
        mentions[0] = Mention(
            doc_id="d", mention_id=0, span=(0, 1), surface="Rahul Gandhi",
            head="Gandhi", coarse_type="PERSON", context_window="",
        )
        seeds = SeedTable(
            clusters=(
                SeedCluster(cluster_id=0, label="Opposition",
                            members=(SeedMember("Rahul Gandhi"),)),
            )
        )
        result = run_pairwise_baseline(mentions, vectors, 0.9, seeds)
        assert result.labels[result.assignment[0]] == "Opposition"
        assert result.labels[result.assignment[3]] is None
        assert result.unlabeled_count == 1

    def test_agreement_with_sequential_on_fixture(self, fixtures, documents):
        from stakeflow import load_mentions, load_seed_table

        mentions_by_doc = load_mentions(fixtures / "mentions.jsonl", documents)
        seeds = load_seed_table(fixtures / "seeds.jsonl")
        onto = default_ontology()
        sequential = run(documents, mentions_by_doc, seeds, 0.75,
                         ExternalVectorProvider(dimension=8), onto)
        flat = [m for doc in documents for m in mentions_by_doc[doc.doc_id]]
        vectors = [m.vector for m in flat]
        baseline = run_pairwise_baseline(flat, vectors, 0.75, seeds)
        assert baseline.op_count == 40 * 39 // 2
        sequential_assignment = [
            entry.cluster_id
            for doc in documents
            for entry in sequential.table.fragment(doc.doc_id)
        ]
        agreement = pairwise_agreement(sequential_assignment, baseline.assignment)
        # exhaustive pair enumeration, recomputed here as an independent check
        manual = 0
        total = 0
        for i in range(40):
            for j in range(i + 1, 40):
                same_a = sequential_assignment[i] == sequential_assignment[j]
                same_b = baseline.assignment[i] == baseline.assignment[j]
                manual += same_a == same_b
                total += 1
        assert agreement == manual / total
        assert agreement > 0.5


class TestPairwiseAgreement:
    def test_identical_partitions(self):
        assert pairwise_agreement([0, 0, 1, 2], [5, 5, 7, 9]) == 1.0

    def test_disjoint_partitions(self):
        assert pairwise_agreement([0, 0], [0, 1]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(EvaluationError):
            pairwise_agreement([0], [0, 1])
