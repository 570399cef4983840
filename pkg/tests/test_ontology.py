from __future__ import annotations

import io
import json

import pytest

from stakeflow import (
    OntologyError,
    Relation,
    default_ontology,
    is_reachable,
    load_ontology,
    loads_ontology,
    serialize_ontology,
    topic_stakeholders,
)


def make_doc(types=None, edges=None, topics=None) -> str:
    return json.dumps(
        {
            "types": types if types is not None else [
                {"id": "A", "display_name": "A", "description": ""},
                {"id": "B", "display_name": "B", "description": ""},
            ],
            "edges": edges if edges is not None else [],
            "topics": topics if topics is not None else {"t": ["A"]},
        }
    )


class TestLoading:
    def test_default_ontology_covers_core_types(self):
        onto = default_ontology()
        assert len(onto.types) >= 12
        for required in (
            "Government",
            "Judiciary",
            "PoliticalParty:Ruling",
            "PoliticalParty:Opposition",
            "Citizen/Activist",
        ):
            assert required in onto

    def test_minister_belongs_to_ruling_party_edge_accepted(self):
        onto = default_ontology()
        assert is_reachable(onto, "Minister", "PoliticalParty:Ruling", Relation.BELONGS_TO)

    def test_isa_cycle_rejected_naming_a_member(self):
        doc = make_doc(
            edges=[
                {"source": "A", "relation": "isA", "target": "B"},
                {"source": "B", "relation": "isA", "target": "A"},
            ]
        )
        with pytest.raises(OntologyError, match="cycle"):
            loads_ontology(doc)
        try:
            loads_ontology(doc)
        except OntologyError as exc:
            assert "'A'" in str(exc) or "'B'" in str(exc)

    def test_dangling_edge_endpoint_rejected(self):
        doc = make_doc(edges=[{"source": "A", "relation": "isA", "target": "Z"}])
        with pytest.raises(OntologyError, match="'Z'"):
            loads_ontology(doc)

    def test_duplicate_id_rejected(self):
        doc = make_doc(
            types=[
                {"id": "A", "display_name": "A", "description": ""},
                {"id": "A", "display_name": "again", "description": ""},
            ]
        )
        with pytest.raises(OntologyError, match="duplicate type id 'A'"):
            loads_ontology(doc)

    def test_topic_referencing_unknown_type_rejected(self):
        doc = make_doc(topics={"t": ["Nope"]})
        with pytest.raises(OntologyError, match="'Nope'"):
            loads_ontology(doc)

    def test_whitespace_in_id_rejected(self):
        doc = make_doc(
            types=[{"id": "Bad Id", "display_name": "x", "description": ""}],
            topics={},
        )
        with pytest.raises(OntologyError, match="whitespace"):
            loads_ontology(doc)

    def test_syntax_error_reports_line(self):
        with pytest.raises(OntologyError, match="line"):
            loads_ontology("{\n  broken\n}")

    def test_self_loop_rejected(self):
        doc = make_doc(edges=[{"source": "A", "relation": "partOf", "target": "A"}])
        with pytest.raises(OntologyError, match="self-loop"):
            loads_ontology(doc)

    def test_load_from_stream(self):
        onto = load_ontology(io.StringIO(make_doc()))
        assert "A" in onto


class TestRoundTrip:
    def test_serialize_then_load_is_identity(self):
        first = default_ontology()
        second = loads_ontology(serialize_ontology(first))
        assert second == first
        assert serialize_ontology(second) == serialize_ontology(first)


class TestReachability:
    def test_refinement_reaches_parent(self):
        onto = default_ontology()
        assert is_reachable(onto, "PoliticalParty:Ruling", "PoliticalParty", "isA")

    def test_reflexive(self):
        onto = default_ontology()
        for type_id in list(onto.types)[:5]:
            assert is_reachable(onto, type_id, type_id, "isA")

    def test_judiciary_not_isa_government_vs_exhaustive_search(self):
        onto = default_ontology()
        # Independent check: exhaustive transitive closure over the edge set.
        edges = [(e.source, e.target) for e in onto.edges if e.relation.value == "isA"]
        closure = {(a, a) for a in onto.types}
        changed = True
        while changed:
            changed = False
            for a, b in list(closure):
                for src, dst in edges:
                    if src == b and (a, dst) not in closure:
                        closure.add((a, dst))
                        changed = True
            for src, dst in edges:
                if (src, dst) not in closure:
                    closure.add((src, dst))
                    changed = True
        assert (("Judiciary", "Government") in closure) is False
        assert is_reachable(onto, "Judiciary", "Government", "isA") is False
        # and the closure agrees with is_reachable everywhere
        for a in onto.types:
            for b in onto.types:
                assert is_reachable(onto, a, b, "isA") == ((a, b) in closure)

    def test_transitivity(self):
        onto = default_ontology()
        ids = list(onto.types)
        for a in ids:
            for b in ids:
                if not is_reachable(onto, a, b, "isA"):
                    continue
                for c in ids:
                    if is_reachable(onto, b, c, "isA"):
                        assert is_reachable(onto, a, c, "isA")

    def test_unknown_type_errors(self):
        onto = default_ontology()
        with pytest.raises(OntologyError, match="unknown type id"):
            is_reachable(onto, "Government", "NotAType", "isA")


class TestTopicSets:
    def test_cab_bill_set(self):
        onto = default_ontology()
        assert topic_stakeholders(onto, "CAB Bill") == frozenset(
            {"Government", "Opposition", "Citizen/Activist", "International-figure"}
        )

    def test_demonetization_set(self):
        onto = default_ontology()
        assert topic_stakeholders(onto, "Demonetization") == frozenset(
            {
                "Government",
                "Opposition",
                "Citizen/Activist",
                "Banking-Sector",
                "Private-Companies",
            }
        )

    def test_unconfigured_topic_errors(self):
        onto = default_ontology()
        with pytest.raises(OntologyError, match="unknown topic 'Cricket'"):
            topic_stakeholders(onto, "Cricket")

    def test_every_topic_set_is_subset_of_types(self):
        onto = default_ontology()
        for topic in onto.topics:
            members = topic_stakeholders(onto, topic)
            assert members
            assert members <= set(onto.types)
