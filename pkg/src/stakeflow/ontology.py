"""Stakeholder type graph and per-topic stakeholder sets.

The ontology is plain data loaded from a JSON document with three sections:

``types``
    list of ``{"id", "display_name", "description"}`` objects; ``id`` is a
    whitespace-free unique string, using ``Parent:Child`` notation for
    refinements (e.g. ``PoliticalParty:Ruling``).
``edges``
    list of ``{"source", "relation", "target"}`` objects with relation one of
    ``isA``, ``belongsTo``, ``partOf``.
``topics``
    map from topic name to the list of stakeholder type ids considered for
    coverage analysis under that topic.

A hand-transcribed default ontology for Indian policy news ships with the
package (see :func:`default_ontology`).
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Mapping

from .errors import OntologyError

__all__ = [
    "Relation",
    "StakeholderType",
    "OntologyEdge",
    "Ontology",
    "load_ontology",
    "loads_ontology",
    "serialize_ontology",
    "default_ontology_path",
    "default_ontology",
    "is_reachable",
    "topic_stakeholders",
]


class Relation(str, Enum):
    IS_A = "isA"
    BELONGS_TO = "belongsTo"
    PART_OF = "partOf"


@dataclass(frozen=True)
class StakeholderType:
    id: str
    display_name: str
    description: str


@dataclass(frozen=True)
class OntologyEdge:
    source: str
    relation: Relation
    target: str


@dataclass(frozen=True)
class Ontology:
    """Immutable stakeholder ontology; safe for concurrent read access."""

    types: Mapping[str, StakeholderType]
    edges: frozenset[OntologyEdge]
    topic_sets: Mapping[str, frozenset[str]]

    def __contains__(self, type_id: str) -> bool:
        return type_id in self.types

    @property
    def topics(self) -> tuple[str, ...]:
        return tuple(self.topic_sets)

    def successors(self, type_id: str, relation: Relation) -> frozenset[str]:
        return frozenset(
            e.target for e in self.edges if e.source == type_id and e.relation == relation
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ontology):
            return NotImplemented
        return (
            dict(self.types) == dict(other.types)
            and self.edges == other.edges
            and {k: set(v) for k, v in self.topic_sets.items()}
            == {k: set(v) for k, v in other.topic_sets.items()}
        )


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise OntologyError(message)


def _validate(
    types: dict[str, StakeholderType],
    edges: list[OntologyEdge],
    topic_sets: dict[str, frozenset[str]],
) -> None:
    for edge in edges:
        _require(
            edge.source != edge.target,
            f"self-loop edge on type '{edge.source}'",
        )
        for endpoint in (edge.source, edge.target):
            _require(
                endpoint in types,
                f"edge ({edge.source}, {edge.relation.value}, {edge.target}) "
                f"references unknown type '{endpoint}'",
            )
    for topic, members in topic_sets.items():
        _require(bool(members), f"topic '{topic}' has an empty stakeholder set")
        for type_id in members:
            _require(
                type_id in types,
                f"topic '{topic}' references unknown type '{type_id}'",
            )
    _check_isa_acyclic(types, edges)


def _check_isa_acyclic(
    types: dict[str, StakeholderType], edges: list[OntologyEdge]
) -> None:
    children: dict[str, list[str]] = {t: [] for t in types}
    for edge in edges:
        if edge.relation is Relation.IS_A:
            children[edge.source].append(edge.target)
    # Iterative colouring DFS; a grey node seen twice sits on a cycle.
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {t: WHITE for t in types}
    for root in types:
        if colour[root] != WHITE:
            continue
        stack: list[tuple[str, Iterable[str]]] = [(root, iter(children[root]))]
        colour[root] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if colour[nxt] == GREY:
                    raise OntologyError(f"isA cycle involving type '{nxt}'")
                if colour[nxt] == WHITE:
                    colour[nxt] = GREY
                    stack.append((nxt, iter(children[nxt])))
                    advanced = True
                    break
            if not advanced:
                colour[node] = BLACK
                stack.pop()


def _parse_type(raw: object, index: int) -> StakeholderType:
    if not isinstance(raw, dict):
        raise OntologyError(f"types[{index}] is not an object")
    try:
        type_id = raw["id"]
        display = raw["display_name"]
        description = raw["description"]
    except KeyError as exc:
        raise OntologyError(f"types[{index}] is missing field {exc}") from None
    _require(isinstance(type_id, str) and bool(type_id), f"types[{index}] has an empty id")
    _require(
        not any(ch.isspace() for ch in type_id),
        f"type id '{type_id}' contains whitespace",
    )
    return StakeholderType(id=type_id, display_name=str(display), description=str(description))


def loads_ontology(text: str) -> Ontology:
    """Parse and validate an ontology from its JSON text form."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OntologyError(f"ontology syntax error at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise OntologyError("ontology document must be a JSON object")
    for section in ("types", "edges", "topics"):
        _require(section in raw, f"ontology document is missing the '{section}' section")

    types: dict[str, StakeholderType] = {}
    for i, raw_type in enumerate(raw["types"]):
        st = _parse_type(raw_type, i)
        _require(st.id not in types, f"duplicate type id '{st.id}'")
        types[st.id] = st

    edges: list[OntologyEdge] = []
    for i, raw_edge in enumerate(raw["edges"]):
        if not isinstance(raw_edge, dict):
            raise OntologyError(f"edges[{i}] is not an object")
        try:
            relation = Relation(raw_edge["relation"])
        except ValueError:
            raise OntologyError(
                f"edges[{i}] has unknown relation '{raw_edge.get('relation')}'"
            ) from None
        except KeyError as exc:
            raise OntologyError(f"edges[{i}] is missing field {exc}") from None
        try:
            edge = OntologyEdge(
                source=str(raw_edge["source"]), relation=relation, target=str(raw_edge["target"])
            )
        except KeyError as exc:
            raise OntologyError(f"edges[{i}] is missing field {exc}") from None
        edges.append(edge)

    topics_raw = raw["topics"]
    _require(isinstance(topics_raw, dict), "'topics' section must be an object")
    topic_sets = {
        str(topic): frozenset(str(t) for t in members) for topic, members in topics_raw.items()
    }

    _validate(types, edges, topic_sets)
    return Ontology(types=types, edges=frozenset(edges), topic_sets=topic_sets)


def load_ontology(source: str | Path | IO[str]) -> Ontology:
    """Load an ontology from a file path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return loads_ontology(fh.read())
    return loads_ontology(source.read())


def serialize_ontology(ontology: Ontology) -> str:
    """Render an ontology back to canonical JSON text (stable ordering)."""
    doc = {
        "types": [
            {"id": t.id, "display_name": t.display_name, "description": t.description}
            for t in sorted(ontology.types.values(), key=lambda t: t.id)
        ],
        "edges": [
            {"source": e.source, "relation": e.relation.value, "target": e.target}
            for e in sorted(ontology.edges, key=lambda e: (e.source, e.relation.value, e.target))
        ],
        "topics": {
            topic: sorted(members) for topic, members in sorted(ontology.topic_sets.items())
        },
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def default_ontology_path() -> Path:
    """Filesystem path of the packaged default ontology."""
    with resources.as_file(
        resources.files("stakeflow").joinpath("data/default_ontology.json")
    ) as path:
        return Path(path)


def default_ontology() -> Ontology:
    """The hand-curated default ontology for Indian policy news topics."""
    text = (
        resources.files("stakeflow").joinpath("data/default_ontology.json").read_text("utf-8")
    )
    return loads_ontology(text)


def is_reachable(ontology: Ontology, a: str, b: str, relation: Relation | str) -> bool:
    """True iff ``b`` is reachable from ``a`` along edges of ``relation``.

    Reachability is reflexive: every type reaches itself under any relation.
    """
    relation = Relation(relation)
    for type_id in (a, b):
        if type_id not in ontology.types:
            raise OntologyError(f"unknown type id '{type_id}'")
    if a == b:
        return True
    seen = {a}
    frontier = [a]
    while frontier:
        node = frontier.pop()
        for nxt in ontology.successors(node, relation):
            if nxt == b:
                return True
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return False


def topic_stakeholders(ontology: Ontology, topic: str) -> frozenset[str]:
    """Stakeholder type ids configured for coverage analysis under ``topic``."""
    try:
        return ontology.topic_sets[topic]
    except KeyError:
        known = ", ".join(sorted(ontology.topic_sets)) or "<none>"
        raise OntologyError(f"unknown topic '{topic}' (configured: {known})") from None
