"""Tour of the stakeholder ontology: types, relations, per-topic sets.

Run from the repository root:  python demos/01_ontology_tour.py
"""

from stakeflow import Relation, default_ontology, is_reachable, topic_stakeholders

onto = default_ontology()

print(f"{len(onto.types)} stakeholder types shipped by default:\n")
for type_id in sorted(onto.types):
    t = onto.types[type_id]
    print(f"  {type_id:28s} {t.description}")

print("\nRelations between types:")
for edge in sorted(onto.edges, key=lambda e: (e.relation.value, e.source)):
    print(f"  {edge.source} --{edge.relation.value}--> {edge.target}")

print("\nReachability queries (reflexive and transitive per relation):")
queries = [
    ("PoliticalParty:Ruling", "PoliticalParty", Relation.IS_A),
    ("PoliticalParty:Opposition", "Opposition", Relation.IS_A),
    ("Minister", "PoliticalParty:Ruling", Relation.BELONGS_TO),
    ("Judge", "Judiciary", Relation.PART_OF),
    ("Judiciary", "Government", Relation.IS_A),
]
for a, b, rel in queries:
    result = is_reachable(onto, a, b, rel)
    print(f"  {a} -> {b} via {rel.value}: {result}")

print("\nStakeholder sets considered for coverage analysis per topic:")
for topic in onto.topics:
    members = ", ".join(sorted(topic_stakeholders(onto, topic)))
    print(f"  {topic}: {members}")
