from __future__ import annotations

import random

import pytest
from conftest import XTM_ZOO, make_forest, node, random_forest

from tmclust.errors import ValidationError, XtmParseError
from tmclust.xtm import (
    DOC_ROOT_LABEL,
    Association,
    Topic,
    TopicMapDoc,
    derive_forest,
    dump_tree,
    forest_from_json,
    forest_to_json,
    iter_bfs,
    normalize_label,
    number_nodes,
    parse_xtm,
    serialize_xtm,
    validate_forest,
)


def test_parse_zoo_fixture_counts():
    doc = parse_xtm(XTM_ZOO, doc_id="zoo")
    assert len(doc.topics) == 3
    assert len(doc.associations) == 2
    assert [t.name for t in doc.topics] == ["animals", "cats", "dogs"]
    assert doc.occurrences == [type(doc.occurrences[0])(topic="cats", value="felines purr")]


def test_parse_empty_topic_map():
    doc = parse_xtm(b"<topicMap/>")
    assert doc.topics == []
    assert doc.associations == []


def test_parse_first_name_wins():
    data = b"""<topicMap>
      <topic id="t1">
        <topicName><value>First Name</value></topicName>
        <topicName><value>Second Name</value></topicName>
      </topic>
    </topicMap>"""
    doc = parse_xtm(data)
    assert doc.topics == [Topic(id="t1", name="first name")]


def test_parse_unknown_elements_ignored():
    data = b"""<topicMap>
      <mergeMap href="x"/>
      <topic id="t1"><topicName><value>A</value></topicName><itemIdentity href="y"/></topic>
      <reifier/>
    </topicMap>"""
    doc = parse_xtm(data)
    assert [t.id for t in doc.topics] == ["t1"]


def test_parse_malformed_xml_reports_byte_offset():
    data = b"<topicMap>\n  <topic id='x'</topicMap>"
    with pytest.raises(XtmParseError) as excinfo:
        parse_xtm(data)
    assert "byte offset" in str(excinfo.value)
    assert excinfo.value.offset is not None
    assert 0 <= excinfo.value.offset <= len(data)


def test_parse_topic_id_collision():
    data = b"""<topicMap>
      <topic id="dup"><topicName><value>A</value></topicName></topic>
      <topic id="dup"><topicName><value>B</value></topicName></topic>
    </topicMap>"""
    with pytest.raises(ValidationError, match="dup"):
        parse_xtm(data)


def test_parse_unknown_role_target_rejected():
    data = b"""<topicMap>
      <topic id="a"><topicName><value>A</value></topicName></topic>
      <association>
        <type><topicRef href="#parent-child"/></type>
        <role><type><topicRef href="#parent"/></type><topicRef href="#a"/></role>
        <role><type><topicRef href="#child"/></type><topicRef href="#ghost"/></role>
      </association>
    </topicMap>"""
    with pytest.raises(ValidationError, match="ghost"):
        parse_xtm(data)


def test_normalize_label():
    assert normalize_label("  Mixed   Case\tLabel ") == "mixed case label"


def test_roundtrip_fixpoint_on_retained_fields():
    first = parse_xtm(XTM_ZOO, doc_id="zoo")
    second = parse_xtm(serialize_xtm(first), doc_id="zoo")
    assert second.topics == first.topics
    assert second.associations == first.associations
    assert second.occurrences == first.occurrences
    third = parse_xtm(serialize_xtm(second), doc_id="zoo")
    assert third == second


def _doc(topics: list[str], edges: list[tuple[str, str]]) -> TopicMapDoc:
    return TopicMapDoc(
        doc_id="d",
        topics=[Topic(id=t, name=t) for t in topics],
        associations=[
            Association(assoc_type="parent-child", parent_role=p, child_role=c)
            for p, c in edges
        ],
    )


def test_derive_forest_basic_hierarchy():
    forest = derive_forest(_doc(["a", "b", "c"], [("a", "b"), ("a", "c")]))
    assert forest.n == 4
    assert forest_to_json(forest) == {
        "label": DOC_ROOT_LABEL,
        "children": [
            {
                "label": "a",
                "children": [
                    {"label": "b", "children": []},
                    {"label": "c", "children": []},
                ],
            }
        ],
    }


def test_derive_forest_flat_when_no_associations():
    forest = derive_forest(_doc(["x", "y"], []))
    assert forest.n == 3
    assert [c.label for c in forest.root.children] == ["x", "y"]


def test_derive_forest_breaks_cycle_deterministically():
    forest = derive_forest(_doc(["a", "b"], [("a", "b"), ("b", "a")]))
    # Edge from the lexicographically larger parent (b) is dropped.
    assert forest_to_json(forest) == {
        "label": DOC_ROOT_LABEL,
        "children": [
            {"label": "a", "children": [{"label": "b", "children": []}]}
        ],
    }


def test_derive_forest_single_parent_smallest_label_wins():
    forest = derive_forest(_doc(["a", "z", "kid"], [("z", "kid"), ("a", "kid")]))
    top = {c.label: c for c in forest.root.children}
    assert [c.label for c in top["a"].children] == ["kid"]
    assert top["z"].children == []


def test_derive_forest_ignores_non_hierarchical_associations():
    doc = TopicMapDoc(
        doc_id="d",
        topics=[Topic(id="a", name="a"), Topic(id="b", name="b")],
        associations=[Association(assoc_type="mentions", parent_role="a", child_role="b")],
    )
    forest = derive_forest(doc)
    assert [c.label for c in forest.root.children] == ["a", "b"]


def test_derive_forest_deterministic_under_permutation():
    rng = random.Random(7)
    topics = ["a", "b", "c", "d", "e"]
    edges = [("a", "b"), ("a", "c"), ("c", "d")]
    reference = forest_to_json(derive_forest(_doc(topics, edges)))
    for _ in range(10):
        shuffled_topics = topics[:]
        shuffled_edges = edges[:]
        rng.shuffle(shuffled_topics)
        rng.shuffle(shuffled_edges)
        again = derive_forest(_doc(shuffled_topics, shuffled_edges))
        assert forest_to_json(again) == reference


def test_derive_forest_node_count_is_topics_plus_root():
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randint(1, 8)
        topics = [f"t{i}" for i in range(n)]
        edges = []
        for i in range(1, n):
            if rng.random() < 0.6:
                edges.append((topics[rng.randrange(i)], topics[i]))
        forest = derive_forest(_doc(topics, edges))
        validate_forest(forest)
        assert forest.n == n + 1


def test_number_nodes_two_children():
    forest = make_forest("d", node("a"), node("b"))
    numbered = {n.label: k for n, k in number_nodes(forest).items()}
    assert numbered == {DOC_ROOT_LABEL: 1, "a": 2, "b": 3}


def test_number_nodes_single_node():
    forest = make_forest("d")
    assert list(number_nodes(forest).values()) == [1]


def test_number_nodes_chain():
    forest = make_forest("d", node("a", node("b")))
    numbered = {n.label: k for n, k in number_nodes(forest).items()}
    assert numbered == {DOC_ROOT_LABEL: 1, "a": 2, "b": 3}


def test_number_nodes_bijective_and_depth_monotone():
    rng = random.Random(11)
    for _ in range(50):
        forest = random_forest(rng, max_nodes=12)
        numbered = number_nodes(forest)
        values = sorted(numbered.values())
        assert values == list(range(1, forest.n + 1))
        depth = {id(forest.root): 0}
        for parent in iter_bfs(forest.root):
            for child in parent.children:
                depth[id(child)] = depth[id(parent)] + 1
        for u, nu in numbered.items():
            for v, nv in numbered.items():
                if depth[id(u)] < depth[id(v)]:
                    assert nu < nv


def test_forest_json_roundtrip():
    forest = make_forest("d", node("b", node("x")), node("a"))
    loaded = forest_from_json("d", forest_to_json(forest))
    assert forest_to_json(loaded) == forest_to_json(forest)


def test_forest_from_json_requires_doc_root():
    with pytest.raises(ValidationError, match="rooted"):
        forest_from_json("d", {"label": "nope", "children": []})


def test_dump_tree_indentation():
    forest = make_forest("d", node("a", node("b")), node("c"))
    assert dump_tree(forest) == f"{DOC_ROOT_LABEL}\n  a\n    b\n  c\n"


def test_validate_forest_rejects_unsorted_siblings():
    from tmclust.xtm import TopicForest, TopicNode

    bad = TopicNode(
        label=DOC_ROOT_LABEL,
        children=[TopicNode(label="b"), TopicNode(label="a")],
    )
    with pytest.raises(ValidationError, match="unsorted"):
        validate_forest(TopicForest(doc_id="d", root=bad))
