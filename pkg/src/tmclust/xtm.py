"""XTM topic-map ingestion and topic-tree derivation.

Parses a small XTM 2.0 subset (topic ids, topic names, occurrence
resourceData, binary typed associations), turns each document into a
deterministic ordered forest of topic labels under a synthetic root,
and numbers forest nodes in level order.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .errors import ValidationError, XtmParseError

DOC_ROOT_LABEL = "⟨DOC⟩"

# Association types whose (parent role, child role) induce tree edges.
DEFAULT_HIERARCHICAL_TYPES = frozenset(
    {"superclass-subclass", "parent-child", "broader-narrower"}
)

_WS_RE = re.compile(r"\s+")


def normalize_label(raw: str) -> str:
    """Lower-case a label and collapse internal whitespace."""
    return _WS_RE.sub(" ", raw.strip()).lower()


@dataclass(frozen=True)
class Topic:
    id: str
    name: str


@dataclass(frozen=True)
class Association:
    assoc_type: str
    parent_role: str
    child_role: str


@dataclass(frozen=True)
class Occurrence:
    topic: str
    value: str


@dataclass
class TopicMapDoc:
    doc_id: str
    topics: list[Topic] = field(default_factory=list)
    associations: list[Association] = field(default_factory=list)
    occurrences: list[Occurrence] = field(default_factory=list)

    def topic_names(self) -> dict[str, str]:
        return {t.id: t.name for t in self.topics}


@dataclass(eq=False)
class TopicNode:
    """One positional node of a topic tree; labels may repeat."""

    label: str
    children: list["TopicNode"] = field(default_factory=list)


@dataclass(eq=False)
class TopicForest:
    """A document's topic trees under one synthetic root node."""

    doc_id: str
    root: TopicNode

    @property
    def n(self) -> int:
        """Node count, synthetic root included."""
        return sum(1 for _ in iter_bfs(self.root))


def iter_bfs(root: TopicNode) -> Iterator[TopicNode]:
    """Yield nodes level by level, left to right."""
    queue = deque([root])
    while queue:
        node = queue.popleft()
        yield node
        queue.extend(node.children)


def number_nodes(forest: TopicForest) -> dict[TopicNode, int]:
    """Number nodes breadth-first starting from the root at 1."""
    return {node: k for k, node in enumerate(iter_bfs(forest.root), start=1)}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _ref_fragment(href: str) -> str:
    return href.rsplit("#", 1)[-1]


def _byte_offset(data: bytes, line: int, column: int) -> int:
    lines = data.split(b"\n")
    return sum(len(ln) + 1 for ln in lines[: line - 1]) + column


def parse_xtm(data: bytes, doc_id: str = "") -> TopicMapDoc:
    """Parse XTM 2.0 bytes into a TopicMapDoc.

    Only the supported subset is extracted (topic ids, first topicName,
    occurrence resourceData, binary associations with typed roles);
    everything else is ignored without error.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position
        offset = _byte_offset(data, line, column)
        raise XtmParseError(
            f"malformed XML at byte offset {offset} (line {line}, column {column}): {exc}",
            offset=offset,
        ) from exc

    topics: list[Topic] = []
    occurrences: list[Occurrence] = []
    seen_ids: set[str] = set()
    raw_associations = []

    for elem in root:
        kind = _local(elem.tag)
        if kind == "topic":
            topic_id = elem.get("id")
            if topic_id is None:
                continue
            if topic_id in seen_ids:
                raise ValidationError(f"topic id collision: {topic_id!r}")
            seen_ids.add(topic_id)
            name = _first_topic_name(elem)
            if name is None:
                name = normalize_label(topic_id)
            if not name:
                raise ValidationError(f"topic {topic_id!r} has an empty name")
            topics.append(Topic(id=topic_id, name=name))
            occurrences.extend(_topic_occurrences(elem, topic_id))
        elif kind == "association":
            raw_associations.append(elem)

    names = {t.id: t.name for t in topics}
    associations = [
        assoc
        for elem in raw_associations
        if (assoc := _parse_association(elem, names)) is not None
    ]
    return TopicMapDoc(
        doc_id=doc_id, topics=topics, associations=associations, occurrences=occurrences
    )


def _first_topic_name(topic_elem: ET.Element) -> str | None:
    for child in topic_elem:
        if _local(child.tag) != "topicName":
            continue
        for part in child:
            if _local(part.tag) == "value":
                return normalize_label(part.text or "")
        return normalize_label(child.text or "")
    return None


def _topic_occurrences(topic_elem: ET.Element, topic_id: str) -> list[Occurrence]:
    found = []
    for child in topic_elem:
        if _local(child.tag) != "occurrence":
            continue
        for part in child:
            if _local(part.tag) == "resourceData":
                found.append(Occurrence(topic=topic_id, value=part.text or ""))
    return found


def _type_label(elem: ET.Element, names: dict[str, str]) -> str:
    for child in elem:
        if _local(child.tag) == "type":
            for ref in child:
                if _local(ref.tag) == "topicRef":
                    frag = _ref_fragment(ref.get("href", ""))
                    return names.get(frag, normalize_label(frag))
    return ""


def _parse_association(elem: ET.Element, names: dict[str, str]) -> Association | None:
    assoc_type = _type_label(elem, names)
    roles: list[tuple[str, str]] = []
    for child in elem:
        if _local(child.tag) != "role":
            continue
        role_type = _type_label(child, names)
        member = None
        for ref in child:
            if _local(ref.tag) == "topicRef":
                member = _ref_fragment(ref.get("href", ""))
        if member is not None:
            roles.append((role_type, member))
    if len(roles) != 2:
        return None
    for _, member in roles:
        if member not in names:
            raise ValidationError(
                f"association role references unknown topic {member!r}"
            )
    parts = assoc_type.split("-")
    role_types = [rt for rt, _ in roles]
    if len(parts) >= 2 and parts[0] in role_types and parts[-1] in role_types and parts[0] != parts[-1]:
        parent = next(m for rt, m in roles if rt == parts[0])
        child = next(m for rt, m in roles if rt == parts[-1])
    else:
        parent, child = roles[0][1], roles[1][1]
    if parent == child:
        return None
    return Association(assoc_type=assoc_type, parent_role=parent, child_role=child)


def serialize_xtm(doc: TopicMapDoc) -> bytes:
    """Emit the supported XTM subset; parse(serialize(d)) == d on retained fields."""
    root = ET.Element("topicMap", {"xmlns": "http://www.topicmaps.org/xtm/", "version": "2.0"})
    occs_by_topic: dict[str, list[Occurrence]] = {}
    for occ in doc.occurrences:
        occs_by_topic.setdefault(occ.topic, []).append(occ)
    for topic in doc.topics:
        t_el = ET.SubElement(root, "topic", {"id": topic.id})
        name_el = ET.SubElement(t_el, "topicName")
        ET.SubElement(name_el, "value").text = topic.name
        for occ in occs_by_topic.get(topic.id, []):
            o_el = ET.SubElement(t_el, "occurrence")
            ET.SubElement(o_el, "resourceData").text = occ.value
    for assoc in doc.associations:
        a_el = ET.SubElement(root, "association")
        type_el = ET.SubElement(a_el, "type")
        ET.SubElement(type_el, "topicRef", {"href": f"#{assoc.assoc_type}"})
        parts = assoc.assoc_type.split("-")
        if len(parts) >= 2 and parts[0] != parts[-1]:
            role_labels = (parts[0], parts[-1])
        else:
            role_labels = ("parent", "child")
        for role_label, member in zip(role_labels, (assoc.parent_role, assoc.child_role)):
            r_el = ET.SubElement(a_el, "role")
            rt_el = ET.SubElement(r_el, "type")
            ET.SubElement(rt_el, "topicRef", {"href": f"#{role_label}"})
            ET.SubElement(r_el, "topicRef", {"href": f"#{member}"})
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def derive_forest(
    doc: TopicMapDoc,
    hierarchical_types: frozenset[str] | set[str] = DEFAULT_HIERARCHICAL_TYPES,
) -> TopicForest:
    """Build the document's ordered topic forest.

    Associations whose type is in `hierarchical_types` induce parent->child
    edges.  A child keeps only the edge from its lexicographically smallest
    parent label; remaining edges are applied in sorted (parent, child)
    label order and any edge that would close a cycle is skipped.  Topics
    left without a parent hang off the synthetic root.  Sibling lists are
    sorted by label.
    """
    names = doc.topic_names()
    edges: set[tuple[str, str]] = set()
    for assoc in doc.associations:
        if assoc.assoc_type in hierarchical_types:
            edges.add((assoc.parent_role, assoc.child_role))

    # One parent per child: smallest (parent label, parent id) wins.
    by_child: dict[str, list[tuple[str, str]]] = {}
    for parent, child in edges:
        by_child.setdefault(child, []).append((parent, child))
    chosen = [
        min(cands, key=lambda e: (names[e[0]], e[0]))
        for cands in by_child.values()
    ]
    chosen.sort(key=lambda e: (names[e[0]], names[e[1]], e[0], e[1]))

    parent_of: dict[str, str] = {}
    for parent, child in chosen:
        ancestor = parent
        cyclic = False
        while ancestor is not None:
            if ancestor == child:
                cyclic = True
                break
            ancestor = parent_of.get(ancestor)
        if not cyclic:
            parent_of[child] = parent

    nodes = {t.id: TopicNode(label=t.name) for t in doc.topics}
    child_ids: dict[str | None, list[str]] = {}
    for topic in doc.topics:
        child_ids.setdefault(parent_of.get(topic.id), []).append(topic.id)

    root = TopicNode(label=DOC_ROOT_LABEL)

    def attach(parent_node: TopicNode, key: str | None) -> None:
        ids = sorted(child_ids.get(key, []), key=lambda i: (names[i], i))
        for topic_id in ids:
            node = nodes[topic_id]
            parent_node.children.append(node)
            attach(node, topic_id)

    attach(root, None)
    return TopicForest(doc_id=doc.doc_id, root=root)


def sort_forest(forest: TopicForest) -> TopicForest:
    """Re-sort every sibling list by label (stable), in place."""
    for node in iter_bfs(forest.root):
        node.children.sort(key=lambda c: c.label)
    return forest


def validate_forest(forest: TopicForest) -> None:
    """Raise ValidationError unless the forest meets its invariants."""
    if forest.root.label != DOC_ROOT_LABEL:
        raise ValidationError(
            f"forest root of {forest.doc_id!r} is labeled {forest.root.label!r}"
        )
    seen: set[int] = set()
    for node in iter_bfs(forest.root):
        if id(node) in seen:
            raise ValidationError(f"forest of {forest.doc_id!r} is not a tree")
        seen.add(id(node))
        labels = [c.label for c in node.children]
        if labels != sorted(labels):
            raise ValidationError(
                f"unsorted sibling labels {labels!r} in forest of {forest.doc_id!r}"
            )


def forest_to_json(forest: TopicForest) -> dict:
    """JSON tree fixture form: {"label": str, "children": [...]}."""

    def convert(node: TopicNode) -> dict:
        return {"label": node.label, "children": [convert(c) for c in node.children]}

    return convert(forest.root)


def forest_from_json(doc_id: str, obj: dict) -> TopicForest:
    """Load the JSON tree fixture form, canonicalizing sibling order."""

    def convert(item: dict) -> TopicNode:
        if not isinstance(item, dict) or "label" not in item:
            raise ValidationError(f"bad tree node in fixture for {doc_id!r}: {item!r}")
        children = [convert(c) for c in item.get("children", [])]
        return TopicNode(label=str(item["label"]), children=children)

    root = convert(obj)
    if root.label != DOC_ROOT_LABEL:
        raise ValidationError(
            f"tree fixture for {doc_id!r} must be rooted at {DOC_ROOT_LABEL!r}, "
            f"got {root.label!r}"
        )
    return sort_forest(TopicForest(doc_id=doc_id, root=root))


def dump_tree(forest: TopicForest) -> str:
    """Indented debug dump, one `depth*2 spaces + label` line per node."""
    lines: list[str] = []

    def walk(node: TopicNode, depth: int) -> None:
        lines.append(" " * (2 * depth) + node.label)
        for child in node.children:
            walk(child, depth + 1)

    walk(forest.root, 0)
    return "\n".join(lines) + "\n"
