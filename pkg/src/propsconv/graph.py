"""Proposition graphs: typed multi-word nodes, a closed label set, JSON and DOT."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Iterable

import jsonschema

FORMAT_VERSION = "1"


class RelationLabel(str, Enum):
    SUBJ = "subj"
    DOBJ = "dobj"
    IOBJ = "iobj"
    COMP = "comp"
    PREP = "prep"
    TIME = "time"
    PROP_OF = "prop_of"
    SAMEAS_ARG = "SameAs_arg"
    OUTCOME = "outcome"
    CONDITION = "condition"
    MOD = "mod"
    SOURCE = "source"
    POSS = "poss"
    CONJ = "conj"


LABELS = frozenset(label.value for label in RelationLabel)

# Labels that make their source node the head of a proposition.
PROPOSITION_LABELS = frozenset({"subj", "dobj", "iobj", "comp", "SameAs_arg",
                                "outcome", "condition", "prop_of"})


class NodeKind(str, Enum):
    PREDICATE = "Predicate"
    NON_PREDICATE = "NonPredicate"
    SAMEAS = "SyntheticSameAs"
    EXISTS = "SyntheticExists"

    @property
    def synthetic(self) -> bool:
        return self in (NodeKind.SAMEAS, NodeKind.EXISTS)

    @property
    def evokes_proposition(self) -> bool:
        return self is not NodeKind.NON_PREDICATE


SYNTHETIC_TEXT = {NodeKind.SAMEAS: "SameAs", NodeKind.EXISTS: "EXISTS"}

FEATURE_DOMAINS = {
    "tense": {"past", "present", "future"},
    "negated": bool,
    "modal": str,
    "definite": {"definite", "indefinite"},
    "passive": bool,
    "asserted": bool,
}
FEATURE_ORDER = ("tense", "modal", "negated", "passive", "definite", "asserted")


class GraphSchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class GraphStructureError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def feature_value_ok(key: str, value) -> bool:
    domain = FEATURE_DOMAINS.get(key)
    if domain is None:
        return False
    if domain is bool:
        return isinstance(value, bool)
    if domain is str:
        return isinstance(value, str) and bool(value)
    return value in domain


@dataclass(frozen=True)
class PropNode:
    id: str
    kind: NodeKind
    span: tuple[int, ...]
    text: str
    features: dict = field(default_factory=dict)
    duplicate_of: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", NodeKind(self.kind))
        object.__setattr__(self, "span", tuple(self.span))
        object.__setattr__(self, "features", dict(self.features))

    @property
    def first(self) -> int:
        return self.span[0] if self.span else 0


@dataclass(frozen=True, order=True)
class PropEdge:
    source: str
    target: str
    label: str
    prep: str | None = None
    propagated: bool = False

    @property
    def key(self) -> tuple:
        return (self.source, self.target, self.label, self.prep or "")


def _node_order(node: PropNode):
    return (node.first, node.id)


def _edge_order(edge: PropEdge):
    return (edge.source, edge.target, edge.label, edge.prep or "", edge.propagated)


@dataclass(frozen=True)
class PropGraph:
    """A directed proposition graph.  Nodes and edges are kept in canonical order."""

    sentence_id: str
    nodes: tuple[PropNode, ...] = ()
    edges: tuple[PropEdge, ...] = ()
    tokens: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=_node_order)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=_edge_order)))
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "_index", {n.id: n for n in self.nodes})

    def node(self, node_id: str) -> PropNode:
        return self._index[node_id]

    def __contains__(self, node_id) -> bool:
        return node_id in self._index

    def out_edges(self, node_id: str) -> list[PropEdge]:
        return [e for e in self.edges if e.source == node_id]

    def in_edges(self, node_id: str) -> list[PropEdge]:
        return [e for e in self.edges if e.target == node_id]

    def predicates(self) -> list[PropNode]:
        return [n for n in self.nodes if n.kind.evokes_proposition]

    def surface(self, indices: Iterable[int]) -> str:
        words = []
        for i in sorted(indices):
            if 1 <= i <= len(self.tokens):
                words.append(self.tokens[i - 1])
        return " ".join(words)


def check_graph(graph: PropGraph) -> list[str]:
    """Return the list of violated graph invariants (empty when valid)."""
    problems = []
    ids = [n.id for n in graph.nodes]
    if len(set(ids)) != len(ids):
        problems.append("duplicate node id")
    index = {n.id: n for n in graph.nodes}
    owner: dict[int, str] = {}
    for n in graph.nodes:
        if list(n.span) != sorted(set(n.span)):
            problems.append(f"node {n.id}: span not strictly increasing")
        if n.kind.synthetic != (not n.span):
            problems.append(f"node {n.id}: synthetic kind iff empty span violated")
        if n.kind.synthetic and n.text != SYNTHETIC_TEXT[n.kind]:
            problems.append(f"node {n.id}: synthetic node text must be {SYNTHETIC_TEXT[n.kind]!r}")
        for key, value in n.features.items():
            if not feature_value_ok(key, value):
                problems.append(f"node {n.id}: bad feature {key}={value!r}")
        if n.duplicate_of is not None:
            orig = index.get(n.duplicate_of)
            if orig is None:
                problems.append(f"node {n.id}: duplicate_of references unknown node {n.duplicate_of}")
            elif orig.span != n.span:
                problems.append(f"node {n.id}: duplicate_of span differs from {orig.id}")
            continue
        for i in n.span:
            if i in owner:
                problems.append(f"token {i} in spans of both {owner[i]} and {n.id}")
            owner[i] = n.id
    seen = set()
    for e in graph.edges:
        if e.label not in LABELS:
            problems.append(f"unknown relation label {e.label!r}")
        if e.source not in index or e.target not in index:
            problems.append(f"edge {e.source}->{e.target} references a missing node")
        if e.source == e.target:
            problems.append(f"self-loop on {e.source}")
        src = index.get(e.source)
        if src is not None and src.kind is NodeKind.NON_PREDICATE and e.label in PROPOSITION_LABELS:
            problems.append(f"non-predicate {e.source} has a {e.label} edge")
        if e.key in seen:
            problems.append(f"duplicate edge {e.key}")
        seen.add(e.key)
    return problems


# -- JSON -------------------------------------------------------------------

def graph_to_dict(graph: PropGraph) -> dict:
    nodes = []
    for n in graph.nodes:
        d = {"id": n.id, "kind": n.kind.value, "span": list(n.span), "text": n.text,
             "features": dict(n.features)}
        if n.duplicate_of is not None:
            d["duplicate_of"] = n.duplicate_of
        nodes.append(d)
    edges = []
    for e in graph.edges:
        d = {"source": e.source, "target": e.target, "label": e.label}
        if e.prep is not None:
            d["prep"] = e.prep
        if e.propagated:
            d["propagated"] = True
        edges.append(d)
    return {"format_version": FORMAT_VERSION, "sentence_id": graph.sentence_id,
            "tokens": list(graph.tokens), "nodes": nodes, "edges": edges}


def serialize_json(graph: PropGraph) -> str:
    return json.dumps(graph_to_dict(graph), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)


@lru_cache(maxsize=1)
def graph_schema() -> dict:
    text = resources.files("propsconv").joinpath("data/propgraph.schema.json").read_text("utf-8")
    return json.loads(text)


def _json_path(parts) -> str:
    path = "$"
    for p in parts:
        path += f"[{p}]" if isinstance(p, int) else f".{p}"
    return path


def graph_from_dict(data) -> PropGraph:
    validator = jsonschema.Draft202012Validator(graph_schema())
    errors = sorted(validator.iter_errors(data), key=lambda err: list(err.absolute_path))
    if errors:
        err = errors[0]
        raise GraphSchemaError(_json_path(err.absolute_path), err.message)
    nodes = [PropNode(n["id"], NodeKind(n["kind"]), tuple(n["span"]), n["text"],
                      n["features"], n.get("duplicate_of")) for n in data["nodes"]]
    edges = [PropEdge(e["source"], e["target"], e["label"], e.get("prep"),
                      e.get("propagated", False)) for e in data["edges"]]
    graph = PropGraph(data["sentence_id"], nodes, edges, data.get("tokens", ()))
    problems = check_graph(graph)
    if problems:
        raise GraphStructureError(problems)
    return graph


def deserialize_json(text: str) -> PropGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphSchemaError("$", f"invalid JSON: {exc}") from None
    return graph_from_dict(data)


# -- DOT --------------------------------------------------------------------

def feature_suffix(features: dict) -> list[str]:
    parts = []
    for key in FEATURE_ORDER:
        if key not in features:
            continue
        value = features[key]
        if key == "tense" or key == "definite":
            parts.append(value)
        elif key == "modal":
            parts.append(f"modal={value}")
        elif value is True:
            parts.append(key)
        else:
            parts.append(f"{key}={str(value).lower()}")
    return parts


def node_label(node: PropNode) -> str:
    parts = feature_suffix(node.features)
    return f"{node.text} [{', '.join(parts)}]" if parts else node.text


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(graph: PropGraph) -> str:
    lines = [f"digraph {_quote(graph.sentence_id)} {{", "  node [shape=box];"]
    for n in graph.nodes:
        attrs = [f"label={_quote(node_label(n))}"]
        if n.kind.evokes_proposition:
            attrs.append("style=filled")
            attrs.append('fillcolor="#d9d9d9"')
        if n.kind.synthetic:
            attrs.append("shape=ellipse")
        lines.append(f"  {_quote(n.id)} [{', '.join(attrs)}];")
    for e in graph.edges:
        label = f"{e.label}[{e.prep}]" if e.prep else e.label
        attrs = [f"label={_quote(label)}"]
        if e.propagated:
            attrs.append("style=dashed")
        lines.append(f"  {_quote(e.source)} -> {_quote(e.target)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
