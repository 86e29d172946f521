"""Flatten a proposition graph into a numbered list of propositions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graph import PROPOSITION_LABELS, NodeKind, PropEdge, PropGraph, PropNode

# Arguments that point at another predicate and become "(n)" references.
NESTING_LABELS = frozenset({"comp", "condition", "outcome", "conj"})
# Arguments rendered without a "label=" prefix in the canonical form.
BARE_LABELS = frozenset({"subj", "prop_of", "dobj", "iobj", "SameAs_arg", "comp", "prep"})
ARG_ORDER = ("subj", "prop_of", "dobj", "iobj", "SameAs_arg", "comp", "condition", "outcome",
             "prep", "time", "mod", "source", "poss", "conj")


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class Argument:
    label: str
    node_id: str
    text: str
    prep: str | None = None
    ref: int | None = None  # proposition id when the argument is a nested proposition

    @property
    def rendered(self) -> str:
        return f"({self.ref})" if self.ref is not None else self.text


@dataclass(frozen=True)
class Proposition:
    id: int
    node_id: str
    predicate: str
    kind: NodeKind
    args: tuple[Argument, ...] = field(default_factory=tuple)
    asserted: bool = False

    def to_dict(self) -> dict:
        return {"id": self.id, "node": self.node_id, "predicate": self.predicate,
                "kind": self.kind.value, "asserted": self.asserted,
                "args": [{"label": a.label, "node": a.node_id, "text": a.text,
                          **({"prep": a.prep} if a.prep else {}),
                          **({"ref": a.ref} if a.ref is not None else {})} for a in self.args]}


def _arg_key(graph: PropGraph, edge: PropEdge):
    return (ARG_ORDER.index(edge.label), graph.node(edge.target).first, edge.target, edge.prep or "")


def bound_span(graph: PropGraph, node_id: str, exclude: str) -> set[int]:
    """Tokens of ``node_id`` plus its modifiers, skipping ``exclude``.

    A predicate's own arguments are only pulled in when that predicate was
    reached through a ``mod`` edge, i.e. when it is a restrictive modifier.
    """
    seen, stack, tokens = {exclude, node_id}, [(node_id, False)], set()
    while stack:
        current, via_mod = stack.pop()
        node = graph.node(current)
        tokens.update(node.span)
        for e in graph.out_edges(current):
            if e.target in seen:
                continue
            if (node.kind.evokes_proposition and not via_mod
                    and e.label in PROPOSITION_LABELS):
                continue
            seen.add(e.target)
            stack.append((e.target, e.label == "mod"))
    return tokens


def _argument_text(graph: PropGraph, target: PropNode, exclude: str) -> str:
    if target.kind.synthetic:
        return target.text
    tokens = bound_span(graph, target.id, exclude)
    return graph.surface(tokens) if graph.tokens else target.text


def _order_key(graph: PropGraph, node: PropNode):
    if node.kind.synthetic:
        edges = sorted(graph.out_edges(node.id), key=lambda e: _arg_key(graph, e))
        first = graph.node(edges[0].target).first if edges else 0
        return (first, node.id)
    return (node.first, node.id)


def _check_acyclic(graph: PropGraph, predicates: list[PropNode]) -> None:
    children = {p.id: [e.target for e in graph.out_edges(p.id)
                       if e.label in NESTING_LABELS and graph.node(e.target).kind.evokes_proposition]
                for p in predicates}
    state: dict[str, int] = {}

    def visit(nid: str) -> None:
        state[nid] = 1
        for child in children.get(nid, ()):
            if state.get(child) == 1:
                raise ExtractionError(f"cyclic proposition nesting through {nid} -> {child}")
            if child not in state:
                visit(child)
        state[nid] = 2

    for p in predicates:
        if p.id not in state:
            visit(p.id)


def enumerate_propositions(graph: PropGraph) -> list[Proposition]:
    predicates = sorted(graph.predicates(), key=lambda n: _order_key(graph, n))
    _check_acyclic(graph, predicates)
    ids = {p.id: i for i, p in enumerate(predicates, start=1)}
    props = []
    for p in predicates:
        args = []
        for e in sorted(graph.out_edges(p.id), key=lambda e: _arg_key(graph, e)):
            target = graph.node(e.target)
            ref = ids[target.id] if (e.label in NESTING_LABELS
                                     and target.kind.evokes_proposition) else None
            args.append(Argument(e.label, target.id, _argument_text(graph, target, p.id),
                                 e.prep, ref))
        props.append(Proposition(ids[p.id], p.id, p.text, p.kind, tuple(args),
                                 bool(p.features.get("asserted"))))
    return props


def _canonical_arg(a: Argument) -> str:
    if a.label in BARE_LABELS:
        return a.rendered
    return f"{a.label}={a.rendered}"


def _pretty(p: Proposition) -> str | None:
    if p.kind is NodeKind.SAMEAS:
        sides = [a.rendered for a in p.args if a.label == "SameAs_arg"]
        if len(sides) == 2:
            return f"{sides[0]} is {sides[1]}"
    outcome = [a.rendered for a in p.args if a.label == "outcome"]
    condition = [a.rendered for a in p.args if a.label == "condition"]
    if len(outcome) == 1 and len(condition) == 1:
        marker = "because of" if p.predicate == "because" else p.predicate
        return f"{outcome[0]} happens {marker} {condition[0]}"
    return None


def render_proposition(p: Proposition, pretty: bool = False) -> str:
    body = _pretty(p) if pretty else None
    if body is None:
        body = f"{p.predicate}({', '.join(_canonical_arg(a) for a in p.args)})"
    return f"{body} [asserted]" if p.asserted else body


def render_listing(props: list[Proposition], pretty: bool = False) -> str:
    return "".join(f"({p.id}) {render_proposition(p, pretty)}\n" for p in props)


def propositions_jsonl(sentence_id: str, props: list[Proposition]) -> str:
    record = {"sentence_id": sentence_id, "propositions": [p.to_dict() for p in props]}
    return json.dumps(record, sort_keys=True, ensure_ascii=False)
