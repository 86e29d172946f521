"""Mutable graph the conversion rules rewrite in place.

Edges start out carrying Stanford relation names and are relabelled rule by
rule; :func:`propsconv.converter.finalize` freezes the result into a
:class:`~propsconv.graph.PropGraph`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .conll import DepTree, Token
from .graph import NodeKind

VERB_TAGS = frozenset({"VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "MD"})
ADJ_TAGS = frozenset({"JJ", "JJR", "JJS"})
NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS", "PRP", "CD"})
PROPER_TAGS = frozenset({"NNP", "NNPS"})
REL_PRONOUN_TAGS = frozenset({"WDT", "WP"})
PUNCT_TAGS = frozenset({",", ".", ":", "``", "''", "-LRB-", "-RRB-", "#", "$", "PUNCT"})


def tag_of(token: Token) -> str:
    return token.fine_pos if token.fine_pos not in ("", "_") else token.pos


class TraceRecord(NamedTuple):
    rule: str
    tokens: tuple[int, ...]
    description: str


class RuleTrace(list):
    """Append-only log of rule firings."""

    def log(self, rule: str, tokens: Iterable[int], description: str) -> None:
        self.append(TraceRecord(rule, tuple(sorted(t for t in tokens if t is not None)), description))

    def rules(self) -> list[str]:
        return [r.rule for r in self]


@dataclass
class WNode:
    id: str
    head: int | None
    content: list[int]
    span: set[int]
    kind: NodeKind
    tag: str = ""
    lemma: str = ""
    features: dict = field(default_factory=dict)
    flags: set = field(default_factory=set)
    text: str | None = None
    duplicate_of: str | None = None
    propagated_via: str | None = None

    @property
    def is_verb(self) -> bool:
        return self.tag in VERB_TAGS

    @property
    def is_adj(self) -> bool:
        return self.tag in ADJ_TAGS

    @property
    def is_noun(self) -> bool:
        return self.tag in NOUN_TAGS

    @property
    def first(self) -> int:
        return min(self.span) if self.span else 0


@dataclass
class WEdge:
    src: str
    dst: str
    label: str
    prep: str | None = None
    dep: str | None = None  # original Stanford relation
    propagated: bool = False


class WorkGraph:
    def __init__(self, tree: DepTree, trace: RuleTrace | None = None):
        self.tree = tree
        self.trace = trace if trace is not None else RuleTrace()
        self.nodes: dict[str, WNode] = {}
        self.edges: list[WEdge] = []
        self.root: str | None = None
        self._synthetic = 0
        for tok in tree.tokens:
            tag = tag_of(tok)
            kind = NodeKind.PREDICATE if tag in VERB_TAGS else NodeKind.NON_PREDICATE
            nid = f"t{tok.index}"
            self.nodes[nid] = WNode(nid, tok.index, [tok.index], {tok.index}, kind,
                                    tag=tag, lemma=tok.lemma)
        for arc in tree.arcs:
            if arc.head == 0:
                self.root = f"t{arc.dependent}"
            else:
                self.edges.append(WEdge(f"t{arc.head}", f"t{arc.dependent}", arc.relation,
                                        dep=arc.relation))

    # -- queries ------------------------------------------------------------
    def token(self, index: int) -> Token:
        return self.tree.token(index)

    def out(self, nid: str, *labels: str) -> list[WEdge]:
        return [e for e in self.edges if e.src == nid and (not labels or e.label in labels)]

    def inn(self, nid: str, *labels: str) -> list[WEdge]:
        return [e for e in self.edges if e.dst == nid and (not labels or e.label in labels)]

    def targets(self, nid: str, *labels: str) -> list[WNode]:
        return [self.nodes[e.dst] for e in self.out(nid, *labels)]

    def has_edge(self, src: str, dst: str, label: str) -> bool:
        return any(e.src == src and e.dst == dst and e.label == label for e in self.edges)

    def node_list(self) -> list[WNode]:
        return list(self.nodes.values())

    # -- mutation -----------------------------------------------------------
    def add_edge(self, src: str, dst: str, label: str, **kw) -> WEdge:
        edge = WEdge(src, dst, label, **kw)
        self.edges.append(edge)
        return edge

    def remove_edge(self, edge: WEdge) -> None:
        self.edges.remove(edge)

    def delete_node(self, nid: str) -> None:
        self.edges = [e for e in self.edges if e.src != nid and e.dst != nid]
        del self.nodes[nid]
        if self.root == nid:
            self.root = None

    def redirect_incoming(self, old: str, new: str, skip_from: Iterable[str] = ()) -> None:
        skip = set(skip_from) | {new}
        for e in self.edges:
            if e.dst == old and e.src not in skip:
                e.dst = new
        if self.root == old:
            self.root = new

    def move_outgoing(self, old: str, new: str, labels: Iterable[str] | None = None,
                      skip_to: Iterable[str] = ()) -> None:
        labels = set(labels) if labels is not None else None
        skip = set(skip_to) | {new}
        for e in self.edges:
            if e.src == old and e.dst not in skip and (labels is None or e.label in labels):
                e.src = new

    def absorb(self, keeper: str, other: str, content: bool = False) -> None:
        """Fold node ``other`` into ``keeper``: tokens join the span, edges re-point."""
        k, o = self.nodes[keeper], self.nodes[other]
        k.span |= o.span
        if content:
            k.content = sorted(set(k.content) | set(o.content))
        self.edges = [e for e in self.edges
                      if not ({e.src, e.dst} == {keeper, other})]
        for e in self.edges:
            if e.src == other:
                e.src = keeper
            if e.dst == other:
                e.dst = keeper
        if self.root == other:
            self.root = keeper
        del self.nodes[other]

    def new_synthetic(self, kind: NodeKind) -> WNode:
        self._synthetic += 1
        nid = f"s{self._synthetic}"
        node = WNode(nid, None, [], set(), kind)
        self.nodes[nid] = node
        return node

    def duplicate(self, nid: str, via: str) -> WNode:
        orig = self.nodes[nid]
        base = orig.duplicate_of or orig.id
        n = 1
        while f"{base}.d{n}" in self.nodes:
            n += 1
        copy = WNode(f"{base}.d{n}", orig.head, list(orig.content), set(orig.span), orig.kind,
                     tag=orig.tag, lemma=orig.lemma, features=dict(orig.features),
                     flags=set(orig.flags), text=orig.text, duplicate_of=base,
                     propagated_via=via)
        self.nodes[copy.id] = copy
        return copy
