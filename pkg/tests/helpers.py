"""Test oracles and random generators, written independently of the package internals."""

from __future__ import annotations

import random
from pathlib import Path

import networkx as nx
import yaml

from propsconv.conll import DepArc, DepTree, Token, parse_conll
from propsconv.graph import NodeKind, PropEdge, PropGraph, PropNode

DATA = Path(__file__).parent / "data"

LABELS = ["subj", "dobj", "iobj", "comp", "prep", "time", "prop_of", "SameAs_arg",
          "outcome", "condition", "mod", "source", "poss", "conj"]
ARG_LABELS = {"subj", "dobj", "iobj", "comp", "SameAs_arg", "outcome", "condition", "prop_of"}
FEATURE_CHOICES = {
    "tense": ["past", "present", "future"],
    "negated": [True, False],
    "modal": ["can", "must", "may"],
    "definite": ["definite", "indefinite"],
    "passive": [True, False],
    "asserted": [True, False],
}


# -- fixtures on disk -----------------------------------------------------------

def example_trees() -> dict[str, DepTree]:
    with open(DATA / "examples.conll", encoding="utf-8") as fh:
        return {t.sentence_id: t for t in parse_conll(fh)}


def expected_graphs() -> dict[str, dict]:
    with open(DATA / "examples_expected.yaml", encoding="utf-8") as fh:
        return yaml.safe_load(fh)


# -- brute-force metric oracle -----------------------------------------------------

def _span_of(graph: PropGraph, node: PropNode):
    if node.span:
        return tuple(node.span)
    targets = []
    for e in graph.edges:
        if e.source == node.id:
            t = graph.node(e.target)
            if t.span:
                targets.append(tuple(t.span))
    anchor = ",".join(str(i) for i in min(targets)) if targets else "-"
    return ("SYN:" + node.kind.value + ":" + anchor,)


def oracle_edges(graph: PropGraph) -> list:
    out = []
    for e in graph.edges:
        out.append((_span_of(graph, graph.node(e.source)), _span_of(graph, graph.node(e.target)), e.label))
    return out


def oracle_features(graph: PropGraph) -> list:
    out = []
    for n in graph.nodes:
        for k in n.features:
            out.append((_span_of(graph, n), k, n.features[k]))
    return out


def brute_overlap(gold: list, pred: list) -> int:
    """Multiset intersection size by pairing off equal items one at a time."""
    remaining = list(gold)
    hits = 0
    for item in pred:
        for i, other in enumerate(remaining):
            if other == item:
                del remaining[i]
                hits += 1
                break
    return hits


def oracle_scores(gold_graphs, pred_graphs, extract) -> tuple:
    from fractions import Fraction
    hits = n_gold = n_pred = 0
    for g, p in zip(gold_graphs, pred_graphs):
        eg, ep = extract(g), extract(p)
        hits += brute_overlap(eg, ep)
        n_gold += len(eg)
        n_pred += len(ep)
    if n_pred == 0:
        precision = Fraction(1) if n_gold == 0 else Fraction(0)
    else:
        precision = Fraction(hits, n_pred)
    if n_gold == 0:
        recall = Fraction(1) if n_pred == 0 else Fraction(0)
    else:
        recall = Fraction(hits, n_gold)
    return precision, recall


# -- random graphs -------------------------------------------------------------

def random_graph(rng: random.Random, sentence_id: str = "g") -> PropGraph:
    n_tokens = rng.randint(0, 12)
    words = [rng.choice(["dog", "ran", "the", "big", "house", "of", "Kim", "saw"]) for _ in range(n_tokens)]
    order = list(range(1, n_tokens + 1))
    rng.shuffle(order)
    nodes = []
    while order:
        size = min(len(order), rng.choice([1, 1, 1, 2, 3]))
        span = tuple(sorted(order[:size]))
        order = order[size:]
        if rng.random() < 0.2:
            continue  # leave some tokens unowned
        kind = rng.choice([NodeKind.PREDICATE, NodeKind.NON_PREDICATE])
        nodes.append(PropNode(f"n{len(nodes)}", kind, span, " ".join(words[i - 1] for i in span),
                              _random_features(rng)))
    for _ in range(rng.choice([0, 0, 1, 2])):
        kind = rng.choice([NodeKind.SAMEAS, NodeKind.EXISTS])
        nodes.append(PropNode(f"s{len(nodes)}", kind, (), "SameAs" if kind is NodeKind.SAMEAS else "EXISTS",
                              _random_features(rng)))
    for orig in [n for n in nodes if n.kind is NodeKind.PREDICATE and rng.random() < 0.2]:
        nodes.append(PropNode(f"{orig.id}.d1", orig.kind, orig.span, orig.text, dict(orig.features),
                              duplicate_of=orig.id))
    edges = {}
    if len(nodes) >= 2:
        for _ in range(rng.randint(0, 2 * len(nodes))):
            a, b = rng.sample(nodes, 2)
            label = rng.choice(LABELS)
            if a.kind is NodeKind.NON_PREDICATE and label in ARG_LABELS:
                label = rng.choice(["mod", "prep", "poss", "time", "conj", "source"])
            prep = rng.choice(["in", "of", "for"]) if label == "prep" and rng.random() < 0.7 else None
            edge = PropEdge(a.id, b.id, label, prep, rng.random() < 0.2)
            edges.setdefault((a.id, b.id, label, prep or ""), edge)
    return PropGraph(sentence_id, nodes, edges.values(), words)


def _random_features(rng: random.Random) -> dict:
    keys = rng.sample(sorted(FEATURE_CHOICES), rng.randint(0, 3))
    return {k: rng.choice(FEATURE_CHOICES[k]) for k in keys}


def perturb(rng: random.Random, graph: PropGraph) -> PropGraph:
    """A noisy copy of ``graph``: edges dropped/relabelled/added, features changed, a span shifted."""
    nodes = list(graph.nodes)
    if nodes and rng.random() < 0.3:
        i = rng.randrange(len(nodes))
        n = nodes[i]
        if n.span and n.duplicate_of is None and not any(m.duplicate_of == n.id for m in nodes):
            used = {t for m in nodes if m.duplicate_of is None for t in m.span}
            free = [t for t in range(1, len(graph.tokens) + 1) if t not in used]
            if free:
                nodes[i] = PropNode(n.id, n.kind, tuple(sorted(n.span + (rng.choice(free),))), n.text, n.features)
    nodes = [PropNode(n.id, n.kind, n.span, n.text,
                      _random_features(rng) if rng.random() < 0.3 else n.features, n.duplicate_of)
             for n in nodes]
    edges = {}
    kinds = {n.id: n.kind for n in nodes}
    for e in graph.edges:
        r = rng.random()
        if r < 0.15:
            continue
        if r < 0.3:
            label = rng.choice(LABELS)
            if kinds[e.source] is NodeKind.NON_PREDICATE and label in ARG_LABELS:
                label = "mod"
            e = PropEdge(e.source, e.target, label, e.prep if label == "prep" else None, e.propagated)
        edges.setdefault((e.source, e.target, e.label, e.prep or ""), e)
    if len(nodes) >= 2:
        for _ in range(rng.randint(0, 3)):
            a, b = rng.sample(nodes, 2)
            label = "mod" if a.kind is NodeKind.NON_PREDICATE else rng.choice(LABELS)
            edges.setdefault((a.id, b.id, label, ""), PropEdge(a.id, b.id, label))
    return PropGraph(graph.sentence_id, nodes, edges.values(), graph.tokens)


# -- random coordination trees ---------------------------------------------------

NAMES = ["Kim", "Pat", "Lee", "Sam", "Ana", "Raj", "Mei", "Tom"]
THINGS = [("apple", "apples"), ("book", "books"), ("car", "cars"), ("song", "songs")]
VERBS = [("see", "sees"), ("buy", "buys"), ("like", "likes"), ("read", "reads"), ("sell", "sells")]
ADJS = ["happy", "tall", "tired"]


class TreeBuilder:
    def __init__(self):
        self.rows: list[list] = []

    def add(self, form, lemma, tag, head=None, rel="dep") -> int:
        self.rows.append([form, lemma, tag, head, rel])
        return len(self.rows)

    def attach(self, dep: int, head: int, rel: str) -> None:
        self.rows[dep - 1][3] = head
        self.rows[dep - 1][4] = rel

    def tree(self, sentence_id: str) -> DepTree:
        tokens = [Token(i, f, l, t, t) for i, (f, l, t, _, _) in enumerate(self.rows, start=1)]
        arcs = [DepArc(h or 0, i, r) for i, (_, _, _, h, r) in enumerate(self.rows, start=1)]
        return DepTree(sentence_id, tokens, arcs)


def random_coordination_tree(rng: random.Random, sentence_id: str) -> DepTree:
    """Sentences with at least one coordination: subjects, objects or verbs (2-3 conjuncts)."""
    b = TreeBuilder()
    slot = rng.choice(["subj", "obj", "verb", "collective", "copular_noun", "copular_adj"])

    def names(k):
        picked = rng.sample(NAMES, k)
        ids = []
        for i, name in enumerate(picked):
            if i and i == k - 1:
                b.add("and", "and", "CC")
                ids.append(("cc", len(b.rows)))
            elif i:
                b.add(",", ",", ",")
                ids.append(("punct", len(b.rows)))
            ids.append(("item", b.add(name, name, "NNP")))
        return _wire(b, ids)

    def things(k):
        picked = rng.sample(THINGS, k)
        ids = []
        for i, (lemma, plural) in enumerate(picked):
            if i and i == k - 1:
                b.add("and", "and", "CC")
                ids.append(("cc", len(b.rows)))
            elif i:
                b.add(",", ",", ",")
                ids.append(("punct", len(b.rows)))
            ids.append(("item", b.add(plural, lemma, "NNS")))
        return _wire(b, ids)

    k = rng.choice([2, 2, 3])
    if slot in ("subj", "obj", "verb"):
        subj = names(k if slot == "subj" else 1)
        if slot != "subj" and rng.random() < 0.4:  # appositive: "Kim , the teacher ,"
            c1 = b.add(",", ",", ",")
            det = b.add("the", "the", "DT")
            noun = b.add("teacher", "teacher", "NN")
            c2 = b.add(",", ",", ",")
            b.attach(det, noun, "det")
            b.attach(noun, subj, "appos")
            b.attach(c1, subj, "punct")
            b.attach(c2, subj, "punct")
        if slot == "verb":
            picked = rng.sample(VERBS, k)
            ids = []
            for i, (lemma, form) in enumerate(picked):
                if i and i == k - 1:
                    b.add("and", "and", "CC")
                    ids.append(("cc", len(b.rows)))
                elif i:
                    b.add(",", ",", ",")
                    ids.append(("punct", len(b.rows)))
                ids.append(("item", b.add(form, lemma, "VBZ")))
            verb = _wire(b, ids)
        else:
            lemma, form = rng.choice(VERBS)
            verb = b.add(form if slot != "subj" else lemma, lemma, "VBZ" if slot != "subj" else "VBP")
        obj = things(k if slot == "obj" else 1)
        b.attach(subj, verb, "nsubj")
        b.attach(obj, verb, "dobj")
        root = verb
    elif slot == "collective":
        subj = names(k)
        root = b.add("met", "meet", "VBD")
        b.attach(subj, root, "nsubj")
    else:
        subj = names(k)
        cop = b.add("are", "be", "VBP")
        if slot == "copular_noun":
            det = b.add("a", "a", "DT")
            root = b.add("team", "team", "NN")
            b.attach(det, root, "det")
        else:
            adj = rng.choice(ADJS)
            root = b.add(adj, adj, "JJ")
        b.attach(subj, root, "nsubj")
        b.attach(cop, root, "cop")
    period = b.add(".", ".", ".")
    b.attach(period, root, "punct")
    b.attach(root, 0, "root")
    return b.tree(sentence_id)


def _wire(b: TreeBuilder, ids: list[tuple[str, int]]) -> int:
    head = ids[0][1]
    for role, idx in ids[1:]:
        b.attach(idx, head, {"item": "conj", "cc": "cc", "punct": "punct"}[role])
    return head


# -- graph comparison ------------------------------------------------------------

def to_nx(graph: PropGraph, spans: bool = True, features: bool = True) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    for n in graph.nodes:
        attrs = {"kind": n.kind.value, "text": n.text, "dup": n.duplicate_of is not None}
        if spans:
            attrs["span"] = tuple(n.span)
        if features:
            attrs["features"] = tuple(sorted(n.features.items()))
        g.add_node(n.id, **attrs)
    for e in graph.edges:
        g.add_edge(e.source, e.target, label=e.label, prep=e.prep or "")
    return g


def isomorphic(a: PropGraph, b: PropGraph, spans: bool = True, features: bool = True) -> bool:
    def same(x, y):
        return x == y

    def same_edges(x, y):
        return sorted((d["label"], d["prep"]) for d in x.values()) == \
            sorted((d["label"], d["prep"]) for d in y.values())

    return nx.is_isomorphic(to_nx(a, spans, features), to_nx(b, spans, features),
                            node_match=same, edge_match=same_edges)


def graph_from_expected(sentence_id: str, expected: dict, tokens=()) -> PropGraph:
    nodes = []
    for nid, row in expected["nodes"].items():
        kind, span, text, feats = row[:4]
        dup = row[4] if len(row) > 4 else None
        nodes.append(PropNode(nid, NodeKind(kind), tuple(span), text, feats or {}, dup))
    edges = [PropEdge(src, dst, label, row[0] if row else None)
             for src, label, dst, *row in expected["edges"]]
    return PropGraph(sentence_id, nodes, edges, tokens)


# -- acceptance bookkeeping ------------------------------------------------------

ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


class criterion:
    """Context manager recording a PASS/FAIL line for an acceptance criterion."""

    def __init__(self, number: int, title: str, note: str = ""):
        self.number, self.title, self.note = number, title, note

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        line = f"criterion {self.number}: {status} - {self.title}"
        if self.note:
            line += f" ({self.note})"
        ACCEPTANCE_RESULTS[self.number] = (status, line)
        print(line)
        return False


def compact_tree(sentence_id: str, text: str) -> DepTree:
    """Build a tree from lines of ``form lemma TAG head rel``."""
    b = TreeBuilder()
    for line in text.strip().splitlines():
        form, lemma, tag, head, rel = line.split()
        b.add(form, lemma, tag, int(head), rel)
    return b.tree(sentence_id)
