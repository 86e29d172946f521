"""Heuristic rules: raising verbs, coordination, relation propagation, assertedness."""

from __future__ import annotations

from enum import Enum

from .graph import NodeKind
from .workgraph import WNode, WorkGraph

# Relations a predicate holds towards a SameAs argument that get copied to the other side.
SAMEAS_PROPAGATED = ("subj", "dobj", "iobj", "comp", "prep", "time")
SHARED_ARG_LABELS = ("subj", "dobj", "iobj", "comp", "prop_of", "time")


class CoordinationKind(str, Enum):
    DISTRIBUTIVE = "distributive"
    JOINT = "joint"


def H1_raising(g: WorkGraph, cfg) -> None:
    for e in list(g.edges):
        if e.label != "comp" or e.dep != "xcomp" or e not in g.edges:
            continue
        verb, comp = g.nodes[e.src], g.nodes[e.dst]
        if verb.lemma.lower() not in cfg.raising_verbs or verb.kind is not NodeKind.PREDICATE:
            continue
        g.remove_edge(e)
        has_subject = bool(g.out(comp.id, "subj")) or any(
            x.dep == "nsubj" for x in g.out(comp.id, "prop_of"))
        for s in g.out(verb.id, "subj"):
            if has_subject:
                g.remove_edge(s)
            else:
                s.src, s.label = comp.id, "prop_of" if "adj" in comp.flags else "subj"
                has_subject = True
        g.redirect_incoming(verb.id, comp.id)
        g.move_outgoing(verb.id, comp.id, labels=("time",))
        g.add_edge(comp.id, verb.id, "source", dep="xcomp")
        verb.kind = NodeKind.NON_PREDICATE
        verb.flags.add("source")
        g.trace.log("H1", [verb.head, comp.head], f"raising verb {verb.lemma!r} -> source of {comp.lemma!r}")


def classify_coordination(g: WorkGraph, coord: WNode, cfg) -> CoordinationKind:
    if coord.kind is NodeKind.PREDICATE:
        return CoordinationKind.DISTRIBUTIVE
    for e in g.inn(coord.id):
        src = g.nodes[e.src]
        if e.label == "prop_of" and "copular" in src.flags and src.tag == "NN":
            return CoordinationKind.JOINT
        if src.lemma.lower() in cfg.collective_verbs and src.kind is NodeKind.PREDICATE:
            return CoordinationKind.JOINT
    return CoordinationKind.DISTRIBUTIVE


def H2_coordination(g: WorkGraph, cfg) -> None:
    for first in g.node_list():
        if first.id not in g.nodes or "coord" in first.flags:
            continue
        conj_edges = g.out(first.id, "conj")
        cc_edges = g.out(first.id, "cc")
        if not conj_edges:
            if cc_edges:
                g.trace.log("H2", [first.head], "coordinator without a second conjunct (warning)")
            continue
        if not cc_edges:
            g.trace.log("H2", [first.head], "conjuncts without a coordinator left as conj (warning)")
            continue
        coord = g.nodes[cc_edges[-1].dst]
        for extra in cc_edges:
            g.remove_edge(extra)
            if extra.dst != coord.id:
                g.absorb(coord.id, extra.dst)
        conjuncts = [first] + [g.nodes[e.dst] for e in conj_edges]
        for e in conj_edges:
            g.remove_edge(e)
        predicative = first.kind is NodeKind.PREDICATE
        coord.kind = NodeKind.PREDICATE if predicative else NodeKind.NON_PREDICATE
        coord.flags.add("coord")
        g.redirect_incoming(first.id, coord.id)
        if predicative:
            others = conjuncts[1:]
            last = max(c.first for c in others)
            for e in g.out(first.id):
                if e.label not in SHARED_ARG_LABELS:
                    continue
                if any(g.out(o.id, e.label) for o in others):
                    continue
                pos = g.nodes[e.dst].first
                if e.label in ("subj", "prop_of") or pos > last or pos < first.first:
                    e.src = coord.id
        for c in conjuncts:
            g.add_edge(coord.id, c.id, "conj", dep="conj")
        kind = classify_coordination(g, coord, cfg)
        coord.flags.add(kind.value)
        g.trace.log("H2", [coord.head] + [c.head for c in conjuncts],
                    f"{kind.value} coordination {coord.lemma!r} over {len(conjuncts)} conjuncts")


def _copy_predicate(g: WorkGraph, pred: WNode, old: str, new: str, via: str) -> WNode:
    copy = g.duplicate(pred.id, via)
    for e in g.out(pred.id):
        g.add_edge(copy.id, new if e.dst == old else e.dst, e.label, prep=e.prep, dep=e.dep,
                   propagated=True)
    return copy


def _propagate_coordination(g: WorkGraph, coord: WNode, budget: int) -> int:
    conjuncts = g.targets(coord.id, "conj")
    dups = []
    for e in g.inn(coord.id):
        src = g.nodes[e.src]
        if e.label == "conj" or src.kind is not NodeKind.PREDICATE or src.duplicate_of:
            continue
        if src.id not in [d.id for d in dups]:
            dups.append(src)
    edges = []
    if coord.kind is NodeKind.PREDICATE:
        for e in g.out(coord.id):
            if e.label == "conj":
                continue
            for c in conjuncts:
                if not g.has_edge(c.id, e.dst, e.label) and c.id != e.dst:
                    edges.append((c, e))
    cost = len(edges) + sum(len(g.out(p.id)) for p in dups) * len(conjuncts)
    if cost > budget:
        g.trace.log("H3", [coord.head], f"propagation of {cost} edges exceeds cap; skipped (warning)")
        return 0
    for c, e in edges:
        g.add_edge(c.id, e.dst, e.label, prep=e.prep, dep=e.dep, propagated=True)
    for p in dups:
        for c in conjuncts:
            _copy_predicate(g, p, coord.id, c.id, "conj")
    if cost:
        g.trace.log("H3", [coord.head], f"propagated {cost} edges over coordination")
    return cost


def _propagate_sameas(g: WorkGraph, sameas: WNode, budget: int) -> int:
    args = g.targets(sameas.id, "SameAs_arg")
    plan = []
    for a in args:
        for e in g.inn(a.id):
            src = g.nodes[e.src]
            if (e.label not in SAMEAS_PROPAGATED or e.propagated or src.duplicate_of
                    or src.kind is not NodeKind.PREDICATE):
                continue
            for b in args:
                if b.id != a.id and (src, a.id, b.id) not in plan:
                    plan.append((src, a.id, b.id))
    cost = sum(len(g.out(src.id)) for src, _, _ in plan)
    if cost > budget:
        g.trace.log("H3", [], f"SameAs propagation of {cost} edges exceeds cap; skipped (warning)")
        return 0
    via = "appos" if "appos" in sameas.flags else "sameas"
    for src, old, new in plan:
        _copy_predicate(g, src, old, new, via)
        g.trace.log("H3", [src.head], f"{src.lemma!r} duplicated across SameAs")
    return cost


def H3_propagate(g: WorkGraph, cfg) -> None:
    used = 0
    for node in g.node_list():
        if "coord" in node.flags and CoordinationKind.DISTRIBUTIVE.value in node.flags \
                and not node.duplicate_of:
            used += _propagate_coordination(g, node, cfg.propagation_cap - used)
    for node in g.node_list():
        if node.kind is NodeKind.SAMEAS:
            used += _propagate_sameas(g, node, cfg.propagation_cap - used)


def _assert(g: WorkGraph, node: WNode, why: str) -> None:
    if node.kind.evokes_proposition and not node.features.get("asserted"):
        node.features["asserted"] = True
        g.trace.log("H4", [node.head], f"asserted: {why}")


def H4_assertedness(g: WorkGraph, cfg) -> None:
    for node in g.node_list():
        if "nonrestrictive" in node.flags:
            _assert(g, node, "non-restrictive relative clause")
        if "appos" in node.flags:
            _assert(g, node, "apposition")
        if node.propagated_via == "appos":
            _assert(g, node, "propagated through apposition")
        if "conditional" in node.flags and node.lemma.lower() in cfg.asserting_markers:
            for target in g.targets(node.id, "condition", "outcome"):
                _assert(g, target, f"clause of {node.lemma!r}")
                if "coord" in target.flags:
                    for c in g.targets(target.id, "conj"):
                        _assert(g, c, f"conjunct under {node.lemma!r}")
