"""Rule-based conversion of Stanford dependency trees into proposition graphs.

The pipeline runs a fixed sequence of rewrite rules over a :class:`WorkGraph`:

    M1 merge multi-word nodes      U1 adjectival predication     C1 verbal arguments
    M2 fold function words         U2 SameAs / EXISTS nodes      C2 adjectival complements
    M3 definiteness                U3 conditionals               C4 modification boundaries

followed by the heuristics H1-H4 (see :mod:`propsconv.heuristics`) and
:func:`finalize`, which maps leftover Stanford labels onto the closed label
set and checks every graph invariant before a :class:`PropGraph` is emitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import heuristics
from .conll import DepTree
from .graph import (LABELS, PROPOSITION_LABELS, SYNTHETIC_TEXT, NodeKind, PropEdge,
                    PropGraph, PropNode, check_graph, feature_value_ok)
from .lexicons import (ASSERTING, COLLECTIVE, CONDITIONAL, RAISING, TIME, load_lexicon)
from .workgraph import (PROPER_TAGS, PUNCT_TAGS, REL_PRONOUN_TAGS, RuleTrace, WNode,
                        WorkGraph)

DEFINITE_DETS = frozenset({"the", "this", "that", "these", "those"})
INDEFINITE_DETS = frozenset({"a", "an", "some"})
FUTURE_AUX = frozenset({"will", "shall", "wo", "'ll", "ll"})
SUBJECT_DEPS = ("nsubj", "nsubjpass", "csubj", "csubjpass")

RULES = ("M1", "M2", "M3", "U1", "U2", "U3", "C1", "C2", "C4", "H1", "H2", "H3", "H4")
FAMILIES = {
    "masking": ("M1", "M2", "M3"),
    "predication": ("U1", "U2", "U3"),
    "canonicalization": ("C1", "C2"),
    "boundaries": ("C4",),
    "heuristics": ("H1", "H2", "H3", "H4"),
}


class ConversionError(RuntimeError):
    """The pipeline produced a graph that breaks an invariant."""

    def __init__(self, message: str, trace: RuleTrace | None = None):
        super().__init__(message)
        self.trace = trace


def _lexicon(name):
    return field(default_factory=lambda: load_lexicon(name))


@dataclass(frozen=True)
class ConverterConfig:
    raising_verbs: frozenset = _lexicon(RAISING)
    collective_verbs: frozenset = _lexicon(COLLECTIVE)
    asserting_markers: frozenset = _lexicon(ASSERTING)
    conditional_markers: frozenset = _lexicon(CONDITIONAL)
    time_words: frozenset = _lexicon(TIME)
    masking: bool = True
    predication: bool = True
    canonicalization: bool = True
    boundaries: bool = True
    heuristics: bool = True
    disabled_rules: frozenset = frozenset()
    propagation_cap: int = 64

    @classmethod
    def from_lexicon_dir(cls, lexicon_dir=None, **overrides) -> "ConverterConfig":
        lex = dict(raising_verbs=load_lexicon(RAISING, lexicon_dir),
                   collective_verbs=load_lexicon(COLLECTIVE, lexicon_dir),
                   asserting_markers=load_lexicon(ASSERTING, lexicon_dir),
                   conditional_markers=load_lexicon(CONDITIONAL, lexicon_dir),
                   time_words=load_lexicon(TIME, lexicon_dir))
        lex.update(overrides)
        return cls(**lex)

    def enabled(self, rule: str) -> bool:
        for family, members in FAMILIES.items():
            if rule in members and not getattr(self, family):
                return False
        return rule not in self.disabled_rules


def normalize_rule_names(names: Iterable[str]) -> tuple[frozenset, set]:
    """Split user-supplied names into (individual rules, disabled families)."""
    rules, families = set(), set()
    lookup = {fn.__name__.lower(): short for short, fn in PIPELINE}
    for raw in names:
        name = raw.strip()
        if not name:
            continue
        if name.lower() in FAMILIES:
            families.add(name.lower())
        elif name.upper() in RULES:
            rules.add(name.upper())
        elif name.lower() in lookup:
            rules.add(lookup[name.lower()])
        else:
            raise ValueError(f"unknown rule or rule family {raw!r}")
    return frozenset(rules), families


# -- shared predicates --------------------------------------------------------

def inherently_definite(node: WNode) -> bool:
    """Proper names and personal pronouns pick out their referent on their own."""
    return node.tag in PROPER_TAGS or node.tag == "PRP"


def definite_like(node: WNode) -> bool:
    if node.features.get("definite") == "definite" or node.tag == "PRP":
        return True
    # bare singular role nouns ("head of marketing") read as definite descriptions
    return node.tag in ("NN", "NNP", "NNPS") and "definite" not in node.features


def is_equivalence(x: WNode, y: WNode) -> bool:
    return x.is_noun and y.is_noun and definite_like(x) and definite_like(y)


def _subject_edges(g: WorkGraph, nid: str):
    return g.out(nid, *SUBJECT_DEPS)


def _resolve_rel_pronoun(g: WorkGraph, pred: WNode, target: WNode) -> WNode:
    """For a relative clause, stand the modified noun in for a relative-pronoun subject."""
    if target.tag in REL_PRONOUN_TAGS:
        gov = g.inn(pred.id, "rcmod")
        if gov:
            return g.nodes[gov[0].src]
    return target


# -- masking --------------------------------------------------------------------

def M1_merge_multiword(g: WorkGraph, cfg: ConverterConfig) -> None:
    merge = ("nn", "mwe", "prt")
    while True:
        ready = [e for e in g.edges if e.label in merge and not g.out(e.dst, *merge)]
        if not ready:
            return
        e = ready[0]
        head, dep = g.nodes[e.src], g.nodes[e.dst]
        g.remove_edge(e)
        g.trace.log("M1", [head.head, dep.head], f"merge {e.label} dependent {dep.lemma!r} into {head.lemma!r}")
        g.absorb(head.id, dep.id, content=True)


def _collapse_going_to(g: WorkGraph, node: WNode) -> None:
    if node.lemma.lower() != "go" or node.tag != "VBG":
        return
    if not any(g.nodes[e.dst].lemma.lower() == "be" for e in g.out(node.id, "aux")):
        return
    for e in g.out(node.id, "xcomp"):
        verb = g.nodes[e.dst]
        if any(g.nodes[a.dst].tag == "TO" for a in g.out(verb.id, "aux")):
            g.remove_edge(e)
            verb.flags.add("future")
            g.trace.log("M2", [node.head, verb.head], f"going to + {verb.lemma!r} -> future")
            g.absorb(verb.id, node.id)
            return


def _tense_of(g: WorkGraph, indices: list[int], feats: dict) -> None:
    for i in sorted(indices):
        tok = g.token(i)
        tag = tok.fine_pos if tok.fine_pos not in ("", "_") else tok.pos
        lemma = tok.lemma.lower()
        if tag == "MD" or lemma in FUTURE_AUX:
            if lemma in FUTURE_AUX:
                feats["tense"] = "future"
            else:
                feats["modal"] = lemma
            return
        if tag == "VBD":
            feats["tense"] = "past"
            return
        if tag in ("VBZ", "VBP"):
            feats["tense"] = "present"
            return


def M2_extract_features(g: WorkGraph, cfg: ConverterConfig) -> None:
    for node in g.node_list():
        if node.id in g.nodes:
            _collapse_going_to(g, node)
    for node in g.node_list():
        if node.id not in g.nodes:
            continue
        edges = g.out(node.id, "aux", "auxpass", "neg", "cop")
        group = []
        for e in edges:
            child = g.nodes[e.dst]
            if e.label == "neg":
                node.features["negated"] = True
            else:
                group.append(child.head)
                if e.label == "auxpass":
                    node.features["passive"] = True
                elif e.label == "cop":
                    node.flags.add("copular")
            g.trace.log("M2", [node.head, child.head], f"fold {e.label} {child.lemma!r} into features")
            g.absorb(node.id, child.id)
        if node.is_verb:
            group.append(node.head)
        if "future" in node.flags:
            node.features["tense"] = "future"
        elif group:
            _tense_of(g, group, node.features)


def M3_assign_definiteness(g: WorkGraph, cfg: ConverterConfig) -> None:
    for node in g.node_list():
        dets = g.out(node.id, "det", "predet")
        for e in dets:
            det = g.nodes[e.dst]
            lemma = det.lemma.lower()
            if lemma in DEFINITE_DETS:
                node.features["definite"] = "definite"
            elif lemma in INDEFINITE_DETS:
                node.features["definite"] = "indefinite"
            g.trace.log("M3", [node.head, det.head], f"determiner {lemma!r}")
            g.absorb(node.id, det.id)
        for e in g.out(node.id, "possessive"):
            g.absorb(node.id, e.dst)
        if not dets and node.tag in PROPER_TAGS:
            node.features["definite"] = "definite"


# -- uniform predication ------------------------------------------------------

def _make_adjectival(node: WNode) -> None:
    node.kind = NodeKind.PREDICATE
    node.flags.add("adj")


def U1_adjectival_predication(g: WorkGraph, cfg: ConverterConfig) -> None:
    for e in list(g.edges):
        if e.label != "amod":
            continue
        noun, adj = g.nodes[e.src], g.nodes[e.dst]
        if adj.tag in ("JJR", "JJS"):
            # comparatives need a standard of comparison; keep them as plain modifiers
            e.label = "mod"
            g.trace.log("U1", [adj.head], f"comparative {adj.lemma!r} kept as modifier")
            continue
        _make_adjectival(adj)
        g.add_edge(adj.id, noun.id, "prop_of", dep="amod")
        g.trace.log("U1", [adj.head, noun.head], f"{adj.lemma}({noun.lemma})")

    for node in g.node_list():
        if "copular" in node.flags:
            subj = _subject_edges(g, node.id)
            if node.is_noun and subj:
                arg = _resolve_rel_pronoun(g, node, g.nodes[subj[0].dst])
                if is_equivalence(arg, node):
                    node.flags.add("sameas")
                    continue
            _make_adjectival(node)
            for s in subj:
                s.label = "prop_of"
                g.trace.log("U1", [node.head], f"copular predication {node.lemma!r}")
            continue
        # passive participle relative clause: "the pipe which was broken"
        if (node.tag == "VBN" and node.features.get("passive") and g.inn(node.id, "rcmod")
                and not g.out(node.id, "dobj", "iobj", "prep", "agent", "ccomp", "xcomp", "tmod")):
            subj = g.out(node.id, "nsubjpass")
            if subj and g.nodes[subj[0].dst].tag in REL_PRONOUN_TAGS:
                _make_adjectival(node)
                subj[0].label = "prop_of"
                g.trace.log("U1", [node.head], f"participial relative {node.lemma!r} as adjective")

    for e in list(g.edges):
        if e.label != "appos":
            continue
        x, y = g.nodes[e.src], g.nodes[e.dst]
        if is_equivalence(x, y):
            continue
        _make_adjectival(y)
        y.flags.add("appos")
        g.remove_edge(e)
        g.add_edge(y.id, x.id, "prop_of", dep="appos")
        g.trace.log("U1", [x.head, y.head], f"appositive membership {y.lemma}({x.lemma})")


def U2_synthesize_sameas_exists(g: WorkGraph, cfg: ConverterConfig) -> None:
    for e in list(g.edges):
        if e.label != "appos":
            continue
        x, y = g.nodes[e.src], g.nodes[e.dst]
        if not is_equivalence(x, y):
            continue
        s = g.new_synthetic(NodeKind.SAMEAS)
        s.flags.add("appos")
        g.remove_edge(e)
        g.add_edge(s.id, x.id, "SameAs_arg", dep="appos")
        g.add_edge(s.id, y.id, "SameAs_arg", dep="appos")
        g.trace.log("U2", [x.head, y.head], f"SameAs({x.lemma}, {y.lemma}) from apposition")

    for node in g.node_list():
        if "sameas" not in node.flags:
            continue
        subj = _subject_edges(g, node.id)[0]
        s = g.new_synthetic(NodeKind.SAMEAS)
        for key in ("tense", "negated", "modal"):
            if key in node.features:
                s.features[key] = node.features.pop(key)
        g.remove_edge(subj)
        g.redirect_incoming(node.id, s.id)
        g.add_edge(s.id, subj.dst, "SameAs_arg", dep=subj.dep)
        g.add_edge(s.id, node.id, "SameAs_arg", dep="cop")
        node.flags.discard("sameas")
        node.flags.discard("copular")
        g.trace.log("U2", [node.head], f"SameAs from copula with {node.lemma!r}")

    for e in list(g.edges):
        if e.label != "expl" or e not in g.edges:
            continue
        verb = g.nodes[e.src]
        s = g.new_synthetic(NodeKind.EXISTS)
        for key in ("tense", "negated", "modal"):
            if key in verb.features:
                s.features[key] = verb.features[key]
        g.trace.log("U2", sorted(verb.span | {g.nodes[e.dst].head}), "existential -> EXISTS")
        g.delete_node(e.dst)
        g.redirect_incoming(verb.id, s.id)
        g.move_outgoing(verb.id, s.id)
        g.delete_node(verb.id)


def U3_conditionals(g: WorkGraph, cfg: ConverterConfig) -> None:
    for e in list(g.edges):
        if e.label != "advcl":
            continue
        main, dep = e.src, e.dst
        marks = [m for m in g.out(dep, "mark")
                 if g.nodes[m.dst].lemma.lower() in cfg.conditional_markers]
        if not marks:
            continue
        marker = g.nodes[marks[0].dst]
        g.remove_edge(marks[0])
        g.remove_edge(e)
        marker.kind = NodeKind.PREDICATE
        marker.flags.add("conditional")
        g.redirect_incoming(main, marker.id)
        g.add_edge(marker.id, dep, "condition", dep="advcl")
        g.add_edge(marker.id, main, "outcome", dep="advcl")
        g.trace.log("U3", [marker.head], f"conditional marker {marker.lemma!r}")


# -- canonicalization ---------------------------------------------------------

C1_MAP = {
    "nsubj": "subj", "csubj": "subj", "xsubj": "subj", "agent": "subj",
    "nsubjpass": "dobj", "csubjpass": "dobj", "dobj": "dobj", "iobj": "iobj",
    "ccomp": "comp", "xcomp": "comp", "tmod": "time", "poss": "poss",
}


def C1_verbal_arguments(g: WorkGraph, cfg: ConverterConfig) -> None:
    for e in g.edges:
        if e.label in C1_MAP:
            e.label = C1_MAP[e.label]

    for e in list(g.edges):
        if e.label != "prep" or e not in g.edges:
            continue
        head, prep = g.nodes[e.src], g.nodes[e.dst]
        objs = g.out(prep.id, "pobj", "pcomp")
        if not objs:
            e.label = "mod"
            g.trace.log("C1", [prep.head], f"preposition {prep.lemma!r} without object kept as modifier")
            continue
        obj = g.nodes[objs[0].dst]
        word = " ".join(g.token(i).lemma.lower() for i in sorted(prep.content))
        label = "prep"
        if word == "by" and head.features.get("passive"):
            label = "subj"
        g.remove_edge(objs[0])
        g.remove_edge(e)
        g.move_outgoing(prep.id, obj.id)
        obj.span |= prep.span
        del g.nodes[prep.id]
        if label == "subj":
            g.add_edge(head.id, obj.id, "subj", dep="agent")
            g.trace.log("C1", [prep.head, obj.head], "passive by-phrase -> subj")
        else:
            g.add_edge(head.id, obj.id, "prep", prep=word, dep="prep")
            g.trace.log("C1", [prep.head, obj.head], f"prep[{word}]")

    for e in list(g.edges):
        if e.label in ("pobj", "pcomp"):
            g.remove_edge(e)
            g.trace.log("C1", [g.nodes[e.dst].head], "orphaned prepositional object dropped (warning)")

    for e in g.edges:
        if e.label in ("advmod", "npadvmod", "dep") and g.nodes[e.dst].lemma.lower() in cfg.time_words:
            e.label = "time"

    for e in list(g.edges):
        if e.label != "comp" or e.dep != "xcomp":
            continue
        gov, comp = g.nodes[e.src], g.nodes[e.dst]
        if g.out(comp.id, "subj") or any(x.dep in SUBJECT_DEPS for x in g.out(comp.id, "prop_of")):
            continue
        controller = [x for x in g.out(gov.id, "dobj") if x.dep == "dobj"] or g.out(gov.id, "subj")
        if not controller:
            continue
        label = "prop_of" if "adj" in comp.flags else "subj"
        g.add_edge(comp.id, controller[0].dst, label, dep="nsubj")
        g.trace.log("C1", [gov.head, comp.head], f"controlled subject of {comp.lemma!r}")


def C2_adjectival_complement(g: WorkGraph, cfg: ConverterConfig) -> None:
    for e in list(g.edges):
        if e.label != "acomp":
            continue
        verb, adj = g.nodes[e.src], g.nodes[e.dst]
        g.remove_edge(e)
        _make_adjectival(adj)
        for s in g.out(verb.id, "subj"):
            s.src, s.label = adj.id, "prop_of"
        g.redirect_incoming(verb.id, adj.id)
        g.move_outgoing(verb.id, adj.id, labels=("time",))
        g.add_edge(adj.id, verb.id, "source", dep="acomp")
        verb.kind = NodeKind.NON_PREDICATE
        verb.flags.add("source")
        g.trace.log("C2", [verb.head, adj.head], f"{adj.lemma} main predicate, source {verb.lemma}")


def C4_modification_boundaries(g: WorkGraph, cfg: ConverterConfig) -> None:
    for e in list(g.edges):
        if e.label != "rcmod":
            continue
        noun, pred = g.nodes[e.src], g.nodes[e.dst]
        for pe in g.out(pred.id):
            pron = g.nodes[pe.dst]
            if pe.dst == noun.id or pron.tag not in REL_PRONOUN_TAGS or g.out(pron.id):
                continue
            pe.dst = noun.id
            if not pred.kind.synthetic:
                pred.span |= pron.span
            del g.nodes[pron.id]
            g.trace.log("C4", [pron.head], f"relative pronoun {pron.lemma!r} -> {noun.lemma!r}")
        if inherently_definite(noun):
            g.remove_edge(e)
            pred.flags.add("nonrestrictive")
            g.trace.log("C4", [noun.head, pred.head], "non-restrictive relative clause detached")
        else:
            e.label = "mod"
            g.trace.log("C4", [noun.head, pred.head], "restrictive relative clause bound by mod")

    for e in list(g.edges):
        if e.label != "amod":
            continue
        noun, adj = g.nodes[e.src], g.nodes[e.dst]
        if inherently_definite(noun):
            g.remove_edge(e)
            g.trace.log("C4", [noun.head, adj.head], "non-restrictive adjective detached")
        else:
            e.label = "mod"
            g.trace.log("C4", [noun.head, adj.head], "restrictive adjective bound by mod")


# -- pipeline -----------------------------------------------------------------

PIPELINE: tuple[tuple[str, Callable], ...] = (
    ("M1", M1_merge_multiword),
    ("M2", M2_extract_features),
    ("M3", M3_assign_definiteness),
    ("U1", U1_adjectival_predication),
    ("U2", U2_synthesize_sameas_exists),
    ("U3", U3_conditionals),
    ("C1", C1_verbal_arguments),
    ("C2", C2_adjectival_complement),
    ("C4", C4_modification_boundaries),
    ("H1", heuristics.H1_raising),
    ("H2", heuristics.H2_coordination),
    ("H3", heuristics.H3_propagate),
    ("H4", heuristics.H4_assertedness),
)

FALLBACK_LABELS = {
    "nsubj": "subj", "csubj": "subj", "nsubjpass": "dobj", "csubjpass": "dobj",
    "ccomp": "comp", "xcomp": "comp", "tmod": "time", "pobj": "prep", "pcomp": "prep",
}
DROPPED_LABELS = frozenset({"punct", "mark", "cc", "expl", "root", "discourse"})


def _node_text(g: WorkGraph, node: WNode) -> str:
    if node.kind.synthetic:
        return SYNTHETIC_TEXT[node.kind]
    if "coord" in node.flags and node.kind is NodeKind.PREDICATE:
        conjuncts = sorted(g.targets(node.duplicate_of or node.id, "conj"), key=lambda n: n.first)
        if conjuncts:
            return f"_{node.lemma.lower()}_".join(_node_text(g, c) for c in conjuncts)
    if node.text is not None:
        return node.text
    return " ".join(g.token(i).lemma for i in sorted(node.content))


def finalize(g: WorkGraph, prune: bool = True) -> PropGraph:
    """Freeze the working graph.

    With ``prune=False`` (every rule disabled) no token is dropped: each arc
    becomes one edge, relabelled into the closed label set.
    """
    for e in list(g.edges):
        if e.label in LABELS:
            continue
        if prune and e.label in DROPPED_LABELS:
            g.remove_edge(e)
            dst = g.nodes[e.dst]
            if not g.inn(dst.id) and not g.out(dst.id):
                g.trace.log("finalize", [dst.head], f"dropped {e.label} token {dst.lemma!r}")
                del g.nodes[dst.id]
            continue
        e.label = FALLBACK_LABELS.get(e.label, "mod")

    for node in g.node_list():
        if prune and node.tag in PUNCT_TAGS and not g.inn(node.id) and not g.out(node.id) and node.id != g.root:
            g.trace.log("finalize", [node.head], "dropped punctuation")
            del g.nodes[node.id]

    for node in g.node_list():
        if node.kind is NodeKind.NON_PREDICATE and any(
                e.label in PROPOSITION_LABELS for e in g.out(node.id)):
            node.kind = NodeKind.PREDICATE
            g.trace.log("finalize", [node.head], f"{node.lemma!r} heads arguments; promoted to predicate")

    edges = {}
    for e in g.edges:
        if e.src == e.dst:
            g.trace.log("finalize", [g.nodes[e.src].head], f"self-loop {e.label} dropped")
            continue
        key = (e.src, e.dst, e.label, e.prep or "")
        if key not in edges:
            edges[key] = PropEdge(e.src, e.dst, e.label, e.prep, e.propagated)

    nodes = []
    for node in g.nodes.values():
        feats = {k: v for k, v in node.features.items() if feature_value_ok(k, v)}
        span = () if node.kind.synthetic else tuple(sorted(node.span))
        nodes.append(PropNode(node.id, node.kind, span, _node_text(g, node), feats,
                              node.duplicate_of))
    words = [t.surface for t in sorted(g.tree.tokens, key=lambda t: t.index)]
    graph = PropGraph(g.tree.sentence_id, nodes, edges.values(), words)
    problems = check_graph(graph)
    if problems:
        raise ConversionError(f"sentence {graph.sentence_id!r}: " + "; ".join(problems), g.trace)
    return graph


def build_workgraph(tree: DepTree, config: ConverterConfig | None = None,
                    stop_before: str | None = None) -> WorkGraph:
    """Run the rule pipeline (optionally halting before a rule) and return the working graph."""
    config = config or ConverterConfig()
    g = WorkGraph(tree)
    for name, rule in PIPELINE:
        if name == stop_before:
            break
        if config.enabled(name):
            rule(g, config)
    return g


def convert(tree: DepTree, config: ConverterConfig | None = None) -> tuple[PropGraph, RuleTrace]:
    config = config or ConverterConfig()
    g = build_workgraph(tree, config)
    return finalize(g, prune=any(config.enabled(r) for r in RULES)), g.trace
