"""Span-based labeled attachment and feature scores over aligned graph corpora."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import PropGraph, PropNode

Span = tuple  # tuple of token indices, or a one-element tuple holding a sentinel string


class AlignmentError(ValueError):
    def __init__(self, mismatches: list[str]):
        super().__init__("unaligned corpora: " + "; ".join(mismatches))
        self.mismatches = mismatches


def node_span(graph: PropGraph, node: PropNode) -> Span:
    """Token span of ``node``; synthetic nodes get a sentinel keyed by their first argument."""
    if node.span:
        return tuple(node.span)
    arg_spans = sorted(tuple(graph.node(e.target).span) for e in graph.out_edges(node.id)
                       if graph.node(e.target).span)
    anchor = ",".join(map(str, arg_spans[0])) if arg_spans else "-"
    return (f"SYN:{node.kind.value}:{anchor}",)


def edge_set(graph: PropGraph) -> Counter:
    spans = {n.id: node_span(graph, n) for n in graph.nodes}
    return Counter((spans[e.source], spans[e.target], e.label) for e in graph.edges)


def feature_set(graph: PropGraph) -> Counter:
    items = Counter()
    for n in graph.nodes:
        span = node_span(graph, n)
        for key, value in n.features.items():
            items[(span, key, value)] += 1
    return items


def _overlap(gold: Counter, pred: Counter, set_mode: bool) -> int:
    if set_mode:
        return len(set(gold) & set(pred))
    return sum((gold & pred).values())


def _size(c: Counter, set_mode: bool) -> int:
    return len(c) if set_mode else sum(c.values())


def _ratio(num: int, den: int, both_empty: bool) -> Fraction:
    if den == 0:
        return Fraction(1) if both_empty else Fraction(0)
    return Fraction(num, den)


def f1(p: Fraction, r: Fraction) -> Fraction:
    return Fraction(0) if p + r == 0 else 2 * p * r / (p + r)


def check_alignment(gold: Sequence[PropGraph], pred: Sequence[PropGraph]) -> None:
    problems = []
    if len(gold) != len(pred):
        problems.append(f"gold has {len(gold)} graphs, pred has {len(pred)}")
    for i, (g, p) in enumerate(zip(gold, pred)):
        if g.sentence_id != p.sentence_id:
            problems.append(f"position {i}: gold {g.sentence_id!r} vs pred {p.sentence_id!r}")
    if problems:
        raise AlignmentError(problems)


def _score(gold, pred, extract, set_mode: bool) -> tuple[Fraction, Fraction]:
    gold, pred = list(gold), list(pred)
    check_alignment(gold, pred)
    match = n_gold = n_pred = 0
    for g, p in zip(gold, pred):
        eg, ep = extract(g), extract(p)
        match += _overlap(eg, ep, set_mode)
        n_gold += _size(eg, set_mode)
        n_pred += _size(ep, set_mode)
    both_empty = n_gold == 0 and n_pred == 0
    return _ratio(match, n_pred, both_empty), _ratio(match, n_gold, both_empty)


def score_las(gold: Iterable[PropGraph], pred: Iterable[PropGraph],
              set_mode: bool = False) -> tuple[Fraction, Fraction]:
    """Micro-averaged (precision, recall) over edge triplets."""
    return _score(gold, pred, edge_set, set_mode)


def score_feat(gold: Iterable[PropGraph], pred: Iterable[PropGraph],
               set_mode: bool = False) -> tuple[Fraction, Fraction]:
    """Micro-averaged (precision, recall) over (span, key, value) feature tuples."""
    return _score(gold, pred, feature_set, set_mode)


@dataclass
class LabelCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0


@dataclass
class EvalReport:
    las: tuple[Fraction, Fraction, Fraction]
    feat: tuple[Fraction, Fraction, Fraction]
    per_label: dict[str, LabelCounts] = field(default_factory=dict)
    per_feature: dict[str, LabelCounts] = field(default_factory=dict)
    sentences: int = 0

    def to_dict(self) -> dict:
        def triple(t):
            return {"precision": float(t[0]), "recall": float(t[1]), "f1": float(t[2])}
        return {"sentences": self.sentences, "las": triple(self.las), "feat": triple(self.feat),
                "per_label": {k: vars(v) for k, v in sorted(self.per_label.items())},
                "per_feature": {k: vars(v) for k, v in sorted(self.per_feature.items())}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def table(self, name: str = "corpus") -> str:
        rows = [("", "Feature P", "Feature R", "Feature F1", "LAS P", "LAS R", "LAS F1"),
                (name, *(f"{float(x):.3f}" for x in self.feat), *(f"{float(x):.3f}" for x in self.las))]
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        lines.append("")
        lines.append("label       tp    fp    fn")
        for label in sorted(self.per_label):
            c = self.per_label[label]
            lines.append(f"{label:<10} {c.tp:>4}  {c.fp:>4}  {c.fn:>4}")
        return "\n".join(lines) + "\n"


def _breakdown(gold: Counter, pred: Counter, key, out: dict[str, LabelCounts], set_mode: bool):
    if set_mode:
        gold, pred = Counter(set(gold)), Counter(set(pred))
    for item in set(gold) | set(pred):
        counts = out.setdefault(key(item), LabelCounts())
        both = min(gold[item], pred[item])
        counts.tp += both
        counts.fp += pred[item] - both
        counts.fn += gold[item] - both


def evaluate(gold: Iterable[PropGraph], pred: Iterable[PropGraph],
             set_mode: bool = False) -> EvalReport:
    gold, pred = list(gold), list(pred)
    las = score_las(gold, pred, set_mode)
    feat = score_feat(gold, pred, set_mode)
    per_label: dict[str, LabelCounts] = {}
    per_feature: dict[str, LabelCounts] = {}
    for g, p in zip(gold, pred):
        _breakdown(edge_set(g), edge_set(p), lambda t: t[2], per_label, set_mode)
        _breakdown(feature_set(g), feature_set(p), lambda t: t[1], per_feature, set_mode)
    return EvalReport((*las, f1(*las)), (*feat, f1(*feat)), per_label, per_feature, len(gold))
