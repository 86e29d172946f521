"""Sentence-level answer selection by counting shared representation units.

A unit is a ``(source words, label, target words)`` triple read off a graph
edge or a dependency arc.  Each candidate answer statement is scored against
every story sentence and the best candidate wins; ties go to the lowest index.
"""

from __future__ import annotations

import csv
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator

from .conll import DepTree
from .converter import ConverterConfig, convert
from .graph import PropGraph
from .lexicons import STOPWORDS, load_lexicon
from .workgraph import PUNCT_TAGS, tag_of

MODES = ("lexical", "dependency", "props")

Unit = tuple[str, str, str]


class MissingParseError(KeyError):
    pass


def units_of(graph: PropGraph) -> Counter:
    """One unit per edge, endpoints rendered as lowercased node text."""
    return Counter((graph.node(e.source).text.lower(), e.label, graph.node(e.target).text.lower())
                   for e in graph.edges)


def units_of_tree(tree: DepTree) -> Counter:
    units = Counter()
    for arc in tree.arcs:
        if arc.head == 0:
            continue
        units[(tree.token(arc.head).lemma.lower(), arc.relation,
               tree.token(arc.dependent).lemma.lower())] += 1
    return units


def match_score(ca_units: Counter, sentence_units: Counter, set_mode: bool = False) -> int:
    if set_mode:
        return len(set(ca_units) & set(sentence_units))
    return sum((Counter(ca_units) & Counter(sentence_units)).values())


def words_of(tree: DepTree) -> list[str]:
    return [t.lemma.lower() for t in tree.tokens if tag_of(t) not in PUNCT_TAGS]


def lexical_score(ca: DepTree, story: Sequence[DepTree], stopwords: frozenset[str],
                  window: int | None = None) -> int:
    """Best overlap between the candidate's content words and a sliding window over the story."""
    ca_words = words_of(ca)
    wanted = Counter(w for w in ca_words if w not in stopwords)
    size = window or len(ca_words)
    text = [w for tree in story for w in words_of(tree)]
    best = 0
    for start in range(max(1, len(text) - size + 1)):
        seen = Counter(w for w in text[start:start + size] if w not in stopwords)
        best = max(best, sum((seen & wanted).values()))
    return best


@dataclass
class QAItem:
    id: str
    question: str
    story: list[DepTree]
    candidates: list[DepTree]
    answer: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.candidates) != 4:
            raise ValueError(f"item {self.id}: expected 4 candidate answers, got {len(self.candidates)}")


def argmax_first(scores: Sequence[int]) -> int:
    best = max(scores)
    return scores.index(best)


class UnitMatcher(BaseEstimator):
    """Pick the candidate answer that best matches a single story sentence.

    ``mode`` is one of ``lexical``, ``dependency`` or ``props``.  The matcher has
    nothing to learn; ``fit`` only validates its parameters.
    """

    def __init__(self, mode: str = "props", set_intersection: bool = False,
                 window: int | None = None, config: ConverterConfig | None = None):
        self.mode = mode
        self.set_intersection = set_intersection
        self.window = window
        self.config = config

    def _validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.window is not None and self.window < 1:
            raise ValueError("window must be a positive integer")

    def fit(self, items=None, y=None):
        self._validate()
        self.stopwords_ = load_lexicon(STOPWORDS)
        self._cache = {}
        return self

    def _units(self, tree: DepTree) -> Counter:
        key = (id(tree), self.mode)
        if key not in self._cache:
            if self.mode == "props":
                graph, _ = convert(tree, self.config or ConverterConfig())
                self._cache[key] = (tree, units_of(graph))
            else:
                self._cache[key] = (tree, units_of_tree(tree))
        return self._cache[key][1]

    def candidate_scores(self, item: QAItem) -> list[int]:
        if not hasattr(self, "stopwords_"):
            self.fit()
        if self.mode == "lexical":
            return [lexical_score(ca, item.story, self.stopwords_, self.window)
                    for ca in item.candidates]
        story_units = [self._units(s) for s in item.story]
        scores = []
        for ca in item.candidates:
            ca_units = self._units(ca)
            scores.append(max((match_score(ca_units, su, self.set_intersection)
                               for su in story_units), default=0))
        return scores

    def answer(self, item: QAItem) -> int:
        return argmax_first(self.candidate_scores(item))

    def predict(self, items: Iterable[QAItem]) -> list[int]:
        return [self.answer(item) for item in items]

    def score(self, items: Sequence[QAItem], y: Sequence[int] | None = None) -> float:
        items = list(items)
        gold = list(y) if y is not None else [item.answer for item in items]
        if not items:
            return 0.0
        hits = sum(p == g for p, g in zip(self.predict(items), gold))
        return hits / len(items)


def answer(item: QAItem, mode: str = "props", **params) -> int:
    return UnitMatcher(mode=mode, **params).fit().answer(item)


# -- readers ----------------------------------------------------------------

def _lookup(parses: dict[str, DepTree], sid: str, item_id: str) -> DepTree:
    try:
        return parses[sid]
    except KeyError:
        raise MissingParseError(f"item {item_id}: no parse for sentence {sid!r}") from None


def read_jsonl_items(lines: Iterable[str], parses: dict[str, DepTree]) -> list[QAItem]:
    """Items of the form ``{"id", "question", "story": [sid...], "candidates": [sid x4], "answer"}``."""
    items = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        iid = rec["id"]
        story = [_lookup(parses, s, iid) for s in rec["story"]]
        cands = [_lookup(parses, s, iid) for s in rec["candidates"]]
        meta = {k: v for k, v in rec.items() if k not in ("id", "question", "story", "candidates", "answer")}
        items.append(QAItem(iid, rec.get("question", ""), story, cands, rec.get("answer"), meta))
    return items


def read_mctest(tsv_path: str | os.PathLike, ans_path: str | os.PathLike | None,
                parses: dict[str, DepTree], single_only: bool = True) -> list[QAItem]:
    """Read MCTest ``.tsv``/``.ans`` files against parses keyed by sentence id.

    Story sentence ``k`` of story ``S`` is looked up as ``S.s{k}`` (1-based) and
    the statement for answer ``m`` of question ``j`` as ``S.q{j}.a{m}``.
    """
    answers: list[list[str]] = []
    if ans_path is not None:
        with open(ans_path, encoding="utf-8") as fh:
            answers = [row for row in csv.reader(fh, delimiter="\t")]
    items = []
    with open(tsv_path, encoding="utf-8") as fh:
        for row_no, row in enumerate(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)):
            story_id = row[0]
            story = []
            k = 1
            while f"{story_id}.s{k}" in parses:
                story.append(parses[f"{story_id}.s{k}"])
                k += 1
            if not story:
                raise MissingParseError(f"story {story_id}: no sentence parses found")
            for j in range(4):
                question = row[3 + 5 * j]
                kind, _, text = question.partition(":")
                if single_only and kind.strip() != "one":
                    continue
                iid = f"{story_id}.q{j + 1}"
                cands = [_lookup(parses, f"{iid}.a{m + 1}", iid) for m in range(4)]
                gold = None
                if answers:
                    gold = "ABCD".index(answers[row_no][j].strip())
                items.append(QAItem(iid, text.strip(), story, cands, gold))
    return items


def accuracy_report(items: Sequence[QAItem], modes: Sequence[str] = MODES, **params) -> str:
    names = {"lexical": "Lexical sliding window", "dependency": "Dependency units",
             "props": "PROPS units"}
    rows = [("Method", "Correct")]
    for mode in modes:
        acc = UnitMatcher(mode=mode, **params).fit().score(items)
        rows.append((names[mode], f"{100 * acc:.2f}%"))
    width = max(len(r[0]) for r in rows)
    return "\n".join(f"{a.ljust(width)}  {b}" for a, b in rows) + "\n"
