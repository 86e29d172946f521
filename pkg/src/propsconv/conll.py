"""Reading, writing and validating CoNLL-X dependency trees.

Trees are expected in the basic (non-collapsed) Stanford dependency scheme.
Columns: index, form, lemma, coarse POS, fine POS, feats, head, relation.
Any further columns (phead, pdeprel) are accepted and ignored.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO


class ConllParseError(ValueError):
    """A line of CoNLL input could not be read."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TreeStructureError(ValueError):
    """A sentence parsed fine but does not form a valid tree."""

    def __init__(self, sentence_id: str, violations: list[str]):
        super().__init__(f"sentence {sentence_id!r}: " + "; ".join(violations))
        self.sentence_id = sentence_id
        self.violations = violations


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    lemma: str
    pos: str
    fine_pos: str = "_"


@dataclass(frozen=True)
class DepArc:
    head: int
    dependent: int
    relation: str


@dataclass(frozen=True)
class DepTree:
    sentence_id: str
    tokens: tuple[Token, ...]
    arcs: tuple[DepArc, ...]
    _by_index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "_by_index", {t.index: t for t in self.tokens})

    def token(self, index: int) -> Token:
        return self._by_index[index]

    def arc_of(self, dependent: int) -> DepArc | None:
        for arc in self.arcs:
            if arc.dependent == dependent:
                return arc
        return None

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass
class ValidationResult:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate(tree: DepTree) -> ValidationResult:
    """Check the tree invariants; never raises."""
    violations = []
    indices = [t.index for t in tree.tokens]
    known = set(indices)
    if len(known) != len(indices):
        violations.append("duplicate token index")
    if any(i < 1 for i in indices):
        violations.append("token index < 1")
    if any(not t.surface for t in tree.tokens):
        violations.append("empty surface form")

    heads: dict[int, int] = {}
    for arc in tree.arcs:
        if arc.dependent in heads:
            violations.append(f"duplicate dependent {arc.dependent}")
        heads[arc.dependent] = arc.head
        if arc.dependent not in known:
            violations.append(f"dangling dependent index {arc.dependent}")
        if arc.head != 0 and arc.head not in known:
            violations.append(f"dangling head index {arc.head} (dependent {arc.dependent})")
    if len(tree.arcs) != len(tree.tokens):
        missing = sorted(known - set(heads))
        if missing:
            violations.append(f"tokens without arc: {missing}")
        else:
            violations.append("arc count differs from token count")

    roots = [a.dependent for a in tree.arcs if a.head == 0]
    if len(roots) > 1:
        violations.append(f"multiple roots: {roots}")
    elif tree.tokens and not roots:
        violations.append("no root")

    reported: set[frozenset] = set()
    for start in sorted(heads):
        path = []
        seen = set()
        node = start
        while node in heads and node not in seen and node != 0:
            seen.add(node)
            path.append(node)
            node = heads[node]
        if node in seen:
            cycle = frozenset(path[path.index(node):])
            if cycle not in reported:
                reported.add(cycle)
                violations.append(f"cycle among tokens {sorted(cycle)}")
    return ValidationResult(violations)


def _sentence_blocks(stream: TextIO) -> Iterator[tuple[list[tuple[int, str]], list[str]]]:
    rows: list[tuple[int, str]] = []
    comments: list[str] = []
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if line.startswith("#"):
            comments.append(line)
            continue
        if not line.strip():
            if rows:
                yield rows, comments
            rows, comments = [], []
            continue
        rows.append((line_no, line))
    if rows:
        yield rows, comments


def _parse_block(rows, comments, ordinal: int, check: bool = True) -> DepTree:
    sentence_id = str(ordinal)
    for c in comments:
        body = c[1:].strip()
        if body.startswith("sent_id"):
            key, _, value = body.partition("=")
            if key.strip() == "sent_id":
                sentence_id = value.strip()
    tokens = []
    arcs = []
    for line_no, line in rows:
        cols = line.split("\t")
        if len(cols) < 8:
            raise ConllParseError(f"expected at least 8 tab-separated columns, got {len(cols)}", line_no)
        try:
            index = int(cols[0])
        except ValueError:
            raise ConllParseError(f"non-integer token index {cols[0]!r}", line_no) from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ConllParseError(f"non-integer head {cols[6]!r}", line_no) from None
        form = cols[1]
        if not form:
            raise ConllParseError("empty form", line_no)
        lemma = cols[2] if cols[2] != "_" else form.lower()
        tokens.append(Token(index, form, lemma, cols[3], cols[4]))
        arcs.append(DepArc(head, index, cols[7]))
    tree = DepTree(sentence_id, tuple(tokens), tuple(arcs))
    if check:
        result = validate(tree)
        if not result.ok:
            raise TreeStructureError(sentence_id, result.violations)
    return tree


def iter_conll(stream: TextIO | str, check: bool = True) -> Iterator[DepTree]:
    """Lazily parse sentences from a stream (or a string of CoNLL text).

    With ``check=False`` malformed trees are returned instead of rejected, so
    callers can report every violation.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for ordinal, (rows, comments) in enumerate(_sentence_blocks(stream)):
        yield _parse_block(rows, comments, ordinal, check)


def parse_conll(stream: TextIO | str) -> list[DepTree]:
    return list(iter_conll(stream))


def serialize_conll(trees: Iterable[DepTree] | DepTree) -> str:
    if isinstance(trees, DepTree):
        trees = [trees]
    out = []
    for tree in trees:
        out.append(f"# sent_id = {tree.sentence_id}")
        heads = {a.dependent: a for a in tree.arcs}
        for t in tree.tokens:
            arc = heads[t.index]
            out.append("\t".join([str(t.index), t.surface, t.lemma, t.pos, t.fine_pos or "_",
                                  "_", str(arc.head), arc.relation]))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")
