"""Word lists used by the converter and matcher.

Files hold one lemma per line; ``#`` starts a comment.  The directory can be
overridden with the ``PROPS_LEXICON_DIR`` environment variable.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

LEXICON_ENV = "PROPS_LEXICON_DIR"

RAISING = "raising_verbs.txt"
COLLECTIVE = "collective_verbs.txt"
ASSERTING = "asserting_markers.txt"
CONDITIONAL = "conditional_markers.txt"
TIME = "time_words.txt"
STOPWORDS = "stopwords.txt"


def parse_lexicon(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return frozenset(words)


def read_lexicon(path: str | os.PathLike) -> frozenset[str]:
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


def load_lexicon(name: str, lexicon_dir: str | os.PathLike | None = None) -> frozenset[str]:
    """Load a named list, preferring ``lexicon_dir``, then $PROPS_LEXICON_DIR, then the bundled copy."""
    lexicon_dir = lexicon_dir or os.environ.get(LEXICON_ENV)
    if lexicon_dir:
        candidate = Path(lexicon_dir) / name
        if candidate.exists():
            return read_lexicon(candidate)
    text = resources.files("propsconv").joinpath("data", name).read_text("utf-8")
    return parse_lexicon(text)
