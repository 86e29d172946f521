"""scikit-learn style wrapper around :func:`propsconv.converter.convert`."""

from __future__ import annotations

from typing import Iterable

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .conll import DepTree, TreeStructureError, parse_conll, validate
from .converter import ConverterConfig, convert, normalize_rule_names
from .graph import PropGraph
from .lexicons import read_lexicon


def check_trees(X) -> list[DepTree]:
    """Coerce ``X`` into a list of valid trees.

    Accepts a single :class:`DepTree`, an iterable of them, or CoNLL text.
    """
    if isinstance(X, DepTree):
        trees = [X]
    elif isinstance(X, str):
        trees = parse_conll(X)
    else:
        try:
            trees = list(X)
        except TypeError:
            raise TypeError(f"expected DepTree objects or CoNLL text, got {type(X).__name__}") from None
    for i, tree in enumerate(trees):
        if not isinstance(tree, DepTree):
            raise TypeError(f"item {i} is {type(tree).__name__}, not DepTree")
        result = validate(tree)
        if not result.ok:
            raise TreeStructureError(tree.sentence_id, result.violations)
    return trees


class PropsConverter(TransformerMixin, BaseEstimator):
    """Convert dependency trees into proposition graphs.

    Parameters mirror :class:`ConverterConfig`.  ``disabled_rules`` takes rule
    names (``"H3"``) or family names (``"heuristics"``); ``raising_lexicon`` is
    a path that replaces the raising-verb list.
    """

    def __init__(self, masking: bool = True, predication: bool = True,
                 canonicalization: bool = True, boundaries: bool = True,
                 heuristics: bool = True, disabled_rules: tuple = (),
                 propagation_cap: int = 64, lexicon_dir: str | None = None,
                 raising_lexicon: str | None = None):
        self.masking = masking
        self.predication = predication
        self.canonicalization = canonicalization
        self.boundaries = boundaries
        self.heuristics = heuristics
        self.disabled_rules = disabled_rules
        self.propagation_cap = propagation_cap
        self.lexicon_dir = lexicon_dir
        self.raising_lexicon = raising_lexicon

    def build_config(self) -> ConverterConfig:
        if self.propagation_cap < 0:
            raise ValueError("propagation_cap must be non-negative")
        rules, families = normalize_rule_names(self.disabled_rules)
        flags = {name: getattr(self, name) and name not in families
                 for name in ("masking", "predication", "canonicalization", "boundaries",
                              "heuristics")}
        overrides = dict(flags, disabled_rules=rules, propagation_cap=self.propagation_cap)
        if self.raising_lexicon:
            overrides["raising_verbs"] = read_lexicon(self.raising_lexicon)
        return ConverterConfig.from_lexicon_dir(self.lexicon_dir, **overrides)

    def fit(self, X=None, y=None):
        if X is not None:
            check_trees(X)
        self.config_ = self.build_config()
        return self

    def transform(self, X) -> list[PropGraph]:
        check_is_fitted(self, "config_")
        return [convert(tree, self.config_)[0] for tree in check_trees(X)]

    def transform_with_trace(self, X) -> list[tuple]:
        check_is_fitted(self, "config_")
        return [convert(tree, self.config_) for tree in check_trees(X)]


def convert_all(trees: Iterable[DepTree], **params) -> list[PropGraph]:
    return PropsConverter(**params).fit().transform(list(trees))
