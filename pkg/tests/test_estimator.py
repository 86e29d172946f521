import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from helpers import example_trees
from propsconv.conll import DepArc, DepTree, Token, TreeStructureError, serialize_conll
from propsconv.converter import convert
from propsconv.estimator import PropsConverter, check_trees, convert_all

TREES = example_trees()


def test_params_round_trip():
    est = PropsConverter(heuristics=False, disabled_rules=("H3",), propagation_cap=5)
    params = est.get_params()
    assert params["heuristics"] is False and params["disabled_rules"] == ("H3",)
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(propagation_cap=9)
    assert est.propagation_cap == 9


def test_transform_matches_convert():
    trees = [TREES["obama_elected"], TREES["obama_washington"]]
    graphs = PropsConverter().fit(trees).transform(trees)
    assert graphs == [convert(t)[0] for t in trees]
    assert convert_all(trees) == graphs


def test_accepts_conll_text_and_single_tree():
    est = PropsConverter().fit()
    assert est.transform(serialize_conll(TREES["said_tall"])) == est.transform(TREES["said_tall"])
    [(graph, trace)] = est.transform_with_trace([TREES["obama_elected"]])
    assert trace.rules()


def test_fit_transform():
    graphs = PropsConverter().fit_transform([TREES["saw_tall_boy"]])
    assert len(graphs) == 1


def test_not_fitted():
    with pytest.raises(NotFittedError):
        PropsConverter().transform([TREES["said_tall"]])


def test_check_trees_errors():
    with pytest.raises(TypeError):
        check_trees(42)
    with pytest.raises(TypeError):
        check_trees([TREES["said_tall"], "oops"])
    bad = DepTree("bad", [Token(1, "a", "a", "NN"), Token(2, "b", "b", "NN")],
                  [DepArc(2, 1, "dep"), DepArc(1, 2, "dep")])
    with pytest.raises(TreeStructureError):
        check_trees([bad])


def test_family_switches():
    g = PropsConverter(disabled_rules=("heuristics",)).fit().transform([TREES["dell_sell"]])[0]
    assert not any(n.duplicate_of for n in g.nodes)
    g = PropsConverter(heuristics=False).fit().transform([TREES["dell_sell"]])[0]
    assert not any(n.duplicate_of for n in g.nodes)


def test_raising_lexicon_file(tmp_path):
    path = tmp_path / "raising.txt"
    path.write_text("want\n")
    [g] = PropsConverter(raising_lexicon=str(path)).fit().transform([TREES["want_to_be"]])
    want = next(n for n in g.nodes if n.text == "want")
    assert not want.kind.evokes_proposition


def test_invalid_parameters():
    with pytest.raises(ValueError):
        PropsConverter(propagation_cap=-1).fit()
    with pytest.raises(ValueError):
        PropsConverter(disabled_rules=("nonsense",)).fit()
