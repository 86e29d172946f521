import io
import json
import subprocess
import sys

import pydot
import pytest

from helpers import DATA, example_trees
from propsconv.cli import main
from propsconv.conll import serialize_conll
from propsconv.graph import deserialize_json
from propsconv.lexicons import LEXICON_ENV

TREES = example_trees()


@pytest.fixture
def conll(tmp_path):
    def write(*sids, name="in.conll"):
        path = tmp_path / name
        path.write_text(serialize_conll([TREES[s] for s in sids]), encoding="utf-8")
        return str(path)
    return write


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_convert_obama_elected(conll, capsys):
    code, out, _ = run(["convert", "-i", conll("obama_elected")], capsys)
    assert code == 0
    [line] = out.splitlines()
    graph = deserialize_json(line)
    assert sorted({n.text for n in graph.predicates()}) == ["SameAs", "elect", "young"]


def test_convert_pretty_json_and_dot(conll, capsys, tmp_path):
    path = conll("said_tall", "saw_tall_boy")
    code, out, _ = run(["convert", "-i", path, "-f", "json"], capsys)
    assert code == 0 and out.startswith("{\n")
    code, out, _ = run(["convert", "-i", path, "-f", "dot", "--dot-dir", str(tmp_path / "dots")], capsys)
    assert code == 0 and out.count("digraph") == 2
    files = sorted(p.name for p in (tmp_path / "dots").iterdir())
    assert files == ["said_tall.dot", "saw_tall_boy.dot"]
    assert pydot.graph_from_dot_file(str(tmp_path / "dots" / "said_tall.dot"))
    code, out, _ = run(["convert", "-i", path, "-f", "pretty"], capsys)
    assert code == 0 and "tall" in out


def test_extract_pratt(conll, capsys):
    code, out, _ = run(["extract", "-i", conll("pratt"), "-f", "text"], capsys)
    assert code == 0
    lines = [line for line in out.splitlines() if line.startswith("(")]
    assert len(lines) == 8


def test_extract_from_graphs(conll, capsys, tmp_path):
    _, graphs, _ = run(["convert", "-i", conll("tall_boy")], capsys)
    (tmp_path / "g.jsonl").write_text(graphs)
    code, out, _ = run(["extract", "--from-graphs", "-i", str(tmp_path / "g.jsonl"), "-f", "jsonl"], capsys)
    assert code == 0
    assert json.loads(out)["propositions"][0]["predicate"] == "tall"


def test_convert_piped_into_eval(conll, capsys, tmp_path, monkeypatch):
    path = conll("obama_elected", "pratt", "kim_pat_speak")
    _, graphs, _ = run(["convert", "-i", path], capsys)
    gold = tmp_path / "gold.jsonl"
    gold.write_text(graphs)
    code, out, _ = run(["eval", "--gold", str(gold), "--pred", "-", "-f", "json"], capsys,
                       stdin=graphs, monkeypatch=monkeypatch)
    assert code == 0
    report = json.loads(out)
    assert report["las"] == {"precision": 1.0, "recall": 1.0, "f1": 1.0}
    assert report["sentences"] == 3
    code, out, _ = run(["eval", "--gold", str(gold), "--pred", str(gold), "--name", "self"], capsys)
    assert out.splitlines()[1].split()[0] == "self"


def test_eval_misaligned_is_input_error(conll, capsys, tmp_path):
    _, a, _ = run(["convert", "-i", conll("said_tall")], capsys)
    _, b, _ = run(["convert", "-i", conll("saw_tall_boy", name="b.conll")], capsys)
    (tmp_path / "a.jsonl").write_text(a)
    (tmp_path / "b.jsonl").write_text(b)
    code, _, err = run(["eval", "--gold", str(tmp_path / "a.jsonl"), "--pred", str(tmp_path / "b.jsonl")],
                       capsys)
    assert code == 1 and "unaligned" in err


def test_jobs_do_not_change_output(conll, capsys):
    path = conll(*sorted(TREES))
    _, one, _ = run(["convert", "-i", path, "-j", "1"], capsys)
    _, many, _ = run(["convert", "-i", path, "-j", "3"], capsys)
    assert one == many and one.count("\n") == len(TREES)


def test_exit_codes(capsys, tmp_path):
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["convert", "--no-such-flag"], capsys)[0] == 2
    assert run(["convert", "-j", "0", "-i", str(DATA / "examples.conll")], capsys)[0] == 2
    bad = tmp_path / "bad.conll"
    bad.write_text("1\tx\tx\tNN\tNN\t_\tzero\troot\n")
    code, _, err = run(["convert", "-i", str(bad)], capsys)
    assert code == 1 and "line 1" in err
    assert run(["convert", "-i", str(tmp_path / "missing.conll")], capsys)[0] == 1


def test_validate(capsys, tmp_path, conll):
    cyclic = tmp_path / "cyc.conll"
    cyclic.write_text("# sent_id = c\n1\tx\tx\tNN\tNN\t_\t2\tdep\n2\ty\ty\tNN\tNN\t_\t1\tdep\n")
    code, _, err = run(["validate", "-i", str(cyclic)], capsys)
    assert code == 1 and "c:" in err
    assert run(["validate", "-i", conll("obama_elected")], capsys)[0] == 0
    _, graphs, _ = run(["convert", "-i", conll("obama_elected")], capsys)
    good = tmp_path / "g.jsonl"
    good.write_text(graphs)
    assert run(["validate", "-i", str(good)], capsys)[0] == 0
    broken = tmp_path / "b.jsonl"
    broken.write_text(graphs.replace('"SameAs_arg"', '"nsubj"'))
    code, _, err = run(["validate", "-i", str(broken), "--kind", "graphs"], capsys)
    assert code == 1 and "nsubj" in err


def test_config_file_merges_under_flags(conll, capsys, tmp_path):
    cfg = tmp_path / "props.cfg"
    cfg.write_text("# defaults\nformat = pretty\ndisable-rule = H3\n")
    path = conll("dell_sell")
    code, out, _ = run(["convert", "-i", path, "--config", str(cfg)], capsys)
    assert code == 0
    assert [line for line in out.splitlines() if line.startswith("(")] == ["(1) sell(Dell, laptops and servers)"]
    code, out, _ = run(["convert", "-i", path, "--config", str(cfg), "-f", "jsonl"], capsys)
    graph = deserialize_json(out.strip())
    assert not any(n.duplicate_of for n in graph.nodes)


def test_config_unknown_key(conll, capsys, tmp_path):
    cfg = tmp_path / "props.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(["convert", "-i", conll("said_tall"), "--config", str(cfg)], capsys)
    assert code == 2 and "colour" in err


def test_disable_rule_and_raising_lexicon(conll, capsys, tmp_path):
    _, out, _ = run(["extract", "-i", conll("obama_washington"), "-f", "text", "--disable-rule", "U2"], capsys)
    assert "SameAs" not in out
    lex = tmp_path / "raise.txt"
    lex.write_text("want\n")
    _, out, _ = run(["extract", "-i", conll("want_to_be"), "-f", "text", "--raising-lexicon", str(lex)], capsys)
    assert "source=want" in out
    assert run(["convert", "-i", conll("said_tall"), "--disable-rule", "Q7"], capsys)[0] == 1


def test_lexicon_dir_environment(conll, capsys, tmp_path, monkeypatch):
    (tmp_path / "raising_verbs.txt").write_text("want\n")
    monkeypatch.setenv(LEXICON_ENV, str(tmp_path))
    _, out, _ = run(["extract", "-i", conll("want_to_be"), "-f", "text"], capsys)
    assert "source=want" in out


def test_match_bundled_corpus(capsys):
    code, out, _ = run(["match"], capsys)
    assert code == 0
    assert [line.rsplit(None, 1)[0].strip() for line in out.splitlines()[1:]] == \
        ["Lexical sliding window", "Dependency units", "PROPS units"]
    code, out, _ = run(["match", "--mode", "props", "-f", "jsonl"], capsys)
    rec = json.loads(out.splitlines()[0])
    assert set(rec) == {"id", "gold", "choices"} and set(rec["choices"]) == {"props"}
    assert run(["match", "--items", "x.jsonl"], capsys)[0] == 2


def test_stdin_input(capsys, monkeypatch):
    code, out, _ = run(["convert"], capsys, stdin=serialize_conll(TREES["are_impatient"]), monkeypatch=monkeypatch)
    assert code == 0 and deserialize_json(out.strip()).sentence_id == "are_impatient"


def test_console_entry_point(tmp_path):
    path = tmp_path / "in.conll"
    path.write_text(serialize_conll(TREES["tall_boy"]))
    done = subprocess.run([sys.executable, "-m", "propsconv.cli", "extract", "-i", str(path), "-f", "text"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0
    assert "tall(the boy)" in done.stdout
