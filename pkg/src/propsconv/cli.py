"""Command-line interface: ``propsconv {convert,extract,eval,match,validate}``.

Exit status is 0 on success, 1 on bad input and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from importlib import resources
from itertools import islice
from pathlib import Path
from typing import Callable, Iterable, Iterator

from . import __version__
from .conll import ConllParseError, TreeStructureError, iter_conll, parse_conll, validate
from .converter import ConversionError, convert
from .estimator import PropsConverter
from .evaluation import AlignmentError, evaluate
from .extraction import ExtractionError, enumerate_propositions, propositions_jsonl, render_listing
from .graph import (GraphSchemaError, GraphStructureError, check_graph, deserialize_json,
                    render_dot, serialize_json)
from .matcher import (MODES, MissingParseError, UnitMatcher, accuracy_report, read_jsonl_items,
                      read_mctest)

INPUT_ERRORS = (ConllParseError, TreeStructureError, ConversionError, GraphSchemaError,
                GraphStructureError, AlignmentError, MissingParseError, ExtractionError,
                OSError, ValueError, KeyError)


class UsageError(Exception):
    pass


# -- config file ----------------------------------------------------------------

def read_config(path: str) -> dict[str, str]:
    """Read ``key = value`` lines (``#`` comments) into a dict."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    with open(path, encoding="utf-8") as fh:
        parser.read_string("[props]\n" + fh.read(), source=path)
    return {k.replace("-", "_"): v for k, v in parser["props"].items()}


def config_to_argv(config: dict[str, str], sub: argparse.ArgumentParser) -> list[str]:
    """Turn config entries into flags so argparse validates them; later real flags win."""
    actions = {a.dest: a for a in sub._actions if a.option_strings}
    argv = []
    for key, value in config.items():
        action = actions.get(key)
        if action is None:
            raise UsageError(f"unknown config key {key!r}")
        flag = action.option_strings[-1]
        if action.nargs == 0:
            if value.strip().lower() in ("1", "true", "yes", "on"):
                argv.append(flag)
        elif isinstance(action, argparse._AppendAction):
            for part in value.split(","):
                if part.strip():
                    argv += [flag, part.strip()]
        else:
            argv += [flag, value.strip()]
    return argv


# -- io helpers -------------------------------------------------------------

@contextmanager
def open_in(path: str | None):
    if path in (None, "-"):
        yield sys.stdin
    else:
        with open(path, encoding="utf-8") as fh:
            yield fh


@contextmanager
def open_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def read_graphs(stream) -> Iterator:
    for line_no, line in enumerate(stream, start=1):
        if line.strip():
            try:
                yield deserialize_json(line)
            except GraphStructureError as exc:
                raise GraphStructureError([f"line {line_no}: {v}" for v in exc.violations]) from None
            except GraphSchemaError as exc:
                raise ValueError(f"line {line_no}: {exc}") from None


def ordered_map(fn: Callable, items: Iterable, jobs: int, chunk: int = 32) -> Iterator:
    """Map ``fn`` over ``items`` keeping input order; bounded look-ahead when parallel."""
    if jobs <= 1:
        yield from map(fn, items)
        return
    it = iter(items)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        while batch := list(islice(it, jobs * chunk)):
            yield from pool.map(fn, batch)


# -- workers (module level so they pickle) ------------------------------------

def _convert_worker(args):
    tree, config, fmt = args
    try:
        graph, _ = convert(tree, config)
    except ConversionError as exc:
        return ("error", str(exc))
    if fmt == "jsonl":
        text = serialize_json(graph) + "\n"
    elif fmt == "json":
        text = json.dumps(json.loads(serialize_json(graph)), indent=2, sort_keys=True,
                          ensure_ascii=False) + "\n"
    elif fmt == "dot":
        text = render_dot(graph)
    else:
        text = f"# {graph.sentence_id}\n" + render_listing(enumerate_propositions(graph), True) + "\n"
    return ("ok", text, render_dot(graph), graph.sentence_id)


def _extract_worker(args):
    tree, config, fmt = args
    try:
        graph, _ = convert(tree, config)
        props = enumerate_propositions(graph)
    except (ConversionError, ExtractionError) as exc:
        return ("error", str(exc))
    return ("ok", _format_props(graph.sentence_id, props, fmt))


def _format_props(sentence_id, props, fmt):
    if fmt == "jsonl":
        return propositions_jsonl(sentence_id, props) + "\n"
    return f"# {sentence_id}\n" + render_listing(props, pretty=(fmt == "pretty")) + "\n"


# -- subcommands -------------------------------------------------------------

def _config(args):
    return PropsConverter(disabled_rules=tuple(args.disable_rule or ()),
                          lexicon_dir=args.lexicon_dir,
                          raising_lexicon=args.raising_lexicon,
                          propagation_cap=args.propagation_cap).build_config()


def cmd_convert(args) -> int:
    config = _config(args)
    dot_dir = Path(args.dot_dir) if args.dot_dir else None
    if dot_dir:
        dot_dir.mkdir(parents=True, exist_ok=True)
    with open_in(args.input) as src, open_out(args.output) as out:
        work = ((tree, config, args.format) for tree in iter_conll(src))
        for result in ordered_map(_convert_worker, work, args.jobs):
            if result[0] == "error":
                raise ConversionError(result[1])
            out.write(result[1])
            if dot_dir:
                (dot_dir / f"{result[3]}.dot").write_text(result[2], encoding="utf-8")
    return 0


def cmd_extract(args) -> int:
    with open_in(args.input) as src, open_out(args.output) as out:
        if args.from_graphs:
            for graph in read_graphs(src):
                out.write(_format_props(graph.sentence_id, enumerate_propositions(graph), args.format))
            return 0
        config = _config(args)
        work = ((tree, config, args.format) for tree in iter_conll(src))
        for result in ordered_map(_extract_worker, work, args.jobs):
            if result[0] == "error":
                raise ConversionError(result[1])
            out.write(result[1])
    return 0


def cmd_eval(args) -> int:
    if args.gold == "-" and args.pred == "-":
        raise UsageError("only one of --gold and --pred may read stdin")
    with open_in(args.gold) as g:
        gold = list(read_graphs(g))
    with open_in(args.pred) as p:
        pred = list(read_graphs(p))
    report = evaluate(gold, pred, set_mode=args.set_intersection)
    with open_out(args.output) as out:
        out.write(report.to_json() + "\n" if args.format == "json" else report.table(args.name))
    return 0


def _bundled(name: str) -> str:
    return resources.files("propsconv").joinpath("data", "minicorpus", name).read_text("utf-8")


def cmd_match(args) -> int:
    if args.parses:
        with open(args.parses, encoding="utf-8") as fh:
            parses = {t.sentence_id: t for t in parse_conll(fh)}
    elif args.items or args.mctest:
        raise UsageError("--parses is required with --items or --mctest")
    else:
        parses = {t.sentence_id: t for t in parse_conll(_bundled("minicorpus.conll"))}
    if args.mctest:
        items = read_mctest(args.mctest, args.answers, parses)
    elif args.items:
        with open(args.items, encoding="utf-8") as fh:
            items = read_jsonl_items(fh, parses)
    else:
        items = read_jsonl_items(_bundled("minicorpus.jsonl").splitlines(), parses)
    modes = MODES if args.mode == "all" else (args.mode,)
    params = dict(set_intersection=args.set_intersection, window=args.window, config=_config(args))
    with open_out(args.output) as out:
        if args.format == "jsonl":
            matchers = {m: UnitMatcher(mode=m, **params).fit() for m in modes}
            for item in items:
                rec = {"id": item.id, "gold": item.answer,
                       "choices": {m: matchers[m].answer(item) for m in modes}}
                out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            out.write(accuracy_report(items, modes, **params))
    return 0


def cmd_validate(args) -> int:
    problems = 0
    with open_in(args.input) as src:
        text = src.read()
    kind = args.kind
    if kind == "auto":
        kind = "graphs" if text.lstrip().startswith("{") else "conll"
    if kind == "graphs":
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                graph = deserialize_json(line)
            except (GraphSchemaError, GraphStructureError) as exc:
                print(f"line {line_no}: {exc}", file=sys.stderr)
                problems += 1
                continue
            for v in check_graph(graph):
                print(f"{graph.sentence_id}: {v}", file=sys.stderr)
                problems += 1
        count = sum(1 for line in text.splitlines() if line.strip())
    else:
        count = 0
        for tree in iter_conll(text, check=False):
            count += 1
            for v in validate(tree).violations:
                print(f"{tree.sentence_id}: {v}", file=sys.stderr)
                problems += 1
    print(f"{count} {'graphs' if kind == 'graphs' else 'trees'} checked, {problems} problems",
          file=sys.stderr)
    return 1 if problems else 0


# -- parser -------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, conversion: bool = True) -> None:
    p.add_argument("--input", "-i", default="-", help="input file (default: stdin)")
    p.add_argument("--output", "-o", default="-", help="output file (default: stdout)")
    p.add_argument("--config", help="key=value file merged under the flags")
    if conversion:
        p.add_argument("--jobs", "-j", type=int, default=1, help="worker processes")
        p.add_argument("--raising-lexicon", help="replacement raising-verb list")
        p.add_argument("--lexicon-dir", help="directory of lexicon files (also $PROPS_LEXICON_DIR)")
        p.add_argument("--disable-rule", action="append", metavar="NAME",
                       help="rule (e.g. H3) or family (e.g. heuristics) to skip; repeatable")
        p.add_argument("--propagation-cap", type=int, default=64,
                       help="maximum propagated edges per sentence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="propsconv",
                                     description="Convert dependency trees into proposition graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("convert", help="CoNLL trees to proposition graphs")
    _add_common(p)
    p.add_argument("--format", "-f", choices=("jsonl", "json", "dot", "pretty"), default="jsonl")
    p.add_argument("--dot-dir", help="also write one DOT file per sentence here")
    p.set_defaults(func=cmd_convert)

    p = subs.add_parser("extract", help="list the propositions of each sentence")
    _add_common(p)
    p.add_argument("--format", "-f", choices=("pretty", "text", "jsonl"), default="pretty")
    p.add_argument("--from-graphs", action="store_true", help="input is JSONL graphs, not CoNLL")
    p.set_defaults(func=cmd_extract)

    p = subs.add_parser("eval", help="score predicted graphs against gold graphs")
    p.add_argument("--gold", required=True, help="gold JSONL graphs ('-' for stdin)")
    p.add_argument("--pred", required=True, help="predicted JSONL graphs ('-' for stdin)")
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--config", help="key=value file merged under the flags")
    p.add_argument("--format", "-f", choices=("table", "json"), default="table")
    p.add_argument("--name", default="corpus", help="row name in the table")
    p.add_argument("--set-intersection", action="store_true", help="set instead of multiset overlap")
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("match", help="answer multiple-choice questions by unit matching")
    _add_common(p)
    p.add_argument("--items", help="JSONL question items (default: bundled mini-corpus)")
    p.add_argument("--mctest", help="MCTest .tsv file")
    p.add_argument("--answers", help="MCTest .ans file")
    p.add_argument("--parses", help="CoNLL parses keyed by sentence id")
    p.add_argument("--mode", choices=MODES + ("all",), default="all")
    p.add_argument("--window", type=int, help="lexical window length (default: answer length)")
    p.add_argument("--set-intersection", action="store_true", help="set instead of multiset overlap")
    p.add_argument("--format", "-f", choices=("table", "jsonl"), default="table")
    p.set_defaults(func=cmd_match)

    p = subs.add_parser("validate", help="check CoNLL trees or JSONL graphs")
    _add_common(p, conversion=False)
    p.add_argument("--kind", choices=("auto", "conll", "graphs"), default="auto")
    p.set_defaults(func=cmd_validate)
    return parser


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sub = parser._subparsers._group_actions[0].choices[args.command]
        try:
            extra = config_to_argv(read_config(args.config), sub)
        except (OSError, configparser.Error) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        args = parser.parse_args([args.command] + extra + argv[argv.index(args.command) + 1:])
    if getattr(args, "jobs", 1) < 1:
        raise UsageError("--jobs must be at least 1")
    return args


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else 2
    except UsageError as exc:
        print(f"propsconv: error: {exc}", file=sys.stderr)
        return 2
    except INPUT_ERRORS as exc:
        print(f"propsconv: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
