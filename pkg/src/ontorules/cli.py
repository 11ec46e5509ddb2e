"""Command-line driver: extract, learn, infer, show.

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input,
3 inference stopped at the round limit (partial results are still written).
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from .dataset import Attribute, dataset_to_csv, extract_dataset
from .fuzzy import FuzzyConfig, annotate_rule, alpha_cut
from .induction import ALGORITHM_ID, LearnerConfig, learn_rules
from .inference import (FactsFormatError, format_facts, format_trace, infer, parse_facts,
                        parse_statement)
from .kb import KnowledgeBase, KnowledgeBaseError, Provenance, load, save, utc_now
from .ontology import OntologyError, guess_format, parse_ontology

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_ROUND_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _attribute(text):
    try:
        return Attribute.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ontorules", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="write the ontology's four-column dataset as CSV")
    p.add_argument("ontology")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.add_argument("--format", choices=["turtle", "json"], help="input format (default: by extension)")

    p = sub.add_parser(
        "learn", help="induce fuzzy rules into a knowledge base",
        description="Induce fuzzy rules from each ontology and add them to a KB file. "
                    "Several ontologies are learned from independently and their rule sets "
                    "merged rule by rule; the ontologies themselves are never merged.")
    p.add_argument("ontologies", nargs="+")
    p.add_argument("-o", "--output", required=True, help="KB file, updated if it exists")
    p.add_argument("--target", type=_attribute, action="append",
                   help="attribute to predict; repeatable (default: all four in order)")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--min-coverage", type=int, default=2)
    p.add_argument("--min-laplace", type=float, default=0.8)
    p.add_argument("--beam-width", type=int, default=5)
    p.add_argument("--max-antecedent", type=int, default=3)
    p.add_argument("--created-at", help="provenance timestamp (default: now, UTC)")
    p.add_argument("--format", choices=["turtle", "json"], help="input format (default: by extension)")

    p = sub.add_parser("infer", help="forward-chain a KB over a facts file")
    p.add_argument("kb")
    p.add_argument("--facts", required=True)
    p.add_argument("-o", "--output", help="fact base path (default: stdout)")
    p.add_argument("--trace", help="write derivations to this path")
    p.add_argument("--query", action="append", default=[], metavar="ATTR=VALUE",
                   help="only report these statements; repeatable")
    p.add_argument("--max-rounds", type=int, default=1000)

    p = sub.add_parser("show", help="pretty-print the rules of a KB")
    p.add_argument("kb")
    return parser


def _read(path, binary=False):
    try:
        with open(path, "rb" if binary else "r", **({} if binary else {"encoding": "utf-8"})) as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def write_atomic(path, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(path, text: str, stdout) -> None:
    if path:
        write_atomic(path, text.encode("utf-8"))
    else:
        stdout.write(text)


def _load_graph(path, fmt):
    try:
        return parse_ontology(_read(path), fmt or guess_format(path), source_id=path)
    except OntologyError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_kb(path):
    try:
        return load(_read(path, binary=True))
    except KnowledgeBaseError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_extract(args, stdout):
    dataset = extract_dataset(_load_graph(args.ontology, args.format))
    _emit(args.output, dataset_to_csv(dataset), stdout)
    return EXIT_OK


def cmd_learn(args, stdout):
    targets = args.target or list(Attribute)
    try:
        configs = [LearnerConfig(t, args.min_coverage, args.min_laplace, args.beam_width,
                                 args.max_antecedent) for t in targets]
        fconf = FuzzyConfig(args.alpha)
        created_at = args.created_at or utc_now()
        Provenance("x", ALGORITHM_ID, targets[0], created_at)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    graphs = [_load_graph(path, args.format) for path in args.ontologies]
    kb = _load_kb(args.output) if os.path.exists(args.output) else KnowledgeBase()
    for path, graph in zip(args.ontologies, graphs):
        dataset = extract_dataset(graph)
        if len(dataset) == 0:
            continue
        for config in configs:
            rules = [annotate_rule(r, dataset) for r in learn_rules(dataset, config)]
            prov = Provenance(path, ALGORITHM_ID, config.target, created_at)
            kb.add_rules(alpha_cut(rules, fconf.alpha), prov)
    write_atomic(args.output, save(kb))
    return EXIT_OK


def cmd_infer(args, stdout):
    kb = _load_kb(args.kb)
    try:
        facts = parse_facts(_read(args.facts))
    except FactsFormatError as exc:
        raise InputError(f"{args.facts}: {exc}") from None
    try:
        query = [parse_statement(q) for q in args.query]
    except ValueError as exc:
        raise UsageError(f"--query: {exc}") from None
    if args.max_rounds < 1:
        raise UsageError("--max-rounds must be positive")
    result = infer(kb, facts, args.max_rounds)
    _emit(args.output, format_facts(result.facts, query), stdout)
    if args.trace:
        write_atomic(args.trace, format_trace(result.derivations).encode("utf-8"))
    if not result.converged:
        print(f"ontorules: round limit of {args.max_rounds} reached before fixpoint; "
              "results are partial", file=sys.stderr)
        return EXIT_ROUND_LIMIT
    return EXIT_OK


def cmd_show(args, stdout):
    kb = _load_kb(args.kb)
    stdout.write("".join(f"{rule}\n" for rule in kb.rules))
    return EXIT_OK


COMMANDS = {"extract": cmd_extract, "learn": cmd_learn, "infer": cmd_infer, "show": cmd_show}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"ontorules: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())
