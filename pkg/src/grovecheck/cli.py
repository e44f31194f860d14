"""Command-line front end.

    grovecheck check FILE --lhs NAME --rhs NAME [--oracle N --seed S] [--json OUT]
    grovecheck eval FILE --term NAME --interp IFILE --max-len N
    grovecheck reduce FILE --term NAME [--dot OUT]
    grovecheck unfold FILE --term NAME --depth D [--dot OUT]
    grovecheck enumerate FILE --term NAME --max-len N

Exit status: 0 equivalent (or success), 1 not equivalent, 2 usage or input
error, 3 the bounded-semantics cross-check disagreed with the verdict.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
from typing import List, Optional

from . import encode as enc
from .decide import DecisionError, check_identity, compile_term, generic_interp, separates
from .semantics import (TREE, WORD, SemanticsError, eval_term, object_text, parse_interp,
                        sort_key)
from .simulation import SimulationError
from .synctree import GraphError, reduce, to_dot, unfold
from .randgen import random_interp
from .term import TermError, desugar, free_vars, parse_file

EXIT_EQUIVALENT = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_USAGE = 2
EXIT_DISCREPANCY = 3
ORACLE_BOUND = 8


class UsageError(Exception):
    pass


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grovecheck",
                                 description="Decide identities of regular language expressions.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide lhs = rhs over all language models")
    c.add_argument("file")
    c.add_argument("--lhs", required=True)
    c.add_argument("--rhs", required=True)
    c.add_argument("--oracle", type=_count, default=0, metavar="N",
                   help="also run N random bounded-semantics cross-checks")
    c.add_argument("--seed", type=_count, default=0)
    c.add_argument("--max-len", type=_count, default=ORACLE_BOUND,
                   help="size bound for the cross-checks")
    c.add_argument("--json", metavar="OUT", help="also write the verdict to this file")

    e = sub.add_parser("eval", help="bounded language of a term under an interpretation")
    e.add_argument("file")
    e.add_argument("--term", required=True)
    e.add_argument("--interp", required=True, metavar="IFILE")
    e.add_argument("--max-len", type=_count, required=True)
    e.add_argument("--json", metavar="OUT")

    r = sub.add_parser("reduce", help="reduced process graph of a term, as DOT")
    r.add_argument("file")
    r.add_argument("--term", required=True)
    r.add_argument("--dot", metavar="OUT")

    u = sub.add_parser("unfold", help="depth-bounded unfolding of a term, as DOT")
    u.add_argument("file")
    u.add_argument("--term", required=True)
    u.add_argument("--depth", type=_count, required=True)
    u.add_argument("--dot", metavar="OUT")

    n = sub.add_parser("enumerate", help="words of the context-free image of a term")
    n.add_argument("file")
    n.add_argument("--term", required=True)
    n.add_argument("--max-len", type=_count, required=True)
    n.add_argument("--json", metavar="OUT")
    return ap


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _load(path: str):
    return parse_file(_read(path))


def _term(doc, name):
    if name not in doc.definitions:
        raise UsageError(f"no definition named {name}")
    return doc.term(name)


def _graph(doc, name):
    t = desugar(_term(doc, name), doc.signature)
    names = dict(free_vars(t, doc.signature))
    _, interp = generic_interp(names, reserved=set(doc.signature.letters) | set(doc.signature.variables))
    return compile_term(t, interp, doc.signature)


def _emit(text: str, path: Optional[str], out):
    if path:
        _write(path, text)
    else:
        out.write(text)


# --------------------------------------------------------------------------
# Commands

def cmd_check(args, out) -> int:
    doc = _load(args.file)
    sig = doc.signature
    lhs, rhs = _term(doc, args.lhs), _term(doc, args.rhs)
    verdict = check_identity(lhs, rhs, sig)
    text = verdict.to_json()
    out.write(text + "\n")
    if args.json:
        _write(args.json, text + "\n")
    if args.oracle:
        problem = _cross_check(verdict, lhs, rhs, sig, args.oracle, args.seed, args.max_len)
        if problem:
            print(f"discrepancy: {problem}", file=sys.stderr)
            return EXIT_DISCREPANCY
    return EXIT_EQUIVALENT if verdict.equivalent else EXIT_NOT_EQUIVALENT


def _cross_check(verdict, lhs, rhs, sig, samples, seed, bound) -> Optional[str]:
    if not verdict.equivalent:
        if not verdict.witness_holds():
            return "witness word is not separated by the encoded grammars"
        if not separates(verdict, lhs, rhs, sig):
            return "witness word does not separate the terms under the reported interpretation"
        return None
    rng = random.Random(seed)
    L, R = desugar(lhs, sig), desugar(rhs, sig)
    names = dict(free_vars(L, sig) | free_vars(R, sig))
    for k in range(samples):
        kind = WORD if k % 2 == 0 else TREE
        interp = random_interp(rng, names, kind)
        a, b = eval_term(L, interp, bound, kind, sig), eval_term(R, interp, bound, kind, sig)
        if a != b:
            return f"{kind} semantics differ at sample {k + 1}: {a} vs {b}"
    return None


_TREE_MEMBER = re.compile(r'"[^"]*\(')


def cmd_eval(args, out) -> int:
    doc = _load(args.file)
    sig = doc.signature
    t = desugar(_term(doc, args.term), sig)
    text = _read(args.interp)
    kind = TREE if _TREE_MEMBER.search(text) else WORD
    interp = parse_interp(text, sig, kind)
    missing = sorted(name for name, _ in free_vars(t, sig) if name not in interp)
    if missing:
        raise UsageError(f"interpretation does not cover variable {missing[0]}")
    value = eval_term(t, interp, args.max_len, kind, sig)
    listing = [sorted(c, key=sort_key(kind)) for c in value.components]
    lines = []
    for i, objs in enumerate(listing, 1):
        lines.append(f"component {i}:")
        lines += [object_text(o, kind) if o else '""' for o in objs]
    out.write("".join(line + "\n" for line in lines))
    if args.json:
        _write(args.json, json.dumps([[object_text(o, kind) for o in objs] for objs in listing]) + "\n")
    return 0


def cmd_reduce(args, out) -> int:
    doc = _load(args.file)
    _emit(to_dot(reduce(_graph(doc, args.term)), args.term), args.dot, out)
    return 0


def cmd_unfold(args, out) -> int:
    doc = _load(args.file)
    _emit(to_dot(unfold(_graph(doc, args.term), args.depth), args.term), args.dot, out)
    return 0


def cmd_enumerate(args, out) -> int:
    doc = _load(args.file)
    G = enc.encode_unary(_graph(doc, args.term))
    langs = enc.cfg_enumerate(enc.encode_cfg(G), args.max_len)
    if len(langs) == 1:
        out.write(enc.words_text(langs[0]))
    else:
        for i, words in enumerate(langs, 1):
            out.write(f"component {i}:\n" + enc.words_text(words))
    if args.json:
        _write(args.json, json.dumps([enc.words_text(w).splitlines() for w in langs]) + "\n")
    return 0


COMMANDS = {"check": cmd_check, "eval": cmd_eval, "reduce": cmd_reduce,
            "unfold": cmd_unfold, "enumerate": cmd_enumerate}

_INPUT_ERRORS = (UsageError, TermError, SemanticsError, DecisionError, GraphError,
                 SimulationError, enc.EncodingError)


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        return COMMANDS[args.command](args, out)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
