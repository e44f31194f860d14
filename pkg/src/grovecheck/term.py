"""Sorted term language for theory expressions.

A term denotes a morphism ``n -> p``.  The core constructors are variables,
letters, identities, distinguished morphisms, zeros, composition, tupling,
sum and dagger.  ``Oplus``, ``Star`` and ``Pair`` are sugar that
:func:`desugar` eliminates.

Concrete syntax (ASCII)::

    term := term '+' term | term '(+)' term | term '.' term
          | '<' term (',' term)* '>' | 'dg' '(' term ')' | 'st' '(' term ')'
          | name | 'id' '(' nat ')' | 'pi' '(' nat ',' nat ')'
          | 'zero' '(' nat ',' nat ')' | '(' term ')'

Composition binds tighter than ``(+)``, which binds tighter than ``+``; all
three are left associative.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Union

__all__ = [
    "Sort", "Signature", "BaseMorphism", "Var", "Letter", "Id", "Dist", "Zero",
    "Comp", "Tuple", "Sum", "Dagger", "Oplus", "Star", "Pair", "Term",
    "TermError", "ParseError", "SortError", "Document", "parse", "parse_file",
    "infer_sort", "sort_table", "desugar", "free_vars", "pretty", "is_core",
    "term_size", "subterms",
]


class TermError(Exception):
    pass


class ParseError(TermError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class SortError(TermError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        super().__init__(f"{message} at subterm {list(self.path)}")


@dataclass(frozen=True, order=True)
class Sort:
    source: int
    target: int

    def __post_init__(self):
        if self.source < 0 or self.target < 0:
            raise ValueError(f"negative sort {self.source} -> {self.target}")

    def __str__(self):
        return f"{self.source} -> {self.target}"


@dataclass(frozen=True)
class Signature:
    """Ranked letters plus sorted morphism variables; names are shared."""

    letters: Dict[str, int] = field(default_factory=dict)
    variables: Dict[str, Sort] = field(default_factory=dict)

    def __post_init__(self):
        clash = set(self.letters) & set(self.variables)
        if clash:
            raise TermError(f"names declared twice: {sorted(clash)}")
        for name, rank in self.letters.items():
            if rank < 0:
                raise TermError(f"letter {name} has negative rank")
        for name in list(self.letters) + list(self.variables):
            if not _NAME.fullmatch(name) or name in _KEYWORDS or _VARTOKEN.fullmatch(name):
                raise TermError(f"illegal name {name!r}")

    def __hash__(self):
        return hash((tuple(sorted(self.letters.items())),
                     tuple(sorted(self.variables.items()))))

    def lookup(self, name):
        if name in self.letters:
            return Letter(name)
        if name in self.variables:
            return Var(name)
        raise TermError(f"unknown identifier {name}")


@dataclass(frozen=True)
class BaseMorphism:
    """A function ``[n] -> [p]`` stored as the 1-based image sequence."""

    images: tuple
    target: int

    def __post_init__(self):
        for i in self.images:
            if not 1 <= i <= self.target:
                raise ValueError(f"image {i} outside [1..{self.target}]")

    @property
    def sort(self):
        return Sort(len(self.images), self.target)

    def then(self, other: "BaseMorphism") -> "BaseMorphism":
        if other.sort.source != self.target:
            raise ValueError("incompatible base morphisms")
        return BaseMorphism(tuple(other.images[i - 1] for i in self.images), other.target)

    def as_term(self):
        if not self.images:
            return Zero(0, self.target)
        if len(self.images) == 1:
            return Dist(self.images[0], self.target)
        return Tuple(tuple(Dist(i, self.target) for i in self.images))


# --------------------------------------------------------------------------
# Abstract syntax

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Letter:
    name: str


@dataclass(frozen=True)
class Id:
    n: int


@dataclass(frozen=True)
class Dist:
    i: int
    n: int


@dataclass(frozen=True)
class Zero:
    n: int
    p: int


@dataclass(frozen=True)
class Comp:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Tuple:
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Dagger:
    body: "Term"


@dataclass(frozen=True)
class Oplus:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Star:
    body: "Term"


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


Term = Union[Var, Letter, Id, Dist, Zero, Comp, Tuple, Sum, Dagger, Oplus, Star, Pair]

_ATOMS = (Var, Letter, Id, Dist, Zero)
_SUGAR = (Oplus, Star, Pair)


def children(t):
    if isinstance(t, (Comp, Sum, Oplus, Pair)):
        return (t.left, t.right)
    if isinstance(t, (Dagger, Star)):
        return (t.body,)
    if isinstance(t, Tuple):
        return t.items
    return ()


def subterms(t, path=()) -> Iterator:
    """Yield ``(path, subterm)`` in preorder."""
    yield path, t
    for k, c in enumerate(children(t)):
        yield from subterms(c, path + (k,))


def term_size(t) -> int:
    return sum(1 for _ in subterms(t))


def is_core(t) -> bool:
    return not any(isinstance(s, _SUGAR) for _, s in subterms(t))


# --------------------------------------------------------------------------
# Sorts

def _infer(t, sig, path, table):
    if isinstance(t, Var):
        if t.name not in sig.variables:
            raise SortError(f"unknown variable {t.name}", path)
        s = sig.variables[t.name]
    elif isinstance(t, Letter):
        if t.name not in sig.letters:
            raise SortError(f"unknown letter {t.name}", path)
        s = Sort(1, sig.letters[t.name])
    elif isinstance(t, Id):
        s = Sort(t.n, t.n)
    elif isinstance(t, Dist):
        if not 1 <= t.i <= t.n:
            raise SortError(f"pi({t.i},{t.n}) needs 1 <= i <= n", path)
        s = Sort(1, t.n)
    elif isinstance(t, Zero):
        s = Sort(t.n, t.p)
    elif isinstance(t, Comp):
        a = _infer(t.left, sig, path + (0,), table)
        b = _infer(t.right, sig, path + (1,), table)
        if a.target != b.source:
            raise SortError(f"composition of {a} with {b}", path)
        s = Sort(a.source, b.target)
    elif isinstance(t, (Tuple, Pair)):
        items = children(t)
        if not items:
            raise SortError("empty tuple; write zero(0,p)", path)
        sorts = [_infer(c, sig, path + (k,), table) for k, c in enumerate(items)]
        targets = {x.target for x in sorts}
        if len(targets) != 1:
            raise SortError(f"tuple components disagree on target: {[str(x) for x in sorts]}", path)
        s = Sort(sum(x.source for x in sorts), sorts[0].target)
    elif isinstance(t, Sum):
        a = _infer(t.left, sig, path + (0,), table)
        b = _infer(t.right, sig, path + (1,), table)
        if a != b:
            raise SortError(f"sum of {a} and {b}", path)
        s = a
    elif isinstance(t, Dagger):
        a = _infer(t.body, sig, path + (0,), table)
        if a.target < a.source:
            raise SortError(f"dagger needs target >= source, got {a}", path)
        s = Sort(a.source, a.target - a.source)
    elif isinstance(t, Star):
        a = _infer(t.body, sig, path + (0,), table)
        if a.target < a.source:
            raise SortError(f"star needs target >= source, got {a}", path)
        s = a
    elif isinstance(t, Oplus):
        a = _infer(t.left, sig, path + (0,), table)
        b = _infer(t.right, sig, path + (1,), table)
        s = Sort(a.source + b.source, a.target + b.target)
    else:
        raise TypeError(f"not a term: {t!r}")
    if table is not None:
        table[path] = s
    return s


def infer_sort(t, sig: Signature) -> Sort:
    return _infer(t, sig, (), None)


def sort_table(t, sig: Signature) -> Dict[tuple, Sort]:
    """Sort of every subterm, keyed by its child-index path."""
    table: Dict[tuple, Sort] = {}
    _infer(t, sig, (), table)
    return table


# --------------------------------------------------------------------------
# Desugaring

def _injection(offset, width, total):
    """The tupling of ``pi(offset+1,total) .. pi(offset+width,total)``."""
    if width == 0:
        return Zero(0, total)
    if width == total:
        return Id(total)
    if width == 1:
        return Dist(offset + 1, total)
    return Tuple(tuple(Dist(offset + k, total) for k in range(1, width + 1)))


def _then(t, inj):
    if isinstance(inj, Id):
        return t
    if isinstance(t, Id):
        return inj
    return Comp(t, inj)


def _rows(t, s):
    """Row terms ``1 -> p`` of a core term of sort ``s``."""
    if s.source == 1:
        return [t]
    if isinstance(t, Tuple):
        return list(t.items)
    return [Comp(Dist(i, s.source), t) for i in range(1, s.source + 1)]


def _pairing(parts, target):
    rows = []
    for t, s in parts:
        if s.source:
            rows.extend(_rows(t, s))
    live = [(t, s) for t, s in parts if s.source]
    if not live:
        return Zero(0, target)
    if len(live) == 1:
        return live[0][0]
    return Tuple(tuple(rows))


def _desugar(t, sig):
    if isinstance(t, _ATOMS):
        return t, infer_sort(t, sig)
    if isinstance(t, Comp):
        (a, sa), (b, sb) = _desugar(t.left, sig), _desugar(t.right, sig)
        if sa.target != sb.source:
            raise SortError(f"composition of {sa} with {sb}")
        return Comp(a, b), Sort(sa.source, sb.target)
    if isinstance(t, Sum):
        (a, sa), (b, sb) = _desugar(t.left, sig), _desugar(t.right, sig)
        if sa != sb:
            raise SortError(f"sum of {sa} and {sb}")
        return Sum(a, b), sa
    if isinstance(t, Dagger):
        a, sa = _desugar(t.body, sig)
        if sa.target < sa.source:
            raise SortError(f"dagger needs target >= source, got {sa}")
        return Dagger(a), Sort(sa.source, sa.target - sa.source)
    if isinstance(t, (Tuple, Pair)):
        parts = [_desugar(c, sig) for c in children(t)]
        if not parts:
            raise SortError("empty tuple; write zero(0,p)")
        target = parts[0][1].target
        if any(s.target != target for _, s in parts):
            raise SortError("tuple components disagree on target")
        source = sum(s.source for _, s in parts)
        if isinstance(t, Tuple) and all(s.source == 1 for _, s in parts):
            return Tuple(tuple(a for a, _ in parts)), Sort(source, target)
        return _pairing(parts, target), Sort(source, target)
    if isinstance(t, Oplus):
        (a, sa), (b, sb) = _desugar(t.left, sig), _desugar(t.right, sig)
        total = sa.target + sb.target
        left = _then(a, _injection(0, sa.target, total))
        right = _then(b, _injection(sa.target, sb.target, total))
        ls, rs = Sort(sa.source, total), Sort(sb.source, total)
        return _pairing([(left, ls), (right, rs)], total), Sort(sa.source + sb.source, total)
    if isinstance(t, Star):
        f, s = _desugar(t.body, sig)
        n, p = s.source, s.target - s.source
        if p < 0:
            raise SortError(f"star needs target >= source, got {s}")
        # (f . (1_n (+) 0_n (+) 1_p) + (0_n (+) 1_n (+) 0_p))^dagger
        shift = Oplus(Oplus(Id(n), Zero(0, n)), Id(p))
        inject = Oplus(Oplus(Zero(0, n), Id(n)), Zero(0, p))
        body, _ = _desugar(Sum(Comp(f, shift), inject), sig)
        return Dagger(body), s
    raise TypeError(f"not a term: {t!r}")


def desugar(t, sig: Signature):
    """Rewrite ``t`` into core constructors only; the sort is unchanged."""
    return _desugar(t, sig)[0]


def free_vars(t, sig: Signature):
    return frozenset((s.name, sig.variables[s.name])
                     for _, s in subterms(t) if isinstance(s, Var))


# --------------------------------------------------------------------------
# Printing

_PREC = {Sum: 1, Oplus: 2, Comp: 3}
_OPS = {Sum: " + ", Oplus: " (+) ", Comp: " . "}


def pretty(t, prec=0) -> str:
    if isinstance(t, (Var, Letter)):
        return t.name
    if isinstance(t, Id):
        return f"id({t.n})"
    if isinstance(t, Dist):
        return f"pi({t.i},{t.n})"
    if isinstance(t, Zero):
        return f"zero({t.n},{t.p})"
    if isinstance(t, Dagger):
        return f"dg({pretty(t.body)})"
    if isinstance(t, Star):
        return f"st({pretty(t.body)})"
    if isinstance(t, Tuple):
        return "<" + ", ".join(pretty(c) for c in t.items) + ">"
    if isinstance(t, Pair):
        return "<" + pretty(t.left) + ", " + pretty(t.right) + ">"
    level = _PREC[type(t)]
    text = pretty(t.left, level) + _OPS[type(t)] + pretty(t.right, level + 1)
    return f"({text})" if level < prec else text


# --------------------------------------------------------------------------
# Lexing and parsing

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_VARTOKEN = re.compile(r"x[0-9]+")
_KEYWORDS = {"id", "pi", "zero", "dg", "st", "def", "alphabet", "vars", "interp"}
_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<string>"[^"\n]*")
  | (?P<oplus>\(\+\))
  | (?P<arrow>->)
  | (?P<nat>[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[()<>,.+{}:;=])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    out = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            if kind == "punct":
                kind = m.group()
            elif kind == "oplus":
                kind = "(+)"
            elif kind == "arrow":
                kind = "->"
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def accept(self, kind, text=None):
        tok = self.peek
        if tok.kind == kind and (text is None or tok.text == text):
            return self.next()
        return None

    def expect(self, kind, text=None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            got = self.peek
            want = text or kind
            raise ParseError(f"expected {want!r}, found {got.text or 'end of input'!r}",
                             got.line, got.column)
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek
        return ParseError(message, tok.line, tok.column)


class _TermParser:
    def __init__(self, stream: TokenStream, sig: Signature):
        self.ts = stream
        self.sig = sig

    def term(self):
        t = self.oplus()
        while self.ts.accept("+"):
            t = Sum(t, self.oplus())
        return t

    def oplus(self):
        t = self.comp()
        while self.ts.accept("(+)"):
            t = Oplus(t, self.comp())
        return t

    def comp(self):
        t = self.primary()
        while self.ts.accept("."):
            t = Comp(t, self.primary())
        return t

    def nat(self):
        return int(self.ts.expect("nat").text)

    def primary(self):
        ts = self.ts
        tok = ts.peek
        if ts.accept("("):
            t = self.term()
            ts.expect(")")
            return t
        if ts.accept("<"):
            items = [self.term()]
            while ts.accept(","):
                items.append(self.term())
            ts.expect(">")
            return Tuple(tuple(items))
        if tok.kind != "name":
            raise ts.error(f"unexpected {tok.text or 'end of input'!r}")
        ts.next()
        word = tok.text
        if word in ("dg", "st"):
            ts.expect("(")
            body = self.term()
            ts.expect(")")
            return Dagger(body) if word == "dg" else Star(body)
        if word == "id":
            ts.expect("(")
            n = self.nat()
            ts.expect(")")
            return Id(n)
        if word in ("pi", "zero"):
            ts.expect("(")
            a = self.nat()
            ts.expect(",")
            b = self.nat()
            ts.expect(")")
            if word == "zero":
                return Zero(a, b)
            if not 1 <= a <= b:
                raise ParseError(f"arity mismatch in pi({a},{b})", tok.line, tok.column)
            return Dist(a, b)
        try:
            return self.sig.lookup(word)
        except TermError as exc:
            raise ParseError(str(exc), tok.line, tok.column) from None


def parse(text: str, sig: Signature):
    ts = TokenStream(tokenize(text))
    t = _TermParser(ts, sig).term()
    if ts.peek.kind != "eof":
        raise ts.error(f"trailing input {ts.peek.text!r}")
    return t


@dataclass
class Document:
    """A parsed input file: declarations plus named term definitions."""

    signature: Signature
    definitions: Dict[str, object]

    def term(self, name):
        if name not in self.definitions:
            raise TermError(f"no definition named {name!r}")
        return self.definitions[name]


def parse_file(text: str) -> Document:
    ts = TokenStream(tokenize(text))
    letters: Dict[str, int] = {}
    variables: Dict[str, Sort] = {}
    defs: Dict[str, object] = {}
    sig: Optional[Signature] = None
    while ts.peek.kind != "eof":
        tok = ts.expect("name")
        if tok.text == "alphabet":
            for name, tok2 in _decl_block(ts, lambda: int(ts.expect("nat").text)):
                if name in letters:
                    raise ParseError(f"duplicate letter {name}", tok2.line, tok2.column)
                letters[name] = tok2.value
            sig = None
        elif tok.text == "vars":
            def sort():
                a = int(ts.expect("nat").text)
                ts.expect("->")
                return Sort(a, int(ts.expect("nat").text))
            for name, tok2 in _decl_block(ts, sort):
                if name in variables:
                    raise ParseError(f"duplicate variable {name}", tok2.line, tok2.column)
                variables[name] = tok2.value
            sig = None
        elif tok.text == "def":
            name = ts.expect("name")
            ts.expect("=")
            if sig is None:
                try:
                    sig = Signature(dict(letters), dict(variables))
                except TermError as exc:
                    raise ParseError(str(exc), name.line, name.column) from None
            defs[name.text] = _TermParser(ts, sig).term()
            ts.expect(";")
        else:
            raise ts.error(f"unexpected {tok.text!r}; expected alphabet, vars or def", tok)
    try:
        sig = Signature(letters, variables)
    except TermError as exc:
        raise ParseError(str(exc)) from None
    return Document(sig, defs)


class _Valued:
    def __init__(self, tok, value):
        self.line, self.column, self.value = tok.line, tok.column, value


def _decl_block(ts, read_value):
    ts.expect("{")
    if ts.accept("}"):
        return
    while True:
        name = ts.expect("name")
        if name.text in _KEYWORDS:
            raise ts.error(f"reserved word {name.text!r}", name)
        ts.expect(":")
        yield name.text, _Valued(name, read_value())
        if ts.accept("}"):
            return
        ts.expect(",")
