"""Bounded power-set semantics over words and over ranked trees.

A morphism ``n -> p`` is an ``n``-tuple of finite sets of base objects.  Words
are tuples whose entries are letter names (``str``) or variable indices
(``int``, 1-based).  Trees are either a variable index or a tuple
``(label, child, ...)``.

Composition substitutes *each occurrence* of a variable independently: two
occurrences of ``x1`` may receive different members of the first component.
Uniform substitution would make ``f . (g + h) = f.g + f.h`` hold, which is
false in these models.

Every result is truncated to objects of size at most ``bound`` (word length,
tree node count).  Substitution never shrinks an object as long as no set
contains the empty word, so the truncated value is then exactly the
truncation of the true value, dagger included.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

from .term import (Comp, Dagger, Dist, Id, Letter, ParseError, Sum, Tuple, TokenStream,
                   Var, Zero, is_core, tokenize)

__all__ = [
    "WORD", "TREE", "LanguageMorphism", "SemanticsError", "size", "variables_of",
    "ps_compose", "ps_sum", "ps_dagger", "ps_identity", "ps_dist", "ps_zero", "ps_tuple",
    "ps_letter", "eval_term", "frontier", "truncate", "word_text", "tree_text",
    "object_text", "parse_word", "parse_tree", "parse_interp", "sort_key",
]

WORD = "word"
TREE = "tree"


class SemanticsError(ValueError):
    pass


# --------------------------------------------------------------------------
# Base objects

def size(obj, kind) -> int:
    """Word length or tree node count."""
    return len(obj) if kind == WORD else _tree_size(obj)


def _tree_size(t) -> int:
    if isinstance(t, int):
        return 1
    return 1 + sum(_tree_size(c) for c in t[1:])


def _tree_vars(t):
    if isinstance(t, int):
        yield t
    else:
        for c in t[1:]:
            yield from _tree_vars(c)


def variables_of(obj, kind) -> set:
    if kind == WORD:
        return {s for s in obj if isinstance(s, int)}
    return set(_tree_vars(obj))


def _measure(kind):
    return len if kind == WORD else _tree_size


@dataclass(frozen=True)
class LanguageMorphism:
    kind: str
    n: int
    p: int
    components: tuple

    def __post_init__(self):
        comps = tuple(frozenset(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.n:
            raise SemanticsError(f"{len(comps)} components for source {self.n}")
        if self.kind not in (WORD, TREE):
            raise SemanticsError(f"unknown kind {self.kind}")
        for comp in comps:
            for obj in comp:
                bad = [j for j in variables_of(obj, self.kind) if not 1 <= j <= self.p]
                if bad:
                    raise SemanticsError(f"variable x{bad[0]} outside 1..{self.p} in {object_text(obj, self.kind)}")

    def __str__(self):
        return "<" + ", ".join(
            "{" + ", ".join(object_text(o, self.kind) for o in sorted(c, key=sort_key(self.kind))) + "}"
            for c in self.components) + ">"


def truncate(L: LanguageMorphism, bound: Optional[int]) -> LanguageMorphism:
    if bound is None:
        return L
    m = _measure(L.kind)
    return LanguageMorphism(L.kind, L.n, L.p, [{o for o in c if m(o) <= bound} for c in L.components])


# --------------------------------------------------------------------------
# Substitution

def _buckets(objs, measure):
    """Objects grouped by size, smallest first."""
    by = defaultdict(list)
    for o in objs:
        by[measure(o)].append(o)
    return sorted(by.items())


def _extend(P, buckets, room, join):
    """Every ``join(prefix, obj)`` with total size within ``room``."""
    out = defaultdict(set)
    for lp, prefixes in P.items():
        for lw, objs in buckets:
            if room is not None and lp + lw > room:
                break
            out[lp + lw].update(join(pre, o) for pre in prefixes for o in objs)
    return out


class _Args:
    """The right-hand side of a composition, prepared for substitution.

    With ``delta`` given, only results that use at least one member of
    ``delta`` somewhere are produced (semi-naive iteration); ``full`` must
    then already contain ``delta``.
    """

    def __init__(self, full, measure, delta=None):
        self.mins = [min((measure(o) for o in c), default=None) for c in full]
        self.full = [_buckets(c, measure) for c in full]
        self.seminaive = delta is not None
        if delta is None:
            self.old, self.new = self.full, [[] for _ in full]
        else:
            self.old = [_buckets(c - d, measure) for c, d in zip(full, delta)]
            self.new = [_buckets(d, measure) for d in delta]


def _join(pre, w):
    return pre + w


def _subst_word(u, A: _Args, bound):
    """All words obtained from ``u`` by replacing each variable occurrence by a
    member of the corresponding component."""
    tail = [0] * (len(u) + 1)
    for i in range(len(u) - 1, -1, -1):
        s = u[i]
        m = A.mins[s - 1] if isinstance(s, int) else 1
        tail[i] = None if m is None or tail[i + 1] is None else m + tail[i + 1]
    if tail[0] is None:
        return set()
    # P0: prefixes built from old members only, P1: at least one new member used
    P0, P1 = {0: {()}}, {}
    for i, s in enumerate(u):
        room = None if bound is None else bound - tail[i + 1]
        if isinstance(s, int):
            j = s - 1
            if A.seminaive:
                P1 = _merge(_extend(P1, A.full[j], room, _join), _extend(P0, A.new[j], room, _join))
            P0 = _extend(P0, A.old[j], room, _join)
        else:
            letter = [(1, [(s,)])]
            P0 = _extend(P0, letter, room, _join)
            P1 = _extend(P1, letter, room, _join)
        if not P0 and not P1:
            return set()
    final = P1 if A.seminaive else P0
    return set().union(*final.values()) if final else set()


def _merge(a, b):
    for k, v in b.items():
        a[k] |= v
    return a


def _subst_tree(t, A: _Args, bound):
    """Substitution into a tree; returns (old-only, new-using) results by size."""
    if isinstance(t, int):
        j = t - 1
        pick = lambda bs: {sz: set(objs) for sz, objs in bs if bound is None or sz <= bound}
        return pick(A.old[j]), pick(A.new[j])
    kids = t[1:]
    need = [_min_tree(c, A.mins) for c in kids]
    if None in need or (bound is not None and 1 + sum(need) > bound):
        return {}, {}
    R0, R1 = {1: {(t[0],)}}, {}
    for k, child in enumerate(kids):
        rest = sum(need[k + 1:])
        room = None if bound is None else bound - rest
        sub_room = None if bound is None else bound - 1 - sum(need) + need[k]
        c0, c1 = _subst_tree(child, A, sub_room)
        b0 = sorted((sz, list(v)) for sz, v in c0.items())
        b1 = sorted((sz, list(v)) for sz, v in c1.items())
        both = sorted((sz, list(c0.get(sz, set()) | c1.get(sz, set()))) for sz in set(c0) | set(c1))
        R1 = _merge(_extend(R1, both, room, _tjoin), _extend(R0, b1, room, _tjoin))
        R0 = _extend(R0, b0, room, _tjoin)
        if not R0 and not R1:
            break
    return R0, R1


def _tjoin(partial, o):
    return partial + (o,)


def _min_tree(t, mins):
    if isinstance(t, int):
        return mins[t - 1]
    total = 1
    for c in t[1:]:
        m = _min_tree(c, mins)
        if m is None:
            return None
        total += m
    return total


def _compose(L: LanguageMorphism, A: _Args, q: int, bound) -> LanguageMorphism:
    out = []
    for c in L.components:
        acc = set()
        for u in c:
            if L.kind == WORD:
                acc |= _subst_word(u, A, bound)
            else:
                r0, r1 = _subst_tree(u, A, bound)
                for objs in (r1 if A.seminaive else r0).values():
                    acc |= objs
        out.append(acc)
    return LanguageMorphism(L.kind, L.n, q, out)


def ps_compose(L: LanguageMorphism, K: LanguageMorphism, bound: Optional[int] = None) -> LanguageMorphism:
    if L.kind != K.kind:
        raise SemanticsError("cannot compose word and tree languages")
    if L.p != K.n:
        raise SemanticsError(f"composition of {L.n} -> {L.p} with {K.n} -> {K.p}")
    return _compose(L, _Args(K.components, _measure(L.kind)), K.p, bound)


def ps_sum(L: LanguageMorphism, M: LanguageMorphism) -> LanguageMorphism:
    if (L.kind, L.n, L.p) != (M.kind, M.n, M.p):
        raise SemanticsError("sum of differently sorted morphisms")
    return LanguageMorphism(L.kind, L.n, L.p, [a | b for a, b in zip(L.components, M.components)])


def ps_zero(kind, n, p) -> LanguageMorphism:
    return LanguageMorphism(kind, n, p, [frozenset()] * n)


def ps_dist(kind, i, n) -> LanguageMorphism:
    if not 1 <= i <= n:
        raise SemanticsError(f"distinguished morphism {i}_{n} out of range")
    return LanguageMorphism(kind, 1, n, [{(i,) if kind == WORD else i}])


def ps_identity(kind, n) -> LanguageMorphism:
    return LanguageMorphism(kind, n, n, [{(i,) if kind == WORD else i} for i in range(1, n + 1)])


def ps_tuple(parts, p, kind) -> LanguageMorphism:
    comps = []
    for P in parts:
        if P.p != p or P.kind != kind:
            raise SemanticsError("tuple components disagree")
        comps.extend(P.components)
    return LanguageMorphism(kind, len(comps), p, comps)


def ps_letter(kind, name, rank) -> LanguageMorphism:
    """The letter as the single object ``name x1 .. xk``."""
    obj = (name,) + tuple(range(1, rank + 1))
    return LanguageMorphism(kind, 1, rank, [{obj}])


def ps_dagger(L: LanguageMorphism, bound: Optional[int]) -> LanguageMorphism:
    """Least solution of ``X = L . <X, 1_p>`` by Kleene iteration, truncated.

    Each round only substitutes combinations that use at least one object
    found in the previous round.
    """
    n, p = L.n, L.p - L.n
    if p < 0:
        raise SemanticsError(f"dagger needs target >= source, got {L.n} -> {L.p}")
    measure = _measure(L.kind)
    ident = ps_identity(L.kind, p).components
    X = [frozenset()] * n
    delta = None
    while True:
        if delta is None:
            A = _Args(tuple(X) + ident, measure)
        else:
            A = _Args(tuple(X) + ident, measure, tuple(delta) + (frozenset(),) * p)
        Y = _compose(L, A, p, bound).components
        delta = [y - x for x, y in zip(X, Y)]
        if not any(delta):
            return LanguageMorphism(L.kind, n, p, X)
        X = [x | d for x, d in zip(X, delta)]
        if bound is None and sum(len(c) for c in X) > 10 ** 6:
            raise SemanticsError("unbounded dagger does not converge; give a bound")


def eval_term(t, interp: Mapping[str, LanguageMorphism], bound: Optional[int], kind=WORD,
              sig=None) -> LanguageMorphism:
    """Evaluate a core term.  Letters absent from ``interp`` denote themselves."""

    def ev(t):
        if isinstance(t, Var):
            if t.name not in interp:
                raise SemanticsError(f"no interpretation for variable {t.name}")
            return truncate(_checked(t.name, interp[t.name]), bound)
        if isinstance(t, Letter):
            if t.name in interp:
                return truncate(_checked(t.name, interp[t.name]), bound)
            if sig is None or t.name not in sig.letters:
                raise SemanticsError(f"no rank known for letter {t.name}")
            return truncate(ps_letter(kind, t.name, sig.letters[t.name]), bound)
        if isinstance(t, Id):
            return ps_identity(kind, t.n)
        if isinstance(t, Dist):
            return ps_dist(kind, t.i, t.n)
        if isinstance(t, Zero):
            return ps_zero(kind, t.n, t.p)
        if isinstance(t, Comp):
            left = ev(t.left)
            used = set()
            for c in left.components:
                for obj in c:
                    used |= variables_of(obj, kind)
            return ps_compose(left, _partial(t.right, used), bound)
        if isinstance(t, Sum):
            return ps_sum(ev(t.left), ev(t.right))
        if isinstance(t, Dagger):
            return ps_dagger(ev(t.body), bound)
        if isinstance(t, Tuple):
            parts = [ev(c) for c in t.items]
            return ps_tuple(parts, parts[0].p, kind)
        raise SemanticsError(f"not a core term: {t!r}")

    def _partial(t, used):
        # only the tuple rows named by ``used`` can contribute to a composite
        n, p = sort_of(t)
        if not used:
            return ps_zero(kind, n, p)
        if isinstance(t, Tuple) and all(sort_of(c)[0] == 1 for c in t.items):
            return ps_tuple([ev(c) if i in used else ps_zero(kind, 1, p)
                             for i, c in enumerate(t.items, 1)], p, kind)
        return ev(t)

    def sort_of(t):
        if isinstance(t, (Var, Letter)):
            if t.name in interp:
                L = interp[t.name]
                return L.n, L.p
            if isinstance(t, Letter) and sig is not None and t.name in sig.letters:
                return 1, sig.letters[t.name]
            raise SemanticsError(f"no interpretation for {t.name}")
        if isinstance(t, Id):
            return t.n, t.n
        if isinstance(t, Dist):
            return 1, t.n
        if isinstance(t, Zero):
            return t.n, t.p
        if isinstance(t, Comp):
            return sort_of(t.left)[0], sort_of(t.right)[1]
        if isinstance(t, Sum):
            return sort_of(t.left)
        if isinstance(t, Dagger):
            n, m = sort_of(t.body)
            return n, m - n
        if isinstance(t, Tuple):
            sorts = [sort_of(c) for c in t.items]
            return sum(a for a, _ in sorts), sorts[0][1]
        raise SemanticsError(f"not a core term: {t!r}")

    def _checked(name, L):
        if L.kind != kind:
            raise SemanticsError(f"interpretation of {name} is a {L.kind} language")
        if sig is not None and name in sig.variables:
            s = sig.variables[name]
            if (L.n, L.p) != (s.source, s.target):
                raise SemanticsError(f"interpretation of {name} has sort {L.n} -> {L.p}, expected {s}")
        return L

    if not is_core(t):
        raise SemanticsError("desugar the term before evaluating it")
    return ev(t)


# --------------------------------------------------------------------------
# Frontier, text forms

def frontier(t) -> tuple:
    """Leaf labels of a ranked tree from left to right; variable leaves stay."""
    if isinstance(t, int):
        return (t,)
    if len(t) == 1:
        return (t[0],)
    return tuple(s for c in t[1:] for s in frontier(c))


def _sym_text(s):
    return f"x{s}" if isinstance(s, int) else s


def word_text(w) -> str:
    return " ".join(_sym_text(s) for s in w)


def tree_text(t) -> str:
    if isinstance(t, int):
        return f"x{t}"
    if len(t) == 1:
        return t[0]
    return f"{t[0]}(" + ", ".join(tree_text(c) for c in t[1:]) + ")"


def object_text(obj, kind) -> str:
    if kind == WORD:
        return '""' if not obj else word_text(obj)
    return tree_text(obj)


def sort_key(kind):
    m = _measure(kind)
    return lambda o: (m(o), object_text(o, kind))


_VAR = re.compile(r"x([0-9]+)")


def parse_word(text: str) -> tuple:
    """Space separated tokens; ``x<i>`` is a variable, anything else a letter."""
    out = []
    for tok in text.split():
        m = _VAR.fullmatch(tok)
        out.append(int(m.group(1)) if m else tok)
    return tuple(out)


def parse_tree(text: str):
    ts = TokenStream(tokenize(text))
    t = _tree(ts)
    if ts.peek.kind != "eof":
        raise ts.error(f"trailing input {ts.peek.text!r}")
    return t


def _tree(ts):
    name = ts.expect("name").text
    m = _VAR.fullmatch(name)
    if m:
        return int(m.group(1))
    kids = []
    if ts.accept("("):
        kids.append(_tree(ts))
        while ts.accept(","):
            kids.append(_tree(ts))
        ts.expect(")")
    return (name,) + tuple(kids)


def parse_interp(text: str, sig, kind=WORD) -> Dict[str, LanguageMorphism]:
    """Read ``interp { f = { "a x1", "b" }, g = < {..}, {..} > }``.

    A name of sort ``1 -> p`` takes one set; other sources take a ``<...>``
    tuple of sets.  Tree members use prefix form ``sigma(a, x1)``.
    """
    ts = TokenStream(tokenize(text))
    ts.expect("name", "interp")
    ts.expect("{")
    out: Dict[str, LanguageMorphism] = {}
    if ts.accept("}"):
        _end(ts)
        return out
    while True:
        tok = ts.expect("name")
        name = tok.text
        if name in sig.variables:
            s = sig.variables[name]
            n, p = s.source, s.target
        elif name in sig.letters:
            n, p = 1, sig.letters[name]
        else:
            raise ParseError(f"unknown identifier {name}", tok.line, tok.column)
        ts.expect("=")
        if ts.accept("<"):
            sets = [_set(ts, kind)]
            while ts.accept(","):
                sets.append(_set(ts, kind))
            ts.expect(">")
        else:
            sets = [_set(ts, kind)]
        if len(sets) != n:
            raise ParseError(f"{name} needs {n} component set(s), got {len(sets)}", tok.line, tok.column)
        try:
            out[name] = LanguageMorphism(kind, n, p, sets)
        except SemanticsError as exc:
            raise ParseError(f"{name}: {exc}", tok.line, tok.column) from None
        if ts.accept("}"):
            break
        ts.expect(",")
    _end(ts)
    return out


def _end(ts):
    if ts.peek.kind != "eof":
        raise ts.error(f"trailing input {ts.peek.text!r}")


def _set(ts, kind):
    ts.expect("{")
    members = set()
    if ts.accept("}"):
        return members
    while True:
        tok = ts.expect("string")
        body = tok.text[1:-1]
        try:
            members.add(parse_word(body) if kind == WORD else parse_tree(body))
        except ParseError as exc:
            raise ParseError(f"bad tree {body!r}: {exc}", tok.line, tok.column) from None
        if ts.accept("}"):
            return members
        ts.expect(",")
