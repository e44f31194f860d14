"""Seeded random generators: graphs, sorted terms, rewrites and interpretations.

Everything takes an explicit :class:`random.Random` so that runs are
reproducible.  Term rewrites only apply laws that hold in every model, so a
term and its rewrite must always be judged equivalent.
"""
from __future__ import annotations

import random
from typing import Dict, List, Mapping, Optional

from .semantics import TREE, WORD, LanguageMorphism
from .synctree import Action, Edge, Exit, ProcessGraph, _make
from .term import (Comp, Dagger, Dist, Id, Letter, Pair, Signature, Sort, Star, Sum, Tuple, Var,
                   Zero, children, infer_sort, sort_table, subterms)

__all__ = [
    "DEFAULT_ALPHABET", "random_graph", "random_unary_graph", "random_tree", "random_signature",
    "random_term", "rewrite", "mutate", "equivalent_variant", "random_pair", "random_interp",
]

DEFAULT_ALPHABET = {"a": 1, "b": 0, "s": 2}
MAX_SORT = 3


# --------------------------------------------------------------------------
# Graphs

def random_graph(rng: random.Random, n: int, p: int, max_states: int = 5,
                 alphabet: Mapping[str, int] = None, max_out: int = 3) -> ProcessGraph:
    """A graph ``n -> p`` with at most ``max_states`` states, possibly cyclic."""
    alphabet = dict(DEFAULT_ALPHABET if alphabet is None else alphabet)
    letters = sorted(alphabet)
    k = rng.randint(1, max_states)
    edges = set()
    for v in range(k):
        for _ in range(rng.randint(0, max_out)):
            if p and rng.random() < 0.3:
                edges.add(Edge(v, Exit(rng.randint(1, p)), ()))
            else:
                a = rng.choice(letters)
                edges.add(Edge(v, Action(a), tuple(rng.randrange(k) for _ in range(alphabet[a]))))
    roots = tuple(rng.randrange(k) for _ in range(n))
    return _make(n, p, k, roots, edges)


def random_unary_graph(rng: random.Random, n: int = 1, p: int = 0, max_states: int = 4,
                       letters=("a", "b")) -> ProcessGraph:
    return random_graph(rng, n, p, max_states, {a: 1 for a in letters})


def random_tree(rng: random.Random, p: int, depth: int, alphabet: Mapping[str, int] = None,
                max_out: int = 3) -> ProcessGraph:
    """A finite tree ``1 -> p`` of height at most ``depth``."""
    alphabet = dict(DEFAULT_ALPHABET if alphabet is None else alphabet)
    letters = sorted(alphabet)
    edges = []
    count = [1]

    def grow(v, d):
        if d == 0:
            return
        for _ in range(rng.randint(0, max_out)):
            if p and rng.random() < 0.25:
                edges.append(Edge(v, Exit(rng.randint(1, p)), ()))
                continue
            a = rng.choice(letters)
            ts = tuple(range(count[0], count[0] + alphabet[a]))
            count[0] += alphabet[a]
            edges.append(Edge(v, Action(a), ts))
            for t in ts:
                grow(t, d - 1)

    grow(0, depth)
    return _make(1, p, count[0], (0,), edges)


# --------------------------------------------------------------------------
# Terms

def random_signature(rng: random.Random, max_vars: int = 3,
                     alphabet: Mapping[str, int] = None) -> Signature:
    alphabet = dict(DEFAULT_ALPHABET if alphabet is None else alphabet)
    names = ["f", "g", "h"][:rng.randint(1, max_vars)]
    return Signature(alphabet, {v: Sort(rng.randint(1, MAX_SORT), rng.randint(0, MAX_SORT)) for v in names})


def _leaves(sig: Signature, n: int, p: int):
    out = [Zero(n, p)]
    out += [Var(v) for v, s in sorted(sig.variables.items()) if (s.source, s.target) == (n, p)]
    if n == 1:
        out += [Letter(a) for a, r in sorted(sig.letters.items()) if r == p]
        out += [Dist(i, p) for i in range(1, p + 1)]
    if n == p:
        out.append(Id(n))
    return out


def _middle(sig, n):
    """Intermediate sorts for a composition, favouring those with variables."""
    out = [1, 2, 3, 0]
    out += [s.target for s in sig.variables.values() if s.source == n] * 2
    return out


def random_term(rng: random.Random, sig: Signature, n: int, p: int, size: int = 12,
                sugar: bool = True):
    """A term of sort ``n -> p`` with at most ``size`` nodes; sorts stay <= 3."""

    def gen(n, p, budget):
        leaves = _leaves(sig, n, p)
        if budget <= 2:
            # zero only as a last resort; variables are the interesting leaves
            vs = [x for x in leaves if isinstance(x, Var)]
            good = [x for x in leaves if not isinstance(x, Zero)]
            if vs and rng.random() < 0.6:
                return rng.choice(vs)
            return rng.choice(good if good and rng.random() < 0.9 else leaves)
        options = ["leaf", "sum", "comp", "comp"]
        if n + p <= MAX_SORT:
            options += ["dagger", "dagger"]
        if sugar and p >= n:
            options.append("star")
        if 2 <= n <= MAX_SORT:
            options.append("tuple")
        if sugar and n >= 2:
            options.append("pair")
        kind = rng.choice(options)
        rest = budget - 1
        if kind == "leaf":
            return gen(n, p, 1)
        if kind == "sum":
            k = rng.randint(1, rest - 1)
            return Sum(gen(n, p, k), gen(n, p, rest - k))
        if kind == "comp":
            m = rng.choice(_middle(sig, n))
            k = rng.randint(1, rest - 1)
            return Comp(gen(n, m, k), gen(m, p, rest - k))
        if kind == "dagger":
            return Dagger(gen(n, n + p, rest))
        if kind == "star":
            return Star(gen(n, p, rest))
        if kind == "tuple":
            share = max(1, rest // n)
            return Tuple(tuple(gen(1, p, share) for _ in range(n)))
        k = rng.randint(1, n - 1)
        share = max(1, rest // 2)
        return Pair(gen(k, p, share), gen(n - k, p, share))

    return gen(n, p, size)


def _replace(t, path, new):
    if not path:
        return new
    i, rest = path[0], path[1:]
    kids = list(children(t))
    kids[i] = _replace(kids[i], rest, new)
    if isinstance(t, Comp):
        return Comp(*kids)
    if isinstance(t, Sum):
        return Sum(*kids)
    if isinstance(t, Pair):
        return Pair(*kids)
    if isinstance(t, Tuple):
        return Tuple(tuple(kids))
    if isinstance(t, Dagger):
        return Dagger(kids[0])
    if isinstance(t, Star):
        return Star(kids[0])
    raise TypeError(f"cannot rebuild {type(t).__name__}")


def _law(rng, t, s: Sort, sig):
    """One law instance with ``t`` as the left side; returns the right side."""
    n, p = s.source, s.target
    laws = ["unit", "idem", "zero", "idl", "idr"]
    if isinstance(t, Sum):
        laws += ["swap", "swap"]
    if isinstance(t, Dagger):
        laws += ["unfold", "unfold"]
    if isinstance(t, Comp) and isinstance(t.left, Sum):
        laws.append("distr")
    if isinstance(t, Comp) and isinstance(t.left, Zero):
        laws.append("annihilate")
    if (isinstance(t, Comp) and isinstance(t.left, Dist) and isinstance(t.right, Tuple)
            and all(infer_sort(c, sig).source == 1 for c in t.right.items)):
        laws.append("project")
    law = rng.choice(laws)
    if law == "unit":
        return Sum(Zero(n, p), t) if rng.random() < 0.5 else Sum(t, Zero(n, p))
    if law == "idem":
        return Sum(t, t)
    if law == "zero":
        return Sum(t, Comp(Zero(n, 0), Zero(0, p)))
    if law == "idl":
        return Comp(Id(n), t)
    if law == "idr":
        return Comp(t, Id(p))
    if law == "swap":
        return Sum(t.right, t.left)
    if law == "unfold":
        # f . <f^dagger, 1_p> = f^dagger
        body = t.body
        q = infer_sort(body, sig).target - n
        return Comp(body, Pair(t, Id(q)) if q else t)
    if law == "distr":
        return Sum(Comp(t.left.left, t.right), Comp(t.left.right, t.right))
    if law == "annihilate":
        return Zero(n, p)
    return t.right.items[t.left.i - 1]


def rewrite(rng: random.Random, t, sig: Signature):
    """Apply one valid law at a random position of ``t``."""
    table = sort_table(t, sig)
    path, sub = rng.choice(list(subterms(t)))
    return _replace(t, path, _law(rng, sub, table[path], sig))


def mutate(rng: random.Random, t, sig: Signature, size: int = 4):
    """Replace a random subterm by a fresh random term of the same sort."""
    table = sort_table(t, sig)
    path, _ = rng.choice(list(subterms(t)))
    s = table[path]
    return _replace(t, path, random_term(rng, sig, s.source, s.target, size))


def random_pair(rng: random.Random, size: int = 12, kind: str = None):
    """A signature with two terms of equal sort.

    ``kind`` is ``"rewrite"`` (equivalent by construction), ``"mutate"`` (a
    local change, usually not equivalent) or ``"fresh"`` (independent terms).
    """
    kind = kind or rng.choice(["rewrite", "rewrite", "mutate", "fresh"])
    sig = random_signature(rng)
    n, p = rng.randint(1, MAX_SORT), rng.randint(0, MAX_SORT)
    lhs = random_term(rng, sig, n, p, size)
    if kind == "rewrite":
        rhs = equivalent_variant(rng, lhs, sig, rng.randint(1, 3))
    elif kind == "mutate":
        rhs = mutate(rng, lhs, sig)
    else:
        rhs = random_term(rng, sig, n, p, size)
    return sig, lhs, rhs


def equivalent_variant(rng: random.Random, t, sig: Signature, steps: int = 2):
    for _ in range(steps):
        t = rewrite(rng, t, sig)
    return t


# --------------------------------------------------------------------------
# Interpretations

def _random_word(rng, letters, p, max_len, var_rate=0.3):
    def sym():
        if p and rng.random() < var_rate:
            return rng.randint(1, p)
        return rng.choice(letters)
    return tuple(sym() for _ in range(rng.randint(1, max_len)))


def _random_tree_obj(rng, alphabet, p, budget):
    """A ranked tree with at most ``budget`` nodes (variables allowed at leaves)."""
    if budget <= 1 or rng.random() < 0.3:
        leaves = [(a,) for a, r in sorted(alphabet.items()) if r == 0] + list(range(1, p + 1))
        return rng.choice(leaves)
    fits = [a for a, r in sorted(alphabet.items()) if 0 < r < budget]
    if not fits:
        return _random_tree_obj(rng, alphabet, p, 1)
    a = rng.choice(fits)
    r = alphabet[a]
    share = max(1, (budget - 1) // r)
    return (a,) + tuple(_random_tree_obj(rng, alphabet, p, share) for _ in range(r))


def random_interp(rng: random.Random, variables: Mapping[str, Sort], kind: str = WORD,
                  letters=("a", "b"), max_len: int = 3, max_words: int = 3,
                  tree_alphabet: Optional[Mapping[str, int]] = None) -> Dict[str, LanguageMorphism]:
    """Finite interpretations with sets of at most ``max_words`` objects.

    Words have length 1..``max_len``; the empty word is left out so that
    bounded evaluation stays exact.  Trees have at most ``max_len + 1`` nodes.
    """
    tree_alphabet = dict(tree_alphabet or {"s": 2, "u": 1, "c": 0})
    out = {}
    for name, s in sorted(variables.items()):
        comps: List[set] = []
        for _ in range(s.source):
            objs = set()
            for _ in range(rng.randint(0, max_words)):
                if kind == WORD:
                    objs.add(_random_word(rng, letters, s.target, max_len))
                else:
                    objs.add(_random_tree_obj(rng, tree_alphabet, s.target, max_len + 1))
            comps.append(objs)
        out[name] = LanguageMorphism(kind, s.source, s.target, comps)
    return out
