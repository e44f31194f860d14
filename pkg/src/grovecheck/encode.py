"""Embeddings of ranked process graphs into unary ones and into grammars.

``encode_unary`` replaces each ranked hyperedge by a gadget over a unary
alphabet plus ``#``.  ``encode_cfg`` turns a unary graph into a context-free
grammar over that alphabet plus ``#`` and ``$``: every letter ``a`` denotes
``a(# x1 $)*``, so a graph's grammar generates the image of its tree.  When
one graph is not simulated by another, :func:`distinguishing_word` builds a
word in the first image and outside the second from the simulation game.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence

from .semantics import word_text
from .simulation import deletion_rounds, SimulationError
from .synctree import Action, Edge, ProcessGraph, _make

__all__ = [
    "HASH", "DOLLAR", "EMB2_NODE", "Cfg", "EncodingError", "encode_unary", "encode_cfg",
    "cfg_enumerate", "cfg_member", "Recognizer", "distinguishing_word",
    "emb2_generator", "cfg_text", "words_text",
]

HASH = "#"
DOLLAR = "$"
EMB2_NODE = "sigma"


class EncodingError(ValueError):
    pass


def _reserved(G: ProcessGraph, symbols=(HASH, DOLLAR)):
    for e in G.edges:
        if not e.label.is_exit and e.label.value in symbols:
            raise EncodingError(f"letter {e.label.value!r} is reserved by the encoding")


def encode_unary(G: ProcessGraph) -> ProcessGraph:
    """Rank-n edges labelled s become ``s . (# . 1_n + ## . 2_n + ... + #^n . n_n)``.

    Rank-0 letters lead to a dead state and unary letters are kept as they
    are; the result uses only unary letters.
    """
    _reserved(G)
    fresh = G.num_states
    edges = []
    for e in G.edges:
        k = len(e.targets)
        if e.label.is_exit or k == 1:
            edges.append(e)
        elif k == 0:
            edges.append(Edge(e.source, e.label, (fresh,)))
            fresh += 1
        else:
            branch = fresh
            fresh += 1
            edges.append(Edge(e.source, e.label, (branch,)))
            for i, target in enumerate(e.targets, 1):
                here = branch
                for _ in range(i - 1):
                    edges.append(Edge(here, Action(HASH), (fresh,)))
                    here = fresh
                    fresh += 1
                edges.append(Edge(here, Action(HASH), (target,)))
    return _make(G.n, G.p, fresh, G.roots, edges)


# --------------------------------------------------------------------------
# Grammars

@dataclass(frozen=True)
class Cfg:
    """Context-free grammar; terminals are ``str`` letters or ``int`` variables."""

    terminals: frozenset
    nonterminals: frozenset
    starts: tuple
    productions: tuple

    def __post_init__(self):
        if self.terminals & self.nonterminals:
            raise EncodingError("terminals and nonterminals overlap")
        for s in self.starts:
            if s not in self.nonterminals:
                raise EncodingError(f"start symbol {s!r} is not a nonterminal")
        for lhs, rhs in self.productions:
            if lhs not in self.nonterminals:
                raise EncodingError(f"production for undeclared {lhs!r}")
            for sym in rhs:
                if sym not in self.nonterminals and sym not in self.terminals:
                    raise EncodingError(f"undeclared symbol {sym!r}")

    def by_lhs(self):
        table = defaultdict(list)
        for lhs, rhs in self.productions:
            table[lhs].append(rhs)
        return table


def _nt_text(s):
    if isinstance(s, tuple):
        return "_".join(str(x) for x in s)
    return str(s)


def _sym_text(s, nonterminals):
    if s in nonterminals:
        return _nt_text(s)
    return f"x{s}" if isinstance(s, int) else s


def cfg_text(cfg: Cfg) -> str:
    nts = cfg.nonterminals
    lines = ["start " + " ".join(_nt_text(s) for s in cfg.starts) + " ;"]
    for lhs, rhs in sorted(cfg.productions, key=lambda pr: (_nt_text(pr[0]), [str(x) for x in pr[1]])):
        body = " ".join(_sym_text(s, nts) for s in rhs) or "_eps_"
        lines.append(f"{_nt_text(lhs)} -> {body} ;")
    return "\n".join(lines) + "\n"


def encode_cfg(G: ProcessGraph) -> Cfg:
    """Grammar with one start symbol per root of a unary graph.

    ``N_v -> a R_v_w`` for an a-edge to ``w``, with ``R_v_w -> eps`` and
    ``R_v_w -> R_v_w # N_w $``; ``N_v -> xj`` for an exit ``ex_j``.

    The marker letter ``#`` of :func:`encode_unary` may occur as a letter:
    after a letter the next ``#`` always opens a bracket, and after an
    opening ``#`` the next symbol is a letter, so words still parse uniquely.
    """
    _reserved(G, (DOLLAR,))
    prods = set()
    terminals = {HASH, DOLLAR} | set(range(1, G.p + 1))
    nts = {("N", v) for v in G.states}
    for e in G.edges:
        N = ("N", e.source)
        if e.label.is_exit:
            prods.add((N, (e.label.value,)))
            continue
        a = e.label.value
        terminals.add(a)
        if len(e.targets) == 0:
            prods.add((N, (a,)))
        elif len(e.targets) == 1:
            w = e.targets[0]
            R = ("R", e.source, w)
            nts.add(R)
            prods.add((N, (a, R)))
            prods.add((R, ()))
            prods.add((R, (R, HASH, ("N", w), DOLLAR)))
        else:
            raise EncodingError(f"letter {a} has rank {len(e.targets)}; encode_unary first")
    ordered = tuple(sorted(prods, key=lambda pr: (pr[0], [str(x) for x in pr[1]])))
    return Cfg(frozenset(terminals), frozenset(nts), tuple(("N", r) for r in G.roots), ordered)


def _min_lengths(cfg: Cfg) -> Dict:
    inf = float("inf")
    best = {A: inf for A in cfg.nonterminals}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in cfg.productions:
            total = sum(best[s] if s in cfg.nonterminals else 1 for s in rhs)
            if total < best[lhs]:
                best[lhs] = total
                changed = True
    return best


def cfg_enumerate(cfg: Cfg, m: int) -> List[frozenset]:
    """All generated words of length at most ``m``, one set per start symbol."""
    if m < 0:
        raise EncodingError("negative length bound")
    nts = cfg.nonterminals
    minlen = _min_lengths(cfg)
    lang = {A: set() for A in nts}
    prods = [(lhs, rhs) for lhs, rhs in cfg.productions
             if sum(minlen[s] if s in nts else 1 for s in rhs) <= m]
    changed = True
    while changed:
        changed = False
        for lhs, rhs in prods:
            need = [minlen[s] if s in nts else 1 for s in rhs]
            partial = {()}
            for k, s in enumerate(rhs):
                room = m - sum(need[k + 1:])
                if s in nts:
                    partial = {u + w for u in partial for w in lang[s] if len(u) + len(w) <= room}
                else:
                    partial = {u + (s,) for u in partial if len(u) < room}
                if not partial:
                    break
            fresh = partial - lang[lhs]
            if fresh:
                lang[lhs] |= fresh
                changed = True
    return [frozenset(lang[s]) for s in cfg.starts]


class Recognizer:
    """Earley recognizer with the nullable-prediction fix for empty rules."""

    def __init__(self, cfg: Cfg):
        self.cfg = cfg
        self.rules = cfg.by_lhs()
        self.nullable = {A for A, n in _min_lengths(cfg).items() if n == 0}

    def accepts(self, word: Sequence, start: int = 0) -> bool:
        nts = self.cfg.nonterminals
        S = self.cfg.starts[start]
        word = tuple(word)
        n = len(word)
        chart = [set() for _ in range(n + 1)]
        waiting = [defaultdict(list) for _ in range(n + 1)]

        def add(i, item, agenda):
            if item not in chart[i]:
                chart[i].add(item)
                lhs, rhs, dot, origin = item
                if dot < len(rhs):
                    waiting[i][rhs[dot]].append(item)
                if agenda is not None:
                    agenda.append(item)

        agenda = []
        for rhs in self.rules.get(S, ()):
            add(0, (S, rhs, 0, 0), agenda)
        for i in range(n + 1):
            if i:
                agenda = list(chart[i])
            while agenda:
                lhs, rhs, dot, origin = agenda.pop()
                if dot < len(rhs):
                    sym = rhs[dot]
                    if sym in nts:
                        for body in self.rules.get(sym, ()):
                            add(i, (sym, body, 0, i), agenda)
                        if sym in self.nullable:
                            add(i, (lhs, rhs, dot + 1, origin), agenda)
                    elif i < n and word[i] == sym:
                        add(i + 1, (lhs, rhs, dot + 1, origin), None)
                else:
                    for w_lhs, w_rhs, w_dot, w_origin in list(waiting[origin].get(lhs, ())):
                        add(i, (w_lhs, w_rhs, w_dot + 1, w_origin), agenda)
        return any(lhs == S and dot == len(rhs) and origin == 0
                   for lhs, rhs, dot, origin in chart[n])


def cfg_member(cfg: Cfg, word: Sequence, start: int = 0) -> bool:
    return Recognizer(cfg).accepts(word, start)


def words_text(words) -> str:
    """One word per line, ordered by length then text."""
    ordered = sorted(words, key=lambda w: (len(w), word_text(w)))
    return "".join((word_text(w) if w else '""') + "\n" for w in ordered)


# --------------------------------------------------------------------------
# Distinguishing words

def distinguishing_word(G: ProcessGraph, H: ProcessGraph, root: int = 1, verify: bool = True) -> tuple:
    """A word generated by ``encode_cfg(G)`` but not by ``encode_cfg(H)`` at ``root``.

    Both graphs must be unary and ``G``'s tree must not be simulated by
    ``H``'s at that root.
    """
    if G.sort != H.sort:
        raise SimulationError(f"sorts differ: {G.sort} vs {H.sort}")
    for g in (G, H):
        if any(len(e.targets) > 1 for e in g.edges):
            raise EncodingError("distinguishing words need unary graphs")
    removed = deletion_rounds(G, H)
    u0, v0 = G.roots[root - 1], H.roots[root - 1]
    if (u0, v0) not in removed:
        raise SimulationError("right graph simulates the left one at this root")
    succ = defaultdict(set)
    for e in H.edges:
        succ[e.source, e.label].add(e.targets)
    memo = {}

    def build(u, v):
        if (u, v) in memo:
            return memo[u, v]
        rnd = removed[u, v]
        for e in G.out(u):
            answers = succ.get((v, e.label), set())
            if e.label.is_exit:
                if not answers:
                    memo[u, v] = (e.label.value,)
                    return memo[u, v]
                continue
            a = e.label.value
            if not e.targets:
                if not answers:
                    memo[u, v] = (a,)
                    return memo[u, v]
                continue
            u1 = e.targets[0]
            others = sorted(ts[0] for ts in answers)
            if not all(removed.get((u1, w), rnd) < rnd for w in others):
                continue
            word = (a,)
            for sub in sorted({build(u1, w) for w in others}, key=lambda x: (len(x), word_text(x))):
                word += (HASH,) + sub + (DOLLAR,)
            memo[u, v] = word
            return word
        raise AssertionError(f"no winning move at {(u, v)}")

    word = build(u0, v0)
    if verify:
        if not cfg_member(encode_cfg(G), word, root - 1):
            raise AssertionError(f"witness {word_text(word)!r} not generated by the left grammar")
        if cfg_member(encode_cfg(H), word, root - 1):
            raise AssertionError(f"witness {word_text(word)!r} generated by the right grammar")
    return word


# --------------------------------------------------------------------------
# Regular tree languages with a context-free frontier

def _comb(leaves):
    tree = leaves[-1]
    for leaf in reversed(leaves[:-1]):
        tree = (EMB2_NODE, leaf, tree)
    return tree


def emb2_generator(a: str, k: int) -> tuple:
    """The trees ``t_0 .. t_k`` whose frontiers are ``a (# x1 $)^i``.

    ``t_1 = sigma(a, sigma(#, sigma(x1, $)))``; leaves hang off a right comb of
    binary ``sigma`` nodes.
    """
    out = []
    for i in range(k + 1):
        leaves = [(a,)] + [(HASH,), 1, (DOLLAR,)] * i
        out.append(_comb(leaves))
    return tuple(out)
