"""Finite process graphs presenting regular synchronization trees.

A :class:`ProcessGraph` of sort ``n -> p`` has ``n`` roots and hyperedges
``(source, label, targets)``.  The tree it stands for is its unfolding from
each root.  Labels are ranked actions or exit symbols ``ex_j`` with
``1 <= j <= p``.  Every operation returns a fresh, pruned and canonically
numbered graph; edge sets have no multiplicities.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, NamedTuple, Sequence

from .term import Sort

__all__ = [
    "Label", "Action", "Exit", "Edge", "ProcessGraph", "GraphError",
    "g_dist", "g_zero", "g_letter", "g_compose", "g_tuple", "g_pair", "g_sum",
    "g_dagger", "g_oplus", "g_identity", "g_component", "kleene", "unfold",
    "prefix", "reduce", "is_reduced", "is_tree", "tree_iso", "tree_code",
    "to_dot",
]


class GraphError(ValueError):
    pass


class Label(NamedTuple):
    kind: str  # "act" or "exit"
    value: object

    @property
    def is_exit(self):
        return self.kind == "exit"

    def __str__(self):
        return f"ex_{self.value}" if self.is_exit else str(self.value)


def Action(name: str) -> Label:
    return Label("act", name)


def Exit(j: int) -> Label:
    return Label("exit", j)


class Edge(NamedTuple):
    source: int
    label: Label
    targets: tuple


@dataclass(frozen=True)
class ProcessGraph:
    n: int
    p: int
    num_states: int
    roots: tuple
    edges: frozenset

    @property
    def sort(self):
        return Sort(self.n, self.p)

    @property
    def states(self):
        return range(self.num_states)

    @cached_property
    def _out(self) -> Dict[int, tuple]:
        out = defaultdict(list)
        for e in self.edges:
            out[e.source].append(e)
        return {v: tuple(sorted(es)) for v, es in out.items()}

    def out(self, v) -> tuple:
        return self._out.get(v, ())

    @cached_property
    def ranks(self) -> Dict[str, int]:
        return {e.label.value: len(e.targets) for e in self.edges if not e.label.is_exit}

    def __repr__(self):
        return (f"ProcessGraph({self.n}->{self.p}, states={self.num_states}, "
                f"roots={self.roots}, edges={sorted(self.edges)})")


def _make(n, p, num_states, roots, edges) -> ProcessGraph:
    """Validate, prune unreachable states and renumber by breadth-first order."""
    roots = tuple(roots)
    if len(roots) != n:
        raise GraphError(f"{len(roots)} roots for source sort {n}")
    out = defaultdict(set)
    ranks: Dict[str, int] = {}
    for e in edges:
        e = Edge(e[0], e[1], tuple(e[2]))
        if e.label.is_exit:
            if e.targets:
                raise GraphError("exit edge with targets")
            if not 1 <= e.label.value <= p:
                raise GraphError(f"exit {e.label.value} outside 1..{p}")
        else:
            r = ranks.setdefault(e.label.value, len(e.targets))
            if r != len(e.targets):
                raise GraphError(f"letter {e.label.value} used with ranks {r} and {len(e.targets)}")
        out[e.source].add(e)
    number: Dict[int, int] = {}
    queue = deque()
    for r in roots:
        if r not in number:
            number[r] = len(number)
            queue.append(r)
    while queue:
        v = queue.popleft()
        for e in sorted(out.get(v, ())):
            for w in e.targets:
                if w not in number:
                    number[w] = len(number)
                    queue.append(w)
    new_edges = frozenset(
        Edge(number[v], e.label, tuple(number[w] for w in e.targets))
        for v in number for e in out.get(v, ()))
    return ProcessGraph(n, p, len(number), tuple(number[r] for r in roots), new_edges)


def _shifted(G: ProcessGraph, offset: int):
    return [Edge(e.source + offset, e.label, tuple(w + offset for w in e.targets)) for e in G.edges]


def _check_sort(G: ProcessGraph, n: int, p: int, what: str):
    if (G.n, G.p) != (n, p):
        raise GraphError(f"{what}: expected {n} -> {p}, got {G.n} -> {G.p}")


# --------------------------------------------------------------------------
# Theory operations

def g_dist(i: int, n: int) -> ProcessGraph:
    if not 1 <= i <= n:
        raise GraphError(f"distinguished morphism {i}_{n} out of range")
    return _make(1, n, 1, (0,), [Edge(0, Exit(i), ())])


def g_zero(n: int, p: int) -> ProcessGraph:
    return _make(n, p, n, range(n), [])


def g_letter(name: str, rank: int) -> ProcessGraph:
    if rank < 0:
        raise GraphError("negative rank")
    edges = [Edge(0, Action(name), tuple(range(1, rank + 1)))]
    edges += [Edge(i, Exit(i), ()) for i in range(1, rank + 1)]
    return _make(1, rank, rank + 1, (0,), edges)


def g_identity(p: int) -> ProcessGraph:
    return g_tuple([g_dist(i, p) for i in range(1, p + 1)], p)


def g_tuple(graphs: Sequence[ProcessGraph], p: int = None) -> ProcessGraph:
    graphs = list(graphs)
    if p is None:
        if not graphs:
            raise GraphError("empty tuple needs an explicit target sort")
        p = graphs[0].p
    edges, roots, offset = [], [], 0
    for G in graphs:
        if G.p != p:
            raise GraphError(f"tuple component targets {G.p}, expected {p}")
        edges += _shifted(G, offset)
        roots += [r + offset for r in G.roots]
        offset += G.num_states
    return _make(len(roots), p, offset, roots, edges)


def g_pair(G: ProcessGraph, H: ProcessGraph) -> ProcessGraph:
    if G.p != H.p:
        raise GraphError(f"pairing of {G.sort} with {H.sort}")
    return g_tuple([G, H], G.p)


def g_component(G: ProcessGraph, i: int) -> ProcessGraph:
    """The ``i``-th component (1-based) as a graph ``1 -> p``."""
    if not 1 <= i <= G.n:
        raise GraphError(f"component {i} of a graph with {G.n} roots")
    return _make(1, G.p, G.num_states, (G.roots[i - 1],), G.edges)


def g_compose(G: ProcessGraph, H: ProcessGraph) -> ProcessGraph:
    """Replace each ``ex_i`` edge of ``G`` by the root edges of ``H``'s i-th tree."""
    if G.p != H.n:
        raise GraphError(f"composition of {G.sort} with {H.sort}")
    offset = G.num_states
    edges = _shifted(H, offset)
    for e in G.edges:
        if e.label.is_exit:
            root = H.roots[e.label.value - 1]
            edges += [Edge(e.source, h.label, tuple(w + offset for w in h.targets))
                      for h in H.out(root)]
        else:
            edges.append(e)
    return _make(G.n, H.p, offset + H.num_states, G.roots, edges)


def g_sum(G: ProcessGraph, H: ProcessGraph) -> ProcessGraph:
    """Merge the roots of disjoint copies; fresh roots keep incoming edges intact."""
    if G.sort != H.sort:
        raise GraphError(f"sum of {G.sort} and {H.sort}")
    offset = G.num_states
    base = offset + H.num_states
    edges = list(G.edges) + _shifted(H, offset)
    for i in range(G.n):
        fresh = base + i
        edges += [Edge(fresh, e.label, e.targets) for e in G.out(G.roots[i])]
        edges += [Edge(fresh, e.label, tuple(w + offset for w in e.targets))
                  for e in H.out(H.roots[i])]
    return _make(G.n, G.p, base + G.n, [base + i for i in range(G.n)], edges)


def g_oplus(G: ProcessGraph, H: ProcessGraph) -> ProcessGraph:
    offset = G.num_states
    edges = list(G.edges)
    for e in _shifted(H, offset):
        if e.label.is_exit:
            e = Edge(e.source, Exit(e.label.value + G.p), ())
        edges.append(e)
    roots = list(G.roots) + [r + offset for r in H.roots]
    return _make(G.n + H.n, G.p + H.p, offset + H.num_states, roots, edges)


def g_dagger(G: ProcessGraph) -> ProcessGraph:
    """Least solution of ``x = G . <x, 1_p>`` for ``G: n -> n + p``.

    Exits ``ex_j`` with ``j <= n`` become links to root ``j``.  A state takes
    over the non-link edges of every root reachable through chains of links;
    pure link cycles contribute nothing.
    """
    n = G.n
    if G.p < n:
        raise GraphError(f"dagger needs target >= source, got {G.sort}")

    def is_link(e):
        return e.label.is_exit and e.label.value <= n

    def linked_roots(v):
        seen, stack = set(), [v]
        while stack:
            u = stack.pop()
            for e in G.out(u):
                if is_link(e):
                    r = G.roots[e.label.value - 1]
                    if r not in seen:
                        seen.add(r)
                        stack.append(r)
        return seen

    def renumber(e, source):
        if e.label.is_exit:
            return Edge(source, Exit(e.label.value - n), ())
        return Edge(source, e.label, e.targets)

    edges = []
    for v in G.states:
        for u in {v} | linked_roots(v):
            edges += [renumber(e, v) for e in G.out(u) if not is_link(e)]
    return _make(n, G.p - n, G.num_states, G.roots, edges)


def kleene(G: ProcessGraph, k: int) -> ProcessGraph:
    """The approximant ``f^(k)``: ``f^(0) = 0`` and ``f^(k+1) = f . <f^(k), 1_p>``."""
    n, p = G.n, G.p - G.n
    if p < 0:
        raise GraphError(f"dagger needs target >= source, got {G.sort}")
    approx = g_zero(n, p)
    ident = g_identity(p)
    for _ in range(k):
        approx = g_compose(G, g_pair(approx, ident))
    return approx


# --------------------------------------------------------------------------
# Prefixes

def unfold(G: ProcessGraph, depth: int) -> ProcessGraph:
    """The prefix tree of height ``depth``.

    Vertices farther than ``depth`` from their root are dropped together with
    their incident edges, so edges without targets (exits, constants) survive
    at the last level.
    """
    if depth < 0:
        raise GraphError("negative depth")
    edges, roots = [], []
    counter = 0
    for r in G.roots:
        roots.append(counter)
        stack = [(r, counter, 0)]
        counter += 1
        while stack:
            v, node, level = stack.pop()
            for e in G.out(v):
                if level == depth and e.targets:
                    continue
                kids = []
                for w in e.targets:
                    kids.append(counter)
                    stack.append((w, counter, level + 1))
                    counter += 1
                edges.append(Edge(node, e.label, tuple(kids)))
    return _make(G.n, G.p, counter, roots, edges)


def prefix(G: ProcessGraph, depth: int) -> ProcessGraph:
    """A layered graph whose unfolding is ``unfold(G, depth)``.

    States are pairs ``(state, level)``, so the size stays linear in
    ``depth`` while the represented tree is the same.
    """
    if depth < 0:
        raise GraphError("negative depth")
    index: Dict[tuple, int] = {}

    def state(v, level):
        return index.setdefault((v, level), len(index))

    roots = [state(r, 0) for r in G.roots]
    edges = []
    frontier = {(r, 0) for r in G.roots}
    seen = set(frontier)
    while frontier:
        nxt = set()
        for v, level in frontier:
            for e in G.out(v):
                if level == depth and e.targets:
                    continue
                edges.append(Edge(state(v, level), e.label,
                                  tuple(state(w, level + 1) for w in e.targets)))
                for w in e.targets:
                    if (w, level + 1) not in seen:
                        seen.add((w, level + 1))
                        nxt.add((w, level + 1))
        frontier = nxt
    return _make(G.n, G.p, len(index), roots, edges)


# --------------------------------------------------------------------------
# Reduction and isomorphism of finite trees

def _edge_leq(e, f, rel):
    return e.label == f.label and all((a, b) in rel for a, b in zip(e.targets, f.targets))


def reduce(G: ProcessGraph) -> ProcessGraph:
    """Keep one representative of each maximal class of out-edges per state."""
    from .simulation import sim_preorder

    while True:
        rel = sim_preorder(G, G).pairs
        edges = []
        for v in G.states:
            out = G.out(v)
            for e in out:
                dominated = any(_edge_leq(e, f, rel) and not _edge_leq(f, e, rel) for f in out)
                # among equivalent edges the smallest one survives
                shadowed = any(f < e and _edge_leq(e, f, rel) and _edge_leq(f, e, rel) for f in out)
                if not dominated and not shadowed:
                    edges.append(e)
        H = _make(G.n, G.p, G.num_states, G.roots, edges)
        if H == G:
            return H
        G = H


def is_reduced(G: ProcessGraph) -> bool:
    from .simulation import sim_preorder

    rel = sim_preorder(G, G).pairs
    for v in G.states:
        out = G.out(v)
        for e in out:
            for f in out:
                if e != f and _edge_leq(e, f, rel):
                    return False
    return True


def is_tree(G: ProcessGraph) -> bool:
    """Every state has at most one incoming edge occurrence and roots have none."""
    indeg = defaultdict(int)
    for e in G.edges:
        for w in e.targets:
            indeg[w] += 1
    if any(r in indeg for r in G.roots) or len(set(G.roots)) != len(G.roots):
        return False
    return all(c == 1 for c in indeg.values())


def tree_code(G: ProcessGraph, v: int) -> tuple:
    """Canonical code of the finite tree rooted at ``v``: sorted summand codes."""
    return tuple(sorted((e.label, tuple(tree_code(G, w) for w in e.targets)) for e in G.out(v)))


def tree_iso(t: ProcessGraph, s: ProcessGraph) -> bool:
    for g in (t, s):
        if not is_tree(g):
            raise GraphError("tree_iso needs finite trees")
    if t.sort != s.sort:
        return False
    return all(tree_code(t, a) == tree_code(s, b) for a, b in zip(t.roots, s.roots))


# --------------------------------------------------------------------------
# Graphviz

def _quote(s):
    return '"{}"'.format(str(s).replace('"', r'\"'))


def to_dot(G: ProcessGraph, name: str = "G") -> str:
    lines = [f"digraph {_quote(name)} {{", "  rankdir=TB;"]
    root_no = defaultdict(list)
    for i, r in enumerate(G.roots, 1):
        root_no[r].append(str(i))
    for v in G.states:
        if v in root_no:
            lines.append(f'  s{v} [shape=circle, style=bold, label="{v}\\nroot {",".join(root_no[v])}"];')
        else:
            lines.append(f'  s{v} [shape=circle, label="{v}"];')
    for k, e in enumerate(sorted(G.edges)):
        if e.label.is_exit:
            lines.append(f'  x{k} [shape=doublecircle, label="ex_{e.label.value}"];')
            lines.append(f"  s{e.source} -> x{k};")
            continue
        lines.append(f"  h{k} [shape=diamond, label={_quote(e.label.value)}];")
        lines.append(f"  s{e.source} -> h{k} [arrowhead=none];")
        for i, w in enumerate(e.targets, 1):
            lines.append(f'  h{k} -> s{w} [label="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
