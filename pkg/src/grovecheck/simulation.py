"""Largest simulations and bisimulations between process graphs.

The simulation preorder is computed as a greatest fixed point by synchronous
deletion rounds.  The round in which a pair is deleted is the number of
moves player I needs to win the simulation game from that pair; the game
strategy extraction relies on it.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Tuple

from .synctree import Edge, ProcessGraph

__all__ = [
    "SimRelation", "GameStrategy", "Reply", "SimulationError",
    "sim_preorder", "simulates", "sim_equiv", "bisim_equiv", "deletion_rounds",
    "failing_roots", "game_witness", "compose_relations", "is_simulation",
]


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class SimRelation:
    left: ProcessGraph
    right: ProcessGraph
    pairs: FrozenSet[Tuple[int, int]]

    def __contains__(self, pair):
        return pair in self.pairs

    def __str__(self):
        return " ".join(f"({v},{w})" for v, w in sorted(self.pairs))


def _check(G, H):
    if G.p != H.p:
        raise SimulationError(f"exit sorts differ: {G.p} vs {H.p}")
    for name, rank in G.ranks.items():
        if H.ranks.get(name, rank) != rank:
            raise SimulationError(f"letter {name} has rank {rank} on the left, {H.ranks[name]} on the right")


def _index(H: ProcessGraph):
    by_label = defaultdict(list)
    for e in H.edges:
        by_label[e.source, e.label].append(e.targets)
    return by_label


def _matched(e: Edge, w, by_label, alive) -> bool:
    for ts in by_label.get((w, e.label), ()):
        if all((a, b) in alive for a, b in zip(e.targets, ts)):
            return True
    return False


def deletion_rounds(G: ProcessGraph, H: ProcessGraph) -> Dict[Tuple[int, int], int]:
    """Map each non-simulating pair ``(v, w)`` to the round it is deleted in.

    Pairs missing from the result form the largest simulation.
    """
    _check(G, H)
    by_label = _index(H)
    preds_G = defaultdict(set)
    preds_H = defaultdict(set)
    for e in G.edges:
        for t in e.targets:
            preds_G[t].add(e.source)
    for e in H.edges:
        for t in e.targets:
            preds_H[t].add(e.source)
    alive = {(v, w) for v in G.states for w in H.states}
    removed: Dict[Tuple[int, int], int] = {}
    todo = set(alive)
    rnd = 0
    while todo:
        rnd += 1
        dead = [(v, w) for (v, w) in todo
                if (v, w) in alive and not all(_matched(e, w, by_label, alive) for e in G.out(v))]
        if not dead:
            break
        for pair in dead:
            alive.discard(pair)
            removed[pair] = rnd
        todo = {(a, b) for v, w in dead for a in preds_G[v] for b in preds_H[w]}
    return removed


def sim_preorder(G: ProcessGraph, H: ProcessGraph) -> SimRelation:
    removed = deletion_rounds(G, H)
    pairs = frozenset((v, w) for v in G.states for w in H.states if (v, w) not in removed)
    return SimRelation(G, H, pairs)


def is_simulation(G: ProcessGraph, H: ProcessGraph, pairs) -> bool:
    by_label = _index(H)
    pairs = set(pairs)
    return all(_matched(e, w, by_label, pairs) for v, w in pairs for e in G.out(v))


def compose_relations(R: SimRelation, S: SimRelation) -> SimRelation:
    succ = defaultdict(set)
    for a, b in S.pairs:
        succ[a].add(b)
    return SimRelation(R.left, S.right, frozenset((v, u) for v, w in R.pairs for u in succ[w]))


def _same_sort(G, H):
    if G.sort != H.sort:
        raise SimulationError(f"sorts differ: {G.sort} vs {H.sort}")


def failing_roots(G: ProcessGraph, H: ProcessGraph):
    """1-based indices ``i`` whose i-th root of ``G`` is not simulated by ``H``'s."""
    _same_sort(G, H)
    removed = deletion_rounds(G, H)
    return [i for i, (a, b) in enumerate(zip(G.roots, H.roots), 1) if (a, b) in removed]


def simulates(G: ProcessGraph, H: ProcessGraph) -> bool:
    """Whether ``G`` is simulated by ``H`` componentwise."""
    return not failing_roots(G, H)


def sim_equiv(G: ProcessGraph, H: ProcessGraph) -> bool:
    return simulates(G, H) and simulates(H, G)


def bisim_equiv(G: ProcessGraph, H: ProcessGraph) -> bool:
    _same_sort(G, H)
    fwd, bwd = _index(H), _index(G)
    alive = {(v, w) for v in G.states for w in H.states}
    inverse = {(w, v) for v, w in alive}
    changed = True
    while changed:
        changed = False
        for v, w in sorted(alive):
            ok = (all(_matched(e, w, fwd, alive) for e in G.out(v))
                  and all(_matched(e, v, bwd, inverse) for e in H.out(w)))
            if not ok:
                alive.discard((v, w))
                inverse.discard((w, v))
                changed = True
    return all((a, b) in alive for a, b in zip(G.roots, H.roots))


# --------------------------------------------------------------------------
# Simulation game

@dataclass(frozen=True)
class Reply:
    """A response edge of player II and how player I continues against it."""

    edge: Edge
    component: int
    then: "GameStrategy"


@dataclass(frozen=True)
class GameStrategy:
    """Player I's winning move at position ``(left, right)``.

    ``right`` is a set of right states; positions produced here always hold a
    single one, since a joint winning move against several need not exist.
    """

    left: int
    right: FrozenSet[int]
    move: Edge
    replies: Tuple[Reply, ...]
    rounds: int

    def depth(self) -> int:
        return 1 + max((r.then.depth() for r in self.replies), default=0)


def _strategy(G, H, v, w, removed, by_label, memo):
    key = (v, w)
    if key in memo:
        return memo[key]
    rnd = removed[key]
    best = None
    for e in G.out(v):
        replies = []
        for ts in sorted(by_label.get((w, e.label), ())):
            # need a component whose pair already died in an earlier round
            comp = next((i for i, (a, b) in enumerate(zip(e.targets, ts))
                         if removed.get((a, b), rnd) < rnd), None)
            if comp is None:
                break
            replies.append((Edge(w, e.label, ts), comp))
        else:
            best = (e, replies)
            break
    if best is None:
        raise AssertionError(f"no winning move at {key}")
    e, replies = best
    strat = GameStrategy(v, frozenset((w,)), e, tuple(
        Reply(r, c, _strategy(G, H, e.targets[c], r.targets[c], removed, by_label, memo))
        for r, c in replies), rnd)
    memo[key] = strat
    return strat


def game_witness(G: ProcessGraph, H: ProcessGraph, root: Optional[int] = None) -> GameStrategy:
    """Winning strategy for player I at a failing root pair (1-based ``root``)."""
    _same_sort(G, H)
    removed = deletion_rounds(G, H)
    bad = [i for i, (a, b) in enumerate(zip(G.roots, H.roots), 1) if (a, b) in removed]
    if not bad:
        raise SimulationError("right graph simulates the left one; no winning strategy")
    if root is None:
        root = bad[0]
    elif root not in bad:
        raise SimulationError(f"root {root} is simulated")
    v, w = G.roots[root - 1], H.roots[root - 1]
    return _strategy(G, H, v, w, removed, _index(H), {})
