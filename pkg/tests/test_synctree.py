import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grovecheck.randgen import random_graph, random_tree
from grovecheck.simulation import sim_equiv, simulates
from grovecheck.synctree import (Action, Edge, Exit, GraphError, _make, g_compose, g_dagger, g_dist,
                                 g_identity, g_letter, g_oplus, g_pair, g_sum, g_tuple, g_zero,
                                 is_reduced, is_tree, kleene, prefix, reduce, to_dot, tree_iso,
                                 unfold)
from grovecheck.term import Sort

from .oracles import tree_iso_brute, trees_below
from .strategies import graphs


def edge_set(G):
    return {(e.source, e.label, e.targets) for e in G.edges}


def a_loop():
    return _make(1, 0, 1, (0,), [Edge(0, Action("a"), (0,))])


def chain(*letters):
    """Unary chain ``l1 . l2 ... . 0``."""
    edges = [Edge(i, Action(x), (i + 1,)) for i, x in enumerate(letters)]
    return _make(1, 0, len(letters) + 1, (0,), edges)


# --------------------------------------------------------------------------
# constructors

def test_dist():
    G = g_dist(2, 2)
    assert G.num_states == 1 and edge_set(G) == {(0, Exit(2), ())}
    assert edge_set(g_dist(1, 1)) == {(0, Exit(1), ())}
    with pytest.raises(GraphError):
        g_dist(3, 2)


def test_zero():
    assert g_zero(1, 0).num_states == 1 and not g_zero(1, 0).edges
    assert g_zero(0, 5).roots == ()
    Z = g_zero(2, 2)
    assert Z.roots == (0, 1) and not Z.edges


def test_letters():
    c = g_letter("c", 0)
    assert edge_set(c) == {(0, Action("c"), ())}
    s = g_letter("sigma", 2)
    assert s.num_states == 3
    assert edge_set(s) == {(0, Action("sigma"), (1, 2)), (1, Exit(1), ()), (2, Exit(2), ())}


def test_make_validates():
    with pytest.raises(GraphError):
        _make(1, 1, 1, (0,), [Edge(0, Exit(2), ())])
    with pytest.raises(GraphError):
        _make(1, 0, 2, (0,), [Edge(0, Action("a"), (1,)), Edge(1, Action("a"), ())])
    with pytest.raises(GraphError):
        _make(2, 0, 1, (0,), [])


def test_make_prunes_unreachable():
    G = _make(1, 0, 3, (0,), [Edge(0, Action("a"), (1,)), Edge(2, Action("b"), ())])
    assert G.num_states == 2


def test_compose_projection():
    H1, H2 = g_letter("a", 1), g_sum(g_letter("b", 1), g_dist(1, 1))
    P = g_compose(g_dist(2, 2), g_tuple([H1, H2]))
    assert tree_iso(unfold(P, 3), unfold(H2, 3))


def test_compose_with_identity():
    G = g_letter("sigma", 2)
    assert tree_iso(unfold(g_compose(G, g_identity(2)), 3), unfold(G, 3))


def test_compose_letter_with_zero():
    G = g_compose(g_letter("a", 1), g_zero(1, 0))
    assert edge_set(G) == {(0, Action("a"), (1,))}
    with pytest.raises(GraphError):
        g_compose(g_letter("a", 1), g_zero(2, 0))


def test_tuple_laws():
    assert g_tuple([g_dist(1, 1)]) == g_dist(1, 1)
    G = g_letter("sigma", 2)
    assert g_pair(G, g_zero(0, 2)) == G
    assert g_tuple([g_zero(1, 3), g_zero(1, 3)]) == g_zero(2, 3)
    with pytest.raises(GraphError):
        g_tuple([])
    with pytest.raises(GraphError):
        g_pair(g_dist(1, 1), g_dist(1, 2))


def test_sum_examples():
    G = g_letter("sigma", 2)
    assert tree_iso(unfold(g_sum(G, g_zero(1, 2)), 2), unfold(G, 2))
    ab = g_sum(g_letter("a", 0), g_letter("b", 0))
    assert edge_set(ab) == {(0, Action("a"), ()), (0, Action("b"), ())}
    with pytest.raises(GraphError):
        g_sum(g_zero(1, 0), g_zero(1, 1))


def test_sum_keeps_root_cycles():
    # the loop must still go back to the a-loop, not to the merged root
    S = g_sum(a_loop(), g_letter("b", 0))
    expected = g_sum(chain("a", "a", "a"), g_letter("b", 0))
    assert tree_iso(unfold(S, 3), expected)


def test_oplus_sort():
    G = g_oplus(g_letter("sigma", 2), g_dist(1, 1))
    assert G.sort == Sort(2, 3)
    assert (G.roots[1], Exit(3), ()) in edge_set(G)


# --------------------------------------------------------------------------
# dagger

def test_dagger_of_identity_is_zero():
    assert g_dagger(g_dist(1, 1)) == g_zero(1, 0)


@pytest.mark.parametrize("n,p", [(1, 0), (1, 2), (2, 1), (2, 2)])
def test_dagger_of_injection_is_zero(n, p):
    assert g_dagger(g_oplus(g_identity(n), g_zero(0, p))) == g_zero(n, p)


def test_dagger_of_unary_loop():
    G = _make(1, 1, 2, (0,), [Edge(0, Action("a"), (1,)), Edge(1, Exit(1), ())])
    D = g_dagger(G)
    assert sim_equiv(D, a_loop()) and D.p == 0
    for d in range(6):
        assert tree_iso(unfold(D, d), unfold(kleene(G, d + 2), d))


def test_dagger_sort_error():
    with pytest.raises(GraphError):
        g_dagger(g_zero(2, 1))


def test_kleene_chain_start():
    G = g_letter("sigma", 2)
    assert kleene(G, 0) == g_zero(1, 1)


def _link_chain():
    # x: ex1 -> root1: ex2 -> root2: a -> x ; depth d needs about 2d rounds
    return _make(2, 2, 3, (0, 1), [Edge(0, Exit(2), ()), Edge(1, Action("a"), (2,)), Edge(2, Exit(1), ())])


def test_kleene_needs_a_round_per_link():
    G = _link_chain()
    D = g_dagger(G)
    for d in range(7):
        assert sim_equiv(prefix(D, d), prefix(kleene(G, 2 * d), d))
        if d:
            assert not sim_equiv(prefix(D, d), prefix(kleene(G, 2 * d - 1), d))


def test_dagger_matches_kleene_chain():
    # each level may pass through up to n link edges before an action
    rng = random.Random(11)
    for _ in range(40):
        n, p = rng.randint(1, 2), rng.randint(0, 2)
        G = random_graph(rng, n, n + p, 5)
        D = g_dagger(G)
        for d in range(7):
            assert sim_equiv(prefix(D, d), prefix(kleene(G, (d + 1) * n + 1), d))


# --------------------------------------------------------------------------
# prefixes

def test_unfold_depth_zero():
    assert unfold(a_loop(), 0) == g_zero(1, 0)
    assert unfold(g_letter("sigma", 2), 0) == g_zero(1, 2)
    # edges without targets sit at distance 0
    assert unfold(g_dist(1, 1), 0) == g_dist(1, 1)


def test_unfold_loop():
    assert tree_iso(unfold(a_loop(), 2), chain("a", "a"))


@pytest.mark.parametrize("d", [1, 2, 5])
def test_unfold_letter(d):
    assert unfold(g_letter("sigma", 2), d) == g_letter("sigma", 2)


def test_unfold_negative():
    with pytest.raises(GraphError):
        unfold(a_loop(), -1)
    with pytest.raises(GraphError):
        prefix(a_loop(), -1)


@settings(max_examples=80, deadline=None)
@given(graphs(max_states=3), st.integers(0, 3))
def test_prefix_unfolds_to_unfold(G, d):
    T = unfold(G, d)
    assert is_tree(T)
    assert tree_iso(unfold(prefix(G, d), d), T)
    assert simulates(T, G)


@settings(max_examples=60, deadline=None)
@given(graphs(max_states=3), st.integers(0, 3))
def test_unfold_is_below_deeper_unfold(G, d):
    assert trees_below(unfold(G, d), unfold(G, d + 1))


# --------------------------------------------------------------------------
# theory laws on random graphs

@settings(max_examples=80, deadline=None)
@given(st.integers(1, 2).flatmap(lambda n: st.tuples(st.just(n), graphs(n=n, p=n + 1))))
def test_dagger_fixed_point(data):
    n, G = data
    D = g_dagger(G)
    assert sim_equiv(g_compose(G, g_pair(D, g_identity(1))), D)
    assert D.sort == Sort(n, 1)


@settings(max_examples=60, deadline=None)
@given(graphs(n=1, p=2), graphs(n=1, p=1, max_states=3))
def test_dagger_parameter(G, H):
    lhs = g_dagger(g_compose(G, g_oplus(g_identity(1), H)))
    rhs = g_compose(g_dagger(G), H)
    assert sim_equiv(lhs, rhs)


@settings(max_examples=60, deadline=None)
@given(graphs(n=2, p=2), graphs(n=2, p=2), st.integers(1, 2))
def test_dist_into_sum(F, G, i):
    lhs = g_compose(g_dist(i, 2), g_sum(F, G))
    rhs = g_sum(g_compose(g_dist(i, 2), F), g_compose(g_dist(i, 2), G))
    assert sim_equiv(lhs, rhs)


@pytest.mark.parametrize("i,n,p", [(1, 1, 0), (2, 2, 1), (1, 3, 2)])
def test_dist_into_zero(i, n, p):
    assert g_compose(g_dist(i, n), g_zero(n, p)) == g_zero(1, p)


@settings(max_examples=60, deadline=None)
@given(graphs(n=1, p=2), graphs(n=1, p=2), graphs(n=2, p=1))
def test_right_distributivity(F, G, H):
    lhs = g_compose(g_sum(F, G), H)
    rhs = g_sum(g_compose(F, H), g_compose(G, H))
    assert sim_equiv(lhs, rhs)


@settings(max_examples=40, deadline=None)
@given(graphs(n=2, p=1))
def test_zero_composition(G):
    assert sim_equiv(g_compose(g_zero(1, 2), G), g_zero(1, 1))


@settings(max_examples=60, deadline=None)
@given(graphs(n=1, p=1), graphs(n=1, p=1))
def test_sum_is_idempotent_and_commutative(G, H):
    assert sim_equiv(g_sum(G, G), G)
    assert sim_equiv(g_sum(G, H), g_sum(H, G))
    assert sim_equiv(g_sum(G, g_zero(1, 1)), G)


# --------------------------------------------------------------------------
# reduction and tree isomorphism

def test_reduce_sum_of_copies():
    G = g_letter("sigma", 2)
    R = reduce(g_sum(G, G))
    assert len([e for e in R.out(R.roots[0])]) == 1


def test_reduce_drops_dominated():
    small = g_compose(g_letter("a", 1), g_zero(1, 0))
    big = chain("a", "b")
    R = reduce(g_sum(small, big))
    assert tree_iso(R, big)


@settings(max_examples=60, deadline=None)
@given(graphs(max_states=4))
def test_reduce_properties(G):
    R = reduce(G)
    assert sim_equiv(R, G)
    assert is_reduced(R)
    assert reduce(R) == R


def _shuffled(rng, G):
    """Same tree, states renumbered and edges listed in another order."""
    perm = list(G.states)
    rng.shuffle(perm)
    edges = [Edge(perm[e.source], e.label, tuple(perm[w] for w in e.targets)) for e in G.edges]
    rng.shuffle(edges)
    return _make(G.n, G.p, G.num_states, [perm[r] for r in G.roots], edges)


def test_reduced_equivalent_trees_are_isomorphic():
    rng = random.Random(5)
    for _ in range(30):
        T = random_tree(rng, 1, 3)
        # add a dominated summand, then reduce both sides independently
        extra = g_sum(T, unfold(T, 1))
        A, B = reduce(T), reduce(_shuffled(rng, extra))
        assert sim_equiv(A, B)
        assert tree_iso(unfold(A, 4), unfold(B, 4))
        assert tree_iso_brute(unfold(A, 4), unfold(A, 4).roots[0], unfold(B, 4), unfold(B, 4).roots[0])


def test_tree_iso_examples():
    ab = g_sum(g_letter("a", 0), g_letter("b", 0))
    ba = g_sum(g_letter("b", 0), g_letter("a", 0))
    assert tree_iso(ab, ab) and tree_iso(ab, ba)
    assert not tree_iso(chain("a"), chain("a", "a"))
    with pytest.raises(GraphError):
        tree_iso(a_loop(), a_loop())


@settings(max_examples=60, deadline=None)
@given(graphs(n=1, max_states=3), graphs(n=1, max_states=3), st.integers(0, 2))
def test_tree_iso_agrees_with_brute_force(G, H, d):
    if G.p != H.p:
        return
    T, S = unfold(G, d), unfold(H, d)
    assert tree_iso(T, S) == tree_iso_brute(T, T.roots[0], S, S.roots[0])


# --------------------------------------------------------------------------
# DOT output

def test_dot_is_deterministic():
    G = g_sum(g_letter("sigma", 2), g_dist(1, 2))
    assert to_dot(G, "t") == to_dot(_make(G.n, G.p, G.num_states, G.roots, sorted(G.edges, reverse=True)), "t")


def test_dot_shapes():
    text = to_dot(g_letter("sigma", 2), "s")
    assert text.startswith('digraph "s" {')
    assert "shape=diamond" in text and 'label="ex_2"' in text and "style=bold" in text
    assert 'h0 -> s2 [label="2"];' in text or 'h0 -> s1 [label="1"];' in text
