import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rigidity_lab.cores import k_core
from rigidity_lab.graph import MultiGraph, SimpleGraph, complete_bipartite, complete_graph, cycle_graph
from rigidity_lab.oracles import brute_force_laman, brute_force_two_orientable
from rigidity_lab.pebble import (LAMAN, TWO_ORIENT, DensityWitness, PebbleGame, SparsityParams,
                                 is_laman_spanning, is_sparse, max_two_orientation, rigid_components,
                                 two_orientation)


@st.composite
def simple_graphs(draw, max_n=9, min_n=1):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [p for p, keep in zip(pairs, mask) if keep]
    order = draw(st.permutations(edges)) if edges else []
    return SimpleGraph(n, order)


@st.composite
def multigraphs(draw, max_n=8, max_m=20):
    n = draw(st.integers(1, max_n))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=max_m))
    return MultiGraph(n, edges)


def laman_graph(n: int, rng: random.Random) -> list[tuple[int, int]]:
    """A random Laman graph grown by Henneberg I steps on distinct vertices."""
    edges = [(0, 1)]
    for v in range(2, n):
        a, b = rng.sample(range(v), 2)
        edges += [(a, v), (b, v)]
    return edges


# -- parameters and the raw game ---------------------------------------------

def test_params_range():
    with pytest.raises(ValueError):
        SparsityParams(2, 4)
    with pytest.raises(ValueError):
        SparsityParams(-1, 0)
    assert SparsityParams(1, 1).ell == 1


def test_game_triangle_and_k4():
    game = PebbleGame(3, LAMAN)
    assert all(game.insert(u, v) for u, v in [(0, 1), (1, 2), (2, 0)])
    game.check_invariants()
    res = is_sparse(complete_graph(4), LAMAN)
    assert res.verdict == "neither" and res.rank == 5
    assert is_sparse(complete_graph(4), TWO_ORIENT).is_sparse


def test_game_rejects_unknown_vertex():
    with pytest.raises(IndexError):
        PebbleGame(3).insert(0, 3)


def test_insert_many_matches_single_inserts():
    g = complete_graph(7)
    a = PebbleGame(7, LAMAN)
    singles = [a.insert(u, v) for u, v in g.edge_list()]
    b = PebbleGame(7, LAMAN)
    b.insert_many(g.edges[:5])
    b.insert_many(g.edges[5:])
    assert b.accepted_mask().tolist() == singles
    b.check_invariants()


def test_verdicts():
    assert is_sparse(SimpleGraph(3, [(0, 1), (1, 2), (0, 2)])).verdict == "tight"
    assert is_sparse(complete_graph(5), TWO_ORIENT).verdict == "tight"
    assert is_sparse(SimpleGraph(4, [(0, 1), (2, 3)])).verdict == "sparse"


@given(simple_graphs())
def test_pebble_invariant_holds(g):
    res = is_sparse(g, LAMAN)
    res.game.check_invariants()
    assert res.rank == len(res.basis)


@given(simple_graphs(max_n=8))
def test_laman_matches_oracle(g):
    res = is_sparse(g, LAMAN)
    ref = brute_force_laman(g)
    assert res.is_sparse == ref.sparse
    assert (res.rank == max(2 * g.n - 3, 0) or g.n <= 1) == ref.spanning


@given(simple_graphs(max_n=9))
def test_basis_size_is_order_free(g):
    rank = is_sparse(g).rank
    rng = random.Random(g.m)
    edges = g.edge_list()
    for _ in range(20):
        rng.shuffle(edges)
        assert is_sparse(SimpleGraph(g.n, edges)).rank == rank


# -- rigid components ----------------------------------------------------------

def test_components_examples():
    k33e = SimpleGraph(6, [e for e in complete_bipartite(3, 3).edge_list() if e != (0, 3)])
    dec = rigid_components(k33e)
    assert dec.sizes() == [2] * 8
    assert rigid_components(complete_graph(4)).components == [(0, 1, 2, 3)]
    bowtie = SimpleGraph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    comps = rigid_components(bowtie).components
    assert sorted(comps) == [(0, 1, 2), (2, 3, 4)]


def test_isolated_vertices_are_singletons():
    dec = rigid_components(SimpleGraph(4, [(0, 1)]))
    assert dec.components == [(0, 1), (2,), (3,)]
    assert "component 2: 3" in dec.format()


@given(simple_graphs(max_n=8))
def test_component_partition(g):
    dec = rigid_components(g)
    comps = dec.components
    # every edge in exactly one component, which contains both ends
    for e, (u, v) in enumerate(g.edge_list()):
        c = comps[dec.edge_component[e]]
        assert u in c and v in c
        owners = [i for i, c2 in enumerate(comps) if u in c2 and v in c2]
        assert owners == [dec.edge_component[e]]
    for a, b in itertools.combinations(comps, 2):
        assert len(set(a) & set(b)) <= 1
    for c in comps:
        if len(c) >= 2:
            sub, _ = g.subgraph(c)
            assert brute_force_laman(sub).spanning
    covered = set().union(*map(set, comps)) if comps else set()
    assert covered == set(range(g.n))


@given(simple_graphs(max_n=9), st.randoms(use_true_random=False))
def test_components_independent_of_order(g, rng):
    edges = g.edge_list()
    rng.shuffle(edges)
    assert rigid_components(SimpleGraph(g.n, edges)).as_sets() == rigid_components(g).as_sets()


@given(simple_graphs(max_n=9, min_n=2), st.randoms(use_true_random=False))
def test_monotone_under_edge_addition(g, rng):
    non_edges = [(u, v) for u, v in itertools.combinations(range(g.n), 2) if not g.has_edge(u, v)]
    if not non_edges:
        return
    h = g.with_edges([rng.choice(non_edges)])
    assert rigid_components(h).largest() >= rigid_components(g).largest()


@pytest.mark.parametrize("seed", range(30))
def test_gluing_two_laman_graphs(seed):
    rng = random.Random(seed)
    a, b = rng.randint(2, 7), rng.randint(2, 7)
    ea = laman_graph(a, rng)
    eb = [(u + a, v + a) for u, v in laman_graph(b, rng)]
    while True:
        bridges = {(rng.randrange(a), a + rng.randrange(b)) for _ in range(3)}
        if len(bridges) == 3 and len({u for u, _ in bridges}) >= 2 and len({v for _, v in bridges}) >= 2:
            break
    g = SimpleGraph(a + b, ea + eb + sorted(bridges))
    assert rigid_components(g).components == [tuple(range(a + b))]


@given(simple_graphs(max_n=9, min_n=3))
def test_dense_graph_has_big_rigid_circuit(g):
    if g.m < 2 * g.n - 2:
        return
    # the circuit sits inside a component; peeling degree-2 vertices exposes it
    found = False
    for c in rigid_components(g).components:
        if len(c) >= 4:
            sub, _ = g.subgraph(c)
            core = k_core(sub, 3)
            if core.size >= 4 and is_laman_spanning(sub.subgraph(core.members)[0]):
                found = True
    assert found


@given(simple_graphs(max_n=9, min_n=2), st.randoms(use_true_random=False))
def test_four_extra_edges_in_a_component_block_orientation(g, rng):
    comps = [c for c in rigid_components(g).components if len(c) >= 2]
    if not comps:
        return
    c = rng.choice(comps)
    extra = [tuple(rng.sample(c, 2)) for _ in range(4)]
    h = MultiGraph(g.n, g.edge_list() + extra)
    assert isinstance(two_orientation(h), DensityWitness)


def test_laman_spanning_helper():
    assert is_laman_spanning(SimpleGraph(1))
    assert is_laman_spanning(complete_graph(4))
    assert not is_laman_spanning(cycle_graph(4))


# -- 2-orientation ---------------------------------------------------------------

def test_orientation_examples():
    o = two_orientation(cycle_graph(5))
    assert o.outdeg == [1] * 5
    o = two_orientation(complete_graph(5))
    assert o.outdeg == [2] * 5
    w = two_orientation(complete_graph(6))
    assert isinstance(w, DensityWitness)
    assert w.vertices == list(range(6)) and w.induced_edges == 15
    assert not w


@given(multigraphs())
def test_two_orientation_matches_oracle(g):
    res = two_orientation(g)
    ok = brute_force_two_orientable(g)
    assert (not isinstance(res, DensityWitness)) == ok
    if ok:
        res.check(g)
        assert res.max_outdeg() <= 2 and len(res.arcs) == g.m
    else:
        assert res.induced_edges > 2 * len(res.vertices)


@given(multigraphs(max_m=30))
def test_max_two_orientation_is_maximal(g):
    o, mask = max_two_orientation(g)
    assert o.max_outdeg() <= 2
    assert int(mask.sum()) == len(o.arcs)
    ids = g.edge_ids()
    kept = [g.endpoints(ids[i]) for i in np.nonzero(mask)[0]]
    assert brute_force_two_orientable(MultiGraph(g.n, kept))
    for i in np.nonzero(~mask)[0]:
        assert not brute_force_two_orientable(MultiGraph(g.n, kept + [g.endpoints(ids[i])]))
