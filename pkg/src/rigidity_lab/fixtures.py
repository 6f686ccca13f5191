"""Named graph families used as test fixtures."""
from __future__ import annotations

import numpy as np

from .graph import GraphError, SimpleGraph, complete_bipartite
from .pebble import is_sparse, rigid_components

MAX_RETRIES = 100


class FixtureError(RuntimeError):
    pass


def _split(adj: list[set[int]], rng: np.random.Generator) -> None:
    """One Henneberg II move on a simple graph, preferring moves that close no triangle."""
    edges = [(i, j) for i in range(len(adj)) for j in adj[i] if i < j]
    n = len(adj)
    free, other = [], []
    for i, j in edges:
        for k in range(n):
            if k == i or k == j:
                continue
            (other if (k in adj[i] or k in adj[j]) else free).append((i, j, k))
    pool = free or other
    i, j, k = pool[int(rng.integers(len(pool)))]
    adj[i].discard(j)
    adj[j].discard(i)
    v = n
    adj.append({i, j, k})
    for x in (i, j, k):
        adj[x].add(v)


def _to_graph(adj: list[set[int]]) -> SimpleGraph:
    return SimpleGraph(len(adj), [(i, j) for i in range(len(adj)) for j in sorted(adj[i]) if i < j])


def _only_edges(g: SimpleGraph) -> bool:
    return all(len(c) <= 2 for c in rigid_components(g).components)


def streinu_family(n: int, seed: int = 0) -> SimpleGraph:
    """A Laman-sparse graph with 2n-4 edges whose rigid components are its edges.

    Grown from K_{3,3} minus an edge by pairs of Henneberg II moves; each pair
    is checked with the pebble game and redrawn if a larger component appears.
    """
    if n < 6 or n % 2:
        raise GraphError(f"the family needs an even n >= 6, got {n}")
    rng = np.random.default_rng(seed)
    k33 = complete_bipartite(3, 3)
    adj = [set(k33.neighbors(v)) for v in range(6)]
    adj[0].discard(3)
    adj[3].discard(0)
    while len(adj) < n:
        for _ in range(MAX_RETRIES):
            trial = [set(s) for s in adj]
            _split(trial, rng)
            _split(trial, rng)
            if _only_edges(_to_graph(trial)):
                adj = trial
                break
        else:
            raise FixtureError(f"could not extend the family to n={len(adj) + 2} (n={n}, seed={seed})")
    g = _to_graph(adj)
    if g.m != 2 * n - 4 or is_sparse(g).verdict == "neither":
        raise FixtureError(f"construction lost sparsity (n={n}, seed={seed})")
    return g
