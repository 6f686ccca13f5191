"""The (k, l)-pebble game and what is built on it.

Sparsity and tightness tests, Laman bases, rigid-component decomposition,
and 2-orientations with a density witness when none exists.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .graph import MultiGraph, Orientation, SimpleGraph

@dataclass(frozen=True)
class SparsityParams:
    k: int
    ell: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if not 0 <= self.ell < 2 * self.k:
            raise ValueError(f"l={self.ell} outside the matroidal range [0, {2 * self.k})")


LAMAN = SparsityParams(2, 3)
TWO_ORIENT = SparsityParams(2, 0)


def _edge_arrays(g: SimpleGraph | MultiGraph) -> tuple[np.ndarray, np.ndarray]:
    """Edge ids (positions for simple graphs) and an (m, 2) endpoint array."""
    if isinstance(g, SimpleGraph):
        return np.arange(g.m, dtype=np.int64), np.asarray(g.edges, dtype=np.int64)
    return g.edge_array()


class PebbleGame:
    """Incremental (k, l)-pebble game over a fixed vertex set.

    Invariant: ``pebbles[v] + outdeg(v) == k`` for every vertex, and the
    accepted edges are (k, l)-sparse.  Edges are numbered in insertion order.
    """

    def __init__(self, n: int, params: SparsityParams = LAMAN, capacity: int = 16):
        self.n = n
        self.params = params
        k = params.k
        self.pebbles = np.full(n, k, np.int64)
        self.out_e = np.full((n, max(k, 1)), -1, np.int64)
        self.out_c = np.zeros(n, np.int64)
        self._cap = max(capacity, 1)
        self.eu = np.empty(self._cap, np.int64)
        self.ev = np.empty(self._cap, np.int64)
        self.tail = np.full(self._cap, -1, np.int64)
        self.head = np.full(self._cap, -1, np.int64)
        self.accepted = np.zeros(self._cap, np.bool_)
        self.m = 0
        self._seen = np.zeros(n, np.int64)
        self._stamp = np.zeros(1, np.int64)
        self._par = np.empty(n, np.int64)
        self._stk_v = np.empty(n + 1, np.int64)
        self._stk_i = np.empty(n + 1, np.int64)
        self._dead = np.zeros(n, np.bool_)

    def _grow(self, need: int) -> None:
        if need <= self._cap:
            return
        cap = max(need, 2 * self._cap)
        for name, fill in (("eu", 0), ("ev", 0), ("tail", -1), ("head", -1), ("accepted", False)):
            old = getattr(self, name)
            new = np.full(cap, fill, old.dtype)
            new[: self.m] = old[: self.m]
            setattr(self, name, new)
        self._cap = cap

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} not in game on {self.n} vertices")

    def insert(self, u: int, v: int) -> bool:
        """Offer edge uv; accepted iff the accepted set stays sparse."""
        self._check_vertex(u)
        self._check_vertex(v)
        self._grow(self.m + 1)
        e = self.m
        self.eu[e] = u
        self.ev[e] = v
        ok = K.insert_edge(e, u, v, self.params.k, self.params.ell, self.pebbles,
                           self.out_e, self.out_c, self.tail, self.head,
                           self._seen, self._stamp, self._par, self._stk_v, self._stk_i,
                           self._dead)
        self.accepted[e] = ok
        self.m += 1
        return bool(ok)

    def insert_many(self, ends: np.ndarray, stop_at_reject: bool = False) -> int:
        """Offer a batch of edges; returns index (within the batch) of the first rejection, or -1."""
        ends = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
        if ends.size and (ends.min() < 0 or ends.max() >= self.n):
            raise IndexError("edge endpoint outside the game's vertex set")
        base = self.m
        self._grow(base + len(ends))
        self.eu[base: base + len(ends)] = ends[:, 0]
        self.ev[base: base + len(ends)] = ends[:, 1]
        acc = np.zeros(len(ends), np.bool_)
        first = K.run_game(base, ends[:, 0].copy(), ends[:, 1].copy(), self.params.k,
                           self.params.ell, self.pebbles, self.out_e, self.out_c,
                           self.tail, self.head, self._seen, self._stamp, self._par,
                           self._stk_v, self._stk_i, self._dead, acc, stop_at_reject)
        done = len(ends) if (first < 0 or not stop_at_reject) else first + 1
        self.accepted[base: base + done] = acc[:done]
        self.m = base + done
        return int(first)

    # -- views -------------------------------------------------------------

    def outdegree(self) -> np.ndarray:
        return self.out_c.copy()

    def accepted_mask(self) -> np.ndarray:
        return self.accepted[: self.m].copy()

    def direction(self, e: int) -> tuple[int, int] | None:
        if not self.accepted[e]:
            return None
        return int(self.tail[e]), int(self.head[e])

    def reach(self, sources) -> np.ndarray:
        src = np.asarray(sorted(set(int(s) for s in sources)), dtype=np.int64)
        return np.sort(K.reach(src, self.out_e, self.out_c, self.head, self._seen,
                               self._stamp, self._stk_v))

    def check_invariants(self) -> None:
        k = self.params.k
        if np.any(self.pebbles + self.out_c != k):
            raise AssertionError("pebbles + out-degree != k")
        for v in range(self.n):
            for j in range(self.out_c[v]):
                e = self.out_e[v, j]
                if self.tail[e] != v or not self.accepted[e]:
                    raise AssertionError(f"edge {e} listed at {v} but tail is {self.tail[e]}")
        tails = self.tail[: self.m][self.accepted[: self.m]]
        if not np.array_equal(np.bincount(tails, minlength=self.n), self.out_c):
            raise AssertionError("out lists disagree with tails")


def _play(g: SimpleGraph | MultiGraph, params: SparsityParams,
          stop_at_reject: bool = False) -> tuple[PebbleGame, np.ndarray, np.ndarray, int]:
    ids, ends = _edge_arrays(g)
    game = PebbleGame(g.n, params, capacity=len(ends))
    first = game.insert_many(ends, stop_at_reject=stop_at_reject)
    return game, ids, ends, first


# ---------------------------------------------------------------------------
# sparsity

@dataclass
class SparsityResult:
    verdict: str          # "tight", "sparse" or "neither"
    basis: list[int]      # edge ids of the accepted (independent) edges
    rank: int
    game: PebbleGame = field(repr=False)

    @property
    def is_sparse(self) -> bool:
        return self.verdict != "neither"

    @property
    def is_tight(self) -> bool:
        return self.verdict == "tight"


def is_sparse(g: SimpleGraph | MultiGraph, params: SparsityParams = LAMAN) -> SparsityResult:
    """Run the pebble game over ``g`` in edge order and classify it.

    The basis is a maximal sparse edge subset; its size is the matroid rank.
    """
    game, ids, ends, _ = _play(g, params)
    acc = game.accepted_mask()
    basis = ids[acc].tolist()
    if acc.all():
        verdict = "tight" if len(ids) == params.k * g.n - params.ell else "sparse"
    else:
        verdict = "neither"
    return SparsityResult(verdict, basis, len(basis), game)


def is_laman_spanning(g: SimpleGraph) -> bool:
    if g.n == 1:
        return True
    return is_sparse(g, LAMAN).rank == 2 * g.n - 3


# ---------------------------------------------------------------------------
# rigid components

@dataclass
class ComponentDecomposition:
    """Rigid components as sorted vertex tuples plus the edge -> component map.

    Components are numbered in order of their first edge; isolated vertices
    come last as singletons.
    """
    n: int
    components: list[tuple[int, ...]]
    edge_component: np.ndarray

    def sizes(self) -> list[int]:
        return [len(c) for c in self.components]

    def largest(self) -> int:
        return max(self.sizes(), default=0)

    def as_sets(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.components}

    def format(self) -> str:
        return "".join(f"component {i}: {' '.join(map(str, c))}\n"
                       for i, c in enumerate(self.components))


def _csr(n: int, ends: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = len(ends)
    src = np.concatenate([ends[:, 0], ends[:, 1]])
    dst = np.concatenate([ends[:, 1], ends[:, 0]])
    eid = np.concatenate([np.arange(m), np.arange(m)]).astype(np.int64)
    order = np.lexsort((dst, src))
    indptr = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order].astype(np.int64), eid[order]


def rigid_components(g: SimpleGraph) -> ComponentDecomposition:
    """Decompose a simple graph into its rigid components.

    A Laman basis is built with the (2,3)-pebble game; each component is then
    recovered once from the final pebble state by pinning three pebbles on
    one of its basis edges and collecting every vertex that cannot reach a
    free pebble.  Rejected edges fall inside the component spanning them.
    """
    if not isinstance(g, SimpleGraph):
        raise TypeError("rigid components are defined here for simple graphs")
    game, _, ends, _ = _play(g, LAMAN)
    acc = game.accepted_mask()
    indptr, nbr, nbr_e = _csr(g.n, ends)
    labels = K.component_labels(ends[:, 0].copy(), ends[:, 1].copy(), acc, 2, 3,
                                game.pebbles, game.out_e, game.out_c, game.tail, game.head,
                                indptr, nbr, nbr_e, game._seen, game._stamp, game._par,
                                game._stk_v, game._stk_i)
    ncomp = int(labels.max()) + 1 if len(labels) else 0
    comps: list[tuple[int, ...]] = []
    if ncomp:
        lab = np.concatenate([labels, labels])
        verts = np.concatenate([ends[:, 0], ends[:, 1]])
        pairs = np.unique(lab * g.n + verts)
        lab_s = pairs // g.n
        vert_s = pairs % g.n
        cuts = np.searchsorted(lab_s, np.arange(ncomp + 1))
        vl = vert_s.tolist()
        comps = [tuple(vl[cuts[i]:cuts[i + 1]]) for i in range(ncomp)]
    if g.m:
        touched = np.zeros(g.n, bool)
        touched[ends.ravel()] = True
        isolated = np.nonzero(~touched)[0].tolist()
    else:
        isolated = list(range(g.n))
    comps.extend((v,) for v in isolated)
    return ComponentDecomposition(g.n, comps, labels)


# ---------------------------------------------------------------------------
# 2-orientations

@dataclass
class DensityWitness:
    """A vertex set inducing more than twice as many edges as vertices."""
    vertices: list[int]
    induced_edges: int

    def __bool__(self) -> bool:  # a witness means "no orientation"
        return False


def _as_orientation(g, game: PebbleGame, ids: np.ndarray) -> Orientation:
    o = Orientation(g.n)
    acc = game.accepted_mask()
    for e in np.nonzero(acc)[0].tolist():
        o.orient(int(ids[e]), int(game.tail[e]), int(game.head[e]))
    return o


def max_two_orientation(g: SimpleGraph | MultiGraph) -> tuple[Orientation, np.ndarray]:
    """Orient a maximal 2-orientable edge subset; the rest stay unoriented.

    Returns the orientation and the boolean mask of oriented edges (edge order).
    """
    game, ids, _, _ = _play(g, TWO_ORIENT)
    return _as_orientation(g, game, ids), game.accepted_mask()


def _induced_count(ends: np.ndarray, verts: np.ndarray, n: int) -> int:
    inside = np.zeros(n, bool)
    inside[verts] = True
    return int(np.count_nonzero(inside[ends[:, 0]] & inside[ends[:, 1]]))


def two_orientation(g: SimpleGraph | MultiGraph) -> Orientation | DensityWitness:
    """Orient every edge with out-degrees at most 2, or explain why not.

    On failure the witness is the set of vertices reachable from the first
    rejected edge's endpoints: it carries no free pebble, so it already spans
    ``2 |V'|`` accepted edges plus the rejected one.
    """
    game, ids, ends, first = _play(g, TWO_ORIENT, stop_at_reject=True)
    if first < 0:
        return _as_orientation(g, game, ids)
    u, v = int(ends[first, 0]), int(ends[first, 1])
    verts = game.reach([u, v])
    return DensityWitness(verts.tolist(), _induced_count(ends, verts, g.n))
