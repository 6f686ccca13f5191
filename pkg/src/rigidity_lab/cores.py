"""k-core peeling and (3+2)-core accretion."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import SimpleGraph


@dataclass
class CoreResult:
    """Members of a core plus the event order that produced it.

    For a k-core peel, ``order`` holds ``(v, neighbours still present)`` per
    removal.  For the (3+2)-core, ``order`` holds ``(v, (a, b))`` per accreted
    vertex, ``a`` and ``b`` being members that precede ``v``.
    """
    label: str
    n: int
    members: np.ndarray
    order: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    base: np.ndarray | None = None  # the 3-core a (3+2)-core was grown from

    @property
    def size(self) -> int:
        return len(self.members)

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n, bool)
        out[self.members] = True
        return out

    def format(self) -> str:
        lines = [f"core k={self.label} size={self.size}",
                 " ".join(map(str, self.members.tolist()))]
        if self.label == "3+2":
            lines += [f"{v} <- {a} {b}" for v, (a, b) in self.order]
        return "\n".join(lines) + "\n"


def k_core(g: SimpleGraph, k: int) -> CoreResult:
    """Peel vertices of degree below k, lowest (degree, index) first."""
    if k < 1:
        raise ValueError("k must be at least 1")
    adj = g.adjacency
    deg = [len(a) for a in adj]
    alive = [True] * g.n
    heap = [(d, v) for v, d in enumerate(deg) if d < k]
    heapq.heapify(heap)
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if not alive[v] or d != deg[v]:
            continue
        alive[v] = False
        present = tuple(w for w in adj[v] if alive[w])
        order.append((v, present))
        for w in present:
            deg[w] -= 1
            if deg[w] < k:
                heapq.heappush(heap, (deg[w], w))
    members = np.flatnonzero(np.array(alive, bool)) if g.n else np.zeros(0, np.int64)
    return CoreResult(str(k), g.n, members.astype(np.int64), order)


def core_mask(g: SimpleGraph, k: int) -> np.ndarray:
    """Membership mask of the k-core, by vectorised rounds (no event order)."""
    alive = np.ones(g.n, bool)
    ends = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    while True:
        live = ends[alive[ends[:, 0]] & alive[ends[:, 1]]]
        deg = np.bincount(live.ravel(), minlength=g.n)
        drop = alive & (deg < k)
        if not drop.any():
            return alive
        alive &= ~drop


def three_plus_two_core(g: SimpleGraph, core: CoreResult | None = None) -> CoreResult:
    """Grow the 3-core by repeatedly adding vertices with two neighbours inside.

    A vertex joins the first time two of its neighbours are members; those two
    (in discovery order) are its attachment pair.
    """
    if core is None:
        core = k_core(g, 3)
    adj = g.adjacency
    inside = core.mask().tolist()
    found: list[list[int]] = [[] for _ in range(g.n)]
    queue: deque[int] = deque()
    for v in range(g.n):
        if inside[v]:
            continue
        for w in adj[v]:
            if inside[w]:
                found[v].append(w)
                if len(found[v]) == 2:
                    queue.append(v)
                    break
    order = []
    while queue:
        v = queue.popleft()
        inside[v] = True
        order.append((v, (found[v][0], found[v][1])))
        for w in adj[v]:
            if not inside[w] and len(found[w]) < 2:
                found[w].append(v)
                if len(found[w]) == 2:
                    queue.append(w)
    members = np.flatnonzero(np.array(inside, bool)).astype(np.int64) if g.n else np.zeros(0, np.int64)
    return CoreResult("3+2", g.n, members, order, base=core.members)
