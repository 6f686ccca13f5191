"""Graph containers, orientations and the edge-list text format.

Vertices are dense 0-based integers everywhere in the package.
"""
from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np


class GraphError(ValueError):
    """Raised for malformed edge lists and invalid graph construction."""


class GraphParseError(GraphError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


class SimpleGraph:
    """Undirected simple graph with a fixed edge order.

    The edge order is kept as given; it is the insertion order used by the
    pebble game.  Instances should be treated as immutable.
    """

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] | np.ndarray = ()):
        n = int(n)
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        if not isinstance(edges, np.ndarray):
            edges = list(edges)
        arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if arr.min() < 0 or arr.max() >= n:
                raise GraphError(f"edge endpoint out of range for n={n}")
            loops = np.nonzero(arr[:, 0] == arr[:, 1])[0]
            if loops.size:
                u = int(arr[loops[0], 0])
                raise GraphError(f"self-loop ({u},{u}) not allowed in a simple graph")
            lo = np.minimum(arr[:, 0], arr[:, 1])
            hi = np.maximum(arr[:, 0], arr[:, 1])
            key = lo * n + hi
            uniq, counts = np.unique(key, return_counts=True)
            if counts.max() > 1:
                dup = uniq[np.argmax(counts > 1)]
                raise GraphError(f"duplicate edge ({dup // n},{dup % n})")
        self.n = n
        self.edges = arr
        self.edges.setflags(write=False)
        self._adj = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edges]

    @property
    def adjacency(self) -> list[list[int]]:
        """Per-vertex neighbour lists, each sorted ascending."""
        if self._adj is None:
            adj: list[list[int]] = [[] for _ in range(self.n)]
            for u, v in self.edges.tolist():
                adj[u].append(v)
                adj[v].append(u)
            for lst in adj:
                lst.sort()
            self._adj = adj
        return self._adj

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def neighbors(self, v: int) -> list[int]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        adj = self.adjacency[u]
        return v in adj

    def canonical_edges(self) -> list[tuple[int, int]]:
        return sorted((min(u, v), max(u, v)) for u, v in self.edge_list())

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "SimpleGraph":
        extra = list(extra)
        if not extra:
            return self
        return SimpleGraph(self.n, np.vstack([self.edges, np.asarray(extra, np.int64)]))

    def subgraph(self, vertices: Iterable[int]) -> tuple["SimpleGraph", np.ndarray]:
        """Induced subgraph, relabelled densely; also returns the old labels."""
        keep = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
        relabel = np.full(self.n, -1, np.int64)
        relabel[keep] = np.arange(len(keep))
        if self.m:
            mask = (relabel[self.edges[:, 0]] >= 0) & (relabel[self.edges[:, 1]] >= 0)
            sub = relabel[self.edges[mask]]
        else:
            sub = np.empty((0, 2), np.int64)
        return SimpleGraph(len(keep), sub), keep

    def to_multigraph(self) -> "MultiGraph":
        g = MultiGraph(self.n)
        for u, v in self.edge_list():
            g.add_edge(u, v)
        return g

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, m={self.m})"


class MultiGraph:
    """Undirected multigraph with self-loops, parallel edges and stable edge ids.

    Edge ids are never reused; removing an edge leaves the other ids intact.
    A loop at ``v`` adds 2 to ``degree(v)``.
    """

    def __init__(self, n: int = 0, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        self.n = int(n)
        self._edges: dict[int, tuple[int, int]] = {}
        self._next_id = 0
        self._deg = [0] * self.n
        for u, v in edges:
            self.add_edge(u, v)

    @property
    def m(self) -> int:
        return len(self._edges)

    def add_vertex(self) -> int:
        self._deg.append(0)
        self.n += 1
        return self.n - 1

    def add_edge(self, u: int, v: int) -> int:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise IndexError(f"edge ({u},{v}) out of range for n={self.n}")
        eid = self._next_id
        self._next_id += 1
        self._edges[eid] = (u, v)
        self._deg[u] += 1
        self._deg[v] += 1
        return eid

    def remove_edge(self, eid: int) -> tuple[int, int]:
        u, v = self._edges.pop(eid)
        self._deg[u] -= 1
        self._deg[v] -= 1
        return u, v

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self._edges[eid]

    def __contains__(self, eid: int) -> bool:
        return eid in self._edges

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(eid, u, v)`` in insertion order."""
        for eid, (u, v) in self._edges.items():
            yield eid, u, v

    def edge_ids(self) -> list[int]:
        return list(self._edges)

    def edge_list(self) -> list[tuple[int, int]]:
        return list(self._edges.values())

    def degree(self, v: int) -> int:
        return self._deg[v]

    def degrees(self) -> np.ndarray:
        return np.asarray(self._deg, dtype=np.int64)

    def edge_array(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge ids and an ``(m, 2)`` endpoint array in insertion order."""
        ids = np.fromiter(self._edges.keys(), dtype=np.int64, count=self.m)
        ends = np.array(list(self._edges.values()), dtype=np.int64).reshape(-1, 2)
        return ids, ends

    def copy(self) -> "MultiGraph":
        g = MultiGraph.__new__(MultiGraph)
        g.n = self.n
        g._edges = dict(self._edges)
        g._next_id = self._next_id
        g._deg = list(self._deg)
        return g

    def canonical_edges(self) -> list[tuple[int, int]]:
        return sorted((min(u, v), max(u, v)) for u, v in self._edges.values())

    def loop_count(self) -> int:
        return sum(1 for u, v in self._edges.values() if u == v)

    def parallel_count(self) -> int:
        """Number of edges beyond the first between each unordered pair."""
        seen: dict[tuple[int, int], int] = {}
        for u, v in self._edges.values():
            if u != v:
                key = (min(u, v), max(u, v))
                seen[key] = seen.get(key, 0) + 1
        return sum(c - 1 for c in seen.values())

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, m={self.m})"


class Orientation:
    """Directions for a subset of a graph's edges, keyed by edge id.

    An oriented loop at ``v`` counts once toward ``v``'s out-degree.
    """

    def __init__(self, n: int):
        self.arcs: dict[int, tuple[int, int]] = {}
        self.outdeg = [0] * n

    @property
    def n(self) -> int:
        return len(self.outdeg)

    def add_vertex(self) -> int:
        self.outdeg.append(0)
        return len(self.outdeg) - 1

    def orient(self, eid: int, tail: int, head: int) -> None:
        old = self.arcs.get(eid)
        if old is not None:
            self.outdeg[old[0]] -= 1
        self.arcs[eid] = (tail, head)
        self.outdeg[tail] += 1

    def unorient(self, eid: int) -> tuple[int, int] | None:
        old = self.arcs.pop(eid, None)
        if old is not None:
            self.outdeg[old[0]] -= 1
        return old

    def is_oriented(self, eid: int) -> bool:
        return eid in self.arcs

    def direction(self, eid: int) -> tuple[int, int] | None:
        return self.arcs.get(eid)

    def max_outdeg(self) -> int:
        return max(self.outdeg, default=0)

    def copy(self) -> "Orientation":
        o = Orientation(0)
        o.arcs = dict(self.arcs)
        o.outdeg = list(self.outdeg)
        return o

    def check(self, graph: MultiGraph | None = None) -> None:
        """Assert the out-degree tally matches the arcs (and the graph, if given)."""
        tally = [0] * len(self.outdeg)
        for eid, (t, h) in self.arcs.items():
            tally[t] += 1
            if graph is not None:
                u, v = graph.endpoints(eid)
                if {t, h} != {u, v}:
                    raise AssertionError(f"edge {eid} oriented {t}->{h} but joins {u},{v}")
        if tally != self.outdeg:
            raise AssertionError("out-degree tally out of sync with arcs")

    def format(self) -> str:
        return "".join(f"{t} -> {h}\n" for _, (t, h) in sorted(self.arcs.items()))


# ---------------------------------------------------------------------------
# edge-list text format

def load_graph(text: str, multi: bool = False) -> SimpleGraph | MultiGraph:
    """Parse the edge-list format.

    An optional ``# n=<int>`` header fixes the vertex count; otherwise it is
    one more than the largest index seen.  Other ``#`` lines are comments.
    """
    n_header = None
    edges: list[tuple[int, int]] = []
    linenos: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip().replace(" ", "")
            if body.startswith("n="):
                try:
                    n_header = int(body[2:])
                except ValueError:
                    raise GraphParseError(lineno, raw, "bad vertex-count header") from None
                if n_header < 0:
                    raise GraphParseError(lineno, raw, "negative vertex count")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(lineno, raw, "expected two vertex indices")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(lineno, raw, "non-integer vertex index") from None
        if u < 0 or v < 0:
            raise GraphParseError(lineno, raw, "negative vertex index")
        edges.append((u, v))
        linenos.append(lineno)

    top = max((max(u, v) for u, v in edges), default=-1) + 1
    n = top if n_header is None else n_header
    if n < top:
        bad = next(i for i, (u, v) in enumerate(edges) if max(u, v) >= n)
        raise GraphError(f"line {linenos[bad]}: vertex index exceeds header n={n}")

    if multi:
        return MultiGraph(n, edges)

    seen: set[tuple[int, int]] = set()
    for (u, v), lineno in zip(edges, linenos):
        if u == v:
            raise GraphError(f"line {lineno}: self-loop ({u},{v}) in simple mode")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"line {lineno}: duplicate edge ({u},{v}) in simple mode")
        seen.add(key)
    return SimpleGraph(n, edges)


def read_graph(path, multi: bool = False) -> SimpleGraph | MultiGraph:
    with open(path) as fh:
        return load_graph(fh.read(), multi=multi)


def save_graph(g: SimpleGraph | MultiGraph) -> str:
    """Serialise with a vertex-count header and canonically sorted edges."""
    lines = [f"# n={g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.canonical_edges())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# named families

def complete_graph(n: int) -> SimpleGraph:
    if n < 1:
        raise GraphError("complete graph needs at least one vertex")
    return SimpleGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a: int, b: int) -> SimpleGraph:
    return SimpleGraph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cycle_graph(n: int) -> SimpleGraph:
    if n < 3:
        raise GraphError("cycle needs at least three vertices")
    return SimpleGraph(n, [(i, (i + 1) % n) for i in range(n)])
