"""Random graphs, degree sequences, configurations and the FR matching moves.

A configuration is a multiset of labelled vertex copies (half-edges).  The
matching built on it is a list of copy pairs; pair ``i`` becomes edge ``i``
of the resulting multigraph.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import MultiGraph, SimpleGraph

_BUF = 4096


class RngStream:
    """A reproducible random stream keyed by (seed, stream id).

    Streams are derived with ``SeedSequence(seed, spawn_key=...)`` so any
    trial's draws depend only on the master seed and the trial's key, never on
    scheduling.  ``child`` derives a further independent stream.
    """

    def __init__(self, seed: int, stream: int | tuple[int, ...] = 0):
        key = (stream,) if isinstance(stream, int) else tuple(stream)
        self.seed = int(seed)
        self.key = key
        self.gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key)))
        self._buf: list[float] = []
        self._pos = 0

    def child(self, i: int) -> "RngStream":
        return RngStream(self.seed, self.key + (i,))

    def random(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self.gen.random(_BUF).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def randbelow(self, k: int) -> int:
        """Uniform integer in [0, k)."""
        r = int(self.random() * k)
        return r if r < k else k - 1

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, key={self.key})"


# ---------------------------------------------------------------------------
# G(n, c/n)

def _pair_of(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # pairs (u < v) are numbered v(v-1)/2 + u
    v = ((1 + np.sqrt(1 + 8 * idx.astype(np.float64))) // 2).astype(np.int64)
    base = v * (v - 1) // 2
    v = np.where(base > idx, v - 1, v)
    base = v * (v - 1) // 2
    v = np.where(idx - base >= v, v + 1, v)
    base = v * (v - 1) // 2
    return idx - base, v


def gnp(n: int, c: float, rng: RngStream) -> SimpleGraph:
    """G(n, c/n) by geometric skipping over the pair index, O(n + m)."""
    if n < 0 or c < 0:
        raise ValueError("n and c must be non-negative")
    if n < 2 or c == 0:
        return SimpleGraph(max(n, 0))
    p = c / n
    if p > 1:
        raise ValueError(f"edge probability c/n = {p} exceeds 1")
    total = n * (n - 1) // 2
    chunks = []
    pos = -1
    batch = int(p * total + 10 * np.sqrt(p * total + 1) + 16)
    while True:
        gaps = rng.gen.geometric(p, size=batch).astype(np.int64)
        idx = pos + np.cumsum(gaps)
        chunks.append(idx[idx < total])
        if idx[-1] >= total:
            break
        pos = int(idx[-1])
    idx = np.concatenate(chunks)
    u, v = _pair_of(idx)
    return SimpleGraph(n, np.stack([u, v], axis=1))


# ---------------------------------------------------------------------------
# degree sequences

@dataclass
class DegreeSequence:
    degrees: np.ndarray

    def __post_init__(self):
        self.degrees = np.asarray(self.degrees, dtype=np.int64).ravel()
        if np.any(self.degrees < 0):
            raise ValueError("degrees must be non-negative")
        if int(self.degrees.sum()) % 2:
            raise ValueError("degree sum must be even")

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def total(self) -> int:
        return int(self.degrees.sum())


def truncated_poisson_sequence(n: int, tau: float, min_deg: int, rng: RngStream) -> DegreeSequence:
    """i.i.d. Poisson(tau) degrees conditioned on ``>= min_deg``, parity repaired.

    An odd sum is fixed by adding one to a uniformly chosen vertex.
    """
    if min_deg not in (3, 4):
        raise ValueError("min_deg must be 3 or 4")
    out = np.empty(0, np.int64)
    while len(out) < n:
        draw = rng.gen.poisson(tau, size=2 * (n - len(out)) + 64)
        out = np.concatenate([out, draw[draw >= min_deg]])
    deg = out[:n].copy()
    if deg.sum() % 2:
        deg[rng.randbelow(n)] += 1
    return DegreeSequence(deg)


# ---------------------------------------------------------------------------
# configurations

class ConfigurationState:
    """Unmatched copies with O(1) uniform draw, O(1) deletion, and the matching so far.

    Copy ``c`` belongs to vertex ``owner[c]``.  ``pool`` holds all unmatched
    copies; ``vc[v]`` holds those of ``v``.  Both support swap-delete.
    """

    def __init__(self, degrees: DegreeSequence | np.ndarray | list[int]):
        if not isinstance(degrees, DegreeSequence):
            degrees = DegreeSequence(degrees)
        self.n = degrees.n
        deg = degrees.degrees.tolist()
        self.owner: list[int] = [v for v, d in enumerate(deg) for _ in range(d)]
        self.pool: list[int] = list(range(len(self.owner)))
        self.where: list[int] = list(range(len(self.owner)))
        self.vc: list[list[int]] = []
        self.vpos: list[int] = [0] * len(self.owner)
        c = 0
        for d in deg:
            self.vc.append(list(range(c, c + d)))
            for j in range(d):
                self.vpos[c + j] = j
            c += d
        self.pairs: list[list[int]] = []

    @property
    def total(self) -> int:
        return len(self.pool)

    def copies(self, v: int) -> int:
        return len(self.vc[v])

    def counts(self) -> list[int]:
        return [len(x) for x in self.vc]

    def remove(self, c: int) -> int:
        """Delete copy c; returns its owner."""
        pool, where = self.pool, self.where
        i = where[c]
        last = pool.pop()
        if last != c:
            pool[i] = last
            where[last] = i
        v = self.owner[c]
        lst = self.vc[v]
        j = self.vpos[c]
        tail = lst.pop()
        if tail != c:
            lst[j] = tail
            self.vpos[tail] = j
        return v

    def take_of(self, v: int) -> int:
        """Remove and return a copy of v (the most recently listed one)."""
        if not self.vc[v]:
            raise ValueError(f"vertex {v} has no copies left")
        c = self.vc[v][-1]
        self.remove(c)
        return c

    def take_uniform(self, rng: RngStream) -> int:
        if not self.pool:
            raise ValueError("no copies left")
        c = self.pool[rng.randbelow(len(self.pool))]
        self.remove(c)
        return c

    def to_multigraph(self) -> MultiGraph:
        own = self.owner
        return MultiGraph(self.n, [(own[a], own[b]) for a, b in self.pairs])

    def matching_key(self) -> frozenset[frozenset[int]]:
        """The matching as a set of copy pairs (for uniformity tests)."""
        return frozenset(frozenset(p) for p in self.pairs)


def _match_rest(cfg: ConfigurationState, rng: RngStream) -> None:
    pairs = cfg.pairs
    while cfg.pool:
        a = cfg.pool[-1]
        cfg.remove(a)
        b = cfg.take_uniform(rng)
        pairs.append([a, b])


def uniform_matching(cfg: ConfigurationState, rng: RngStream) -> MultiGraph:
    """Match every remaining copy: an arbitrary copy to a uniform one, repeatedly."""
    if cfg.total % 2:
        raise ValueError("an odd number of copies cannot be perfectly matched")
    _match_rest(cfg, rng)
    return cfg.to_multigraph()


def _fr_one(cfg: ConfigurationState, v: int, rng: RngStream) -> int:
    if cfg.total < 2:
        raise ValueError("FR I needs at least two copies")
    a = cfg.take_of(v)
    b = cfg.take_uniform(rng)
    cfg.pairs.append([a, b])
    return len(cfg.pairs) - 1


def fr_one(cfg: ConfigurationState, v: int, rng: RngStream) -> tuple[int, int]:
    """FR I: match a copy of v to a uniform remaining copy; returns the edge (v, w)."""
    e = _fr_one(cfg, v, rng)
    return v, cfg.owner[cfg.pairs[e][1]]


@dataclass(frozen=True)
class SelfLoop:
    v: int
    eid: int


@dataclass(frozen=True)
class SpliceToken:
    """Deferred FR II move: copies a0, a1 of v await a pair to split.

    ``watermark`` is the matching length when the token was issued; the pairs
    from there on form the matching on the remaining copies.
    """
    v: int
    a0: int
    a1: int
    watermark: int


@dataclass(frozen=True)
class Splice:
    """Outcome of resolving a token: pair ``eid`` (i-j) became i-v, and i-v keeps
    ``eid`` while v-j is the new pair ``new_eid``."""
    v: int
    i: int
    j: int
    eid: int
    new_eid: int


def fr_two_begin(cfg: ConfigurationState, v: int, rng: RngStream) -> SelfLoop | SpliceToken:
    """FR II on two copies of v: a self-loop with probability 1/(total - 1), else a token."""
    if cfg.copies(v) < 2:
        raise ValueError(f"FR II needs two copies of {v}")
    total = cfg.total
    a0 = cfg.take_of(v)
    a1 = cfg.take_of(v)
    if rng.randbelow(total - 1) == 0:
        cfg.pairs.append([a0, a1])
        return SelfLoop(v, len(cfg.pairs) - 1)
    return SpliceToken(v, a0, a1, len(cfg.pairs))


def fr_two_resolve(token: SpliceToken, cfg: ConfigurationState, rng: RngStream) -> Splice:
    """Split a uniform pair generated after the token was issued.

    Tokens must be resolved last-issued first, once the matching is complete.
    """
    pool = len(cfg.pairs) - token.watermark
    if pool <= 0:
        raise RuntimeError("no matched pair available to splice")
    e = token.watermark + rng.randbelow(pool)
    b0, b1 = cfg.pairs[e]
    if rng.randbelow(2):
        b0, b1 = b1, b0
    cfg.pairs[e] = [token.a0, b0]
    cfg.pairs.append([token.a1, b1])
    own = cfg.owner
    return Splice(token.v, own[b0], own[b1], e, len(cfg.pairs) - 1)


def fr_matching(cfg: ConfigurationState, rng: RngStream, p_two: float = 0.5) -> MultiGraph:
    """Complete the matching by a random interleaving of FR I and FR II moves.

    Each step picks the owner of a uniform copy; if it has two copies, FR II
    is used with probability ``p_two``.  Tokens resolve LIFO at the end.
    """
    stack: list[SpliceToken] = []
    while cfg.total:
        v = cfg.owner[cfg.pool[rng.randbelow(cfg.total)]]
        if cfg.copies(v) >= 2 and rng.random() < p_two:
            t = fr_two_begin(cfg, v, rng)
            if isinstance(t, SpliceToken):
                stack.append(t)
        else:
            _fr_one(cfg, v, rng)
    while stack:
        fr_two_resolve(stack.pop(), cfg, rng)
    return cfg.to_multigraph()
