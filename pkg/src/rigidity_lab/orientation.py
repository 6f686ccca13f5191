"""The 2-orientation algorithm on a random 3-core configuration.

``orient_core_full`` generates the multigraph by FR moves while orienting it;
``simplified_run`` replays only the copy removals.  With the same RngStream
both remove exactly the same copies in phase 3: the full version draws its
FR II coins from a separate child stream.

Phase 3 processes minimum-degree vertices until the minimum degree reaches 4
(phase 4: the rest is matched uniformly and oriented by the pebble game) or
at most ceil(sqrt(n)) vertices remain (the cutoff: the rest is left loose).
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

from .cores import CoreResult
from .graph import GraphError, MultiGraph, Orientation, SimpleGraph
from .pebble import max_two_orientation
from .random_models import (ConfigurationState, DegreeSequence, RngStream, SelfLoop,
                            fr_two_begin, fr_two_resolve, _match_rest)

CAUSES = ("L1", "L2", "L3", "cutoff", "phase4")
SPLICE_STREAM = 1


@dataclass
class RoundStats:
    """What a run did: rounds, loose vertices by cause, and how it ended.

    ``loose_by_cause`` counts L1 (ran out before being processed), L2
    (processed at degree 1) and L3 (processed at degree 2, self-loop
    revealed) during phase 3, plus vertices left over at the cutoff and
    phase-4 vertices the pebble game could not make tight.
    """
    n: int
    round_lengths: list[int] = field(default_factory=list)
    loose_by_cause: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CAUSES, 0))
    processed: int = 0
    children: int = 0
    ending: str = "empty"               # "empty", "phase4" or "cutoff"
    phase4_size: int = 0
    phase4_success: bool | None = None
    labels: list[str] | None = None     # per vertex: "tight", a cause, "pending" or "" (no copies)
    trace: list[int] | None = None      # copies removed in phase 3, in order

    @property
    def max_round(self) -> int:
        return max(self.round_lengths, default=0)

    @property
    def phase3_loose(self) -> int:
        return sum(self.loose_by_cause[c] for c in ("L1", "L2", "L3"))

    @property
    def loose_total(self) -> int:
        return sum(self.loose_by_cause.values())

    @property
    def mean_children(self) -> float:
        return self.children / self.processed if self.processed else 0.0

    def record(self, tau: float | None, seed: int) -> dict:
        return {"n": self.n, "tau": tau, "seed": seed, "loose_by_cause": dict(self.loose_by_cause),
                "max_round": self.max_round, "phase4_size": self.phase4_size,
                "phase4_success": self.phase4_success}

    def to_json(self, tau: float | None, seed: int) -> str:
        return json.dumps(self.record(tau, seed), sort_keys=True)


def segment_rounds(entry_degrees) -> list[int]:
    """Round lengths from the degrees at which vertices were first processed.

    A round starts at each vertex processed at degree >= 3 and absorbs the
    lower-degree vertices processed after it.  Leading low-degree entries form
    a round of their own.
    """
    rounds: list[int] = []
    for d in entry_degrees:
        if d >= 3 or not rounds:
            rounds.append(0)
        rounds[-1] += 1
    return rounds


class _MinBuckets:
    """Lowest (degree, index) among live vertices; degrees only ever decrease."""

    def __init__(self, counts: list[int]):
        top = max(counts, default=0)
        self.b: list[list[int]] = [[] for _ in range(top + 1)]
        for v, d in enumerate(counts):
            if d > 0:
                self.b[d].append(v)  # ascending, hence already a heap
        self.lo = 1

    def push(self, v: int, d: int) -> None:
        heapq.heappush(self.b[d], v)
        if d < self.lo:
            self.lo = d

    def peek(self, deg: list[int]) -> tuple[int, int]:
        b = self.b
        d = max(self.lo, 1)
        while d < len(b):
            h = b[d]
            while h:
                v = h[0]
                if deg[v] == d:
                    self.lo = d
                    return v, d
                heapq.heappop(h)
            d += 1
        raise RuntimeError("no live vertex left")


class _Run:
    def __init__(self, degrees, rng: RngStream, full: bool, suspend: bool,
                 cutoff: int | None, check: bool, trace: bool, strict: bool):
        if not isinstance(degrees, DegreeSequence):
            degrees = DegreeSequence(degrees)
        if strict and degrees.n and int(degrees.degrees.min()) < 3:
            raise ValueError("the 3-core configuration needs every degree >= 3")
        self.cfg = ConfigurationState(degrees)
        self.n = n = degrees.n
        self.rng = rng
        self.splice_rng = rng.child(SPLICE_STREAM)
        self.full = full
        self.suspend = suspend
        self.cut = (math.ceil(math.sqrt(n)) if cutoff is None else cutoff) if suspend else -1
        self.check = check
        self.deg = self.cfg.counts()
        self.start_deg = list(self.deg)
        self.buckets = _MinBuckets(self.deg)
        self.remaining = sum(1 for d in self.deg if d)
        self.entry = [-1] * n
        self.loop_l3 = [False] * n
        self.orient = Orientation(n) if full else None
        self.tokens = []
        self.stats = RoundStats(n)
        if trace:
            self.stats.trace = []
        self.current = -1
        self.kids = 0

    # -- bookkeeping ---------------------------------------------------------

    def _removed(self, c: int) -> int:
        """Account for the removal of copy c; returns its owner."""
        if self.stats.trace is not None:
            self.stats.trace.append(c)
        w = self.cfg.owner[c]
        d = self.deg[w] - 1
        self.deg[w] = d
        if d == 0:
            self.remaining -= 1
        if w != self.current:
            if d > 0:
                self.buckets.push(w, d)
            if d == 2 and self.entry[w] < 0:
                self.kids += 1  # first drop below degree 3
        return w

    def _orient(self, eid: int, t: int, h: int) -> None:
        self.orient.orient(eid, t, h)
        if self.check and self.orient.outdeg[t] > 2:
            raise AssertionError(f"vertex {t} reached out-degree {self.orient.outdeg[t]}")

    # -- moves -------------------------------------------------------------

    def _fr_one(self, v: int, oriented: bool) -> int:
        cfg = self.cfg
        a = cfg.take_of(v)
        self._removed(a)
        b = cfg.take_uniform(self.rng)
        w = self._removed(b)
        if self.full:
            cfg.pairs.append([a, b])
            if oriented:
                self._orient(len(cfg.pairs) - 1, v, w)
        return w

    def _fr_two(self, v: int) -> None:
        cfg = self.cfg
        if self.full:
            t = fr_two_begin(cfg, v, self.splice_rng)
            if isinstance(t, SelfLoop):
                a0, a1 = cfg.pairs[t.eid]
                self._orient(t.eid, v, v)
            else:
                a0, a1 = t.a0, t.a1
                self.tokens.append(t)
        else:
            a0 = cfg.take_of(v)
            a1 = cfg.take_of(v)
        self._removed(a0)
        self._removed(a1)

    def _process(self, v: int) -> None:
        d = self.deg[v]
        self.entry[v] = d
        self.current = v
        self.kids = 0
        if d >= 3 or not self.stats.round_lengths:
            self.stats.round_lengths.append(0)
        self.stats.round_lengths[-1] += 1
        while self.deg[v] > 0:
            d = self.deg[v]
            if d <= 2:
                w = self._fr_one(v, oriented=True)
                if d == 2 and w == v:
                    # reached at selection, or after a loop in the d >= 4 case
                    self.loop_l3[v] = True
            elif d == 3:
                self._fr_two(v)
            else:
                self._fr_one(v, oriented=False)
        self.current = -1
        self.stats.processed += 1
        self.stats.children += self.kids

    # -- driver ------------------------------------------------------------

    def run(self) -> RoundStats:
        st = self.stats
        while self.remaining > 0:
            v, d = self.buckets.peek(self.deg)
            if self.suspend and d >= 4:
                st.ending = "phase4"
                break
            if self.suspend and self.remaining <= self.cut:
                st.ending = "cutoff"
                break
            self._process(v)
        rest = [v for v in range(self.n) if self.deg[v] > 0]
        st.phase4_size = len(rest) if st.ending == "phase4" else 0
        if self.full:
            self._finish(rest)
        self._label(rest)
        return st

    def _finish(self, rest: list[int]) -> None:
        cfg = self.cfg
        start = len(cfg.pairs)
        _match_rest(cfg, self.rng)
        if self.stats.ending == "phase4":
            own = cfg.owner
            local = {v: i for i, v in enumerate(rest)}
            sub = MultiGraph(len(rest), [(local[own[a]], local[own[b]]) for a, b in cfg.pairs[start:]])
            o4, _ = max_two_orientation(sub)
            for eid, (t, h) in sorted(o4.arcs.items()):
                self._orient(start + eid, rest[t], rest[h])
            self.stats.phase4_success = all(self.orient.outdeg[v] == 2 for v in rest)
        while self.tokens:
            self._splice(fr_two_resolve(self.tokens.pop(), cfg, self.splice_rng))

    def _splice(self, sp) -> None:
        old = self.orient.unorient(sp.eid)
        if old is None:
            # the split edge was never oriented: v still gains its second out-edge
            self._orient(sp.new_eid, sp.v, sp.j)
        elif old[0] == sp.i:
            self._orient(sp.eid, sp.i, sp.v)
            self._orient(sp.new_eid, sp.v, sp.j)
        else:
            self._orient(sp.new_eid, sp.j, sp.v)
            self._orient(sp.eid, sp.v, sp.i)

    def _label(self, rest: list[int]) -> None:
        st = self.stats
        labels = [""] * self.n
        rest_set = set(rest)
        for v in range(self.n):
            if self.start_deg[v] == 0:
                continue
            if v in rest_set:
                if st.ending == "cutoff":
                    cause = "cutoff"
                elif not self.full:
                    cause = "pending"  # left for phase 4, which this run does not play
                elif self.orient.outdeg[v] == 2:
                    cause = "tight"
                else:
                    cause = "phase4"
            elif self.entry[v] < 0:
                cause = "L1"
            elif self.entry[v] == 1:
                cause = "L2"
            elif self.loop_l3[v]:
                cause = "L3"
            else:
                cause = "tight"
            if self.full and v not in rest_set:
                tight = self.orient.outdeg[v] == 2
                if tight != (cause == "tight"):
                    raise AssertionError(f"vertex {v}: label {cause} but out-degree {self.orient.outdeg[v]}")
            labels[v] = cause
            if cause not in ("tight", "pending"):
                st.loose_by_cause[cause] += 1
        st.labels = labels


def orient_core_full(degrees, rng: RngStream, suspend: bool = True, cutoff: int | None = None,
                     check: bool = False, trace: bool = False,
                     strict: bool = True) -> tuple[MultiGraph, Orientation, RoundStats, ConfigurationState]:
    """Generate and 2-orient a random configuration on ``degrees``.

    Returns the multigraph (edge i is matched pair i), its orientation, the
    run statistics and the configuration holding the copy-level matching.
    ``check`` asserts the out-degree cap after every orientation step.  With
    ``suspend=False`` there is no phase 4 and no cutoff: the whole matching is
    produced by FR moves, vertices of degree >= 4 using the unoriented case.
    The FR II coins come from a keyed child of ``rng``, so independent runs
    need independent streams, not one stream reused.
    """
    r = _Run(degrees, rng, True, suspend, cutoff, check, trace, strict)
    st = r.run()
    g = r.cfg.to_multigraph()
    if check:
        r.orient.check(g)
    return g, r.orient, st, r.cfg


def simplified_run(degrees, rng: RngStream, cutoff: int | None = None, trace: bool = False,
                   strict: bool = True) -> RoundStats:
    """Phase 3 on copy counts alone; stops at phase 4 or the cutoff."""
    return _Run(degrees, rng, False, True, cutoff, False, trace, strict).run()


def core_orientation(g: SimpleGraph, core: CoreResult) -> Orientation:
    """Maximal 2-orientation of the induced core, keyed by edge index in ``g``."""
    sub, keep = g.subgraph(core.members.tolist())
    o_sub, _ = max_two_orientation(sub)
    index = _edge_index(g)
    out = Orientation(g.n)
    for eid, (t, h) in sorted(o_sub.arcs.items()):
        a, b = int(keep[t]), int(keep[h])
        out.orient(index[(min(a, b), max(a, b))], a, b)
    return out


def _edge_index(g: SimpleGraph) -> dict[tuple[int, int], int]:
    return {(min(u, v), max(u, v)): i for i, (u, v) in enumerate(g.edge_list())}


def orient_32_shell(core_orient: Orientation, accretion: CoreResult, g: SimpleGraph) -> Orientation:
    """Orient both attachment edges of every accreted vertex outward."""
    if core_orient.n != g.n:
        raise GraphError("orientation and graph disagree on vertex count")
    index = _edge_index(g)
    out = core_orient.copy()
    for v, (a, b) in accretion.order:
        for w in (a, b):
            e = index.get((min(v, w), max(v, w)))
            if e is None:
                raise GraphError(f"attachment edge {v}-{w} is not in the graph")
            out.orient(e, v, w)
    return out
