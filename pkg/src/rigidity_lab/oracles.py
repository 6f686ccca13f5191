"""Brute-force reference answers for small instances.

These share no code with the pebble game so they can be used to check it.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .graph import MultiGraph, SimpleGraph

MAX_BRUTE_N = 12
# enumerate all (2n-3)-edge subsets only while there are at most this many
MAX_SUBSETS = 20000


@dataclass(frozen=True)
class LamanVerdict:
    sparse: bool
    spanning: bool


def _incidence(n: int, ends: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``inside[s, e]``: both ends of e lie in vertex subset s; plus subset sizes."""
    masks = np.arange(1 << n, dtype=np.int64)
    if len(ends):
        inside = (((masks[:, None] >> ends[:, 0]) & 1) & ((masks[:, None] >> ends[:, 1]) & 1)).astype(bool)
    else:
        inside = np.zeros((1 << n, 0), bool)
    sizes = np.zeros(1 << n, np.int64)
    for v in range(n):
        sizes += (masks >> v) & 1
    return inside, sizes


def _sparse_rows(selected: np.ndarray, inside: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    """For each row of the 0/1 edge-selection matrix, whether it is Laman-sparse."""
    counts = selected.astype(np.int64) @ inside.T.astype(np.int64)
    big = sizes >= 2
    return np.all(counts[:, big] <= 2 * sizes[big] - 3, axis=1)


def brute_force_laman(g: SimpleGraph) -> LamanVerdict:
    """Decide Laman-sparsity and Laman-spanning by subset enumeration."""
    n, m = g.n, g.m
    if n > MAX_BRUTE_N:
        raise ValueError(f"brute force is limited to n <= {MAX_BRUTE_N}, got {n}")
    ends = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    inside, sizes = _incidence(n, ends)
    sparse = bool(_sparse_rows(np.ones((1, m), bool), inside, sizes)[0])
    r = 2 * n - 3
    if n <= 1:
        return LamanVerdict(sparse, True)
    if m < r:
        return LamanVerdict(sparse, False)
    if sparse:
        return LamanVerdict(True, m == r)
    if comb(m, r) <= MAX_SUBSETS:
        sel = np.zeros((comb(m, r), m), bool)
        for row, sub in enumerate(combinations(range(m), r)):
            sel[row, list(sub)] = True
        return LamanVerdict(False, bool(_sparse_rows(sel, inside, sizes).any()))
    # too many subsets: greedy matroid basis, each step checked by enumeration
    keep = np.zeros((1, m), bool)
    rank = 0
    for e in range(m):
        keep[0, e] = True
        if _sparse_rows(keep, inside, sizes)[0]:
            rank += 1
        else:
            keep[0, e] = False
    return LamanVerdict(False, rank == r)


def brute_force_two_orientable(g: MultiGraph | SimpleGraph) -> bool:
    """Can every edge be assigned to an endpoint with no vertex taking more than two?

    Solved as a bipartite matching between edges and two slots per vertex.
    """
    if isinstance(g, SimpleGraph):
        ends = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    else:
        ends = g.edge_array()[1]
    m = len(ends)
    if m > 10 ** 4:
        raise ValueError("brute-force orientability is limited to 10^4 edges")
    if m == 0:
        return True
    if m > 2 * g.n:
        return False
    rows = np.repeat(np.arange(m), 4)
    cols = np.stack([2 * ends[:, 0], 2 * ends[:, 0] + 1, 2 * ends[:, 1], 2 * ends[:, 1] + 1], axis=1).ravel()
    a = csr_matrix((np.ones(4 * m, np.int8), (rows, cols)), shape=(m, 2 * g.n))
    a.sum_duplicates()  # loops list the same slots twice
    match = maximum_bipartite_matching(a, perm_type="column")
    return bool(np.all(match >= 0))
