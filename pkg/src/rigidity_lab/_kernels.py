"""Compiled kernels for the (k, l)-pebble game.

State is a handful of flat int64 arrays so the same code runs under numba
and, for debugging, as plain Python (set ``NUMBA_DISABLE_JIT=1``).

Layout
    pebbles[v]          free pebbles on v
    out_e[v, :out_c[v]] ids of edges whose tail is v
    tail[e], head[e]    current direction of accepted edge e (-1 if not accepted)
    eu[e], ev[e]        endpoints as inserted
Scratch
    seen[v]             visit stamp, compared against stamp[0]
    par[v]              edge used to reach v in the current search
    stk_v, stk_i        DFS stack of vertices and next out-edge slot
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _kth_out(x, i, out_e, out_c, head):
    # i-th out-edge of x in ascending head order (k is small, so selection is cheap)
    c = out_c[x]
    best = -1
    for _ in range(i + 1):
        prev = best
        best = -1
        for j in range(c):
            e = out_e[x, j]
            h = head[e]
            if prev >= 0:
                ph = head[prev]
                if h < ph or (h == ph and e <= prev):
                    continue
            if best < 0 or h < head[best] or (h == head[best] and e < best):
                best = e
    return best


@njit(cache=True)
def _reverse_path(root, found, pebbles, out_e, out_c, tail, head, par):
    w = found
    while w != root:
        e = par[w]
        x = tail[e]
        # drop e from x's out list
        c = out_c[x]
        for j in range(c):
            if out_e[x, j] == e:
                out_e[x, j] = out_e[x, c - 1]
                break
        out_c[x] = c - 1
        out_e[w, out_c[w]] = e
        out_c[w] += 1
        tail[e] = w
        head[e] = x
        w = x
    pebbles[found] -= 1
    pebbles[root] += 1


@njit(cache=True)
def find_pebble(root, block, pebbles, out_e, out_c, tail, head,
                seen, stamp, par, stk_v, stk_i, dead):
    """Depth-first search from ``root`` for a free pebble not on ``block``.

    On success the pebble is moved to ``root`` by reversing the search path.
    Vertices flagged in ``dead`` are known to reach no pebble and are skipped.
    """
    stamp[0] += 1
    cur = stamp[0]
    seen[root] = cur
    if block >= 0:
        seen[block] = cur
    top = 0
    stk_v[0] = root
    stk_i[0] = 0
    while top >= 0:
        x = stk_v[top]
        i = stk_i[top]
        if i < out_c[x]:
            stk_i[top] = i + 1
            e = _kth_out(x, i, out_e, out_c, head)
            y = head[e]
            if seen[y] != cur and not dead[y]:
                seen[y] = cur
                par[y] = e
                if pebbles[y] > 0:
                    _reverse_path(root, y, pebbles, out_e, out_c, tail, head, par)
                    return True
                top += 1
                stk_v[top] = y
                stk_i[top] = 0
        else:
            top -= 1
    return False


@njit(cache=True)
def _mark_dead(u, v, out_e, out_c, head, dead, stk_v):
    # everything reachable from a rejected edge in an l = 0 game is tight for good
    top = -1
    for s in (u, v):
        if not dead[s]:
            dead[s] = True
            top += 1
            stk_v[top] = s
    while top >= 0:
        x = stk_v[top]
        top -= 1
        for j in range(out_c[x]):
            y = head[out_e[x, j]]
            if not dead[y]:
                dead[y] = True
                top += 1
                stk_v[top] = y


@njit(cache=True)
def insert_edge(e, u, v, k, ell, pebbles, out_e, out_c, tail, head,
                seen, stamp, par, stk_v, stk_i, dead):
    """Try to accept edge ``e = uv``; orient it and return True on success.

    ``dead`` is maintained only when ``ell == 0``, where unions of tight sets
    stay tight; pass an all-False array otherwise.
    """
    ok = _insert(e, u, v, k, ell, pebbles, out_e, out_c, tail, head,
                 seen, stamp, par, stk_v, stk_i, dead)
    if not ok and ell == 0:
        _mark_dead(u, v, out_e, out_c, head, dead, stk_v)
    return ok


@njit(cache=True)
def _insert(e, u, v, k, ell, pebbles, out_e, out_c, tail, head,
            seen, stamp, par, stk_v, stk_i, dead):
    if dead[u] and dead[v]:
        return False
    need = ell + 1
    if u == v:
        if need > k:
            return False
        while pebbles[u] < need:
            if not find_pebble(u, -1, pebbles, out_e, out_c, tail, head,
                               seen, stamp, par, stk_v, stk_i, dead):
                return False
    else:
        u_open = True
        v_open = True
        while pebbles[u] + pebbles[v] < need:
            if u_open and pebbles[u] < k:
                if find_pebble(u, v, pebbles, out_e, out_c, tail, head,
                               seen, stamp, par, stk_v, stk_i, dead):
                    continue
                u_open = False
            if v_open and pebbles[v] < k:
                if find_pebble(v, u, pebbles, out_e, out_c, tail, head,
                               seen, stamp, par, stk_v, stk_i, dead):
                    continue
                v_open = False
            if (not u_open or pebbles[u] >= k) and (not v_open or pebbles[v] >= k):
                return False
    t = u
    h = v
    if pebbles[u] == 0:
        t = v
        h = u
    pebbles[t] -= 1
    out_e[t, out_c[t]] = e
    out_c[t] += 1
    tail[e] = t
    head[e] = h
    return True


@njit(cache=True)
def run_game(base, eu, ev, k, ell, pebbles, out_e, out_c, tail, head,
             seen, stamp, par, stk_v, stk_i, dead, accepted, stop_at_reject):
    """Insert ``eu[i], ev[i]`` as edge ``base + i`` in order.

    Returns the batch index of the first rejection, or -1.
    """
    first = -1
    free = 0
    for v in range(pebbles.shape[0]):
        free += pebbles[v]
    for i in range(eu.shape[0]):
        # every acceptance spends one pebble; with none left, nothing can be accepted
        ok = free > ell and insert_edge(base + i, eu[i], ev[i], k, ell, pebbles, out_e,
                                        out_c, tail, head, seen, stamp, par, stk_v, stk_i,
                                        dead)
        if ok:
            free -= 1
        accepted[i] = ok
        if not ok and first < 0:
            first = i
            if stop_at_reject:
                return first
    return first


@njit(cache=True)
def reach(sources, out_e, out_c, head, seen, stamp, stk_v):
    """Vertices reachable from ``sources`` along oriented edges."""
    stamp[0] += 1
    cur = stamp[0]
    top = -1
    for s in sources:
        if seen[s] != cur:
            seen[s] = cur
            top += 1
            stk_v[top] = s
    count = 0
    out = np.empty(seen.shape[0], np.int64)
    while top >= 0:
        x = stk_v[top]
        top -= 1
        out[count] = x
        count += 1
        for j in range(out_c[x]):
            y = head[out_e[x, j]]
            if seen[y] != cur:
                seen[y] = cur
                top += 1
                stk_v[top] = y
    return out[:count]


@njit(cache=True)
def _free_search(w, comp, in_comp, floppy, pebbles, out_e, out_c, head,
                 seen, stamp, par_v, stk_v, stk_i, visited):
    """Search from w for a free pebble, treating component vertices as dead ends.

    Returns ``(found, nvisited)``.  On success the path back to ``w`` is
    marked floppy; on failure ``visited[:nvisited]`` is the closed region.
    """
    stamp[0] += 1
    cur = stamp[0]
    seen[w] = cur
    par_v[w] = -1
    nvis = 0
    visited[nvis] = w
    nvis += 1
    if pebbles[w] > 0:
        floppy[w] = comp
        return True, nvis
    top = 0
    stk_v[0] = w
    stk_i[0] = 0
    while top >= 0:
        x = stk_v[top]
        i = stk_i[top]
        if i < out_c[x]:
            stk_i[top] = i + 1
            y = head[out_e[x, i]]
            if seen[y] == cur or in_comp[y] == comp:
                continue
            seen[y] = cur
            par_v[y] = x
            if pebbles[y] > 0 or floppy[y] == comp:
                z = y
                while z >= 0:
                    floppy[z] = comp
                    z = par_v[z]
                return True, nvis
            visited[nvis] = y
            nvis += 1
            top += 1
            stk_v[top] = y
            stk_i[top] = 0
        else:
            top -= 1
    return False, nvis


@njit(cache=True)
def component_labels(eu, ev, accepted, k, ell, pebbles, out_e, out_c, tail, head,
                     indptr, nbr, nbr_e, seen, stamp, par, stk_v, stk_i):
    """Label every edge with its rigid component, from a finished game state.

    For each accepted edge not yet labelled, ``ell`` pebbles are pinned on its
    endpoints; the component is then every vertex that cannot reach a free
    pebble, grown outward from the endpoints over accepted edges.  All edges
    (accepted or not) spanned by the vertex set receive the label.
    """
    n = pebbles.shape[0]
    m = eu.shape[0]
    label = np.full(m, -1, np.int64)
    in_comp = np.full(n, -1, np.int64)
    floppy = np.full(n, -1, np.int64)
    par_v = np.empty(n, np.int64)
    visited = np.empty(n, np.int64)
    members = np.empty(n, np.int64)
    nodead = np.zeros(n, np.bool_)
    comp = 0
    for e in range(m):
        if not accepted[e] or label[e] >= 0:
            continue
        u = eu[e]
        v = ev[e]
        # pin ell pebbles on {u, v}
        u_open = True
        v_open = True
        while pebbles[u] + pebbles[v] < ell:
            if u_open and pebbles[u] < k:
                if find_pebble(u, v, pebbles, out_e, out_c, tail, head,
                               seen, stamp, par, stk_v, stk_i, nodead):
                    continue
                u_open = False
            if v_open and pebbles[v] < k:
                if find_pebble(v, u, pebbles, out_e, out_c, tail, head,
                               seen, stamp, par, stk_v, stk_i, nodead):
                    continue
                v_open = False
            if (not u_open or pebbles[u] >= k) and (not v_open or pebbles[v] >= k):
                break
        in_comp[u] = comp
        in_comp[v] = comp
        members[0] = u
        members[1] = v
        size = 2
        # pinned pebbles must not count as free during the growth
        pu = pebbles[u]
        pv = pebbles[v]
        pebbles[u] = 0
        pebbles[v] = 0
        idx = 0
        while idx < size:
            x = members[idx]
            idx += 1
            for p in range(indptr[x], indptr[x + 1]):
                f = nbr_e[p]
                if not accepted[f]:
                    continue
                w = nbr[p]
                if in_comp[w] == comp or floppy[w] == comp:
                    continue
                found, nvis = _free_search(w, comp, in_comp, floppy, pebbles, out_e,
                                           out_c, head, seen, stamp, par_v,
                                           stk_v, stk_i, visited)
                if not found:
                    for j in range(nvis):
                        y = visited[j]
                        in_comp[y] = comp
                        members[size] = y
                        size += 1
        pebbles[u] = pu
        pebbles[v] = pv
        for j in range(size):
            x = members[j]
            for p in range(indptr[x], indptr[x + 1]):
                if in_comp[nbr[p]] == comp and label[nbr_e[p]] < 0:
                    label[nbr_e[p]] = comp
        comp += 1
    return label
