"""Henneberg I and II moves on oriented multigraphs.

Both moves add one vertex of out-degree 2 and leave every existing
out-degree unchanged, so they preserve 2-orientations.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graph import GraphError, MultiGraph, Orientation


@dataclass(frozen=True)
class HennebergI:
    """New vertex v with edges v->i and v->j (i == j gives a double edge)."""
    i: int
    j: int


@dataclass(frozen=True)
class HennebergII:
    """Split oriented edge ``eid`` (i->j) through a new vertex v and add v->k."""
    eid: int
    k: int


def henneberg_apply(g: MultiGraph, orient: Orientation, move: HennebergI | HennebergII,
                    inplace: bool = False) -> tuple[MultiGraph, Orientation]:
    if not inplace:
        g, orient = g.copy(), orient.copy()
    if orient.n != g.n:
        raise GraphError("orientation and graph disagree on vertex count")
    if isinstance(move, HennebergI):
        for x in (move.i, move.j):
            if not 0 <= x < g.n:
                raise IndexError(f"vertex {x} not in graph")
        v = g.add_vertex()
        orient.add_vertex()
        orient.orient(g.add_edge(v, move.i), v, move.i)
        orient.orient(g.add_edge(v, move.j), v, move.j)
    elif isinstance(move, HennebergII):
        if not 0 <= move.k < g.n:
            raise IndexError(f"vertex {move.k} not in graph")
        arc = orient.direction(move.eid)
        if arc is None:
            raise GraphError(f"edge {move.eid} is not oriented; Henneberg II needs i->j")
        i, j = arc
        orient.unorient(move.eid)
        g.remove_edge(move.eid)
        v = g.add_vertex()
        orient.add_vertex()
        orient.orient(g.add_edge(i, v), i, v)
        orient.orient(g.add_edge(v, j), v, j)
        orient.orient(g.add_edge(v, move.k), v, move.k)
    else:
        raise TypeError(f"unknown move {move!r}")
    return g, orient
