"""Undirected multigraph with stable edge ids, cuts, and contraction.

Design notes that the rest of the package relies on:

* Edge ids are assigned once, at construction, and survive contraction
  unchanged.  Everything downstream (weight maps, bought multiplicities,
  column indices) is keyed by edge id, so contraction never invalidates
  a weight vector.
* A vertex bipartition has two names, S and V minus S.  To make cuts
  hashable and comparable we store only the side that avoids a fixed
  root vertex (the minimum vertex id), so each bipartition has exactly
  one representation.
* Edge weights live outside the graph, as plain mappings from edge id
  to number.  Values may be ints, floats, or Fractions; all arithmetic
  here is type-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class Cut:
    """Canonical form of a vertex bipartition: the side without the root."""

    side: frozenset


class Graph:
    """Undirected multigraph; vertices are mutually sortable ids.

    Self-loops are rejected.  Parallel edges are fine and keep distinct
    ids.  Instances are treated as immutable; contraction builds a new
    graph sharing edge ids with the old one.
    """

    __slots__ = ("_vertices", "_edges", "_incident", "_root")

    def __init__(self, vertices, edges=(), _items=None):
        verts = sorted(set(vertices))
        if not verts:
            raise InputError("graph needs at least one vertex")
        vset = frozenset(verts)
        if _items is None:
            items = {}
            next_id = 0
            for u, v, cost in edges:
                if u == v:
                    raise InputError(f"self-loop at vertex {u!r}")
                if u not in vset or v not in vset:
                    raise InputError(f"edge ({u!r}, {v!r}) uses unknown vertex")
                items[next_id] = (u, v, cost)
                next_id += 1
        else:
            items = _items
        self._vertices = vset
        self._edges = items
        self._root = verts[0]
        incident = {v: [] for v in verts}
        for eid in sorted(items):
            u, v, _ = items[eid]
            incident[u].append(eid)
            incident[v].append(eid)
        self._incident = {v: tuple(eids) for v, eids in incident.items()}

    @property
    def vertices(self):
        return self._vertices

    @property
    def root(self):
        return self._root

    @property
    def vertex_count(self):
        return len(self._vertices)

    @property
    def edge_count(self):
        return len(self._edges)

    def edge_ids(self):
        """Edge ids in increasing order."""
        return sorted(self._edges)

    def endpoints(self, eid):
        u, v, _ = self._edges[eid]
        return u, v

    def cost(self, eid):
        return self._edges[eid][2]

    def incident(self, vertex):
        """Ids of edges touching `vertex`, in increasing order."""
        return self._incident[vertex]

    def total_cost(self, weights):
        return sum(weights.get(e, 0) * self._edges[e][2] for e in sorted(self._edges))

    def cut(self, side):
        """Canonicalize a vertex subset into a Cut.

        `side` must be a nonempty proper subset of the vertices; the
        stored side is whichever of side/complement misses the root.
        """
        s = frozenset(side)
        if not s or not s < self._vertices:
            raise InputError("cut side must be a nonempty proper vertex subset")
        if self._root in s:
            s = self._vertices - s
        return Cut(s)


def cut_edges(graph, cut):
    """Ids of edges with exactly one endpoint inside the cut, ascending."""
    side = cut.side
    out = []
    for eid in sorted(graph._edges):
        u, v, _ = graph._edges[eid]
        if (u in side) != (v in side):
            out.append(eid)
    return out


def cut_value(graph, weights, cut):
    """Total weight crossing the cut; missing edges count as weight 0.

    Summation runs in edge-id order so float results are reproducible.
    """
    side = cut.side
    total = 0
    for eid in sorted(graph._edges):
        u, v, _ = graph._edges[eid]
        if (u in side) != (v in side):
            total += weights.get(eid, 0)
    return total


def contract_edge(graph, eid):
    """Merge the endpoints of edge `eid`.

    Returns (new_graph, merged_vertex, vertex_map) where vertex_map sends
    every old vertex to its representative in the new graph.  The merged
    vertex keeps the id of the edge's first endpoint.  Edges joining the
    two merged endpoints disappear (they would be self-loops); all other
    edges survive with ids and costs intact.
    """
    if eid not in graph._edges:
        raise InputError(f"unknown edge id {eid}")
    keep, gone, _ = graph._edges[eid]
    if graph.vertex_count < 2:
        raise InputError("cannot contract the last vertex away")
    vmap = {v: (keep if v == gone else v) for v in graph._vertices}
    items = {}
    for e in sorted(graph._edges):
        u, v, cost = graph._edges[e]
        mu, mv = vmap[u], vmap[v]
        if mu == mv:
            continue
        items[e] = (mu, mv, cost)
    new_vertices = [v for v in graph._vertices if v != gone]
    new_graph = Graph(new_vertices, _items=items)
    return new_graph, keep, vmap
