"""Gomory-Hu cut trees and minimum-ratio cuts.

The tree is built by the classical contraction scheme: repeatedly split a
supernode by a max-flow computation in the graph with the rest of the
tree contracted.  That choice matters here.  We do not just need the
n-1 pairwise min-cut values; we need, for every tree edge, an explicit
bipartition whose cut value *equals* the tree weight, because callers
minimize ratios over exactly those stored bipartitions.  The contraction
scheme guarantees that property; flow-equivalent shortcuts (Gusfield) do
not.

Weights are supplied as a mapping from edge id to a nonnegative number
and may be ints, Fractions, or floats.  With exact number types every
result here is exact.  In float mode, weights are normalized by their
maximum before tree construction (cut structure is scale-invariant) and
reported values are re-derived from the original weights by direct
summation, so relative error stays at the level of a single cut-value
sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import DefectError, InputError
from .graph import Cut, cut_value


@dataclass
class BuildCounter:
    """Tallies of expensive primitives, threaded through by callers."""

    trees: int = 0
    flows: int = 0

    def merge(self, other):
        self.trees += other.trees
        self.flows += other.flows


class TreeEdge(NamedTuple):
    u: object
    v: object
    weight: object
    cut: Cut


class _Net:
    """Residual network over node indices 0..n-1 with paired arcs.

    An undirected capacity c between a and b becomes arcs 2k (a->b) and
    2k+1 (b->a), both starting at c; pushing f on arc i subtracts from
    cap[i] and credits cap[i^1].  Capacities keep whatever number type
    they were given.
    """

    __slots__ = ("n", "to", "cap", "adj")

    def __init__(self, n):
        self.n = n
        self.to = []
        self.cap = []
        self.adj = [[] for _ in range(n)]

    def add(self, a, b, c):
        self.adj[a].append(len(self.to))
        self.to.append(b)
        self.cap.append(c)
        self.adj[b].append(len(self.to))
        self.to.append(a)
        self.cap.append(c)


def _bfs_levels(net, s, t):
    level = [-1] * net.n
    level[s] = 0
    queue = [s]
    head = 0
    to, cap, adj = net.to, net.cap, net.adj
    while head < len(queue):
        v = queue[head]
        head += 1
        lv = level[v] + 1
        for a in adj[v]:
            w = to[a]
            if level[w] < 0 and cap[a] > 0:
                level[w] = lv
                queue.append(w)
    return level if level[t] >= 0 else None


def _augment(net, s, t, level, it):
    # One augmenting path in the level graph; returns its bottleneck.
    to, cap, adj = net.to, net.cap, net.adj
    path = []
    v = s
    while True:
        if v == t:
            b = cap[path[0]]
            for a in path[1:]:
                if cap[a] < b:
                    b = cap[a]
            for a in path:
                if cap[a] == b:
                    cap[a] = cap[a] - cap[a]  # exact zero in every number type
                else:
                    cap[a] = cap[a] - b
                cap[a ^ 1] = cap[a ^ 1] + b
            return b
        advanced = False
        while it[v] < len(adj[v]):
            a = adj[v][it[v]]
            w = to[a]
            if cap[a] > 0 and level[w] == level[v] + 1:
                path.append(a)
                v = w
                advanced = True
                break
            it[v] += 1
        if not advanced:
            if v == s:
                return None
            level[v] = -1  # dead end; prune from this phase
            a = path.pop()
            v = to[a ^ 1]
            it[v] += 1


def _max_flow(net, s, t):
    """Dinic blocking-flow loop; returns total pushed flow."""
    total = 0
    while True:
        level = _bfs_levels(net, s, t)
        if level is None:
            return total
        it = [0] * net.n
        while True:
            pushed = _augment(net, s, t, level, it)
            if pushed is None:
                break
            total = total + pushed


def _source_side(net, s):
    seen = [False] * net.n
    seen[s] = True
    queue = [s]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for a in net.adj[v]:
            w = net.to[a]
            if not seen[w] and net.cap[a] > 0:
                seen[w] = True
                queue.append(w)
    return seen


def _check_weights(graph, weights):
    for e in graph.edge_ids():
        if weights.get(e, 0) < 0:
            raise InputError(f"negative weight on edge {e}")


def min_cut(graph, weights, s, t, counter=None):
    """Minimum s-t cut: (value, Cut); the cut attains the value.

    Parallel edges are aggregated per vertex pair before the flow
    computation.  The value is re-derived by summing the original
    weights across the returned bipartition.
    """
    if s == t or s not in graph.vertices or t not in graph.vertices:
        raise InputError("min_cut endpoints must be two distinct vertices")
    _check_weights(graph, weights)
    verts = sorted(graph.vertices)
    index = {v: i for i, v in enumerate(verts)}
    caps = {}
    for e in graph.edge_ids():
        u, v = graph.endpoints(e)
        a, b = index[u], index[v]
        key = (a, b) if a < b else (b, a)
        caps[key] = caps.get(key, 0) + weights.get(e, 0)
    net = _Net(len(verts))
    for (a, b), c in sorted(caps.items()):
        net.add(a, b, c)
    _max_flow(net, index[s], index[t])
    if counter is not None:
        counter.flows += 1
    seen = _source_side(net, index[s])
    side = {v for v in verts if seen[index[v]]}
    cut = graph.cut(side)
    return cut_value(graph, weights, cut), cut


class GomoryHuTree:
    """Cut tree over the graph's vertices.

    edges[i] is the i-th TreeEdge created; its stored bipartition has
    cut value exactly edges[i].weight, and that value is the minimum cut
    separating edges[i].u from edges[i].v.
    """

    def __init__(self, graph, edges):
        self.graph = graph
        self.edges = edges
        self._adj = {v: [] for v in graph.vertices}
        for i, te in enumerate(edges):
            self._adj[te.u].append((te.v, i))
            self._adj[te.v].append((te.u, i))

    def path_edge_indices(self, u, v):
        """Indices of tree edges on the unique u-v tree path."""
        if u == v:
            raise InputError("path endpoints must differ")
        prev = {u: None}
        queue = [u]
        head = 0
        while head < len(queue) and v not in prev:
            w = queue[head]
            head += 1
            for nb, i in self._adj[w]:
                if nb not in prev:
                    prev[nb] = (w, i)
                    queue.append(nb)
        if v not in prev:
            raise DefectError("ghtree-connected", "tree does not span the graph")
        out = []
        cur = v
        while prev[cur] is not None:
            w, i = prev[cur]
            out.append(i)
            cur = w
        return out

    def min_cut_value(self, u, v):
        """Pairwise minimum cut value: the smallest weight on the tree path."""
        return min(self.edges[i].weight for i in self.path_edge_indices(u, v))


def gomory_hu(graph, weights, counter=None):
    """Build the cut tree with n-1 max-flow computations."""
    _check_weights(graph, weights)
    if counter is not None:
        counter.trees += 1
    verts = sorted(graph.vertices)
    if len(verts) == 1:
        return GomoryHuTree(graph, [])

    scaled = weights
    if any(isinstance(weights.get(e, 0), float) for e in graph.edge_ids()):
        top = max((weights.get(e, 0) for e in graph.edge_ids()), default=0.0)
        if top > 0:
            scaled = {e: weights.get(e, 0) / top for e in graph.edge_ids()}

    members = [list(verts)]
    adj = {0: set()}

    def tree_components(skip):
        comps = []
        seen = {skip}
        for start in sorted(adj):
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            head = 0
            while head < len(comp):
                for nb in adj[comp[head]]:
                    if nb not in seen:
                        seen.add(nb)
                        comp.append(nb)
                head += 1
            comps.append(sorted(comp))
        return comps

    while True:
        split = next((i for i in sorted(adj) if len(members[i]) >= 2), None)
        if split is None:
            break
        s, t = members[split][0], members[split][1]
        comps = tree_components(split)
        # Node indexing: the split supernode's own vertices first, then
        # one merged node per remaining tree component.
        index = {}
        for v in members[split]:
            index[v] = len(index)
        comp_node = []
        node_of_tree = {}
        for comp in comps:
            node = len(index) + len(comp_node)
            comp_node.append(node)
            for j in comp:
                node_of_tree[j] = node
        vmap = dict(index)
        for j, node in node_of_tree.items():
            for v in members[j]:
                vmap[v] = node
        caps = {}
        for e in graph.edge_ids():
            u, v = graph.endpoints(e)
            a, b = vmap[u], vmap[v]
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            caps[key] = caps.get(key, 0) + scaled.get(e, 0)
        net = _Net(len(members[split]) + len(comp_node))
        for (a, b), c in sorted(caps.items()):
            net.add(a, b, c)
        _max_flow(net, index[s], index[t])
        if counter is not None:
            counter.flows += 1
        seen = _source_side(net, index[s])

        keep = sorted(v for v in members[split] if seen[index[v]])
        move = sorted(v for v in members[split] if not seen[index[v]])
        if not keep or not move:
            raise DefectError("ghtree-split", "max-flow failed to separate s from t")
        fresh = len(members)
        members[split] = keep
        members.append(move)
        adj[fresh] = set()
        for nb in sorted(adj[split]):
            if not seen[node_of_tree[nb]]:
                adj[split].discard(nb)
                adj[nb].discard(split)
                adj[fresh].add(nb)
                adj[nb].add(fresh)
        adj[split].add(fresh)
        adj[fresh].add(split)

    # Later splits can reattach a neighbor away from the node it was
    # first joined to, so the edge list must come from the final
    # adjacency, not from creation history.
    vertex_of = {i: members[i][0] for i in adj}
    edges = []
    for i, j in ((a, b) for a in sorted(adj) for b in sorted(adj[a]) if a < b):
        # Bipartition induced by deleting this tree edge: collect i's side.
        side_nodes = {i}
        queue = [i]
        head = 0
        while head < len(queue):
            cur = queue[head]
            head += 1
            for nb in adj[cur]:
                if nb not in side_nodes and not (cur == i and nb == j):
                    side_nodes.add(nb)
                    queue.append(nb)
        side = {vertex_of[k] for k in side_nodes}
        cut = graph.cut(side)
        weight = cut_value(graph, weights, cut)
        edges.append(TreeEdge(vertex_of[i], vertex_of[j], weight, cut))
    return GomoryHuTree(graph, edges)


def _ratio_less(num_a, den_a, num_b, den_b):
    # num/den comparison by cross-multiplication; denominators positive.
    return num_a * den_b < num_b * den_a


def min_ratio_cut(graph, weights, demand, counter=None):
    """Minimize cut weight divided by demand over all bipartitions.

    `demand` is a symmetric set function given by an object with a
    ``value(side)`` method returning a nonnegative int; only cuts with
    positive demand compete.  One tree build suffices: for such a
    function the minimum of weight(S)/demand(S) over all bipartitions is
    attained on a stored tree bipartition.  Returns (cut, ratio), or
    None when demand is zero on every bipartition.  Ties break toward
    the earliest tree edge.
    """
    tree = gomory_hu(graph, weights, counter=counter)
    best = None
    for te in tree.edges:
        d = demand.value(te.cut.side)
        if d < 1:
            continue
        if best is None or _ratio_less(te.weight, d, best[0], best[1]):
            best = (te.weight, d, te.cut)
    if best is None:
        return None
    num, den, cut = best
    if isinstance(num, float):
        return cut, num / den
    return cut, Fraction(num) / den
