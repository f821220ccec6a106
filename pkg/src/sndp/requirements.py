"""Connectivity requirements as set functions on vertex bipartitions.

A demand function assigns every cut side a nonnegative integer; a
multiplicity vector is feasible when each bipartition carries at least
its demand in crossing edges.  Modules here and elsewhere only rely on
two attributes, so any object with ``value(side) -> int`` and
``max_value -> int`` can serve as a demand.  The concrete family used
by the solver is pairwise: demand of a side is the largest requirement
among vertex pairs it separates.  Pairwise demands are proper
(symmetric, zero on the whole vertex set, and never exceeding the max
of two disjoint parts on their union), which is what licenses the
cut-tree reasoning in :mod:`.gomory_hu`.
"""

from __future__ import annotations

from .errors import InputError
from .gomory_hu import min_ratio_cut


class PairwiseRequirements:
    """Demand given by per-pair connectivity requirements.

    Built from (u, v, r) triples; zero entries are dropped, duplicates
    keep the largest r.  value(side) scans the stored pairs, so keep
    the pair list sparse rather than materializing all-pairs zeros.
    """

    def __init__(self, triples):
        self._req = {}
        for u, v, r in triples:
            if not isinstance(r, int) or isinstance(r, bool):
                raise InputError(f"requirement for ({u!r}, {v!r}) must be an int")
            if r < 0:
                raise InputError(f"requirement for ({u!r}, {v!r}) is negative")
            if u == v:
                if r > 0:
                    raise InputError(f"positive requirement on a single vertex {u!r}")
                continue
            if r == 0:
                continue
            key = (u, v) if _key_less(u, v) else (v, u)
            if r > self._req.get(key, 0):
                self._req[key] = r

    def pairs(self):
        """Sorted (u, v, r) triples with positive r."""
        return [(u, v, r) for (u, v), r in sorted(self._req.items())]

    def get(self, u, v):
        if u == v:
            return 0
        key = (u, v) if _key_less(u, v) else (v, u)
        return self._req.get(key, 0)

    @property
    def max_value(self):
        return max(self._req.values(), default=0)

    def value(self, side):
        best = 0
        for (u, v), r in self._req.items():
            if r > best and (u in side) != (v in side):
                best = r
        return best

    def remap(self, vmap):
        """Requirements after merging vertices per vmap.

        Pairs whose endpoints collapse onto one vertex disappear: their
        demand is met by the merge itself, not by edges.
        """
        return PairwiseRequirements(
            (vmap[u], vmap[v], r) for (u, v), r in self._req.items() if vmap[u] != vmap[v]
        )

    def __bool__(self):
        return bool(self._req)


def _key_less(u, v):
    try:
        return u < v
    except TypeError:
        raise InputError(f"vertex labels {u!r} and {v!r} are not comparable") from None


def find_violated_set(graph, demand, multiplicity, counter=None):
    """A bipartition whose demand exceeds its crossing multiplicity.

    multiplicity maps edge id to a nonnegative int.  Returns the Cut
    minimizing crossing/demand when that minimum is below one, else
    None.  All comparisons are exact integer arithmetic.
    """
    for e in graph.edge_ids():
        m = multiplicity.get(e, 0)
        if not isinstance(m, int) or isinstance(m, bool) or m < 0:
            raise InputError(f"multiplicity of edge {e} must be a nonnegative int")
    found = min_ratio_cut(graph, multiplicity, demand, counter=counter)
    if found is None:
        return None
    cut, ratio = found
    return cut if ratio < 1 else None


def check_proper(demand, vertices, limit=16):
    """Exhaustively test properness on a small vertex set.

    Returns a list of violation descriptions, empty when the function
    is proper.  Cost is exponential in the vertex count, hence the hard
    cap.
    """
    verts = sorted(vertices)
    n = len(verts)
    if n > limit:
        raise InputError(f"properness check limited to {limit} vertices, got {n}")
    vals = {}
    for mask in range(1 << n):
        side = frozenset(verts[i] for i in range(n) if mask >> i & 1)
        v = demand.value(side)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            return [f"value on {sorted(side)!r} is {v!r}, not a nonnegative int"]
        vals[mask] = v
    out = []
    full = (1 << n) - 1
    if vals[full] != 0:
        out.append(f"value on the full vertex set is {vals[full]}, want 0")
    for mask in range(1 << n):
        if vals[mask] != vals[full ^ mask]:
            out.append(
                f"asymmetric: side mask {mask:#x} gives {vals[mask]}, "
                f"complement gives {vals[full ^ mask]}"
            )
            break
    for a in range(1, 1 << n):
        stop = False
        rest = full ^ a
        b = rest
        # Enumerate nonempty submasks of the complement.
        while b:
            if vals[a | b] > max(vals[a], vals[b]):
                out.append(
                    f"not maximal: masks {a:#x} and {b:#x} give "
                    f"{vals[a]}, {vals[b]} but their union gives {vals[a | b]}"
                )
                stop = True
                break
            b = (b - 1) & rest
        if stop:
            break
    return out
