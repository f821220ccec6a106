"""Cut-row oracles for residual covering LPs.

After some edges are frozen at integer multiplicities, the remaining
fractional problem is a covering LP over the free edges: every
bipartition whose demand exceeds its frozen crossing multiplicity is a
row, asking the free crossing weight to make up the deficit.  A frozen
edge may also carry a half floor (weight at least 1/2), which appears
as one extra explicit row.

The row family is exponential, so ResidualInstance implements the
oracle protocol of :mod:`.covering` instead of listing rows.  Finding
the (approximately) shortest row is the crux:

* With nothing frozen, or with every frozen edge carrying at least the
  maximum demand, the shortest row is a single minimum-ratio-cut query,
  exact up to float comparison dust.

* Otherwise the shortest length is bracketed by a contract-and-trace
  sweep and then narrowed by geometric bisection on threshold queries
  ("is any row shorter than gamma?"), each one cut-tree build.  The
  bracket's lower end is only valid when every deficit is at most half
  the edge count; instances produced by rounding fractional solutions
  with entries below 1/2 satisfy that automatically, and the one
  threshold query spent re-checking the lower end turns a violated
  precondition into a raised defect rather than a silently weaker
  approximation.

Row lengths only grow while the weight-update loop runs, so a certified
"no row shorter than L" survives across oracle calls; the cached row is
re-measured each call and honored while it stays within (1 + tolerance)
of L.  Refreshes then restart the bisection from [L, current length],
which is why the per-call cost stays near one tree build instead of a
full bracket.  The tolerance is the approximation factor the oracle
advertises to the covering loop; widening it trades a looser certified
ratio for fewer tree builds, and it is deliberately independent of the
loop's own step size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .covering import OracleRow
from .errors import DefectError, InputError
from .gomory_hu import BuildCounter, min_ratio_cut
from .graph import contract_edge, cut_edges
from .requirements import find_violated_set


@dataclass(frozen=True)
class CutRow:
    """Row identity: the canonical deficient side."""

    side: frozenset


@dataclass(frozen=True)
class EdgeFloorRow:
    """Row identity for a half floor pinned on one edge."""

    edge: int


class Certificate(NamedTuple):
    """Exact feasibility record from a rational certification pass."""

    x: dict
    cost: Fraction
    scale: Fraction


_FUZZ = 1e-12


class ResidualInstance:
    """Oracle for one residual LP; carries per-run cache state.

    frozen maps every fixed edge to its integer multiplicity (zeros
    allowed: a frozen edge at zero is simply unavailable).  The free
    columns are the remaining edges in ascending id order.  pinned
    names one free edge to receive the extra half-floor row.
    """

    def __init__(self, graph, demand, frozen, pinned=None, tolerance=0.05,
                 counter=None, rational=False):
        self.graph = graph
        self.demand = demand
        self.frozen = dict(frozen)
        self.pinned = pinned
        if not 0 < tolerance < 4:
            raise InputError(f"oracle tolerance {tolerance} outside (0, 4)")
        self.tolerance = tolerance
        self.approx_factor = float(tolerance)
        self.rational = rational
        self.counter = counter if counter is not None else BuildCounter()
        for e, z in self.frozen.items():
            if e not in graph._edges:
                raise InputError(f"frozen edge {e} is not in the graph")
            if not isinstance(z, int) or isinstance(z, bool) or z < 0:
                raise InputError(f"frozen multiplicity of edge {e} must be an int >= 0")
        self.columns = [e for e in graph.edge_ids() if e not in self.frozen]
        if not self.columns:
            raise InputError("every edge is frozen; nothing left to optimize")
        self.n_columns = len(self.columns)
        self._col_of = {e: j for j, e in enumerate(self.columns)}
        self.costs = []
        for e in self.columns:
            c = graph.cost(e)
            if not c > 0:
                raise InputError(
                    f"free edge {e} has cost {c}; zero-cost edges must be frozen first"
                )
            self.costs.append(float(c))
        if pinned is not None and pinned not in self._col_of:
            raise InputError(f"pinned edge {pinned!r} is not a free edge")
        dmax = demand.max_value
        # Exact-query regime: a frozen edge either has no capacity at
        # all or already covers any demand by itself, so no deficient
        # bipartition crosses a capacity-bearing frozen edge.
        self._exact_ok = all(z == 0 or z >= dmax for z in self.frozen.values())
        self._family_empty = False
        self._family_known = False
        self._cached = None  # (key, cols, gains)
        self._lb = None
        self.last_certificate = None
        self.stats = {
            "oracle_calls": 0,
            "cache_hits": 0,
            "refreshes": 0,
            "cold_brackets": 0,
            "threshold_queries": 0,
            "certify_rounds": 0,
        }

    # ------------------------------------------------------------------
    # Oracle protocol

    def shortest_row(self, m):
        self.stats["oracle_calls"] += 1
        xw = {e: m[j] for j, e in enumerate(self.columns)}
        cut_row = self._cut_candidate(xw)
        pin_row = None
        if self.pinned is not None:
            j = self._col_of[self.pinned]
            pin_row = OracleRow(EdgeFloorRow(self.pinned), (j,), (2.0,), 2.0 * m[j])
        if cut_row is None:
            return pin_row
        if pin_row is not None and pin_row.length <= cut_row.length:
            return pin_row
        return cut_row

    def on_rescale(self, divisor):
        if self._lb is not None:
            self._lb /= divisor

    def certified_scale(self, m):
        """Smallest convenient alpha with alpha*m feasible.

        Starts at the reciprocal of the cached row's current length
        (never above the true minimal scale) and raises alpha cut by
        cut until a minimum-ratio probe finds nothing deficient.  In
        rational mode the pass is redone in exact arithmetic and the
        certified vector is stored on last_certificate.
        """
        xw = {e: m[j] for j, e in enumerate(self.columns)}
        if self.rational:
            fxw = {e: Fraction(v) for e, v in xw.items()}
            falpha = self._certify(fxw, exact=True)
            x = {e: falpha * v for e, v in fxw.items()}
            cost = sum(Fraction(self.graph.cost(e)) * v for e, v in sorted(x.items()))
            self.last_certificate = Certificate(x, cost, falpha)
            return float(falpha)
        return self._certify(xw, exact=False)

    # ------------------------------------------------------------------
    # Cut-row search

    def _cut_candidate(self, xw):
        if self._family_empty:
            return None
        if self._cached is not None:
            key, cols, gains = self._cached
            length = sum(xw[self.columns[c]] * g for c, g in zip(cols, gains))
            if length <= (1 + self.tolerance) * self._lb * (1 + _FUZZ):
                self.stats["cache_hits"] += 1
                return OracleRow(key, cols, gains, length)
            if self._exact_ok:
                return self._exact_refresh(xw)
            self.stats["refreshes"] += 1
            return self._bisect(xw, self._lb, length, OracleRow(key, cols, gains, length))
        return self._cold_start(xw)

    def _cold_start(self, xw):
        if self._exact_ok:
            return self._exact_refresh(xw)
        self.stats["cold_brackets"] += 1
        got = self.bracket(xw)
        self._family_known = True
        if got is None:
            self._family_empty = True
            return None
        lo, _, witness = got
        if witness.length <= lo:
            lo = witness.length
        else:
            # The trace lower bound leans on the deficit warranty;
            # spend one query certifying it unconditionally.
            found = self._threshold(xw, lo)
            if found is not None:
                raise DefectError(
                    "bracket-lower-bound",
                    "a row undercuts the contraction bound; residual deficits "
                    "exceed half the edge count",
                )
        return self._bisect(xw, lo, witness.length, witness)

    def bracket(self, x):
        """Bracket the shortest cut-row length by contraction.

        x maps each free edge to a strictly positive weight.  While
        some bipartition's demand exceeds its frozen crossing
        multiplicity, contract the heaviest free edge crossing it;
        every cut row must cross one of the contracted edges, so the
        lightest pick e bounds the shortest length from below by
        2x(e)/|E|, valid while every deficit is at most |E|/2.  The
        pick's own bipartition supplies the upper bound: its free
        crossing weight, at least its row's length.  Returns (lower,
        upper, witness_row), or None when no bipartition is deficient
        and the cut-row family is empty.  Under the same deficit
        condition upper/lower is at most |E|^2/2.
        """
        cur_graph = self.graph
        cur_dem = self.demand
        vmap = {v: v for v in self.graph.vertices}
        trace = []
        for _ in range(self.graph.vertex_count):
            if cur_graph.vertex_count == 1 or not cur_dem:
                break
            zcur = {e: z for e, z in self.frozen.items() if e in cur_graph._edges}
            cut = find_violated_set(cur_graph, cur_dem, zcur, counter=self.counter)
            if cut is None:
                break
            orig_side = frozenset(v for v in self.graph.vertices if vmap[v] in cut.side)
            orig_cut = self.graph.cut(orig_side)
            free = [e for e in cut_edges(cur_graph, cut) if e in self._col_of]
            if not free:
                raise DefectError(
                    "residual-infeasible",
                    "a deficient bipartition has no free edge to buy",
                )
            pick = max(free, key=lambda e: (x[e], -e))
            if not x[pick] > 0:
                raise DefectError("bracket-zero-weight", f"edge {pick} has weight 0")
            trace.append((x[pick], orig_cut))
            cur_graph, _, step_map = contract_edge(cur_graph, pick)
            vmap = {v: step_map[vmap[v]] for v in vmap}
            cur_dem = cur_dem.remap(step_map)
        else:
            raise DefectError("bracket-contraction", "contraction loop overran")

        if not trace:
            return None
        best = min(range(len(trace)), key=lambda k: trace[k][0])
        lower = 2.0 * trace[best][0] / self.graph.edge_count
        witness = self._row_from_cut(x, trace[best][1])
        if witness is None:
            raise DefectError("bracket-witness", "trace cut stopped being a row")
        upper = sum(x[e] for e in cut_edges(self.graph, trace[best][1])
                    if e in self._col_of)
        return lower, upper, witness

    def _exact_refresh(self, xw):
        weights = dict(xw)
        big = (math.fsum(xw.values()) + 1.0) * (self.demand.max_value + 1) * 4.0
        for e, z in self.frozen.items():
            weights[e] = big if z else 0.0
        found = min_ratio_cut(self.graph, weights, self.demand, counter=self.counter)
        row = None if found is None else self._row_from_cut(xw, found[0])
        if row is None:
            # Either no demand anywhere, or the best ratio crossed a
            # saturating frozen edge, which overwhelms any true row's
            # ratio; both mean the family is empty.
            self._family_known = True
            self._family_empty = True
            return None
        self.stats["refreshes"] += 1
        self._cached = (row.key, row.columns, row.gains)
        self._lb = row.length
        return row

    def _bisect(self, xw, lo, hi, best_row):
        if hi < lo:
            lo = hi
        for _ in range(200):
            if hi <= lo * (1 + self.tolerance):
                break
            mid = math.sqrt(lo * hi)
            found = self._threshold(xw, mid)
            if found is None:
                lo = mid
            else:
                best_row = found
                hi = min(hi, found.length)
        else:
            raise DefectError("bracket-bisection", "bisection failed to close")
        self._lb = lo
        self._cached = (best_row.key, best_row.columns, best_row.gains)
        return best_row

    def _threshold(self, xw, gamma):
        """A row of length below gamma, or None certifying none exists.

        Rows shorter than gamma are exactly the bipartitions whose
        demand exceeds frozen crossing plus free crossing of x/gamma,
        so one minimum-ratio query on those mixed weights decides it.
        """
        self.stats["threshold_queries"] += 1
        weights = {e: v / gamma for e, v in xw.items()}
        for e, z in self.frozen.items():
            if z:
                weights[e] = float(z)
        found = min_ratio_cut(self.graph, weights, self.demand, counter=self.counter)
        if found is None:
            return None
        cut, ratio = found
        if not ratio < 1:
            return None
        return self._row_from_cut(xw, cut)

    def _row_from_cut(self, xw, cut):
        """Materialize the row for a bipartition; None if not deficient."""
        deficit = self.demand.value(cut.side)
        free = []
        for e in cut_edges(self.graph, cut):
            if e in self._col_of:
                free.append(e)
            else:
                deficit -= self.frozen[e]
        if deficit < 1:
            return None
        if not free:
            raise DefectError(
                "residual-infeasible",
                "a deficient bipartition has no free edge to buy",
            )
        cols = tuple(self._col_of[e] for e in free)
        if isinstance(deficit, bool):  # demand.value returned a bool: refuse
            raise DefectError("row-deficit-type", "demand value must be an int")
        one = Fraction(1, deficit) if isinstance(next(iter(xw.values())), Fraction) \
            else 1.0 / deficit
        gains = (one,) * len(cols)
        length = sum(xw[e] for e in free) * one
        return OracleRow(CutRow(cut.side), cols, gains, length)

    # ------------------------------------------------------------------
    # Certification

    def _certify(self, xw, exact):
        nudge = 1 if exact else 1 + 1e-9
        zero = Fraction(0) if exact else 0.0
        alpha = zero
        if self.pinned is not None:
            px = xw[self.pinned]
            alpha = 1 / (2 * px)
        if self._cached is not None:
            key, cols, gains = self._cached
            length = sum(xw[self.columns[c]] * g for c, g in zip(cols, gains))
            if exact:
                length = Fraction(length)
            start = 1 / length
            if start > alpha:
                alpha = start
        if alpha == zero:
            alpha = zero + 1
        frozen_w = {e: z for e, z in self.frozen.items() if z}
        for _ in range(200):
            self.stats["certify_rounds"] += 1
            weights = {e: alpha * v for e, v in xw.items()}
            weights.update(frozen_w)
            found = min_ratio_cut(self.graph, weights, self.demand,
                                  counter=self.counter)
            if found is None or not found[1] < 1:
                return alpha
            row = self._row_from_cut(xw, found[0])
            if row is None:
                raise DefectError(
                    "certify-row", "deficient ratio on a bipartition with no deficit"
                )
            needed = 1 / row.length
            if exact:
                needed = Fraction(needed)
            alpha = max(alpha, needed) * nudge
        raise DefectError("certify-stall", "feasibility scaling failed to settle")

    def audit_dual(self, dual):
        """Exact feasibility check of a dual vector; returns its value.

        dual maps row keys (CutRow / EdgeFloorRow) to weights.  Every
        weight is converted exactly, per-column loads are accumulated
        in Fractions, and any column loaded beyond its cost raises.
        The returned Fraction is a true lower bound on the LP minimum
        by weak duality.
        """
        loads = {j: Fraction(0) for j in range(self.n_columns)}
        total = Fraction(0)
        for key in sorted(dual, key=_dual_order):
            y = Fraction(dual[key])
            if y < 0:
                raise DefectError("dual-negative", f"row {key!r}")
            if y == 0:
                continue
            if isinstance(key, EdgeFloorRow):
                if key.edge != self.pinned:
                    raise DefectError("dual-row", f"floor row on unpinned edge {key.edge}")
                loads[self._col_of[key.edge]] += 2 * y
            elif isinstance(key, CutRow):
                cut = self.graph.cut(key.side)
                deficit = self.demand.value(cut.side)
                free = []
                for e in cut_edges(self.graph, cut):
                    if e in self._col_of:
                        free.append(e)
                    else:
                        deficit -= self.frozen[e]
                if deficit < 1:
                    raise DefectError("dual-row", "dual weight on a non-deficient cut")
                for e in free:
                    loads[self._col_of[e]] += y / deficit
            else:
                raise DefectError("dual-row", f"unknown row key {key!r}")
            total += y
        for j, load in loads.items():
            if load > Fraction(self.costs[j]):
                raise DefectError(
                    "dual-infeasible",
                    f"column {self.columns[j]} loaded {load} over cost {self.costs[j]}",
                )
        return total


def _dual_order(key):
    if isinstance(key, EdgeFloorRow):
        return (0, key.edge, ())
    if isinstance(key, CutRow):
        return (1, -1, tuple(sorted(key.side)))
    # Foreign keys sort last so the audit loop rejects them itself.
    return (2, -1, (repr(key),))
