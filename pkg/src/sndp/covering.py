"""Width-independent multiplicative weights for covering LPs.

Solves min c.x over {x >= 0 : every row q has sum_j A(q,j) x(j) >= 1}
given only an oracle that can (approximately) find the row of smallest
length sum_j A(q,j) x(j) at the current x.  Rows never need to be
enumerated, which is the whole point: the solver drives cut-family LPs
with exponentially many rows through a cut-tree oracle.

The iterate is kept in scaled units.  The true vector is m * e^s for a
scalar s that only changes at renormalization; every quantity the loop
needs (argmin column, update factors, cost/length ratios) is invariant
under that scaling, so the astronomically small starting point delta/c
never has to exist as a float.  The initial s = ln(delta) would
underflow e^s for small step sizes, and the weights grow by a factor
of roughly 1/delta over the run, so neither endpoint fits in a double.

The returned solution is not trusted from theory: the best iterate is
rescaled by the oracle's own feasibility certification, and its cost is
checked against the accumulated dual lower bound before anything is
returned.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DefectError, InputError


class OracleRow(NamedTuple):
    """One covering row as reported by an oracle.

    key: hashable row identity, stable across calls (dual weight
    accumulates on it).  columns/gains: the row's nonzero entries
    A(q,j), already normalized so the row reads gains.x >= 1.  length:
    gains.m for the iterate m the oracle was called with.
    """

    key: object
    columns: tuple
    gains: tuple
    length: float


class CoveringSolution(NamedTuple):
    x: list
    cost: float
    dual_bound: float
    dual: dict
    best_value: float
    stats: dict


def solve_covering(oracle, step):
    """Run the weight-update loop against `oracle` at step size `step`.

    The oracle contract: attributes n_columns and costs; shortest_row(m)
    returning an OracleRow of length at most (1 + approx_factor) times
    the true minimum, or None when the row family is empty;
    certified_scale(m) returning alpha with alpha*m feasible;
    on_rescale(divisor) observing renormalizations so cached lengths
    stay in current units.  approx_factor is optional and defaults to
    the step size; an oracle may advertise a looser (or exact, 0.0)
    factor.  The dual bound and the growth-potential argument behind
    the ratio below do not depend on it; only the feasibility rescaling
    of the returned iterate does.

    Returns a CoveringSolution whose x is feasible by the oracle's own
    certification and whose cost is at most (1+eta)(1+4*step) times the
    reported dual bound for eta the oracle's factor, slop margin aside;
    violating that raises DefectError instead of returning a bad vector.
    """
    n = oracle.n_columns
    costs = oracle.costs
    if n < 1 or len(costs) != n:
        raise InputError("oracle must expose matching n_columns and costs")
    if any(not (c > 0) for c in costs):
        raise InputError("covering costs must be strictly positive")
    if not 0 < step <= 0.15:
        raise InputError(f"step size {step} outside (0, 0.15]")
    eta = float(getattr(oracle, "approx_factor", step))
    if not (eta >= 0 and math.isfinite(eta)):
        raise InputError(f"oracle approximation factor {eta} invalid")

    log1p_step = math.log1p(step)
    log_delta = log1p_step - math.log((1 + step) * n) / step
    # Each time a column is the update pivot its weight gains a factor
    # 1+step, and weights stay below (1+step)/c, so per column the pivot
    # count is bounded by per_col_cap.  Only the sum over columns bounds
    # the total iteration count; per_col_cap alone does not.
    per_col_cap = (log1p_step - log_delta) / log1p_step
    iteration_cap = int(n * per_col_cap) + n + 16

    m = [1.0 / c for c in costs]
    logscale = log_delta
    cost_sum = float(n)
    running_max = max(m)
    y = {}
    best_value = None
    best_m = None
    best_iteration = None
    iterations = 0
    calls = 0
    renorms = 0

    def resummed():
        return math.fsum(costs[j] * m[j] for j in range(n))

    def stats_dict():
        return {
            "columns": n,
            "step": step,
            "iterations": iterations,
            "oracle_calls": calls,
            "renormalizations": renorms,
            "per_column_cap": per_col_cap,
            "iteration_cap": iteration_cap,
            "best_iteration": best_iteration,
        }

    while True:
        cost_sum = resummed()
        if logscale + math.log(cost_sum) >= 0:
            break
        while logscale + math.log(cost_sum) < 0:
            row = oracle.shortest_row(m)
            calls += 1
            if row is None:
                if iterations == 0:
                    # Empty row family: the LP minimum is zero.
                    return CoveringSolution(
                        [0.0] * n, 0.0, 0.0, {}, 0.0, stats_dict()
                    )
                raise DefectError("mw-rows-vanished", "row family emptied mid-run")
            if not row.columns or row.length <= 0:
                raise DefectError("mw-degenerate-row", f"row {row.key!r}")
            value = cost_sum / row.length
            if best_value is None or value < best_value:
                best_value = value
                best_m = list(m)
                best_iteration = iterations
            pivot_ratio = None
            pivot_col = None
            for j, g in zip(row.columns, row.gains):
                r = costs[j] / g
                if pivot_ratio is None or r < pivot_ratio or (
                    r == pivot_ratio and j < pivot_col
                ):
                    pivot_ratio = r
                    pivot_col = j
            y[row.key] = y.get(row.key, 0.0) + pivot_ratio
            for j, g in zip(row.columns, row.gains):
                old = m[j]
                new = old * (1.0 + step * pivot_ratio * g / costs[j])
                m[j] = new
                cost_sum += costs[j] * (new - old)
                if new > running_max:
                    running_max = new
            iterations += 1
            if iterations > iteration_cap:
                raise DefectError(
                    "mw-iteration-cap",
                    f"{iterations} iterations exceed {iteration_cap} "
                    f"({n} columns, step {step})",
                )
            if running_max > 1e250:
                d = running_max
                m = [t / d for t in m]
                logscale += math.log(d)
                cost_sum = resummed()
                running_max = max(m)
                renorms += 1
                oracle.on_rescale(d)
            elif iterations % 256 == 0:
                # Incremental cost_sum drifts; refresh before trusting
                # the loop condition much longer.
                cost_sum = resummed()

    if best_m is None:
        raise DefectError("mw-no-iterations", "loop exited before any oracle call")

    # The loop measured iterates before each update; the final iterate
    # still needs its turn in the argmin.
    row = oracle.shortest_row(m)
    calls += 1
    if row is not None and row.length > 0:
        value = cost_sum / row.length
        if value < best_value:
            best_value = value
            best_m = list(m)
            best_iteration = iterations

    alpha = oracle.certified_scale(best_m)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DefectError("mw-certified-scale", f"scale {alpha!r}")
    x = [alpha * t for t in best_m]
    cost = alpha * math.fsum(costs[j] * best_m[j] for j in range(n))

    # Scaling the raw dual by the per-column cap makes it feasible for
    # the packing dual; shaving a hair more keeps downstream exact
    # feasibility checks safe against float accumulation.
    dual_scale = per_col_cap * (1.0 + 1e-9)
    dual = {key: v / dual_scale for key, v in y.items()}
    dual_bound = math.fsum(dual.values())
    if dual_bound > 0:
        allowed = (1 + eta) * (1 + 4 * step) * (1 + 1e-6) * dual_bound
        if cost > allowed:
            raise DefectError(
                "mw-ratio",
                f"certified cost {cost} exceeds {allowed} "
                f"(dual bound {dual_bound}, step {step})",
            )

    st = stats_dict()
    st["certified_scale"] = alpha
    return CoveringSolution(x, cost, dual_bound, dual, best_value, st)


class ExplicitCoveringInstance:
    """Oracle over an explicitly listed row matrix.

    rows are (coeffs, rhs) pairs over the cost vector's columns; each is
    normalized to gains = coeffs/rhs.  shortest_row is an exact argmin,
    which satisfies any approximation allowance.  Meant for tests and
    cross-checks; real cut LPs never materialize their rows.
    """

    approx_factor = 0.0

    def __init__(self, costs, rows):
        if not costs:
            raise InputError("need at least one column")
        self.costs = [float(c) for c in costs]
        if any(not (c > 0 and math.isfinite(c)) for c in self.costs):
            raise InputError("costs must be positive and finite")
        self.n_columns = len(self.costs)
        self._supports = []
        gain_rows = []
        for coeffs, rhs in rows:
            if len(coeffs) != self.n_columns:
                raise InputError("row width does not match column count")
            if not rhs > 0:
                raise InputError("row rhs must be positive")
            if any(v < 0 for v in coeffs):
                raise InputError("row coefficients must be nonnegative")
            cols = tuple(j for j, v in enumerate(coeffs) if v > 0)
            if not cols:
                raise InputError("a row with all-zero coefficients is unsatisfiable")
            gains = tuple(coeffs[j] / rhs for j in cols)
            self._supports.append((cols, gains))
            gain_rows.append([v / rhs for v in coeffs])
        self._amat = np.array(gain_rows, dtype=float)

    def shortest_row(self, m):
        if not self._supports:
            return None
        lengths = self._amat @ np.asarray(m, dtype=float)
        q = int(np.argmin(lengths))
        cols, gains = self._supports[q]
        return OracleRow(q, cols, gains, float(lengths[q]))

    def certified_scale(self, m):
        if not self._supports:
            return 1.0
        lengths = self._amat @ np.asarray(m, dtype=float)
        shortest = float(lengths.min())
        if not shortest > 0:
            raise DefectError("explicit-scale", "iterate has a zero-length row")
        return 1.0 / shortest

    def on_rescale(self, divisor):
        pass
