"""Slow exact references: exhaustive cut scans, rational LP, tiny IP.

Everything here trades speed for certainty.  The LP path runs Bland's
rule over Fractions and re-checks its own optimality certificate before
returning, so a wrong answer turns into a raised DefectError rather
than a silently bad baseline.  Intended for tests, the oracle-check
command, and cross-validation of the fast code paths; none of it is on
the production solve path.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import DefectError, InputError
from .graph import cut_edges, cut_value


def canonical_cuts(graph):
    """Every bipartition once, as Cut objects, in a fixed order.

    Enumerates subsets of the non-root vertices by ascending bitmask
    over the sorted vertex list; the root stays outside each side, so
    no bipartition appears twice.
    """
    rest = sorted(v for v in graph.vertices if v != graph.root)
    n = len(rest)
    for mask in range(1, 1 << n):
        side = frozenset(rest[i] for i in range(n) if mask >> i & 1)
        yield graph.cut(side)


def brute_min_ratio(graph, weights, demand):
    """Exhaustive counterpart of min_ratio_cut; exact comparisons.

    Returns (cut, ratio) or None if demand vanishes on every
    bipartition.  The first cut in canonical order wins ties.
    """
    best = None
    for cut in canonical_cuts(graph):
        d = demand.value(cut.side)
        if d < 1:
            continue
        w = cut_value(graph, weights, cut)
        if best is None or w * best[1] < best[0] * d:
            best = (w, d, cut)
    if best is None:
        return None
    w, d, cut = best
    if isinstance(w, float):
        return cut, w / d
    return cut, Fraction(w) / d


def brute_shortest_cut_row(graph, lengths, preset, demand):
    """Shortest row among bipartitions still short of their demand.

    A bipartition with demand d and preset crossing multiplicity p is a
    row when d - p >= 1; its length is the crossing `lengths` total
    divided by d - p.  Returns (cut, length) minimizing that, or None
    when no bipartition qualifies.  `lengths` should carry entries only
    for free edges so preset edges never contribute to a row length.
    """
    best = None
    for cut in canonical_cuts(graph):
        deficit = demand.value(cut.side) - cut_value(graph, preset, cut)
        if deficit < 1:
            continue
        num = cut_value(graph, lengths, cut)
        if best is None or num * best[1] < best[0] * deficit:
            best = (num, deficit, cut)
    if best is None:
        return None
    num, deficit, cut = best
    if isinstance(num, float):
        return cut, num / deficit
    return cut, Fraction(num) / deficit


def cut_rows(graph, demand, preset, columns):
    """Explicit covering rows over the given columns, one per deficient
    bipartition: (coeffs, rhs, cut) with rhs = demand - preset crossing.
    """
    cols = list(columns)
    pos = {e: i for i, e in enumerate(cols)}
    out = []
    for cut in canonical_cuts(graph):
        rhs = demand.value(cut.side) - cut_value(graph, preset, cut)
        if rhs < 1:
            continue
        coeffs = [0] * len(cols)
        crossing = False
        for e in cut_edges(graph, cut):
            if e in pos:
                coeffs[pos[e]] = 1
                crossing = True
        if not crossing:
            raise InputError(
                "covering instance infeasible: a deficient bipartition has no free edge"
            )
        out.append((coeffs, rhs, cut))
    return out


class LpOpt(NamedTuple):
    value: Fraction
    x: list
    y: list


def covering_lp_min(costs, rows):
    """Exact optimum of min c.x s.t. each row's coeffs.x >= rhs, x >= 0.

    rows is a list of (coeffs, rhs) with nonnegative entries; costs must
    be positive.  Solves the packing dual (max rhs.y, A^T y <= c) by
    Bland's rule in Fractions, reads the primal off the final reduced
    costs, and verifies both feasibility and equal objectives before
    returning.  Ints and Fractions only; floats are refused.
    """
    c = [_frac(v, "cost") for v in costs]
    if any(v <= 0 for v in c):
        raise InputError("covering_lp_min needs strictly positive costs")
    a = []
    b = []
    for coeffs, rhs in rows:
        if len(coeffs) != len(c):
            raise InputError("row length does not match cost vector")
        a.append([_frac(v, "coefficient") for v in coeffs])
        b.append(_frac(rhs, "rhs"))
    if any(v < 0 for row in a for v in row) or any(v <= 0 for v in b):
        raise InputError("rows need nonnegative coefficients and positive rhs")
    n = len(c)
    m = len(a)
    if m == 0:
        return LpOpt(Fraction(0), [Fraction(0)] * n, [])

    # Dual packing tableau: one constraint per column, variables y then
    # slacks, basis starts at the slacks (y = 0 is feasible).
    zero = Fraction(0)
    tab = []
    for j in range(n):
        row = [a[i][j] for i in range(m)] + [zero] * n + [c[j]]
        row[m + j] = Fraction(1)
        tab.append(row)
    obj = [-b[i] for i in range(m)] + [zero] * (n + 1)
    basis = [m + j for j in range(n)]

    for _ in range(20000):
        enter = next((k for k in range(m + n) if obj[k] < 0), None)
        if enter is None:
            break
        leave = None
        for j in range(n):
            t = tab[j][enter]
            if t <= 0:
                continue
            ratio = tab[j][-1] / t
            if (
                leave is None
                or ratio < leave[0]
                or (ratio == leave[0] and basis[j] < basis[leave[1]])
            ):
                leave = (ratio, j)
        if leave is None:
            raise InputError(
                "primal covering LP infeasible: packing dual is unbounded"
            )
        j = leave[1]
        piv = tab[j][enter]
        tab[j] = [v / piv for v in tab[j]]
        for r in range(n):
            if r != j and tab[r][enter] != 0:
                f = tab[r][enter]
                tab[r] = [v - f * w for v, w in zip(tab[r], tab[j])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [v - f * w for v, w in zip(obj, tab[j])]
        basis[j] = enter
    else:
        raise DefectError("simplex-cycling", "Bland's rule exceeded the pivot cap")

    y = [zero] * m
    for j in range(n):
        if basis[j] < m:
            y[basis[j]] = tab[j][-1]
    x = [obj[m + j] for j in range(n)]
    value = obj[-1]

    # The certificate must reproduce itself exactly or the result is
    # worthless as an oracle.
    if any(v < 0 for v in x) or any(v < 0 for v in y):
        raise DefectError("simplex-sign", "negative entry in an optimal pair")
    for i in range(m):
        if sum(a[i][j] * x[j] for j in range(n)) < b[i]:
            raise DefectError("simplex-primal", f"row {i} unsatisfied by recovered x")
    for j in range(n):
        if sum(a[i][j] * y[i] for i in range(m)) > c[j]:
            raise DefectError("simplex-dual", f"column {j} over cost in recovered y")
    cx = sum(c[j] * x[j] for j in range(n))
    by = sum(b[i] * y[i] for i in range(m))
    if cx != by or cx != value:
        raise DefectError("simplex-gap", f"objectives disagree: {cx} vs {by}")
    return LpOpt(value, x, y)


def _frac(v, what):
    if isinstance(v, float):
        raise InputError(f"exact LP refuses float {what} {v!r}; pass int or Fraction")
    return Fraction(v)


def integral_cover_min(costs, rows, upper, chunk=1 << 18):
    """Exhaustive minimum of c.z over integer z with 0 <= z <= upper
    satisfying every covering row.  Returns (value, z list).

    Search space is the full product grid, so this is for cross-checking
    tiny instances only; anything past ~30M combinations is refused.
    """
    n = len(costs)
    if n == 0:
        raise InputError("no columns")
    total = 1
    for _ in range(n):
        total *= upper + 1
        if total > 30_000_000:
            raise InputError("grid too large for exhaustive integral search")
    amat = np.array([coeffs for coeffs, _ in rows], dtype=np.int64)
    bvec = np.array([rhs for _, rhs in rows], dtype=np.int64)
    cvec = np.array(costs, dtype=np.int64)
    radix = upper + 1
    best_val = None
    best_z = None
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = np.empty((idx.size, n), dtype=np.int64)
        rem = idx
        for col in range(n - 1, -1, -1):
            digits[:, col] = rem % radix
            rem = rem // radix
        if len(rows):
            ok = np.all(digits @ amat.T >= bvec, axis=1)
        else:
            ok = np.ones(idx.size, dtype=bool)
        if not ok.any():
            continue
        vals = digits[ok] @ cvec
        k = int(np.argmin(vals))
        v = int(vals[k])
        if best_val is None or v < best_val:
            best_val = v
            best_z = [int(t) for t in digits[ok][k]]
    if best_val is None:
        raise InputError("no feasible integral vector within the given bounds")
    return best_val, best_z
