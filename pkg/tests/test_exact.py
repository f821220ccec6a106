import itertools
import random
from fractions import Fraction

import pytest

from sndp.errors import InputError
from sndp.graph import Graph
from sndp.instances import random_connected_graph
from sndp.requirements import PairwiseRequirements
from sndp import exact


def triangle_instance():
    g = Graph("abc", [("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])
    dem = PairwiseRequirements([("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])
    return g, dem


def solve_square(rows, rhs):
    """Unique Fraction solution of a small linear system, or None."""
    n = len(rhs)
    a = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def vertex_enumeration_min(costs, rows):
    """Exhaustive optimum over basic points: n tight constraints drawn
    from the covering rows and the coordinate planes."""
    n = len(costs)
    cands = []
    axes = [([1 if j == k else 0 for j in range(n)], 0) for k in range(n)]
    pool = [(coeffs, rhs) for coeffs, rhs in rows] + axes
    for combo in itertools.combinations(pool, n):
        x = solve_square([c for c, _ in combo], [r for _, r in combo])
        if x is None or any(v < 0 for v in x):
            continue
        if all(sum(Fraction(c) * v for c, v in zip(coeffs, x)) >= rhs
               for coeffs, rhs in rows):
            cands.append(sum(Fraction(c) * v for c, v in zip(costs, x)))
    return min(cands)


def test_canonical_cuts_enumerates_once():
    g, _ = triangle_instance()
    cuts = list(exact.canonical_cuts(g))
    assert len(cuts) == 3
    assert len({c.side for c in cuts}) == 3
    assert all(g.root not in c.side for c in cuts)


def test_lp_triangle_and_forced():
    g, dem = triangle_instance()
    rows = [(coeffs, rhs) for coeffs, rhs, _ in
            exact.cut_rows(g, dem, {}, g.edge_ids())]
    assert len(rows) == 3
    opt = exact.covering_lp_min([1, 1, 1], rows)
    assert opt.value == Fraction(3, 2)
    assert exact.covering_lp_min([1], [([1], 1)]).value == 1
    assert exact.covering_lp_min([1, 2], []).value == 0


def test_lp_refuses_floats_and_bad_rows():
    with pytest.raises(InputError):
        exact.covering_lp_min([1.0], [([1], 1)])
    with pytest.raises(InputError):
        exact.covering_lp_min([0], [([1], 1)])
    with pytest.raises(InputError):
        exact.covering_lp_min([1], [([-1], 1)])
    with pytest.raises(InputError):
        # No column can cover the row: packing dual is unbounded.
        exact.covering_lp_min([1, 1], [([0, 0], 1)])


def test_lp_matches_vertex_enumeration():
    rng = random.Random(17)
    for _ in range(40):
        n = rng.randint(1, 3)
        costs = [rng.randint(1, 9) for _ in range(n)]
        rows = []
        for _ in range(rng.randint(1, 4)):
            coeffs = [rng.randint(0, 3) for _ in range(n)]
            if not any(coeffs):
                coeffs[rng.randrange(n)] = 1
            rows.append((coeffs, rng.randint(1, 5)))
        opt = exact.covering_lp_min(costs, rows)
        assert opt.value == vertex_enumeration_min(costs, rows)


def test_lp_rhs_may_be_fractional():
    opt = exact.covering_lp_min([4], [([1], Fraction(1, 2))])
    assert opt.value == 2


def test_integral_cover_examples():
    g, dem = triangle_instance()
    rows = [(coeffs, rhs) for coeffs, rhs, _ in
            exact.cut_rows(g, dem, {}, g.edge_ids())]
    value, z = exact.integral_cover_min([1, 1, 1], rows, 1)
    assert value == 2 and sum(z) == 2
    value, z = exact.integral_cover_min([5], [([1], 3)], 3)
    assert value == 15 and z == [3]
    with pytest.raises(InputError):
        exact.integral_cover_min([1], [([1], 5)], 2)
    with pytest.raises(InputError):
        exact.integral_cover_min([1] * 20, [], 20)


def test_ip_at_least_lp_on_random_instances():
    rng = random.Random(29)
    for _ in range(20):
        g = random_connected_graph(rng, rng.randint(2, 5), rng.randint(0, 2))
        verts = sorted(g.vertices)
        dem = PairwiseRequirements(
            [(*rng.sample(verts, 2), rng.randint(1, 2)) for _ in range(2)]
        )
        rows = [(coeffs, rhs) for coeffs, rhs, _ in
                exact.cut_rows(g, dem, {}, g.edge_ids())]
        if not rows:
            continue
        costs = [g.cost(e) if g.cost(e) > 0 else 1 for e in g.edge_ids()]
        lp = exact.covering_lp_min(costs, rows)
        ip, _ = exact.integral_cover_min(costs, rows, dem.max_value)
        assert Fraction(ip) >= lp.value


def test_cut_rows_drop_covered_bipartitions():
    g, dem = triangle_instance()
    rows = exact.cut_rows(g, dem, {0: 1}, [1, 2])
    # Cuts crossed by the preset ab edge lose one unit of demand; only
    # the bipartition isolating c still needs coverage.
    assert [(coeffs, rhs) for coeffs, rhs, _ in rows] == [([1, 1], 1)]
    with pytest.raises(InputError):
        exact.cut_rows(g, dem, {}, [0])


def test_brute_min_ratio_triangle():
    g, dem = triangle_instance()
    cut, ratio = exact.brute_min_ratio(g, {e: 0.5 for e in g.edge_ids()}, dem)
    assert ratio == pytest.approx(1.0)
    assert exact.brute_min_ratio(g, {}, PairwiseRequirements([])) is None


def test_brute_shortest_row_respects_preset():
    g, dem = triangle_instance()
    lengths = {1: 0.6, 2: 0.9}
    got = exact.brute_shortest_cut_row(g, lengths, {0: 1}, dem)
    assert got is not None
    cut, length = got
    assert cut.side == frozenset("c") and length == pytest.approx(1.5)
    # Saturating preset kills every row.
    assert exact.brute_shortest_cut_row(g, lengths, {0: 9, 1: 9, 2: 9}, dem) is None
