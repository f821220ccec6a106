import random
from fractions import Fraction

import pytest

from sndp.errors import InputError
from sndp.gomory_hu import BuildCounter, gomory_hu, min_cut, min_ratio_cut
from sndp.graph import Graph, cut_value
from sndp.instances import random_connected_graph
from sndp.requirements import PairwiseRequirements
from sndp import exact


def unit_weights(g):
    return {e: 1 for e in g.edge_ids()}


def brute_pair_cut(g, w, u, v):
    return min(cut_value(g, w, c) for c in exact.canonical_cuts(g)
               if (u in c.side) != (v in c.side))


def test_min_cut_examples():
    t = Graph("abc", [("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])
    value, cut = min_cut(t, unit_weights(t), "a", "b")
    assert value == 2
    p = Graph("abc", [("a", "b", 1), ("b", "c", 1)])
    value, cut = min_cut(p, {0: 2, 1: 3}, "a", "c")
    # Canonical side omits the root vertex a.
    assert value == 2 and cut.side == frozenset("bc")
    with pytest.raises(InputError):
        min_cut(p, {}, "a", "a")
    with pytest.raises(InputError):
        min_cut(p, {0: -1}, "a", "b")


def test_min_cut_matches_brute_force():
    rng = random.Random(31)
    for _ in range(40):
        g = random_connected_graph(rng, rng.randint(2, 7), rng.randint(0, 6))
        w = {e: rng.random() * 4 for e in g.edge_ids()}
        u, v = rng.sample(sorted(g.vertices), 2)
        value, cut = min_cut(g, w, u, v)
        assert (u in cut.side) != (v in cut.side)
        assert value == pytest.approx(cut_value(g, w, cut))
        assert value == pytest.approx(brute_pair_cut(g, w, u, v))


def test_tree_on_a_star():
    g = Graph("opqs", [("o", "p", 1), ("o", "q", 1), ("o", "s", 1)])
    tree = gomory_hu(g, unit_weights(g))
    assert len(tree.edges) == 3
    assert all(te.weight == 1 for te in tree.edges)
    # Each stored bipartition isolates one leaf.
    sides = sorted(sorted(te.cut.side) for te in tree.edges)
    assert sides == [["p"], ["q"], ["s"]]


def test_tree_on_triangle_and_single_vertex():
    t = Graph("abc", [("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])
    tree = gomory_hu(t, unit_weights(t))
    assert sorted(te.weight for te in tree.edges) == [2, 2]
    lone = gomory_hu(Graph("a"), {})
    assert lone.edges == []


def test_tree_on_unit_four_cycle():
    # Every pairwise min cut is 2; splits reattach neighbors, so this
    # exercises the final-adjacency edge enumeration.
    g = Graph("abcd", [("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("a", "d", 1)])
    w = unit_weights(g)
    tree = gomory_hu(g, w)
    assert len(tree.edges) == 3
    for te in tree.edges:
        assert cut_value(g, w, te.cut) == te.weight == 2
    verts = sorted(g.vertices)
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            assert tree.min_cut_value(u, v) == 2


def test_tree_matches_brute_force_random():
    rng = random.Random(47)
    for _ in range(30):
        g = random_connected_graph(rng, rng.randint(2, 7), rng.randint(0, 6))
        exact_mode = rng.random() < 0.5
        if exact_mode:
            w = {e: Fraction(rng.randint(0, 30), rng.randint(1, 5))
                 for e in g.edge_ids()}
        else:
            w = {e: rng.random() * 9 for e in g.edge_ids()}
        counter = BuildCounter()
        tree = gomory_hu(g, w, counter=counter)
        assert counter.trees == 1
        assert counter.flows == g.vertex_count - 1
        for te in tree.edges:
            assert cut_value(g, w, te.cut) == te.weight
        verts = sorted(g.vertices)
        for i, u in enumerate(verts):
            for v in verts[i + 1:]:
                brute = brute_pair_cut(g, w, u, v)
                got = tree.min_cut_value(u, v)
                if exact_mode:
                    assert got == brute
                else:
                    assert got == pytest.approx(brute, rel=1e-9, abs=1e-12)


def test_tree_bipartitions_dominate_demand():
    """Any side's demand is at most the max over crossing tree edges'."""
    rng = random.Random(59)
    for _ in range(25):
        g = random_connected_graph(rng, rng.randint(3, 7), rng.randint(0, 5))
        verts = sorted(g.vertices)
        dem = PairwiseRequirements(
            [(*rng.sample(verts, 2), rng.randint(1, 4)) for _ in range(3)]
        )
        w = {e: rng.random() * 3 for e in g.edge_ids()}
        tree = gomory_hu(g, w)
        side = frozenset(rng.sample(verts, rng.randint(1, len(verts) - 1)))
        if side == set(verts):
            continue
        crossing = [te for te in tree.edges if (te.u in side) != (te.v in side)]
        assert dem.value(side) <= max(dem.value(te.cut.side) for te in crossing)


def test_min_ratio_examples():
    t = Graph("abc", [("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])
    dem = PairwiseRequirements([("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])
    cut, ratio = min_ratio_cut(t, {e: 0.5 for e in t.edge_ids()}, dem)
    assert ratio == pytest.approx(1.0)
    cut, ratio = min_ratio_cut(t, {0: 0, 1: 1, 2: 1}, dem)
    assert ratio == 1
    assert min_ratio_cut(t, unit_weights(t), PairwiseRequirements([])) is None


def test_min_ratio_matches_brute_force():
    rng = random.Random(61)
    for _ in range(60):
        g = random_connected_graph(rng, rng.randint(2, 8), rng.randint(0, 6))
        verts = sorted(g.vertices)
        dem = PairwiseRequirements(
            [(*rng.sample(verts, 2), rng.randint(1, 4))
             for _ in range(rng.randint(1, 4))]
        )
        w = {e: rng.random() * 5 for e in g.edge_ids()}
        got = min_ratio_cut(g, w, dem)
        want = exact.brute_min_ratio(g, w, dem)
        assert (got is None) == (want is None)
        if got is not None:
            assert got[1] == pytest.approx(want[1], rel=1e-9, abs=1e-12)
            assert dem.value(got[0].side) >= 1
