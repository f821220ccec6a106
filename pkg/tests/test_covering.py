import random
from fractions import Fraction

import numpy as np
import pytest

from sndp.covering import ExplicitCoveringInstance, OracleRow, solve_covering
from sndp.errors import InputError
from sndp.exact import covering_lp_min


def test_row_length_evaluation():
    inst = ExplicitCoveringInstance([1, 1], [([1, 2], 2)])
    assert inst.shortest_row([1.0, 1.0]).length == pytest.approx(1.5)
    assert inst.shortest_row([0.0, 0.0]).length == 0.0
    one_sided = ExplicitCoveringInstance([1, 1], [([3, 0], 3)])
    row = one_sided.shortest_row([2.0, 5.0])
    assert row.columns == (0,) and row.length == pytest.approx(2.0)


def test_single_column_instance():
    inst = ExplicitCoveringInstance([1], [([1], 1)])
    sol = solve_covering(inst, 0.1)
    assert 1 <= sol.cost <= 1.4
    assert sol.dual_bound <= 1 + 1e-9
    assert sol.dual_bound <= sol.cost
    assert sol.x[0] >= 1


def test_two_columns_one_row():
    # Optimum 1 puts all mass on the cheaper column.
    inst = ExplicitCoveringInstance([1, 2], [([1, 1], 1)])
    sol = solve_covering(inst, 0.1)
    assert 1 <= sol.cost <= 1.4
    assert sol.x[0] + sol.x[1] >= 1 - 1e-12


def test_empty_row_family_is_free():
    sol = solve_covering(ExplicitCoveringInstance([3, 4], []), 0.1)
    assert sol.cost == 0 and sol.x == [0.0, 0.0] and sol.dual == {}


def test_matches_exact_lp_on_random_instances():
    rng = random.Random(101)
    for trial in range(25):
        n = rng.randint(1, 6)
        costs = [rng.randint(1, 9) for _ in range(n)]
        rows = []
        for _ in range(rng.randint(1, 5)):
            coeffs = [rng.randint(0, 3) for _ in range(n)]
            if not any(coeffs):
                coeffs[rng.randrange(n)] = 2
            # Dyadic rhs keeps the normalized row exact in doubles, so
            # the dual check below can be run in Fractions.
            rows.append((coeffs, rng.choice([1, 2, 4])))
        step = 0.05 if trial % 2 else 0.15
        sol = solve_covering(ExplicitCoveringInstance(costs, rows), step)
        opt = covering_lp_min(costs, rows)
        assert sol.cost <= (1 + 4 * step) * (1 + 1e-6) * float(opt.value)
        assert sol.stats["iterations"] <= sol.stats["iteration_cap"]

        load = [Fraction(0)] * n
        bound = Fraction(0)
        for q, yv in sol.dual.items():
            coeffs, rhs = rows[q]
            bound += Fraction(yv)
            for j in range(n):
                load[j] += Fraction(yv) * Fraction(coeffs[j], rhs)
        assert all(load[j] <= costs[j] for j in range(n))
        assert bound <= opt.value
        for coeffs, rhs in rows:
            got = sum(c * v for c, v in zip(coeffs, sol.x))
            assert got >= rhs * (1 - 1e-9)


def test_iterations_can_exceed_one_column_budget():
    # Two disjoint singleton rows force each column through its own full
    # weight ramp; the run stays under the summed cap but overshoots any
    # single column's share.
    inst = ExplicitCoveringInstance([1, 1], [([1, 0], 1), ([0, 1], 1)])
    sol = solve_covering(inst, 0.1)
    assert sol.stats["iterations"] > sol.stats["per_column_cap"] + 1
    assert sol.stats["iterations"] <= sol.stats["iteration_cap"]
    assert sol.cost <= 1.4 * 2


def test_loose_oracle_factor_still_certifies():
    class SecondBest:
        """Delegating oracle that reports the worst row inside a wide
        allowance, advertising that allowance up front."""

        approx_factor = 0.5

        def __init__(self, inner):
            self.inner = inner
            self.n_columns = inner.n_columns
            self.costs = inner.costs

        def shortest_row(self, m):
            lengths = self.inner._amat @ np.asarray(m, dtype=float)
            lo = float(lengths.min())
            ok = [q for q in range(len(lengths))
                  if lengths[q] <= (1 + self.approx_factor) * lo]
            q = max(ok, key=lambda k: (float(lengths[k]), -k))
            cols, gains = self.inner._supports[q]
            return OracleRow(q, cols, gains, float(lengths[q]))

        def certified_scale(self, m):
            return self.inner.certified_scale(m)

        def on_rescale(self, divisor):
            pass

    rows = [([1, 1, 0], 1), ([0, 1, 1], 1), ([1, 0, 1], 1)]
    oracle = SecondBest(ExplicitCoveringInstance([1, 1, 1], rows))
    sol = solve_covering(oracle, 0.1)
    allowed = 1.5 * 1.4 * (1 + 1e-6) * 1.5
    assert sol.cost <= allowed
    for coeffs, rhs in rows:
        assert sum(c * v for c, v in zip(coeffs, sol.x)) >= rhs * (1 - 1e-9)


def test_validation():
    good = ExplicitCoveringInstance([1], [([1], 1)])
    with pytest.raises(InputError):
        solve_covering(good, 0.0)
    with pytest.raises(InputError):
        solve_covering(good, 0.16)
    with pytest.raises(InputError):
        solve_covering(good, -0.05)
    with pytest.raises(InputError):
        ExplicitCoveringInstance([], [])
    with pytest.raises(InputError):
        ExplicitCoveringInstance([0], [([1], 1)])
    with pytest.raises(InputError):
        ExplicitCoveringInstance([1, 1], [([0, 0], 1)])
    with pytest.raises(InputError):
        ExplicitCoveringInstance([1], [([1, 1], 1)])
    with pytest.raises(InputError):
        ExplicitCoveringInstance([1], [([1], 0)])
