"""Command-line front end.

Four subcommands: `solve` runs the full iterative-rounding pipeline on
an instance file and emits a JSON report, `lp-only` stops after the
first unrestricted fractional solve, `oracle-check` runs the random
self-check battery of every oracle against its brute-force counterpart,
and `gen` writes a reproducible random instance.

Exit codes: 0 on success, 1 for bad input (unreadable or malformed
instance, bad flag values), 2 when an internal invariant is violated;
the invariant's name goes to stderr.  Reports are byte-stable for
identical inputs except for the "timing" section, and the --jobs width
is deliberately kept out of the report so concurrency cannot change a
byte of it.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from fractions import Fraction

from . import exact, instances
from .covering import ExplicitCoveringInstance, solve_covering
from .errors import DefectError, InputError
from .gomory_hu import BuildCounter, gomory_hu, min_ratio_cut
from .graph import cut_edges, cut_value
from .requirements import PairwiseRequirements, check_proper, find_violated_set
from .residual import ResidualInstance
from .rounding import require_connected, solve, solve_lp


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; that code is reserved for
        # invariant violations here, so fold usage into input errors.
        return 0 if exc.code in (0, None) else 1
    try:
        return args.run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DefectError as exc:
        print(str(exc), file=sys.stderr)
        return 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="sndp",
        description="approximate minimum-cost survivable network design",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance end to end")
    _instance_flags(p)
    p.set_defaults(run=_run_solve)

    p = sub.add_parser("lp-only", help="solve only the first fractional LP")
    _instance_flags(p)
    p.set_defaults(run=_run_lp_only)

    p = sub.add_parser("oracle-check", help="run the oracle self-check battery")
    p.add_argument("--max-vertices", type=int, default=7)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=_run_oracle_check)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--rmax", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="write here instead of stdout")
    p.set_defaults(run=_run_gen)

    return parser


def _instance_flags(p):
    p.add_argument("instance", help="instance file path")
    p.add_argument("--epsilon", type=float, required=True,
                   help="approximation budget")
    p.add_argument("--rational", action="store_true",
                   help="re-derive certificates in exact arithmetic")
    p.add_argument("--jobs", type=int, default=1,
                   help="concurrent LP solves in the per-edge sweep")
    p.add_argument("--seed", type=int, default=None,
                   help="recorded in the report; the solver is deterministic")
    p.add_argument("--strategy", choices=("exhaustive", "greedy"),
                   default="exhaustive")
    p.add_argument("--zeta-floor", type=float, default=0.05,
                   help="smallest multiplicative-weights step size; "
                        "0 restores the pure theory wiring")
    p.add_argument("--oracle-tolerance", type=float, default=None,
                   help="row-oracle approximation factor; defaults to the step")
    p.add_argument("--out", help="write the report here instead of stdout")


def _load_instance(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return instances.parse_instance(text)


def _emit(args, doc):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _instance_summary(graph, demand):
    return {
        "vertices": graph.vertex_count,
        "edges": graph.edge_count,
        "requirement_pairs": len(demand.pairs()),
        "max_requirement": demand.max_value,
    }


def _parameters(args):
    return {
        "epsilon": args.epsilon,
        "strategy": args.strategy,
        "zeta_floor": args.zeta_floor,
        "oracle_tolerance": args.oracle_tolerance,
        "rational": args.rational,
        "seed": args.seed,
    }


def _run_solve(args):
    graph, demand, _meta = _load_instance(args.instance)
    started = time.perf_counter()
    report = solve(graph, demand, args.epsilon, strategy=args.strategy,
                   zeta_floor=args.zeta_floor,
                   oracle_tolerance=args.oracle_tolerance,
                   jobs=args.jobs, rational=args.rational)
    elapsed = time.perf_counter() - started
    purchases = [
        {"id": e, "u": graph.endpoints(e)[0], "v": graph.endpoints(e)[1],
         "cost": graph.cost(e), "copies": v}
        for e, v in sorted(report.multiplicity.items())
    ]
    doc = {
        "command": "solve",
        "instance": _instance_summary(graph, demand),
        "parameters": _parameters(args),
        "solution": {
            "cost": report.cost,
            "lower_bound": report.lower_bound,
            "certified_ratio": report.ratio,
            "iterations": report.iterations,
            "purchases": purchases,
        },
        "audit": report.audit,
        "stats": report.stats,
        "timing": {"seconds": round(elapsed, 6)},
    }
    if args.rational and report.exact_lower_bound is not None:
        doc["certificates"] = {
            "exact_lower_bound": str(report.exact_lower_bound),
        }
    _emit(args, doc)
    return 0


def _run_lp_only(args):
    graph, demand, _meta = _load_instance(args.instance)
    if not args.epsilon > 0:
        raise InputError(f"epsilon must be positive, got {args.epsilon}")
    require_connected(graph, demand)
    started = time.perf_counter()
    m_edges = graph.edge_count
    fmax = demand.max_value
    doc = {
        "command": "lp-only",
        "instance": _instance_summary(graph, demand),
        "parameters": _parameters(args),
    }
    preset = {}
    if fmax and m_edges:
        pre_mult = max((m_edges + 1) // 2, fmax)
        preset = {e: pre_mult for e in graph.edge_ids() if graph.cost(e) == 0}
    counter = BuildCounter()
    if fmax == 0 or find_violated_set(graph, demand, preset,
                                      counter=counter) is None:
        doc["lp"] = {"cost": 0, "dual_bound": 0, "x": {},
                     "preset": {e: v for e, v in sorted(preset.items())}}
        doc["stats"] = {"gh_trees": counter.trees, "max_flows": counter.flows}
        doc["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
        _emit(args, doc)
        return 0
    zeta_target = math.log1p(args.epsilon) / m_edges
    step = min(0.15, max(zeta_target / 6, args.zeta_floor))
    tolerance = args.oracle_tolerance if args.oracle_tolerance is not None \
        else step
    sol, oracle = solve_lp(graph, demand, preset, None, step=step,
                           tolerance=tolerance, counter=counter,
                           rational=args.rational)
    doc["lp"] = {
        "cost": sol.cost,
        "dual_bound": sol.dual_bound,
        "x": {e: v for e, v in zip(oracle.columns, sol.x)},
        "preset": {e: v for e, v in sorted(preset.items())},
    }
    doc["stats"] = {"mw_step": step, "oracle_tolerance": tolerance,
                    "zeta_target": zeta_target,
                    "mw_iterations": sol.stats["iterations"],
                    "gh_trees": counter.trees, "max_flows": counter.flows}
    doc["stats"].update(sorted(oracle.stats.items()))
    if args.rational:
        doc["certificates"] = {
            "exact_dual_bound": str(oracle.audit_dual(sol.dual)),
            "exact_cost": str(oracle.last_certificate.cost),
        }
    doc["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    _emit(args, doc)
    return 0


def _run_gen(args):
    doc = instances.generate_instance(args.vertices, args.density, args.rmax,
                                      args.seed)
    text = instances.format_instance(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ----------------------------------------------------------------------
# Self-check battery


def _run_oracle_check(args):
    if args.max_vertices < 2:
        raise InputError("--max-vertices must be at least 2")
    if args.trials < 1:
        raise InputError("--trials must be positive")
    checks = [
        ("cut-tree-pairwise", _check_cut_tree),
        ("min-ratio-cut", _check_min_ratio),
        ("violated-set", _check_violated_set),
        ("proper-demand", _check_proper_demand),
        ("shortest-row", _check_shortest_row),
        ("covering-ratio", _check_covering),
    ]
    failures = 0
    for name, fn in checks:
        rng = random.Random(f"{args.seed}:{name}")
        try:
            for trial in range(args.trials):
                fn(rng, args.max_vertices)
        except (DefectError, AssertionError) as exc:
            failures += 1
            print(f"FAIL {name} (trial {trial}): {exc}")
        else:
            print(f"PASS {name} ({args.trials} trials)")
    if failures:
        print(f"{failures} of {len(checks)} checks failed", file=sys.stderr)
        return 2
    return 0


def _battery_graph(rng, max_vertices):
    n = rng.randint(2, max_vertices)
    extra = rng.randint(0, n)
    return instances.random_connected_graph(rng, n, extra)


def _battery_demand(rng, graph, rcap=None):
    verts = list(graph.vertices)
    if rcap is None:
        rcap = max(1, graph.edge_count // 2)
    triples = []
    for _ in range(rng.randint(1, len(verts))):
        u, v = rng.sample(verts, 2)
        triples.append((u, v, rng.randint(1, rcap)))
    return PairwiseRequirements(triples)


def _check_cut_tree(rng, max_vertices):
    graph = _battery_graph(rng, max_vertices)
    exact_mode = rng.random() < 0.25
    if exact_mode:
        weights = {e: Fraction(rng.randint(1, 40), rng.randint(1, 7))
                   for e in graph.edge_ids()}
    else:
        weights = {e: rng.random() * 10 for e in graph.edge_ids()}
    tree = gomory_hu(graph, weights)
    verts = sorted(graph.vertices)
    for te in tree.edges:
        assert cut_value(graph, weights, te.cut) == te.weight, \
            "stored bipartition does not attain its weight"
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            brute = min(
                cut_value(graph, weights, c)
                for c in exact.canonical_cuts(graph)
                if (u in c.side) != (v in c.side)
            )
            got = tree.min_cut_value(u, v)
            if exact_mode:
                assert got == brute, f"pair {u},{v}: {got} != {brute}"
            else:
                assert abs(got - brute) <= 1e-9 * max(1.0, abs(brute)), \
                    f"pair {u},{v}: {got} vs {brute}"


def _check_min_ratio(rng, max_vertices):
    graph = _battery_graph(rng, max_vertices)
    weights = {e: rng.random() * 5 for e in graph.edge_ids()}
    demand = _battery_demand(rng, graph, rcap=4)
    got = min_ratio_cut(graph, weights, demand)
    want = exact.brute_min_ratio(graph, weights, demand)
    assert (got is None) == (want is None), "ratio query existence mismatch"
    if got is not None:
        assert abs(got[1] - want[1]) <= 1e-9 * max(1.0, want[1]), \
            f"min ratio {got[1]} vs brute {want[1]}"


def _check_violated_set(rng, max_vertices):
    graph = _battery_graph(rng, max_vertices)
    demand = _battery_demand(rng, graph, rcap=4)
    mult = {e: rng.randint(0, 3) for e in graph.edge_ids() if rng.random() < 0.8}
    cut = find_violated_set(graph, demand, mult)
    deficient = [
        c for c in exact.canonical_cuts(graph)
        if cut_value(graph, mult, c) < demand.value(c.side)
    ]
    assert (cut is None) == (not deficient), "violated-set existence mismatch"
    if cut is not None:
        assert cut_value(graph, mult, cut) < demand.value(cut.side), \
            "reported set is not actually violated"


def _check_proper_demand(rng, max_vertices):
    graph = _battery_graph(rng, min(max_vertices, 7))
    demand = _battery_demand(rng, graph, rcap=5)
    problems = check_proper(demand, graph.vertices)
    assert not problems, "; ".join(problems)


def _check_shortest_row(rng, max_vertices):
    graph = _battery_graph(rng, max_vertices)
    rcap = max(1, graph.edge_count // 2)
    demand = _battery_demand(rng, graph, rcap=rcap)
    frozen = {}
    if rng.random() < 0.6:
        frozen = {e: rng.randint(1, rcap) for e in graph.edge_ids()
                  if rng.random() < 0.3}
    if len(frozen) == graph.edge_count:
        frozen.popitem()
    if any(
        cut_value(graph, frozen, c) < demand.value(c.side)
        and all(e in frozen for e in cut_edges(graph, c))
        for c in exact.canonical_cuts(graph)
    ):
        # A deficient bipartition with nothing left to buy makes the
        # residual LP infeasible; rounding never produces that.
        frozen = {}
    free = [e for e in graph.edge_ids() if e not in frozen]
    pinned = rng.choice(free) if rng.random() < 0.5 else None
    tol = rng.choice((0.05, 0.15))
    oracle = ResidualInstance(graph, demand, frozen, pinned=pinned,
                              tolerance=tol)
    m = [rng.random() * 4 + 1e-3 for _ in free]
    row = oracle.shortest_row(m)
    xw = dict(zip(free, m))
    best = exact.brute_shortest_cut_row(graph, xw, frozen, demand)
    if pinned is not None:
        floor_len = 2 * xw[pinned]
        if best is None or floor_len < best[1]:
            best = (None, floor_len)
    if best is None:
        assert row is None, "oracle invented a row"
        return
    assert row is not None, "oracle missed every row"
    recomputed = sum(xw[free[c]] * g for c, g in zip(row.columns, row.gains))
    assert abs(recomputed - row.length) <= 1e-9 * max(1.0, row.length), \
        "reported length is not the row's length"
    assert row.length <= (1 + tol) * best[1] * (1 + 1e-9), \
        f"length {row.length} exceeds (1+{tol}) x {best[1]}"


def _check_covering(rng, max_vertices):
    n = rng.randint(1, 6)
    rows = []
    for _ in range(rng.randint(1, 6)):
        coeffs = [rng.randint(0, 3) for _ in range(n)]
        if not any(coeffs):
            coeffs[rng.randrange(n)] = 1
        rows.append((coeffs, rng.randint(1, 4)))
    costs = [rng.randint(1, 9) for _ in range(n)]
    step = rng.choice((0.05, 0.1, 0.15))
    sol = solve_covering(ExplicitCoveringInstance(costs, rows), step)
    opt = exact.covering_lp_min(costs, rows)
    assert Fraction(sol.dual_bound) <= opt.value * (1 + Fraction(1, 10**9)), \
        f"dual bound {sol.dual_bound} above optimum {opt.value}"
    assert sol.cost <= (1 + 4 * step) * (1 + 1e-6) * float(opt.value), \
        f"cost {sol.cost} misses (1+4x{step}) of optimum {opt.value}"


if __name__ == "__main__":
    sys.exit(main())
