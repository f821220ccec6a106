"""Instance files and random instance generation.

An instance is a JSON object with three data keys and one free-form
one: "vertices" lists distinct vertex names, "edges" lists
{u, v, cost} objects (parallel edges welcome, ids are assigned in
listing order), "requirements" lists {u, v, r} demands, and "meta"
carries anything the producer wants to remember.  Parsing is strict:
unknown keys, wrong types, negative or non-finite numbers, and
dangling vertex names are input errors that name the offending field.
"""

from __future__ import annotations

import json
import math
import random

from .errors import InputError
from .graph import Graph
from .requirements import PairwiseRequirements


def parse_instance(text):
    """Parse instance JSON into (graph, requirements, meta)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"instance is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("instance must be a JSON object")
    unknown = sorted(set(doc) - {"vertices", "edges", "requirements", "meta"})
    if unknown:
        raise InputError(f"unknown instance keys: {', '.join(unknown)}")

    vertices = doc.get("vertices")
    if not isinstance(vertices, list) or not vertices:
        raise InputError("\"vertices\" must be a nonempty list")
    seen = set()
    for i, name in enumerate(vertices):
        if not isinstance(name, str) or not name:
            raise InputError(f"vertices[{i}]: names must be nonempty strings")
        if name in seen:
            raise InputError(f"vertices[{i}]: duplicate vertex {name!r}")
        seen.add(name)

    for key in ("edges", "requirements"):
        if key in doc and not isinstance(doc[key], list):
            raise InputError(f"\"{key}\" must be a list")

    edges = []
    for i, item in enumerate(doc.get("edges", [])):
        u = _field(item, "u", f"edges[{i}]")
        v = _field(item, "v", f"edges[{i}]")
        cost = _field(item, "cost", f"edges[{i}]", keys=("u", "v", "cost"))
        for name in (u, v):
            if name not in seen:
                raise InputError(f"edges[{i}]: unknown vertex {name!r}")
        if u == v:
            raise InputError(f"edges[{i}]: self-loop at {u!r}")
        if isinstance(cost, bool) or not isinstance(cost, (int, float)):
            raise InputError(f"edges[{i}]: cost must be a number")
        if not (cost >= 0 and math.isfinite(cost)):
            raise InputError(f"edges[{i}]: cost must be finite and >= 0")
        edges.append((u, v, cost))

    triples = []
    for i, item in enumerate(doc.get("requirements", [])):
        u = _field(item, "u", f"requirements[{i}]")
        v = _field(item, "v", f"requirements[{i}]")
        r = _field(item, "r", f"requirements[{i}]", keys=("u", "v", "r"))
        for name in (u, v):
            if name not in seen:
                raise InputError(f"requirements[{i}]: unknown vertex {name!r}")
        if u == v:
            raise InputError(f"requirements[{i}]: self-requirement on {u!r}")
        triples.append((u, v, r))

    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise InputError("\"meta\" must be an object")

    graph = Graph(vertices, edges)
    try:
        demand = PairwiseRequirements(triples)
    except InputError as exc:
        raise InputError(f"requirements: {exc}") from None
    return graph, demand, meta


def _field(item, key, where, keys=None):
    if not isinstance(item, dict):
        raise InputError(f"{where}: must be an object")
    if keys is not None:
        unknown = sorted(set(item) - set(keys))
        if unknown:
            raise InputError(f"{where}: unknown keys: {', '.join(unknown)}")
    if key not in item:
        raise InputError(f"{where}: missing \"{key}\"")
    value = item[key]
    if key in ("u", "v") and not isinstance(value, str):
        raise InputError(f"{where}: \"{key}\" must be a vertex name")
    return value


def instance_document(graph, demand, meta=None):
    """The JSON-ready dict for a graph/requirements pair."""
    doc = {
        # Sorted: set iteration order changes with hash randomization.
        "vertices": sorted(graph.vertices),
        "edges": [
            {"u": graph.endpoints(e)[0], "v": graph.endpoints(e)[1],
             "cost": graph.cost(e)}
            for e in graph.edge_ids()
        ],
        "requirements": [
            {"u": u, "v": v, "r": r} for u, v, r in demand.pairs()
        ],
    }
    if meta:
        doc["meta"] = meta
    return doc


def format_instance(doc):
    """Canonical byte-stable serialization of an instance document."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def generate_instance(vertices, density, rmax, seed):
    """A reproducible random connected multigraph with demands.

    density is the extra-edge budget as a fraction of the complete
    graph on `vertices` nodes; a random spanning tree keeps the result
    connected regardless.  Costs are small ints, occasionally zero.
    Identical arguments always produce the identical document.
    """
    if not (isinstance(vertices, int) and vertices >= 2):
        raise InputError(f"need at least 2 vertices, got {vertices!r}")
    if not (isinstance(rmax, int) and rmax >= 0):
        raise InputError(f"rmax must be an int >= 0, got {rmax!r}")
    if not 0 <= density <= 1:
        raise InputError(f"density {density!r} outside [0, 1]")
    rng = random.Random(seed)
    width = len(str(vertices - 1))
    names = [f"v{i:0{width}d}" for i in range(vertices)]

    edges = []
    for i in range(1, vertices):
        edges.append((names[rng.randrange(i)], names[i]))
    # Extra edges fill distinct untouched pairs, so density 1 yields the
    # complete graph rather than a pile of parallels.
    used = {tuple(sorted(e)) for e in edges}
    open_pairs = sorted(
        (names[i], names[j])
        for i in range(vertices) for j in range(i + 1, vertices)
        if (names[i], names[j]) not in used
    )
    extra = max(0, round(density * vertices * (vertices - 1) / 2) - len(edges))
    edges.extend(rng.sample(open_pairs, min(extra, len(open_pairs))))
    edges = [(u, v, rng.randint(0, 20)) for u, v in edges]

    triples = []
    if rmax >= 1:
        for _ in range(max(1, round(0.75 * vertices))):
            i = rng.randrange(vertices)
            j = rng.randrange(vertices - 1)
            if j >= i:
                j += 1
            triples.append((names[i], names[j], rng.randint(1, rmax)))

    graph = Graph(names, edges)
    demand = PairwiseRequirements(triples)
    meta = {"seed": seed, "vertices": vertices, "density": density,
            "rmax": rmax}
    return instance_document(graph, demand, meta)


def random_connected_graph(rng, n, extra_edges, max_cost=12, zero_cost=0.0):
    """Small random multigraph for the self-check battery and tests."""
    width = len(str(n - 1))
    names = [f"n{i:0{width}d}" for i in range(n)]
    edges = []
    for i in range(1, n):
        edges.append((names[rng.randrange(i)], names[i]))
    for _ in range(extra_edges):
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        edges.append((names[i], names[j]))
    costed = []
    for u, v in edges:
        if zero_cost and rng.random() < zero_cost:
            costed.append((u, v, 0))
        else:
            costed.append((u, v, rng.randint(1, max_cost)))
    return Graph(names, costed)
