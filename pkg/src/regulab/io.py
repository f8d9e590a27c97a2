"""JSON serialization for graphs, subgraph pairs, partitions, and reports.

Graph files look like

    {"n": 5, "mu": [1.0, 1.0, 1.0, 1.0, 1.0],
     "edges": [[0, 1, 2.5], [0, 2, 2.5]]}

with 0-based endpoints, u < v, no duplicates.  Pair files add
``f_edges`` (subgraph edges, weightless) and optionally ``A``/``B``
(vertex lists).  Partition files are ``{"clusters": [[...], ...]}`` with
cluster 0 playing the role of the exceptional set W0.  Validation
errors cite the offending entry by index.  Unknown top-level keys are
ignored so files may carry extra metadata (for example part labels).
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .core import InputError, SubgraphPair, WeightedGraph, index_array

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "graph_to_dict",
    "graph_from_dict",
    "save_graph",
    "load_graph",
    "pair_to_dict",
    "pair_from_dict",
    "load_pair",
    "partition_to_dict",
    "partition_from_dict",
    "load_partition",
    "json_safe",
    "dump_report",
]


# -- graphs --------------------------------------------------------------


def graph_to_dict(G: WeightedGraph) -> dict[str, Any]:
    return {
        "n": G.n,
        "mu": [float(x) for x in G.mu],
        "edges": [[u, v, w] for u, v, w in G.edge_list()],
    }


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InputError(message)


def graph_from_dict(data: Any) -> WeightedGraph:
    _require(isinstance(data, dict), "graph: expected a JSON object")
    _require("n" in data, "graph: missing key 'n'")
    n = data["n"]
    _require(isinstance(n, int) and not isinstance(n, bool) and n >= 1,
             f"graph: 'n' must be a positive integer, got {n!r}")
    _require("mu" in data, "graph: missing key 'mu'")
    mu = data["mu"]
    _require(isinstance(mu, list), "graph: 'mu' must be a list")
    _require(len(mu) == n, f"graph: 'mu' has {len(mu)} entries, expected n={n}")
    for i, x in enumerate(mu):
        _require(isinstance(x, (int, float)) and not isinstance(x, bool)
                 and math.isfinite(x) and x > 0,
                 f"mu[{i}]: vertex weight must be a positive finite number, got {x!r}")
    _require("edges" in data, "graph: missing key 'edges'")
    edges = data["edges"]
    _require(isinstance(edges, list), "graph: 'edges' must be a list")
    parsed = []
    for k, e in enumerate(edges):
        _require(isinstance(e, list) and len(e) == 3,
                 f"edges[{k}]: expected [u, v, rho]")
        u, v, w = e
        _require(isinstance(u, int) and isinstance(v, int)
                 and not isinstance(u, bool) and not isinstance(v, bool),
                 f"edges[{k}]: endpoints must be integers")
        _require(isinstance(w, (int, float)) and not isinstance(w, bool),
                 f"edges[{k}]: weight must be a number")
        parsed.append((u, v, float(w)))
    return WeightedGraph.from_edges(n, np.asarray(mu, dtype=np.float64), parsed)


def save_graph(G: WeightedGraph, path: str | Path, extra: dict[str, Any] | None = None) -> None:
    payload = graph_to_dict(G)
    if extra:
        for key in extra:
            _require(key not in payload, f"extra metadata key {key!r} collides with graph schema")
        payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_graph(path: str | Path) -> WeightedGraph:
    return graph_from_dict(_read_json(path))


def _read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


# -- subgraph pairs ------------------------------------------------------


def pair_to_dict(
    P: SubgraphPair,
    A: list[int] | None = None,
    B: list[int] | None = None,
) -> dict[str, Any]:
    payload = graph_to_dict(P.graph)
    payload["f_edges"] = [[u, v] for u, v in P.f_edge_list()]
    if A is not None:
        payload["A"] = [int(x) for x in A]
    if B is not None:
        payload["B"] = [int(x) for x in B]
    return payload


def pair_from_dict(data: Any) -> tuple[SubgraphPair, list[int] | None, list[int] | None]:
    G = graph_from_dict(data)
    _require("f_edges" in data, "pair: missing key 'f_edges'")
    f_edges = data["f_edges"]
    _require(isinstance(f_edges, list), "pair: 'f_edges' must be a list")
    parsed = []
    for k, e in enumerate(f_edges):
        _require(isinstance(e, list) and len(e) == 2, f"f_edges[{k}]: expected [u, v]")
        u, v = e
        _require(isinstance(u, int) and isinstance(v, int),
                 f"f_edges[{k}]: endpoints must be integers")
        parsed.append((u, v))
    try:
        pair = SubgraphPair.from_edges(G, parsed)
    except InputError as exc:
        raise InputError(f"pair: {exc}") from exc
    sides: list[list[int] | None] = []
    for key in ("A", "B"):
        if key not in data:
            sides.append(None)
            continue
        side = data[key]
        _require(isinstance(side, list), f"pair: '{key}' must be a list of vertices")
        for i, x in enumerate(side):
            _require(isinstance(x, int) and not isinstance(x, bool),
                     f"{key}[{i}]: vertex must be an integer")
        index_array(G.n, side, key)  # range check
        sides.append([int(x) for x in side])
    return pair, sides[0], sides[1]


def load_pair(path: str | Path) -> tuple[SubgraphPair, list[int] | None, list[int] | None]:
    return pair_from_dict(_read_json(path))


# -- partitions ----------------------------------------------------------


def partition_to_dict(w0: list[int], clusters: list[list[int]]) -> dict[str, Any]:
    return {"clusters": [[int(x) for x in w0]] + [[int(x) for x in c] for c in clusters]}


def partition_from_dict(data: Any, n: int) -> tuple[list[int], list[list[int]]]:
    _require(isinstance(data, dict), "partition: expected a JSON object")
    _require("clusters" in data, "partition: missing key 'clusters'")
    clusters = data["clusters"]
    _require(isinstance(clusters, list) and len(clusters) >= 1,
             "partition: 'clusters' must be a nonempty list (entry 0 is W0)")
    seen: set[int] = set()
    out: list[list[int]] = []
    for i, cluster in enumerate(clusters):
        _require(isinstance(cluster, list), f"clusters[{i}]: expected a list of vertices")
        for j, x in enumerate(cluster):
            _require(isinstance(x, int) and not isinstance(x, bool),
                     f"clusters[{i}][{j}]: vertex must be an integer")
            _require(0 <= x < n, f"clusters[{i}][{j}]: vertex {x} out of range [0, {n})")
            _require(x not in seen, f"clusters[{i}][{j}]: vertex {x} appears twice")
            seen.add(x)
        _require(i == 0 or len(cluster) > 0, f"clusters[{i}]: clusters other than W0 must be nonempty")
        out.append([int(x) for x in cluster])
    _require(len(seen) == n, f"partition: covers {len(seen)} of {n} vertices")
    return out[0], out[1:]


def load_partition(path: str | Path, n: int) -> tuple[list[int], list[list[int]]]:
    return partition_from_dict(_read_json(path), n)


# -- reports -------------------------------------------------------------


def json_safe(obj: Any) -> Any:
    """Recursively convert report payloads to plain JSON types.

    Non-finite floats become strings so reports stay strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dump_report(report: dict[str, Any], *, timestamp: bool = True) -> str:
    payload = {"schema_version": SCHEMA_VERSION}
    payload.update(json_safe(report))
    if timestamp:
        payload["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
