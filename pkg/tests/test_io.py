"""JSON serialization: lossless roundtrips, index-precise validation
errors, report payload hygiene."""

import json

import numpy as np
import pytest

from regulab import (
    InputError,
    SubgraphPair,
    WeightedGraph,
    dump_report,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    load_pair,
    load_partition,
    pair_from_dict,
    pair_to_dict,
    partition_from_dict,
    partition_to_dict,
    save_graph,
)
from regulab.io import SCHEMA_VERSION, json_safe

from _helpers import random_graph, random_subpair


# -- graph roundtrips ---------------------------------------------------------


@pytest.mark.parametrize("k", range(4))
def test_graph_roundtrip_is_exact(k, tmp_path):
    G = random_graph(200, k, 9)
    H = graph_from_dict(graph_to_dict(G))
    assert H.n == G.n
    assert np.array_equal(H.mu, G.mu)
    assert np.array_equal(H.rho, G.rho)
    path = tmp_path / "g.json"
    save_graph(G, path)
    L = load_graph(path)
    assert np.array_equal(L.mu, G.mu) and np.array_equal(L.rho, G.rho)


def test_graph_dict_ignores_unknown_keys():
    d = graph_to_dict(random_graph(201, 0, 5))
    d["note"] = {"anything": [1, 2]}
    graph_from_dict(d)  # no error


def test_save_graph_extra_metadata(tmp_path):
    G = random_graph(201, 1, 5)
    path = tmp_path / "g.json"
    save_graph(G, path, extra={"model": {"kind": "test"}})
    data = json.loads(path.read_text())
    assert data["model"] == {"kind": "test"}
    with pytest.raises(InputError, match="collides"):
        save_graph(G, path, extra={"edges": []})


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.update(n="five"), "'n' must be a positive integer"),
        (lambda d: d.pop("mu"), "missing key 'mu'"),
        (lambda d: d["mu"].__setitem__(2, -1.0), r"mu\[2\].*positive finite"),
        (lambda d: d["mu"].__setitem__(0, True), r"mu\[0\]"),
        (lambda d: d["edges"].__setitem__(1, [0, 1]), r"edges\[1\].*expected \[u, v, rho\]"),
        (lambda d: d["edges"].__setitem__(0, [0.5, 1, 1.0]), r"edges\[0\].*integers"),
        (lambda d: d["edges"].append([0, 9, 1.0]), r"edges\[2\].*0 <= u < v < n"),
        (lambda d: d.update(mu=[1.0, 1.0]), "'mu' has 2 entries"),
    ],
)
def test_graph_errors_cite_the_offending_entry(mutate, message):
    d = {"n": 5, "mu": [1.0] * 5, "edges": [[0, 1, 1.0], [2, 3, 2.0]]}
    mutate(d)
    with pytest.raises(InputError, match=message):
        graph_from_dict(d)


def test_load_rejects_malformed_json_and_missing_files(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 3,')
    with pytest.raises(InputError, match="invalid JSON at line"):
        load_graph(path)
    with pytest.raises(InputError, match="cannot read"):
        load_graph(tmp_path / "absent.json")


# -- pair files ---------------------------------------------------------------


@pytest.mark.parametrize("k", range(3))
def test_pair_roundtrip(k, tmp_path):
    P = random_subpair(202, k, 8)
    d = pair_to_dict(P, A=[0, 1, 2], B=[5, 6])
    Q, A, B = pair_from_dict(d)
    assert np.array_equal(Q.f_mask, P.f_mask)
    assert np.array_equal(Q.graph.rho, P.graph.rho)
    assert A == [0, 1, 2] and B == [5, 6]
    path = tmp_path / "p.json"
    path.write_text(json.dumps(d))
    Q2, A2, B2 = load_pair(path)
    assert np.array_equal(Q2.f_mask, P.f_mask) and (A2, B2) == (A, B)


def test_pair_sides_are_optional():
    P = random_subpair(202, 3, 6)
    _, A, B = pair_from_dict(pair_to_dict(P))
    assert A is None and B is None


def test_pair_errors():
    P = random_subpair(202, 4, 6)
    d = pair_to_dict(P)
    d.pop("f_edges")
    with pytest.raises(InputError, match="missing key 'f_edges'"):
        pair_from_dict(d)
    d = pair_to_dict(P)
    d["f_edges"] = [[0, 1, 2]]
    with pytest.raises(InputError, match=r"f_edges\[0\].*expected \[u, v\]"):
        pair_from_dict(d)
    d = pair_to_dict(P)
    d["A"] = [0, "x"]
    with pytest.raises(InputError, match=r"A\[1\].*integer"):
        pair_from_dict(d)
    d = pair_to_dict(P)
    d["B"] = [99]
    with pytest.raises(InputError, match="lie in"):
        pair_from_dict(d)


def test_pair_f_edges_must_be_host_edges():
    G = WeightedGraph.from_edges(3, np.ones(3), [(0, 1, 1.0)])
    d = graph_to_dict(G)
    d["f_edges"] = [[0, 2]]
    with pytest.raises(InputError, match="not an edge"):
        pair_from_dict(d)


# -- partitions ----------------------------------------------------------------


def test_partition_roundtrip():
    w0, clusters = [4], [[0, 1], [2, 3]]
    d = partition_to_dict(w0, clusters)
    assert d == {"clusters": [[4], [0, 1], [2, 3]]}
    rw0, rclusters = partition_from_dict(d, 5)
    assert rw0 == w0 and rclusters == clusters


def test_partition_w0_may_be_empty_but_clusters_not():
    rw0, rclusters = partition_from_dict({"clusters": [[], [0, 1]]}, 2)
    assert rw0 == [] and rclusters == [[0, 1]]
    with pytest.raises(InputError, match=r"clusters\[1\].*nonempty"):
        partition_from_dict({"clusters": [[0, 1], []]}, 2)


@pytest.mark.parametrize(
    "data, n, message",
    [
        ({"clusters": [[0], [1], [1]]}, 2, r"clusters\[2\]\[0\].*appears twice"),
        ({"clusters": [[0], [5]]}, 2, r"clusters\[1\]\[0\].*out of range"),
        ({"clusters": [[0]]}, 2, "covers 1 of 2"),
        ({"clusters": "x"}, 2, "'clusters' must be a nonempty list"),
        ({}, 2, "missing key 'clusters'"),
        ([], 2, "expected a JSON object"),
    ],
)
def test_partition_errors(data, n, message):
    with pytest.raises(InputError, match=message):
        partition_from_dict(data, n)


def test_load_partition(tmp_path):
    path = tmp_path / "part.json"
    path.write_text(json.dumps({"clusters": [[], [0], [1, 2]]}))
    w0, clusters = load_partition(path, 3)
    assert w0 == [] and clusters == [[0], [1, 2]]


# -- reports --------------------------------------------------------------------


def test_json_safe_handles_numpy_and_nonfinite():
    payload = {
        "a": np.int64(3),
        "b": np.float64(0.5),
        "c": np.array([1.0, 2.0]),
        "d": (np.bool_(True), float("inf"), float("-inf"), float("nan")),
        5: "key becomes string",
    }
    safe = json_safe(payload)
    assert safe == {
        "a": 3,
        "b": 0.5,
        "c": [1.0, 2.0],
        "d": [True, "inf", "-inf", "nan"],
        "5": "key becomes string",
    }
    json.dumps(safe)  # strict JSON


def test_dump_report_schema_and_timestamp_control():
    report = {"x": 1, "nested": {"v": np.float64(2.5)}}
    with_ts = json.loads(dump_report(report))
    assert with_ts["schema_version"] == SCHEMA_VERSION
    assert "generated_at" in with_ts
    text_a = dump_report(report, timestamp=False)
    text_b = dump_report(report, timestamp=False)
    assert text_a == text_b  # byte-stable without the timestamp
    assert "generated_at" not in json.loads(text_a)
