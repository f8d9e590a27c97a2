"""Worked examples exercising the model zoo end to end.

Each demo returns a JSON-ready dict so the command line can print it
and the test suite can pin the numbers.
"""

from __future__ import annotations

import warnings
from math import comb

import numpy as np

from .core import (
    SubgraphPair,
    global_density,
    weighted_density,
)
from .models import (
    check_volume_pair,
    concentration_test,
    gen_gnpij,
    make_counterexample,
    make_star,
    volume_density,
    ProbMatrixSpec,
)
from .quasirandom import ScaleWarning, check_quasirandom
from .regularity import check_pair

__all__ = ["star_demo", "counterexample_demo", "concentration_demo"]


def star_demo(n: int = 8, *, beta: float = 0.1, D: float = 2.0, eps: float = 0.3) -> dict:
    """The star shows constant-density regularity without quasirandomness.

    The (hub, leaves) pair has the same density on every qualifying
    sub-pair, so it is regular at any eps; yet leaf pairs carry no
    weight at all, which a ratio check rejects, and the global density
    n (n - 1) is far from scale 1.
    """
    star = make_star(n)
    hub = [0]
    leaves = list(range(1, n))
    pair = SubgraphPair.full(star)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ScaleWarning)
        beta_verdict = check_quasirandom(star, beta)
        ratio_verdict = check_quasirandom(star, beta, D=D)
    return {
        "demo": "star",
        "n": n,
        "global_density": global_density(star),
        "scale_warning": any(issubclass(w.category, ScaleWarning) for w in caught),
        "hub_leaves_density": weighted_density(star, hub, leaves),
        "hub_leaves": check_pair(pair, hub, leaves, eps).to_dict(),
        "quasirandom_beta": beta_verdict.to_dict(),
        "quasirandom_ratio": ratio_verdict.to_dict(),
    }


def counterexample_demo(
    n: int = 400,
    seed: int = 0,
    *,
    eps_volume: float = 0.05,
    eps_weighted: float = 0.25,
) -> dict:
    """Edge-count irregularity vanishing under reciprocal edge weights.

    Volume reading: within the bipartition (A, B) the sparse random
    corner (A2, B2) is a qualifying sub-pair whose volume density falls
    far below the pair's, so (A, B) fails volume regularity at
    eps_volume.  Weighted reading: weighting sampled edges by sqrt(n)
    gives all four quarter pairs density about 1, matching the base
    density, so no structural block pair deviates by eps_weighted.  The
    free witness search over the weighted pair is reported as well; on
    the random corner it chases sampling noise inflated by the sqrt(n)
    weights, so its deviation is informational rather than a block
    statement.
    """
    ce = make_counterexample(n, seed)
    parts = ce.parts
    adj = ce.adjacency()
    deg = adj.sum(axis=1)
    vol_v = float(deg.sum())

    def vol(name: str) -> float:
        return float(deg[list(parts[name])].sum())

    e_sub = float(adj[np.ix_(parts["A2"], parts["B2"])].sum())
    e_pair = float(adj[np.ix_(parts["A"], parts["B"])].sum())
    d_sub = volume_density(n, ce.edges, parts["A2"], parts["B2"])
    d_pair = volume_density(n, ce.edges, parts["A"], parts["B"])
    # the sparse corner has far fewer edges than its volume share
    # predicts; the tolerance uses the parent volumes
    expected_sub = e_pair * vol("A2") * vol("B2") / (vol("A") * vol("B"))
    cleared_dev = abs(e_sub - expected_sub)
    cleared_threshold = eps_volume * vol("A") * vol("B") / vol_v
    volume_search = check_volume_pair(
        n, ce.edges, parts["A"], parts["B"], eps_volume,
        mode="search", seed=seed,
    )

    recip = ce.reciprocal_graph()
    recip_pair = SubgraphPair.full(recip)
    blocks = {}
    worst_block = 0.0
    base = weighted_density(recip, parts["A"], parts["B"])
    for i in ("A1", "A2"):
        for j in ("B1", "B2"):
            d = weighted_density(recip, parts[i], parts[j])
            blocks[f"{i}x{j}"] = d
            worst_block = max(worst_block, abs(d - base))
    search_verdict = check_pair(
        recip_pair, parts["A"], parts["B"], eps_weighted, mode="search", seed=seed
    )
    return {
        "demo": "counterexample",
        "n": n,
        "seed": seed,
        "p_random": ce.p_random,
        "n_random_edges": len(ce.random_edges),
        "volume": {
            "eps": eps_volume,
            "pair_density": d_pair,
            "sub_density": d_sub,
            "edges_sub": e_sub,
            "expected_edges_sub": expected_sub,
            "deviation": cleared_dev,
            "threshold": cleared_threshold,
            "margin": cleared_dev - cleared_threshold,
            "violates": bool(cleared_dev >= cleared_threshold),
            "search_verdict": volume_search.to_dict(),
        },
        "weighted": {
            "eps": eps_weighted,
            "base_density": base,
            "block_densities": blocks,
            "worst_block_deviation": worst_block,
            "block_margin": eps_weighted - worst_block,
            "block_violation": bool(worst_block >= eps_weighted),
            "search_verdict": search_verdict.to_dict(),
        },
    }


def concentration_demo(
    n: int = 1000,
    seed: int = 7,
    *,
    beta: float = 0.1,
    low: float = 0.1,
    high: float = 0.9,
    n_samples: int = 200,
) -> dict:
    """Inverse-probability weights concentrate pair weights near |A||B|."""
    spec = ProbMatrixSpec.uniform(low, high)
    G = gen_gnpij(n, spec, seed)
    report = concentration_test(G, beta, seed=seed, n_samples=n_samples)
    total_rel_dev = abs(G.rho_total - comb(n, 2)) / comb(n, 2)
    return {
        "demo": "concentration",
        "n": n,
        "seed": seed,
        "spec": {"kind": "uniform", "low": low, "high": high},
        "edge_count": G.edge_count,
        "total_weight_relative_deviation": total_rel_dev,
        "concentration": report.to_dict(),
    }
