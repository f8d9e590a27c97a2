"""Weighted epsilon-regular pairs and partitions.

For a spanning subgraph F of a host G, disjoint A and B form a weighted
epsilon-regular pair when every A' in A, B' in B with mu(A') >=
eps * mu(A) and mu(B') >= eps * mu(B) satisfies

    | d_F(A', B') - d_F(A, B) | < eps,      d_F = rho_F / (mu mu),

and a partition W0, W1, ..., Wl is weighted epsilon-regular when W0 is
light (mu(W0) <= eps mu(V)), the other clusters are balanced up to one
vertex mass, and all but at most eps * l^2 of the unordered cluster
pairs are regular.  With unit weights on a complete bipartite host the
pair condition collapses to the classical edge-density one, which is how
``classical_epsilon_regular`` is implemented; mass floors are inclusive
(>=) throughout, which only differs from a strict reading at exact
threshold ties.  Exhaustive mode certifies verdicts below a size cap;
search mode hill-climbs for violating witnesses.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ._enumerate import (
    SUBSET_PAIR_CAP_DEFAULT,
    check_subset_pair_cap,
    decode_subset,
    scan_subset_pairs,
)
from ._search import pair_witness_search
from .core import (
    FLOAT_TOL,
    HeavyVertexWarning,
    InputError,
    SubgraphPair,
    WeightedGraph,
    index_array,
    mu_sum,
    rho_sum,
    weighted_density,
)

__all__ = [
    "PairRegularityVerdict",
    "PartitionCheckReport",
    "check_pair",
    "check_pair_exhaustive",
    "check_pair_search",
    "check_partition",
    "classical_epsilon_regular",
    "relative_regularity",
]


@dataclass(frozen=True)
class PairRegularityVerdict:
    """Outcome of a pair regularity check.

    ``worst_witness`` holds the sub-pair (as vertex tuples) achieving
    ``worst_deviation``.  ``certified`` follows the usual rule:
    exhaustive verdicts always, search verdicts only when a violation
    was found.  ``form`` records which density notion was checked
    (weighted, classical, or relative edge-ratio).
    """

    epsilon: float
    passed: bool
    mode: str
    certified: bool
    base_density: float
    worst_deviation: float | None
    worst_witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    vacuous: bool = False
    n_qualifying: int | None = None
    form: str = "weighted"
    threshold: float | None = None

    def deviation_bound(self) -> float:
        """What worst_deviation is compared against (epsilon unless the
        form rescales deviations, as the volume form does)."""
        return self.epsilon if self.threshold is None else self.threshold

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "passed": self.passed,
            "mode": self.mode,
            "certified": self.certified,
            "form": self.form,
            "base_density": self.base_density,
            "worst_deviation": self.worst_deviation,
            "threshold": self.deviation_bound(),
            "worst_witness": None if self.worst_witness is None
            else {"A": list(self.worst_witness[0]), "B": list(self.worst_witness[1])},
            "vacuous": self.vacuous,
            "n_qualifying": self.n_qualifying,
        }


def _pair_sides(
    P: SubgraphPair, A: Iterable[int], B: Iterable[int], eps: float
) -> tuple[np.ndarray, np.ndarray]:
    if not (0.0 < eps < 1.0):
        raise InputError(f"epsilon must lie in (0, 1), got {eps}")
    n = P.graph.n
    a = index_array(n, A, "A")
    b = index_array(n, B, "B")
    if not a.size or not b.size:
        raise InputError("pair sides must be nonempty")
    if np.intersect1d(a, b).size:
        raise InputError("pair sides must be disjoint")
    return a, b


def check_pair_exhaustive(
    P: SubgraphPair,
    A: Iterable[int],
    B: Iterable[int],
    eps: float,
    *,
    cap: int = SUBSET_PAIR_CAP_DEFAULT,
) -> PairRegularityVerdict:
    """Certified verdict by enumerating all qualifying sub-pairs."""
    a, b = _pair_sides(P, A, B, eps)
    check_subset_pair_cap(a.size, b.size, cap)
    base = weighted_density(P, a, b)
    wa = P.graph.mu[a]
    wb = P.graph.mu[b]
    cross = P.rho_f[np.ix_(a, b)]

    def deviation(tables, wx, wy):
        return np.abs(tables[0] / (wx * wy) - base)

    scan = scan_subset_pairs(
        [cross], wa, wb, eps * wa.sum(), eps * wb.sum(), deviation
    )
    if scan.vacuous:
        return PairRegularityVerdict(
            epsilon=eps, passed=True, mode="exhaustive", certified=True,
            base_density=base, worst_deviation=None, worst_witness=None,
            vacuous=True, n_qualifying=0,
        )
    wit_a = tuple(int(a[i]) for i in decode_subset(scan.best_a_index, a.size))
    wit_b = tuple(int(b[i]) for i in decode_subset(scan.best_b_index, b.size))
    worst = float(scan.best_value)
    return PairRegularityVerdict(
        epsilon=eps, passed=bool(worst < eps), mode="exhaustive", certified=True,
        base_density=base, worst_deviation=worst, worst_witness=(wit_a, wit_b),
        vacuous=False, n_qualifying=scan.n_qualifying,
    )


def check_pair_search(
    P: SubgraphPair,
    A: Iterable[int],
    B: Iterable[int],
    eps: float,
    *,
    seed: int,
    restarts: int = 64,
) -> PairRegularityVerdict:
    """Witness search for a violating sub-pair (non-certificate on pass)."""
    a, b = _pair_sides(P, A, B, eps)
    base = weighted_density(P, a, b)
    wa = P.graph.mu[a]
    wb = P.graph.mu[b]
    if a.size == 1 and b.size == 1:
        # the only qualifying sub-pair is the pair itself
        return PairRegularityVerdict(
            epsilon=eps, passed=True, mode="search", certified=True,
            base_density=base, worst_deviation=0.0,
            worst_witness=(tuple(int(v) for v in a), tuple(int(v) for v in b)),
            vacuous=False, n_qualifying=1,
        )
    cross = P.rho_f[np.ix_(a, b)]

    def objective(t, wx, wy):
        return np.abs(t / (wx * wy) - base)

    best = pair_witness_search(
        cross, wa, wb, eps * wa.sum(), eps * wb.sum(), objective,
        seed=seed, restarts=restarts,
    )
    if best.x is None:
        return PairRegularityVerdict(
            epsilon=eps, passed=True, mode="search", certified=False,
            base_density=base, worst_deviation=None, worst_witness=None,
            vacuous=True, n_qualifying=None,
        )
    worst = float(best.value)
    passed = bool(worst < eps)
    wit_a = tuple(int(a[i]) for i in best.x)
    wit_b = tuple(int(b[i]) for i in best.y)
    return PairRegularityVerdict(
        epsilon=eps, passed=passed, mode="search", certified=not passed,
        base_density=base, worst_deviation=worst, worst_witness=(wit_a, wit_b),
        vacuous=False, n_qualifying=None,
    )


def check_pair(
    P: SubgraphPair,
    A: Iterable[int],
    B: Iterable[int],
    eps: float,
    *,
    mode: str = "auto",
    seed: int = 0,
    restarts: int = 64,
    cap: int = SUBSET_PAIR_CAP_DEFAULT,
) -> PairRegularityVerdict:
    if mode not in ("auto", "exhaustive", "search"):
        raise InputError(f"unknown mode {mode!r}")
    if mode == "exhaustive":
        return check_pair_exhaustive(P, A, B, eps, cap=cap)
    if mode == "auto":
        a = index_array(P.graph.n, A, "A")
        b = index_array(P.graph.n, B, "B")
        if a.size + b.size <= cap:
            return check_pair_exhaustive(P, A, B, eps, cap=cap)
    return check_pair_search(P, A, B, eps, seed=seed, restarts=restarts)


# -- partitions ----------------------------------------------------------


@dataclass
class PartitionCheckReport:
    """Machine check of the three partition requirements."""

    passed: bool
    epsilon: float
    n_clusters: int
    w0_mass: float
    w0_bound: float
    w0_ok: bool
    balance_gap: float
    balance_bound: float
    balance_ok: bool
    n_pairs: int
    n_irregular: int
    irregular_bound: float
    pairs_ok: bool
    irregular_pairs: list[tuple[int, int]] = field(default_factory=list)
    pair_verdicts: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "epsilon": self.epsilon,
            "n_clusters": self.n_clusters,
            "w0": {"mass": self.w0_mass, "bound": self.w0_bound, "ok": self.w0_ok},
            "balance": {"gap": self.balance_gap, "bound": self.balance_bound,
                        "ok": self.balance_ok},
            "pairs": {"total": self.n_pairs, "irregular": self.n_irregular,
                      "bound": self.irregular_bound, "ok": self.pairs_ok,
                      "irregular_pairs": [list(p) for p in self.irregular_pairs]},
            "pair_verdicts": self.pair_verdicts,
        }


def _validate_partition(
    G: WeightedGraph, w0: Iterable[int], clusters: list
) -> tuple[np.ndarray, list[np.ndarray]]:
    w0_idx = index_array(G.n, w0, "W0")
    cluster_idx = [index_array(G.n, c, f"W{i + 1}") for i, c in enumerate(clusters)]
    counts = np.zeros(G.n, dtype=np.int64)
    counts[w0_idx] += 1
    for c in cluster_idx:
        if c.size == 0:
            raise InputError("clusters other than W0 must be nonempty")
        counts[c] += 1
    if np.any(counts != 1):
        missing = int(np.count_nonzero(counts == 0))
        doubled = int(np.count_nonzero(counts > 1))
        raise InputError(
            f"partition must cover every vertex exactly once "
            f"({missing} missing, {doubled} repeated)"
        )
    return w0_idx, cluster_idx


def check_partition(
    P: SubgraphPair,
    w0: Iterable[int],
    clusters: list,
    eps: float,
    *,
    mode: str = "auto",
    seed: int = 0,
    restarts: int = 64,
    cap: int = SUBSET_PAIR_CAP_DEFAULT,
) -> PartitionCheckReport:
    """Check the light-W0, balance, and pair-regularity requirements.

    The pair budget is eps * l^2 over the l*(l-1)/2 unordered cluster
    pairs, as stated.  Per-pair verdicts follow ``check_pair`` in the
    requested mode, so with search mode the irregular count is a lower
    bound (only found violations count as irregular).
    """
    if not (0.0 < eps < 1.0):
        raise InputError(f"epsilon must lie in (0, 1), got {eps}")
    G = P.graph
    w0_idx, cluster_idx = _validate_partition(G, w0, clusters)
    ell = len(cluster_idx)
    if ell < 1:
        raise InputError("need at least one cluster besides W0")
    w0_mass = float(G.mu[w0_idx].sum()) if w0_idx.size else 0.0
    w0_bound = eps * G.mu_total
    w0_ok = w0_mass <= w0_bound + FLOAT_TOL
    masses = np.array([G.mu[c].sum() for c in cluster_idx])
    balance_gap = float(masses.max() - masses.min())
    balance_bound = float(G.mu.max())
    balance_ok = balance_gap <= balance_bound + FLOAT_TOL

    irregular: list[tuple[int, int]] = []
    verdicts: list[dict] = []
    k = 0
    for i in range(ell):
        for j in range(i + 1, ell):
            v = check_pair(
                P, cluster_idx[i], cluster_idx[j], eps,
                mode=mode, seed=seed + k, restarts=restarts, cap=cap,
            )
            k += 1
            verdicts.append({
                "i": i + 1, "j": j + 1, "passed": v.passed,
                "worst_deviation": v.worst_deviation, "certified": v.certified,
            })
            if not v.passed:
                irregular.append((i + 1, j + 1))
    n_pairs = ell * (ell - 1) // 2
    irregular_bound = eps * ell * ell
    pairs_ok = len(irregular) <= irregular_bound + FLOAT_TOL
    return PartitionCheckReport(
        passed=bool(w0_ok and balance_ok and pairs_ok),
        epsilon=eps, n_clusters=ell,
        w0_mass=w0_mass, w0_bound=w0_bound, w0_ok=bool(w0_ok),
        balance_gap=balance_gap, balance_bound=balance_bound,
        balance_ok=bool(balance_ok),
        n_pairs=n_pairs, n_irregular=len(irregular),
        irregular_bound=irregular_bound, pairs_ok=bool(pairs_ok),
        irregular_pairs=irregular, pair_verdicts=verdicts,
    )


# -- classical and relative forms -----------------------------------------


def _bipartite_host(a_size: int, b_size: int) -> WeightedGraph:
    if a_size < 1 or b_size < 1:
        raise InputError("both sides need at least one vertex")
    n = a_size + b_size
    rho = np.zeros((n, n))
    rho[:a_size, a_size:] = 1.0
    rho[a_size:, :a_size] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HeavyVertexWarning)
        return WeightedGraph(n=n, mu=np.ones(n), rho=rho)


def classical_epsilon_regular(
    a_size: int,
    b_size: int,
    f_edges: Iterable[tuple[int, int]],
    eps: float,
    *,
    mode: str = "auto",
    seed: int = 0,
    restarts: int = 64,
    cap: int = SUBSET_PAIR_CAP_DEFAULT,
) -> PairRegularityVerdict:
    """Classical bipartite epsilon-regularity via the weighted checker.

    ``f_edges`` are (i, j) with i indexing side A and j side B, both
    0-based locally.  Unit weights on the complete bipartite host make
    the weighted density equal e(A', B') / (|A'| |B'|), so the weighted
    verdict is the classical one.  Witnesses come back in local
    (A-side, B-side) indices.
    """
    host = _bipartite_host(a_size, b_size)
    edges = []
    for k, (i, j) in enumerate(f_edges):
        if not (0 <= i < a_size and 0 <= j < b_size):
            raise InputError(f"f_edges[{k}]: ({i}, {j}) outside sides {a_size}x{b_size}")
        edges.append((i, a_size + j))
    pair = SubgraphPair.from_edges(host, edges)
    v = check_pair(
        pair, range(a_size), range(a_size, a_size + b_size), eps,
        mode=mode, seed=seed, restarts=restarts, cap=cap,
    )
    witness = None
    if v.worst_witness is not None:
        witness = (
            v.worst_witness[0],
            tuple(x - a_size for x in v.worst_witness[1]),
        )
    return PairRegularityVerdict(
        epsilon=v.epsilon, passed=v.passed, mode=v.mode, certified=v.certified,
        base_density=v.base_density, worst_deviation=v.worst_deviation,
        worst_witness=witness, vacuous=v.vacuous, n_qualifying=v.n_qualifying,
        form="classical",
    )


def relative_regularity(
    a_size: int,
    b_size: int,
    f_edges: Iterable[tuple[int, int]],
    g_edges: Iterable[tuple[int, int]],
    eps: float,
    *,
    cap: int = SUBSET_PAIR_CAP_DEFAULT,
) -> PairRegularityVerdict:
    """Relative form: compare e_F(A', B') / e_G(A', B') to the base ratio.

    Exhaustive only.  Sub-pairs spanning no G-edge carry no relative
    density and are skipped.  Size floors are |A'| >= eps |A| and
    |B'| >= eps |B|.
    """
    if not (0.0 < eps < 1.0):
        raise InputError(f"epsilon must lie in (0, 1), got {eps}")
    check_subset_pair_cap(a_size, b_size, cap)
    f_mat = np.zeros((a_size, b_size))
    g_mat = np.zeros((a_size, b_size))
    g_set = set()
    for k, (i, j) in enumerate(g_edges):
        if not (0 <= i < a_size and 0 <= j < b_size):
            raise InputError(f"g_edges[{k}]: ({i}, {j}) outside sides {a_size}x{b_size}")
        g_mat[i, j] = 1.0
        g_set.add((i, j))
    for k, (i, j) in enumerate(f_edges):
        if (i, j) not in g_set:
            raise InputError(f"f_edges[{k}]: ({i}, {j}) is not an edge of G")
        f_mat[i, j] = 1.0
    total_g = g_mat.sum()
    if total_g == 0:
        raise InputError("relative regularity needs at least one G-edge between the sides")
    base = float(f_mat.sum() / total_g)

    def deviation(tables, wx, wy):
        tf, tg = tables
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = tf / tg
        return np.where(tg > 0, np.abs(ratio - base), -np.inf)

    ones_a = np.ones(a_size)
    ones_b = np.ones(b_size)
    scan = scan_subset_pairs(
        [f_mat, g_mat], ones_a, ones_b, eps * a_size, eps * b_size, deviation
    )
    if scan.vacuous or not np.isfinite(scan.best_value):
        return PairRegularityVerdict(
            epsilon=eps, passed=True, mode="exhaustive", certified=True,
            base_density=base, worst_deviation=None, worst_witness=None,
            vacuous=True, n_qualifying=scan.n_qualifying, form="relative",
        )
    worst = float(scan.best_value)
    witness = (
        decode_subset(scan.best_a_index, a_size),
        decode_subset(scan.best_b_index, b_size),
    )
    return PairRegularityVerdict(
        epsilon=eps, passed=bool(worst < eps), mode="exhaustive", certified=True,
        base_density=base, worst_deviation=worst, worst_witness=witness,
        vacuous=False, n_qualifying=scan.n_qualifying, form="relative",
    )
