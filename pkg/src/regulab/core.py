"""Weighted graph primitives.

A graph on vertices 0..n-1 carries strictly positive vertex weights
``mu`` and strictly positive edge weights ``rho``; vertex pairs that are
not edges weigh zero.  Set masses, pair densities, and an inner product
on symmetric pair functions are all expressed through the two weight
systems:

    rho(A, B)   = sum over u in A, v in B of rho(u, v) (ordered pairs,
                  so rho(V, V) counts every edge twice),
    d(A, B)     = rho(A, B) / (mu(A) * mu(B))  for disjoint A, B,
    <g, h>      = (1 / C(n,2)) * sum over unordered pairs of
                  g(u,v) * h(u,v) * rho(u,v).

``normalize`` rescales weights so that mu(V) = n and the all-ones pair
function has unit norm (total unordered edge weight C(n,2)); every
downstream check assumes that convention unless noted.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

FLOAT_TOL = 1e-9

__all__ = [
    "FLOAT_TOL",
    "InputError",
    "HeavyVertexWarning",
    "WeightedGraph",
    "SubgraphPair",
    "EdgeFunction",
    "NormalizationScales",
    "index_array",
    "mu_sum",
    "rho_sum",
    "weighted_density",
    "global_density",
    "normalize",
    "inner_product",
    "norm",
]


class InputError(ValueError):
    """Invalid graph data or parameters (maps to CLI exit code 2)."""


class HeavyVertexWarning(UserWarning):
    """A single vertex holds over a tenth of the total vertex mass and
    more than twice the average share."""


def index_array(n: int, subset: Iterable[int], name: str = "subset") -> np.ndarray:
    """Sorted, duplicate-free int64 index array for a vertex subset."""
    arr = np.unique(np.asarray(list(subset), dtype=np.int64))
    if arr.size and (arr[0] < 0 or arr[-1] >= n):
        raise InputError(f"{name}: vertex indices must lie in [0, {n})")
    return arr


def _check_pair_matrix(n: int, values: np.ndarray, name: str) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (n, n):
        raise InputError(f"{name}: expected shape ({n}, {n}), got {values.shape}")
    if not np.allclose(values, values.T, rtol=0.0, atol=0.0):
        raise InputError(f"{name}: matrix must be exactly symmetric")
    if np.any(np.diagonal(values) != 0.0):
        raise InputError(f"{name}: diagonal must be zero (no loops)")
    return values


@dataclass(frozen=True)
class WeightedGraph:
    """Vertex-weighted, edge-weighted undirected graph without loops.

    ``rho`` is the dense symmetric matrix of edge weights with zeros off
    the edge set; an entry is positive exactly when the pair is an edge.
    Arrays are frozen after construction so a graph can be shared freely
    across worker threads.
    """

    n: int
    mu: np.ndarray
    rho: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError("graph needs at least one vertex")
        mu = np.asarray(self.mu, dtype=np.float64)
        if mu.shape != (self.n,):
            raise InputError(f"mu: expected {self.n} vertex weights, got shape {mu.shape}")
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0.0):
            raise InputError("mu: vertex weights must be finite and strictly positive")
        rho = _check_pair_matrix(self.n, self.rho, "rho")
        if not np.all(np.isfinite(rho)) or np.any(rho < 0.0):
            raise InputError("rho: edge weights must be finite and nonnegative")
        mu = mu.copy()
        rho = rho.copy()
        mu.setflags(write=False)
        rho.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "rho", rho)
        heavy = mu.max() > mu.sum() / 10.0 + FLOAT_TOL
        lopsided = mu.max() > 2.0 * mu.sum() / self.n + FLOAT_TOL
        if self.n >= 2 and heavy and lopsided:
            warnings.warn(
                "a single vertex carries more than 10% of the total vertex "
                "mass (and over twice the average); mass floors may behave "
                "degenerately",
                HeavyVertexWarning,
                stacklevel=2,
            )

    @classmethod
    def from_edges(
        cls,
        n: int,
        mu: Sequence[float] | np.ndarray,
        edges: Iterable[tuple[int, int, float]],
    ) -> "WeightedGraph":
        rho = np.zeros((n, n), dtype=np.float64)
        seen: set[tuple[int, int]] = set()
        for k, (u, v, w) in enumerate(edges):
            if not (isinstance(u, (int, np.integer)) and isinstance(v, (int, np.integer))):
                raise InputError(f"edges[{k}]: endpoints must be integers")
            if not (0 <= u < v < n):
                raise InputError(f"edges[{k}]: need 0 <= u < v < n, got ({u}, {v}) with n={n}")
            if (u, v) in seen:
                raise InputError(f"edges[{k}]: duplicate edge ({u}, {v})")
            w = float(w)
            if not np.isfinite(w) or w <= 0.0:
                raise InputError(f"edges[{k}]: edge weight must be finite and positive, got {w}")
            seen.add((u, v))
            rho[u, v] = w
            rho[v, u] = w
        return cls(n=n, mu=np.asarray(mu, dtype=np.float64), rho=rho)

    # -- basic views ---------------------------------------------------

    @property
    def edge_mask(self) -> np.ndarray:
        return self.rho > 0.0

    def edge_list(self) -> list[tuple[int, int, float]]:
        """Edges as (u, v, rho) with u < v, sorted lexicographically."""
        iu, iv = np.nonzero(np.triu(self.rho, k=1))
        return [(int(u), int(v), float(self.rho[u, v])) for u, v in zip(iu, iv)]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.rho, k=1)))

    @property
    def mu_total(self) -> float:
        return float(self.mu.sum())

    @property
    def rho_total(self) -> float:
        """Total edge weight over unordered pairs."""
        return float(np.triu(self.rho, k=1).sum())

    @property
    def pair_count(self) -> int:
        return comb(self.n, 2)


@dataclass(frozen=True)
class SubgraphPair:
    """A host graph G together with a spanning subgraph F (F keeps every
    vertex and a subset of the edges; edge weights are inherited)."""

    graph: WeightedGraph
    f_mask: np.ndarray
    rho_f: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        mask = np.asarray(self.f_mask)
        if mask.dtype != np.bool_:
            mask = mask.astype(bool)
        n = self.graph.n
        if mask.shape != (n, n):
            raise InputError(f"f_mask: expected shape ({n}, {n})")
        if not np.array_equal(mask, mask.T) or np.any(np.diagonal(mask)):
            raise InputError("f_mask: must be symmetric with empty diagonal")
        if np.any(mask & ~self.graph.edge_mask):
            raise InputError("F must be a subset of the host graph's edges")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "f_mask", mask)
        rho_f = np.where(mask, self.graph.rho, 0.0)
        rho_f.setflags(write=False)
        object.__setattr__(self, "rho_f", rho_f)

    @classmethod
    def from_edges(
        cls, graph: WeightedGraph, f_edges: Iterable[tuple[int, int]]
    ) -> "SubgraphPair":
        n = graph.n
        mask = np.zeros((n, n), dtype=bool)
        for k, (u, v) in enumerate(f_edges):
            if not (0 <= u < v < n):
                raise InputError(f"f_edges[{k}]: need 0 <= u < v < n, got ({u}, {v})")
            if mask[u, v]:
                raise InputError(f"f_edges[{k}]: duplicate edge ({u}, {v})")
            if graph.rho[u, v] == 0.0:
                raise InputError(f"f_edges[{k}]: ({u}, {v}) is not an edge of the host graph")
            mask[u, v] = True
            mask[v, u] = True
        return cls(graph=graph, f_mask=mask)

    @classmethod
    def full(cls, graph: WeightedGraph) -> "SubgraphPair":
        return cls(graph=graph, f_mask=graph.edge_mask)

    @property
    def n(self) -> int:
        return self.graph.n

    def f_edge_list(self) -> list[tuple[int, int]]:
        iu, iv = np.nonzero(np.triu(self.f_mask, k=1))
        return [(int(u), int(v)) for u, v in zip(iu, iv)]

    def indicator(self) -> "EdgeFunction":
        """The pair function 1_F (1 on F's edges, 0 elsewhere)."""
        return EdgeFunction(self.f_mask.astype(np.float64))


@dataclass(frozen=True)
class EdgeFunction:
    """Symmetric real-valued function on vertex pairs of an n-vertex graph."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        n = values.shape[0] if values.ndim == 2 else -1
        values = _check_pair_matrix(n, values, "values")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, n: int) -> "EdgeFunction":
        return cls(np.zeros((n, n), dtype=np.float64))

    @classmethod
    def cross_indicator(cls, n: int, A: Iterable[int], B: Iterable[int]) -> "EdgeFunction":
        """Indicator of pairs with one endpoint in A and the other in B
        (A and B disjoint)."""
        a = index_array(n, A, "A")
        b = index_array(n, B, "B")
        if np.intersect1d(a, b).size:
            raise InputError("cross_indicator: A and B must be disjoint")
        values = np.zeros((n, n), dtype=np.float64)
        if a.size and b.size:
            values[np.ix_(a, b)] = 1.0
            values[np.ix_(b, a)] = 1.0
        return cls(values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __add__(self, other: "EdgeFunction") -> "EdgeFunction":
        return EdgeFunction(self.values + _as_values(other, self.n))

    def __sub__(self, other: "EdgeFunction") -> "EdgeFunction":
        return EdgeFunction(self.values - _as_values(other, self.n))

    def __mul__(self, scalar: float) -> "EdgeFunction":
        return EdgeFunction(self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "EdgeFunction":
        return EdgeFunction(-self.values)


def _as_values(g: EdgeFunction | np.ndarray, n: int) -> np.ndarray:
    values = g.values if isinstance(g, EdgeFunction) else np.asarray(g, dtype=np.float64)
    if values.shape != (n, n):
        raise InputError(f"pair function has shape {values.shape}, expected ({n}, {n})")
    return values


# -- masses and densities ----------------------------------------------


def mu_sum(G: WeightedGraph, S: Iterable[int]) -> float:
    """Total vertex mass of S."""
    idx = index_array(G.n, S, "S")
    return float(G.mu[idx].sum())


def _rho_matrix(H: WeightedGraph | SubgraphPair) -> tuple[WeightedGraph, np.ndarray]:
    if isinstance(H, SubgraphPair):
        return H.graph, H.rho_f
    return H, H.rho


def rho_sum(H: WeightedGraph | SubgraphPair, A: Iterable[int], B: Iterable[int]) -> float:
    """Edge mass between A and B over ordered pairs (u in A, v in B).

    For disjoint A and B every edge contributes once; with A = B = V
    every edge contributes twice.  For a SubgraphPair the sum runs over
    F's edges only.
    """
    G, R = _rho_matrix(H)
    a = index_array(G.n, A, "A")
    b = index_array(G.n, B, "B")
    if not a.size or not b.size:
        return 0.0
    return float(R[np.ix_(a, b)].sum())


def weighted_density(
    H: WeightedGraph | SubgraphPair, A: Iterable[int], B: Iterable[int]
) -> float:
    """rho(A, B) / (mu(A) mu(B)) for disjoint nonempty A, B."""
    G, _ = _rho_matrix(H)
    a = index_array(G.n, A, "A")
    b = index_array(G.n, B, "B")
    if not a.size or not b.size:
        raise InputError("weighted_density: A and B must be nonempty")
    if np.intersect1d(a, b).size:
        raise InputError("weighted_density: A and B must be disjoint")
    mass_a = float(G.mu[a].sum())
    mass_b = float(G.mu[b].sum())
    return rho_sum(H, a, b) / (mass_a * mass_b)


def global_density(G: WeightedGraph) -> float:
    """rho(V, V) / mu(V)^2 (the ordered sum counts every edge twice)."""
    return 2.0 * G.rho_total / G.mu_total**2


# -- normalization -----------------------------------------------------


@dataclass(frozen=True)
class NormalizationScales:
    mu_scale: float
    rho_scale: float


def normalize(G: WeightedGraph) -> tuple[WeightedGraph, NormalizationScales]:
    """Rescale so mu(V) = n and total unordered edge weight is C(n, 2).

    The second condition makes the all-ones pair function have unit
    norm.  Requires at least one edge.
    """
    if G.edge_count == 0:
        raise InputError("normalize: graph has no edges to rescale")
    if G.n < 2:
        raise InputError("normalize: need at least two vertices")
    mu_scale = G.n / G.mu_total
    rho_scale = comb(G.n, 2) / G.rho_total
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HeavyVertexWarning)
        scaled = WeightedGraph(n=G.n, mu=G.mu * mu_scale, rho=G.rho * rho_scale)
    return scaled, NormalizationScales(mu_scale=mu_scale, rho_scale=rho_scale)


def is_normalized(G: WeightedGraph, rtol: float = 1e-9) -> bool:
    if G.edge_count == 0 or G.n < 2:
        return False
    mu_ok = abs(G.mu_total - G.n) <= rtol * G.n
    rho_ok = abs(G.rho_total - comb(G.n, 2)) <= rtol * comb(G.n, 2)
    return mu_ok and rho_ok


# -- inner product -----------------------------------------------------


def inner_product(
    G: WeightedGraph,
    g: EdgeFunction | np.ndarray,
    h: EdgeFunction | np.ndarray,
) -> float:
    """<g, h> = (1 / C(n,2)) sum over unordered pairs of g * h * rho.

    Pairs off the edge set contribute nothing regardless of g and h.
    """
    if G.n < 2:
        raise InputError("inner_product: need at least two vertices")
    gv = _as_values(g, G.n)
    hv = _as_values(h, G.n)
    # every unordered pair appears twice in the full elementwise sum
    total = float((gv * hv * G.rho).sum()) / 2.0
    return total / comb(G.n, 2)


def norm(G: WeightedGraph, g: EdgeFunction | np.ndarray) -> float:
    return float(np.sqrt(max(inner_product(G, g, g), 0.0)))
