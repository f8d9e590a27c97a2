"""Quasi-randomness checks for weighted graphs.

A graph is beta-quasi-random if every disjoint pair A, B with
mu(A), mu(B) >= beta * mu(V) has

    | rho(A, B) / (mu(A) mu(B)) - rho(V, V) / mu(V)^2 | < beta,

and (D, beta)-quasi-random (D > 1) if instead every such pair density
lies within a factor D of the global density.  Exhaustive mode settles
the quantifier by enumerating all 3^n assignments (capped); search mode
hill-climbs for a violating pair, so "passed" there only means no
violation was found.  The beta threshold is absolute, so verdicts are
scale-sensitive: the checker warns when the global density strays far
from 1, which normalization would fix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._enumerate import (
    TERNARY_CAP_DEFAULT,
    check_ternary_cap,
    decode_assignment,
    ternary_assignment_sums,
)
from ._search import disjoint_pair_search
from .core import FLOAT_TOL, InputError, WeightedGraph, global_density

__all__ = [
    "ScaleWarning",
    "QuasirandomVerdict",
    "check_quasirandom",
    "check_quasirandom_exhaustive",
    "check_quasirandom_search",
]


class ScaleWarning(UserWarning):
    """Global density far from 1; absolute thresholds may be meaningless."""


@dataclass(frozen=True)
class QuasirandomVerdict:
    """Outcome of a quasi-randomness check.

    ``kind`` is "beta" (absolute deviation) or "ratio" (D-sandwich).
    ``worst_deviation`` is the largest |density - global| in beta mode
    and the largest max(density/global, global/density) in ratio mode
    (infinite for a zero-density qualifying pair).  ``certified`` is
    True when the verdict is rigorous: always in exhaustive mode, and
    for found violations in search mode.  ``vacuous`` marks the case of
    no qualifying pair at all.
    """

    kind: str
    passed: bool
    mode: str
    certified: bool
    beta: float
    D: float | None
    global_density: float
    worst_deviation: float | None
    worst_pair: tuple[tuple[int, ...], tuple[int, ...]] | None
    vacuous: bool = False
    n_qualifying: int | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "mode": self.mode,
            "certified": self.certified,
            "beta": self.beta,
            "D": self.D,
            "global_density": self.global_density,
            "worst_deviation": self.worst_deviation,
            "worst_pair": None if self.worst_pair is None
            else {"A": list(self.worst_pair[0]), "B": list(self.worst_pair[1])},
            "vacuous": self.vacuous,
            "n_qualifying": self.n_qualifying,
        }


def _validate(G: WeightedGraph, beta: float, D: float | None) -> float:
    if not (0.0 < beta < 1.0):
        raise InputError(f"beta must lie in (0, 1), got {beta}")
    if D is not None and not D > 1.0:
        raise InputError(f"D must exceed 1, got {D}")
    g = global_density(G)
    if G.edge_count > 0 and not (0.5 <= g <= 2.0):
        warnings.warn(
            f"global density {g:.6g} is outside [1/2, 2]; the absolute beta "
            "threshold may be vacuous or unreachable (normalize the graph first)",
            ScaleWarning,
            stacklevel=3,
        )
    return g


def _beta_objective(g: float) -> Callable:
    def objective(s_ab, mu_a, mu_b):
        return np.abs(s_ab / (mu_a * mu_b) - g)

    return objective


def _ratio_objective(g: float) -> Callable:
    def objective(s_ab, mu_a, mu_b):
        d = s_ab / (mu_a * mu_b)
        if g <= 0.0:
            return np.where(d == 0.0, 1.0, np.inf)
        with np.errstate(divide="ignore"):
            return np.maximum(d / g, g / d)

    return objective


def _verdict_passed(kind: str, worst: float, beta: float, D: float | None) -> bool:
    if kind == "beta":
        return bool(worst < beta)
    return bool(worst <= D)


def check_quasirandom_exhaustive(
    G: WeightedGraph,
    beta: float,
    D: float | None = None,
    *,
    cap: int = TERNARY_CAP_DEFAULT,
) -> QuasirandomVerdict:
    """Certified verdict by enumeration of all 3^n assignments."""
    g = _validate(G, beta, D)
    check_ternary_cap(G.n, cap)
    kind = "beta" if D is None else "ratio"
    mu_a, mu_b, s_ab = ternary_assignment_sums(G.rho, G.mu)
    floor = beta * G.mu_total
    qualifying = (mu_a >= floor - FLOAT_TOL) & (mu_b >= floor - FLOAT_TOL)
    n_qualifying = int(qualifying.sum())
    if n_qualifying == 0:
        return QuasirandomVerdict(
            kind=kind, passed=True, mode="exhaustive", certified=True,
            beta=beta, D=D, global_density=g, worst_deviation=None,
            worst_pair=None, vacuous=True, n_qualifying=0,
        )
    objective = _beta_objective(g) if kind == "beta" else _ratio_objective(g)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = objective(s_ab, mu_a, mu_b)
    values = np.where(qualifying, values, -np.inf)
    code = int(np.argmax(values))
    worst = float(values[code])
    A, B = decode_assignment(code, G.n)
    return QuasirandomVerdict(
        kind=kind, passed=_verdict_passed(kind, worst, beta, D),
        mode="exhaustive", certified=True, beta=beta, D=D, global_density=g,
        worst_deviation=worst, worst_pair=(A, B), vacuous=False,
        n_qualifying=n_qualifying,
    )


def check_quasirandom_search(
    G: WeightedGraph,
    beta: float,
    D: float | None = None,
    *,
    seed: int,
    restarts: int = 64,
) -> QuasirandomVerdict:
    """Hill-climbing witness search; a found violation is a certificate,
    a pass only means the budget found none."""
    g = _validate(G, beta, D)
    kind = "beta" if D is None else "ratio"
    floor = beta * G.mu_total
    objective = _beta_objective(g) if kind == "beta" else _ratio_objective(g)
    best = disjoint_pair_search(
        G.rho, G.mu, floor, objective, seed=seed, restarts=restarts
    )
    if best.x is None:
        return QuasirandomVerdict(
            kind=kind, passed=True, mode="search", certified=False,
            beta=beta, D=D, global_density=g, worst_deviation=None,
            worst_pair=None, vacuous=True, n_qualifying=None,
        )
    worst = float(best.value)
    passed = _verdict_passed(kind, worst, beta, D)
    pair = (
        tuple(int(v) for v in best.x),
        tuple(int(v) for v in best.y),
    )
    return QuasirandomVerdict(
        kind=kind, passed=passed, mode="search", certified=not passed,
        beta=beta, D=D, global_density=g, worst_deviation=worst,
        worst_pair=pair, vacuous=False, n_qualifying=None,
    )


def check_quasirandom(
    G: WeightedGraph,
    beta: float,
    D: float | None = None,
    *,
    mode: str = "auto",
    seed: int = 0,
    restarts: int = 64,
    cap: int = TERNARY_CAP_DEFAULT,
) -> QuasirandomVerdict:
    """Dispatch to exhaustive enumeration (n <= cap) or witness search."""
    if mode not in ("auto", "exhaustive", "search"):
        raise InputError(f"unknown mode {mode!r}")
    if mode == "exhaustive" or (mode == "auto" and G.n <= cap):
        return check_quasirandom_exhaustive(G, beta, D, cap=cap)
    return check_quasirandom_search(G, beta, D, seed=seed, restarts=restarts)
