"""Exhaustive enumeration kernels shared by the checkers.

Two enumeration shapes recur:

* all assignments of n vertices to {outside, A, B} with A, B disjoint
  (3^n states), carrying the masses of A and B and the cross edge mass
  between them;
* all pairs (X, Y) of subsets of two fixed disjoint sides (2^|A| * 2^|B|
  states), scanned in blocks against one or more cross-weight matrices.

Assignment and subset indices are encoded most-significant-digit-first
in vertex order, so ascending index order is lexicographic order on
membership vectors and ``argmax`` tie-breaks resolve to the
lexicographically smallest witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import InputError

TERNARY_CAP_DEFAULT = 14
SUBSET_PAIR_CAP_DEFAULT = 26


def ternary_assignment_sums(
    weights: np.ndarray, mu: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Masses and cross sums for every {outside, A, B} assignment.

    Returns arrays of length 3^n indexed by the assignment code whose
    base-3 digits, most significant first, give vertex 0..n-1 the roles
    0 = outside, 1 = in A, 2 = in B:

        mu_a[i], mu_b[i]  -- vertex masses of A and B,
        s_ab[i]           -- sum of weights[u, v] over u in A, v in B
                             (each unordered cross pair once).
    """
    n = mu.shape[0]
    mu_a = np.zeros(1)
    mu_b = np.zeros(1)
    s_ab = np.zeros(1)
    # from_a[:, j] (j < k): weight from the current A-members to vertex j
    from_a = np.zeros((1, n))
    from_b = np.zeros((1, n))
    # add vertices from n-1 down to 0 so vertex 0 lands in the most
    # significant digit
    for k in range(n - 1, -1, -1):
        to_k_from_a = from_a[:, k]
        to_k_from_b = from_b[:, k]
        s_ab = np.concatenate([s_ab, s_ab + to_k_from_b, s_ab + to_k_from_a])
        mu_a = np.concatenate([mu_a, mu_a + mu[k], mu_a])
        mu_b = np.concatenate([mu_b, mu_b, mu_b + mu[k]])
        keep_a = from_a[:, :k]
        keep_b = from_b[:, :k]
        row = weights[k, :k]
        from_a = np.vstack([keep_a, keep_a + row, keep_a])
        from_b = np.vstack([keep_b, keep_b, keep_b + row])
    return mu_a, mu_b, s_ab


def decode_assignment(code: int, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Invert the assignment encoding: code -> (A, B) as sorted tuples."""
    a: list[int] = []
    b: list[int] = []
    for v in range(n):
        digit = (code // 3 ** (n - 1 - v)) % 3
        if digit == 1:
            a.append(v)
        elif digit == 2:
            b.append(v)
    return tuple(a), tuple(b)


def check_ternary_cap(n: int, cap: int) -> None:
    if n > cap:
        raise InputError(
            f"exhaustive enumeration over 3^n assignments is capped at n={cap} "
            f"(got n={n}); raise the cap explicitly or use search mode"
        )


# -- subset machinery ------------------------------------------------------


def subset_sums(values: np.ndarray) -> np.ndarray:
    """Sum of values over every subset of k items, indexed so that item j
    occupies bit (k-1-j); ascending index = lexicographic membership order."""
    out = np.zeros(1)
    # last item first so item 0 lands in the most significant bit,
    # matching decode_subset and _membership_block
    for j in range(values.shape[0] - 1, -1, -1):
        out = np.concatenate([out, out + values[j]])
    return out


def decode_subset(index: int, k: int) -> tuple[int, ...]:
    return tuple(j for j in range(k) if (index >> (k - 1 - j)) & 1)


def _membership_block(k: int, start: int, stop: int) -> np.ndarray:
    """Columns start..stop-1 of the (k, 2^k) membership matrix."""
    codes = np.arange(start, stop, dtype=np.int64)
    shifts = (k - 1 - np.arange(k, dtype=np.int64))[:, None]
    return ((codes[None, :] >> shifts) & 1).astype(np.float64)


@dataclass
class SubsetPairScan:
    """Result of maximizing a deviation over qualifying subset pairs."""

    best_value: float
    best_a_index: int
    best_b_index: int
    n_qualifying: int

    @property
    def vacuous(self) -> bool:
        return self.n_qualifying == 0


def scan_subset_pairs(
    crosses: Sequence[np.ndarray],
    a_weights: np.ndarray,
    b_weights: np.ndarray,
    a_floor: float,
    b_floor: float,
    value_fn: Callable[[list[np.ndarray], np.ndarray, np.ndarray], np.ndarray],
    *,
    floor_tol: float = 1e-9,
    max_cells: int = 1 << 22,
) -> SubsetPairScan:
    """Maximize value_fn over pairs (X, Y) of qualifying subsets.

    ``crosses`` are (|A|, |B|) matrices; for each the scanner forms the
    table of sums over X x Y.  ``value_fn(tables, wx, wy)`` receives one
    table block per cross plus the matching subset-mass column/row and
    returns the deviation block.  Qualifying means subset mass >= floor
    (within floor_tol) and nonempty.  The maximizer is the first in
    (X, Y)-lexicographic order, scanned blockwise.
    """
    ka = int(a_weights.shape[0])
    kb = int(b_weights.shape[0])
    wa = subset_sums(a_weights)
    wb = subset_sums(b_weights)
    qa = wa >= a_floor - floor_tol
    qb = wb >= b_floor - floor_tol
    qa[0] = False
    qb[0] = False
    n_qualifying = int(qa.sum()) * int(qb.sum())
    if n_qualifying == 0:
        return SubsetPairScan(float("nan"), -1, -1, 0)

    nb = 1 << kb
    col_block = min(nb, max(1, max_cells // 256))
    row_block = max(1, max_cells // col_block)

    mb_blocks = [
        (cs, min(cs + col_block, nb), _membership_block(kb, cs, min(cs + col_block, nb)))
        for cs in range(0, nb, col_block)
    ]

    best_value = -np.inf
    best_a = -1
    best_b = -1
    na = 1 << ka
    wb_row = wb[None, :]
    for rs in range(0, na, row_block):
        re = min(rs + row_block, na)
        if not qa[rs:re].any():
            continue
        ma = _membership_block(ka, rs, re).T  # (rows, ka)
        partials = [ma @ c for c in crosses]  # (rows, kb)
        wx = wa[rs:re][:, None]
        row_ok = qa[rs:re]
        for cs, ce, mb in mb_blocks:
            if not qb[cs:ce].any():
                continue
            tables = [p @ mb for p in partials]
            # non-qualifying subsets may divide by zero mass; they are
            # masked out on the next line
            with np.errstate(divide="ignore", invalid="ignore"):
                block = value_fn(tables, wx, wb_row[:, cs:ce])
            block = np.where(row_ok[:, None] & qb[None, cs:ce], block, -np.inf)
            flat = int(np.argmax(block))
            val = float(block.flat[flat])
            if val > best_value:
                best_value = val
                best_a = rs + flat // block.shape[1]
                best_b = cs + flat % block.shape[1]
    return SubsetPairScan(best_value, best_a, best_b, n_qualifying)


def check_subset_pair_cap(size_a: int, size_b: int, cap: int) -> None:
    if size_a + size_b > cap:
        raise InputError(
            f"exhaustive subset-pair enumeration is capped at |A|+|B|={cap} "
            f"(got {size_a}+{size_b}); raise the cap explicitly or use search mode"
        )
