"""Brute-force reference implementations used to cross-check the library.

Everything here trades speed for transparent correctness: plain loops
over itertools enumerations, Python floats, and no code shared with the
package internals.  Mass floors are inclusive within FLOOR_TOL to match
the library's convention.
"""

from itertools import combinations, product
from math import comb, inf

FLOOR_TOL = 1e-9


def global_density(mu, rho):
    n = len(mu)
    total = sum(rho[u][v] for u in range(n) for v in range(u + 1, n))
    return 2.0 * total / sum(mu) ** 2


def _cross(rho, A, B):
    return sum(rho[u][v] for u in A for v in B)


def qr_worst(mu, rho, beta, D=None):
    """Worst deviation over all qualifying disjoint (A, B) assignments.

    Returns (worst, n_qualifying); worst is None when no assignment
    qualifies.  Beta mode measures |d - g|, ratio mode the larger of
    d/g and g/d (infinite at d = 0).
    """
    n = len(mu)
    g = global_density(mu, rho)
    floor = beta * sum(mu)
    worst = None
    count = 0
    for roles in product((0, 1, 2), repeat=n):
        A = [v for v in range(n) if roles[v] == 1]
        B = [v for v in range(n) if roles[v] == 2]
        mu_a = sum(mu[v] for v in A)
        mu_b = sum(mu[v] for v in B)
        if mu_a < floor - FLOOR_TOL or mu_b < floor - FLOOR_TOL:
            continue
        count += 1
        d = _cross(rho, A, B) / (mu_a * mu_b)
        if D is None:
            dev = abs(d - g)
        else:
            dev = max(d / g, g / d) if d > 0.0 else inf
        if worst is None or dev > worst:
            worst = dev
    return worst, count


def pair_worst(mu, rho_f, A, B, eps):
    """Worst |d_F(X, Y) - d_F(A, B)| over qualifying sub-pairs.

    Returns (worst, n_qualifying); floors are mu(X) >= eps mu(A) and
    mu(Y) >= eps mu(B), inclusive within FLOOR_TOL.
    """
    mass_a = sum(mu[v] for v in A)
    mass_b = sum(mu[v] for v in B)
    base = _cross(rho_f, A, B) / (mass_a * mass_b)
    xs = [
        X
        for k in range(1, len(A) + 1)
        for X in combinations(A, k)
        if sum(mu[v] for v in X) >= eps * mass_a - FLOOR_TOL
    ]
    ys = [
        Y
        for k in range(1, len(B) + 1)
        for Y in combinations(B, k)
        if sum(mu[v] for v in Y) >= eps * mass_b - FLOOR_TOL
    ]
    worst = None
    for X in xs:
        mx = sum(mu[v] for v in X)
        for Y in ys:
            my = sum(mu[v] for v in Y)
            dev = abs(_cross(rho_f, X, Y) / (mx * my) - base)
            if worst is None or dev > worst:
                worst = dev
    return worst, len(xs) * len(ys)


def classical_regular(a_size, b_size, edges, eps):
    """Classical bipartite eps-regularity by full enumeration.

    ``edges`` are (i, j) pairs in local side coordinates.  Returns True
    when every qualifying sub-pair density stays strictly within eps of
    the pair density.
    """
    eset = set(edges)
    d = len(eset) / (a_size * b_size)
    for ka in range(1, a_size + 1):
        if ka < eps * a_size - FLOOR_TOL:
            continue
        for kb in range(1, b_size + 1):
            if kb < eps * b_size - FLOOR_TOL:
                continue
            for A in combinations(range(a_size), ka):
                for B in combinations(range(b_size), kb):
                    e = sum(1 for i in A for j in B if (i, j) in eset)
                    if abs(e / (ka * kb) - d) >= eps:
                        return False
    return True


def relative_worst(a_size, b_size, f_edges, g_edges, eps):
    """Worst |e_F(X,Y)/e_G(X,Y) - base| over qualifying sub-pairs with
    at least one G-edge; size floors |X| >= eps |A|, |Y| >= eps |B|."""
    fset = set(f_edges)
    gset = set(g_edges)
    base = len(fset) / len(gset)
    worst = None
    for ka in range(1, a_size + 1):
        if ka < eps * a_size - FLOOR_TOL:
            continue
        for kb in range(1, b_size + 1):
            if kb < eps * b_size - FLOOR_TOL:
                continue
            for A in combinations(range(a_size), ka):
                for B in combinations(range(b_size), kb):
                    eg = sum(1 for i in A for j in B if (i, j) in gset)
                    if eg == 0:
                        continue
                    ef = sum(1 for i in A for j in B if (i, j) in fset)
                    dev = abs(ef / eg - base)
                    if worst is None or dev > worst:
                        worst = dev
    return worst


def volume_worst(n, edges, A, B, eps):
    """Worst cleared-form volume deviation and its threshold.

    The deviation for (X, Y) is |e(X,Y) - e(A,B) vol(X) vol(Y) /
    (vol(A) vol(B))|, maximized over vol(X) >= eps vol(A), vol(Y) >=
    eps vol(B); the returned threshold is eps vol(A) vol(B) / vol(V).
    """
    eset = {frozenset(e) for e in edges}
    deg = [0] * n
    for e in eset:
        u, v = tuple(e)
        deg[u] += 1
        deg[v] += 1
    vol_v = float(sum(deg))
    vol_a = float(sum(deg[v] for v in A))
    vol_b = float(sum(deg[v] for v in B))
    e_ab = sum(1 for u in A for v in B if frozenset((u, v)) in eset)
    share = e_ab / (vol_a * vol_b)
    threshold = eps * vol_a * vol_b / vol_v
    worst = None
    for ka in range(1, len(A) + 1):
        for X in combinations(A, ka):
            vx = float(sum(deg[v] for v in X))
            if vx < eps * vol_a - FLOOR_TOL:
                continue
            for kb in range(1, len(B) + 1):
                for Y in combinations(B, kb):
                    vy = float(sum(deg[v] for v in Y))
                    if vy < eps * vol_b - FLOOR_TOL:
                        continue
                    e_xy = sum(
                        1 for u in X for v in Y if frozenset((u, v)) in eset
                    )
                    dev = abs(e_xy - share * vx * vy)
                    if worst is None or dev > worst:
                        worst = dev
    return worst, threshold


def best_basic(mu, rho, r):
    """max |<r, gamma_{A,B}>| over all disjoint (A, B) by enumeration."""
    n = len(mu)
    pairs = comb(n, 2)
    best = 0.0
    for roles in product((0, 1, 2), repeat=n):
        A = [v for v in range(n) if roles[v] == 1]
        B = [v for v in range(n) if roles[v] == 2]
        corr = sum(r[u][v] * rho[u][v] for u in A for v in B) / pairs
        if abs(corr) > best:
            best = abs(corr)
    return best


def inner(rho, g, h):
    n = len(rho)
    total = sum(
        g[u][v] * h[u][v] * rho[u][v] for u in range(n) for v in range(u + 1, n)
    )
    return total / comb(n, 2)
