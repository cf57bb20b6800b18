"""Compiled int64 decision kernel.

Computes the same tables as ``treecut.solver`` (no backtracking records)
with numba-compiled loops over flat arrays.  It is only used when a
conservative a-priori bound proves every intermediate value fits in 64
bits, so results are exact whenever the lane engages; otherwise callers
fall back to the arbitrary-precision Python lane.

Any finite table value is a sum of at most ``parts + outliers`` edge
charges, so ``(parts + outliers + 2) * max_charge`` bounds every quantity
the kernel compares or adds.

Vertices arrive relabeled in BFS order (see ``RootedTree.dense_arrays``):
position 0 is the root, every vertex's children occupy the contiguous
range ``[cstart[u], cend[u])``, and scanning positions downward visits
children before parents.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

INF64 = np.int64(1) << np.int64(62)
_SAFE_LIMIT = 1 << 60
_MAX_TABLE_BYTES = 1 << 31


if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _dp_fill(cstart, cend, w_sub, p_sub, c_edge,
                 a, b, kappa, lam, use_pot, forb, gamma, mu):
        n = cstart.shape[0]
        kp1 = kappa + 1
        lp1 = lam + 1
        X = np.empty((kp1, lp1), np.int64)
        Ya = np.empty((kp1, lp1), np.int64)
        Yb = np.empty((kp1, lp1), np.int64)
        Ua = np.empty((kp1, lp1), np.uint8)
        Ub = np.empty((kp1, lp1), np.uint8)
        for u in range(n - 1, -1, -1):
            cs = cstart[u]
            ce = cend[u]
            if cs == ce:
                # leaf base case
                for l in range(lp1):
                    mu[u, 0, l] = 1 if (l >= 1 and forb[u] == 0) else 0
                    gamma[u, 0, l] = INF64
                num = b * c_edge[u]
                if use_pot:
                    num += b * p_sub[u]
                ok = num <= a * w_sub[u]
                for k in range(1, kp1):
                    for l in range(lp1):
                        gamma[u, k, l] = 0 if k == 1 else INF64
                        mu[u, k, l] = 1 if (k == 1 and ok) else 0
                continue

            # fold children into the cut-charge row
            Y = Ya
            Ynext = Yb
            for v in range(cs, ce):
                eps = a * w_sub[v] + b * c_edge[v]
                if use_pot:
                    eps -= b * p_sub[v]
                for k in range(1, kp1):
                    for l in range(lp1):
                        g = gamma[v, k, l]
                        if mu[v, k - 1, l] == 1 and eps <= g:
                            X[k, l] = eps
                        else:
                            X[k, l] = g
                if v == cs:
                    for k in range(1, kp1):
                        for l in range(lp1):
                            Y[k, l] = X[k, l]
                else:
                    for k in range(1, kp1):
                        for l in range(lp1):
                            best = INF64
                            for lp in range(l + 1):
                                for kq in range(1, k + 1):
                                    yv = Y[kq, lp]
                                    if yv >= INF64:
                                        continue
                                    xv = X[k + 1 - kq, l - lp]
                                    if xv >= INF64:
                                        continue
                                    s = yv + xv
                                    if s < best:
                                        best = s
                            Ynext[k, l] = best
                    tmp = Y
                    Y = Ynext
                    Ynext = tmp
            for l in range(lp1):
                gamma[u, 0, l] = INF64
            for k in range(1, kp1):
                for l in range(lp1):
                    gamma[u, k, l] = Y[k, l]

            # feasibility via the threshold test ...
            thr = a * w_sub[u] - b * c_edge[u]
            if use_pot:
                thr -= b * p_sub[u]
            for l in range(lp1):
                mu[u, 0, l] = 0
            for k in range(1, kp1):
                for l in range(lp1):
                    g = gamma[u, k, l]
                    mu[u, k, l] = 1 if (g < INF64 and g <= thr) else 0

            # ... or by spending one budget unit on u and combining children
            Uc = Ua
            Un = Ub
            for k in range(kp1):
                for l in range(lp1):
                    Uc[k, l] = mu[cs, k, l]
            for v in range(cs + 1, ce):
                for k in range(kp1):
                    for l in range(lp1):
                        if l >= 1 and Un[k, l - 1] == 1:
                            Un[k, l] = 1
                            continue
                        hit = 0
                        for kq in range(k + 1):
                            for lp in range(l + 1):
                                if Uc[kq, lp] == 1 and mu[v, k - kq, l - lp] == 1:
                                    hit = 1
                                    break
                            if hit == 1:
                                break
                        Un[k, l] = hit
                tmp2 = Uc
                Uc = Un
                Un = tmp2
            if forb[u] == 0:
                for k in range(kp1):
                    for l in range(1, lp1):
                        if mu[u, k, l] == 0 and Uc[k, l - 1] == 1:
                            mu[u, k, l] = 1

    @njit(cache=True)
    def _decide_many(cstart, cend, w_sub, p_sub, c_edge,
                     a_arr, b_arr, kappa, lam, use_pot, forb, gamma, mu, out):
        for j in range(a_arr.shape[0]):
            _dp_fill(cstart, cend, w_sub, p_sub, c_edge,
                     a_arr[j], b_arr[j], kappa, lam, use_pot, forb, gamma, mu)
            out[j] = mu[0, kappa, lam]


def available() -> bool:
    return NUMBA_AVAILABLE


def _bound_ok(tree, a: int, b: int, kappa: int, lam: int) -> bool:
    # (a+1) keeps raw subtree weights storable even at threshold zero; this
    # must run BEFORE dense_arrays so oversized ints never reach numpy
    w_total = tree.subtree_weight_scaled[tree.root]
    c_total, p_total = tree.scaled_totals()
    charge = (a + 1) * w_total + b * (c_total + p_total) + 1
    return (kappa + lam + 2) * charge < _SAFE_LIMIT


def _forb_array(tree, forbidden_ids):
    pos = tree.dense_arrays()["pos"]
    forb = np.zeros(tree.vertex_count, dtype=np.uint8)
    for vid in forbidden_ids:
        forb[pos[tree.index[vid]]] = 1
    return forb


def _tables(tree, kappa, lam):
    n = tree.vertex_count
    if n * (kappa + 1) * (lam + 1) * 8 > _MAX_TABLE_BYTES:
        return None
    gamma = np.empty((n, kappa + 1, lam + 1), dtype=np.int64)
    mu = np.empty((n, kappa + 1, lam + 1), dtype=np.uint8)
    return gamma, mu


def root_row(tree, xi: Fraction, kappa: int, lam: int, use_pot: bool,
             forbidden_ids) -> list | None:
    """Root feasibility grid, or None when the lane cannot engage."""
    if not NUMBA_AVAILABLE:
        return None
    a, b = xi.numerator, xi.denominator
    if not _bound_ok(tree, a, b, kappa, lam):
        return None
    alloc = _tables(tree, kappa, lam)
    if alloc is None:
        return None
    gamma, mu = alloc
    dense = tree.dense_arrays()
    _dp_fill(dense["cstart"], dense["cend"],
             dense["w_sub"], dense["p_sub"], dense["c_edge"],
             np.int64(a), np.int64(b), np.int64(kappa), np.int64(lam),
             use_pot, _forb_array(tree, forbidden_ids), gamma, mu)
    return [[int(mu[0, k, l]) for l in range(lam + 1)] for k in range(kappa + 1)]


def decide_many(tree, xis, kappa: int, lam: int, use_pot: bool,
                forbidden_ids) -> list | None:
    """Batched decisions over thresholds, or None when the lane cannot
    engage (any single threshold out of bounds disqualifies the batch)."""
    if not NUMBA_AVAILABLE:
        return None
    if not xis:
        return []
    a_max = max(x.numerator for x in xis)
    b_max = max(x.denominator for x in xis)
    if not _bound_ok(tree, a_max, b_max, kappa, lam):
        return None
    alloc = _tables(tree, kappa, lam)
    if alloc is None:
        return None
    gamma, mu = alloc
    dense = tree.dense_arrays()
    a_arr = np.array([x.numerator for x in xis], dtype=np.int64)
    b_arr = np.array([x.denominator for x in xis], dtype=np.int64)
    out = np.zeros(len(xis), dtype=np.uint8)
    _decide_many(dense["cstart"], dense["cend"],
                 dense["w_sub"], dense["p_sub"], dense["c_edge"],
                 a_arr, b_arr, np.int64(kappa), np.int64(lam),
                 use_pot, _forb_array(tree, forbidden_ids), gamma, mu, out)
    return [bool(v) for v in out]


def warm_up() -> None:
    """Force JIT compilation on a toy instance (timing benchmarks call this
    so compilation never lands inside a measured region)."""
    if not NUMBA_AVAILABLE:
        return
    from .tree import build_rooted_tree

    tiny = build_rooted_tree([("a", 1), ("b", 1)], [("a", "b", 1)], "a")
    root_row(tiny, Fraction(1), 1, 1, False, frozenset())
    decide_many(tiny, [Fraction(1), Fraction(0)], 1, 1, True, frozenset())
