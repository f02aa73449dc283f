"""Iterates, means and the rank-one ergodic limit of the averaging map.

The averaging matrix is lower triangular, so coordinates up to N never
depend on later ones and convergence at a fixed truncation with the
k-weighted sup norm is a faithful finite witness.  The limit projection
sends x to x_1 * (1,1,1,...), along the hyperplane of vectors with
vanishing first coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .operators import _vals, weighted_norm
from .weights import GrowthVerdict, WeightFamily

__all__ = [
    "IterationTrace",
    "power_apply",
    "cesaro_means",
    "power_bounded_check",
    "iterates_limit_check",
    "decomposition_split",
    "range_inverse_matrices",
    "b_continuity_check",
]

M_CAP = 10 ** 4
ITERATE_TOL = 1e-8


@dataclass
class IterationTrace:
    m_values: list
    distances: list
    x: list
    k: int
    N: int
    status: str = "converged"  # "converged" | "not_converged"

    def to_csv(self, fh):
        fh.write("m,distance\n")
        for m, d in zip(self.m_values, self.distances):
            fh.write(f"{m},{d:.17g}\n")


def _cesaro_step(v):
    return np.cumsum(v) / np.arange(1, len(v) + 1)


def power_apply(x, m, N=None):
    """m-fold application of the averaging map at truncation N."""
    if m < 1:
        raise ValueError("m must be >= 1")
    v = np.asarray(_vals(x), dtype=complex)
    if N is not None:
        v = v[:N]
    for _ in range(m):
        v = _cesaro_step(v)
    return list(v)


def cesaro_means(x, n, N=None):
    """(1/n) sum_{m=1}^{n} C^m x, averaged in order m = 1..n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    v = np.asarray(_vals(x), dtype=complex)
    if N is not None:
        v = v[:N]
    acc = np.zeros_like(v)
    cur = v
    for _ in range(n):
        cur = _cesaro_step(cur)
        acc = acc + cur
    return list(acc / n)


def power_bounded_check(W: WeightFamily, k, trials=20, m_max=200, N=50,
                        seed=0, slack=1e-10):
    """Random-vector evidence that iterates contract the k-norm."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    for _ in range(trials):
        x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        q0 = weighted_norm(x, W, k)
        v = x
        for m in range(1, m_max + 1):
            v = _cesaro_step(v)
            q = weighted_norm(v, W, k)
            ratio = q / q0 if q0 > 0 else 0.0
            worst = max(worst, ratio)
            if q > q0 * (1.0 + slack):
                failures += 1
    return {"trials": trials, "m_max": m_max, "N": N, "k": k,
            "worst_ratio": worst, "failures": failures,
            "passed": failures == 0}


def decomposition_split(x):
    """x = y + z with y = x_1 * (1,...,1) and z_1 = 0, exactly."""
    vals = _vals(x)
    if not vals:
        return [], []
    c = vals[0]
    y = [c for _ in vals]
    z = [v - c for v in vals]
    return y, z


def iterates_limit_check(x, W: WeightFamily, k, N, tol=ITERATE_TOL,
                         m_cap=M_CAP):
    """Trace of q_k(C^m x - P x) at truncation N until below tol.

    P x = x_1 * (1,1,...); the truncated iteration converges
    geometrically since the nontrivial eigenvalues 1/j, j >= 2, lie
    inside the unit disc.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    v = np.asarray(_vals(x), dtype=complex)[:N]
    limit = np.full(N, v[0], dtype=complex)
    m_values, distances = [], []
    status = "not_converged"
    for m in range(1, m_cap + 1):
        v = _cesaro_step(v)
        d = weighted_norm(v - limit, W, k)
        m_values.append(m)
        distances.append(d)
        if d < tol:
            status = "converged"
            break
    return IterationTrace(m_values, distances, list(np.asarray(_vals(x))[:N]),
                          k, N, status)


# ---------------------------------------------------------------------------
# closed range: the shifted (I - C) and its explicit inverse

def _a_matrix_exact(N):
    """Truncation of S (I - C)|_{x_1 = 0} S^{-1}: a_nn = n/(n+1),
    a_nm = -1/(n+1) below the diagonal."""
    return [[Fraction(n, n + 1) if m == n
             else (Fraction(-1, n + 1) if m < n else Fraction(0))
             for m in range(1, N + 1)] for n in range(1, N + 1)]


def _b_matrix_exact(N):
    """Explicit inverse: b_nn = (n+1)/n, b_nm = 1/m below the diagonal."""
    return [[Fraction(n + 1, n) if m == n
             else (Fraction(1, m) if m < n else Fraction(0))
             for m in range(1, N + 1)] for n in range(1, N + 1)]


def range_inverse_matrices(N, exact=True):
    """The shifted (I - C) restriction, its explicit inverse, and the
    exact residual max|AB - I|, |BA - I| at truncation N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    A = _a_matrix_exact(N)
    B = _b_matrix_exact(N)

    def mul(X, Y):
        return [[sum(X[i][t] * Y[t][j] for t in range(N))
                 for j in range(N)] for i in range(N)]

    ident = [[Fraction(1) if i == j else Fraction(0) for j in range(N)]
             for i in range(N)]
    ab = mul(A, B)
    ba = mul(B, A)
    residual = max(
        max(abs(ab[i][j] - ident[i][j]) for i in range(N) for j in range(N)),
        max(abs(ba[i][j] - ident[i][j]) for i in range(N) for j in range(N)))
    if not exact:
        A = np.array([[float(v) for v in row] for row in A])
        B = np.array([[float(v) for v in row] for row in B])
        residual = float(residual)
    return A, B, residual


def b_continuity_check(W: WeightFamily, k, horizon=10 ** 4):
    """Weighted row sums of the explicit inverse, shifted weights, l=k+1.

    Row n contributes (n+1)/n * v_l(n+1)/v_k(n+1)
    + v_l(n+1) sum_{m<n} 1/(m v_k(m+1)); bounded exactly when the space
    is nuclear.
    """
    alpha = W.alpha
    l = k + 1
    if alpha.max_index is not None:
        horizon = min(horizon, alpha.max_index - 1)
    ns = np.arange(1, horizon + 1)
    lw_l = W.log_weights(l, ns + 1)
    lw_k = W.log_weights(k, ns + 1)
    log_n = np.log(ns.astype(float))
    # prefix log-sum of 1/(m v_k(m+1))
    prefix = np.logaddexp.accumulate(-log_n - lw_k)
    diag_term = np.log1p(1.0 / ns) + lw_l - lw_k
    rows = np.array(diag_term)
    rows[1:] = np.logaddexp(diag_term[1:], lw_l[1:] + prefix[:-1])
    i = int(np.argmax(rows))
    sup = float(np.exp(min(rows[i], 709.0)))
    cut = max(horizon // 10, 1)
    grew = (float(np.max(rows[ns > cut]))
            > float(np.max(rows[ns <= cut])) + 1e-9
            if (ns > cut).any() else False)
    declared = alpha.flag("nuclear")
    if declared is True:
        status = "holds"
        override = True
    elif declared is False:
        status = "fails"
        override = True
    elif rows[i] > math.log(1e3) and grew:
        status = "fails"
        override = False
    else:
        status = "inconclusive"
        override = False
    return GrowthVerdict(status, int(horizon), sup, int(ns[i]), override)
