"""Concrete triangular operators, weighted norms and continuity tests.

Two arithmetic tiers are used throughout: exact rationals / big-integer
binomials for the small-N identity checks (the averaging matrix, its
similarity to diag(1/n), the involution), and double precision with
log-domain weight conjugation for everything scanned to large horizons.
All declared-triangular operators commute with truncation exactly, so a
finite section is a faithful witness; the differentiation operator is
the one super-diagonal case and its truncated output is declared one
coordinate shorter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .weights import GrowthVerdict, WeightFamily

__all__ = [
    "TriangularOperator",
    "TruncatedMatrix",
    "WeightedVector",
    "N_EXACT",
    "cesaro_apply",
    "cesaro_inverse_apply",
    "diff_apply",
    "shift_apply",
    "diag_apply",
    "delta_apply",
    "delta_row",
    "delta_log_abs",
    "cesaro_operator",
    "delta_operator",
    "shift_operator",
    "diag_operator",
    "identity_operator",
    "cesaro_matrix_exact",
    "delta_matrix_exact",
    "verify_factorizations",
    "weighted_norm",
    "conjugate_to_c0",
    "c0_continuity_test",
    "step_continuity_test",
]

N_EXACT = 64          # exact big-integer tier for identity checks
N_DOUBLE_BINOM = 1020  # binom(n-1, k) overflows double beyond this
IDENTITY_RTOL = 1e-10
COLUMN_DECAY_TOL = 1e-6


@dataclass
class WeightedVector:
    """Finite coordinate vector tagged with the weight step of its norm."""

    values: list
    step_k: int = 1

    def __post_init__(self):
        self.values = list(self.values)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _vals(x):
    return x.values if isinstance(x, WeightedVector) else list(x)


@dataclass
class TruncatedMatrix:
    entries: np.ndarray
    provenance: str

    @property
    def N(self):
        return self.entries.shape[0]

    def to_csv(self, path):
        """Row-major CSV, complex entries as "re,im" pairs."""
        with open(path, "w") as fh:
            for row in self.entries:
                fh.write(",".join(f"{z.real:.17g},{z.imag:.17g}"
                                  for z in row) + "\n")


@dataclass
class TriangularOperator:
    """Lazily evaluated infinite matrix, entry(n, m) with 1-based indices.

    ``structure`` is one of "lower", "subdiagonal", "superdiagonal",
    "diagonal"; the differentiation operator is the single permitted
    non-lower case.  ``log_abs_entry`` optionally supplies
    log|entry(n,m)| directly for matrices whose entries overflow double
    precision (signed binomials, conjugated weights).
    """

    entry: object
    name: str = "operator"
    structure: str = "lower"
    log_abs_entry: object = field(default=None)

    def truncate(self, N):
        if self.name == "delta" and N > N_DOUBLE_BINOM:
            raise OverflowError(
                f"dense double truncation of delta limited to "
                f"N <= {N_DOUBLE_BINOM}")
        A = np.zeros((N, N), dtype=complex)
        for n in range(1, N + 1):
            hi = n if self.structure in ("lower", "subdiagonal") else N
            for m in range(1, hi + 1):
                A[n - 1, m - 1] = self.entry(n, m)
        return TruncatedMatrix(A, f"{self.name}@N={N}")


# ---------------------------------------------------------------------------
# coordinatewise applications (dtype-agnostic: Fractions, floats, complex)

def _one_over(n, like):
    return Fraction(1, n) if isinstance(like, Fraction) else 1.0 / n


def cesaro_apply(x):
    """(x_1, (x_1+x_2)/2, ..., (x_1+...+x_n)/n)."""
    vals = _vals(x)
    out, acc = [], 0
    for n, v in enumerate(vals, start=1):
        acc = acc + v
        out.append(acc * _one_over(n, acc))
    return out


def cesaro_inverse_apply(y):
    """(n y_n - (n-1) y_{n-1}) with the y_0 := 0 convention."""
    vals = _vals(y)
    out, prev = [], 0
    for n, v in enumerate(vals, start=1):
        out.append(n * v - (n - 1) * prev)
        prev = v
    return out


def diff_apply(x):
    """(x_2, 2 x_3, 3 x_4, ...); truncated output has length N-1."""
    vals = _vals(x)
    return [n * vals[n] for n in range(1, len(vals))]


def shift_apply(x):
    vals = _vals(x)
    zero = Fraction(0) if vals and isinstance(vals[0], Fraction) else 0
    return [zero] + vals


def diag_apply(d, x):
    vals = _vals(x)
    return [d(n) * v for n, v in enumerate(vals, start=1)]


def delta_apply(x, n_exact=N_EXACT):
    """Signed-binomial involution applied to a truncated vector.

    Exact big-integer binomials up to the exact tier; log-domain
    magnitudes are available separately via delta_log_abs for large
    indices.
    """
    vals = _vals(x)
    N = len(vals)
    if N > n_exact and N > N_DOUBLE_BINOM:
        raise OverflowError(
            f"dense delta application limited to N <= {N_DOUBLE_BINOM}")
    out = []
    for n in range(1, N + 1):
        acc = 0
        for m in range(1, n + 1):
            c = math.comb(n - 1, m - 1)
            acc = acc + (c if (m % 2) else -c) * vals[m - 1]
        out.append(acc)
    return out


def delta_row(n, length):
    """First ``length`` entries of row n of the involution matrix."""
    return [((-1) ** (m - 1)) * math.comb(n - 1, m - 1) if m <= n else 0
            for m in range(1, length + 1)]


def delta_log_abs(n, m):
    """log|Delta_{nm}| = log binom(n-1, m-1), -inf above the diagonal."""
    if m > n:
        return -math.inf
    return (math.lgamma(n) - math.lgamma(m) - math.lgamma(n - m + 1))


# ---------------------------------------------------------------------------
# operator objects

def cesaro_operator():
    return TriangularOperator(
        lambda n, m: 1.0 / n if m <= n else 0.0, "cesaro", "lower")


def delta_operator():
    def entry(n, m):
        if m > n:
            return 0.0
        return float((-1) ** (m - 1) * math.comb(n - 1, m - 1))
    return TriangularOperator(entry, "delta", "lower",
                              log_abs_entry=delta_log_abs)


def shift_operator():
    return TriangularOperator(
        lambda n, m: 1.0 if m == n - 1 else 0.0, "shift", "subdiagonal")


def diag_operator(d, name="diag"):
    return TriangularOperator(
        lambda n, m: d(n) if m == n else 0.0, name, "diagonal")


def identity_operator():
    return TriangularOperator(
        lambda n, m: 1.0 if m == n else 0.0, "identity", "diagonal")


# ---------------------------------------------------------------------------
# exact matrices and factorization checks

def cesaro_matrix_exact(N):
    return [[Fraction(1, n) if m <= n else Fraction(0)
             for m in range(1, N + 1)] for n in range(1, N + 1)]


def delta_matrix_exact(N):
    return [[(-1) ** (m - 1) * math.comb(n - 1, m - 1) if m <= n else 0
             for m in range(1, N + 1)] for n in range(1, N + 1)]


def _mat_mul(A, B):
    N, K, M = len(A), len(B), len(B[0])
    return [[sum(A[i][k] * B[k][j] for k in range(K)) for j in range(M)]
            for i in range(N)]


def verify_factorizations(N, rng=None):
    """Exact checks of the two factorizations of the averaging matrix.

    Returns a dict with the (exact) deviations of
      * involution squared = identity,
      * averaging = involution . diag(1/n) . involution,
      * inverse-averaging = (I - right shift) . differentiation . right
        shift, checked coordinatewise on the first N-1 coordinates of
        random rational vectors.
    """
    if N > N_EXACT:
        raise ValueError(f"exact tier limited to N <= {N_EXACT}")
    delta = delta_matrix_exact(N)
    dd = _mat_mul(delta, delta)
    ident = [[1 if i == j else 0 for j in range(N)] for i in range(N)]
    dev_invol = max(abs(dd[i][j] - ident[i][j])
                    for i in range(N) for j in range(N))

    diag = [[Fraction(1, i + 1) if i == j else Fraction(0)
             for j in range(N)] for i in range(N)]
    sim = _mat_mul(_mat_mul(delta, diag), delta)
    ces = cesaro_matrix_exact(N)
    dev_sim = max(abs(sim[i][j] - ces[i][j])
                  for i in range(N) for j in range(N))

    rng = rng or np.random.default_rng(0)
    dev_inv = Fraction(0)
    for _ in range(10):
        y = [Fraction(int(a), int(b)) for a, b in
             zip(rng.integers(-99, 100, N), rng.integers(1, 50, N))]
        lhs = _factored_inverse_apply(y)
        rhs = cesaro_inverse_apply(y)[: N - 1]
        dev_inv = max(dev_inv, max((abs(a - b) for a, b in zip(lhs, rhs)),
                                   default=Fraction(0)))
    return {
        "N": N,
        "involution_squared_deviation": dev_invol,
        "similarity_deviation": dev_sim,
        "shift_diff_factorization_deviation": dev_inv,
    }


def _factored_inverse_apply(y):
    """(I - S_r) D S_r applied at truncation; output length N-1."""
    shifted = shift_apply(y)             # length N+1
    z = diff_apply(shifted)              # length N: (1*y_1, 2*y_2, ...)
    out = []
    prev = 0
    for n in range(len(z) - 1):
        out.append(z[n] - prev)
        prev = z[n]
    return out


# ---------------------------------------------------------------------------
# weighted norms and c0 conjugation

def weighted_norm(x, W: WeightFamily, k):
    """q_k(x) = max_n v_k(n) |x_n|, evaluated in log domain."""
    vals = _vals(x)
    best = 0.0
    for n, v in enumerate(vals, start=1):
        a = abs(v)
        if a == 0:
            continue
        best = max(best, math.exp(W.log_weight(k, n) + math.log(a)))
    return best


def conjugate_to_c0(A: TriangularOperator, W: WeightFamily, k, l):
    """Similarity transform v_l(n)/v_k(m) * entry(n, m), in log domain.

    This is the weighted-step operator viewed as a plain c0 matrix; the
    ratio 1/v_k(m) alone overflows double precision, so the two log
    weights are combined before exponentiation.
    """
    if l < k:
        raise ValueError("need l >= k")

    if A.log_abs_entry is not None:
        base_log = A.log_abs_entry

        def log_abs(n, m):
            lv = base_log(n, m)
            if lv == -math.inf:
                return -math.inf
            return W.log_weight(l, n) - W.log_weight(k, m) + lv
    else:
        log_abs = None

    def entry(n, m):
        v = A.entry(n, m)
        if v == 0:
            return 0.0
        scale = W.log_weight(l, n) - W.log_weight(k, m)
        return v * math.exp(scale)

    return TriangularOperator(entry, f"conj({A.name},{k},{l})", A.structure,
                              log_abs_entry=log_abs)


def c0_continuity_test(A: TriangularOperator, horizon, col_check,
                       tol=COLUMN_DECAY_TOL):
    """Row-sum / column-decay evidence that a matrix acts on c0.

    row_sup is the largest absolute row sum over rows n <= horizon;
    column_decay holds when each of the first ``col_check`` columns has
    decayed at row ``horizon`` to below tol times its column maximum.
    """
    if not (horizon >= col_check >= 1):
        raise ValueError("need horizon >= col_check >= 1")

    def a_abs(n, m):
        if A.log_abs_entry is not None:
            lv = A.log_abs_entry(n, m)
            return 0.0 if lv == -math.inf else math.exp(min(lv, 700.0))
        return abs(A.entry(n, m))

    row_sup = 0.0
    col_max = [0.0] * col_check
    last_row = [0.0] * col_check
    for n in range(1, horizon + 1):
        hi = n if A.structure in ("lower", "subdiagonal") else horizon
        s = 0.0
        for m in range(1, hi + 1):
            v = a_abs(n, m)
            s += v
            if m <= col_check:
                col_max[m - 1] = max(col_max[m - 1], v)
                if n == horizon:
                    last_row[m - 1] = v
        row_sup = max(row_sup, s)
    column_decay = all(
        last <= tol * mx for last, mx in zip(last_row, col_max) if mx > 0)
    return {
        "row_sup": row_sup,
        "column_decay": column_decay,
        "continuous_evidence": bool(row_sup < math.inf and column_decay),
    }


# ---------------------------------------------------------------------------
# step-to-step continuity criteria

STEP_OPS = ("cesaro", "cesaro_inverse", "diff", "delta", "shift")


def step_continuity_test(op_name, W: WeightFamily, k, l, horizon=10 ** 4):
    """Operator-specific criterion for continuity c0(v_k) -> c0(v_l).

    diff:           sup_n n v_l(n) / v_k(n+1)
    cesaro_inverse: sup_n n v_l(n) / v_k(n)
    delta:          sup_n sum_m (v_l(n)/v_k(m)) binom(n-1, m-1)
    cesaro:         sup_n (v_l(n)/n) sum_m 1/v_k(m)
    shift:          sup_n v_l(n+1) / v_k(n)
    """
    if op_name not in STEP_OPS:
        raise ValueError(f"unknown operator {op_name!r}; one of {STEP_OPS}")
    if l < k:
        raise ValueError("need l >= k")
    alpha = W.alpha
    if alpha.max_index is not None:
        horizon = min(horizon, alpha.max_index - 1)
    ns = np.arange(1, horizon + 1)
    lw_l = W.log_weights(l, ns)
    lw_k = W.log_weights(k, ns)
    log_n = np.log(ns.astype(float))

    if op_name == "diff":
        lw_k_next = W.log_weights(k, ns + 1)
        log_ratios = log_n + lw_l - lw_k_next
    elif op_name == "cesaro_inverse":
        log_ratios = log_n + lw_l - lw_k
    elif op_name == "shift":
        lw_l_next = W.log_weights(l, ns + 1)
        log_ratios = lw_l_next - lw_k
    elif op_name == "cesaro":
        prefix = _logsumexp_accumulate(-lw_k)  # log sum_{m<=n} 1/v_k(m)
        log_ratios = lw_l - log_n + prefix
    else:  # delta: row sums via log-sum-exp over each row
        log_ratios = np.empty(horizon)
        for i, n in enumerate(ns):
            ms = np.arange(1, n + 1)
            terms = (lw_l[i] - lw_k[: n]
                     + _log_binom(int(n) - 1, ms - 1))
            log_ratios[i] = _logsumexp(terms)
    return _bounded_verdict(log_ratios, ns, int(horizon))


def _log_binom(n, ks):
    ks = np.asarray(ks, dtype=float)
    return (math.lgamma(n + 1)
            - np.vectorize(math.lgamma)(ks + 1)
            - np.vectorize(math.lgamma)(n - ks + 1))


def _logsumexp(terms):
    m = np.max(terms)
    if m == -math.inf:
        return -math.inf
    return float(m + math.log(np.sum(np.exp(terms - m))))


def _logsumexp_accumulate(terms):
    """Running log of prefix sums of exp(terms), entirely in log domain."""
    return np.logaddexp.accumulate(terms)


def _bounded_verdict(log_ratios, ns, horizon,
                     threshold=math.log(1e3)):
    """Boundedness decision shared by the step criteria.

    bounded (holds) when the supremum stays under the divergence
    threshold and did not grow over the last decade of the scan;
    divergent (fails) when it crossed the threshold while still growing;
    inconclusive otherwise.
    """
    i = int(np.argmax(log_ratios))
    with np.errstate(over="ignore"):
        sup = float(np.exp(log_ratios[i]))
    cut = max(horizon // 10, int(ns[0]))
    early = log_ratios[ns <= cut]
    late = log_ratios[ns > cut]
    grew = late.size > 0 and (early.size == 0
                              or late.max() > early.max() + 1e-9)
    if log_ratios[i] <= threshold and not grew:
        status = "holds"
    elif log_ratios[i] > threshold and grew:
        status = "fails"
    else:
        status = "inconclusive"
    return GrowthVerdict(status, horizon, sup, int(ns[i]), False)
