"""Alpha sequences, derived weight families and the growth predicates.

Everything downstream (operator continuity, spectrum classification,
ergodic bounds) is driven by boundedness of a handful of ratios such as
log(n)/alpha_n or alpha_{n+1}/alpha_n.  A finite scan cannot decide a
supremum over all of N, so every predicate returns a GrowthVerdict whose
status is ``holds``/``fails`` only when a declared ground-truth flag
decides it or the numeric evidence is conclusively divergent; otherwise
the status is ``inconclusive`` and the scan evidence is attached.
"""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AlphaSequence",
    "WeightFamily",
    "GrowthVerdict",
    "PRESET_NAMES",
    "make_alpha",
    "make_alpha_from_csv",
    "check_nuclear",
    "check_lemma22",
    "check_shift_stable",
    "check_delta_criterion",
    "check_loglog",
]

DIVERGENCE_THRESHOLD = 1e3
M_MAX = 64
LEMMA22_LOG_BOUND = math.log(1e12)

FLAG_NAMES = ("nuclear", "shift_stable", "delta_continuous", "loglog_finite")


class MonotonicityError(ValueError):
    """Raised when an evaluated alpha value breaks strict increase."""


@dataclass
class GrowthVerdict:
    status: str  # "holds" | "fails" | "inconclusive"
    horizon: int
    sup_value: float
    witness_index: int
    declared_override: bool = False

    def __post_init__(self):
        if self.status not in ("holds", "fails", "inconclusive"):
            raise ValueError(f"bad status {self.status!r}")


class AlphaSequence:
    """A positive, strictly increasing sequence n -> alpha_n (n >= 1).

    Values are exposed both directly (``value``) and in log form
    (``log_value``); the latter stays finite for sequences like n^n whose
    values overflow double precision.  Evaluation is memoized; strict
    monotonicity is checked against already-evaluated neighbours and any
    decrease is a hard error.  Equality of adjacent *floats* is tolerated
    only when the underlying increment falls below double resolution
    (relevant for the appendix staircase sequence deep inside a block).
    """

    def __init__(self, name, value_fn=None, log_fn=None, *, vec_log_fn=None,
                 declared_flags=None, max_index=None):
        if value_fn is None and log_fn is None:
            raise ValueError("need value_fn or log_fn")
        self.name = name
        self._value_fn = value_fn
        self._log_fn = log_fn
        self._vec_log_fn = vec_log_fn
        self.max_index = max_index
        self.declared_flags = dict.fromkeys(FLAG_NAMES)
        if declared_flags:
            for key, val in declared_flags.items():
                if key not in FLAG_NAMES:
                    raise ValueError(f"unknown flag {key!r}")
                self.declared_flags[key] = val
        self._memo = {}
        self._lock = threading.Lock()

    def flag(self, name):
        return self.declared_flags[name]

    def _raw(self, n):
        """Return (value, log_value) without monotonicity checking."""
        if self._value_fn is not None:
            v = float(self._value_fn(n))
            lg = math.log(v) if v < math.inf else (
                self._log_fn(n) if self._log_fn else math.inf)
        else:
            lg = float(self._log_fn(n))
            v = math.exp(lg) if lg < 709.0 else math.inf
        return v, lg

    def _eval(self, n):
        n = int(n)
        if n < 1:
            raise ValueError(f"index must be >= 1, got {n}")
        if self.max_index is not None and n > self.max_index:
            raise IndexError(
                f"alpha {self.name!r} only defined up to n={self.max_index}")
        cached = self._memo.get(n)
        if cached is not None:
            return cached
        v, lg = self._raw(n)
        if not (v > 0.0):
            raise ValueError(f"alpha_{n} = {v} is not positive ({self.name})")
        for nb, incr in ((n - 1, True), (n + 1, False)):
            other = self._memo.get(nb)
            if other is None:
                continue
            lo, hi = (other, (v, lg)) if incr else ((v, lg), other)
            # compare plain values when both finite, logs otherwise
            if math.isfinite(lo[0]) and math.isfinite(hi[0]):
                dec = hi[0] < lo[0]
            else:
                dec = hi[1] < lo[1]
            if dec:
                raise MonotonicityError(
                    f"alpha {self.name!r} not strictly increasing at n={n}")
        with self._lock:
            self._memo[n] = (v, lg)
        return v, lg

    def value(self, n):
        return self._eval(n)[0]

    __call__ = value

    def log_value(self, n):
        return self._eval(n)[1]

    def log_values(self, ns):
        """Vectorized log(alpha_n) over an integer array.

        Monotonicity is checked batch-wise (adjacent differences), which
        keeps horizon-1e6 scans cheap.
        """
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size and ns.min() < 1:
            raise ValueError("indices must be >= 1")
        if self.max_index is not None and ns.size and ns.max() > self.max_index:
            raise IndexError(
                f"alpha {self.name!r} only defined up to n={self.max_index}")
        if self._vec_log_fn is not None:
            out = np.asarray(self._vec_log_fn(ns), dtype=float)
        else:
            out = np.array([self._eval(int(n))[1] for n in ns], dtype=float)
        if ns.size > 1 and np.all(np.diff(ns) == 1) and np.any(np.diff(out) < 0):
            raise MonotonicityError(
                f"alpha {self.name!r} not strictly increasing in batch")
        return out


@dataclass
class WeightFamily:
    """Decreasing weights v_k(n) = s_k^(-alpha_n) in log form.

    ``log_base(k)`` is log(s_k); the default preset is s_k = e^k so that
    log v_k(n) = -k * alpha_n.
    """

    alpha: AlphaSequence
    log_base: object = field(default=None)

    def __post_init__(self):
        if self.log_base is None:
            self.log_base = lambda k: float(k)

    def log_weight(self, k, n):
        return -self.alpha.value(n) * self.log_base(k)

    def log_weights(self, k, ns):
        la = self.alpha.log_values(ns)
        with np.errstate(over="ignore"):
            return -np.exp(la) * self.log_base(k)

    def weight(self, k, n):
        return math.exp(self.log_weight(k, n))


# ---------------------------------------------------------------------------
# presets

_LOGLOG_FIRST_N = 27  # 3**3, first index where log(log(n)) > 1
_LOGLOG_FIRST_VAL = math.log(math.log(_LOGLOG_FIRST_N))
_L3_FIRST_N = 3 ** 27  # 7 625 597 484 987
_L3_FIRST_VAL = math.log(math.log(math.log(_L3_FIRST_N)))


def _ramp(n, n_first, v_first):
    """Strictly increasing padding below the first defined value.

    The head of the sequence is free as long as it stays positive and
    strictly increasing, so a linear ramp from just above 1 (or above 0
    when the first defined value is itself <= 1) up to v_first is used.
    """
    if v_first > 1.0:
        return 1.0 + (v_first - 1.0) * n / n_first
    return v_first * n / n_first


def _loglog_val(n):
    if n >= _LOGLOG_FIRST_N:
        return math.log(math.log(n))
    return _ramp(n, _LOGLOG_FIRST_N, _LOGLOG_FIRST_VAL)


def _loglog_vec(ns):
    ns = np.asarray(ns, dtype=float)
    out = np.where(ns >= _LOGLOG_FIRST_N,
                   np.log(np.log(np.maximum(ns, 3.0))),
                   _ramp(ns, _LOGLOG_FIRST_N, _LOGLOG_FIRST_VAL))
    return np.log(out)


def _l3_val(n):
    if n >= _L3_FIRST_N:
        return math.log(math.log(math.log(n)))
    return _ramp(n, _L3_FIRST_N, _L3_FIRST_VAL)


def _l3_vec(ns):
    ns = np.asarray(ns, dtype=float)
    out = np.where(ns >= _L3_FIRST_N,
                   np.log(np.maximum(np.log(np.log(np.maximum(ns, 16.0))), 1e-300)),
                   _ramp(ns, float(_L3_FIRST_N), _L3_FIRST_VAL))
    return np.log(out)


_LOGN_FIRST_N = 2
_LOGN_FIRST_VAL = math.log(2.0)


def _logn_val(n):
    if n >= _LOGN_FIRST_N:
        return math.log(n)
    return _ramp(n, _LOGN_FIRST_N, _LOGN_FIRST_VAL)


def _logn_vec(ns):
    ns = np.asarray(ns, dtype=float)
    return np.log(np.where(ns >= _LOGN_FIRST_N,
                           np.log(np.maximum(ns, 2.0)),
                           _ramp(ns, _LOGN_FIRST_N, _LOGN_FIRST_VAL)))


class _Appendix53:
    """alpha_n = log(beta_n + gamma_n) from the appendix staircase.

    j(1) = 1 and j(k+1) = 2(k+1) j(k)^k; beta_n = k j(k)^k on the block
    [j(k), j(k+1)); gamma_n = 3 - 1/(n+1) (any strictly increasing
    sequence with 2 < gamma_n up to 3 is admissible; this closed form is
    fixed for reproducibility).  All index arithmetic uses Python ints,
    so block boundaries far beyond double range remain exact.
    """

    def __init__(self):
        self._j = [1, 1]  # j[k] for k >= 1; j[0] unused

    def j(self, k):
        while len(self._j) <= k:
            kk = len(self._j) - 1
            self._j.append(2 * (kk + 1) * self._j[kk] ** kk)
        return self._j[k]

    def block_of(self, n):
        k = 1
        while self.j(k + 1) <= n:
            k += 1
        return k

    def beta(self, n):
        k = self.block_of(n)
        return k * self.j(k) ** k

    def __call__(self, n):
        n = int(n)
        b = self.beta(n)
        g = 3.0 - 1.0 / (n + 1)
        if b.bit_length() > 1000:
            return math.log(b)  # gamma is negligible at this scale
        return math.log(b + g)


_APPENDIX53 = _Appendix53()


def _appendix53_vec(ns):
    ns = np.asarray(ns, dtype=np.int64)
    top = int(ns.max())
    k_top = _APPENDIX53.block_of(top)
    bounds = np.array([_APPENDIX53.j(k) for k in range(1, k_top + 2)],
                      dtype=float)
    blocks = np.searchsorted(bounds, ns.astype(float), side="right")  # 1-based
    log_beta = np.array(
        [math.log(_APPENDIX53.beta(_APPENDIX53.j(k)))
         for k in range(1, k_top + 1)], dtype=float)
    lb = log_beta[blocks - 1]
    gamma = 3.0 - 1.0 / (ns.astype(float) + 1.0)
    alpha = lb + np.log1p(gamma * np.exp(-np.minimum(lb, 700.0))
                          * (lb < 700.0))
    return np.log(alpha)


def _preset(name, value_fn, vec_log_fn, flags, **kw):
    return AlphaSequence(name, value_fn=value_fn, vec_log_fn=vec_log_fn,
                         declared_flags=flags, **kw)


_PRESETS = {
    "n": lambda: _preset(
        "n", lambda n: float(n), lambda ns: np.log(ns.astype(float)),
        dict(nuclear=True, shift_stable=True, delta_continuous=True,
             loglog_finite=True)),
    "log_n_plus_1": lambda: _preset(
        "log_n_plus_1", lambda n: math.log(n + 1),
        lambda ns: np.log(np.log(ns.astype(float) + 1.0)),
        dict(nuclear=True, shift_stable=True, delta_continuous=False,
             loglog_finite=True)),
    "log_n": lambda: _preset(
        "log_n", _logn_val, _logn_vec,
        dict(nuclear=True, shift_stable=True, delta_continuous=False,
             loglog_finite=True)),
    "sqrt_n": lambda: _preset(
        "sqrt_n", lambda n: math.sqrt(n),
        lambda ns: 0.5 * np.log(ns.astype(float)),
        dict(nuclear=True, shift_stable=True, delta_continuous=False,
             loglog_finite=True)),
    "n_pow_n": lambda: AlphaSequence(
        "n_pow_n",
        value_fn=lambda n: float(n) ** n if n < 144 else math.inf,
        log_fn=lambda n: n * math.log(n) if n > 1 else 0.0,
        vec_log_fn=lambda ns: ns.astype(float) * np.log(ns.astype(float)),
        declared_flags=dict(nuclear=True, shift_stable=False,
                            delta_continuous=True, loglog_finite=True)),
    "loglog_n": lambda: _preset(
        "loglog_n", _loglog_val, _loglog_vec,
        dict(nuclear=False, shift_stable=True, delta_continuous=False,
             loglog_finite=True)),
    "logloglog_n": lambda: _preset(
        "logloglog_n", _l3_val, _l3_vec,
        dict(nuclear=False, shift_stable=True, delta_continuous=False,
             loglog_finite=False)),
    "appendix_5_3": lambda: _preset(
        "appendix_5_3", _APPENDIX53, _appendix53_vec,
        dict(nuclear=True, shift_stable=False, delta_continuous=False,
             loglog_finite=True)),
}

PRESET_NAMES = tuple(_PRESETS)


def make_alpha(preset_or_generator, name=None, declared_flags=None):
    """Build an AlphaSequence from a preset name or a custom generator."""
    if isinstance(preset_or_generator, str):
        try:
            factory = _PRESETS[preset_or_generator]
        except KeyError:
            raise ValueError(
                f"unknown preset {preset_or_generator!r}; "
                f"choose from {sorted(_PRESETS)}") from None
        return factory()
    alpha = AlphaSequence(name or "custom", value_fn=preset_or_generator,
                          declared_flags=declared_flags)
    # fail fast on generators that are decreasing right at the start
    alpha.value(1), alpha.value(2)
    return alpha


def make_alpha_from_csv(path, name=None):
    """Custom alpha from a CSV of (n, alpha_n) pairs, no extrapolation.

    The horizon of every predicate is capped at the largest index in the
    file.
    """
    table = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            n, val = int(row[0]), float(row[1])
            table[n] = val
    if not table:
        raise ValueError(f"no data rows in {path}")
    top = max(table)
    if set(table) != set(range(1, top + 1)):
        raise ValueError(f"{path}: indices must be exactly 1..{top}")
    return AlphaSequence(name or f"file:{path}",
                         value_fn=lambda n: table[n], max_index=top)


# ---------------------------------------------------------------------------
# predicates

def _scan_horizon(alpha, horizon):
    if alpha.max_index is not None:
        horizon = min(horizon, alpha.max_index)
    return int(horizon)


def _resolve(log_ratios, ns, declared, horizon,
             threshold=DIVERGENCE_THRESHOLD):
    """Turn a scan of log-ratios into a GrowthVerdict.

    Decision rule: a declared flag wins outright; otherwise the status is
    ``fails`` only when the supremum exceeds the divergence threshold AND
    the running supremum still grew in the last decade of the scan;
    everything else is ``inconclusive`` evidence.
    """
    i = int(np.argmax(log_ratios))
    with np.errstate(over="ignore"):
        sup = float(np.exp(log_ratios[i]))
    witness = int(ns[i])
    if declared is True:
        return GrowthVerdict("holds", horizon, sup, witness, True)
    if declared is False:
        return GrowthVerdict("fails", horizon, sup, witness, True)
    cut = max(horizon // 10, int(ns[0]))
    early = log_ratios[ns <= cut]
    late = log_ratios[ns > cut]
    grew = late.size > 0 and (early.size == 0
                              or late.max() > early.max() + 1e-9)
    if sup > threshold and grew:
        return GrowthVerdict("fails", horizon, sup, witness, False)
    return GrowthVerdict("inconclusive", horizon, sup, witness, False)


def check_nuclear(alpha, horizon=10 ** 5):
    """Boundedness evidence for sup_n log(n)/alpha_n."""
    horizon = _scan_horizon(alpha, horizon)
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    ns = np.arange(2, horizon + 1)
    la = alpha.log_values(ns)
    ratios = np.log(np.log(ns.astype(float))) - la
    return _resolve(ratios, ns, alpha.flag("nuclear"), horizon)


def check_shift_stable(alpha, horizon=10 ** 5):
    """Boundedness evidence for sup_n alpha_{n+1}/alpha_n."""
    if alpha.max_index is not None:
        horizon = min(horizon, alpha.max_index - 1)
    horizon = _scan_horizon(alpha, horizon)
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    ns = np.arange(1, horizon + 1)
    la = alpha.log_values(np.arange(1, horizon + 2))
    ratios = la[1:] - la[:-1]
    return _resolve(ratios, ns, alpha.flag("shift_stable"), horizon)


def check_delta_criterion(alpha, horizon=10 ** 5):
    """Boundedness evidence for sup_n n/alpha_n."""
    horizon = _scan_horizon(alpha, horizon)
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    ns = np.arange(1, horizon + 1)
    la = alpha.log_values(ns)
    ratios = np.log(ns.astype(float)) - la
    return _resolve(ratios, ns, alpha.flag("delta_continuous"), horizon)


def check_loglog(alpha, horizon=10 ** 5):
    """Boundedness evidence for sup_n log(log(n))/alpha_n."""
    horizon = _scan_horizon(alpha, horizon)
    if horizon < 3:
        raise ValueError("horizon must be >= 3")
    ns = np.arange(3, horizon + 1)
    la = alpha.log_values(ns)
    ratios = np.log(np.log(np.log(ns.astype(float)))) - la
    return _resolve(ratios, ns, alpha.flag("loglog_finite"), horizon)


def check_lemma22(alpha, gamma, horizon=10 ** 5, m_max=M_MAX,
                  log_bound=LEMMA22_LOG_BOUND):
    """Smallest M with sup_n n^gamma e^(-M alpha_n) below the bound.

    Returns (M, verdict); M is None (status fails) when no M <= m_max
    keeps the scanned supremum under the bound.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    horizon = _scan_horizon(alpha, horizon)
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    ns = np.arange(1, horizon + 1)
    la = alpha.log_values(ns)
    with np.errstate(over="ignore"):
        av = np.exp(la)
    glog = gamma * np.log(ns.astype(float))
    for m in range(1, m_max + 1):
        with np.errstate(invalid="ignore"):
            vals = glog - m * av
        vals = np.where(np.isnan(vals), -np.inf, vals)
        if vals.max() <= log_bound:
            i = int(np.argmax(vals))
            sup = float(np.exp(vals[i]))
            return m, GrowthVerdict("holds", horizon, sup, int(ns[i]), False)
    with np.errstate(invalid="ignore", over="ignore"):
        vals = glog - m_max * av
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    with np.errstate(over="ignore"):
        sup = float(np.exp(vals[i]))
    return None, GrowthVerdict("fails", horizon, sup, int(ns[i]), False)
