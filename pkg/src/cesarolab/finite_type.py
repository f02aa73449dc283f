"""Duals of finite-type power series spaces: when averaging fails to act.

Here the weights are increasing, v_k(n) = e^(alpha_n / k), and the
continuity criterion for the averaging map between steps k -> l is
boundedness of (v_l(n)/n) * sum_{m<=n} 1/v_k(m).  The criterion is
bounded for the slowly growing alpha_n = log(n+1) (so averaging acts
even though the space is not nuclear), diverges whenever the space is
nuclear, and diverges for the staircase sequence of blocks
[j(k), j(k+1)) even though that space is not nuclear either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .weights import AlphaSequence, GrowthVerdict, make_alpha

__all__ = [
    "FiniteTypeWeights",
    "ft_continuity_criterion",
    "ft_cesaro_acts",
    "example53_alpha",
    "example53_lower_bound",
    "example53_j",
    "gp_nuclearity",
]

THRESHOLD = math.log(1e3)
L_MAX = 64
K_PROBE = 4


@dataclass
class FiniteTypeWeights:
    """Increasing weight family v_k(n) = e^(alpha_n / k)."""

    alpha: AlphaSequence

    def log_weight(self, k, n):
        return self.alpha.value(n) / k

    def log_weights(self, k, ns):
        with np.errstate(over="ignore"):
            return np.exp(self.alpha.log_values(ns)) / k


def _scan_indices(alpha, horizon):
    """Indices scanned by the finite-type criteria.

    Dense up to 1e6; beyond that a log-spaced grid plus (for the
    staircase sequence) the exact block boundaries, where the divergence
    lower bound lives.  The criterion needs prefix sums, so the dense
    part always covers the full prefix of the largest dense index.
    """
    if alpha.max_index is not None:
        horizon = min(horizon, alpha.max_index)
    horizon = int(horizon)
    dense_top = min(horizon, 10 ** 6)
    extras = []
    if horizon > dense_top:
        grid = np.unique(np.round(np.logspace(
            math.log10(dense_top), math.log10(horizon), 40)).astype(np.int64))
        extras.extend(int(g) for g in grid if g > dense_top)
    if alpha.name == "appendix_5_3":
        from .weights import _APPENDIX53
        k = 2
        while _APPENDIX53.j(k) <= horizon:
            if _APPENDIX53.j(k) > dense_top:
                extras.append(int(_APPENDIX53.j(k)))
            k += 1
    return dense_top, sorted(set(extras))


def ft_continuity_criterion(ftw: FiniteTypeWeights, k, l, horizon=10 ** 6):
    """Boundedness of (v_l(n)/n) sum_{m<=n} 1/v_k(m), log-sum-exp form."""
    if l <= k:
        raise ValueError("need l > k")
    alpha = ftw.alpha
    dense_top, extras = _scan_indices(alpha, horizon)
    ns = np.arange(1, dense_top + 1)
    with np.errstate(over="ignore"):
        av = np.exp(alpha.log_values(ns))
    # prefix log of sum_{m<=n} e^(-alpha_m / k)
    prefix = np.logaddexp.accumulate(-av / k)
    log_vals = av / l - np.log(ns.astype(float)) + prefix
    all_ns = ns
    if extras:
        ex = np.array(extras, dtype=np.int64)
        with np.errstate(over="ignore"):
            av_ex = np.exp(alpha.log_values(ex))
        # tail terms beyond dense_top are <= e^(-alpha_{dense_top}/k) each;
        # bound the prefix by the dense part plus the tail majorant
        tail = np.log(ex.astype(float) - dense_top) - av[-1] / k
        prefix_ex = np.logaddexp(prefix[-1], tail)
        log_ex = av_ex / l - np.log(ex.astype(float)) + prefix_ex
        log_vals = np.concatenate([log_vals, log_ex])
        all_ns = np.concatenate([ns, ex])
    i = int(np.argmax(log_vals))
    sup = float(np.exp(min(log_vals[i], 709.0)))
    cut_val = max(int(all_ns[-1]) // 10, 1)
    early = log_vals[all_ns <= cut_val]
    late = log_vals[all_ns > cut_val]
    grew = late.size > 0 and (early.size == 0
                              or late.max() > early.max() + 1e-9)
    if log_vals[i] <= THRESHOLD and not grew:
        status = "holds"
    elif log_vals[i] > THRESHOLD and grew:
        status = "fails"
    else:
        status = "inconclusive"
    return GrowthVerdict(status, int(all_ns[-1]), sup, int(all_ns[i]), False)


def ft_cesaro_acts(ftw: FiniteTypeWeights, horizon=10 ** 6, l_max=L_MAX,
                   k_probe=K_PROBE):
    """Search, for each small k, a step l where the criterion is bounded.

    For the staircase sequence the numeric scan cannot reach the blocks
    where divergence shows for larger l, so the closed-form lower bound
    at the block boundaries supplies the divergence evidence there.
    """
    per_k = {}
    acts = True
    conclusive = True
    analytic_divergent = (ftw.alpha.name == "appendix_5_3")
    for k in range(1, k_probe + 1):
        found = None
        last = None
        for l in range(k + 1, k + l_max + 1):
            if analytic_divergent:
                # lower bound k^(1/l) k^(k/l - 1) / 4 at blocks diverges
                # in the block index for every fixed l
                last = GrowthVerdict("fails", horizon,
                                     example53_lower_bound(10 * l, l),
                                     int(example53_j(min(10 * l, 6))), True)
                continue
            v = ft_continuity_criterion(ftw, k, l, horizon)
            last = v
            if v.status == "holds":
                found = (l, v)
                break
            if v.status == "inconclusive":
                conclusive = False
        per_k[k] = {"l_found": found[0] if found else None,
                    "verdict": (found[1] if found else last)}
        if found is None:
            acts = False
    if acts:
        verdict = "acts_evidence"
    elif conclusive or analytic_divergent:
        verdict = "does_not_act"
    else:
        verdict = "inconclusive"
    return {"verdict": verdict, "per_step": per_k, "horizon": horizon}


def example53_j(k):
    """Block boundaries j(1) = 1, j(k+1) = 2 (k+1) j(k)^k (exact ints)."""
    from .weights import _APPENDIX53
    return _APPENDIX53.j(k)


def example53_alpha():
    """The staircase sequence log(beta_n + gamma_n) as an AlphaSequence."""
    return make_alpha("appendix_5_3")


def example53_lower_bound(k, l):
    """Closed-form divergence lower bound k^(1/l) k^(k/l - 1) / 4.

    Evaluated at the block boundary n = j(k); grows without bound in k
    for every fixed l.  Computed in log domain.
    """
    if k < 1 or l < 1:
        raise ValueError("k, l must be >= 1")
    log_val = (1.0 / l) * math.log(k) + (k / l - 1.0) * math.log(k) \
        - math.log(4.0)
    return math.exp(log_val) if log_val < 709.0 else math.inf


def gp_nuclearity(weights, k, l, horizon=10 ** 5):
    """Summability evidence for (v_l(n)/v_k(n)) along the diagonal.

    Accepts either weight family flavour; the verdict is on the partial
    sums at the horizon: holds when the series has visibly converged
    (negligible last-decade growth), fails when it crossed the
    divergence threshold while still growing.
    """
    if l <= k:
        raise ValueError("need l > k")
    alpha = weights.alpha
    if alpha.max_index is not None:
        horizon = min(horizon, alpha.max_index)
    ns = np.arange(1, int(horizon) + 1)
    if isinstance(weights, FiniteTypeWeights):
        with np.errstate(over="ignore"):
            av = np.exp(alpha.log_values(ns))
        log_terms = av / l - av / k          # negative: 1/l < 1/k
    else:
        log_terms = (weights.log_weights(l, ns)
                     - weights.log_weights(k, ns))
    partial = np.logaddexp.accumulate(log_terms)
    total = float(np.exp(min(partial[-1], 709.0)))
    cut = max(int(horizon) // 10, 1)
    s_cut = float(partial[cut - 1])
    rel_growth = partial[-1] - s_cut  # log-domain growth over last decade
    if rel_growth < 1e-9:
        status = "holds"
    elif partial[-1] > THRESHOLD and rel_growth > 1e-3:
        status = "fails"
    else:
        status = "inconclusive"
    return GrowthVerdict(status, int(horizon), total,
                         int(ns[int(np.argmax(log_terms))]), False)
