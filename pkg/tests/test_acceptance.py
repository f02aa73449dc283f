"""Acceptance gate: one test per criterion, each printing a PASS/FAIL
line with its pinned tolerance and staying inside its runtime budget."""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from cesarolab.cli import EXIT_OK, main as cli_main
from cesarolab.ergodic import iterates_limit_check, range_inverse_matrices
from cesarolab.finite_type import (FiniteTypeWeights, example53_alpha,
                                   example53_j, example53_lower_bound,
                                   ft_continuity_criterion)
from cesarolab.operators import (cesaro_apply, cesaro_inverse_apply,
                                 delta_matrix_exact, diff_apply, shift_apply,
                                 verify_factorizations)
from cesarolab.resolvent import (a_fn, dist_sigma0, equicontinuity_probe,
                                 product_log_prefix, resolvent_entries,
                                 u_fn, v_fn)
from cesarolab.spectrum import classify_spectrum, region_contains
from cesarolab.weights import PRESET_NAMES, WeightFamily, make_alpha

F = Fraction


def report(num, ok, detail):
    print(f"ACCEPTANCE {num} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def random_point(rng, min_dist=0.05, max_abs=3.0):
    while True:
        z = complex(rng.uniform(-max_abs, max_abs),
                    rng.uniform(-max_abs, max_abs))
        if abs(z) <= max_abs and dist_sigma0(z) > min_dist:
            return z


def test_criterion_1_exact_algebra():
    t0 = time.time()
    res = verify_factorizations(16)
    ok = (res["involution_squared_deviation"] == 0
          and res["similarity_deviation"] == 0)
    # shift-diff factorization on 100 random rational vectors, N = 16
    rng = np.random.default_rng(11)
    worst = F(0)
    for _ in range(100):
        y = [F(int(a), int(b)) for a, b in
             zip(rng.integers(-99, 100, 16), rng.integers(1, 60, 16))]
        z = diff_apply(shift_apply(y))
        lhs = [z[0]] + [z[n] - z[n - 1] for n in range(1, 15)]
        rhs = cesaro_inverse_apply(y)[:15]
        worst = max(worst, max(abs(a - b) for a, b in zip(lhs, rhs)))
    ok = ok and worst == 0
    elapsed = time.time() - t0
    ok = ok and elapsed < 1.0
    report(1, ok, f"exact algebra at N=16, zero deviation, 100 vectors, "
                  f"{elapsed:.2f}s < 1s")


def test_criterion_2_eigen_suite():
    t0 = time.time()
    N = 50
    delta = delta_matrix_exact(N)
    worst = F(0)
    for m in range(1, 11):
        col = [F(delta[n][m - 1]) for n in range(N)]
        lhs = cesaro_apply(col)
        rhs = [F(1, m) * v for v in col]
        worst = max(worst, max(abs(a - b) for a, b in zip(lhs, rhs)))
    elapsed = time.time() - t0
    ok = worst == 0 and elapsed < 1.0
    report(2, ok, f"eigenvectors m<=10 exact at N=50, {elapsed:.2f}s < 1s")


def test_criterion_3_sandwich():
    t0 = time.time()
    rng = np.random.default_rng(3)
    slack = math.log(1.001)  # 0.1 percent
    violations = 0
    for _ in range(200):
        lam = random_point(rng)
        a = a_fn(lam)
        u, v = u_fn(lam), v_fn(lam)
        log_u = math.log(u) if u > 0 else -math.inf
        log_v = math.log(v)
        prefix = product_log_prefix(lam, 10 ** 4)
        for N in (10, 100, 1000, 10000):
            p = float(prefix[N - 1])
            if p > log_v - a * math.log(N) + slack:
                violations += 1
            if p < log_u - a * math.log(N) - slack:
                violations += 1
    elapsed = time.time() - t0
    ok = violations == 0 and elapsed < 30.0
    report(3, ok, f"sandwich bounds, 200 lambdas, N up to 1e4, 0.1% slack, "
                  f"{violations} violations, {elapsed:.1f}s < 30s")


def test_criterion_4_resolvent_reconstruction():
    t0 = time.time()
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(50):
        mu = random_point(rng)
        worst = max(worst, resolvent_entries(mu).reconstruction_residual(20))
    elapsed = time.time() - t0
    ok = worst < 1e-9 and elapsed < 5.0
    report(4, ok, f"resolvent reconstruction N=20, 50 mus, max dev "
                  f"{worst:.2e} < 1e-9, {elapsed:.1f}s < 5s")


def test_criterion_5_classifier_table():
    t0 = time.time()
    expected = {
        "n": ("Sigma", "Sigma", "Sigma0"),
        "loglog_n": ("{1}", "{0,1}uD(1)", "closure(D(1))"),
        "logloglog_n": ("{1}", "closure(D(1))", "closure(D(1))"),
    }
    ok = True
    for name, regions in expected.items():
        r = classify_spectrum(make_alpha(name), horizon=10 ** 5,
                              with_probe=False)
        ok = ok and (r.sigma_pt, r.sigma, r.sigma_star) == regions
    # nesting invariants sigma_pt <= sigma <= sigma_star on all presets
    rng = np.random.default_rng(5)
    pts = [complex(rng.uniform(-1.5, 2.0), rng.uniform(-1.5, 1.5))
           for _ in range(100)]
    for name in PRESET_NAMES:
        r = classify_spectrum(make_alpha(name), horizon=10 ** 5,
                              with_probe=False)
        if r.status != "classified":
            continue
        for z in pts:
            if region_contains(r.sigma_pt, z, tol=1e-6):
                ok = ok and region_contains(r.sigma, z, tol=1e-6)
            if region_contains(r.sigma, z, tol=1e-6):
                ok = ok and region_contains(r.sigma_star, z, tol=1e-6)
    elapsed = time.time() - t0
    ok = ok and elapsed < 10.0
    report(5, ok, f"classifier regimes and nesting on presets at horizon "
                  f"1e5, {elapsed:.1f}s < 10s")


def test_criterion_6_probe_dichotomy():
    t0 = time.time()
    W_fast = WeightFamily(make_alpha("n"))
    res_fast = equicontinuity_probe(0.4 + 0.2j, 0.05, W_fast, k=1,
                                    horizon=10 ** 5)
    ok = (res_fast["verdict"] == "bounded"
          and res_fast["l_found"] is not None
          and res_fast["sup_row_sum"] < 1e3)
    W_slow = WeightFamily(make_alpha("logloglog_n"))
    res_slow = equicontinuity_probe((1.0 + 1.0j) / 2.0, 0.05, W_slow, k=1,
                                    horizon=10 ** 5, l_max=64)
    ok = ok and res_slow["verdict"] == "unbounded_evidence"
    ok = ok and res_slow["l_found"] is None
    elapsed = time.time() - t0
    ok = ok and elapsed < 60.0
    report(6, ok, f"probe dichotomy: l={res_fast['l_found']} found for "
                  f"linear alpha, none <= 64 for slow alpha, "
                  f"{elapsed:.1f}s < 60s")


def test_criterion_7_ergodic_suite():
    t0 = time.time()
    ok = True
    rng = np.random.default_rng(7)
    N, m_max = 50, 200
    for name in ("n", "log_n", "sqrt_n"):
        W = WeightFamily(make_alpha(name))
        w = np.exp(W.log_weights(1, np.arange(1, N + 1)))
        ns = np.arange(1, N + 1)
        for _ in range(50):
            x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
            q0 = float(np.max(w * np.abs(x)))
            v = x
            for _ in range(m_max):
                v = np.cumsum(v) / ns
                q = float(np.max(w * np.abs(v)))
                ok = ok and q <= q0 * (1.0 + 1e-10)
    W = WeightFamily(make_alpha("n"))
    trace = iterates_limit_check([1.0] + [0.0] * 9, W, k=1, N=10, tol=1e-6)
    ok = ok and trace.status == "converged" and trace.distances[-1] < 1e-6
    A, B, residual = range_inverse_matrices(10)
    ok = (ok and residual == 0 and B[0][0] == F(2) and B[1][1] == F(3, 2))
    elapsed = time.time() - t0
    ok = ok and elapsed < 10.0
    report(7, ok, f"ergodic: contraction 50x200 on 3 presets, iterates of "
                  f"e1 -> ones within 1e-6, exact range inverse at N=10, "
                  f"{elapsed:.1f}s < 10s")


def test_criterion_8_appendix_suite():
    t0 = time.time()
    ok = True
    # slowly growing alpha: criterion bounded for (k, k+1), k <= 4, and
    # under the closed-form majorant for (1, 2) up to 1e6
    ftw = FiniteTypeWeights(make_alpha("log_n_plus_1"))
    for k in range(1, 5):
        v = ft_continuity_criterion(ftw, k, k + 1, horizon=10 ** 6)
        ok = ok and v.status == "holds"
    ns = np.arange(1, 10 ** 6 + 1, dtype=float)
    vals = np.sqrt(ns + 1.0) / ns * np.cumsum(1.0 / (ns + 1.0))
    majorant = 2.0 * (1.0 + np.log(ns + 1.0)) / np.sqrt(ns + 1.0)
    ok = ok and bool(np.all(vals <= majorant + 1e-12))
    # fast growth: criterion diverges for every l <= 64
    ftw_n = FiniteTypeWeights(make_alpha("n"))
    for l in range(2, 66):
        ok = ok and ft_continuity_criterion(ftw_n, 1, l,
                                            horizon=10 ** 4).status == "fails"
    # staircase data
    ok = ok and (example53_j(2), example53_j(3),
                 example53_j(4)) == (4, 96, 7077888)
    ok = ok and abs(example53_lower_bound(4, 1) - 64.0) < 1e-9
    elapsed = time.time() - t0
    ok = ok and elapsed < 30.0
    report(8, ok, f"appendix: criterion bounded (k,k+1) k<=4 under majorant "
                  f"at 1e6, divergence all l<=64, j-values and lower bound "
                  f"64, {elapsed:.1f}s < 30s")


def test_criterion_9_determinism(tmp_path):
    outs = {"classify": [], "grid": [], "verify": []}
    for i in range(2):
        p = tmp_path / f"c{i}.json"
        assert cli_main(["classify", "--alpha", "preset:n",
                         "--output", str(p)]) == EXIT_OK
        outs["classify"].append(p.read_bytes())

        g = tmp_path / f"g{i}.csv"
        s = tmp_path / f"g{i}.svg"
        assert cli_main(["grid", "--alpha", "preset:loglog_n", "--res", "10",
                         "--probe-subsample", "3", "--horizon", "2000",
                         "--out", str(g), "--svg", str(s)]) == EXIT_OK
        outs["grid"].append(g.read_bytes() + s.read_bytes())

        v = tmp_path / f"v{i}.json"
        assert cli_main(["verify", "--suite", "ergodic",
                         "--output", str(v)]) == EXIT_OK
        outs["verify"].append(v.read_bytes())
    ok = all(pair[0] == pair[1] for pair in outs.values())
    report(9, ok, "byte-identical classify/grid/verify reruns")
