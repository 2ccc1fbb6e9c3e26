"""Acceptance suite: eleven end-to-end criteria, one test each.

Each test prints what it measured, so a failure report carries the numbers
that drove it. The Monte-Carlo criteria pin their seeds; the stated bounds
leave several binomial standard errors of slack at the pinned replication
counts. Reference values come from oracles.py, never from the package.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

import oracles
from dcorkit import (asymptotic_pvalue, dcor_bias_corrected, dcor_test_permutation,
                     dcov_biased_sq, dcov_unbiased, fast_distance_aggregates,
                     pdcor_test_permutation)
from dcorkit._fast import warmup
from dcorkit.cli import main as cli_main
from dcorkit.rng import RngStream, derive_seed
from dcorkit.simulation import run_case, run_filtering, scenarios_for_case


def _max_rel_err(agg, expected) -> float:
    got = (agg.pair_product_sum, agg.row_sum_products, agg.grand_product)
    return max(abs(g - e) / max(abs(e), 1.0) for g, e in zip(got, expected))


def test_c01_fast_aggregates_match_quadratic_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260814)
    worst = 0.0
    for i in range(200):
        n = int(rng.integers(4, 65))
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        if i % 5 == 0:
            x = np.round(x, 1)  # duplicate values exercise the tie handling
        worst = max(worst, _max_rel_err(fast_distance_aggregates(x, y),
                                        oracles.aggregates_naive(x, y)))
    for i in range(20):
        n = 1000 if i % 2 == 0 else 5000
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        if i % 4 == 0:
            y = np.round(y, 2)
        worst = max(worst, _max_rel_err(fast_distance_aggregates(x, y),
                                        oracles.aggregates_blockwise(x, y)))
    elapsed = time.perf_counter() - t0
    print(f"C1: max relative error {worst:.3e} over 220 instances, {elapsed:.1f}s")
    assert worst <= 1e-9
    assert elapsed < 30.0


def test_c02_unbiased_dcov_mean_zero_under_independence():
    t0 = time.perf_counter()
    g = np.random.default_rng(2)
    reps = 10_000
    unbiased = np.empty(reps)
    biased = np.empty(reps)
    for i in range(reps):
        x = g.standard_normal(10)
        y = g.standard_normal(10)
        unbiased[i] = dcov_unbiased(x, y)
        biased[i] = dcov_biased_sq(x, y)
    mean = unbiased.mean()
    se = unbiased.std(ddof=1) / np.sqrt(reps)
    elapsed = time.perf_counter() - t0
    print(f"C2: unbiased mean {mean:.2e} (SE {se:.2e}), "
          f"biased mean {biased.mean():.4f}, {elapsed:.1f}s")
    assert abs(mean) <= 3.0 * se
    assert biased.mean() > 0.0
    assert elapsed < 60.0


def test_c03_permutation_p_matches_exhaustive_enumeration():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        n = 4 if seed % 2 == 0 else 5
        g = np.random.default_rng(300 + seed)
        x = g.standard_normal(n)
        y = g.standard_normal(n)
        z = g.standard_normal(n)
        p_mc = dcor_test_permutation(x, y, 2000, RngStream(300 + seed)).p_value
        p_ex = oracles.exhaustive_perm_pvalue(x, y, oracles.dcor_bc_naive,
                                              tie_tol=1e-9)
        worst = max(worst, abs(p_mc - p_ex))
        p_mc = pdcor_test_permutation(x, y, z, 2000, RngStream(9300 + seed)).p_value
        p_ex = oracles.exhaustive_perm_pvalue_partial(x, y, z, oracles.pdcor_naive,
                                                      tie_tol=1e-9)
        worst = max(worst, abs(p_mc - p_ex))
    elapsed = time.perf_counter() - t0
    print(f"C3: max |MC - exhaustive| {worst:.4f} over 20 instances, {elapsed:.1f}s")
    assert worst <= 0.05
    assert elapsed < 60.0


def _run_scenarios(case, n_grid, reps, perms, pairs, seed):
    specs = scenarios_for_case(case, n_grid, reps, 0.05, perms, 0, pairs)
    reports = []
    for i, spec in enumerate(specs):
        spec = replace(spec, seed=derive_seed(seed, case, i))
        reports.append(run_case(spec, threads=1))
    return reports


def test_c04_type_i_error_near_nominal_under_independence():
    reports = _run_scenarios(1, (100, 500), 1000, 500,
                             ["Be-M2N", "Ga-M3N", "vM-M2St"], seed=41)
    bad = []
    for rep in reports:
        for method in ("P", "A", "Pear"):
            for n in rep.n_grid:
                rate = rep.rate(method, n)
                print(f"C4: {rep.scenario} {method} n={n}: {rate:.3f}")
                if not 0.03 <= rate <= 0.07:
                    bad.append((rep.scenario, method, n, rate))
    assert not bad, f"cells outside 0.05 +/- 0.02: {bad}"


def test_c05_marginal_test_gains_power_where_pearson_stays_level():
    rep = _run_scenarios(3, (50, 200, 500), 500, 500, ["Be-M2N"], seed=42)[0]
    p_rates = [rep.rate("P", n) for n in (50, 200, 500)]
    pear_rates = {n: rep.rate("Pear", n) for n in (50, 500)}
    print(f"C5: P rates over n=(50,200,500): {p_rates}, Pear: {pear_rates}")
    assert p_rates[0] >= 0.14
    assert p_rates[2] >= 0.30
    assert p_rates[0] <= p_rates[1] <= p_rates[2]
    for n, rate in pear_rates.items():
        assert abs(rate - 0.05) <= 0.025, f"Pear at n={n}: {rate}"


def test_c06_nonlinear_confounding_breaks_partial_tests():
    rep = _run_scenarios(4, (500,), 500, 500, ["Ga"], seed=43)[0]
    p_rate = rep.rate("P", 500)
    pear_rate = rep.rate("Pear", 500)
    print(f"C6: {rep.scenario} n=500: P {p_rate:.3f}, Pear {pear_rate:.3f}")
    assert p_rate >= 0.40
    assert pear_rate >= 0.12


def test_c07_partial_tests_blind_to_collider_dependence():
    reports = _run_scenarios(5, (100, 500), 500, 500,
                             ["Be-M2St", "Ga-M2N"], seed=44)
    bad = []
    for rep in reports:
        for method in ("P", "A"):
            for n in rep.n_grid:
                rate = rep.rate(method, n)
                print(f"C7: {rep.scenario} {method} n={n}: {rate:.3f}")
                if rate > 0.10:
                    bad.append((rep.scenario, method, n, rate))
    assert not bad, f"cells above 0.10: {bad}"


def test_c08_asymptotic_pvalue_spot_values():
    p_zero = asymptotic_pvalue(0.0, 250)
    p_small = asymptotic_pvalue(0.05, 100)
    print(f"C8: p(0) = {p_zero!r}, p(0.05, 100) = {p_small!r}")
    assert abs(p_zero - 0.31731) <= 1e-4
    assert abs(p_small - 0.01431) <= 1e-4
    # same numbers from an implementation-independent chi-square(1) tail
    assert p_zero == pytest.approx(oracles.chi2_1_sf(1.0), rel=1e-12)
    assert p_small == pytest.approx(oracles.chi2_1_sf(6.0), rel=1e-12)


def _best_time(fn, min_total=0.2, max_reps=50) -> float:
    best = float("inf")
    spent = 0.0
    for _ in range(max_reps):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = min(best, dt)
        spent += dt
        if spent >= min_total:
            break
    return best


def test_c09_fast_path_scaling_and_large_n_permutation_budget():
    warmup()
    g = np.random.default_rng(7)
    x1, y1 = g.standard_normal(1000), g.standard_normal(1000)
    x2, y2 = g.standard_normal(10_000), g.standard_normal(10_000)
    t_small = _best_time(lambda: dcor_bias_corrected(x1, y1))
    t_big = _best_time(lambda: dcor_bias_corrected(x2, y2))
    ratio = t_big / t_small
    t0 = time.perf_counter()
    res = dcor_test_permutation(x2, y2, 499, RngStream(70))
    t_perm = time.perf_counter() - t0
    print(f"C9: t(1000)={t_small * 1e3:.2f}ms t(10000)={t_big * 1e3:.2f}ms "
          f"ratio {ratio:.1f}; perm test n=10000 R=499: {t_perm:.1f}s "
          f"(p={res.p_value:.3f})")
    assert ratio < 20.0
    assert t_perm < 60.0


def test_c10_simulate_output_invariant_to_threads(capsys):
    argv = ["simulate", "--case", "1", "--n", "60", "--reps", "25",
            "--perms", "100", "--seed", "5", "--pairs", "Be-M2N"]
    assert cli_main(argv + ["--threads", "1"]) == 0
    serial = capsys.readouterr().out
    assert cli_main(argv + ["--threads", "4"]) == 0
    threaded = capsys.readouterr().out
    print(f"C10: {len(serial)} bytes, identical={serial == threaded}")
    assert serial != ""
    assert serial == threaded


def test_c11_filtering_recovers_signal_with_expected_method_ordering():
    report = run_filtering(n_grid=(100, 1000), replications=50, alpha=0.05,
                           permutations=500, seed=0, threads=1)
    for n in report.n_grid:
        row = {k: report.mean(k, n) for k in report.mean_counts}
        print(f"C11: n={n}: {row}")
    for n in report.n_grid:
        for key in ("P_true", "A_true", "Pear_true"):
            assert 0.0 <= report.mean(key, n) <= 10.0
    assert report.mean("A_false", 1000) <= report.mean("P_false", 1000)
    assert report.mean("P_and_A", 1000) > report.mean("P_and_Pear", 1000)
    assert report.mean("P_and_A", 1000) > report.mean("A_and_Pear", 1000)
