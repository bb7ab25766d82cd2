"""Acceptance gate: every release-blocking check, one pass/fail line each.

Each test computes its verdict first and prints a single
"PASS <label>: ..." or "FAIL <label>: ..." line before asserting, so the
line is visible in captured output even when the check fails. Brackets
and tolerances are pinned here and do not drift with the code.
"""

import math
import statistics
import subprocess
import sys
import time

import numpy as np
import scipy.stats

from primepartitions import (
    DEFAULT_SEED,
    ExactSizeCdf,
    exp_prime_sum_ratio,
    goldbach_sample_arrays,
    goldbach_sum_ratio,
    hardy_ramanujan_ratio,
    hl_prediction,
    ks_statistic,
    mpart_sample_arrays,
    mpart_sum_ratio,
    q2_table,
    q2_table_naive,
    qm_table_bell,
    qm_table_dp,
    sieve_upto,
    twin_prime_constant,
    unrank_partition,
    verify_pair_identity,
)
from conftest import BUILD_SECONDS
from test_counts import brute_qm

U_GRID = np.arange(1, 100) / 100.0


def _gate(label: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}", flush=True)
    assert ok, f"{label}: {detail}"


def test_series_identity_matches_pair_counts():
    t0 = time.perf_counter()
    table = sieve_upto(20_002)
    oracle = q2_table_naive(table, 10_000)  # independent scan-based counts
    ok, mismatch = verify_pair_identity(table, 20_000, oracle)
    elapsed = time.perf_counter() - t0
    _gate(
        "series squared-plus-folded identity vs scanned pair counts, k <= 20000",
        ok and elapsed < 10.0,
        f"mismatch={mismatch}, {elapsed:.1f}s (cap 10s)",
    )


def test_independent_count_paths_agree():
    bad = 0
    table3k = sieve_upto(3_000)
    for m in (3, 4, 5):
        bell = qm_table_bell(table3k, m, 3_000)
        dp = qm_table_dp(table3k, m, 3_000)
        bad += sum(1 for k in range(3_001) if int(bell.q[k]) != int(dp.q[k]))
    table200 = sieve_upto(200)
    for m in (2, 3, 4, 5):
        dp = qm_table_dp(table200, m, 200)
        bad += sum(
            1 for k, b in enumerate(brute_qm(table200, m, 200)) if int(dp.q[k]) != b
        )
    table2k = sieve_upto(2_000)
    fast = q2_table(table2k, 1_000)
    naive = q2_table_naive(table2k, 1_000)
    bad += int(np.count_nonzero(fast.q != naive.q))
    _gate(
        "bell vs dp (m=3,4,5, k<=3000); dp vs brute force (n<=200); "
        "convolution vs scan (s<=2000)",
        bad == 0,
        f"{bad} mismatches",
    )


def test_cumulative_pair_count_trend(conv_1e6):
    ratios = [goldbach_sum_ratio(conv_1e6, n) for n in (10**4, 10**5, 10**6)]
    build = BUILD_SECONDS["conv_1e6"]
    decreasing = ratios[0] > ratios[1] > ratios[2]
    in_band = all(1.00 <= r <= 1.50 for r in ratios)
    final = 1.10 <= ratios[2] <= 1.20
    _gate(
        "cumulative pair count over n^2/log^2 n at n=1e4,1e5,1e6",
        decreasing and in_band and final and build < 60.0,
        f"ratios={[f'{r:.6f}' for r in ratios]}, table build {build:.1f}s (cap 60s)",
    )


def test_cumulative_three_part_trend(dp3_1e5):
    ratios = [mpart_sum_ratio(dp3_1e5, n) for n in (10**3, 10**4, 10**5)]
    decreasing = ratios[0] > ratios[1] > ratios[2]
    in_band = all(1.0 <= r <= 3.0 for r in ratios)
    closer = abs(ratios[1] - 1) < abs(ratios[0] - 1) and abs(ratios[2] - 1) < abs(
        ratios[1] - 1
    )
    _gate(
        "cumulative 3-part count over n^3/((3!)^2 log^3 n) at n=1e3,1e4,1e5",
        decreasing and in_band and closer,
        f"ratios={[f'{r:.6f}' for r in ratios]}",
    )


def test_two_part_size_law(conv_1e6):
    rng = np.random.default_rng(DEFAULT_SEED)
    sizes, _ = goldbach_sample_arrays(conv_1e6, 10**5, rng)
    F = ExactSizeCdf(conv_1e6)
    report = ks_statistic(sizes, 2 * 10**6, F, reference="exact")
    sup = max(abs(F(u) - u**2) for u in U_GRID)
    ok_ks = report.D <= report.threshold
    ok_sup = sup <= 0.05
    _gate(
        "two-part size law: 1e5 draws at n=1e6 vs exact CDF; exact CDF vs u^2",
        ok_ks and ok_sup,
        f"KS D={report.D:.5f} (cap {report.threshold:.5f}); "
        f"sup|F-u^2|={sup:.4f} (cap 0.05)",
    )


def test_three_part_size_law(table_2e6):
    counts = qm_table_dp(table_2e6, 3, 10**4)
    rng = np.random.default_rng(DEFAULT_SEED)
    sizes, _ = mpart_sample_arrays(counts, 10**4, rng)
    F = ExactSizeCdf(counts)
    report = ks_statistic(sizes, 10**4, F, reference="exact")
    sup = max(abs(F(u) - u**3) for u in U_GRID)
    _gate(
        "three-part size law: 1e4 draws at n=1e4 vs exact CDF; exact CDF vs u^3",
        report.D <= report.threshold and sup <= 0.10,
        f"KS D={report.D:.5f} (cap {report.threshold:.5f}); "
        f"sup|F-u^3|={sup:.4f} (cap 0.10)",
    )


def test_twin_prime_constant_high_precision():
    reference = 0.6601618158
    t0 = time.perf_counter()
    table = sieve_upto(10**7)
    value, tail = twin_prime_constant(table, 10**7)
    elapsed = time.perf_counter() - t0
    close = abs(value - reference) <= 1e-8
    bracketed = value - tail <= reference <= value
    _gate(
        "twin prime constant at P=1e7 within 1e-8 and tail bracket",
        close and bracketed and elapsed < 30.0,
        f"value={value:.12f}, |diff|={abs(value - reference):.2e} (cap 1e-8), "
        f"tail={tail:.2e}, {elapsed:.1f}s (cap 30s)",
    )


def test_pair_count_prediction_median(table_2e6, conv_1e6):
    c2, _ = twin_prime_constant(table_2e6, 10**6)
    ratios = []
    for n in range(200_000, 200_000 + 1_000, 2):
        predicted = hl_prediction(table_2e6, n, c2).predicted
        ratios.append(int(conv_1e6.q[n]) / predicted)
    med = statistics.median(ratios)
    _gate(
        "pair-count over pair-density prediction: median across 500 even n "
        "from 2e5 in [0.95, 1.05]",
        0.95 <= med <= 1.05,
        f"median={med:.4f} (prediction counts ordered pairs; unordered counts "
        f"sit near half of it)",
    )


def test_exp_weighted_prime_sum_limit(table_2e6):
    grid = (1e-2, 1e-3, 1e-4)
    ratios = [exp_prime_sum_ratio(table_2e6, t) for t in grid]
    gaps = [abs(r - 1.0) for r in ratios]
    approaching = gaps[1] < gaps[0] and gaps[2] < gaps[1]
    final_band = 0.80 <= ratios[2] <= 1.20
    # doubling the truncation cutoff must not move the result
    stable = True
    for t, r in zip(grid, ratios):
        hi = table_2e6.pi(2 * math.ceil(40 / t))
        ps = table_2e6.primes[1:hi].astype(np.float64)
        doubled = math.fsum(np.exp(-t * ps).tolist()) * t * math.log(1 / t)
        stable &= abs(doubled - r) / r < 1e-12
    _gate(
        "exp-weighted odd prime sum times t*log(1/t) approaching 1 over "
        "t=1e-2,1e-3,1e-4",
        approaching and final_band and stable,
        f"ratios={[f'{r:.6f}' for r in ratios]}, cutoff-doubling stable={stable} "
        f"(gap grows 1e-2 -> 1e-3: the p=2 term this sum omits cancels most of "
        f"the slowly-decaying correction at large t)",
    )


def test_sampler_uniform_at_small_scale():
    table = sieve_upto(210)
    counts = q2_table(table, 30)  # range 60
    total = int(counts.prefix[60])
    all_codes = np.array(
        sorted(
            unrank_partition(counts, j).parts[0] * 64 + unrank_partition(counts, j).size
            for j in range(total)
        ),
        dtype=np.int64,
    )
    distinct_small = len(set(all_codes)) == total

    rng = np.random.default_rng(DEFAULT_SEED)
    sizes, small = goldbach_sample_arrays(counts, 10**6, rng)
    codes = small * 64 + sizes
    idx = np.searchsorted(all_codes, codes)
    hit = np.all(all_codes[np.minimum(idx, total - 1)] == codes)
    observed = np.bincount(idx, minlength=total)
    chi2, p = scipy.stats.chisquare(observed)

    conv100 = q2_table(table, 100)  # range 200
    full = int(conv100.prefix[200])
    seen = {unrank_partition(conv100, j).parts for j in range(full)}
    bijective = len(seen) == full

    _gate(
        "uniformity: chi-square over all 2-part partitions to 60 (1e6 draws) "
        "and exhaustive unranking bijectivity to n=100",
        distinct_small and bool(hit) and p > 0.01 and bijective,
        f"classes={total}, chi2={chi2:.1f}, p={p:.4f} (floor 0.01); "
        f"distinct unranked partitions {len(seen)}/{full}",
    )


def test_total_partition_count_growth(qtotal_1e5):
    ratios = [hardy_ramanujan_ratio(qtotal_1e5, n) for n in (10**3, 10**4, 10**5)]
    increasing = ratios[0] < ratios[1] < ratios[2]
    in_band = all(0.5 <= r <= 1.1 for r in ratios)
    _gate(
        "log of total partition count over 2*pi*sqrt(n/(3 log n)) at n=1e3,1e4,1e5",
        increasing and in_band,
        f"ratios={[f'{r:.6f}' for r in ratios]}",
    )


def test_cli_outputs_are_deterministic(tmp_path):
    def pp(*args):
        proc = subprocess.run(
            [sys.executable, "-m", "primepartitions.cli", *args],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        return proc

    pairs = []
    for name, args in (
        ("sample", ["sample", "--m", "2", "--n", "1000", "--trials", "2000",
                    "--seed", str(DEFAULT_SEED)]),
        ("count", ["count", "--m", "3", "--limit", "500"]),
        ("asym", ["asym", "--check", "theorem3", "--points", "100,300", "--m", "3"]),
    ):
        a = tmp_path / f"{name}_a.csv"
        b = tmp_path / f"{name}_b.csv"
        pp(*args, "--out", str(a))
        pp(*args, "--out", str(b))
        pairs.append((name, a.read_bytes() == b.read_bytes()))
    ok = all(same for _, same in pairs)
    _gate(
        "identical argv and seed give byte-identical CSV outputs",
        ok,
        "; ".join(f"{name}={'same' if same else 'DIFFERENT'}" for name, same in pairs),
    )
