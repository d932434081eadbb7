"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; ``pytest tests/test_acceptance.py``
prints them in the terminal summary.  Monte Carlo criteria use a fixed seed
and are independent of the thread count.
"""

import math
import os
import time
from fractions import Fraction

import numpy as np
from scipy.stats import chisquare

from andorlab.boolfn import class_key
from andorlab.combinatorics import ModelTag, count_trees, rat_exact, threshold_M
from andorlab.distribution import exact_distribution
from andorlab.sampling import estimate, estimate_many, sample_table_counts
from andorlab.truthtable import TruthTable
from andorlab.verify import bonferroni, complexity_suite, counts, forcing, lemma57, tautology, threshold, unimodality

SEED = 20261016
MC_SAMPLES = 10**6
THREADS = os.cpu_count() or 1


def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def _failed(checks):
    return [f"{c.check} ({c.detail})" for c in checks if not c.ok]


def test_c01_exact_counts(report):
    checks, secs = _timed(counts, n_max=7, k_max=3)
    bad = _failed(checks)
    ok = not bad and secs < 60
    assert report(1, ok, "enumeration equals closed-form counts, n<=7, k<=3",
                  f"{len(checks)} checks, {len(bad)} mismatches, {secs:.1f}s (limit 60s)")


def test_c02_bonferroni(report):
    checks, secs = _timed(bonferroni, n_max=200)
    ok = not _failed(checks) and secs < 30
    assert report(2, ok, "Bonferroni inequalities, n<=200", f"{checks[0].detail}, {secs:.1f}s (limit 30s)")


def test_c03_unimodality_and_threshold(report):
    uni = unimodality(n_max=500)
    thr = threshold(n_max=10**5)
    r3 = threshold_M(1000) * math.log(1000) / 1000
    r5 = threshold_M(10**5) * math.log(10**5) / 10**5
    ok = not _failed(uni) and not _failed(thr[:1]) and 0.9 <= r5 <= 1.6 and abs(r5 - 1) < abs(r3 - 1)
    assert report(3, ok, "unimodality n<=500, M_n monotone on 10..1e5, M_n ln n/n",
                  f"ratio {r5:.4f} at 1e5 vs {r3:.4f} at 1e3, band [0.9, 1.6], failures={_failed(uni) + _failed(thr)}")


def test_c04_rat_regimes(report):
    g_ok = all(rat_exact(n, k, "G") == Fraction(1, 2 * k) for n in (2, 10, 200, 2000) for k in (1, 3, 44, n))
    grid = (200, 500, 1000, 2000)
    vals = {n: float(rat_exact(n, n, "E")) * 2 * n / math.log(n) for n in grid}
    dist = [abs(vals[n] - 1) for n in grid]
    in_band = 0.7 <= vals[2000] <= 1.5
    toward_one = all(a > b for a, b in zip(dist, dist[1:]))
    k = math.isqrt(2000)
    assert k <= threshold_M(2000)
    sqrt_val = float(rat_exact(2000, k, "E")) * 2 * k
    sqrt_ok = 0.9 <= sqrt_val <= 1.1
    ok = g_ok and in_band and toward_one and sqrt_ok
    detail = (
        f"G exact={g_ok}; E k=n rat*2n/ln n: "
        + ", ".join(f"{n}:{vals[n]:.4f}" for n in grid)
        + f" (band {in_band}, moving toward 1 {toward_one}); E k=floor(sqrt n) at 2000: {sqrt_val:.4f}"
    )
    assert report(4, ok, "rat_n regimes", detail)


def test_c05_tautology_structure(report):
    checks = tautology(n_max=6, k_max=2)
    bad = _failed(checks)
    assert report(5, not bad, "tautologies have an N^(2)-repetition; one repetition implies simple, n<=6, k<=2",
                  f"{len(checks)} censuses, counterexamples in {len(bad)}")


def test_c06_tautology_constant_trend(report):
    rows = {}
    for n in (50, 100, 200):
        s, t = estimate_many(["simple_tautology", "tautology"], n, n, "G", MC_SAMPLES, SEED, THREADS)
        rows[n] = (s.point / float(rat_exact(n, n, "G")), t.hits / s.hits)
    band = all(1.0 <= r <= 2.0 for r, _ in rows.values())
    closer = abs(rows[200][0] - 1.5) < abs(rows[50][0] - 1.5)
    ts_ok = 1.0 <= rows[200][1] <= 1.2
    ok = band and closer and ts_ok
    detail = ", ".join(f"n={n}: S/rat={r:.4f} T/S={q:.4f}" for n, (r, q) in rows.items())
    assert report(6, ok, "simple tautology ratio near 3/2, model G, k_n=n", detail)


def _function_level(n, k, model):
    """Sampled and exact counts keyed by function (G) or function class (E)."""
    model = ModelTag.parse(model)
    support = k if model is ModelTag.G else min(k, n)
    sampled = sample_table_counts(n, k, model, MC_SAMPLES, SEED, THREADS)
    obs = {}
    for value, c in sampled.items():
        table = TruthTable(support, value)
        key = table if model is ModelTag.G else class_key(table)
        obs[key] = obs.get(key, 0) + c
    exact = exact_distribution(n, k, model).mass
    return obs, exact


def test_c07_sampler_exactness(report):
    parts, ok = [], True
    for model in ("G", "E"):
        for n, k in ((3, 2), (4, 2)):
            obs, exact = _function_level(n, k, model)
            keys = list(exact)
            unexpected = set(obs) - set(keys)
            f_obs = np.array([obs.get(key, 0) for key in keys], dtype=float)
            f_exp = np.array([float(exact[key]) for key in keys]) * MC_SAMPLES
            pval = chisquare(f_obs, f_exp).pvalue
            tv = 0.5 * float(np.abs(f_obs / MC_SAMPLES - f_exp / MC_SAMPLES).sum())
            good = not unexpected and pval > 1e-3 and tv < 0.01
            ok = ok and good
            parts.append(f"{model}({n},{k}) p={pval:.3g} TV={tv:.4f}")
    assert report(7, ok, "sampler matches exact distribution, 1e6 samples", "; ".join(parts))


def test_c08_forcing(report):
    checks = forcing(n_max=6)
    assert report(8, not _failed(checks), "forcing N false and P true, shapes of size <=6",
                  "; ".join(c.detail for c in checks))


def test_c09_complexity_oracle(report):
    checks, secs = _timed(complexity_suite)
    ok = not _failed(checks) and secs < 120
    assert report(9, ok, "L(true)=0, L(lit)=1, L(xor2)=4, E<=L<=2^(E+2) on support 3",
                  f"{len(checks)} checks, failures={_failed(checks)}, {secs:.1f}s (limit 120s)")


def test_c10_satisfiability_trend(report):
    grid = (50, 100, 200, 400)
    reps = [estimate("satisfiable", n, n, "G", MC_SAMPLES, SEED, THREADS) for n in grid]
    points = [r.point for r in reps]
    increasing = all(a < b for a, b in zip(points, points[1:]))
    final = reps[-1]
    ok = increasing and final.point > 0.99 and final.ci_low > 0.97
    detail = ", ".join(f"{n}:{p:.6f}" for n, p in zip(grid, points)) + f"; final CI [{final.ci_low:.5f}, {final.ci_high:.5f}]"
    assert report(10, ok, "satisfiability increasing, model G, k_n=n", detail)


def test_c11_repetition_bound(report):
    checks = lemma57(n_max=7, rule="identity")
    ok = not _failed(checks)
    detail = "; ".join(f"{c.check}: {'ok' if c.ok else 'exceeds'} {c.detail}" for c in checks)
    assert report(11, ok, "A^[>=r]/A / rat^r <= 2x value at n=4, pattern N, n<=7", detail)


if __name__ == "__main__":
    import sys

    def _print(number, ok, title, detail):
        print(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}: {detail}")
        return ok

    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn(_print)
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
