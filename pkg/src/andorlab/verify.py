"""Invariant suites run by ``andorlab verify``.

Each suite returns :class:`Check` records; a suite passes when all of its
checks pass.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .boolfn import complexity, essential_count
from .combinatorics import (
    ModelTag,
    a_term,
    bonferroni_holds,
    catalan_leaves,
    count_trees,
    rat_exact,
    series_I,
    shape_count,
    threshold_M,
    threshold_M_scan,
)
from .patterns import N, P, count_with_repetitions, forcing_check_shape, tautology_census
from .quotient import enumerate_classes, enumerate_labellings_E
from .trees import enumerate_shapes, enumerate_trees_G, literal_alphabet
from .truthtable import TruthTable


@dataclass(frozen=True)
class Check:
    suite: str
    check: str
    ok: bool
    detail: str = ""

    def row(self) -> dict:
        return {"suite": self.suite, "check": self.check, "status": "pass" if self.ok else "FAIL", "detail": self.detail}


CHECK_COLUMNS = ["suite", "check", "status", "detail"]


def bonferroni(n_max: int = 200, **_) -> list[Check]:
    bad = [(n, p) for n in range(1, n_max + 1) for p in range(1, n + 1) if not bonferroni_holds(n, p)]
    return [Check("bonferroni", f"n<={n_max}, 1<=p<=n", not bad, f"violations={bad[:5]}")]


def ratio_step(n: int, p: int) -> int:
    """Sign of ``a_{p+1} - a_p``, exactly: compares ``(p+1)^(n-1)`` with ``2 p^n``."""
    lhs, rhs = (p + 1) ** (n - 1), 2 * p**n
    return (lhs > rhs) - (lhs < rhs)


def unimodal_at(n: int) -> bool:
    m = threshold_M(n)
    if any(ratio_step(n, p) <= 0 for p in range(1, m)):
        return False
    if m < n and ratio_step(n, m) > 0:
        return False
    return all(ratio_step(n, p) < 0 for p in range(m + 1, n))


def unimodality(n_max: int = 500, **_) -> list[Check]:
    bad = [n for n in range(2, n_max + 1) if not unimodal_at(n)]
    scan_bad = [n for n in range(2, min(n_max, 120) + 1) if threshold_M(n) != threshold_M_scan(n)]
    # direct Fraction comparison on a few sizes as an independent oracle
    frac_bad = []
    for n in (2, 3, 10, 57, 100):
        if n > n_max:
            continue
        a = [a_term(n, p) for p in range(1, n + 1)]
        if max(range(n), key=lambda i: (a[i], -i)) + 1 != threshold_M(n):
            frac_bad.append(n)
    return [
        Check("unimodality", f"strict up/down around M_n, 2<=n<={n_max}", not bad, f"violations={bad[:5]}"),
        Check("unimodality", "bisection agrees with full scan", not scan_bad, f"mismatch={scan_bad[:5]}"),
        Check("unimodality", "argmax of exact a_p", not frac_bad, f"mismatch={frac_bad}"),
    ]


def threshold(n_max: int = 10**5, **_) -> list[Check]:
    prev, drops = 0, []
    for n in range(10, n_max + 1):
        m = threshold_M(n)
        if m < prev:
            drops.append(n)
        prev = m
    out = [Check("threshold", f"M_n non-decreasing on 10..{n_max}", not drops, f"drops={drops[:5]}")]
    if n_max >= 1000:
        r3 = threshold_M(1000) * math.log(1000) / 1000
        rn = threshold_M(n_max) * math.log(n_max) / n_max
        out.append(Check("threshold", f"M_n ln n / n at {n_max}", 0.9 <= rn <= 1.6, f"{rn:.4f} (n=1000: {r3:.4f})"))
    return out


def counts(n_max: int = 7, k_max: int = 3, **_) -> list[Check]:
    """Enumerated cardinalities against the closed forms.

    Shapes and labellings are enumerated separately and multiplied; for small
    sizes the full tree / class streams are also materialised and checked for
    duplicates.
    """
    out = []
    for n in range(1, n_max + 1):
        shapes = sum(1 for _ in enumerate_shapes(n))
        out.append(Check("counts", f"shapes n={n}", shapes == shape_count(n) == catalan_leaves(n) << (n - 1), str(shapes)))
        for k in range(1, k_max + 1):
            g_labels = sum(1 for _ in itertools.product(literal_alphabet(k), repeat=n))
            e_labels = sum(1 for _ in enumerate_labellings_E(n, k))
            g_ok = shapes * g_labels == count_trees(n, k, ModelTag.G)
            e_ok = shapes * e_labels == count_trees(n, k, ModelTag.E)
            if count_trees(n, k, ModelTag.G) <= 300_000:
                trees = set(enumerate_trees_G(n, k))
                g_ok = g_ok and len(trees) == count_trees(n, k, ModelTag.G)
            if count_trees(n, k, ModelTag.E) <= 300_000:
                keys = set(enumerate_classes(n, k))
                e_ok = e_ok and len(keys) == count_trees(n, k, ModelTag.E)
            out.append(Check("counts", f"G n={n} k={k}", g_ok, str(count_trees(n, k, ModelTag.G))))
            out.append(Check("counts", f"E n={n} k={k}", e_ok, str(count_trees(n, k, ModelTag.E))))
    return out


def series(n_max: int = 60, **_) -> list[Check]:
    coeffs = series_I(n_max)
    bad = [n for n in range(1, n_max + 1) if coeffs[n - 1] != catalan_leaves(n) << (n - 1)]
    return [Check("series", f"I_n = 2^(n-1) Cat_n, n<={n_max}", not bad, f"mismatch={bad[:5]}")]


def forcing(n_max: int = 6, **_) -> list[Check]:
    out = []
    for lang in (N, P):
        bad = 0
        total = 0
        for n in range(1, n_max + 1):
            for shape in enumerate_shapes(n):
                total += 1
                bad += not forcing_check_shape(shape, lang)
        out.append(Check("forcing", f"{lang} forcing, shapes of size <={n_max}", bad == 0, f"{bad}/{total} counterexamples"))
    return out


def tautology(n_max: int = 6, k_max: int = 2, **_) -> list[Check]:
    out = []
    for model in (ModelTag.G, ModelTag.E):
        for n in range(1, n_max + 1):
            for k in range(1, k_max + 1):
                c = tautology_census(n, k, model)
                ok = c.no_NN_repetition == 0 and c.one_NN_not_simple == 0 and c.simple_not_tautology == 0
                out.append(Check(
                    "tautology", f"{model.value} n={n} k={k}", ok,
                    f"T={c.tautologies} S={c.simple} noRep={c.no_NN_repetition} oneRepNotSimple={c.one_NN_not_simple}",
                ))
    return out


def complexity_suite(**_) -> list[Check]:
    xor2 = TruthTable.parse("m=2:0x6")
    out = [
        Check("complexity", "L(true)=0", complexity(TruthTable.constant(True, 2)) == 0),
        Check("complexity", "L(literal)=1", complexity(TruthTable.literal(2, False, 3)) == 1),
        Check("complexity", "L(xor2)=4", complexity(xor2) == 4, str(complexity(xor2))),
    ]
    bad = []
    for v in range(256):
        f = TruthTable(3, v)
        e, l = essential_count(f), complexity(f)
        if not f.is_constant() and not e <= l <= 2 ** (e + 2):
            bad.append(str(f))
    out.append(Check("complexity", "E <= L <= 2^(E+2) on all support-3 functions", not bad, f"violations={bad[:5]}"))
    return out


def lemma57(n_max: int = 7, rule: str = "identity", **_) -> list[Check]:
    """``A^[>=r]/A / rat^r`` bounded by twice its value at ``n = 4`` (pattern N)."""
    from .distribution import k_rule

    fn = k_rule(rule)
    out = []
    for model in (ModelTag.G, ModelTag.E):
        for r in (1, 2):
            vals = {}
            for n in range(2, n_max + 1):
                k = fn(n)
                a = count_with_repetitions(n, k, "N", r, model, at_least=True)
                vals[n] = Fraction(a, count_trees(n, k, model)) / rat_exact(n, k, model) ** r
            bound = 2 * vals[4]
            worst = max(vals, key=vals.get)
            out.append(Check(
                "lemma57", f"{model.value} r={r} k_n={rule}", all(v <= bound for v in vals.values()),
                f"bound={float(bound):.4f} max={float(vals[worst]):.4f} at n={worst}",
            ))
    return out


def sampler(samples: int = 100_000, seed: int = 0, threads: int = 1, **_) -> list[Check]:
    from scipy.stats import chisquare

    from .sampling import sample_object_counts

    out = []
    for model in (ModelTag.G, ModelTag.E):
        for n, k in ((3, 1), (3, 2)):
            obs = sample_object_counts(n, k, model, samples, seed, threads)
            total = count_trees(n, k, model)
            f_obs = list(obs.values()) + [0] * (total - len(obs))
            pval = chisquare(f_obs).pvalue
            out.append(Check("sampler", f"{model.value} n={n} k={k} objects uniform", len(obs) == total and pval > 1e-3, f"p={pval:.4g}"))
    return out


SUITES = {
    "bonferroni": bonferroni,
    "unimodality": unimodality,
    "threshold": threshold,
    "counts": counts,
    "series": series,
    "forcing": forcing,
    "tautology": tautology,
    "complexity": complexity_suite,
    "lemma57": lemma57,
    "sampler": sampler,
}

# n_max keyword each suite understands as its size cap
_DEFAULT_FOR_ALL = ("bonferroni", "unimodality", "series", "counts", "forcing", "tautology", "complexity", "sampler")


def run_suite(name: str, n_max: int | None = None, **kwargs) -> list[Check]:
    if name == "all":
        out = []
        for suite in _DEFAULT_FOR_ALL:
            out.extend(run_suite(suite, None, **kwargs))
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    if n_max is not None:
        kwargs["n_max"] = n_max
    return SUITES[name](**kwargs)
