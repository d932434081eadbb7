"""Exact distributions on functions and function classes, and the trend drivers.

Model G masses are keyed by the truth table over ``x1..xk``; model E masses
by the :class:`~andorlab.boolfn.FunctionClassKey` of each class
representative's function.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .boolfn import FunctionClassKey, class_key, complexity, multiplicity, project_essential
from .combinatorics import ModelTag, count_trees, rat_exact, threshold_M
from .patterns import labelling_arrays, leaf_table_matrix, tautology_census
from .sampling import GENERATOR, Computes, EstimateReport, estimate, estimate_many
from .trees import DEFAULT_BUDGET, check_budget, compile_shape, enumerate_shapes, run_program
from .truthtable import TruthTable

@dataclass
class ExactDistribution:
    model: ModelTag
    n: int
    k: int
    counts: dict  # key -> number of trees (G) or classes (E)
    total: int

    @property
    def mass(self) -> dict:
        return {key: Fraction(c, self.total) for key, c in self.counts.items()}

    @property
    def support(self) -> int:
        """Number of variables of the G tables (``k``) or of the E representatives."""
        return self.k if self.model is ModelTag.G else min(self.k, self.n)

    def prob(self, key) -> Fraction:
        return Fraction(self.counts.get(key, 0), self.total)

    def class_masses(self) -> dict[FunctionClassKey, Fraction]:
        """Masses grouped by function class (identity for model E)."""
        if self.model is ModelTag.E:
            return self.mass
        out: dict[FunctionClassKey, int] = {}
        for table, c in self.counts.items():
            key = class_key(table)
            out[key] = out.get(key, 0) + c
        return {key: Fraction(c, self.total) for key, c in out.items()}


def _shape_tables(n: int, k: int, model: ModelTag):
    """Per shape, the truth tables (over ``support`` variables) of every labelling."""
    var, pos = labelling_arrays(n, k, model)
    support = k if model is ModelTag.G else min(k, n)
    tables = leaf_table_matrix(var, pos, support)
    columns = [tables[:, i] for i in range(n)]
    for shape in enumerate_shapes(n):
        yield run_program(compile_shape(shape), columns)


def exact_distribution(
    n: int, k: int, model: "ModelTag | str", budget: int | None = DEFAULT_BUDGET
) -> ExactDistribution:
    """Every tree (G) or class (E) of size ``n`` mapped to its function, with exact counts."""
    model = ModelTag.parse(model)
    total = count_trees(n, k, model)
    check_budget(total, budget, "trees" if model is ModelTag.G else "classes")
    support = k if model is ModelTag.G else min(k, n)
    raw: dict[int, int] = {}
    for result in _shape_tables(n, k, model):
        vals, cnts = np.unique(result, return_counts=True)
        for v, c in zip(vals.tolist(), cnts.tolist()):
            raw[v] = raw.get(v, 0) + c
    if sum(raw.values()) != total:
        raise AssertionError("enumeration does not match the closed-form count")
    counts: dict = {}
    for v, c in raw.items():
        table = TruthTable(support, v)
        key = table if model is ModelTag.G else class_key(table)
        counts[key] = counts.get(key, 0) + c
    return ExactDistribution(model, n, k, counts, total)


def _as_table(target: TruthTable, k: int) -> TruthTable | None:
    """``target`` over ``x1..xk``, or None if it depends on a variable above ``k``."""
    if target.support <= k:
        return target.extend(k)
    try:
        return target.restrict_support(k)
    except ValueError:
        return None


def prob_of(n: int, k: int, model: "ModelTag | str", target, budget: int | None = DEFAULT_BUDGET) -> Fraction:
    """Exact probability of a function (TruthTable) or function class (FunctionClassKey)."""
    model = ModelTag.parse(model)
    dist = exact_distribution(n, k, model, budget)
    if model is ModelTag.G:
        if isinstance(target, FunctionClassKey):
            return dist.class_masses().get(target, Fraction(0))
        table = _as_table(target, k)
        return Fraction(0) if table is None else dist.prob(table)
    key = target if isinstance(target, FunctionClassKey) else class_key(target)
    return dist.prob(key)


def sat_probability(
    n: int,
    k: int,
    model: "ModelTag | str",
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
    threads: int = 1,
    budget: int | None = DEFAULT_BUDGET,
):
    """``1 - P(false)``: an exact Fraction, or an EstimateReport in Monte Carlo mode."""
    model = ModelTag.parse(model)
    if mode == "exact":
        return 1 - prob_of(n, k, model, TruthTable(k, 0), budget)
    if mode in ("monte_carlo", "mc"):
        return estimate("satisfiable", n, k, model, samples, seed, threads)
    raise ValueError(f"unknown mode {mode!r}; use exact or monte_carlo")


# --- k rules and trend tables ----------------------------------------------


def k_rule(spec: "str | Callable[[int], int]") -> Callable[[int], int]:
    """Named map ``n -> k_n``: identity, sqrt (floor), log (max(1, floor(ln n))), const:<c>."""
    if callable(spec):
        return spec
    if spec == "identity":
        return lambda n: n
    if spec == "sqrt":
        return lambda n: max(1, math.isqrt(n))
    if spec == "log":
        return lambda n: max(1, int(math.log(n)))
    if spec.startswith("const:"):
        c = int(spec[len("const:"):])
        if c < 1:
            raise ValueError("constant k must be >= 1")
        return lambda n: c
    raise ValueError(f"unknown k rule {spec!r}; use identity, sqrt, log or const:<c>")


def regime(n: int, k: int) -> str:
    return "k<=M" if k <= threshold_M(n) else "k>M"


DEFAULT_EXACT_LIMIT = 10**6


def _use_exact(n: int, k: int, model: ModelTag, mode: str, exact_limit: int) -> bool:
    if mode == "exact":
        return True
    if mode == "monte_carlo":
        return False
    return count_trees(n, k, model) <= exact_limit


def theorem_trend(
    target,
    model: "ModelTag | str",
    n_grid: Sequence[int],
    rule="identity",
    mode: str = "auto",
    samples: int = 100_000,
    seed: int = 0,
    threads: int = 1,
    exact_limit: int = DEFAULT_EXACT_LIMIT,
    next_k: bool = False,
) -> list[dict]:
    """Rows ``n, k, regime, p, normalized`` with ``normalized = p / rat^(e+1)``.

    ``e`` is ``L(f)`` in model G and ``R<f>`` in model E.  With ``next_k``
    the normalising ``rat`` uses ``k_{n+1}`` instead of ``k_n``.
    """
    model = ModelTag.parse(model)
    rule_fn = k_rule(rule)
    table = target.table if isinstance(target, FunctionClassKey) else target
    e = complexity(table) if model is ModelTag.G else multiplicity(table)
    rows = []
    for n in n_grid:
        k = rule_fn(n)
        k_norm = rule_fn(n + 1) if next_k else k
        rat = rat_exact(n, k_norm, model)
        scale = rat ** (e + 1)
        row = {"n": n, "k": k, "model": model.value, "regime": regime(n, k), "e": e}
        if _use_exact(n, k, model, mode, exact_limit):
            p = prob_of(n, k, model, target)
            row.update(
                method="exact", p=f"{float(p):.10g}", p_exact=str(p),
                rat=f"{float(rat):.10g}", normalized=f"{float(p / scale):.10g}",
                ci_low="", ci_high="", samples="",
            )
        else:
            rep = estimate(Computes(table), n, k, model, samples, seed, threads)
            row.update(
                method="monte_carlo", p=f"{rep.point:.10g}", p_exact="",
                rat=f"{float(rat):.10g}", normalized=f"{rep.point / float(scale):.10g}",
                ci_low=f"{rep.ci_low / float(scale):.10g}", ci_high=f"{rep.ci_high / float(scale):.10g}",
                samples=samples,
            )
        rows.append(row)
    return rows


TREND_COLUMNS = ["n", "k", "model", "regime", "e", "method", "p", "p_exact", "rat", "normalized", "ci_low", "ci_high", "samples"]


def tautology_ratio_report(
    n_grid: Sequence[int],
    rule="identity",
    model: "ModelTag | str" = "G",
    mode: str = "auto",
    samples: int = 100_000,
    seed: int = 0,
    threads: int = 1,
    exact_limit: int = DEFAULT_EXACT_LIMIT,
) -> list[dict]:
    """Rows ``n, k, mu_S, rat, mu_S/rat, mu_T/mu_S`` (simple tautologies S, tautologies T)."""
    model = ModelTag.parse(model)
    rule_fn = k_rule(rule)
    rows = []
    for n in n_grid:
        k = rule_fn(n)
        rat = rat_exact(n, k, model)
        if _use_exact(n, k, model, mode, exact_limit):
            c = tautology_census(n, k, model)
            mu_s = Fraction(c.simple, c.total)
            ratio_ts = Fraction(c.tautologies, c.simple) if c.simple else None
            rows.append({
                "n": n, "k": k, "model": model.value, "method": "exact",
                "mu_S": f"{float(mu_s):.10g}", "rat": f"{float(rat):.10g}",
                "mu_S_over_rat": f"{float(mu_s / rat):.10g}",
                "mu_T_over_mu_S": "" if ratio_ts is None else f"{float(ratio_ts):.10g}",
                "samples": "",
            })
        else:
            s, t = estimate_many(["simple_tautology", "tautology"], n, k, model, samples, seed, threads)
            rows.append({
                "n": n, "k": k, "model": model.value, "method": "monte_carlo",
                "mu_S": f"{s.point:.10g}", "rat": f"{float(rat):.10g}",
                "mu_S_over_rat": f"{s.point / float(rat):.10g}",
                "mu_T_over_mu_S": f"{t.hits / s.hits:.10g}" if s.hits else "",
                "samples": samples,
            })
    return rows


TAUTOLOGY_COLUMNS = ["n", "k", "model", "method", "mu_S", "rat", "mu_S_over_rat", "mu_T_over_mu_S", "samples"]


def model_agreement(n: int, k: int) -> dict[FunctionClassKey, tuple[Fraction, Fraction]]:
    """Class masses under model G (orbit sums) and model E side by side."""
    g = exact_distribution(n, k, ModelTag.G).class_masses()
    e = exact_distribution(n, k, ModelTag.E).mass
    return {key: (g.get(key, Fraction(0)), e.get(key, Fraction(0))) for key in set(g) | set(e)}


def distribution_rows(dist: ExactDistribution) -> list[dict]:
    rows = []
    for key in sorted(dist.counts, key=lambda x: (-dist.counts[x], str(x))):
        table = key if isinstance(key, TruthTable) else key.table
        g, idx = project_essential(table)
        rows.append({
            "n": dist.n, "k": dist.k, "model": dist.model.value,
            "function": str(key), "essential": ",".join(f"x{i}" for i in idx) if isinstance(key, TruthTable) else len(idx),
            "count": dist.counts[key], "total": dist.total,
            "probability": str(Fraction(dist.counts[key], dist.total)),
            "decimal": f"{dist.counts[key] / dist.total:.10g}",
        })
    return rows


DISTRIBUTION_COLUMNS = ["n", "k", "model", "function", "essential", "count", "total", "probability", "decimal"]


# --- output -----------------------------------------------------------------


def meta(seed=None, **params) -> dict:
    return {"seed": seed, "generator": GENERATOR, "version": __version__, **params}


def to_csv(rows: Iterable[dict], columns: Sequence[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def to_json(rows: Iterable[dict], meta_info: dict) -> str:
    return json.dumps({"rows": list(rows), "meta": meta_info}, indent=2, default=str)
