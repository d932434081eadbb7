"""Pattern languages over And/Or trees and the structural censuses built on them.

Supported languages (``•`` pattern leaf, ``□`` place-holder)::

    N = • | N∨N | N∧□          P = • | P∨□ | P∧P          M = • | M∨M | □∧□

plus ``N⊕P`` (pattern region = union of the N and P regions), compositions
``N^(i)``, ``R(r) = N^(r+1)[N⊕P]`` and ``Rbar(r) = N^(r+1)[(N⊕P)^2]``.
A decomposition depends on the shape only, so it is cached per shape and the
literals are attached afterwards.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import ModelTag, count_trees, falling_factorial, rat_exact, shape_count
from .quotient import canonicalize, enumerate_classes, enumerate_labellings_E, restricted_growth_strings
from .trees import (
    AND,
    DEFAULT_BUDGET,
    OR,
    AndOrTree,
    Connective,
    Leaf,
    Literal,
    Node,
    check_budget,
    compile_shape,
    enumerate_shapes,
    enumerate_trees_G,
    literal_alphabet,
    literals,
    positions,
    replace_at,
    run_program,
    shape_of,
    subtree,
    truth_table,
)
from .truthtable import full_mask, variable_mask

Path = tuple[int, ...]

_BASE = ("N", "P", "M", "NP")


@dataclass(frozen=True)
class PatternLang:
    kind: str
    param: int = 0

    def __post_init__(self):
        if self.kind not in _BASE + ("N_pow", "R", "R_bar"):
            raise ValueError(f"unknown pattern language {self.kind!r}")
        if self.kind in ("N_pow", "R", "R_bar") and self.param < 1:
            raise ValueError(f"{self.kind} needs a parameter >= 1")

    def levels(self) -> tuple[str, ...]:
        if self.kind in _BASE:
            return (self.kind,)
        if self.kind == "N_pow":
            return ("N",) * self.param
        if self.kind == "R":
            return ("N",) * (self.param + 1) + ("NP",)
        return ("N",) * (self.param + 1) + ("NP", "NP")

    def __str__(self) -> str:
        if self.kind in _BASE:
            return "N+P" if self.kind == "NP" else self.kind
        return f"{self.kind}({self.param})"

    @classmethod
    def parse(cls, text: "str | PatternLang") -> "PatternLang":
        if isinstance(text, PatternLang):
            return text
        text = text.strip()
        if text in ("N", "P", "M"):
            return cls(text)
        if text in ("NP", "N+P"):
            return cls("NP")
        for kind in ("N_pow", "R_bar", "R"):
            if text.startswith(kind + "(") and text.endswith(")"):
                return cls(kind, int(text[len(kind) + 1 : -1]))
        raise ValueError(f"cannot parse pattern language {text!r}")


N = PatternLang("N")
P = PatternLang("P")
M = PatternLang("M")
NP = PatternLang("NP")


def N_pow(i: int) -> PatternLang:
    return PatternLang("N_pow", i)


def R(r: int) -> PatternLang:
    return PatternLang("R", r)


def R_bar(r: int) -> PatternLang:
    return PatternLang("R_bar", r)


# --- single-level regions ---------------------------------------------------


def _region(t: AndOrTree, base: str, root: Path) -> tuple[list[Path], list[Path]]:
    """Pattern-leaf paths and place-holder paths for one base language at ``root``."""
    if base == "NP":
        n_nodes = _region_nodes(t, "N", root)
        p_nodes = _region_nodes(t, "P", root)
        region = n_nodes | p_nodes
        pattern, holes = [], []
        for path in sorted(region):
            node = subtree(t, path)
            if isinstance(node, Leaf):
                pattern.append(path)
            else:
                for step in (0, 1):
                    child = path + (step,)
                    if child not in region:
                        holes.append(child)
        return pattern, holes
    pattern, holes = [], []
    stack = [root]
    while stack:
        path = stack.pop()
        node = subtree(t, path)
        if isinstance(node, Leaf):
            pattern.append(path)
            continue
        both = (base == "N" and node.connective is OR) or (
            base == "P" and node.connective is AND
        ) or (base == "M" and node.connective is OR)
        if both:
            stack.append(path + (1,))
            stack.append(path + (0,))
        elif base == "M":
            holes.append(path + (0,))
            holes.append(path + (1,))
        else:
            stack.append(path + (0,))
            holes.append(path + (1,))
    return pattern, holes


def _region_nodes(t: AndOrTree, base: str, root: Path) -> set[Path]:
    out = set()
    stack = [root]
    while stack:
        path = stack.pop()
        out.add(path)
        node = subtree(t, path)
        if isinstance(node, Leaf):
            continue
        if (base == "N" and node.connective is OR) or (base == "P" and node.connective is AND):
            stack.append(path + (0,))
            stack.append(path + (1,))
        else:
            stack.append(path + (0,))
    return out


# --- decompositions ---------------------------------------------------------


@dataclass(frozen=True)
class PatternLeaf:
    path: Path
    index: int  # position in left-to-right leaf order
    level: int
    literal: Literal | None = None


@dataclass(frozen=True)
class PatternDecomposition:
    lang: PatternLang
    pattern_leaves: tuple[PatternLeaf, ...]
    placeholders: tuple[Path, ...]
    placeholder_leaves: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def pattern_indices(self) -> tuple[int, ...]:
        return tuple(pl.index for pl in self.pattern_leaves)

    def leaves_at_level(self, level: int) -> tuple[PatternLeaf, ...]:
        return tuple(pl for pl in self.pattern_leaves if pl.level == level)


def _leaf_paths(t: AndOrTree) -> list[Path]:
    return [path for path, node in positions(t) if isinstance(node, Leaf)]


@lru_cache(maxsize=200_000)
def _shape_decomposition(shape: AndOrTree, lang: PatternLang) -> PatternDecomposition:
    leaf_paths = _leaf_paths(shape)
    index = {p: i for i, p in enumerate(leaf_paths)}
    pattern: list[PatternLeaf] = []
    frontier: list[Path] = [()]
    for level, base in enumerate(lang.levels(), start=1):
        nxt: list[Path] = []
        for root in frontier:
            leaf_ps, holes = _region(shape, base, root)
            pattern.extend(PatternLeaf(p, index[p], level) for p in leaf_ps)
            nxt.extend(holes)
        frontier = nxt
    pattern.sort(key=lambda pl: pl.index)
    frontier.sort(key=lambda p: _first_leaf(leaf_paths, p))
    covered = tuple(
        tuple(i for i, lp in enumerate(leaf_paths) if lp[: len(h)] == h) for h in frontier
    )
    return PatternDecomposition(lang, tuple(pattern), tuple(frontier), covered)


def _first_leaf(leaf_paths: list[Path], prefix: Path) -> int:
    for i, lp in enumerate(leaf_paths):
        if lp[: len(prefix)] == prefix:
            return i
    raise ValueError("path has no leaf")


def decompose(t: AndOrTree, lang: "PatternLang | str") -> PatternDecomposition:
    """Unique factorisation of ``t`` against ``lang`` applied to arbitrary subtrees."""
    lang = PatternLang.parse(lang)
    base = _shape_decomposition(shape_of(t), lang)
    lits = literals(t)
    leaves_ = tuple(
        PatternLeaf(pl.path, pl.index, pl.level, lits[pl.index]) for pl in base.pattern_leaves
    )
    return PatternDecomposition(lang, leaves_, base.placeholders, base.placeholder_leaves)


def compose_decompose(t: AndOrTree, i: int) -> PatternDecomposition:
    """Decomposition against ``N^(i)``."""
    return decompose(t, N_pow(i))


@lru_cache(maxsize=200_000)
def pattern_indices(shape: AndOrTree, lang: PatternLang) -> tuple[int, ...]:
    return _shape_decomposition(shape, lang).pattern_indices


def _pattern_literals(t: AndOrTree, lang) -> list[Literal]:
    lang = PatternLang.parse(lang)
    lits = literals(t)
    return [lits[i] for i in pattern_indices(shape_of(t), lang)]


def repetitions(t: AndOrTree, lang: "PatternLang | str") -> int:
    """Pattern leaves minus distinct variables among them."""
    lits = _pattern_literals(t, lang)
    return len(lits) - len({l.variable for l in lits})


def restrictions(t: AndOrTree, lang: "PatternLang | str", gamma: Iterable[int]) -> int:
    gamma = set(gamma)
    lits = _pattern_literals(t, lang)
    in_gamma = sum(1 for l in lits if l.variable in gamma)
    return in_gamma + len(lits) - len({l.variable for l in lits})


# --- simple tautologies and forcing ----------------------------------------


def _has_complementary_pair(lits: Iterable[Literal]) -> bool:
    seen: dict[int, bool] = {}
    for l in lits:
        prev = seen.setdefault(l.variable, l.positive)
        if prev != l.positive:
            return True
    return False


def or_spine_literals(t: AndOrTree) -> list[Literal]:
    """Literals of the leaves joined to the root by ∨-nodes only (the M-pattern leaves)."""
    return _pattern_literals(t, M)


def is_simple_tautology(t: AndOrTree) -> bool:
    return _has_complementary_pair(or_spine_literals(t))


def and_spine_literals(t: AndOrTree) -> list[Literal]:
    out = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node.literal)
        elif node.connective is AND:
            stack.append(node.right)
            stack.append(node.left)
    return out


def is_simple_contradiction(t: AndOrTree) -> bool:
    return _has_complementary_pair(and_spine_literals(t))


def forcing_check_shape(shape: AndOrTree, lang: "PatternLang | str") -> bool:
    """Pin the pattern leaves (false for N, true for P) and let every other leaf be a
    fresh variable; true iff the tree computes the pinned value for every completion."""
    lang = PatternLang.parse(lang)
    if lang.kind not in ("N", "P"):
        raise ValueError("forcing is defined for N and P only")
    pinned = set(pattern_indices(shape_of(shape), lang))
    n = len(_leaf_paths(shape))
    free = [i for i in range(n) if i not in pinned]
    m = len(free)
    full = full_mask(m)
    forced = 0 if lang.kind == "N" else full
    values = []
    fresh = iter(range(1, m + 1))
    for i in range(n):
        values.append(forced if i in pinned else variable_mask(m, next(fresh)))
    return run_program(compile_shape(shape), values) == forced


def forcing_check(t: AndOrTree, lang: "PatternLang | str") -> bool:
    return forcing_check_shape(shape_of(t), lang)


# --- expansions -------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionMatch:
    site: Path  # path of the replaced subtree s inside the minimal tree
    connective: Connective
    expansion_on_left: bool
    expansion: AndOrTree
    kind: str


@dataclass(frozen=True)
class ExpansionResult:
    kind: str  # T_expansion | X_expansion | other | not_an_expansion
    match: ExpansionMatch | None = None
    alternatives: tuple[ExpansionMatch, ...] = ()
    reason: str = ""

    @property
    def ambiguous(self) -> bool:
        return len(self.alternatives) > 0


def _spine_leaf_variables(t: AndOrTree, conn: Connective) -> set[int]:
    out = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.add(node.literal.variable)
        elif node.connective is conn:
            stack.append(node.left)
            stack.append(node.right)
    return out


def _classify_expansion_tree(conn: Connective, t_e: AndOrTree, essential: set[int]) -> str:
    if conn is AND and is_simple_tautology(t_e):
        return "T_expansion"
    if conn is OR and is_simple_contradiction(t_e):
        return "T_expansion"
    # ∧-path leaf under ∨, or ∨-path leaf under ∧, labelled by an essential variable
    if _spine_leaf_variables(t_e, conn.swap()) & essential:
        return "X_expansion"
    return "other"


def classify_expansion(minimal: AndOrTree, expanded: AndOrTree) -> ExpansionResult:
    """Find ``s`` in ``minimal`` with ``expanded`` = ``minimal[s -> s ⋄ t_e]`` (or
    ``t_e ⋄ s``) and classify the expansion tree ``t_e``.

    Sites are searched in pre-order of ``expanded``; the first match is
    reported and any further matches are returned as ``alternatives``.
    """
    from .boolfn import essential_variables

    m = max(l.variable for l in literals(minimal))
    essential = essential_variables(truth_table(minimal, m))
    matches = []
    for path, node in positions(expanded):
        if not isinstance(node, Node):
            continue
        for keep_left in (True, False):
            kept, t_e = (node.left, node.right) if keep_left else (node.right, node.left)
            if replace_at(expanded, path, kept) == minimal:
                kind = _classify_expansion_tree(node.connective, t_e, essential)
                matches.append(ExpansionMatch(path, node.connective, not keep_left, t_e, kind))
    if not matches:
        return ExpansionResult("not_an_expansion", reason="no single-site insertion turns the minimal tree into the expanded one")
    first = matches[0]
    return ExpansionResult(first.kind, first, tuple(matches[1:]))


# --- generating-function coefficients --------------------------------------


def pattern_gf_coefficients(lang: "PatternLang | str", max_leaves: int) -> dict[tuple[int, int], int]:
    """``{(d, p): count}`` of patterns with ``d`` pattern leaves and ``p`` place-holders,
    from the grammar's functional equation, for ``d + p <= max_leaves``."""
    lang = PatternLang.parse(lang)
    if lang.kind not in ("N", "P", "M"):
        raise ValueError("coefficients available for N, P and M")
    size = max_leaves + 1
    c = np.zeros((size, size), dtype=object)
    c[:, :] = 0
    # N and P share n = x + n^2 + y n; M satisfies m = x + m^2 + y^2
    for total in range(1, size):
        for d in range(0, total + 1):
            p = total - d
            val = 1 if (d, p) == (1, 0) else 0
            if lang.kind == "M" and (d, p) == (0, 2):
                val += 1
            for d1 in range(0, d + 1):
                for p1 in range(0, p + 1):
                    if 0 < d1 + p1 < total:
                        val += c[d1, p1] * c[d - d1, p - p1]
            if lang.kind in ("N", "P") and p >= 1:
                val += c[d, p - 1]
            c[d, p] = val
    return {(d, p): int(c[d, p]) for d in range(size) for p in range(size) if d + p <= max_leaves and c[d, p]}


# --- exhaustive censuses ----------------------------------------------------


def labelling_arrays(n: int, k: int, model: ModelTag):
    """Rows of (variables, positivity, weight) covering every labelling of ``n`` leaves."""
    if model is ModelTag.G:
        alphabet = literal_alphabet(k)
        rows = list(itertools.product(range(len(alphabet)), repeat=n))
        codes = np.array(rows, dtype=np.int64).reshape(len(rows), n)
        var = codes // 2 + 1
        pos = (codes % 2) == 0
    else:
        pairs = list(enumerate_labellings_E(n, k))
        var = np.array([vs for vs, _ in pairs], dtype=np.int64).reshape(len(pairs), n)
        pos = np.array([pol for _, pol in pairs], dtype=bool).reshape(len(pairs), n)
    return var, pos


def leaf_table_matrix(var: np.ndarray, pos: np.ndarray, support: int) -> np.ndarray:
    if support > 6:
        raise ValueError("vectorised census supports at most 6 variables")
    masks = np.array([0] + [variable_mask(support, v) for v in range(1, support + 1)], dtype=np.uint64)
    full = np.uint64(full_mask(support))
    tables = masks[var]
    return np.where(pos, tables, tables ^ full)


def _distinct_count(cols: np.ndarray) -> np.ndarray:
    if cols.shape[1] == 0:
        return np.zeros(cols.shape[0], dtype=np.int64)
    s = np.sort(cols, axis=1)
    return 1 + (np.diff(s, axis=1) != 0).sum(axis=1)


def _complementary_any(var: np.ndarray, pos: np.ndarray, idx: Sequence[int]) -> np.ndarray:
    out = np.zeros(var.shape[0], dtype=bool)
    for a, b in itertools.combinations(idx, 2):
        out |= (var[:, a] == var[:, b]) & (pos[:, a] != pos[:, b])
    return out


@dataclass(frozen=True)
class TautologyCensus:
    n: int
    k: int
    model: ModelTag
    total: int
    tautologies: int
    simple: int
    one_NN_repetition: int  # tautologies with exactly one N^(2)-repetition
    no_NN_repetition: int  # tautologies with no N^(2)-repetition (expected 0)
    one_NN_not_simple: int  # one-repetition tautologies that are not simple (expected 0)
    simple_not_tautology: int  # sanity: must be 0

    @property
    def rat(self):
        return rat_exact(self.n, self.k, self.model) if self.n >= 2 else None

    def csv_row(self) -> dict:
        from fractions import Fraction

        ratio = ""
        if self.n >= 2 and self.simple:
            ratio = f"{float(Fraction(self.simple, self.total) / self.rat):.10g}"
        return {
            "n": self.n,
            "k": self.k,
            "model": self.model.value,
            "count_total": self.total,
            "count_tautology": self.tautologies,
            "count_simple": self.simple,
            "ratio_simple_over_rat": ratio,
        }


CENSUS_COLUMNS = [
    "n", "k", "model", "count_total", "count_tautology", "count_simple", "ratio_simple_over_rat",
]


def tautology_census(n: int, k: int, model: "ModelTag | str", budget: int | None = DEFAULT_BUDGET) -> TautologyCensus:
    """Exact tautology counts over every tree (G) or class (E) of size ``n``."""
    model = ModelTag.parse(model)
    total = count_trees(n, k, model)
    check_budget(total, budget, "trees" if model is ModelTag.G else "classes")
    var, pos = labelling_arrays(n, k, model)
    support = k if model is ModelTag.G else min(k, n)
    tables = leaf_table_matrix(var, pos, support)
    full = np.uint64(full_mask(support))
    nn = N_pow(2)
    counts = dict(taut=0, simple=0, one=0, none=0, one_ns=0, s_nt=0)
    for shape in enumerate_shapes(n):
        result = run_program(compile_shape(shape), [tables[:, i] for i in range(n)])
        taut = result == full
        simple = _complementary_any(var, pos, pattern_indices(shape, M))
        idx = list(pattern_indices(shape, nn))
        reps = len(idx) - _distinct_count(var[:, idx])
        counts["taut"] += int(taut.sum())
        counts["simple"] += int(simple.sum())
        counts["one"] += int((taut & (reps == 1)).sum())
        counts["none"] += int((taut & (reps == 0)).sum())
        counts["one_ns"] += int((taut & (reps == 1) & ~simple).sum())
        counts["s_nt"] += int((simple & ~taut).sum())
    return TautologyCensus(
        n, k, model, total, counts["taut"], counts["simple"], counts["one"],
        counts["none"], counts["one_ns"], counts["s_nt"],
    )


def count_with_repetitions(
    n: int,
    k: int,
    lang: "PatternLang | str",
    r: int,
    model: "ModelTag | str",
    at_least: bool = False,
    budget: int | None = DEFAULT_BUDGET,
) -> int:
    """Trees (G) or classes (E) of size ``n`` with exactly / at least ``r`` repetitions.

    Shapes are enumerated one by one and grouped by their pattern-leaf
    positions.  Leaf variables are enumerated as restricted-growth strings,
    each standing for ``k(k-1)...(k-p+1)`` variable strings in model G and
    for ``2^(n-p)`` polarity completions in model E.
    """
    lang = PatternLang.parse(lang)
    model = ModelTag.parse(model)
    # the work is one pass over the shapes; labellings are counted, not listed
    check_budget(shape_count(n), budget, "shapes")
    groups: dict[tuple[int, ...], int] = {}
    for shape in enumerate_shapes(n):
        idx = pattern_indices(shape, lang)
        groups[idx] = groups.get(idx, 0) + 1
    total = 0
    if model is ModelTag.E:
        strings = [(rgs, max(rgs)) for rgs in restricted_growth_strings(n, k)]
        for idx, mult in groups.items():
            for rgs, p in strings:
                reps = len(idx) - len({rgs[i] for i in idx})
                if reps == r or (at_least and reps > r):
                    total += mult << (n - p)
        return total
    # model G: only the d pattern leaves matter; the rest contribute (2k)^(n-d)
    per_d: dict[int, int] = {}
    for d in {len(idx) for idx in groups}:
        hits = 0
        if d:
            for rgs in restricted_growth_strings(d, k):
                p = max(rgs)
                reps = d - p
                if reps == r or (at_least and reps > r):
                    hits += falling_factorial(k, p)
        elif r == 0:
            hits = 1
        per_d[d] = hits << d  # polarities of the pattern leaves
    for idx, mult in groups.items():
        d = len(idx)
        total += mult * per_d[d] * (2 * k) ** (n - d)
    return total


def count_with_repetitions_bruteforce(
    n: int, k: int, lang: "PatternLang | str", r: int, model: "ModelTag | str",
    at_least: bool = False, budget: int | None = 2_000_000,
) -> int:
    """Reference count that streams every tree or class and tests it directly."""
    model = ModelTag.parse(model)
    if model is ModelTag.G:
        stream = enumerate_trees_G(n, k, budget)
    else:
        from .quotient import representative

        stream = (representative(key) for key in enumerate_classes(n, k, budget))
    total = 0
    for t in stream:
        reps = repetitions(t, lang)
        if reps == r or (at_least and reps > r):
            total += 1
    return total
