"""Boolean functions: essential variables, And/Or complexity, function classes.

Complexity comes from a level-by-level reachable-set dynamic program over the
essential variables of ``f``: level 1 holds the literal tables and level ``s``
collects ``g & h`` and ``g | h`` for ``g`` at level ``i`` and ``h`` at level
``s - i``.  Constants never occur inside a minimal tree, so they are dropped
from every level.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .trees import AND, OR, AndOrTree, Leaf, Literal, Node, check_budget
from .truthtable import TruthTable, full_mask, literal_mask

MAX_SUPPORT = 4


class SupportTooLarge(ValueError):
    """The function depends on more variables than the exact oracle handles."""


def essential_variables(f: TruthTable) -> set[int]:
    return {
        var
        for var in range(1, f.support + 1)
        if f.cofactor(var, False) != f.cofactor(var, True)
    }


def essential_count(f: TruthTable) -> int:
    return len(essential_variables(f))


def project_essential(f: TruthTable) -> tuple[TruthTable, tuple[int, ...]]:
    """Table over the essential variables only, plus their original indices.

    Projected variable ``i`` stands for original ``x_{indices[i-1]}``.
    """
    indices = tuple(sorted(essential_variables(f)))
    e = len(indices)
    value = 0
    for j in range(1 << e):
        src = 0
        for i, var in enumerate(indices):
            if (j >> i) & 1:
                src |= 1 << (var - 1)
        if (f.value >> src) & 1:
            value |= 1 << j
    return TruthTable(e, value), indices


def _check_support(e: int, max_support: int) -> None:
    if e > max_support:
        raise SupportTooLarge(
            f"function has {e} essential variables; exact oracle limited to {max_support}"
        )


# --- reachable-set dynamic program ----------------------------------------


def _dtype(m: int):
    return np.uint8 if m <= 3 else np.uint16


@lru_cache(maxsize=None)
def complexity_levels(m: int) -> tuple[np.ndarray, ...]:
    """``levels[s]`` = sorted tables over ``m`` variables with complexity ``s``.

    ``levels[0]`` holds the two constants.
    """
    if m > MAX_SUPPORT:
        raise SupportTooLarge(f"support {m} above the cap {MAX_SUPPORT}")
    dtype = _dtype(m)
    top = full_mask(m)
    n_funcs = 1 << (1 << m)
    known = np.zeros(n_funcs, dtype=bool)
    known[0] = known[top] = True
    levels = [np.array([0, top], dtype=dtype)]
    if m == 0:
        return tuple(levels)
    lits = sorted({literal_mask(m, v, p) for v in range(1, m + 1) for p in (True, False)})
    first = np.array(lits, dtype=dtype)
    known[first] = True
    levels.append(first)
    remaining = n_funcs - 2 - len(first)
    s = 1
    while remaining > 0:
        s += 1
        found = np.zeros(n_funcs, dtype=bool)
        for i in range(1, s // 2 + 1):
            a, b = levels[i], levels[s - i]
            for start in range(0, len(a), 256):
                block = a[start : start + 256, None]
                found[(block & b[None, :]).ravel()] = True
                found[(block | b[None, :]).ravel()] = True
        new = np.flatnonzero(found & ~known).astype(dtype)
        known[new] = True
        remaining -= len(new)
        levels.append(new)
    return tuple(levels)


@lru_cache(maxsize=None)
def _complexity_lookup(m: int) -> np.ndarray:
    table = np.zeros(1 << (1 << m), dtype=np.int16)
    for s, level in enumerate(complexity_levels(m)):
        table[level] = s
    return table


def complexity(f: TruthTable, max_support: int = MAX_SUPPORT) -> int:
    """``L(f)``: size of a smallest And/Or tree computing ``f`` (0 for constants)."""
    if f.is_constant():
        return 0
    g, _ = project_essential(f)
    _check_support(g.support, max_support)
    return int(_complexity_lookup(g.support)[g.value])


def multiplicity(f: TruthTable, max_support: int = MAX_SUPPORT) -> int:
    """``R = L - E``."""
    return complexity(f, max_support) - essential_count(f)


# --- minimal trees ----------------------------------------------------------


@lru_cache(maxsize=None)
def _level_sets(m: int) -> tuple[frozenset, ...]:
    return tuple(frozenset(int(x) for x in level) for level in complexity_levels(m))


def _splits(m: int, value: int, s: int) -> list[tuple]:
    """All ``(connective, g, i, h)`` with ``g op h == value``, ``L(g) = i``, ``L(h) = s - i``."""
    sets = _level_sets(m)
    out = []
    for i in range(1, s):
        right = sets[s - i]
        for g in sets[i]:
            if value & ~g == 0:
                # g & h == value: h must cover value and avoid g \ value
                for h in right:
                    if g & h == value:
                        out.append((AND, g, i, h))
            if g & ~value == 0:
                for h in right:
                    if g | h == value:
                        out.append((OR, g, i, h))
    return out


@lru_cache(maxsize=None)
def _minimal_count(m: int, value: int, s: int) -> int:
    if s == 1:
        return 1
    return sum(
        _minimal_count(m, g, i) * _minimal_count(m, h, s - i)
        for _, g, i, h in _splits(m, value, s)
    )


def _literal_for(m: int, value: int) -> Literal:
    for v in range(1, m + 1):
        for pos in (True, False):
            if literal_mask(m, v, pos) == value:
                return Literal(v, pos)
    raise ValueError("not a literal table")


def _minimal_trees(m: int, value: int, s: int) -> Iterator[AndOrTree]:
    if s == 1:
        yield Leaf(_literal_for(m, value))
        return
    for conn, g, i, h in _splits(m, value, s):
        for left in _minimal_trees(m, g, i):
            for right in _minimal_trees(m, h, s - i):
                yield Node(conn, left, right)


def minimal_tree_count(f: TruthTable, max_support: int = 3) -> int:
    if f.is_constant():
        return 0
    g, _ = project_essential(f)
    _check_support(g.support, max_support)
    return _minimal_count(g.support, g.value, complexity(g))


def minimal_trees(
    f: TruthTable, max_support: int = 3, budget: int | None = 10**6
) -> Iterator[AndOrTree]:
    """Every tree of size ``L(f)`` over the essential variables computing ``f``, once each.

    Constants have no minimal tree (``L = 0``), so the stream is empty for them.
    """
    if f.is_constant():
        return iter(())
    g, indices = project_essential(f)
    _check_support(g.support, max_support)
    s = complexity(g)
    check_budget(_minimal_count(g.support, g.value, s), budget, "minimal trees")
    from .trees import map_literals

    def back(l: Literal) -> Literal:
        return Literal(indices[l.variable - 1], l.positive)

    return (map_literals(t, back) for t in _minimal_trees(g.support, g.value, s))


# --- function classes -------------------------------------------------------


@dataclass(frozen=True, order=True)
class FunctionClassKey:
    """Canonical representative of a class under variable renaming and negation."""

    support: int
    bits: tuple[bool, ...]

    @property
    def table(self) -> TruthTable:
        return TruthTable.from_bits(self.bits) if self.bits else TruthTable(0, 0)

    def __str__(self) -> str:
        return str(TruthTable.from_bits(self.bits))


MAX_CLASS_SUPPORT = 5


@lru_cache(maxsize=None)
def _relabel_index(e: int) -> np.ndarray:
    """Row ``r`` maps each assignment ``j`` to its source under the ``r``-th relabelling.

    Relabellings run over all permutations of ``x1..xe`` times all negation
    masks, so ``g.bits[j] = f.bits[index[r, j]]`` ranges over the orbit of ``f``
    (same convention as :meth:`TruthTable.permute`).
    """
    j = np.arange(1 << e, dtype=np.int64)
    rows = []
    for perm in itertools.permutations(range(1, e + 1)):
        for flips in range(1 << e):
            src = np.zeros_like(j)
            for i in range(e):
                bit = ((j >> (perm[i] - 1)) & 1) ^ ((flips >> i) & 1)
                src |= bit << i
            rows.append(src)
    return np.array(rows, dtype=np.int64).reshape(-1, 1 << e)


def _orbit_bits(e: int, value: int) -> np.ndarray:
    bits = np.array([(value >> j) & 1 for j in range(1 << e)], dtype=np.uint64)
    return bits[_relabel_index(e)]


@lru_cache(maxsize=None)
def _orbit(e: int, value: int) -> frozenset[int]:
    gathered = _orbit_bits(e, value)
    weights = np.uint64(1) << np.arange(1 << e, dtype=np.uint64)
    return frozenset(int(v) for v in np.unique((gathered * weights).sum(axis=1)))


def _bits(e: int, value: int) -> tuple[bool, ...]:
    return tuple(bool((value >> j) & 1) for j in range(1 << e))


@lru_cache(maxsize=1 << 16)
def _class_key(support: int, value: int, max_support: int) -> FunctionClassKey:
    g, _ = project_essential(TruthTable(support, value))
    _check_support(g.support, max_support)
    e = g.support
    gathered = _orbit_bits(e, g.value)
    # bit 0 most significant, so the integer order is the lexicographic order of bit tuples
    weights = np.uint64(1) << np.arange((1 << e) - 1, -1, -1, dtype=np.uint64)
    best = int(((gathered * weights).sum(axis=1)).min())
    bits = tuple(bool((best >> ((1 << e) - 1 - j)) & 1) for j in range(1 << e))
    return FunctionClassKey(e, bits)


def class_key(f: TruthTable, max_support: int = MAX_CLASS_SUPPORT) -> FunctionClassKey:
    """Lexicographically least table (bit 0 first) in the orbit of ``f``,
    after projecting away inessential variables."""
    return _class_key(f.support, f.value, max_support)


def orbit_size_within_support(f: TruthTable, max_support: int = MAX_CLASS_SUPPORT) -> int:
    """Number of distinct functions on ``E(f)`` fixed variables in the class of ``f``."""
    g, _ = project_essential(f)
    _check_support(g.support, max_support)
    return len(_orbit(g.support, g.value))


def class_cardinality(f: TruthTable, k: int, max_support: int = MAX_CLASS_SUPPORT) -> int:
    """Exact number of functions over ``x1..xk`` in the class of ``f``.

    Equals ``C(k, E) * E! * 2^E / |stabiliser|``; compare
    :func:`generic_class_cardinality` for the stabiliser-free count.
    """
    e = essential_count(f)
    if e > k:
        raise ValueError(f"E(f) = {e} exceeds k = {k}")
    return math.comb(k, e) * orbit_size_within_support(f, max_support)


def generic_class_cardinality(f: TruthTable, k: int) -> int:
    """``C(k, E) 2^E``, the class size quoted for functions with no symmetry."""
    e = essential_count(f)
    return math.comb(k, e) << e


def orbit_report(f: TruthTable, k: int) -> dict:
    return {
        "essential": essential_count(f),
        "exact": class_cardinality(f, k),
        "generic": generic_class_cardinality(f, k),
    }
