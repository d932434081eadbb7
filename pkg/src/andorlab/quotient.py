"""Equivalence classes of And/Or trees (model E).

Two trees are equivalent when they share a shape and their leaves can be
renamed and negated variable-wise without collision.  The canonical key keeps
the shape, renumbers variables by first occurrence in left-to-right leaf
order (a restricted-growth string) and flips each variable so that its first
occurrence is positive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .combinatorics import count_trees
from .trees import (
    DEFAULT_BUDGET,
    AndOrTree,
    Literal,
    check_budget,
    enumerate_shapes,
    format_tree,
    literals,
    parse,
    relabel,
    shape_of,
)


@dataclass(frozen=True)
class TreeClassKey:
    shape: AndOrTree
    variable_string: tuple[int, ...]
    polarity: tuple[bool, ...]

    def __post_init__(self):
        if len(self.variable_string) != len(self.polarity):
            raise ValueError("variable and polarity strings differ in length")
        seen = 0
        for var, pos in zip(self.variable_string, self.polarity):
            if var > seen + 1 or var < 1:
                raise ValueError("variable string is not restricted-growth")
            if var == seen + 1:
                if not pos:
                    raise ValueError("first occurrence of a variable must be positive")
                seen = var

    def __str__(self) -> str:
        vars_text = ",".join(str(v) for v in self.variable_string)
        pol_text = "".join("1" if p else "0" for p in self.polarity)
        return f"{format_tree(self.shape)}|{vars_text}|{pol_text}"

    @classmethod
    def parse(cls, text: str) -> "TreeClassKey":
        try:
            shape_text, vars_text, pol_text = text.strip().split("|")
        except ValueError:
            raise ValueError(f"bad class key {text!r}") from None
        shape = parse(shape_text, allow_holes=True)
        variable_string = tuple(int(v) for v in vars_text.split(","))
        if set(pol_text) - {"0", "1"}:
            raise ValueError(f"bad polarity string {pol_text!r}")
        polarity = tuple(c == "1" for c in pol_text)
        return cls(shape_of(shape), variable_string, polarity)


def canonical_labels(labels) -> tuple[tuple[int, ...], tuple[bool, ...]]:
    """Restricted-growth variable string and normalised polarities of a literal sequence."""
    index: dict[int, int] = {}
    first_sign: dict[int, bool] = {}
    vars_out = []
    pol_out = []
    for l in labels:
        if l.variable not in index:
            index[l.variable] = len(index) + 1
            first_sign[l.variable] = l.positive
        vars_out.append(index[l.variable])
        pol_out.append(l.positive == first_sign[l.variable])
    return tuple(vars_out), tuple(pol_out)


def canonicalize(t: AndOrTree) -> TreeClassKey:
    vs, pol = canonical_labels(literals(t))
    return TreeClassKey(shape_of(t), vs, pol)


def distinct_variable_count(key: TreeClassKey) -> int:
    return max(key.variable_string)


def representative(key: TreeClassKey) -> AndOrTree:
    """The class member with variable ``i`` of the key mapped to ``x_i``."""
    labels = [Literal(v, p) for v, p in zip(key.variable_string, key.polarity)]
    return relabel(key.shape, labels)


def restricted_growth_strings(n: int, max_blocks: int | None = None) -> Iterator[tuple[int, ...]]:
    """Restricted-growth strings of length ``n`` with values ``1..max_blocks``,
    in lexicographic order."""
    cap = n if max_blocks is None else min(n, max_blocks)

    def go(prefix: list[int], top: int):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(1, min(top + 1, cap) + 1):
            prefix.append(v)
            yield from go(prefix, max(top, v))
            prefix.pop()

    if n < 1:
        raise ValueError("n must be >= 1")
    return go([], 0)


def enumerate_labellings_E(n: int, k: int) -> Iterator[tuple[tuple[int, ...], tuple[bool, ...]]]:
    """Canonical (variable string, polarity) pairs for ``n`` leaves and at most ``k`` variables."""
    for rgs in restricted_growth_strings(n, k):
        free = []
        seen = 0
        for i, v in enumerate(rgs):
            if v > seen:
                seen = v
            else:
                free.append(i)
        for bits in itertools.product((True, False), repeat=len(free)):
            pol = [True] * n
            for i, b in zip(free, bits):
                pol[i] = b
            yield rgs, tuple(pol)


def enumerate_classes(n: int, k: int, budget: int | None = DEFAULT_BUDGET) -> Iterator[TreeClassKey]:
    """Every class of size-``n`` trees with at most ``k`` distinct variables, exactly once."""
    check_budget(count_trees(n, k, "E"), budget, "classes")
    return _classes(n, k)


def _classes(n: int, k: int) -> Iterator[TreeClassKey]:
    labellings = list(enumerate_labellings_E(n, k))
    for shape in enumerate_shapes(n):
        for vs, pol in labellings:
            yield TreeClassKey(shape, vs, pol)
