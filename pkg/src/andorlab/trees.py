"""And/Or trees: construction, evaluation, text format and enumeration.

Trees are immutable.  A leaf with ``literal=None`` is an unlabelled leaf, so a
tree whose leaves are all unlabelled is a connective-labelled *shape*.

Text format::

    (or (and x1 (not x2)) x3)

Shapes use ``.`` for leaves: ``(or . .)``.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Sequence, Union

from .combinatorics import count_trees, shape_count
from .truthtable import TruthTable, full_mask, literal_mask

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, count: int, budget: int, what: str = "objects"):
        super().__init__(f"refusing to enumerate {count} {what} (budget {budget})")
        self.count = count
        self.budget = budget
        self.what = what


def check_budget(count: int, budget: int | None, what: str = "objects") -> None:
    if budget is not None and count > budget:
        raise BudgetExceeded(count, budget, what)


class Connective(enum.Enum):
    AND = "and"
    OR = "or"

    def swap(self) -> "Connective":
        return Connective.OR if self is Connective.AND else Connective.AND


AND = Connective.AND
OR = Connective.OR


@dataclass(frozen=True, order=True)
class Literal:
    variable: int
    positive: bool = True

    def __post_init__(self):
        if self.variable < 1:
            raise ValueError(f"variable index must be >= 1, got {self.variable}")

    def negate(self) -> "Literal":
        return Literal(self.variable, not self.positive)

    @property
    def code(self) -> int:
        """``+v`` for ``x_v``, ``-v`` for its negation."""
        return self.variable if self.positive else -self.variable

    @classmethod
    def from_code(cls, code: int) -> "Literal":
        return cls(abs(code), code > 0)

    def sort_key(self) -> tuple[int, int]:
        # x1 < not x1 < x2 < ...
        return (self.variable, 0 if self.positive else 1)

    def __str__(self) -> str:
        return f"x{self.variable}" if self.positive else f"(not x{self.variable})"


@dataclass(frozen=True)
class Leaf:
    literal: Literal | None = None


@dataclass(frozen=True)
class Node:
    connective: Connective
    left: "AndOrTree"
    right: "AndOrTree"


AndOrTree = Union[Leaf, Node]
HOLE = Leaf(None)


def lit(var: int, positive: bool = True) -> Leaf:
    return Leaf(Literal(var, positive))


def neg(var: int) -> Leaf:
    return Leaf(Literal(var, False))


def conj(left: AndOrTree, right: AndOrTree) -> Node:
    return Node(AND, left, right)


def disj(left: AndOrTree, right: AndOrTree) -> Node:
    return Node(OR, left, right)


def size(t: AndOrTree) -> int:
    """Number of leaves."""
    count = 0
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            count += 1
        else:
            stack.append(node.left)
            stack.append(node.right)
    return count


def leaves(t: AndOrTree) -> list[Leaf]:
    """Leaves in left-to-right order."""
    out = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node)
        else:
            stack.append(node.right)
            stack.append(node.left)
    return out


def literals(t: AndOrTree) -> list[Literal]:
    return [leaf.literal for leaf in leaves(t)]


def variables(t: AndOrTree) -> set[int]:
    return {leaf.literal.variable for leaf in leaves(t) if leaf.literal is not None}


def max_variable(t: AndOrTree) -> int:
    return max(variables(t), default=0)


def height(t: AndOrTree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + max(height(t.left), height(t.right))


def eval_tree(t: AndOrTree, assignment: Mapping[int, bool]) -> bool:
    """Evaluate ``t`` under ``assignment`` (variable index -> bool)."""
    if isinstance(t, Leaf):
        if t.literal is None:
            raise ValueError("cannot evaluate an unlabelled leaf")
        try:
            value = bool(assignment[t.literal.variable])
        except KeyError:
            raise ValueError(f"assignment does not cover x{t.literal.variable}") from None
        return value if t.literal.positive else not value
    if t.connective is AND:
        return eval_tree(t.left, assignment) and eval_tree(t.right, assignment)
    return eval_tree(t.left, assignment) or eval_tree(t.right, assignment)


def truth_table(t: AndOrTree, support: int) -> TruthTable:
    """Table of ``t`` over variables ``x1..x_support``."""
    top = max_variable(t)
    if top > support:
        raise ValueError(f"x{top} lies outside support {support}")
    program = compile_shape(t)
    tables = [literal_mask(support, l.variable, l.positive) for l in literals(t)]
    return TruthTable(support, run_program(program, tables))


# --- shape programs -------------------------------------------------------
#
# A shape compiles to a postfix program: ``None`` pushes the next leaf value,
# a connective pops two operands.  The same program evaluates Python ints
# (truth tables) and numpy arrays of tables, which is what the exhaustive
# censuses use.


@lru_cache(maxsize=200_000)
def _compile(t: AndOrTree) -> tuple:
    program = []
    stack: list = [(t, False)]
    while stack:
        node, done = stack.pop()
        if isinstance(node, Leaf):
            program.append(None)
        elif done:
            program.append(node.connective)
        else:
            stack.append((node, True))
            stack.append((node.right, False))
            stack.append((node.left, False))
    return tuple(program)


def compile_shape(t: AndOrTree) -> tuple:
    return _compile(shape_of(t))


def run_program(program: tuple, leaf_values: Sequence):
    stack = []
    it = iter(leaf_values)
    for op in program:
        if op is None:
            stack.append(next(it))
        else:
            right = stack.pop()
            left = stack.pop()
            stack.append(left & right if op is AND else left | right)
    return stack[0]


# --- structural maps ------------------------------------------------------


def shape_of(t: AndOrTree) -> AndOrTree:
    """Erase leaf labels, keep connectives."""
    if isinstance(t, Leaf):
        return HOLE
    return Node(t.connective, shape_of(t.left), shape_of(t.right))


def relabel(shape: AndOrTree, labels: Sequence[Literal]) -> AndOrTree:
    """Fill the leaves of ``shape`` left to right with ``labels``."""
    it = iter(labels)

    def go(node):
        if isinstance(node, Leaf):
            return Leaf(next(it))
        return Node(node.connective, go(node.left), go(node.right))

    out = go(shape)
    if next(it, None) is not None:
        raise ValueError("more labels than leaves")
    return out


def map_literals(t: AndOrTree, fn) -> AndOrTree:
    if isinstance(t, Leaf):
        return Leaf(fn(t.literal))
    return Node(t.connective, map_literals(t.left, fn), map_literals(t.right, fn))


def dual(t: AndOrTree) -> AndOrTree:
    """Swap every connective and negate every leaf; computes the negation."""
    if isinstance(t, Leaf):
        return Leaf(t.literal.negate() if t.literal is not None else None)
    return Node(t.connective.swap(), dual(t.left), dual(t.right))


def subtree(t: AndOrTree, path: Sequence[int]) -> AndOrTree:
    """Follow ``path`` (0 = left, 1 = right) from the root."""
    for step in path:
        t = t.right if step else t.left
    return t


def replace_at(t: AndOrTree, path: Sequence[int], new: AndOrTree) -> AndOrTree:
    if not path:
        return new
    if path[0]:
        return Node(t.connective, t.left, replace_at(t.right, path[1:], new))
    return Node(t.connective, replace_at(t.left, path[1:], new), t.right)


def positions(t: AndOrTree) -> Iterator[tuple[tuple[int, ...], AndOrTree]]:
    """All ``(path, subtree)`` pairs in pre-order."""
    stack = [((), t)]
    while stack:
        path, node = stack.pop()
        yield path, node
        if isinstance(node, Node):
            stack.append((path + (1,), node.right))
            stack.append((path + (0,), node.left))


# --- text format ----------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN_RE = re.compile(r"\s*(\(|\)|[^\s()]+)")
_VAR_RE = re.compile(r"^x([1-9][0-9]*)$")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            if text[pos:].strip() == "":
                break
            raise ParseError("unexpected character", pos)
        tokens.append((match.group(1), match.start(1)))
        pos = match.end()
    return tokens


def parse(text: str, allow_holes: bool = False) -> AndOrTree:
    """Parse the s-expression tree format."""
    tokens = _tokenize(text)
    end = len(text)
    index = 0

    def peek():
        return tokens[index] if index < len(tokens) else ("", end)

    def take(expected: str | None = None):
        nonlocal index
        tok, pos = peek()
        if tok == "":
            raise ParseError("unexpected end of input", end)
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", pos)
        index += 1
        return tok, pos

    def variable(tok, pos):
        match = _VAR_RE.match(tok)
        if match is None:
            raise ParseError(f"bad variable {tok!r}", pos)
        return int(match.group(1))

    def expr():
        tok, pos = take()
        if tok == ".":
            if not allow_holes:
                raise ParseError("unlabelled leaf not allowed here", pos)
            return HOLE
        if tok != "(":
            return Leaf(Literal(variable(tok, pos), True))
        head, hpos = take()
        if head == "not":
            vtok, vpos = take()
            leaf = Leaf(Literal(variable(vtok, vpos), False))
            take(")")
            return leaf
        if head not in ("and", "or"):
            raise ParseError(f"unknown operator {head!r}", hpos)
        left = expr()
        right = expr()
        take(")")
        return Node(Connective(head), left, right)

    tree = expr()
    if index != len(tokens):
        raise ParseError("trailing input", tokens[index][1])
    return tree


def format_tree(t: AndOrTree) -> str:
    if isinstance(t, Leaf):
        return "." if t.literal is None else str(t.literal)
    return f"({t.connective.value} {format_tree(t.left)} {format_tree(t.right)})"


# --- enumeration ----------------------------------------------------------

_SHAPE_CACHE_LIMIT = 100_000


@lru_cache(maxsize=None)
def _cached_shapes(n: int) -> tuple[AndOrTree, ...]:
    return tuple(_generate_shapes(n))


def _generate_shapes(n: int) -> Iterator[AndOrTree]:
    if n == 1:
        yield HOLE
        return
    for i in range(1, n):
        for conn in (AND, OR):
            for left in enumerate_shapes(i):
                for right in enumerate_shapes(n - i):
                    yield Node(conn, left, right)


def enumerate_shapes(n: int) -> Iterator[AndOrTree]:
    """Every connective-labelled shape with ``n`` leaves, exactly once.

    Order: left-subtree size ascending, then AND before OR, then left and
    right subtrees in their own order.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if shape_count(n) <= _SHAPE_CACHE_LIMIT:
        return iter(_cached_shapes(n))
    return _generate_shapes(n)


def literal_alphabet(k: int) -> list[Literal]:
    """``x1, not x1, x2, not x2, ..., xk, not xk``."""
    return [Literal(v, pos) for v in range(1, k + 1) for pos in (True, False)]


def enumerate_labellings_G(n: int, k: int) -> Iterator[tuple[Literal, ...]]:
    return itertools.product(literal_alphabet(k), repeat=n)


def enumerate_trees_G(n: int, k: int, budget: int | None = DEFAULT_BUDGET) -> Iterator[AndOrTree]:
    """Every tree of size ``n`` with variables in ``1..k``, exactly once.

    Raises :class:`BudgetExceeded` up front when the exact count is larger
    than ``budget``.
    """
    total = count_trees(n, k, "G")
    check_budget(total, budget, "trees")
    return _trees_G(n, k)


def _trees_G(n: int, k: int) -> Iterator[AndOrTree]:
    for shape in enumerate_shapes(n):
        for labels in enumerate_labellings_G(n, k):
            yield relabel(shape, labels)


def leaf_tables(labels: Sequence[Literal], support: int) -> list[int]:
    return [literal_mask(support, l.variable, l.positive) for l in labels]


def constant_table(support: int, truth: bool) -> int:
    return full_mask(support) if truth else 0
