"""Truth tables on a finite support, packed into a Python int.

Assignment ``j`` (``0 <= j < 2^m``) sets variable ``i`` to bit ``i-1`` of
``j``; bit ``j`` of :attr:`TruthTable.value` is the function value there.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache


@lru_cache(maxsize=None)
def full_mask(m: int) -> int:
    return (1 << (1 << m)) - 1


@lru_cache(maxsize=None)
def variable_mask(m: int, var: int) -> int:
    """Table of the positive literal ``x_var`` over ``m`` variables."""
    if not 1 <= var <= m:
        raise ValueError(f"variable x{var} outside support {m}")
    mask = 0
    for j in range(1 << m):
        if (j >> (var - 1)) & 1:
            mask |= 1 << j
    return mask


def literal_mask(m: int, var: int, positive: bool) -> int:
    mask = variable_mask(m, var)
    return mask if positive else full_mask(m) ^ mask


_HEX_RE = re.compile(r"^m=(\d+):0x([0-9a-fA-F]+)$")


@dataclass(frozen=True, order=True)
class TruthTable:
    support: int
    value: int

    def __post_init__(self):
        if self.support < 0:
            raise ValueError("support must be non-negative")
        if not 0 <= self.value <= full_mask(self.support):
            raise ValueError(f"table value does not fit {1 << self.support} bits")

    @classmethod
    def constant(cls, truth: bool, support: int = 0) -> "TruthTable":
        return cls(support, full_mask(support) if truth else 0)

    @classmethod
    def literal(cls, var: int, positive: bool = True, support: int | None = None) -> "TruthTable":
        m = var if support is None else support
        return cls(m, literal_mask(m, var, positive))

    @classmethod
    def from_bits(cls, bits) -> "TruthTable":
        bits = [bool(b) for b in bits]
        m = len(bits).bit_length() - 1
        if 1 << m != len(bits):
            raise ValueError("bit count must be a power of two")
        return cls(m, sum(1 << j for j, b in enumerate(bits) if b))

    @classmethod
    def parse(cls, text: str) -> "TruthTable":
        match = _HEX_RE.match(text.strip())
        if not match:
            raise ValueError(f"bad truth table {text!r}; expected e.g. m=2:0x8")
        return cls(int(match.group(1)), int(match.group(2), 16))

    def __str__(self) -> str:
        return f"m={self.support}:{hex(self.value)}"

    @property
    def bits(self) -> tuple[bool, ...]:
        return tuple(bool((self.value >> j) & 1) for j in range(1 << self.support))

    def __getitem__(self, j: int) -> bool:
        return bool((self.value >> j) & 1)

    def __and__(self, other: "TruthTable") -> "TruthTable":
        a, b = _align(self, other)
        return TruthTable(a.support, a.value & b.value)

    def __or__(self, other: "TruthTable") -> "TruthTable":
        a, b = _align(self, other)
        return TruthTable(a.support, a.value | b.value)

    def __invert__(self) -> "TruthTable":
        return TruthTable(self.support, full_mask(self.support) ^ self.value)

    def is_constant(self) -> bool:
        return self.value in (0, full_mask(self.support))

    def is_true(self) -> bool:
        return self.value == full_mask(self.support)

    def is_false(self) -> bool:
        return self.value == 0

    def cofactor(self, var: int, val: bool) -> "TruthTable":
        """Restriction ``f|x_var <- val``, still over the same support."""
        mask = variable_mask(self.support, var)
        shift = 1 << (var - 1)
        if val:
            half = self.value & mask
            return TruthTable(self.support, half | (half >> shift))
        half = self.value & ~mask & full_mask(self.support)
        return TruthTable(self.support, half | (half << shift))

    def extend(self, support: int) -> "TruthTable":
        """Same function viewed over a larger support."""
        if support < self.support:
            raise ValueError("extend() cannot shrink; use restrict_support()")
        value = self.value
        for m in range(self.support, support):
            value |= value << (1 << m)
        return TruthTable(support, value)

    def restrict_support(self, support: int) -> "TruthTable":
        """Drop variables above ``support``; they must be inessential."""
        if support > self.support:
            return self.extend(support)
        for var in range(support + 1, self.support + 1):
            if self.cofactor(var, False) != self.cofactor(var, True):
                raise ValueError(f"x{var} is essential; cannot drop it")
        return TruthTable(support, self.value & full_mask(support))

    def permute(self, images: tuple[int, ...], flips: int = 0) -> "TruthTable":
        """Relabel: variable ``i`` becomes ``images[i-1]``, negated if bit ``i-1`` of ``flips``.

        The result ``g`` satisfies ``g(y) = f(x)`` with ``x_i = y_{images[i-1]} xor flip_i``.
        """
        m = self.support
        out = 0
        for j in range(1 << m):
            src = 0
            for i in range(m):
                bit = ((j >> (images[i] - 1)) & 1) ^ ((flips >> i) & 1)
                src |= bit << i
            if (self.value >> src) & 1:
                out |= 1 << j
        return TruthTable(m, out)


def _align(a: TruthTable, b: TruthTable) -> tuple[TruthTable, TruthTable]:
    if a.support == b.support:
        return a, b
    m = max(a.support, b.support)
    return a.extend(m), b.extend(m)
