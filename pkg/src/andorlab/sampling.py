"""Uniform samplers for both models and Monte Carlo estimation.

Random numbers come from numpy's PCG64.  A run with seed ``s`` is cut into
fixed shards of :data:`SHARD_SIZE` samples and shard ``j`` draws from
``PCG64(SeedSequence(s, spawn_key=(j,)))``, so results do not depend on how
many worker threads process the shards.

Trees are built in batches by a numba kernel implementing leaf insertion:
with ``m`` leaves present, one of the ``2m - 1`` nodes and a side are chosen
uniformly (``4m - 2`` outcomes) and the node is replaced by a fresh internal
node holding it and a new leaf.  Node ids: leaves ``0..n-1`` in creation
order, internal nodes ``n..2n-2``.  Leaf labels are attached in
left-to-right order as codes ``2 (v - 1) + negated``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numba
import numpy as np

from .combinatorics import ModelTag, stirling2
from .decide import (
    compact_dual,
    compact_is_tautology,
    compact_restrict,
    essential_projection,
)
from .quotient import TreeClassKey
from .trees import AND, OR, AndOrTree, Leaf, Literal, Node, shape_of
from .truthtable import TruthTable, full_mask, variable_mask

GENERATOR = "numpy.PCG64/SeedSequence(seed, spawn_key=(shard,))"
SHARD_SIZE = 1 << 16
BATCH_SIZE = 1 << 13
WILSON_Z = 1.959963984540054

_U64_MAX = (1 << 64) - 1


def shard_generator(seed: int, shard: int) -> np.random.Generator:
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(shard,))))


# --- numba kernels ----------------------------------------------------------


@numba.njit(cache=True, nogil=True)
def _grow(choices, left, right, root, order):
    """Leaf insertion; fills child arrays, roots and left-to-right leaf order."""
    batch, steps = choices.shape
    n = steps + 1
    parent = np.empty(2 * n - 1, np.int32)
    stack = np.empty(2 * n, np.int32)
    for b in range(batch):
        parent[0] = -1
        r = 0
        for m in range(1, n):
            c = choices[b, m - 1]
            idx = c >> 1
            v = idx if idx < m else n + idx - m
            u = n + m - 1
            p = parent[v]
            if p == -1:
                r = u
            elif left[b, p] == v:
                left[b, p] = u
            else:
                right[b, p] = u
            parent[u] = p
            if c & 1:
                left[b, u] = m
                right[b, u] = v
            else:
                left[b, u] = v
                right[b, u] = m
            parent[v] = u
            parent[m] = u
        root[b] = r
        top = 0
        stack[0] = r
        pos = 0
        while top >= 0:
            node = stack[top]
            top -= 1
            if node < n:
                order[b, pos] = node
                pos += 1
            else:
                top += 1
                stack[top] = right[b, node]
                top += 1
                stack[top] = left[b, node]


@numba.njit(cache=True, nogil=True)
def _leaf_codes(order, codes):
    """Map left-to-right codes onto leaf ids."""
    batch, n = order.shape
    out = np.empty((batch, n), np.int64)
    for b in range(batch):
        for i in range(n):
            out[b, order[b, i]] = codes[b, i]
    return out


@numba.njit(cache=True, nogil=True)
def _spine_pair(b, start, op, enter_left_other, left, right, conn, code, n, mark, stamp, stack):
    """True iff the spine leaves from ``start`` carry a complementary pair."""
    top = 0
    stack[0] = start
    while top >= 0:
        node = stack[top]
        top -= 1
        if node < n:
            c = code[b, node]
            if mark[c ^ 1] == stamp:
                return True
            mark[c] = stamp
        elif conn[b, node - n] == op:
            top += 1
            stack[top] = right[b, node]
            top += 1
            stack[top] = left[b, node]
        elif enter_left_other:
            top += 1
            stack[top] = left[b, node]
    return False


@numba.njit(cache=True, nogil=True)
def _flags(left, right, conn, root, code, n_codes):
    """Per tree: simple tautology, N-leaf pair, simple contradiction, P-leaf pair.

    Without an N-leaf pair a tree is not a tautology; without a P-leaf pair
    it is satisfiable (conn: 0 = and, 1 = or).
    """
    batch = root.shape[0]
    n = code.shape[1]
    out = np.zeros((batch, 4), np.bool_)
    mark = np.full(n_codes + 1, -1, np.int64)
    stack = np.empty(2 * n, np.int32)
    stamp = 0
    for b in range(batch):
        r = root[b]
        out[b, 0] = _spine_pair(b, r, 1, False, left, right, conn, code, n, mark, stamp, stack)
        stamp += 1
        out[b, 1] = out[b, 0] or _spine_pair(b, r, 1, True, left, right, conn, code, n, mark, stamp, stack)
        stamp += 1
        out[b, 2] = _spine_pair(b, r, 0, False, left, right, conn, code, n, mark, stamp, stack)
        stamp += 1
        out[b, 3] = out[b, 2] or _spine_pair(b, r, 0, True, left, right, conn, code, n, mark, stamp, stack)
        stamp += 1
    return out


@numba.njit(cache=True, nogil=True)
def _postorder(b, left, right, r, n, post, stack):
    """Pre-order visiting right children first; read backwards, children precede parents."""
    top = 0
    stack[0] = r
    pos = 0
    while top >= 0:
        node = stack[top]
        top -= 1
        post[pos] = node
        pos += 1
        if node >= n:
            top += 1
            stack[top] = left[b, node]
            top += 1
            stack[top] = right[b, node]
    return pos


@numba.njit(cache=True, nogil=True)
def _tables(left, right, conn, root, code, masks, full):
    """Truth table of every tree over a support of at most 6 variables."""
    batch = root.shape[0]
    n = code.shape[1]
    val = np.empty(2 * n - 1, np.uint64)
    post = np.empty(2 * n - 1, np.int32)
    stack = np.empty(2 * n, np.int32)
    out = np.empty(batch, np.uint64)
    for b in range(batch):
        cnt = _postorder(b, left, right, root[b], n, post, stack)
        for i in range(cnt - 1, -1, -1):
            node = post[i]
            if node < n:
                c = code[b, node]
                m = masks[c >> 1]
                val[node] = m ^ full if c & 1 else m
            elif conn[b, node - n] == 0:
                val[node] = val[left[b, node]] & val[right[b, node]]
            else:
                val[node] = val[left[b, node]] | val[right[b, node]]
        out[b] = val[root[b]]
    return out


@numba.njit(cache=True, nogil=True)
def _splitmix(x):
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = x
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True, nogil=True)
def _eval_words(b, left, right, conn, r, code, n, words, val, post, stack):
    cnt = _postorder(b, left, right, r, n, post, stack)
    for i in range(cnt - 1, -1, -1):
        node = post[i]
        if node < n:
            c = code[b, node]
            w = words[c >> 1]
            val[node] = ~w if c & 1 else w
        elif conn[b, node - n] == 0:
            val[node] = val[left[b, node]] & val[right[b, node]]
        else:
            val[node] = val[left[b, node]] | val[right[b, node]]
    return val[r]


@numba.njit(cache=True, nogil=True)
def _simulate(left, right, conn, root, code, n_vars, seeds, fixed, alphas, expected, rounds):
    """Random-simulation filter for "the tree computes ``g`` on the fixed variables".

    For every assignment ``alphas[a]`` of the variables ``fixed`` the tree is
    evaluated on ``64 * rounds`` random completions; a tree survives only if
    every completion returns ``expected[a]``.
    """
    batch = root.shape[0]
    n = code.shape[1]
    words = np.empty(n_vars, np.uint64)
    val = np.empty(2 * n - 1, np.uint64)
    post = np.empty(2 * n - 1, np.int32)
    stack = np.empty(2 * n, np.int32)
    ones = np.uint64(0xFFFFFFFFFFFFFFFF)
    out = np.ones(batch, np.bool_)
    for b in range(batch):
        s = seeds[b]
        ok = True
        for rnd in range(rounds):
            if not ok:
                break
            for a in range(alphas.shape[0]):
                for v in range(n_vars):
                    s = _splitmix(s)
                    words[v] = s
                for j in range(fixed.shape[0]):
                    words[fixed[j] - 1] = ones if alphas[a, j] else np.uint64(0)
                res = _eval_words(b, left, right, conn, root[b], code, n, words, val, post, stack)
                want = ones if expected[a] else np.uint64(0)
                if res != want:
                    ok = False
                    break
        out[b] = ok
    return out


@numba.njit(cache=True, nogil=True)
def _witnessed_essential(left, right, conn, root, code, n_vars, seeds, limit, rounds, found):
    """Variables whose flip changes the value on some random assignment.

    Stops early once more than ``limit`` are found; returns the count per
    tree (capped at ``limit + 1``) and fills ``found`` with the variables.
    """
    batch = root.shape[0]
    n = code.shape[1]
    words = np.empty(n_vars, np.uint64)
    val = np.empty(2 * n - 1, np.uint64)
    post = np.empty(2 * n - 1, np.int32)
    stack = np.empty(2 * n, np.int32)
    present = np.zeros(n_vars, np.bool_)
    counts = np.zeros(batch, np.int64)
    for b in range(batch):
        for v in range(n_vars):
            present[v] = False
        for i in range(n):
            present[code[b, i] >> 1] = True
        s = seeds[b]
        cnt = 0
        for rnd in range(rounds):
            for v in range(n_vars):
                s = _splitmix(s)
                words[v] = s
            base = _eval_words(b, left, right, conn, root[b], code, n, words, val, post, stack)
            for v in range(n_vars):
                if not present[v]:
                    continue
                words[v] = ~words[v]
                flip = _eval_words(b, left, right, conn, root[b], code, n, words, val, post, stack)
                words[v] = ~words[v]
                if flip != base:
                    present[v] = False
                    if cnt < found.shape[1]:
                        found[b, cnt] = v + 1
                    cnt += 1
                    if cnt > limit:
                        break
            if cnt > limit:
                break
        counts[b] = cnt
    return counts


@numba.njit(cache=True, nogil=True)
def _object_codes(left, right, conn, root, code, n_codes):
    """Injective integer code of (connective-labelled shape, leaf labels) for small trees."""
    batch = root.shape[0]
    n = code.shape[1]
    out = np.empty(batch, np.int64)
    stack = np.empty(2 * n, np.int32)
    for b in range(batch):
        key = np.int64(0)
        top = 0
        stack[0] = root[b]
        pos = 0
        while top >= 0:
            node = stack[top]
            top -= 1
            if node < n:
                key = key * 3 * n_codes + code[b, node]
                pos += 1
            else:
                key = key * 3 * n_codes + n_codes + conn[b, node - n] * n_codes
                top += 1
                stack[top] = right[b, node]
                top += 1
                stack[top] = left[b, node]
        out[b] = key
    return out


# --- batches ----------------------------------------------------------------


@dataclass
class TreeBatch:
    """``size`` sampled trees of ``n`` leaves stored as flat arrays."""

    n: int
    k: int
    model: ModelTag
    left: np.ndarray
    right: np.ndarray
    conn: np.ndarray  # (batch, n - 1); 0 = and, 1 = or
    root: np.ndarray
    codes: np.ndarray  # left-to-right leaf codes
    leaf_code: np.ndarray  # codes indexed by leaf id

    @property
    def size(self) -> int:
        return self.root.shape[0]

    @property
    def n_vars(self) -> int:
        return self.k if self.model is ModelTag.G else min(self.k, self.n)

    def tree(self, b: int) -> AndOrTree:
        n = self.n

        def build(node: int) -> AndOrTree:
            if node < n:
                c = int(self.leaf_code[b, node])
                return Leaf(Literal((c >> 1) + 1, not c & 1))
            op = OR if self.conn[b, node - n] else AND
            return Node(op, build(int(self.left[b, node])), build(int(self.right[b, node])))

        return build(int(self.root[b]))

    def compact(self, b: int):
        n = self.n

        def build(node: int):
            if node < n:
                c = int(self.leaf_code[b, node])
                v = (c >> 1) + 1
                return -v if c & 1 else v
            return (int(self.conn[b, node - n]), build(int(self.left[b, node])), build(int(self.right[b, node])))

        return build(int(self.root[b]))

    def key(self, b: int) -> TreeClassKey:
        codes = self.codes[b]
        return TreeClassKey(
            shape_of(self.tree(b)),
            tuple(int(c >> 1) + 1 for c in codes),
            tuple(not c & 1 for c in codes),
        )

    def flags(self) -> np.ndarray:
        return _flags(self.left, self.right, self.conn, self.root, self.leaf_code, 2 * self.n_vars)

    def tables(self, support: int) -> np.ndarray:
        if support > 6:
            raise ValueError("batched truth tables support at most 6 variables")
        if support < self.n_vars:
            raise ValueError("support smaller than the variables in use")
        masks = np.array([variable_mask(support, v) for v in range(1, support + 1)], dtype=np.uint64)
        return _tables(self.left, self.right, self.conn, self.root, self.leaf_code, masks, np.uint64(full_mask(support)))

    def object_codes(self) -> np.ndarray:
        if (2 * self.n - 1) * math.log2(3 * 2 * self.n_vars) > 62:
            raise ValueError("trees too large for integer object codes")
        return _object_codes(self.left, self.right, self.conn, self.root, self.leaf_code, 2 * self.n_vars)


def _shape_arrays(n: int, size: int, rng: np.random.Generator):
    left = np.full((size, 2 * n - 1), -1, np.int32)
    right = np.full((size, 2 * n - 1), -1, np.int32)
    root = np.zeros(size, np.int32)
    order = np.zeros((size, n), np.int32)
    if n > 1:
        highs = 2 * (2 * np.arange(1, n, dtype=np.int64) - 1)
        choices = rng.integers(0, highs, size=(size, n - 1), dtype=np.int64)
        conn = rng.integers(0, 2, size=(size, n - 1), dtype=np.int8)
        _grow(choices, left, right, root, order)
    else:
        conn = np.zeros((size, 0), np.int8)
    return left, right, conn, root, order


def _batch(n: int, k: int, model: ModelTag, size: int, rng: np.random.Generator) -> TreeBatch:
    left, right, conn, root, order = _shape_arrays(n, size, rng)
    if model is ModelTag.G:
        codes = rng.integers(0, 2 * k, size=(size, n), dtype=np.int64)
    else:
        codes = _class_codes(n, k, size, rng)
    return TreeBatch(n, k, model, left, right, conn, root, codes, _leaf_codes(order, codes))


# --- model E labels ---------------------------------------------------------


@lru_cache(maxsize=8)
def _block_thresholds(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """128-bit thresholds ``T_p = ceil(2^128 cum_p / W)`` split into (hi, lo) words.

    A uniform 128-bit ``U`` selects the least ``p`` with ``U W < 2^128 cum_p``,
    i.e. ``U < T_p``; the weights are ``S(n, p) 2^(n - p)`` for ``p <= min(k, n)``.
    """
    top = min(k, n)
    weights = [stirling2(n, p) << (n - p) for p in range(1, top + 1)]
    total = sum(weights)
    hi, lo = [], []
    cum = 0
    for w in weights[:-1]:
        cum += w
        t = -((-cum << 128) // total)
        t = min(t, (1 << 128) - 1)
        hi.append(t >> 64)
        lo.append(t & _U64_MAX)
    return np.array(hi, dtype=np.uint64), np.array(lo, dtype=np.uint64)


def draw_block_counts(n: int, k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Block counts ``p`` with probability proportional to ``S(n, p) 2^-p``."""
    t_hi, t_lo = _block_thresholds(n, k)
    u_hi = rng.integers(0, _U64_MAX, size=size, dtype=np.uint64, endpoint=True)
    u_lo = rng.integers(0, _U64_MAX, size=size, dtype=np.uint64, endpoint=True)
    passed = (u_hi[:, None] > t_hi[None, :]) | ((u_hi[:, None] == t_hi[None, :]) & (u_lo[:, None] >= t_lo[None, :]))
    return 1 + passed.sum(axis=1)


@lru_cache(maxsize=4)
def _stirling_table(n: int):
    """``S(i, q)`` for ``0 <= i, q <= n`` as int64 when it fits, else Python ints."""
    table = [[0] * (n + 2) for _ in range(n + 1)]
    table[0][0] = 1
    for i in range(1, n + 1):
        for q in range(1, i + 1):
            table[i][q] = q * table[i - 1][q] + table[i - 1][q - 1]
    big = max(max(row) for row in table) >= 1 << 62
    return (table if big else np.array(table, dtype=np.int64)), big


def _uniform_below(rng: np.random.Generator, bound: int) -> int:
    """Exact uniform integer in ``[0, bound)`` by rejection on random bits."""
    bits = bound.bit_length()
    nbytes = (bits + 7) // 8
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") >> (8 * nbytes - bits)
        if x < bound:
            return x


def draw_partitions(n: int, p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform set partitions of ``1..n`` into ``p[b]`` blocks as restricted-growth strings.

    Elements are decided from ``n`` down: with ``q`` blocks left, element
    ``i`` opens its own block with probability ``S(i-1, q-1) / S(i, q)`` and
    otherwise joins one of the ``q`` blocks of the rest, ranked by least
    element.  The blocks are then renumbered from element 1 upward.
    """
    size = p.shape[0]
    table, big = _stirling_table(n)
    choice = np.empty((size, n), np.int64)  # -1 = new block, else block rank
    if not big:
        q = p.astype(np.int64).copy()
        for i in range(n, 0, -1):
            s_iq = table[i, q]
            u = rng.integers(0, s_iq)
            opens = table[i - 1, q - 1]
            new = u < opens
            choice[:, i - 1] = np.where(new, -1, (u - opens) // np.maximum(table[i - 1, q], 1))
            q -= new
    else:
        for b in range(size):
            q = int(p[b])
            for i in range(n, 0, -1):
                u = _uniform_below(rng, table[i][q])
                opens = table[i - 1][q - 1]
                if u < opens:
                    choice[b, i - 1] = -1
                    q -= 1
                else:
                    choice[b, i - 1] = (u - opens) // table[i - 1][q]
    rgs = np.empty((size, n), np.int64)
    blocks = np.zeros(size, np.int64)
    for i in range(n):
        new = choice[:, i] < 0
        rgs[:, i] = np.where(new, blocks + 1, choice[:, i] + 1)
        blocks += new
    return rgs


def _class_codes(n: int, k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    p = draw_block_counts(n, k, size, rng)
    rgs = draw_partitions(n, p, rng)
    flips = rng.integers(0, 2, size=(size, n), dtype=np.int64)
    first = np.zeros((size, n), bool)
    seen = np.zeros(size, np.int64)
    for i in range(n):
        first[:, i] = rgs[:, i] > seen
        seen = np.maximum(seen, rgs[:, i])
    flips[first] = 0
    return 2 * (rgs - 1) + flips


# --- scalar samplers --------------------------------------------------------


def sample_batch(n: int, k: int, model: "ModelTag | str", size: int, seed: int, shard: int = 0) -> TreeBatch:
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    return _batch(n, k, ModelTag.parse(model), size, shard_generator(seed, shard))


def sample_shape(n: int, seed: int) -> AndOrTree:
    """Uniform connective-labelled shape of size ``n``."""
    return shape_of(sample_batch(n, 1, ModelTag.G, 1, seed).tree(0))


def sample_tree_G(n: int, k: int, seed: int) -> AndOrTree:
    return sample_batch(n, k, ModelTag.G, 1, seed).tree(0)


def sample_class_E(n: int, k: int, seed: int) -> TreeClassKey:
    return sample_batch(n, k, ModelTag.E, 1, seed).key(0)


# --- events -----------------------------------------------------------------


class Event:
    """Predicate over sampled objects, evaluated a batch at a time."""

    name = "event"

    def batch(self, batch: TreeBatch, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class Always(Event):
    name = "always"

    def batch(self, batch, rng):
        return np.ones(batch.size, bool)


class SimpleTautology(Event):
    name = "simple_tautology"

    def batch(self, batch, rng):
        return batch.flags()[:, 0].copy()


class SimpleContradiction(Event):
    name = "simple_contradiction"

    def batch(self, batch, rng):
        return batch.flags()[:, 2].copy()


class Tautology(Event):
    name = "tautology"

    def batch(self, batch, rng):
        flags = batch.flags()
        out = flags[:, 0].copy()
        for b in np.flatnonzero(flags[:, 1] & ~flags[:, 0]):
            out[b] = compact_is_tautology(batch.compact(int(b)))
        return out


class Contradiction(Event):
    name = "contradiction"

    def batch(self, batch, rng):
        flags = batch.flags()
        out = flags[:, 2].copy()
        for b in np.flatnonzero(flags[:, 3] & ~flags[:, 2]):
            out[b] = compact_is_tautology(compact_dual(batch.compact(int(b))))
        return out


class Satisfiable(Event):
    name = "satisfiable"

    def batch(self, batch, rng):
        return ~Contradiction().batch(batch, rng)


class Computes(Event):
    """Model G: the tree computes ``f`` (variables ``x1..x_m`` of ``f``'s support).

    Model E: the function of the class lies in the class of ``f``.
    """

    def __init__(self, f: TruthTable, rounds: int = 2):
        from .boolfn import class_key, essential_count

        self.f = f
        self.rounds = rounds
        self.name = f"computes:{f}"
        self._essential = essential_count(f)
        self._class = class_key(f)

    def batch(self, batch, rng):
        if batch.model is ModelTag.G:
            return self._batch_G(batch, rng)
        return self._batch_E(batch, rng)

    def _batch_G(self, batch, rng):
        m = self.f.support
        if m > batch.k:
            return np.zeros(batch.size, bool)
        fixed = np.arange(1, m + 1, dtype=np.int64)
        alphas = np.array([[(j >> i) & 1 for i in range(m)] for j in range(1 << m)], dtype=np.bool_).reshape(1 << m, m)
        expected = np.array(self.f.bits, dtype=np.bool_)
        seeds = rng.integers(0, _U64_MAX, size=batch.size, dtype=np.uint64, endpoint=True)
        cand = _simulate(batch.left, batch.right, batch.conn, batch.root, batch.leaf_code,
                         batch.n_vars, seeds, fixed, alphas, expected, self.rounds)
        out = np.zeros(batch.size, bool)
        for b in np.flatnonzero(cand):
            c = batch.compact(int(b))
            ok = True
            for j in range(1 << m):
                r = compact_restrict(c, {i + 1: bool((j >> i) & 1) for i in range(m)})
                r = r if self.f[j] else compact_dual(r)
                if not (r is True or (r is not False and compact_is_tautology(r))):
                    ok = False
                    break
            out[b] = ok
        return out

    def _batch_E(self, batch, rng):
        from .boolfn import class_key

        e = self._essential
        seeds = rng.integers(0, _U64_MAX, size=batch.size, dtype=np.uint64, endpoint=True)
        found = np.zeros((batch.size, e + 1), np.int64)
        counts = _witnessed_essential(batch.left, batch.right, batch.conn, batch.root, batch.leaf_code,
                                      batch.n_vars, seeds, e, self.rounds, found)
        out = np.zeros(batch.size, bool)
        for b in np.flatnonzero(counts <= e):
            known = {int(v) for v in found[b, : counts[b]]}
            res = essential_projection(batch.compact(int(b)), e, known)
            if res is None or len(res[0]) != e:
                continue
            out[b] = class_key(TruthTable(e, res[1])) == self._class
        return out


class Predicate(Event):
    """Arbitrary Python predicate on trees (G) or class keys (E); slow path."""

    def __init__(self, fn: Callable, name: str = "predicate"):
        self.fn = fn
        self.name = name

    def batch(self, batch, rng):
        get = batch.tree if batch.model is ModelTag.G else batch.key
        return np.array([bool(self.fn(get(b))) for b in range(batch.size)], dtype=bool)


EVENTS = {
    "always": Always,
    "tautology": Tautology,
    "simple_tautology": SimpleTautology,
    "contradiction": Contradiction,
    "simple_contradiction": SimpleContradiction,
    "satisfiable": Satisfiable,
}


def parse_event(text: "str | Event") -> Event:
    if isinstance(text, Event):
        return text
    if text in EVENTS:
        return EVENTS[text]()
    if text.startswith("computes:"):
        return Computes(TruthTable.parse(text[len("computes:"):]))
    raise ValueError(f"unknown event {text!r}; choose from {sorted(EVENTS)} or computes:<table>")


# --- estimation -------------------------------------------------------------


def wilson_interval(hits: int, samples: int, z: float = WILSON_Z) -> tuple[float, float]:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    p = hits / samples
    z2 = z * z
    denom = 1 + z2 / samples
    center = (p + z2 / (2 * samples)) / denom
    half = z * math.sqrt(p * (1 - p) / samples + z2 / (4 * samples * samples)) / denom
    return max(0.0, min(p, center - half)), min(1.0, max(p, center + half))


@dataclass(frozen=True)
class EstimateReport:
    n: int
    k: int
    model: ModelTag
    event: str
    samples: int
    hits: int
    seed: int
    generator: str = GENERATOR

    @property
    def point(self) -> float:
        return self.hits / self.samples

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.hits, self.samples)

    @property
    def ci_low(self) -> float:
        return self.interval[0]

    @property
    def ci_high(self) -> float:
        return self.interval[1]

    def row(self) -> dict:
        lo, hi = self.interval
        return {
            "n": self.n, "k": self.k, "model": self.model.value, "event": self.event,
            "samples": self.samples, "hits": self.hits, "point": f"{self.point:.10g}",
            "ci_low": f"{lo:.10g}", "ci_high": f"{hi:.10g}", "seed": self.seed,
        }


REPORT_COLUMNS = ["n", "k", "model", "event", "samples", "hits", "point", "ci_low", "ci_high", "seed"]


def shard_plan(samples: int) -> list[int]:
    full, rest = divmod(samples, SHARD_SIZE)
    return [SHARD_SIZE] * full + ([rest] if rest else [])


def _run_shard(fn, n, k, model, seed, shard, count):
    rng = shard_generator(seed, shard)
    results = []
    done = 0
    while done < count:
        size = min(BATCH_SIZE, count - done)
        results.append(fn(_batch(n, k, model, size, rng), rng))
        done += size
    return results


def map_shards(fn, n: int, k: int, model, samples: int, seed: int, threads: int = 1) -> list:
    """Apply ``fn(batch, rng)`` to every batch of the fixed shard plan, in shard order."""
    model = ModelTag.parse(model)
    plan = shard_plan(samples)
    if threads <= 1 or len(plan) == 1:
        parts = [_run_shard(fn, n, k, model, seed, j, c) for j, c in enumerate(plan)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda jc: _run_shard(fn, n, k, model, seed, jc[0], jc[1]), enumerate(plan)))
    return [r for part in parts for r in part]


def estimate(
    event: "Event | str",
    n: int,
    k: int,
    model: "ModelTag | str",
    samples: int,
    seed: int,
    threads: int = 1,
) -> EstimateReport:
    """Monte Carlo frequency of ``event`` with a Wilson 95% interval."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    ev = parse_event(event)
    model = ModelTag.parse(model)
    hits = sum(int(np.count_nonzero(h)) for h in map_shards(ev.batch, n, k, model, samples, seed, threads))
    return EstimateReport(n, k, model, ev.name, samples, hits, seed)


def estimate_many(
    events: list, n: int, k: int, model, samples: int, seed: int, threads: int = 1
) -> list[EstimateReport]:
    """Several events on one common sample stream."""
    evs = [parse_event(e) for e in events]
    model = ModelTag.parse(model)

    def fn(batch, rng):
        return [int(np.count_nonzero(ev.batch(batch, rng))) for ev in evs]

    totals = np.zeros(len(evs), dtype=np.int64)
    for part in map_shards(fn, n, k, model, samples, seed, threads):
        totals += np.array(part, dtype=np.int64)
    return [EstimateReport(n, k, model, ev.name, samples, int(h), seed) for ev, h in zip(evs, totals)]


def sample_table_counts(n: int, k: int, model, samples: int, seed: int, threads: int = 1) -> dict[int, int]:
    """Counts of sampled truth tables over ``x1..x_support`` (support = variables in use)."""
    model = ModelTag.parse(model)
    support = k if model is ModelTag.G else min(k, n)

    def fn(batch, rng):
        vals, cnts = np.unique(batch.tables(support), return_counts=True)
        return dict(zip(vals.tolist(), cnts.tolist()))

    out: dict[int, int] = {}
    for part in map_shards(fn, n, k, model, samples, seed, threads):
        for v, c in part.items():
            out[v] = out.get(v, 0) + c
    return out


def sample_object_counts(n: int, k: int, model, samples: int, seed: int, threads: int = 1) -> dict[int, int]:
    """Counts of sampled objects (trees for G, class keys for E) by integer code."""

    def fn(batch, rng):
        vals, cnts = np.unique(batch.object_codes(), return_counts=True)
        return dict(zip(vals.tolist(), cnts.tolist()))

    out: dict[int, int] = {}
    for part in map_shards(fn, n, k, model, samples, seed, threads):
        for v, c in part.items():
            out[v] = out.get(v, 0) + c
    return out
