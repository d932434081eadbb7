"""Exact tautology / contradiction decision for And/Or trees of any size.

Trees are converted to a compact form (signed ints for literals, ``(op, a, b)``
for nodes, ``True``/``False`` constants) and decided by Shannon splitting with
three cuts:

* pure literals: ``f`` is monotone in a literal that occurs with one sign only,
  so that literal can be set false without changing tautology status;
* a complementary pair among the leaves joined to the root by ∨ only proves
  a tautology;
* setting every N-pattern leaf false forces ``f`` false, so if those leaves
  carry no complementary pair the tree is refuted.
"""

from __future__ import annotations

from .trees import AND, AndOrTree, Leaf, dual

_AND, _OR = 0, 1


def to_compact(t: AndOrTree):
    if isinstance(t, Leaf):
        v = t.literal.variable
        return v if t.literal.positive else -v
    return (_AND if t.connective is AND else _OR, to_compact(t.left), to_compact(t.right))


def _restrict(t, var: int, val: bool):
    if type(t) is int:
        if t == var:
            return val
        if t == -var:
            return not val
        return t
    if t is True or t is False:
        return t
    op, a, b = t
    a = _restrict(a, var, val)
    if op == _AND:
        if a is False:
            return False
        b = _restrict(b, var, val)
        if b is False:
            return False
        if a is True:
            return b
        if b is True:
            return a
    else:
        if a is True:
            return True
        b = _restrict(b, var, val)
        if b is True:
            return True
        if a is False:
            return b
        if b is False:
            return a
    return (op, a, b)


def _signs(t, out: dict[int, int]) -> None:
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is int:
            out[abs(node)] = out.get(abs(node), 0) | (1 if node > 0 else 2)
        else:
            stack.append(node[1])
            stack.append(node[2])


def _spine_pair(t, op: int, left_only_other: bool) -> int | None:
    """Variable of a complementary pair among the spine leaves, or None.

    With ``left_only_other`` the walk also enters the left child of the
    other connective (the N-pattern region when ``op`` is ∨).
    """
    seen: dict[int, bool] = {}
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is int:
            v, s = abs(node), node > 0
            prev = seen.setdefault(v, s)
            if prev != s:
                return v
        elif node[0] == op:
            stack.append(node[2])
            stack.append(node[1])
        elif left_only_other:
            stack.append(node[1])
    return None


def _falsify(t, fixed: dict[int, bool]) -> dict[int, bool] | None:
    """A partial assignment under which ``t`` is false, or None if ``t`` is a tautology.

    ``fixed`` holds the assignments already made on the way down; every
    completion of the returned assignment falsifies ``t``.
    """
    while True:
        if t is True:
            return None
        if t is False:
            return fixed
        signs: dict[int, int] = {}
        _signs(t, signs)
        pure = [(v, s == 2) for v, s in signs.items() if s != 3]
        if not pure:
            break
        # set each pure literal false
        fixed = dict(fixed)
        for v, val in pure:
            fixed[v] = val
            t = _restrict(t, v, val)
            if t is True:
                return None
            if t is False:
                return fixed
    if _spine_pair(t, _OR, False) is not None:
        return None
    var = _spine_pair(t, _OR, True)
    if var is None:
        out = dict(fixed)
        _falsify_n_leaves(t, out)
        return out
    for val in (False, True):
        w = _falsify(_restrict(t, var, val), {**fixed, var: val})
        if w is not None:
            return w
    return None


def _falsify_n_leaves(t, out: dict[int, bool]) -> None:
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is int:
            out[abs(node)] = node < 0
        elif node[0] == _OR:
            stack.append(node[1])
            stack.append(node[2])
        else:
            stack.append(node[1])


def falsifying_assignment(t: AndOrTree) -> dict[int, bool] | None:
    """Partial assignment forcing ``t`` false (unset variables are free), or None."""
    return _falsify(to_compact(t), {})


def satisfying_assignment(t: AndOrTree) -> dict[int, bool] | None:
    """Partial assignment forcing ``t`` true, or None if ``t`` is unsatisfiable."""
    return _falsify(to_compact(dual(t)), {})


def compact_is_tautology(c) -> bool:
    return _falsify(c, {}) is None


def compact_dual(c):
    if c is True or c is False:
        return not c
    if type(c) is int:
        return -c
    return (1 - c[0], compact_dual(c[1]), compact_dual(c[2]))


def compact_restrict(c, assignment: dict[int, bool]):
    for var, val in assignment.items():
        c = _restrict(c, var, val)
    return c


def compact_eval(c, assignment: dict[int, bool]) -> bool:
    """Evaluate with unset variables read as false."""
    if c is True or c is False:
        return c
    if type(c) is int:
        val = assignment.get(abs(c), False)
        return val if c > 0 else not val
    a = compact_eval(c[1], assignment)
    if c[0] == _AND:
        return a and compact_eval(c[2], assignment)
    return a or compact_eval(c[2], assignment)


def is_tautology(t: AndOrTree) -> bool:
    return falsifying_assignment(t) is None


def is_contradiction(t: AndOrTree) -> bool:
    """``t`` computes false iff its dual (which computes ``¬t``) is a tautology."""
    return satisfying_assignment(t) is None


def is_satisfiable(t: AndOrTree) -> bool:
    return not is_contradiction(t)


def compact_variables(c) -> set[int]:
    out: dict[int, int] = {}
    if type(c) is int or isinstance(c, tuple):
        _signs(c, out)
    return set(out)


def _split_witness(c, lo: dict[int, bool], hi: dict[int, bool]) -> int:
    """Walk from ``lo`` (c false) to ``hi`` (c true) one variable at a time and
    return the variable whose flip changes the value."""
    cur = dict(lo)
    for var in sorted(set(lo) | set(hi)):
        target = hi.get(var, False)
        if cur.get(var, False) == target:
            continue
        cur[var] = target
        if compact_eval(c, cur):
            return var
    raise AssertionError("witness walk did not change the value")


def essential_projection(c, limit: int, known: set[int] | None = None):
    """Exact essential variables of a compact tree and its table over them.

    Returns ``(indices, value)`` where ``value`` packs the function over the
    sorted essential ``indices`` (bit ``j`` = value at assignment ``j``), or
    ``None`` as soon as more than ``limit`` essential variables are found.
    ``known`` may carry variables already proven essential.
    """
    ess = set(known or ())
    while True:
        if len(ess) > limit:
            return None
        indices = sorted(ess)
        value = 0
        grown = False
        for j in range(1 << len(indices)):
            alpha = {v: bool((j >> i) & 1) for i, v in enumerate(indices)}
            r = compact_restrict(c, alpha)
            if r is True:
                value |= 1 << j
                continue
            if r is False:
                continue
            lo = _falsify(r, {})
            hi = _falsify(compact_dual(r), {})
            if lo is None or hi is None:
                # constant after all; the simplifier did not fold it
                if lo is None:
                    value |= 1 << j
                continue
            ess.add(_split_witness(r, lo, hi))
            grown = True
            break
        if not grown:
            return tuple(indices), value
