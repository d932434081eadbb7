import random
from collections import Counter

import pytest

from andorlab.boolfn import class_key
from andorlab.combinatorics import catalan_leaves, count_trees, stirling2
from andorlab.quotient import (
    TreeClassKey,
    canonicalize,
    distinct_variable_count,
    enumerate_classes,
    enumerate_labellings_E,
    representative,
)
from andorlab.trees import Literal, enumerate_shapes, enumerate_trees_G, format_tree, map_literals, parse, shape_of, truth_table, variables

SIX_LEAF_TAUTOLOGY = "(or (or (or x1 (or (not x1) x2)) x3) (and x4 x1))"


def random_relabel(t, rng, k_max=20):
    """Injective renaming of variables plus per-variable negation."""
    vs = sorted(variables(t))
    images = rng.sample(range(1, k_max + 1), len(vs))
    flips = {v: rng.random() < 0.5 for v in vs}
    mapping = dict(zip(vs, images))
    return map_literals(t, lambda l: Literal(mapping[l.variable], l.positive != flips[l.variable]))


def test_canonicalize_examples():
    assert canonicalize(parse("(and x12 x3)")) == canonicalize(parse("(and x1 x2)"))
    key = canonicalize(parse("(or (not x5) x5)"))
    assert key.variable_string == (1, 1) and key.polarity == (True, False)
    a = canonicalize(parse("(or x2 (and (not x2) x7))"))
    b = canonicalize(parse("(or (not x1) (and x1 (not x3)))"))
    assert a == b


def test_key_text_form():
    key = canonicalize(parse("(or x1 (not x1))"))
    assert str(key) == "(or . .)|1,1|10"
    assert TreeClassKey.parse(str(key)) == key


def test_key_invariants_enforced():
    shape = shape_of(parse("(or x1 x2)"))
    with pytest.raises(ValueError):
        TreeClassKey(shape, (2, 1), (True, True))
    with pytest.raises(ValueError):
        TreeClassKey(shape, (1, 2), (True, False))


def test_distinct_variable_count_examples():
    assert distinct_variable_count(canonicalize(parse("(and x1 x2)"))) == 2
    assert distinct_variable_count(canonicalize(parse("(or x1 (not x1))"))) == 1
    assert distinct_variable_count(canonicalize(parse(SIX_LEAF_TAUTOLOGY))) == 4


def test_enumerate_classes_examples():
    keys = list(enumerate_classes(2, 2))
    assert len(keys) == len(set(keys)) == 6
    assert len(list(enumerate_classes(1, 1))) == 1
    assert sum(1 for _ in enumerate_classes(3, 1)) == count_trees(3, 1, "E")


def test_representative_examples():
    key = canonicalize(parse("(and x1 x2)"))
    assert format_tree(representative(key)) == "(and x1 x2)"
    assert format_tree(representative(canonicalize(parse("(or (not x5) x5)")))) == "(or x1 (not x1))"


def test_representative_roundtrip():
    for n in range(1, 6):
        for key in enumerate_classes(n, 3):
            assert canonicalize(representative(key)) == key


def test_canonicalize_idempotent_through_representative():
    for n in range(1, 5):
        for t in enumerate_trees_G(n, 3):
            key = canonicalize(t)
            assert canonicalize(representative(key)) == key


def expected_per_block_count(n, p):
    return (catalan_leaves(n) << (n - 1)) * stirling2(n, p) << (n - p)


def test_class_counting_identity_per_block_count():
    for n in range(1, 6):
        by_p = Counter(distinct_variable_count(key) for key in enumerate_classes(n, n))
        assert by_p == {p: expected_per_block_count(n, p) for p in range(1, n + 1)}


def test_class_counting_identity_factored():
    # classes factor as shape x canonical labelling, so count the two streams separately
    for n in range(1, 9):
        shapes = sum(1 for _ in enumerate_shapes(n))
        by_p = Counter(max(v) for v, _ in enumerate_labellings_E(n, n))
        for p in range(1, n + 1):
            assert shapes * by_p[p] == expected_per_block_count(n, p)


def test_equivalence_soundness_random_pairs():
    rng = random.Random(7)
    trees = list(enumerate_trees_G(4, 3))
    for _ in range(500):
        t = rng.choice(trees)
        assert canonicalize(random_relabel(t, rng)) == canonicalize(t)
    for _ in range(500):
        t, u = rng.choice(trees), rng.choice(trees)
        if shape_of(t) != shape_of(u):
            assert canonicalize(t) != canonicalize(u)
        elif class_key(truth_table(t, 3)) != class_key(truth_table(u, 3)):
            assert canonicalize(t) != canonicalize(u)


def test_key_refines_function_class():
    seen = {}
    for t in enumerate_trees_G(4, 3):
        key = canonicalize(t)
        fk = class_key(truth_table(t, 3))
        assert seen.setdefault(key, fk) == fk
