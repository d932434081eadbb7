import itertools

import pytest

from andorlab.combinatorics import count_trees, series_I
from andorlab.trees import (
    AND,
    OR,
    BudgetExceeded,
    ParseError,
    Leaf,
    Literal,
    Node,
    dual,
    enumerate_shapes,
    enumerate_trees_G,
    eval_tree,
    format_tree,
    parse,
    size,
    truth_table,
    variables,
)
from andorlab.truthtable import TruthTable, full_mask

SIX_LEAF_TAUTOLOGY = "(or (or (or x1 (or (not x1) x2)) x3) (and x4 x1))"


def brute_table(t, m):
    value = 0
    for j in range(1 << m):
        a = {v: bool((j >> (v - 1)) & 1) for v in range(1, m + 1)}
        if eval_tree(t, a):
            value |= 1 << j
    return TruthTable(m, value)


def test_size_examples():
    assert size(parse("x1")) == 1
    assert size(parse("(and x1 x2)")) == 2
    assert size(parse(SIX_LEAF_TAUTOLOGY)) == 6


def test_eval_examples():
    t = parse("(or x1 (not x1))")
    assert eval_tree(t, {1: False}) and eval_tree(t, {1: True})
    assert eval_tree(parse(SIX_LEAF_TAUTOLOGY), {v: False for v in range(1, 5)})
    assert not eval_tree(parse("(and x1 x2)"), {1: True, 2: False})


def test_eval_missing_variable():
    with pytest.raises(ValueError):
        eval_tree(parse("(and x1 x2)"), {1: True})


def test_truth_table_examples():
    assert truth_table(parse("x1"), 1) == TruthTable(1, 0b10)
    assert truth_table(parse("(or x1 (not x1))"), 1) == TruthTable(1, 0b11)
    t = truth_table(parse(SIX_LEAF_TAUTOLOGY), 4)
    assert t.value == full_mask(4)
    with pytest.raises(ValueError):
        truth_table(parse("x3"), 2)


def test_truth_table_matches_evaluation():
    for t in enumerate_trees_G(3, 2):
        for m in (2, 3):
            assert truth_table(t, m) == brute_table(t, m)


def test_assignment_encoding():
    # bit j of the assignment index sets x_{j+1}
    assert TruthTable.parse("m=2:0x8") == truth_table(parse("(and x1 x2)"), 2)
    assert truth_table(parse("x2"), 2).value == 0b1100


def test_parse_examples():
    t = parse("(or x1 (not x1))")
    assert t == Node(OR, Leaf(Literal(1, True)), Leaf(Literal(1, False)))
    t = parse("(and (or x1 x2) x3)")
    assert size(t) == 3 and isinstance(t.left, Node)
    with pytest.raises(ParseError) as exc:
        parse("(or x1")
    assert "end of input" in str(exc.value)


@pytest.mark.parametrize(
    "text",
    ["x0", "(or x01 x2)", "(and x1)", "(not (or x1 x2))", "(xor x1 x2)", "(and x1 x2) x3", ""],
)
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse(text)


def test_format_roundtrip_example():
    text = "(or (and x1 (not x2)) x3)"
    assert format_tree(parse(text)) == text


def test_enumerate_shapes_counts():
    assert [sum(1 for _ in enumerate_shapes(n)) for n in (1, 2, 4)] == [1, 2, 40]
    coeffs = series_I(8)
    for n in range(1, 9):
        shapes = list(enumerate_shapes(n))
        assert len(shapes) == len(set(shapes)) == coeffs[n - 1]


def test_enumerate_shapes_order():
    first, second = list(enumerate_shapes(2))
    assert first.connective is AND and second.connective is OR


def test_enumerate_trees_G_examples():
    assert [format_tree(t) for t in enumerate_trees_G(1, 1)] == ["x1", "(not x1)"]
    assert sum(1 for _ in enumerate_trees_G(2, 1)) == 8
    trees = list(enumerate_trees_G(3, 2))
    assert len(trees) == len(set(trees)) == 512


def test_enumerate_trees_G_matches_count():
    for n in range(1, 6):
        for k in range(1, 4):
            if count_trees(n, k, "G") <= 300_000:
                assert sum(1 for _ in enumerate_trees_G(n, k)) == count_trees(n, k, "G")


def test_enumerate_budget_refusal():
    with pytest.raises(BudgetExceeded) as exc:
        list(enumerate_trees_G(6, 3, budget=1000))
    assert str(count_trees(6, 3, "G")) in str(exc.value)


def test_de_morgan_duality():
    for n in range(1, 5):
        for t in enumerate_trees_G(n, 2):
            m = 2
            assert truth_table(dual(t), m).value == full_mask(m) ^ truth_table(t, m).value


def test_duality_size_five_sample():
    for t in itertools.islice(enumerate_trees_G(5, 3), 0, None, 97):
        m = max(variables(t))
        assert truth_table(dual(t), m).value == full_mask(m) ^ truth_table(t, m).value
