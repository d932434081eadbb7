import random

from andorlab.decide import (
    compact_eval,
    essential_projection,
    falsifying_assignment,
    is_contradiction,
    is_satisfiable,
    is_tautology,
    satisfying_assignment,
    to_compact,
)
from andorlab.boolfn import essential_variables, project_essential
from andorlab.trees import AND, OR, Leaf, Literal, Node, enumerate_trees_G, eval_tree, parse, truth_table, variables
from andorlab.truthtable import full_mask


def random_tree(n, k, rng):
    if n == 1:
        return Leaf(Literal(rng.randint(1, k), rng.random() < 0.5))
    left = rng.randint(1, n - 1)
    return Node(rng.choice((AND, OR)), random_tree(left, k, rng), random_tree(n - left, k, rng))


def test_decisions_match_truth_tables_exhaustively():
    for n in range(1, 5):
        for t in enumerate_trees_G(n, 2):
            value = truth_table(t, 2).value
            assert is_tautology(t) == (value == full_mask(2))
            assert is_contradiction(t) == (value == 0)
            assert is_satisfiable(t) == (value != 0)


def test_witnesses_are_valid():
    rng = random.Random(3)
    for _ in range(400):
        t = random_tree(rng.randint(1, 14), rng.randint(1, 4), rng)
        vs = variables(t)
        fa = falsifying_assignment(t)
        if fa is None:
            assert truth_table(t, max(vs)).value == full_mask(max(vs))
        else:
            assert not eval_tree(t, {v: fa.get(v, False) for v in vs})
            assert not eval_tree(t, {v: fa.get(v, True) for v in vs})
        sa = satisfying_assignment(t)
        if sa is None:
            assert truth_table(t, max(vs)).value == 0
        else:
            assert eval_tree(t, {v: sa.get(v, False) for v in vs})


def test_known_tautologies():
    assert is_tautology(parse("(or (or (or x1 (or (not x1) x2)) x3) (and x4 x1))"))
    assert is_tautology(parse("(or (and x1 x2) (or (not x1) (not x2)))"))
    assert not is_tautology(parse("(or (and x1 x2) (not x1))"))


def test_essential_projection_matches_tables():
    rng = random.Random(11)
    for _ in range(300):
        t = random_tree(rng.randint(1, 10), 4, rng)
        m = max(variables(t))
        f = truth_table(t, m)
        got = essential_projection(to_compact(t), 4)
        g, idx = project_essential(f)
        assert got is not None
        indices, value = got
        assert tuple(indices) == tuple(sorted(essential_variables(f)))
        assert value == g.value


def test_essential_projection_limit():
    t = parse("(and (and x1 x2) (and x3 x4))")
    assert essential_projection(to_compact(t), 3) is None


def test_compact_eval():
    t = parse("(or (and x1 (not x2)) x3)")
    c = to_compact(t)
    for j in range(8):
        a = {v: bool((j >> (v - 1)) & 1) for v in (1, 2, 3)}
        assert compact_eval(c, a) == eval_tree(t, a)
