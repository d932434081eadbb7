import itertools

import pytest

from andorlab.combinatorics import count_trees, series_I
from andorlab.patterns import (
    M,
    N,
    NP,
    P,
    N_pow,
    R,
    R_bar,
    PatternLang,
    classify_expansion,
    compose_decompose,
    count_with_repetitions,
    count_with_repetitions_bruteforce,
    decompose,
    forcing_check,
    forcing_check_shape,
    is_simple_tautology,
    pattern_gf_coefficients,
    repetitions,
    restrictions,
    tautology_census,
)
from andorlab.quotient import enumerate_classes, representative
from andorlab.trees import enumerate_shapes, enumerate_trees_G, format_tree, parse, subtree, truth_table
from andorlab.truthtable import full_mask

SIX_LEAF_TAUTOLOGY = "(or (or (or x1 (or (not x1) x2)) x3) (and x4 x1))"


def leaf_formats(t, paths):
    return [format_tree(subtree(t, p)) for p in paths]


def test_decompose_examples():
    t = parse("(and (or x1 x2) x3)")
    d = decompose(t, N)
    assert [format_tree(subtree(t, pl.path)) for pl in d.pattern_leaves] == ["x1", "x2"]
    assert leaf_formats(t, d.placeholders) == ["x3"]
    for lang in (N, P, M, N_pow(3), R(1), R_bar(2)):
        d = decompose(parse("x1"), lang)
        assert len(d.pattern_leaves) == 1 and d.placeholders == ()
    t = parse("(or (and x1 x2) x3)")
    d = decompose(t, M)
    assert [format_tree(subtree(t, pl.path)) for pl in d.pattern_leaves] == ["x3"]
    assert leaf_formats(t, d.placeholders) == ["x1", "x2"]


def test_decomposition_partitions_leaves():
    langs = (N, P, M, NP, N_pow(2), N_pow(3), R(1), R(2), R_bar(1))
    for n in range(1, 8):
        for shape in enumerate_shapes(n):
            for lang in langs:
                d = decompose(shape, lang)
                covered = [i for block in d.placeholder_leaves for i in block]
                assert sorted(list(d.pattern_indices) + covered) == list(range(n))
                assert decompose(shape, lang) == d


def test_repetition_examples():
    assert repetitions(parse("(or x1 (not x1))"), N) == 1
    assert repetitions(parse("(or x1 x2)"), N) == 0
    assert repetitions(parse("(or (or x1 x1) (not x1))"), N) == 2


def test_restriction_examples():
    assert restrictions(parse("(or x1 x2)"), N, {1}) == 1
    assert restrictions(parse("(or x1 (not x1))"), N, set()) == 1
    assert restrictions(parse("(or x1 (not x1))"), N, {1}) == 3


def test_compose_decompose_examples():
    for shape in itertools.islice(enumerate_shapes(5), 0, None, 7):
        assert compose_decompose(shape, 1).pattern_indices == decompose(shape, N).pattern_indices
    t = parse("(and x1 (and x2 x3))")
    d = compose_decompose(t, 2)
    assert [format_tree(subtree(t, pl.path)) for pl in d.leaves_at_level(1)] == ["x1"]
    assert [format_tree(subtree(t, pl.path)) for pl in d.leaves_at_level(2)] == ["x2"]
    assert leaf_formats(t, d.placeholders) == ["x3"]
    for shape in enumerate_shapes(5):
        assert len(compose_decompose(shape, 5).pattern_leaves) == 5


def test_repetitions_monotone_in_composition_depth():
    for t in itertools.islice(enumerate_trees_G(5, 2), 0, None, 13):
        reps = [repetitions(t, N_pow(i)) for i in range(1, 6)]
        assert reps == sorted(reps)


def test_count_with_repetitions_examples():
    # (x1|~x1), (~x1|x1), (x1|x1), (~x1|~x1): every or-rooted tree repeats
    assert count_with_repetitions(2, 1, N, 1, "G") == 4
    assert count_with_repetitions_bruteforce(2, 1, N, 1, "G") == 4
    for n, k in ((3, 2), (4, 3)):
        for model in ("G", "E"):
            assert count_with_repetitions(n, k, N, 0, model, at_least=True) == count_trees(n, k, model)


@pytest.mark.parametrize("model", ["G", "E"])
def test_count_with_repetitions_matches_bruteforce(model):
    for n in range(1, 6):
        for k in (1, 2, 3):
            if count_trees(n, k, model) > 30_000:
                continue
            for lang in ("N", "P", "M", "N_pow(2)"):
                for r in (0, 1, 2):
                    for at_least in (False, True):
                        fast = count_with_repetitions(n, k, lang, r, model, at_least)
                        slow = count_with_repetitions_bruteforce(n, k, lang, r, model, at_least)
                        assert fast == slow, (n, k, lang, r, model, at_least)


def test_simple_tautology_examples():
    assert is_simple_tautology(parse("(or x1 (not x1))"))
    assert is_simple_tautology(parse(SIX_LEAF_TAUTOLOGY))
    assert not is_simple_tautology(parse("(and x1 (not x1))"))


def test_simple_tautologies_are_tautologies():
    for t in enumerate_trees_G(4, 2):
        if is_simple_tautology(t):
            assert truth_table(t, 2).value == full_mask(2)


def test_forcing_examples():
    assert forcing_check(parse("x1"), N) and forcing_check(parse("x1"), P)
    for n in range(1, 7):
        for shape in enumerate_shapes(n):
            assert forcing_check_shape(shape, N)
            assert forcing_check_shape(shape, P)


def test_forcing_rejects_other_languages():
    with pytest.raises(ValueError):
        forcing_check(parse("(or x1 x2)"), M)


def test_classify_expansion_examples():
    res = classify_expansion(parse("x1"), parse("(and x1 (or x2 (not x2)))"))
    assert res.kind == "T_expansion"
    res = classify_expansion(parse("(and x1 x2)"), parse("(and x1 (or x2 (and x2 x3)))"))
    assert res.kind == "X_expansion"
    assert res.match.site == (1,)
    res = classify_expansion(parse("x1"), parse("x1"))
    assert res.kind == "not_an_expansion" and res.reason


def test_classify_expansion_dual_and_other():
    assert classify_expansion(parse("x1"), parse("(or (and x2 (not x2)) x1)")).kind == "T_expansion"
    assert classify_expansion(parse("(and x1 x2)"), parse("(and (and x1 x3) x2)")).kind == "other"


def test_classify_expansion_reports_alternatives():
    res = classify_expansion(parse("(and x1 x1)"), parse("(and (and x1 x1) x1)"))
    assert res.kind != "not_an_expansion"
    assert res.ambiguous


def test_tautology_census_examples():
    c = tautology_census(2, 1, "G")
    assert (c.tautologies, c.simple) == (2, 2)
    for model in ("G", "E"):
        for n in range(1, 6):
            for k in (1, 2):
                c = tautology_census(n, k, model)
                assert c.simple <= c.tautologies
                assert c.no_NN_repetition == 0
                assert c.one_NN_not_simple == 0


def test_tautology_census_matches_enumeration():
    for n in range(1, 5):
        for k in (1, 2):
            trees = list(enumerate_trees_G(n, k))
            taut = sum(truth_table(t, k).value == full_mask(k) for t in trees)
            simple = sum(is_simple_tautology(t) for t in trees)
            c = tautology_census(n, k, "G")
            assert (c.total, c.tautologies, c.simple) == (len(trees), taut, simple)
            reps = [repetitions(t, N_pow(2)) for t in trees if truth_table(t, k).value == full_mask(k)]
            assert c.one_NN_repetition == reps.count(1)
            keys = list(enumerate_classes(n, k))
            support = min(k, n)
            taut_e = sum(truth_table(representative(key), support).value == full_mask(support) for key in keys)
            assert tautology_census(n, k, "E").tautologies == taut_e


def test_census_row_columns():
    row = tautology_census(2, 2, "E").csv_row()
    assert row["count_total"] == 6 and row["ratio_simple_over_rat"] == "0.5"


def _series_power(coeffs, p, n_max):
    """Coefficients of I(z)^p up to z^n_max (index = exponent)."""
    base = [0] + coeffs[:n_max]
    out = [1] + [0] * n_max
    for _ in range(p):
        out = [sum(out[i] * base[j - i] for i in range(j + 1)) for j in range(n_max + 1)]
    return out


@pytest.mark.parametrize("lang", ["N", "P", "M"])
def test_pattern_gf_composition_counts_shapes(lang):
    # every shape is a unique pattern whose place-holders are filled by shapes
    n_max = 9
    coeffs = series_I(n_max)
    gf = pattern_gf_coefficients(lang, n_max)
    for n in range(1, n_max + 1):
        total = 0
        for (d, p), c in gf.items():
            if d <= n:
                total += c * _series_power(coeffs, p, n_max)[n - d]
        assert total == coeffs[n - 1]


def test_pattern_gf_matches_decomposition():
    gf = pattern_gf_coefficients("N", 6)
    # shapes whose placeholders are single leaves are exactly the patterns themselves
    for n in range(1, 7):
        counts = {}
        for shape in enumerate_shapes(n):
            d = decompose(shape, N)
            if all(len(block) == 1 for block in d.placeholder_leaves):
                key = (len(d.pattern_leaves), len(d.placeholders))
                counts[key] = counts.get(key, 0) + 1
        for (dd, pp), c in gf.items():
            if dd + pp == n:
                assert counts.get((dd, pp), 0) == c


def test_lang_parse():
    assert PatternLang.parse("N_pow(3)") == N_pow(3)
    assert PatternLang.parse("R(2)") == R(2)
    with pytest.raises(ValueError):
        PatternLang.parse("Q")
