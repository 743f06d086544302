import pytest
from hypothesis import given, settings, strategies as st

from homexp.steenrod import (
    AdmissibleSequence,
    SteenrodSum,
    SteenrodWord,
    adem_reduce,
    adem_relation,
    admissible_sequences,
    binom2,
    cartan_expand,
    compose,
    excess,
    in_gap_set,
    is_admissible,
    nu2,
    parse_word,
)

from oracles import act_sum, action_matrix, admissible_brute, words_up_to
from oracles import TEST_MONOMIALS, Counter


def terms(w, twist=None):
    return {(t.entries, t.twist) for t in adem_reduce(SteenrodWord(w, twist))}


@pytest.mark.parametrize("n,k", [(n, k) for n in range(12) for k in range(12)])
def test_binom2_is_lucas(n, k):
    from math import comb
    assert binom2(n, k) == (comb(n, k) % 2 if 0 <= k <= n else 0)


@pytest.mark.parametrize("word,expected", [
    ((1, 1), set()),
    ((2, 2), {((3, 1), None)}),
    ((1, 2), {((3,), None)}),
    ((3, 3), {((5, 1), None)}),
    ((2, 4), {((6,), None), ((5, 1), None)}),
    ((1, 2, 1), {((3, 1), None)}),
    ((4, 2, 1), {((4, 2, 1), None)}),
])
def test_known_reductions(word, expected):
    assert terms(word) == expected


def test_twisted_bockstein_composite():
    assert terms((1, 2, 1), 3) == {((3, 1), 3)}
    assert terms((1, 1), 2) == set()


def test_adem_relation_shape():
    assert adem_relation(1, 2) == [(3,)]
    assert adem_relation(2, 2) == [(3, 1)]
    with pytest.raises(ValueError):
        adem_relation(4, 2)


def test_admissible_enumeration_matches_brute_force():
    found = list(admissible_sequences(14))
    for d in range(15):
        assert sorted(s for s in found if sum(s) == d) == sorted(admissible_brute(d)) + ([()] if d == 0 else [])


def test_low_excess_sequences():
    assert list(admissible_sequences(8, max_excess=1)) == [(), (1,), (2, 1), (4, 2, 1)]


def test_excess_and_admissibility():
    assert excess((4, 2, 1)) == 1
    assert AdmissibleSequence((6, 3, 1)).excess == 2
    assert not is_admissible((2, 2))
    with pytest.raises(ValueError):
        excess((1, 2))
    with pytest.raises(ValueError):
        AdmissibleSequence((1, 1))


def test_word_validation_and_text():
    assert str(SteenrodWord((2, 1), 3)) == "Sq[2,1]_s3"
    assert str(SteenrodWord(())) == "1"
    assert parse_word(" Sq[4, 2,1]_s2 ") == SteenrodWord((4, 2, 1), 2)
    assert parse_word("1") == SteenrodWord(())
    with pytest.raises(ValueError):
        SteenrodWord((2,), 2)
    with pytest.raises(ValueError):
        SteenrodWord((0, 1))
    with pytest.raises(ValueError):
        parse_word("Sq(2)")


def test_compose():
    assert compose(SteenrodWord((1,)), SteenrodWord((2, 1), 2)) == SteenrodWord((1, 2, 1), 2)
    with pytest.raises(ValueError):
        compose(SteenrodWord((1,), 2), SteenrodWord((1,)))


def test_sum_arithmetic():
    a = adem_reduce((2, 4))
    assert (a + a).terms == frozenset()
    assert str(adem_reduce((1, 1))) == "0"
    assert a.degree == 6
    with pytest.raises(ValueError):
        SteenrodSum(frozenset([AdmissibleSequence((1,)), AdmissibleSequence((2,))]))


def test_gap_set():
    assert [a for a in range(1, 40) if in_gap_set(a, 3)] == [15, 23, 27, 29, 31, 39]
    assert nu2(31) == 5
    with pytest.raises(ValueError):
        nu2(0)


def test_cartan_on_square_collapses():
    assert cartan_expand(4, ["x", "x"]) == frozenset({(("x", 2), ("x", 2))})
    assert cartan_expand(3, ["x", "x"]) == frozenset()
    assert len(cartan_expand(2, ["x", "y"])) == 3
    assert cartan_expand(0, []) == frozenset({()})


# -- the action-matrix oracle ---------------------------------------------------------------

WORDS = words_up_to(12, 3)


@pytest.mark.parametrize("word", WORDS, ids=lambda w: "Sq" + "_".join(map(str, w)))
def test_reduction_agrees_with_action_on_three_line_bundles(word):
    reduced = [t.entries for t in adem_reduce(word)]
    assert all(is_admissible(t) for t in reduced)
    assert action_matrix([word]) == action_matrix(reduced)


def test_oracle_is_faithful_through_degree_12():
    # admissibles of one degree act independently, so the comparison above is exact
    for d in range(1, 13):
        vectors = []
        for s in admissible_brute(d):
            vectors.append(frozenset((m, r) for m in TEST_MONOMIALS for r in act_sum([s], Counter({m: 1}))))
        seen = {frozenset()}
        for v in vectors:
            seen |= {x ^ v for x in seen}
        assert len(seen) == 2 ** len(vectors)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=1, max_size=4), st.lists(st.integers(1, 9), min_size=1, max_size=3))
def test_reduction_is_multiplicative(u, v):
    # reduce(u v) = reduce(reduce(u) reduce(v))
    lhs = {t.entries for t in adem_reduce(u + v)}
    acc = {}
    for a in adem_reduce(u):
        for b in adem_reduce(v):
            for t in adem_reduce(a.entries + b.entries):
                acc[t.entries] = acc.get(t.entries, 0) ^ 1
    assert lhs == {k for k, c in acc.items() if c}
