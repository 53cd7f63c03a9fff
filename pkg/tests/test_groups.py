import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fredholm_lab.circle import FourierSymbol
from fredholm_lab.errors import InputError, StepBudgetExceeded
from fredholm_lab.fredholm import NON_STABILIZING, index_by_winding
from fredholm_lab.groups import (
    EQUAL,
    GREATER,
    LESS,
    FreeHilbertSigns,
    GroupBall,
    GroupWord,
    OrderOracle,
    commutator_report,
    free_hilbert,
    free_hilbert_commutator,
    get_group,
    group_f_operator,
    group_toeplitz_index,
    order_compare,
    parse_word,
    sign,
    word_equal,
)
from fredholm_lab.groups import braids
from fredholm_lab.groups.braids import burau, free_reduce, handle_reduce, inverse
from fredholm_lab.groups.laurent import Laurent, matmul

b3_words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=12).map(tuple)


# -- words and parsing


def test_word_serialization_round_trips():
    for tag, text in [("B3", "s1 s2^-1 s1^3"), ("F2", "g1 g2^-1"), ("Z2_lex", "(2,-1)"), ("Z", "-3")]:
        G = get_group(tag)
        assert G.format(G.parse(text)) == text
    assert parse_word("B3", "s1 s2^-1 s1^3").letters == (1, -2, 1, 1, 1)
    assert parse_word("F2", "g1 g2^-1").pairs == ((1, 1), (2, -1))
    assert str(parse_word("Z2_lex", "(2,-1)")) == "(2,-1)"
    assert get_group("FreeGroup(3)").tag == "F3"


@pytest.mark.parametrize("tag, text", [("B3", "s3"), ("B3", "g1"), ("F2", "g3"), ("Z2_lex", "(1,2,3)"), ("Q", "1")])
def test_bad_words_are_rejected(tag, text):
    with pytest.raises(InputError):
        parse_word(tag, text)


def test_word_equal_examples():
    assert word_equal(parse_word("B3", "s1 s2 s1"), parse_word("B3", "s2 s1 s2"))
    assert not word_equal(parse_word("F2", "g1 g2"), parse_word("F2", "g2 g1"))
    assert word_equal(parse_word("Z", "3"), parse_word("Z", "g1^3"))
    with pytest.raises(InputError):
        word_equal(parse_word("Z", "1"), parse_word("F1", "g1"))


# -- braid machinery


def test_handle_reduction_examples():
    r = handle_reduce((-1, 2, 1))
    assert r.word == (2, 1, -2)
    assert r.classification == braids.SIGMA1_POSITIVE
    assert handle_reduce(()).classification == braids.EMPTY
    r = handle_reduce((2, 2, 2))
    assert r.word == (2, 2, 2) and r.classification == braids.SIGMA2_ONLY_POSITIVE
    assert handle_reduce((-2,)).classification == braids.SIGMA2_ONLY_NEGATIVE
    assert handle_reduce((1, 2, -1)).classification == braids.SIGMA1_POSITIVE
    assert handle_reduce((-1, -2, 1)).classification == braids.SIGMA1_NEGATIVE


def test_step_budget_is_enforced():
    with pytest.raises(StepBudgetExceeded) as info:
        handle_reduce((1, 2, 2, -1, -2, 1, 2, -1), budget=0)
    assert info.value.word == (1, 2, 2, -1, -2, 1, 2, -1)


def test_burau_satisfies_braid_relation_and_inverses():
    assert burau((1, 2, 1)) == burau((2, 1, 2))
    assert burau((1, -1)) == burau(()) == burau((-2, 2))
    assert burau((1, 2)) != burau((2, 1))
    # evaluation at a generic parameter agrees with exact arithmetic
    M = burau((1, -2, 1))
    t = 0.37 + 0.11j
    num = np.eye(2, dtype=complex)
    gens = {k: np.array([[x(t) for x in v[:2]], [x(t) for x in v[2:]]]) for k, v in braids.BURAU_GENERATORS.items()}
    for x in (1, -2, 1):
        num = num @ gens[x]
    assert np.allclose(num, [[M[0](t), M[1](t)], [M[2](t), M[3](t)]])


def test_laurent_arithmetic():
    p = Laurent.from_dict({-1: 2, 1: 1})
    q = Laurent.from_dict({1: 3})
    assert (p * q).terms == ((0, 6), (2, 3))
    assert (p + Laurent.from_dict({-1: -2})).terms == ((1, 1),)
    I = (Laurent.monomial(0), Laurent(), Laurent(), Laurent.monomial(0))
    assert matmul(I, I) == I


@settings(max_examples=300, deadline=None)
@given(b3_words)
def test_handle_reduction_preserves_the_braid(w):
    r = handle_reduce(w)
    assert burau(r.word) == burau(w)
    assert (r.classification == braids.EMPTY) == (burau(w) == burau(()))


@settings(max_examples=100, deadline=None)
@given(b3_words)
def test_handle_reduced_words_have_no_handles(w):
    r = handle_reduce(w)
    ones = [x for x in r.word if abs(x) == 1]
    assert len(set(ones)) <= 1
    assert free_reduce(r.word) == r.word


# -- orders


def test_integer_signs():
    Z = OrderOracle.for_group("Z")
    assert [sign(Z, Z.group.parse(s)) for s in ("5", "0", "-2")] == [1, 0, -1]


def test_braid_order_examples():
    B = OrderOracle.for_group("B3")
    assert order_compare(B, (), (-2, 1)) == LESS
    assert order_compare(B, (-2, 1), (1,)) == LESS
    assert order_compare(B, (1,), (-2, 1)) == GREATER
    assert order_compare(B, (1, 2, 1), (2, 1, 2)) == EQUAL


def test_free_groups_are_not_ordered_here():
    with pytest.raises(InputError):
        OrderOracle.for_group("F2")


@pytest.mark.parametrize("tag, radius", [("Z", 4), ("Z2_lex", 3), ("B3", 3)])
def test_order_total_and_antisymmetric_on_balls(tag, radius):
    oracle = OrderOracle.for_group(tag)
    ball = GroupBall.build(oracle.group, radius)
    flip = {LESS: GREATER, GREATER: LESS, EQUAL: EQUAL}
    for i, j in itertools.combinations_with_replacement(range(len(ball)), 2):
        s, t = ball.elements[i], ball.elements[j]
        c = oracle.compare(s, t)
        assert c == (EQUAL if i == j else c)
        assert c != EQUAL or i == j
        assert oracle.compare(t, s) == flip[c]


def _random_word(rng, G, max_len):
    return tuple(int(x) for x in rng.choice(G.letters, size=rng.integers(0, max_len + 1)))


@pytest.mark.parametrize("tag", ["Z", "Z2_lex", "B3"])
def test_left_invariance_and_cone_closure(tag):
    oracle = OrderOracle.for_group(tag)
    G = oracle.group
    rng = np.random.default_rng(0)
    for _ in range(500):
        r, s, t = (_random_word(rng, G, 5) for _ in range(3))
        assert oracle.compare(s, t) == oracle.compare(r + s, r + t)
    for _ in range(500):
        s, t = _random_word(rng, G, 6), _random_word(rng, G, 6)
        if oracle.sign(s) > 0 and oracle.sign(t) > 0:
            assert oracle.sign(s + t) > 0


# -- balls


def test_ball_sizes_and_inversion_closure():
    assert len(GroupBall.build("Z", 3)) == 7
    assert len(GroupBall.build("F2", 2)) == 1 + 4 + 12
    ball = GroupBall.build("B3", 2)
    assert len(ball) == 17
    for b in (ball, GroupBall.build("Z2_lex", 2), GroupBall.build("F3", 2)):
        assert b.closed_under_inversion()
        assert b.position(()) == 0


def test_ball_json_cache(tmp_path):
    ball = GroupBall.build("B3", 3)
    path = tmp_path / "b3.json"
    ball.save(path)
    assert json.loads(path.read_text())["format_version"] == 1
    loaded = GroupBall.load(path)
    assert loaded.elements == ball.elements and loaded.lengths == ball.lengths
    data = json.loads(path.read_text())
    data["format_version"] = 99
    with pytest.raises(InputError):
        GroupBall.from_json(json.dumps(data))


# -- operators


def test_group_f_operator_on_integers():
    Z = OrderOracle.for_group("Z")
    ball = GroupBall.build("Z", 3)
    F = group_f_operator(Z, ball)
    values = sorted(zip((Z.group.vector(s)[0] for s in ball.elements), np.diag(F).real))
    assert [v for _, v in values] == [-1, -1, -1, 1, 1, 1, 1]
    assert np.array_equal(F @ F, np.eye(len(ball)))


def test_group_f_operator_on_braids():
    B = OrderOracle.for_group("B3")
    ball = GroupBall.build("B3", 2)
    F = group_f_operator(B, ball)
    assert np.array_equal(F @ F, np.eye(len(ball)))
    for w, phi in zip(ball.elements, np.diag(F).real):
        r = handle_reduce(w)
        assert phi == (1 if r.classification in (braids.EMPTY, braids.SIGMA1_POSITIVE,
                                                 braids.SIGMA2_ONLY_POSITIVE) else -1)


def test_commutator_report_on_integers():
    Z = OrderOracle.for_group("Z")
    ball = GroupBall.build("Z", 5)
    rep = commutator_report(Z, ball, (1,))
    assert rep.rank == rep.svd_rank == 2
    M = rep.matrix.toarray()
    cols = [Z.group.vector(ball.elements[j])[0] for j in np.flatnonzero(np.any(M, axis=0))]
    assert sorted(cols) == [-1, 0]
    assert commutator_report(Z, ball, ()).rank == 0


@pytest.mark.parametrize("tag, t", [("Z", (1, 1)), ("Z2_lex", (1, -2)), ("B3", (1, -2)), ("B3", (2,))])
def test_commutator_entries_are_small_integers_times_i(tag, t):
    oracle = OrderOracle.for_group(tag)
    rep = commutator_report(oracle, GroupBall.build(oracle.group, 3), t)
    assert set(np.abs(rep.matrix.data)) <= {1.0, 2.0}
    assert rep.monomial and rep.rank == rep.svd_rank


@pytest.mark.parametrize("k", range(-5, 6))
def test_group_index_on_integers_matches_circle(k):
    Z = OrderOracle.for_group("Z")
    rep = group_toeplitz_index(Z, Z.group.parse(str(k)), [6, 7, 8])
    assert rep.index == -k == index_by_winding(FourierSymbol.monomial(k)).index
    assert rep.route == "combinatorial"


def test_group_index_trivial_element_and_lex():
    for tag in ("Z", "Z2_lex", "B3"):
        oracle = OrderOracle.for_group(tag)
        assert group_toeplitz_index(oracle, (), [2, 3, 4]).index == 0
    with pytest.raises(InputError):
        group_toeplitz_index(OrderOracle.for_group("Z"), (1,), [3, 4])


def test_braid_generator_counts_do_not_stabilize():
    B = OrderOracle.for_group("B3")
    rep = group_toeplitz_index(B, (1,), [3, 4, 5])
    assert rep.index == NON_STABILIZING
    counts = [row["cokernel"] for row in rep.evidence]
    assert counts == sorted(counts) and counts[0] < counts[-1]
    # sigma_2^-m sigma_1 lies in [e, sigma_1) for every m
    for m in range(1, 6):
        w = (-2,) * m + (1,)
        assert B.sign(w) > 0 and B.compare(w, (1,)) == LESS


# -- free Hilbert transform


def test_free_hilbert_signs_parse():
    s = FreeHilbertSigns.parse("+-,-+")
    assert s.plus == (1, -1) and s.minus == (-1, 1)
    assert s.format() == "+-,-+"
    with pytest.raises(InputError):
        FreeHilbertSigns.parse("+x")


def test_free_hilbert_basic_properties():
    ball = GroupBall.build("F3", 3)
    e = ball.position(())
    plus = FreeHilbertSigns((1, 1, 1), (1, 1, 1))
    H = free_hilbert(plus, ball)
    expected = np.eye(len(ball))
    expected[e, e] = 0
    assert np.array_equal(H, expected)
    rng = np.random.default_rng(0)
    for _ in range(4):
        signs = FreeHilbertSigns(tuple(rng.choice([-1, 1], 3)), tuple(rng.choice([-1, 1], 3)))
        H = free_hilbert(signs, ball)
        assert H[e, e] == 0
        assert np.array_equal(H @ H, expected)


def test_free_hilbert_commutator_constant_signs():
    ball = GroupBall.build("F3", 4)
    signs = FreeHilbertSigns((1, 1, 1), (1, 1, 1))
    t = (1, -2)
    rep = free_hilbert_commutator(signs, ball, t)
    cols = {ball.elements[j] for j in np.flatnonzero(np.diff(rep.matrix.indptr))}
    assert cols == {(), inverse(t)}


def test_free_hilbert_commutator_mixed_signs():
    ball = GroupBall.build("F3", 3)
    signs = FreeHilbertSigns((1, -1, -1), (1, 1, 1))
    rep = free_hilbert_commutator(signs, ball, (1,))
    assert rep.rank >= 2 and rep.monomial
    M = rep.matrix
    for s in [(2,), (3,)]:
        j = ball.position(s)
        assert set(M[:, j].data) == {2}
    assert free_hilbert_commutator(signs, ball, ()).rank == 0


def test_free_hilbert_needs_free_ball():
    with pytest.raises(InputError):
        free_hilbert(FreeHilbertSigns((1,), (1,)), GroupBall.build("Z", 2))
    with pytest.raises(InputError):
        free_hilbert(FreeHilbertSigns((1,), (1,)), GroupBall.build("F2", 1))
