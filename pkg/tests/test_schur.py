import numpy as np
import pytest

from fredholm_lab.errors import InputError, NumericalRefusal
from fredholm_lab.linalg_core import numerical_rank
from fredholm_lab.schur import (
    SchurModel,
    commutator_rank_matrix_unit,
    commutator_schatten_norm,
    diagonal_expectation,
    f_operator,
    left_multiplication_commutator,
    schur_hilbert,
    schur_index_pairing,
    toeplitz_compression,
    triangular_projection,
)


def unit(n, i, j):
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1
    return E


def test_schur_hilbert_examples():
    assert np.array_equal(schur_hilbert(unit(2, 0, 1)), 1j * unit(2, 0, 1))
    assert np.array_equal(schur_hilbert(unit(2, 1, 0)), -1j * unit(2, 1, 0))
    assert not schur_hilbert(np.diag([1, 2, 3])).any()


def test_projection_examples():
    assert not triangular_projection(unit(2, 1, 0)).any()
    assert np.array_equal(triangular_projection(unit(2, 0, 1)), unit(2, 0, 1))
    X = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(diagonal_expectation(X), np.diag([0.0, 4, 8]))


def test_operator_identities():
    rng = np.random.default_rng(0)
    for n in (1, 3, 6):
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        assert np.array_equal(f_operator(f_operator(X)), X)
        P = triangular_projection
        assert np.array_equal(P(P(X)), P(X))
        E = diagonal_expectation
        assert np.array_equal(E(E(X)), E(X))
        assert np.allclose((X + f_operator(X)) / 2, P(X))
        # F is the E-completion of the Hilbert multiplier with the opposite orientation
        assert np.allclose(f_operator(X), E(X) - 1j * schur_hilbert(X))
        assert not np.diag(schur_hilbert(np.diag(np.diag(X)))).any()


def test_direct_sum_decomposition_reassembles():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((5, 5))
    lower = np.tril(X, -1)
    upper = np.triu(X, 1)
    assert np.array_equal(lower + diagonal_expectation(X) + upper, X.astype(complex))


def test_commutator_rank_for_matrix_units():
    for n in (3, 4, 5):
        for k in range(n):
            for l in range(n):
                brute = numerical_rank(left_multiplication_commutator(unit(n, k, l))).rank if k != l else 0
                assert brute == commutator_rank_matrix_unit(n, k, l)
                assert brute <= 2 * n - 1


def test_toeplitz_compression_of_identity():
    T = toeplitz_compression(np.eye(4))
    assert np.array_equal(T, np.eye(10))
    assert schur_index_pairing(np.eye(4)).index == 0


def test_upper_triangular_symbols_act_injectively():
    rng = np.random.default_rng(2)
    a = np.triu(rng.standard_normal((4, 4))) + 3 * np.eye(4)
    rep = schur_index_pairing(a)
    assert rep.index == 0
    assert rep.evidence[0]["kernel"] == 0


@pytest.mark.parametrize("n", [3, 5, 8])
def test_pairing_vanishes_on_random_invertibles(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        rep = schur_index_pairing(a)
        assert rep.index == 0
        assert rep.evidence[0]["dimension"] == n * (n + 1) // 2


def test_singular_symbols_are_refused():
    with pytest.raises(NumericalRefusal):
        schur_index_pairing(np.diag([1.0, 1e-12]))
    with pytest.raises(InputError):
        schur_index_pairing(np.ones((2, 3)))


def test_model_and_norms():
    assert SchurModel(4).triangular_dimension == 10
    with pytest.raises(InputError):
        SchurModel(0)
    assert commutator_schatten_norm(np.eye(3)) == 0
    assert commutator_schatten_norm(unit(3, 2, 0), p=np.inf) == pytest.approx(2.0)
