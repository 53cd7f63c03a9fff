"""Finite subdiagonal model: upper-triangular matrices inside M_n.

The Riesz projection is the triangular projection, the Hilbert transform is a
Schur multiplier, and the Toeplitz operator T_a(b) = P(ab) acts on the
n(n+1)/2-dimensional space of upper-triangular matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalRefusal
from .fredholm import IndexReport, exact_index
from .linalg_core import DEFAULT_RANK_TOL, as_cmatrix, numerical_rank, singular_values

MAX_CONDITION = 1e8


@dataclass(frozen=True)
class SchurModel:
    n: int
    p: float = 2.0

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"matrix size must be >= 1, got {self.n}")

    @property
    def triangular_dimension(self) -> int:
        return self.n * (self.n + 1) // 2

    def upper_indices(self) -> tuple[np.ndarray, np.ndarray]:
        return np.triu_indices(self.n)


def _square(X) -> np.ndarray:
    A = as_cmatrix(X)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"expected a square matrix, got {A.shape}")
    return A


def _sgn_symbol(n: int) -> np.ndarray:
    i, j = np.indices((n, n))
    return np.sign(i - j)


def schur_hilbert(X) -> np.ndarray:
    """Schur multiplier with symbol -i sgn(i - j)."""
    A = _square(X)
    return -1j * _sgn_symbol(A.shape[0]) * A


def triangular_projection(X) -> np.ndarray:
    return np.triu(_square(X))


def diagonal_expectation(X) -> np.ndarray:
    return np.diag(np.diag(_square(X)))


def f_symbol(n: int) -> np.ndarray:
    """+1 on and above the diagonal, -1 below."""
    i, j = np.indices((n, n))
    return np.where(i <= j, 1.0, -1.0)


def f_operator(X) -> np.ndarray:
    """The +-1 Schur multiplier with P = (Id + F)/2; equals E - iH for schur_hilbert above."""
    A = _square(X)
    return f_symbol(A.shape[0]) * A


def left_multiplication_commutator(a) -> np.ndarray:
    """Matrix of X -> F(aX) - aF(X) on M_n in column-major vec coordinates."""
    A = _square(a)
    n = A.shape[0]
    L = np.kron(np.eye(n), A)  # vec(aX) = (I kron a) vec(X)
    Fd = np.diag(f_symbol(n).ravel(order="F"))
    return Fd @ L - L @ Fd


def commutator_rank_matrix_unit(n: int, k: int, l: int) -> int:
    """Closed-form rank of [F, M_{E_kl}]: rows j where the symbol differs between rows k and l."""
    phi = f_symbol(n)
    return int(np.count_nonzero(phi[k] != phi[l]))


def toeplitz_compression(a) -> np.ndarray:
    """Matrix of b -> P(ab) on upper-triangular b, in the triu_indices basis."""
    A = _square(a)
    n = A.shape[0]
    rows, cols = np.triu_indices(n)
    m = rows.size
    T = np.zeros((m, m), dtype=complex)
    for c in range(m):
        B = np.zeros((n, n), dtype=complex)
        B[rows[c], cols[c]] = 1
        T[:, c] = (A @ B)[rows, cols]
    return T


def schur_index_pairing(a, rank_tol: float = DEFAULT_RANK_TOL) -> IndexReport:
    A = _square(a)
    s = singular_values(A)
    cond = np.inf if s[-1] == 0 else s[0] / s[-1]
    if not cond < MAX_CONDITION:
        raise NumericalRefusal(f"condition number {cond:.3g} is too large")
    T = toeplitz_compression(A)
    ker, coker, index = exact_index(T, rank_tol)
    evidence = [{"n": A.shape[0], "dimension": T.shape[0], "rank": numerical_rank(T, rank_tol).rank,
                 "kernel": ker, "cokernel": coker, "condition": float(cond)}]
    return IndexReport(index, "exact", evidence, {"rank_tol": rank_tol, "max_condition": MAX_CONDITION})


def commutator_schatten_norm(a, p: float = 2.0) -> float:
    """Schatten-p norm of X -> [F, aX] computed from singular values."""
    s = singular_values(left_multiplication_commutator(a))
    if np.isinf(p):
        return float(s[0]) if s.size else 0.0
    return float(np.sum(s**p) ** (1 / p))
