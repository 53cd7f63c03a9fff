"""Dense complex linear algebra between finite-dimensional l^p spaces.

Everything here is a thin, explicit layer over numpy/scipy so that the
tolerances used by the index engines are visible in one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

DEFAULT_RANK_TOL = 1e-8

EXACT = "exact"
ESTIMATED = "estimated"


@dataclass(frozen=True)
class PNormContext:
    """Exponent and estimator settings for l^p operator norms."""

    p: float = 2.0
    estimation_iterations: int = 200
    estimation_restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError(f"p must be >= 1, got {self.p}")


@dataclass(frozen=True)
class RankDecision:
    rank: int
    relative_tolerance: float
    discarded_mass: float


def as_cmatrix(T) -> np.ndarray:
    """Validate and coerce to a 2-d complex array with finite entries."""
    A = np.asarray(T, dtype=complex)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has NaN or infinite entries")
    return A


def _check_p(p: float) -> float:
    p = float(p)
    if not (p >= 1):
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return p


def dual_exponent(p: float) -> float:
    p = _check_p(p)
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def vector_pnorm(v, p: float) -> float:
    p = _check_p(p)
    a = np.abs(np.asarray(v, dtype=complex).ravel())
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    if p == 1:
        return float(a.sum())
    if p == 2:
        return float(np.linalg.norm(a))
    scale = a.max()
    if scale == 0:
        return 0.0
    return float(scale * np.sum((a / scale) ** p) ** (1.0 / p))


def _dual_vector(y: np.ndarray, p: float) -> np.ndarray:
    """Unit vector in l^q norming y, i.e. <z, y> = ||y||_p and ||z||_q = 1."""
    a = np.abs(y)
    phase = np.where(a > 0, y / np.where(a > 0, a, 1), 0)
    if math.isinf(p):
        z = np.zeros_like(y)
        i = int(np.argmax(a))
        z[i] = phase[i] if a[i] > 0 else 1
        return z
    if p == 1:
        return np.where(a > 0, phase, 0)
    norm = vector_pnorm(y, p)
    if norm == 0:
        return np.zeros_like(y)
    return phase * (a / norm) ** (p - 1)


def estimate_pnorm(T, ctx: PNormContext) -> float:
    """Lower bound for ||T||_{p->p} by dual-norm power iteration.

    Every returned value is ||T x||_p / ||x||_p for an explicit x, so the
    result never exceeds the true norm.
    """
    A = as_cmatrix(T)
    p = _check_p(ctx.p)
    q = dual_exponent(p)
    m, n = A.shape
    if A.size == 0 or not np.any(A):
        return 0.0
    rng = np.random.default_rng(ctx.seed)

    starts = []
    # seeds: top right singular vector, the largest column, then random
    _, _, Vh = np.linalg.svd(A)
    starts.append(Vh[0].conj())
    e = np.zeros(n, dtype=complex)
    e[int(np.argmax(np.abs(A).sum(axis=0)))] = 1
    starts.append(e)
    for _ in range(ctx.estimation_restarts):
        starts.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))

    best = 0.0
    for x in starts:
        x = x / vector_pnorm(x, p)
        for _ in range(ctx.estimation_iterations):
            y = A @ x
            best = max(best, vector_pnorm(y, p))
            if not np.any(y):
                break
            z = A.conj().T @ _dual_vector(y, p)
            x_new = _dual_vector(z, q)
            nx = vector_pnorm(x_new, p)
            if nx == 0:
                break
            x_new = x_new / nx
            if np.allclose(x_new, x, rtol=0, atol=1e-14):
                break
            x = x_new
        best = max(best, vector_pnorm(A @ x, p))
    return float(best)


def operator_pnorm(T, ctx: PNormContext | None = None) -> tuple[float, str]:
    """Operator norm on l^p; exact for p in {1, 2, inf}, else a lower bound."""
    ctx = ctx or PNormContext()
    A = as_cmatrix(T)
    if A.size == 0:
        raise ValueError("operator_pnorm needs a nonempty matrix")
    p = _check_p(ctx.p)
    if p == 1:
        return float(np.abs(A).sum(axis=0).max()), EXACT
    if p == 2:
        return float(np.linalg.norm(A, 2)), EXACT
    if math.isinf(p):
        return float(np.abs(A).sum(axis=1).max()), EXACT
    return estimate_pnorm(A, ctx), ESTIMATED


def svd(T):
    """Return (U, sigma, V) with T = U diag(sigma) V^*."""
    A = as_cmatrix(T)
    if A.size == 0:
        m, n = A.shape
        return np.eye(m, 0, dtype=complex), np.zeros(0), np.eye(n, 0, dtype=complex)
    U, s, Vh = np.linalg.svd(A, full_matrices=True)
    return U, s, Vh.conj().T


def singular_values(T) -> np.ndarray:
    A = as_cmatrix(T)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def numerical_rank(T, relative_tolerance: float = DEFAULT_RANK_TOL) -> RankDecision:
    if not (0 < relative_tolerance < 1):
        raise ValueError("relative_tolerance must lie in (0, 1)")
    s = singular_values(T)
    if s.size == 0 or s[0] == 0:
        return RankDecision(0, relative_tolerance, 0.0)
    keep = s > relative_tolerance * s[0]
    return RankDecision(int(keep.sum()), relative_tolerance, float(s[~keep].sum()))


def pseudo_inverse(T, relative_tolerance: float = DEFAULT_RANK_TOL) -> np.ndarray:
    A = as_cmatrix(T)
    m, n = A.shape
    if A.size == 0:
        return np.zeros((n, m), dtype=complex)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0:
        return np.zeros((n, m), dtype=complex)
    inv = np.where(s > relative_tolerance * s[0], 1.0 / np.where(s > 0, s, 1), 0.0)
    return (Vh.conj().T * inv) @ U.conj().T


def trace(T) -> complex:
    A = as_cmatrix(T)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"trace needs a square matrix, got {A.shape}")
    return complex(np.trace(A))


def eigenvalues(T) -> np.ndarray:
    """Eigenvalues sorted by nonincreasing modulus."""
    A = as_cmatrix(T)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"eigenvalues need a square matrix, got {A.shape}")
    if A.size == 0:
        return np.zeros(0, dtype=complex)
    lam = scipy.linalg.eigvals(A)
    order = np.argsort(-np.abs(lam), kind="stable")
    return lam[order]
