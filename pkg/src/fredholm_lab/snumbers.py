"""Approximation numbers, sampled Weyl numbers and S^q_app quasi-norms.

For p = 2 everything reduces to singular values and is exact.  For other
exponents the approximation numbers are upper bounds obtained from explicit
rank-(k-1) competitors, and the Weyl numbers are certified lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg_core import (
    DEFAULT_RANK_TOL,
    ESTIMATED,
    EXACT,
    PNormContext,
    as_cmatrix,
    eigenvalues,
    numerical_rank,
    operator_pnorm,
    singular_values,
    vector_pnorm,
)

WEYL_CONSTANT = math.sqrt(2 * math.e)


@dataclass(frozen=True)
class SNumberSequence:
    values: np.ndarray
    p: float
    certainty: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size and (np.any(v < 0) or np.any(np.diff(v) > 0)):
            raise ValueError("s-numbers must be nonnegative and nonincreasing")
        object.__setattr__(self, "values", v)

    def to_dict(self) -> dict:
        return {
            "values": [float(x) for x in self.values],
            "p": _json_p(self.p),
            "certainty": self.certainty,
        }


@dataclass(frozen=True)
class IdealNorm:
    q: float
    value: float

    def to_dict(self) -> dict:
        return {"q": float(self.q), "value": float(self.value)}


def _json_p(p: float):
    return "inf" if math.isinf(p) else float(p)


def lq_quasinorm(values, q: float) -> float:
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    a = np.abs(np.asarray(values, dtype=float))
    if a.size == 0 or not np.any(a):
        return 0.0
    scale = a.max()
    return float(scale * np.sum((a / scale) ** q) ** (1.0 / q))


def _norm_exact_or_est(A: np.ndarray, ctx: PNormContext) -> float:
    if A.size == 0 or not np.any(A):
        return 0.0
    return operator_pnorm(A, ctx)[0]


def _l1_regression(M: np.ndarray, y: np.ndarray, iters: int = 40) -> np.ndarray:
    """argmin_b ||y - M b||_1 over complex b, by reweighted least squares."""
    b = np.linalg.lstsq(M, y, rcond=None)[0]
    for _ in range(iters):
        r = np.abs(y - M @ b)
        w = 1.0 / np.maximum(r, 1e-12)
        sw = np.sqrt(w)
        b_new = np.linalg.lstsq(M * sw[:, None], y * sw, rcond=None)[0]
        if np.linalg.norm(b_new - b) <= 1e-9 * max(1.0, np.linalg.norm(b)):
            b = b_new
            break
        b = b_new
    return b


def _refine_rank_r(A: np.ndarray, L: np.ndarray, R: np.ndarray, p: float, sweeps: int = 4):
    """Alternating update of A ~ L @ R aimed at the l^1 column / l^inf row norms.

    Both endpoint norms are maxima of l^1 norms of columns (p = 1) or rows
    (p = inf), so each half-sweep is a batch of small l^1 regressions.
    """
    if math.isinf(p):
        Rt, Lt = _refine_rank_r(A.T, R.T, L.T, 1.0, sweeps)
        return Lt.T, Rt.T
    for _ in range(sweeps):
        R = np.column_stack([_l1_regression(L, A[:, j]) for j in range(A.shape[1])])
        L = np.vstack([_l1_regression(R.T, A[i, :]) for i in range(A.shape[0])])
    return L, R


def approx_numbers(T, ctx: PNormContext | None = None, restarts: int = 5) -> SNumberSequence:
    """a_k(T) = inf ||T - R|| over rank R < k, for k = 1..min(m, n)."""
    ctx = ctx or PNormContext()
    A = as_cmatrix(T)
    m, n = A.shape
    size = min(m, n)
    if size == 0:
        return SNumberSequence(np.zeros(0), ctx.p, EXACT)
    s = singular_values(A)
    if ctx.p == 2:
        return SNumberSequence(s.copy(), ctx.p, EXACT)

    rank = numerical_rank(A, DEFAULT_RANK_TOL).rank
    U, _, Vh = np.linalg.svd(A, full_matrices=False)
    rng = np.random.default_rng(ctx.seed)
    norm_a, cert = operator_pnorm(A, ctx)
    vals = np.zeros(size)
    vals[0] = norm_a
    endpoint = ctx.p == 1 or math.isinf(ctx.p)
    for k in range(2, size + 1):
        r = k - 1
        if r >= rank:
            vals[k - 1] = 0.0
            continue
        L0 = U[:, :r] * s[:r]
        R0 = Vh[:r]
        best = _norm_exact_or_est(A - L0 @ R0, ctx)
        for trial in range(restarts):
            if trial == 0:
                L, R = L0, R0
            else:
                scale = 0.1 * s[0]
                L = L0 + scale * (rng.standard_normal(L0.shape) + 1j * rng.standard_normal(L0.shape)) / math.sqrt(m)
                R = R0
            if endpoint:
                L, R = _refine_rank_r(A, L, R, ctx.p)
            best = min(best, _norm_exact_or_est(A - L @ R, ctx))
        vals[k - 1] = best
    # a_k <= a_{k-1}: a running minimum keeps every entry an upper bound
    vals = np.minimum.accumulate(vals)
    certainty = EXACT if (cert == EXACT and size == 1) else ESTIMATED
    return SNumberSequence(vals, ctx.p, certainty)


def sqapp_norm(T, q: float, ctx: PNormContext | None = None) -> IdealNorm:
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    seq = approx_numbers(T, ctx)
    return IdealNorm(q, lq_quasinorm(seq.values, q))


def _two_to_p_upper(A: np.ndarray, p: float) -> float:
    """Certified upper bound for ||A : l^2 -> l^p||."""
    rows = np.linalg.norm(A, axis=1)
    if math.isinf(p):
        return float(rows.max())
    bound = vector_pnorm(rows, p)
    spectral = np.linalg.norm(A, 2)
    if p >= 2:
        bound = min(bound, spectral)
    else:
        bound = min(bound, spectral * A.shape[0] ** (1.0 / p - 0.5))
    return float(bound)


def _p_to_two_lower_factor(dim: int, p: float) -> float:
    """c with ||y||_p >= c ||y||_2 on C^dim."""
    if p <= 2:
        return 1.0
    if math.isinf(p):
        return dim ** -0.5
    return dim ** (1.0 / p - 0.5)


def weyl_numbers_estimate(T, ctx: PNormContext | None = None, samples: int = 32) -> SNumberSequence:
    """Lower bounds for x_n(T) = sup a_n(TA) over contractions A: l^2 -> l^p.

    For each sampled contraction A, a_n(TA) >= c * sigma_n(TA) where c
    compares the l^p and l^2 norms on the target, so every sample yields a
    valid lower bound.
    """
    ctx = ctx or PNormContext()
    if samples < 1:
        raise ValueError("samples must be >= 1")
    A = as_cmatrix(T)
    m, n = A.shape
    size = min(m, n)
    if size == 0:
        return SNumberSequence(np.zeros(0), ctx.p, EXACT)
    s = singular_values(A)
    if ctx.p == 2:
        return SNumberSequence(s[:size].copy(), ctx.p, EXACT)

    c = _p_to_two_lower_factor(m, ctx.p)
    rng = np.random.default_rng(ctx.seed)
    _, _, Vh = np.linalg.svd(A)
    candidates = [Vh.conj().T]
    for _ in range(samples):
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        candidates.append(G)
    best = np.zeros(size)
    for G in candidates:
        bound = _two_to_p_upper(G, ctx.p)
        if bound == 0:
            continue
        contraction = G / bound
        sv = singular_values(A @ contraction)[:size]
        best = np.maximum(best, c * sv)
    # x_n is nonincreasing, so lower bounds propagate from the right
    best = np.maximum.accumulate(best[::-1])[::-1]
    return SNumberSequence(best, ctx.p, ESTIMATED)


@dataclass(frozen=True)
class WeylCheck:
    lhs: float
    rhs: float
    passed: bool
    status: str

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "passed": self.passed, "status": self.status}


def weyl_eigenvalue_check(T, q: float, ctx: PNormContext | None = None, samples: int = 32) -> WeylCheck:
    """Compare ||eigenvalues||_q with 2^{1/q} sqrt(2e) ||T||_{S^q_weyl}.

    A failure can only mean the sampled Weyl numbers were too small, so it is
    reported as inconclusive rather than as a violation.
    """
    A = as_cmatrix(T)
    if A.shape[0] != A.shape[1]:
        raise ValueError("weyl_eigenvalue_check needs a square matrix")
    lam = np.abs(eigenvalues(A))
    lhs = lq_quasinorm(lam, q)
    weyl = weyl_numbers_estimate(A, ctx, samples)
    rhs = 2 ** (1.0 / q) * WEYL_CONSTANT * lq_quasinorm(weyl.values, q)
    passed = lhs <= rhs + 1e-9
    return WeylCheck(float(lhs), float(rhs), bool(passed), "passed" if passed else "inconclusive")
