"""Fredholm index routes and the odd/even pairing operators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import circle
from .circle import FourierSymbol, Window, WindowedOperator
from .errors import HypothesisViolation, InputError
from .linalg_core import DEFAULT_RANK_TOL, as_cmatrix, numerical_rank, trace

NON_STABILIZING = "non-stabilizing"

ROUTES = ("winding", "kernel_stabilization", "calderon", "combinatorial", "exact")


@dataclass
class IndexReport:
    index: int | str
    route: str
    evidence: list[dict] = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.route not in ROUTES:
            raise InputError(f"unknown route {self.route!r}")

    @property
    def stabilized(self) -> bool:
        return self.index != NON_STABILIZING

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "route": self.route,
            "stabilized": self.stabilized,
            "evidence": self.evidence,
            "tolerances": self.tolerances,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------- symbol-valued matrices


def _as_symbol_matrix(u) -> list[list[FourierSymbol]]:
    if isinstance(u, FourierSymbol):
        return [[u]]
    rows = [[x if isinstance(x, FourierSymbol) else FourierSymbol.constant(x) for x in row] for row in u]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise InputError("expected a square matrix of symbols")
    return rows


def symbol_matrix_bandwidth(u) -> int:
    return max(s.bandwidth for row in _as_symbol_matrix(u) for s in row)


def represent(u, window: Window, p: float = 2.0) -> BlockOperator:
    """pi(u) = (Id tensor pi)(u) on the block space, widened by the bandwidth.

    Block layout: the block index is the slow index, the frequency the fast one.
    """
    rows = _as_symbol_matrix(u)
    b = symbol_matrix_bandwidth(rows)
    out = window.expand(b)
    blocks = [[circle.multiplication_operator(s, window, p).embed(window, out).matrix for s in row] for row in rows]
    return _block_op(np.block(blocks), window, out, len(rows), p)


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """Operator on a direct sum of ``blocks`` copies of windowed spaces.

    The block index is the slow index of ``matrix``; ``window`` is None for
    coordinates on a compressed range.
    """

    matrix: np.ndarray
    blocks: int
    in_window: Window | None
    out_window: Window | None
    p: float = 2.0


def _block_op(M, in_w, out_w, k, p) -> BlockOperator:
    return BlockOperator(np.asarray(M, dtype=complex), k, in_w, out_w, p)


def _check_invertible_symbol_matrix(u, samples: int = 2048) -> None:
    rows = _as_symbol_matrix(u)
    if len(rows) == 1:
        circle.winding_number(rows[0][0])
        return
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = np.array([[s(theta) for s in row] for row in rows])  # (k, k, samples)
    det = np.linalg.det(np.moveaxis(vals, -1, 0))
    if np.min(np.abs(det)) <= circle.MIN_MODULUS:
        raise HypothesisViolation("matrix symbol is not invertible on the circle")


def odd_pairing_operator(u, F: WindowedOperator) -> WindowedOperator | BlockOperator:
    """P pi(u) P - (Id - P) with P = (Id + F)/2 on the square window of F.

    ``u`` is a FourierSymbol or a square matrix of symbols; F is a square
    windowed operator on the circle model (applied blockwise for matrices).
    pi(u) is truncated to the window of F.
    """
    if not F.is_square:
        raise InputError("F must act on a single window")
    _check_invertible_symbol_matrix(u)
    rows = _as_symbol_matrix(u)
    k = len(rows)
    W = F.in_window
    U = represent(rows, W, F.p)
    b = symbol_matrix_bandwidth(rows)
    # crop each block's output back to W
    Ufull = U.matrix.reshape(k, W.size + 2 * b, k, W.size)[:, b:b + W.size, :, :].reshape(k * W.size, k * W.size)
    Fk = np.kron(np.eye(k), F.matrix)
    P = (np.eye(k * W.size) + Fk) / 2
    M = P @ Ufull @ P - (np.eye(k * W.size) - P)
    if k == 1:
        return WindowedOperator(M, W, W, F.p)
    return _block_op(M, W, W, k, F.p)


def compressed_toeplitz(u: FourierSymbol, N: int, p: float = 2.0) -> WindowedOperator:
    """P M_u P on Ran P restricted to frequencies 0..N: the finite section of T_u."""
    W = Window(0, N)
    return circle.multiplication_operator(u, W, p).restrict(W, W)


def even_pairing_operator(e, F_plus: WindowedOperator, check: bool = True) -> BlockOperator:
    """e (Id tensor F_+) e as an operator on the block space.

    For a constant idempotent ``e`` (a complex matrix) the result is the exact
    compression to Ran e, mapping coordinates of Ran e on X_+ to those of Ran e
    on X_-.  For a symbol-valued idempotent the square truncation of
    e F_+ e + (Id - e) is returned, which carries the same index.
    """
    if not F_plus.is_square:
        raise InputError("F_+ must act on a single window")
    W = F_plus.in_window
    if isinstance(e, np.ndarray) or (not isinstance(e, FourierSymbol) and _is_numeric_matrix(e)):
        E = np.atleast_2d(as_cmatrix(e))
        if E.shape[0] != E.shape[1]:
            raise InputError("idempotent must be square")
        if check and np.linalg.norm(E @ E - E) > 1e-10:
            raise HypothesisViolation("e is not idempotent")
        k = E.shape[0]
        if not np.any(E):
            return BlockOperator(np.zeros((0, 0), dtype=complex), 0, None, None, F_plus.p)
        # orthonormal basis of Ran e, and the coordinates of e x in it
        Q, R, _ = _range_basis(E)
        big_e = np.kron(E, np.eye(W.size))
        big_Q = np.kron(Q, np.eye(W.size))
        Fk = np.kron(np.eye(k), F_plus.matrix)
        M = big_Q.conj().T @ big_e @ Fk @ big_e @ big_Q
        return BlockOperator(M, Q.shape[1], None, None, F_plus.p)
    rows = _as_symbol_matrix(e)
    k = len(rows)
    if check:
        sq = [[sum((rows[i][l] * rows[l][j] for l in range(k)), FourierSymbol()) for j in range(k)] for i in range(k)]
        for i in range(k):
            for j in range(k):
                diff = sq[i][j] - rows[i][j]
                if any(abs(c) > 1e-10 for c in diff.coefficients.values()):
                    raise HypothesisViolation("symbol matrix e is not idempotent")
    b = symbol_matrix_bandwidth(rows)
    U = represent(rows, W, F_plus.p)
    Ef = U.matrix.reshape(k, W.size + 2 * b, k, W.size)[:, b:b + W.size, :, :].reshape(k * W.size, k * W.size)
    Fk = np.kron(np.eye(k), F_plus.matrix)
    I = np.eye(k * W.size)
    M = Ef @ Fk @ Ef + (I - Ef)
    return _block_op(M, W, W, k, F_plus.p)


def _is_numeric_matrix(e) -> bool:
    try:
        np.asarray(e, dtype=complex)
        return True
    except (TypeError, ValueError):
        return False


def _range_basis(E: np.ndarray):
    U, s, Vh = np.linalg.svd(E)
    r = int(np.sum(s > DEFAULT_RANK_TOL * max(s[0], 1e-300)))
    return U[:, :r], s[:r], Vh[:r]


# ---------------------------------------------------------------- index routes


def exact_index(M, rank_tol: float = DEFAULT_RANK_TOL) -> tuple[int, int, int]:
    """(dim ker, dim coker, index) of a finite matrix via numerical rank."""
    A = as_cmatrix(M)
    m, n = A.shape
    r = numerical_rank(A, rank_tol).rank if A.size else 0
    return n - r, m - r, (n - r) - (m - r)


def index_by_winding(f: FourierSymbol, samples: int | None = None) -> IndexReport:
    w = circle.winding_number(f, samples)
    return IndexReport(
        index=-w.winding,
        route="winding",
        evidence=[w.to_dict()],
        tolerances={"min_modulus": circle.MIN_MODULUS},
    )


def _margin_rows(size: int, margin: int, edges: str) -> np.ndarray:
    margin = min(margin, size)
    rows = np.zeros(size, dtype=bool)
    if edges in ("both", "leading"):
        rows[:margin] = True
    if edges in ("both", "trailing"):
        rows[size - margin:] = True
    if edges not in ("both", "leading", "trailing"):
        raise InputError(f"edges must be both, leading or trailing, got {edges!r}")
    return rows


def _block_margin_rows(size: int, blocks: int, margin: int, edges: str) -> np.ndarray:
    """Margin rows of every block when the vector is a stack of ``blocks`` equal windows."""
    if size % blocks:
        raise InputError(f"size {size} is not a multiple of {blocks} blocks")
    return np.tile(_margin_rows(size // blocks, margin, edges), blocks)


def _interior_dimension(basis: np.ndarray, rows: np.ndarray, mass_threshold: float) -> int:
    """Dimension of the subspace of span(basis) whose margin mass fraction is below the threshold.

    ``basis`` has orthonormal columns, so the count is the number of singular
    values of the margin block with sigma^2 < mass_threshold.
    """
    if basis.shape[1] == 0:
        return 0
    block = basis[rows]
    if block.shape[0] == 0:
        return basis.shape[1]
    s = np.linalg.svd(block, compute_uv=False)
    s = np.concatenate([s, np.zeros(basis.shape[1] - s.size)])
    return int(np.sum(s ** 2 < mass_threshold))


def index_by_kernel_stabilization(
    family: Callable[[int], "WindowedOperator | BlockOperator | np.ndarray"],
    scales: Sequence[int],
    boundary_margin: int,
    mass_threshold: float = 1e-6,
    edges: str = "both",
    rank_tol: float = DEFAULT_RANK_TOL,
) -> IndexReport:
    """Finite-section index: count only kernel vectors that live away from the truncation edges.

    Square truncations always have index 0; the true index shows up as the
    imbalance between interior kernel vectors of the truncation and of its
    adjoint.  Edge-localized ones are artifacts of cutting the operator off.
    """
    scales = list(scales)
    if len(scales) < 3 or any(b <= a for a, b in zip(scales, scales[1:])):
        raise InputError("need at least three increasing scales")
    evidence = []
    for N in scales:
        op = family(N)
        M = as_cmatrix(getattr(op, "matrix", op))
        m, n = M.shape
        U, s, Vh = np.linalg.svd(M)
        smax = s[0] if s.size else 0.0
        r = int(np.sum(s > rank_tol * smax)) if smax > 0 else 0
        ker = Vh[r:].conj().T  # n x (n - r)
        coker = U[:, r:]  # m x (m - r)
        k = getattr(op, "blocks", 1)
        k_int = _interior_dimension(ker, _block_margin_rows(n, k, boundary_margin, edges), mass_threshold)
        c_int = _interior_dimension(coker, _block_margin_rows(m, k, boundary_margin, edges), mass_threshold)
        evidence.append({
            "scale": int(N),
            "shape": [int(m), int(n)],
            "raw_kernel": int(n - r),
            "raw_cokernel": int(m - r),
            "kernel": k_int,
            "cokernel": c_int,
            "index": k_int - c_int,
        })
    last = evidence[-3:]
    agree = all((e["kernel"], e["cokernel"]) == (last[0]["kernel"], last[0]["cokernel"]) for e in last)
    return IndexReport(
        index=last[0]["index"] if agree else NON_STABILIZING,
        route="kernel_stabilization",
        evidence=evidence,
        tolerances={
            "boundary_margin": int(boundary_margin),
            "mass_threshold": mass_threshold,
            "rank_tol": rank_tol,
            "edges": edges,
        },
    )


def pairing_family(u, p: float = 2.0) -> Callable[[int], WindowedOperator]:
    """N -> P M_u P - (Id - P) on the symmetric window [-N, N]."""

    def build(N: int) -> WindowedOperator:
        W = Window.symmetric(N)
        return odd_pairing_operator(u, circle.f_operator(W, p))

    return build


def toeplitz_family(u: FourierSymbol, p: float = 2.0) -> Callable[[int], WindowedOperator]:
    """N -> finite section of T_u on frequencies 0..N (only the trailing edge is artificial)."""
    return lambda N: compressed_toeplitz(u, N, p)


def default_margin(f: FourierSymbol) -> int:
    # 2 (bandwidth + |shift|) with |shift| <= bandwidth
    return max(2, 4 * f.bandwidth)


def index_of_symbol_by_stabilization(
    f: FourierSymbol,
    scales: Sequence[int] = (32, 64, 128),
    boundary_margin: int | None = None,
    mass_threshold: float = 1e-6,
) -> IndexReport:
    margin = default_margin(f) if boundary_margin is None else boundary_margin
    return index_by_kernel_stabilization(pairing_family(f), scales, margin, mass_threshold)


@dataclass
class CalderonReport:
    lhs_trace: complex
    rhs_trace: complex
    index: int | None
    reliable: bool
    n: int

    def to_dict(self) -> dict:
        return {
            "lhs_trace": [self.lhs_trace.real, self.lhs_trace.imag],
            "rhs_trace": [self.rhs_trace.real, self.rhs_trace.imag],
            "index": self.index,
            "reliable": self.reliable,
            "n": self.n,
        }


def calderon_index(T, R, n: int = 1, tolerance: float = 0.1) -> CalderonReport:
    """tr(Id - RT)^n - tr(Id - TR)^n, snapped to the nearest integer when within ``tolerance``."""
    T = as_cmatrix(T)
    R = as_cmatrix(R)
    if T.shape[0] != T.shape[1] or R.shape != T.shape:
        raise InputError("calderon_index needs square T and R of equal size")
    if n < 1:
        raise InputError("n must be >= 1")
    I = np.eye(T.shape[0])
    lhs = trace(np.linalg.matrix_power(I - R @ T, n))
    rhs = trace(np.linalg.matrix_power(I - T @ R, n))
    raw = lhs - rhs
    nearest = round(raw.real)
    reliable = abs(raw - nearest) < tolerance
    return CalderonReport(lhs, rhs, int(nearest) if reliable else None, bool(reliable), n)


@dataclass
class PerturbationReport:
    unperturbed: IndexReport
    perturbed: IndexReport
    perturbation_rank: int

    @property
    def invariant(self) -> bool:
        return self.unperturbed.stabilized and self.unperturbed.index == self.perturbed.index

    def to_dict(self) -> dict:
        return {
            "unperturbed": self.unperturbed.to_dict(),
            "perturbed": self.perturbed.to_dict(),
            "perturbation_rank": self.perturbation_rank,
            "invariant": self.invariant,
        }


def compact_perturbation_check(
    family: Callable[[int], WindowedOperator],
    K: WindowedOperator | Callable[[int], WindowedOperator],
    scales: Sequence[int] = (32, 64, 128),
    boundary_margin: int = 4,
    mass_threshold: float = 1e-6,
    edges: str = "both",
    rank_budget: int = 16,
) -> PerturbationReport:
    """Index of a family before and after adding a finite-rank K (kernel-stabilization route).

    A fixed ``K`` is aligned with each scale's windows by frequency; a callable
    is evaluated per scale.
    """

    def perturbed(N: int) -> WindowedOperator:
        T = family(N)
        KN = K(N) if callable(K) else K.embed(T.in_window, T.out_window)
        return T + KN

    sample = K(scales[0]) if callable(K) else K
    rank = numerical_rank(sample.matrix).rank if sample.matrix.size else 0
    if rank > rank_budget:
        raise InputError(f"perturbation rank {rank} exceeds budget {rank_budget}")
    a = index_by_kernel_stabilization(family, scales, boundary_margin, mass_threshold, edges)
    b = index_by_kernel_stabilization(perturbed, scales, boundary_margin, mass_threshold, edges)
    return PerturbationReport(a, b, rank)
