"""Quantized differentials da = [F, a] and Chern-character pairings on the circle model.

Traces are taken over an interior window after building every factor on its
own widened window, so for trigonometric polynomials the traced entries are
exact (no truncation edge ever reaches them).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import circle
from .circle import FourierSymbol, Window, WindowedOperator
from .errors import HypothesisViolation, InputError
from .fredholm import (
    _as_symbol_matrix,
    even_pairing_operator,
    exact_index,
    index_by_kernel_stabilization,
    symbol_matrix_bandwidth,
)

FFactory = Callable[[Window, float], WindowedOperator]


@dataclass
class ChernEvaluation:
    n: int
    raw_trace: complex
    normalization: float
    predicted_index: complex
    c_n_convention: int = 1
    interior: tuple[int, int] | None = None

    @property
    def index(self) -> int | None:
        """Nearest integer when the prediction is within 1e-6 of one."""
        k = round(self.predicted_index.real)
        if abs(self.predicted_index - k) < 1e-6:
            return int(k)
        return None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "raw_trace": [self.raw_trace.real, self.raw_trace.imag],
            "normalization": self.normalization,
            "predicted_index": [self.predicted_index.real, self.predicted_index.imag],
            "index": self.index,
            "c_n_convention": self.c_n_convention,
            "interior": list(self.interior) if self.interior else None,
        }


def quantized_differential(a: FourierSymbol, window: Window, p: float = 2.0,
                           F: FFactory = circle.f_operator) -> WindowedOperator:
    """da = [F, M_a] from ``window`` into ``window`` widened by the bandwidth of a."""
    Ma = circle.multiplication_operator(a, window, p)
    return F(Ma.out_window, p) @ Ma - Ma @ F(window, p)


def _check_involution(F: FFactory, window: Window, p: float) -> None:
    Fw = F(window, p)
    if np.max(np.abs(Fw.matrix @ Fw.matrix - np.eye(window.size))) > 1e-12:
        raise HypothesisViolation("F^2 != Id on the interior window")


def chern_odd(u: FourierSymbol, n: int = 1, u_inv: FourierSymbol | None = None,
              p: float = 2.0, F: FFactory = circle.f_operator,
              interior: Window | None = None) -> ChernEvaluation:
    """(-1)^N / 4^N tr(F (du^{-1} du)^N) with N = (n+1)/2 and c_n = 1."""
    if n < 1 or n % 2 == 0:
        raise InputError(f"odd Chern character needs odd n >= 1, got {n}")
    if u_inv is None:
        u_inv = circle.fourier_inverse(u)
    residual = _sup_residual(u * u_inv)
    if residual > 1e-10:
        raise HypothesisViolation(f"u * u_inv differs from 1 by {residual:.2e}")
    N = (n + 1) // 2
    margin = (n + 1) * (u.bandwidth + u_inv.bandwidth)
    W = interior or Window.symmetric(max(margin, 1))
    _check_involution(F, W, p)

    prod = circle.identity(W, p)
    for _ in range(N):
        prod = _pair_step(u, u_inv, prod, p, F)
    full = F(prod.out_window, p) @ prod
    raw = complex(np.trace(full.restrict(W, W).matrix))
    norm = (-1) ** N / 4 ** N
    return ChernEvaluation(n, raw, norm, norm * raw, 1, (W.lo, W.hi))


def _pair_step(u, u_inv, prod: WindowedOperator, p, F) -> WindowedOperator:
    du = quantized_differential(u, prod.out_window, p, F)
    du_inv = quantized_differential(u_inv, du.out_window, p, F)
    return du_inv @ du @ prod


def _sup_residual(g: FourierSymbol) -> float:
    theta = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    return float(np.max(np.abs(g(theta) - 1)))


# ---------------------------------------------------------------- even case


@dataclass(frozen=True)
class DoubledModule:
    """(X + X, [[0, F], [F, 0]], diag(-Id, Id)) built from an odd module on the circle."""

    F: FFactory = circle.f_operator
    p: float = 2.0

    def F_prime(self, window: Window, k: int = 1) -> np.ndarray:
        Fk = np.kron(np.eye(k), self.F(window, self.p).matrix)
        return np.kron(np.array([[0, 1], [1, 0]]), Fk)

    def gamma(self, window: Window, k: int = 1) -> np.ndarray:
        return np.kron(np.diag([-1.0, 1.0]), np.eye(k * window.size))

    def represent(self, e, window: Window) -> tuple[np.ndarray, Window]:
        rows = _as_symbol_matrix(e)
        k = len(rows)
        out = window.expand(symbol_matrix_bandwidth(rows))
        blocks = [[circle.multiplication_operator(s, window, self.p).embed(window, out).matrix
                   for s in row] for row in rows]
        return np.kron(np.eye(2), np.block(blocks)), out

    def F_plus(self, window: Window) -> WindowedOperator:
        return self.F(window, self.p)


def _select_rows(M: np.ndarray, groups: int, outer: Window, inner: Window) -> np.ndarray:
    off = inner.lo - outer.lo
    idx = np.concatenate([g * outer.size + off + np.arange(inner.size) for g in range(groups)])
    return M[idx]


def check_grading(module: DoubledModule, e, window: Window) -> None:
    """gamma^2 = Id, F gamma = -gamma F and [pi(e), gamma] = 0 on the window."""
    k = len(_as_symbol_matrix(e))
    G = module.gamma(window, k)
    Fp = module.F_prime(window, k)
    if np.max(np.abs(G @ G - np.eye(G.shape[0]))) > 1e-12:
        raise HypothesisViolation("gamma^2 != Id")
    if np.max(np.abs(Fp @ G + G @ Fp)) > 1e-12:
        raise HypothesisViolation("F gamma != -gamma F")
    E, out = module.represent(e, window)
    Gout = module.gamma(out, k)
    if np.max(np.abs(E @ G - Gout @ E)) > 1e-12:
        raise HypothesisViolation("pi(e) does not commute with gamma")


def chern_even(module: DoubledModule, e, n: int = 0, interior: Window | None = None) -> ChernEvaluation:
    """(-1)^{n/2} / 2 tr(gamma F (de)^{n+1}) with c_n = 1."""
    if n < 0 or n % 2:
        raise InputError(f"even Chern character needs even n >= 0, got {n}")
    rows = _as_symbol_matrix(e)
    k = len(rows)
    sq = [[sum((rows[i][l] * rows[l][j] for l in range(k)), FourierSymbol()) for j in range(k)] for i in range(k)]
    if any(abs(c) > 1e-10 for i in range(k) for j in range(k) for c in (sq[i][j] - rows[i][j]).coefficients.values()):
        raise HypothesisViolation("e is not idempotent")
    b = symbol_matrix_bandwidth(rows)
    W = interior or Window.symmetric(max((n + 1) * b, 1))
    check_grading(module, e, W)
    _check_involution(module.F, W, module.p)

    prod = np.eye(2 * k * W.size, dtype=complex)
    cur = W
    for _ in range(n + 1):
        E, out = module.represent(rows, cur)
        de = module.F_prime(out, k) @ E - E @ module.F_prime(cur, k)
        prod = de @ prod
        cur = out
    full = module.gamma(cur, k) @ module.F_prime(cur, k) @ prod
    raw = complex(np.trace(_select_rows(full, 2 * k, cur, W)))
    norm = (-1) ** (n // 2) / 2
    return ChernEvaluation(n, raw, norm, norm * raw, 1, (W.lo, W.hi))


def even_pairing_index(module: DoubledModule, e, scales=(16, 32, 64), boundary_margin: int | None = None):
    """Index of e (Id tensor F_+) e: exact for constant e, finite-section route otherwise."""
    rows = _as_symbol_matrix(e)
    b = symbol_matrix_bandwidth(rows)
    if b == 0:
        E = np.array([[s[0] for s in row] for row in rows])
        op = even_pairing_operator(E, module.F_plus(Window.symmetric(scales[0])))
        if op.matrix.size == 0:
            return 0
        return exact_index(op.matrix)[2]
    margin = boundary_margin if boundary_margin is not None else max(2, 4 * b)

    def family(N):
        return even_pairing_operator(rows, module.F_plus(Window.symmetric(N)))

    return index_by_kernel_stabilization(family, scales, margin).index


def leibniz_defect(a: FourierSymbol, b: FourierSymbol, window: Window, p: float = 2.0,
                   F: FFactory = circle.f_operator) -> float:
    """max |d(ab) - a db - da b| over the matrix entries on ``window``."""
    dab = quantized_differential(a * b, window, p, F)
    db = quantized_differential(b, window, p, F)
    a_db = circle.multiplication_operator(a, db.out_window, p) @ db
    Mb = circle.multiplication_operator(b, window, p)
    da_b = quantized_differential(a, Mb.out_window, p, F) @ Mb
    out = dab.out_window
    diff = dab.matrix - a_db.embed(window, out).matrix - da_b.embed(window, out).matrix
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def anticommutation_defect(a: FourierSymbol, window: Window, p: float = 2.0,
                           F: FFactory = circle.f_operator) -> float:
    """max |F da + da F| on ``window``."""
    da = quantized_differential(a, window, p, F)
    left = F(da.out_window, p) @ da
    right = da @ F(window, p)
    return float(np.max(np.abs((left + right).matrix)))
