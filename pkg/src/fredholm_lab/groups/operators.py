"""Sign multipliers, commutators, combinatorial Toeplitz indices and the free Hilbert transform."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..errors import InputError
from ..fredholm import NON_STABILIZING, IndexReport
from ..linalg_core import numerical_rank
from .balls import GroupBall
from .braids import inverse
from .core import BraidGroup3, FreeGroup, GroupWord, OrderOracle


def _letters(t) -> tuple[int, ...]:
    return t.letters if isinstance(t, GroupWord) else tuple(t)


def group_f_operator(oracle: OrderOracle, ball: GroupBall) -> np.ndarray:
    """diag(phi_s) with phi_s = 1 if e <= s and -1 if s < e."""
    phi = [1.0 if oracle.sign(s) >= 0 else -1.0 for s in ball.elements]
    return np.diag(phi).astype(complex)


@dataclass
class CommutatorReport:
    matrix: sp.csc_matrix
    rank: int
    svd_rank: int
    coefficients: dict[str, int]
    in_size: int
    out_size: int

    @property
    def monomial(self) -> bool:
        return bool(np.all(np.diff(self.matrix.indptr) <= 1))

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "svd_rank": self.svd_rank,
            "coefficients": dict(sorted(self.coefficients.items())),
            "in_size": self.in_size,
            "out_size": self.out_size,
            "monomial": self.monomial,
        }


def _coef_label(c: complex) -> str:
    re_, im = int(round(c.real)), int(round(c.imag))
    if im == 0:
        return str(re_)
    if re_ == 0:
        return f"{im}i"
    return f"{re_}{im:+d}i"


def _left_translation_report(ball: GroupBall, t: Sequence[int], coef) -> CommutatorReport:
    out = GroupBall.build(ball.group, ball.radius + len(t), verify=False)
    rows, cols, vals = [], [], []
    for j, s in enumerate(ball.elements):
        ts = tuple(t) + s
        c = coef(s, ts)
        if c != 0:
            rows.append(out.position(ts))
            cols.append(j)
            vals.append(complex(c))
    M = sp.csc_matrix((vals, (rows, cols)), shape=(len(out), len(ball)), dtype=complex)
    M.eliminate_zeros()
    counts = Counter(_coef_label(c) for c in M.data)
    nnz_cols = int(np.count_nonzero(np.diff(M.indptr)))
    # brute-force rank on the nonzero block only
    r_idx = np.unique(M.indices)
    c_idx = np.flatnonzero(np.diff(M.indptr))
    block = M[r_idx][:, c_idx].toarray() if nnz_cols else np.zeros((0, 0))
    svd_rank = numerical_rank(block).rank if nnz_cols else 0
    return CommutatorReport(M, nnz_cols, svd_rank, dict(counts), len(ball), len(out))


def commutator_report(oracle: OrderOracle, ball: GroupBall, t) -> CommutatorReport:
    """[H, M_{lambda_t}] with H lambda_s = -i sgn(s) lambda_s; lambda_s -> i(sgn(s) - sgn(ts)) lambda_ts."""
    t = _letters(t)

    def coef(s, ts):
        return 1j * (oracle.sign(s) - oracle.sign(ts))

    return _left_translation_report(ball, t, coef)


def _count_row(oracle: OrderOracle, ball: GroupBall, g: Sequence[int], radius: int) -> tuple[int, int]:
    ker = coker = 0
    g_inv = inverse(g)
    for i in ball.within(radius):
        s = ball.elements[i]
        if oracle.sign(s) < 0:
            continue
        if oracle.sign(tuple(g) + s) < 0:
            ker += 1
        if oracle.sign(g_inv + s) < 0:
            coker += 1
    return ker, coker


def group_toeplitz_index(oracle: OrderOracle, g, radii: Sequence[int]) -> IndexReport:
    """Count kernel and cokernel witnesses of T_{lambda_g} on growing balls."""
    g = _letters(g)
    radii = [int(r) for r in radii]
    if len(radii) < 3 or any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] < 0:
        raise InputError("radii must be at least three increasing nonnegative integers")
    ball = GroupBall.build(oracle.group, radii[-1])
    rows = []
    for r in radii:
        ker, coker = _count_row(oracle, ball, g, r)
        rows.append({"radius": r, "ball_size": len(ball.within(r)), "kernel": ker,
                     "cokernel": coker, "index": ker - coker})
    tail = rows[-3:]
    stable = all((x["kernel"], x["cokernel"]) == (tail[0]["kernel"], tail[0]["cokernel"]) for x in tail)
    index = tail[0]["index"] if stable else NON_STABILIZING
    tol = {"radii": radii}
    if isinstance(oracle.group, BraidGroup3):
        tol["words_cross_checked"] = oracle.group.words_checked
    return IndexReport(index, "combinatorial", rows, tol)


# --------------------------------------------------------- free Hilbert


@dataclass(frozen=True)
class FreeHilbertSigns:
    """plus[n-1] is the sign for words starting with g_n, minus[n-1] for g_n^-1."""

    plus: tuple[int, ...]
    minus: tuple[int, ...]

    def __post_init__(self):
        if len(self.plus) != len(self.minus):
            raise InputError("plus and minus sign lists must have equal length")
        if any(x not in (-1, 1) for x in self.plus + self.minus):
            raise InputError("free Hilbert signs must be -1 or +1")

    @property
    def rank(self) -> int:
        return len(self.plus)

    def epsilon(self, word: Sequence[int]) -> int:
        if not word:
            return 0
        x = word[0]
        if abs(x) > self.rank:
            raise InputError(f"no sign defined for generator {abs(x)}")
        return self.plus[x - 1] if x > 0 else self.minus[-x - 1]

    @classmethod
    def parse(cls, text: str) -> "FreeHilbertSigns":
        """'+-,++' style: one comma-separated pair per generator."""
        plus, minus = [], []
        for pair in text.split(","):
            pair = pair.strip()
            if len(pair) != 2 or any(c not in "+-" for c in pair):
                raise InputError(f"sign pair {pair!r} must be two of '+' / '-'")
            plus.append(1 if pair[0] == "+" else -1)
            minus.append(1 if pair[1] == "+" else -1)
        return cls(tuple(plus), tuple(minus))

    def format(self) -> str:
        ch = {1: "+", -1: "-"}
        return ",".join(ch[a] + ch[b] for a, b in zip(self.plus, self.minus))


def _check_free(ball: GroupBall, signs: FreeHilbertSigns) -> None:
    if not isinstance(ball.group, FreeGroup):
        raise InputError("the free Hilbert transform needs a free-group ball")
    if signs.rank < ball.group.rank:
        raise InputError(f"signs given for {signs.rank} generators, group has {ball.group.rank}")


def free_hilbert(signs: FreeHilbertSigns, ball: GroupBall) -> np.ndarray:
    _check_free(ball, signs)
    return np.diag([float(signs.epsilon(s)) for s in ball.elements]).astype(complex)


def free_hilbert_commutator(signs: FreeHilbertSigns, ball: GroupBall, t) -> CommutatorReport:
    """lambda_s -> (eps(ts) - eps(s)) lambda_ts on reduced words."""
    _check_free(ball, signs)
    t = ball.group.normal_form(_letters(t))
    G = ball.group

    def coef(s, ts):
        return signs.epsilon(G.normal_form(ts)) - signs.epsilon(s)

    return _left_translation_report(ball, t, coef)
