"""The three-strand braid group: handle reduction and the reduced Burau representation.

Letters are signed integers: +1/-1 for sigma_1^{+-1}, +2/-2 for sigma_2^{+-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import InputError, RouteDisagreement, StepBudgetExceeded
from .laurent import IDENTITY, ONE, ZERO, Laurent, Mat2, matmul

DEFAULT_STEP_BUDGET = 10**6

EMPTY = "empty"
SIGMA1_POSITIVE = "sigma1_positive"
SIGMA1_NEGATIVE = "sigma1_negative"
SIGMA2_ONLY_POSITIVE = "sigma2_only_positive"
SIGMA2_ONLY_NEGATIVE = "sigma2_only_negative"

_SIGN = {
    EMPTY: 0,
    SIGMA1_POSITIVE: 1,
    SIGMA2_ONLY_POSITIVE: 1,
    SIGMA1_NEGATIVE: -1,
    SIGMA2_ONLY_NEGATIVE: -1,
}


def free_reduce(letters: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(letters))


def _check_b3(letters: Sequence[int]) -> None:
    bad = [x for x in letters if x not in (1, -1, 2, -2)]
    if bad:
        raise InputError(f"B3 letters must be +-1 or +-2, got {bad[0]}")


@dataclass(frozen=True)
class HandleReduction:
    word: tuple[int, ...]
    classification: str
    steps: int

    @property
    def sign(self) -> int:
        return _SIGN[self.classification]


def _leftmost_handle(w: Sequence[int]) -> tuple[int, int] | None:
    prev = -1
    for idx, x in enumerate(w):
        if x == 1 or x == -1:
            if prev >= 0 and w[prev] == -x:
                return prev, idx
            prev = idx
    return None


def handle_reduce(letters: Sequence[int], budget: int = DEFAULT_STEP_BUDGET) -> HandleReduction:
    """Remove sigma_1-handles until the word is empty, sigma_1-signed or sigma_1-free."""
    _check_b3(letters)
    original = tuple(letters)
    w = free_reduce(letters)
    steps = 0
    while True:
        h = _leftmost_handle(w)
        if h is None:
            break
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(original, steps)
        i, j = h
        e = 1 if w[i] > 0 else -1
        repl: list[int] = []
        for d in w[i + 1 : j]:  # sigma_2 letters, all of one sign after free reduction
            repl += [-2 * e, 1 if d > 0 else -1, 2 * e]
        w = free_reduce(w[:i] + tuple(repl) + w[j + 1 :])
    return HandleReduction(w, _classify(w), steps)


def _classify(w: Sequence[int]) -> str:
    if not w:
        return EMPTY
    ones = [x for x in w if abs(x) == 1]
    if ones:
        return SIGMA1_POSITIVE if ones[0] > 0 else SIGMA1_NEGATIVE
    return SIGMA2_ONLY_POSITIVE if w[0] > 0 else SIGMA2_ONLY_NEGATIVE


# ------------------------------------------------------------------ Burau

_T = Laurent.monomial(1)
_MT = Laurent.monomial(1, -1)
_TI = Laurent.monomial(-1)
_MTI = Laurent.monomial(-1, -1)

BURAU_GENERATORS: dict[int, Mat2] = {
    1: (_MT, ONE, ZERO, ONE),
    -1: (_MTI, _TI, ZERO, ONE),
    2: (ONE, ZERO, _T, _MT),
    -2: (ONE, ZERO, ONE, _MTI),
}


def burau(letters: Sequence[int]) -> Mat2:
    """Reduced Burau matrix over Z[t, t^-1]; faithful on B3."""
    _check_b3(letters)
    M = IDENTITY
    for x in letters:
        M = matmul(M, BURAU_GENERATORS[x])
    return M


def burau_equal(w1: Sequence[int], w2: Sequence[int]) -> bool:
    return burau(w1) == burau(w2)


def braid_equal(w1: Sequence[int], w2: Sequence[int], budget: int = DEFAULT_STEP_BUDGET) -> bool:
    """Word problem decided by handle reduction and by Burau; they must agree."""
    by_handles = handle_reduce(tuple(w1) + inverse(w2), budget).classification == EMPTY
    by_burau = burau_equal(w1, w2)
    if by_handles != by_burau:
        raise RouteDisagreement(
            f"handle reduction says {by_handles}, Burau says {by_burau} for {tuple(w1)} vs {tuple(w2)}"
        )
    return by_handles
