"""A compact property suite exercised by ``fredholm-lab selftest``."""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import chern, circle, fredholm, schur
from .circle import FourierSymbol, Window
from .groups import FreeHilbertSigns, GroupBall, OrderOracle, free_hilbert, group_toeplitz_index
from .groups.braids import burau, handle_reduce
from .linalg_core import pseudo_inverse


def random_trig_poly(rng: np.random.Generator, bandwidth: int) -> FourierSymbol:
    c = rng.standard_normal(2 * bandwidth + 1) + 1j * rng.standard_normal(2 * bandwidth + 1)
    return FourierSymbol({n: c[n + bandwidth] for n in range(-bandwidth, bandwidth + 1)})


def _leibniz(rng):
    W = Window.symmetric(6)
    worst = max(chern.leibniz_defect(random_trig_poly(rng, 2), random_trig_poly(rng, 2), W) for _ in range(5))
    return worst < 1e-12, f"max defect {worst:.1e}"


def _anticommutation(rng):
    worst = max(chern.anticommutation_defect(random_trig_poly(rng, 3), Window.symmetric(6)) for _ in range(5))
    return worst < 1e-12, f"max defect {worst:.1e}"


def _chern_trace(rng):
    ev = chern.chern_odd(FourierSymbol.monomial(1), 1)
    return abs(ev.raw_trace - 4) < 1e-10 and ev.index == -1, f"trace {ev.raw_trace.real:g}"


def _toeplitz_routes(rng):
    f = FourierSymbol.monomial(3)
    a = fredholm.index_by_winding(f).index
    b = fredholm.index_by_kernel_stabilization(fredholm.pairing_family(f), (32, 64, 128), 8).index
    return a == b == -3, f"winding {a}, stabilization {b}"


def _calderon(rng):
    worst = 0.0
    for _ in range(10):
        T = rng.standard_normal((8, 8)) @ np.diag(rng.integers(0, 2, 8)) @ rng.standard_normal((8, 8))
        rep = fredholm.calderon_index(T, pseudo_inverse(T), 2)
        worst = max(worst, abs(rep.lhs_trace - rep.rhs_trace))
    return worst < 1e-8, f"max |trace difference| {worst:.1e}"


def _schur(rng):
    idx = [schur.schur_index_pairing(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))).index
           for _ in range(5)]
    return all(i == 0 for i in idx), f"indices {idx}"


def _group_z(rng):
    Z = OrderOracle.for_group("Z")
    ok = all(group_toeplitz_index(Z, Z.group.parse(str(k)), [6, 7, 8]).index == -k for k in range(-5, 6))
    return ok, "k in -5..5"


def _braids(rng):
    ok = True
    for _ in range(200):
        w = tuple(rng.choice([1, -1, 2, -2], size=rng.integers(0, 12)).tolist())
        r = handle_reduce(w)
        ok &= burau(r.word) == burau(w)
        ok &= (r.classification == "empty") == (burau(w) == burau(()))
    return bool(ok), "200 random words"


def _free_hilbert(rng):
    signs = FreeHilbertSigns(tuple(rng.choice([-1, 1], 3).tolist()), tuple(rng.choice([-1, 1], 3).tolist()))
    ball = GroupBall.build("F3", 3)
    H = free_hilbert(signs, ball)
    d = np.diag(H @ H).real
    e = ball.position(())
    return bool(d[e] == 0 and np.all(np.delete(d, e) == 1)), signs.format()


CHECKS: dict[str, Callable] = {
    "leibniz": _leibniz,
    "anticommutation": _anticommutation,
    "chern_trace": _chern_trace,
    "toeplitz_routes": _toeplitz_routes,
    "calderon_zero_law": _calderon,
    "schur_pairing_zero": _schur,
    "group_index_z": _group_z,
    "handle_reduction_vs_burau": _braids,
    "free_hilbert_square": _free_hilbert,
}


def run_selftest(seed: int = 0, mapper: Callable = lambda f, xs: [f(x) for x in xs]) -> list[dict]:
    def one(item):
        i, (name, fn) = item
        passed, detail = fn(np.random.default_rng([seed, i]))
        return {"name": name, "passed": bool(passed), "detail": detail}

    return mapper(one, list(enumerate(CHECKS.items())))
