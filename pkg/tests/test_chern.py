import numpy as np
import pytest

from fredholm_lab import chern, circle
from fredholm_lab.chern import DoubledModule, chern_even, chern_odd, quantized_differential
from fredholm_lab.circle import FourierSymbol, Window, parse_symbol
from fredholm_lab.errors import HypothesisViolation, InputError
from fredholm_lab.fredholm import index_by_winding
from fredholm_lab.selftest import random_trig_poly


def test_differential_of_constant_vanishes():
    d = quantized_differential(FourierSymbol.constant(2 + 1j), Window.symmetric(5))
    assert not d.matrix.any()


def test_differential_of_z_is_rank_one():
    d = quantized_differential(FourierSymbol.monomial(1), Window.symmetric(4))
    nz = np.argwhere(d.matrix)
    assert len(nz) == 1
    r, c = nz[0]
    assert d.in_window.frequencies()[c] == -1 and d.out_window.frequencies()[r] == 0
    assert d.matrix[r, c] == 2


def test_differential_of_z_inverse():
    d = quantized_differential(FourierSymbol.monomial(-1), Window.symmetric(4))
    nz = np.argwhere(d.matrix)
    assert len(nz) == 1
    r, c = nz[0]
    assert d.in_window.frequencies()[c] == 0 and d.out_window.frequencies()[r] == -1
    assert d.matrix[r, c] == -2


def test_leibniz_on_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(25):
        a = random_trig_poly(rng, int(rng.integers(0, 4)))
        b = random_trig_poly(rng, int(rng.integers(0, 4)))
        assert chern.leibniz_defect(a, b, Window.symmetric(6)) < 1e-12


def test_anticommutation():
    rng = np.random.default_rng(1)
    for _ in range(10):
        assert chern.anticommutation_defect(random_trig_poly(rng, 3), Window.symmetric(7)) == 0


def test_trace_cyclicity_with_finite_rank_differential():
    rng = np.random.default_rng(2)
    a = random_trig_poly(rng, 2)
    W = Window.symmetric(10)
    da = quantized_differential(a, W).restrict(W, W).matrix
    T = rng.standard_normal((W.size, W.size)) + 1j * rng.standard_normal((W.size, W.size))
    assert abs(np.trace(da @ T) - np.trace(T @ da)) < 1e-10


def test_chern_odd_for_z_has_trace_four():
    ev = chern_odd(FourierSymbol.monomial(1), 1)
    assert abs(ev.raw_trace - 4) < 1e-12
    assert ev.normalization == -0.25
    assert ev.index == -1
    assert ev.to_dict()["c_n_convention"] == 1


def test_chern_odd_trivial_unitary():
    ev = chern_odd(FourierSymbol.constant(1), 1)
    assert ev.raw_trace == 0 and ev.index == 0


@pytest.mark.parametrize("k", [1, 2, 3, -1, -2])
@pytest.mark.parametrize("n", [1, 3])
def test_chern_odd_matches_winding(k, n):
    u = FourierSymbol.monomial(k)
    assert chern_odd(u, n).index == index_by_winding(u).index == -k


def test_chern_odd_with_z2_on_window_eight():
    ev = chern_odd(FourierSymbol.monomial(2), 1, interior=Window.symmetric(8))
    assert ev.index == -2


@pytest.mark.parametrize("text", ["3+z", "z^-1+0.1", "z + 0.2*z^-1"])
def test_chern_odd_for_non_monomials(text):
    u = parse_symbol(text)
    ev = chern_odd(u, 1)
    assert ev.index == index_by_winding(u).index


def test_chern_odd_rejects_bad_inverse_and_even_n():
    u = FourierSymbol.monomial(1)
    with pytest.raises(HypothesisViolation):
        chern_odd(u, 1, u_inv=FourierSymbol.monomial(1))
    with pytest.raises(InputError):
        chern_odd(u, 2)


def test_chern_odd_rejects_non_involution():
    def half_F(window, p):
        return circle.f_operator(window, p).scale(0.5)

    with pytest.raises(HypothesisViolation):
        chern_odd(FourierSymbol.monomial(1), 1, F=half_F)


def _bott_projection():
    h = FourierSymbol.constant(0.5)
    return [[h, FourierSymbol.monomial(-1, 0.5)], [FourierSymbol.monomial(1, 0.5), h]]


def test_chern_even_degenerate_idempotents():
    m = DoubledModule()
    zero = [[FourierSymbol.constant(0)]]
    one = [[FourierSymbol.constant(1)]]
    assert chern_even(m, zero, 0).index == 0
    assert chern_even(m, one, 0).index == 0
    assert chern.even_pairing_index(m, one) == 0
    assert chern.even_pairing_index(m, zero) == 0


@pytest.mark.parametrize("n", [0, 2])
def test_chern_even_bott_projection_matches_even_route(n):
    m = DoubledModule()
    e = _bott_projection()
    ev = chern_even(m, e, n)
    assert ev.index is not None
    assert ev.index == chern.even_pairing_index(m, e)


def test_chern_even_rejects_non_idempotent():
    with pytest.raises(HypothesisViolation):
        chern_even(DoubledModule(), [[FourierSymbol.monomial(1)]], 0)
    with pytest.raises(InputError):
        chern_even(DoubledModule(), _bott_projection(), 1)


def test_grading_relations_hold_for_doubled_module():
    m = DoubledModule()
    chern.check_grading(m, _bott_projection(), Window.symmetric(3))
