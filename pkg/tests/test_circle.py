import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fredholm_lab import circle
from fredholm_lab.circle import FourierSymbol, Window, WindowedOperator, parse_symbol
from fredholm_lab.errors import InputError, VanishingSymbolError
from fredholm_lab.linalg_core import numerical_rank


def random_symbol(rng, bandwidth):
    c = rng.standard_normal(2 * bandwidth + 1) + 1j * rng.standard_normal(2 * bandwidth + 1)
    return FourierSymbol({n: c[n + bandwidth] for n in range(-bandwidth, bandwidth + 1)})


def test_window_basics():
    W = Window.symmetric(3)
    assert W.size == 7
    assert list(W.frequencies()) == [-3, -2, -1, 0, 1, 2, 3]
    assert W.expand(2) == Window(-5, 5)
    assert W.position(0) == 3
    with pytest.raises(InputError):
        Window(2, 1)
    with pytest.raises(InputError):
        W.position(9)


@pytest.mark.parametrize(
    "text, coeffs",
    [
        ("z^3", {3: 1}),
        ("z^-1+0.1", {-1: 1, 0: 0.1}),
        ("(1+2i)*z^2 - 3i", {2: 1 + 2j, 0: -3j}),
        ("2z^2", {2: 2}),
        ("z^(-2)", {-2: 1}),
        ("i*z", {1: 1j}),
        ("1", {0: 1}),
        ("3*z + z^2", {1: 3, 2: 1}),
    ],
)
def test_parse_symbol(text, coeffs):
    assert parse_symbol(text).coefficients == pytest.approx(coeffs)


@pytest.mark.parametrize("bad", ["", "zz", "z^", "3*", "w^2", "1 2"])
def test_parse_symbol_rejects(bad):
    with pytest.raises(InputError):
        parse_symbol(bad)


def test_symbol_round_trips():
    f = parse_symbol("(1+2i)*z^2 - 3i + 0.5*z^-4")
    assert parse_symbol(f.format()) == f
    assert FourierSymbol.from_json(f.to_json()) == f


def test_symbol_arithmetic_matches_pointwise():
    rng = np.random.default_rng(0)
    f, g = random_symbol(rng, 2), random_symbol(rng, 3)
    theta = np.linspace(0, 2 * np.pi, 50)
    assert np.allclose((f * g)(theta), f(theta) * g(theta))
    assert np.allclose((f + g)(theta), f(theta) + g(theta))
    assert np.allclose((f - g)(theta), f(theta) - g(theta))
    assert (f * g).bandwidth == 5


def test_hilbert_multiplier_example():
    H = circle.hilbert_transform(Window.symmetric(4))
    expected = [-1j * np.sign(n) for n in range(-4, 5)]
    assert np.array_equal(np.diag(H.matrix), expected)
    assert H.matrix[4, 4] == 0


def test_multiplier_examples():
    W = Window.symmetric(2)
    assert np.array_equal(circle.multiplier(lambda n: 1, W).matrix, np.eye(5))
    assert np.array_equal(np.diag(circle.dirac(W).matrix), [-2, -1, 0, 1, 2])


@pytest.mark.parametrize("n", [1, 4, 9])
def test_f_squares_to_identity_and_projections(n):
    W = Window.symmetric(n)
    F = circle.f_operator(W).matrix
    H = circle.hilbert_transform(W).matrix
    E = circle.mean_projection(W).matrix
    P = circle.riesz_projection(W).matrix
    assert np.array_equal(F @ F, np.eye(W.size))
    assert np.array_equal(1j * H + E, F)
    assert np.array_equal(H @ E, 0 * E) and np.array_equal(E @ H, 0 * E)
    assert np.array_equal(P @ P, P)
    assert np.array_equal((np.eye(W.size) + F) / 2, P)
    assert np.array_equal(circle.sign_of_dirac(W).matrix + E, F)


def test_riesz_projection_examples():
    P = circle.riesz_projection(Window.symmetric(4))
    assert not P.apply_basis(-3).any()
    e2 = P.apply_basis(2)
    assert e2[Window.symmetric(4).position(2)] == 1 and np.count_nonzero(e2) == 1


def test_multiplication_operator_examples():
    W = Window.symmetric(2)
    one = circle.multiplication_operator(FourierSymbol.constant(1), W)
    assert one.out_window == W and np.array_equal(one.matrix, np.eye(5))
    z = circle.multiplication_operator(FourierSymbol.monomial(1), W)
    assert z.out_window == Window.symmetric(3)
    for n in W.frequencies():
        col = z.apply_basis(n)
        assert col[z.out_window.position(n + 1)] == 1 and np.count_nonzero(col) == 1
    g = circle.multiplication_operator(parse_symbol("2+z"), W)
    for n in W.frequencies():
        col = g.apply_basis(n)
        assert col[g.out_window.position(n)] == 2
        assert col[g.out_window.position(n + 1)] == 1
        assert np.count_nonzero(col) == 2


def test_compose_checks_windows():
    W = Window.symmetric(2)
    A = circle.multiplication_operator(FourierSymbol.monomial(1), W)
    with pytest.raises(InputError):
        A @ A
    B = circle.multiplication_operator(FourierSymbol.monomial(1), A.out_window)
    assert (B @ A).out_window == Window.symmetric(4)


def test_matrix_is_read_only():
    A = circle.identity(Window.symmetric(1))
    with pytest.raises(ValueError):
        A.matrix[0, 0] = 5


def test_commutator_with_F_for_z():
    C = circle.commutator_with_F(FourierSymbol.monomial(1), Window.symmetric(5))
    nz = np.argwhere(C.matrix)
    assert len(nz) == 1
    row, col = nz[0]
    assert C.in_window.frequencies()[col] == -1
    assert C.out_window.frequencies()[row] == 0
    assert C.matrix[row, col] == 2


def test_commutator_with_constant_vanishes():
    C = circle.commutator_with_F(FourierSymbol.constant(3 - 1j), Window.symmetric(4))
    assert not C.matrix.any()


def test_rank_of_ih_commutator_with_z_is_two():
    # symbol of iH is sgn(n) with sgn(0) = 0, so it jumps twice: -1 -> 0 -> 1
    for n in (2, 5, 10):
        W = Window.symmetric(n)
        Mz = circle.multiplication_operator(FourierSymbol.monomial(1), W)
        iH_out = circle.hilbert_transform(Mz.out_window).scale(1j)
        iH_in = circle.hilbert_transform(W).scale(1j)
        C = iH_out @ Mz - Mz @ iH_in
        assert numerical_rank(C.matrix).rank == 2


def test_commutator_rank_bound_and_window_independence():
    rng = np.random.default_rng(1)
    for b in (1, 2, 3):
        f = random_symbol(rng, b)
        small = circle.commutator_with_F(f, Window.symmetric(3 * b))
        large = circle.commutator_with_F(f, Window.symmetric(6 * b))
        assert numerical_rank(large.matrix).rank <= 2 * b + 1
        embedded = large.restrict(small.in_window, small.out_window)
        assert np.allclose(embedded.matrix, small.matrix)


@pytest.mark.parametrize(
    "text, expected",
    [("z^3", 3), ("2+z", 0), ("z+2*z^2", 2), ("z^-1+0.1", -1), ("1", 0)],
)
def test_winding_examples(text, expected):
    assert circle.winding_number(parse_symbol(text)).winding == expected


def test_winding_refuses_vanishing_symbol():
    with pytest.raises(VanishingSymbolError):
        circle.winding_number(parse_symbol("1+z"))


def test_winding_multiplicative():
    rng = np.random.default_rng(2)
    checked = 0
    while checked < 50:
        f, g = random_symbol(rng, 2), random_symbol(rng, 2)
        theta = np.linspace(0, 2 * np.pi, 4096)
        if min(np.abs(f(theta)).min(), np.abs(g(theta)).min()) < 0.05:
            continue
        wf, wg = circle.winding_number(f).winding, circle.winding_number(g).winding
        assert circle.winding_number(f * g).winding == wf + wg
        checked += 1


def test_fourier_inverse():
    f = parse_symbol("3+z")
    g = circle.fourier_inverse(f)
    theta = np.linspace(0, 2 * np.pi, 999)
    assert np.max(np.abs(f(theta) * g(theta) - 1)) < 1e-10
    assert circle.fourier_inverse(FourierSymbol.monomial(2, 2.0)) == FourierSymbol.monomial(-2, 0.5)


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.integers(-4, 4), st.complex_numbers(max_magnitude=5, allow_nan=False), max_size=4))
def test_multiplication_matches_convolution(coeffs):
    f = FourierSymbol(coeffs)
    W = Window.symmetric(3)
    M = circle.multiplication_operator(f, W)
    x = np.arange(W.size) + 1j
    y = M.matrix @ x
    # entry (m, n) = c_{m-n}: compare to direct convolution of coefficient arrays
    b = f.bandwidth
    c = np.array([f[k] for k in range(-b, b + 1)])
    assert np.allclose(y, np.convolve(c, x))
