"""Truncated Fourier model of L^p(T).

Operators act on finite windows of frequencies ``lo..hi``.  Multiplication
by a trigonometric polynomial maps a window into the window widened by the
symbol's bandwidth, so products and commutators built here contain no
truncation error; only `WindowedOperator.restrict` discards entries.
"""

from __future__ import annotations

import cmath
import json
import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import InputError, NumericalRefusal, VanishingSymbolError


@dataclass(frozen=True)
class Window:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise InputError(f"empty window [{self.lo}, {self.hi}]")

    @classmethod
    def symmetric(cls, n: int) -> "Window":
        return cls(-n, n)

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def frequencies(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def expand(self, by: int) -> "Window":
        return Window(self.lo - by, self.hi + by)

    def contains(self, other: "Window | int") -> bool:
        if isinstance(other, Window):
            return self.lo <= other.lo and other.hi <= self.hi
        return self.lo <= other <= self.hi

    def position(self, n: int) -> int:
        if not self.contains(n):
            raise InputError(f"frequency {n} outside window [{self.lo}, {self.hi}]")
        return n - self.lo


class FourierSymbol:
    """Trigonometric polynomial sum c_n e^{in theta} with finite support."""

    __slots__ = ("_coeffs",)

    def __init__(self, coefficients: Mapping[int, complex] | None = None):
        coeffs = {}
        for n, c in (coefficients or {}).items():
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise InputError(f"non-finite coefficient at frequency {n}")
            if c != 0:
                coeffs[int(n)] = c
        self._coeffs = dict(sorted(coeffs.items()))

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "FourierSymbol":
        return cls({k: c})

    @classmethod
    def constant(cls, c: complex) -> "FourierSymbol":
        return cls({0: c})

    @property
    def coefficients(self) -> dict[int, complex]:
        return dict(self._coeffs)

    @property
    def bandwidth(self) -> int:
        return max((abs(n) for n in self._coeffs), default=0)

    def __getitem__(self, n: int) -> complex:
        return self._coeffs.get(n, 0j)

    def __eq__(self, other):
        return isinstance(other, FourierSymbol) and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(tuple(self._coeffs.items()))

    def __repr__(self):
        return f"FourierSymbol({self._coeffs})"

    def __add__(self, other: "FourierSymbol | complex") -> "FourierSymbol":
        other = _as_symbol(other)
        out = dict(self._coeffs)
        for n, c in other._coeffs.items():
            out[n] = out.get(n, 0) + c
        return FourierSymbol(out)

    __radd__ = __add__

    def __neg__(self):
        return FourierSymbol({n: -c for n, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-_as_symbol(other))

    def __rsub__(self, other):
        return _as_symbol(other) - self

    def __mul__(self, other: "FourierSymbol | complex") -> "FourierSymbol":
        other = _as_symbol(other)
        out: dict[int, complex] = {}
        for n, c in self._coeffs.items():
            for m, d in other._coeffs.items():
                out[n + m] = out.get(n + m, 0) + c * d
        return FourierSymbol(out)

    __rmul__ = __mul__

    def conj_reflect(self) -> "FourierSymbol":
        """The pointwise complex conjugate on the circle."""
        return FourierSymbol({-n: c.conjugate() for n, c in self._coeffs.items()})

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for n, c in self._coeffs.items():
            out += c * np.exp(1j * n * theta)
        return out

    def derivative(self) -> "FourierSymbol":
        """d/dtheta."""
        return FourierSymbol({n: 1j * n * c for n, c in self._coeffs.items()})

    def to_json(self) -> dict[str, list[float]]:
        return {str(n): [c.real, c.imag] for n, c in self._coeffs.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, list[float]] | str) -> "FourierSymbol":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls({int(n): complex(v[0], v[1]) for n, v in data.items()})
        except (TypeError, ValueError, IndexError, KeyError) as exc:
            raise InputError(f"bad FourierSymbol JSON: {exc}") from exc

    @classmethod
    def parse(cls, text: str) -> "FourierSymbol":
        return parse_symbol(text)

    def format(self) -> str:
        if not self._coeffs:
            return "0"
        out = ""
        for n, c in self._coeffs.items():
            coef = _format_complex(c)
            term = coef if n == 0 else f"{coef}*z^{n}"
            if not out:
                out = term
            elif term.startswith("-"):
                out += " - " + term[1:]
            else:
                out += " + " + term
        return out


def _format_complex(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    if c.real == 0:
        return f"{c.imag!r}i"
    return f"({c.real!r}{c.imag:+}i)"


def _as_symbol(x) -> FourierSymbol:
    if isinstance(x, FourierSymbol):
        return x
    return FourierSymbol.constant(complex(x))


_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(
    rf"""\s*(?P<sign>[+-]?)\s*
    (?:(?P<coef>\([^()]*\)|{_NUMBER}i?|i)\s*(?P<star>\*)?\s*)?
    (?P<z>z(?:\s*\^\s*(?:\((?P<pexp>[+-]?\d+)\)|(?P<exp>[+-]?\d+)))?)?
    \s*""",
    re.VERBOSE,
)


def _parse_coef(tok: str) -> complex:
    tok = tok.strip()
    if tok.startswith("("):
        tok = tok[1:-1]
    tok = tok.replace(" ", "")
    if tok == "i":
        return 1j
    try:
        return complex(tok.replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"bad complex literal {tok!r}") from exc


def parse_symbol(text: str) -> FourierSymbol:
    """Parse ``"a*z^k + b*z^m + ..."`` with literals like ``1+2i``.

    >>> parse_symbol("z^-1+0.1").coefficients
    {-1: (1+0j), 0: (0.1+0j)}
    """
    if not text or not text.strip():
        raise InputError("empty symbol")
    pos = 0
    out: dict[int, complex] = {}
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or m.end() == pos or (m.group("coef") is None and m.group("z") is None):
            raise InputError(f"cannot parse symbol {text!r} at offset {pos}")
        if not first and not m.group("sign"):
            raise InputError(f"missing operator in symbol {text!r} at offset {pos}")
        if m.group("star") and not m.group("z"):
            raise InputError(f"dangling '*' in symbol {text!r}")
        sign = -1 if m.group("sign") == "-" else 1
        coef = _parse_coef(m.group("coef")) if m.group("coef") else 1.0
        k = 0
        if m.group("z"):
            e = m.group("pexp") or m.group("exp")
            k = int(e) if e is not None else 1
        out[k] = out.get(k, 0) + sign * coef
        pos = m.end()
        first = False
    return FourierSymbol(out)


# ---------------------------------------------------------------- operators


@dataclass(frozen=True, eq=False)
class WindowedOperator:
    """Matrix indexed by (output frequency, input frequency)."""

    matrix: np.ndarray
    in_window: Window
    out_window: Window
    p: float = 2.0

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=complex)
        if M.shape != (self.out_window.size, self.in_window.size):
            raise InputError(
                f"matrix shape {M.shape} does not match windows "
                f"{self.out_window.size}x{self.in_window.size}"
            )
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def is_square(self) -> bool:
        return self.in_window == self.out_window

    def compose(self, other: "WindowedOperator") -> "WindowedOperator":
        """self after other."""
        if other.out_window != self.in_window:
            raise InputError(
                f"cannot compose: inner output {other.out_window} != outer input {self.in_window}"
            )
        return WindowedOperator(self.matrix @ other.matrix, other.in_window, self.out_window, self.p)

    def __matmul__(self, other):
        return self.compose(other)

    def _same_windows(self, other: "WindowedOperator"):
        if self.in_window != other.in_window or self.out_window != other.out_window:
            raise InputError("window mismatch in operator sum")

    def __add__(self, other: "WindowedOperator") -> "WindowedOperator":
        self._same_windows(other)
        return WindowedOperator(self.matrix + other.matrix, self.in_window, self.out_window, self.p)

    def __sub__(self, other: "WindowedOperator") -> "WindowedOperator":
        self._same_windows(other)
        return WindowedOperator(self.matrix - other.matrix, self.in_window, self.out_window, self.p)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c: complex) -> "WindowedOperator":
        return WindowedOperator(c * self.matrix, self.in_window, self.out_window, self.p)

    def __rmul__(self, c):
        return self.scale(c)

    def restrict(self, interior: Window, out_interior: Window | None = None) -> "WindowedOperator":
        """Keep rows in ``out_interior`` (default ``interior``) and columns in ``interior``."""
        out_interior = interior if out_interior is None else out_interior
        if not self.in_window.contains(interior) or not self.out_window.contains(out_interior):
            raise InputError("restriction window is not inside the operator windows")
        r0 = out_interior.lo - self.out_window.lo
        c0 = interior.lo - self.in_window.lo
        M = self.matrix[r0:r0 + out_interior.size, c0:c0 + interior.size]
        return WindowedOperator(M.copy(), interior, out_interior, self.p)

    def embed(self, in_window: Window, out_window: Window) -> "WindowedOperator":
        """Zero-extend (or crop) to new windows, aligning entries by frequency."""
        M = np.zeros((out_window.size, in_window.size), dtype=complex)
        ilo, ihi = max(in_window.lo, self.in_window.lo), min(in_window.hi, self.in_window.hi)
        olo, ohi = max(out_window.lo, self.out_window.lo), min(out_window.hi, self.out_window.hi)
        if ilo <= ihi and olo <= ohi:
            M[olo - out_window.lo:ohi - out_window.lo + 1, ilo - in_window.lo:ihi - in_window.lo + 1] = \
                self.matrix[olo - self.out_window.lo:ohi - self.out_window.lo + 1,
                            ilo - self.in_window.lo:ihi - self.in_window.lo + 1]
        return WindowedOperator(M, in_window, out_window, self.p)

    def adjoint(self) -> "WindowedOperator":
        return WindowedOperator(self.matrix.conj().T, self.out_window, self.in_window, self.p)

    def apply_basis(self, n: int) -> np.ndarray:
        """Image of e_n as a vector over the output window."""
        return self.matrix[:, self.in_window.position(n)].copy()


def identity(window: Window, p: float = 2.0) -> WindowedOperator:
    return WindowedOperator(np.eye(window.size, dtype=complex), window, window, p)


def multiplier(phi: Callable[[int], complex], window: Window, p: float = 2.0) -> WindowedOperator:
    """Fourier multiplier e_n -> phi(n) e_n on the window."""
    diag = np.array([complex(phi(int(n))) for n in window.frequencies()])
    return WindowedOperator(np.diag(diag), window, window, p)


def _sgn(n: int) -> int:
    return (n > 0) - (n < 0)


def hilbert_transform(window: Window, p: float = 2.0) -> WindowedOperator:
    """Periodic Hilbert transform: symbol -i sgn(n), sgn(0) = 0."""
    return multiplier(lambda n: -1j * _sgn(n), window, p)


def mean_projection(window: Window, p: float = 2.0) -> WindowedOperator:
    if not window.contains(0):
        raise InputError("mean projection needs 0 in the window")
    return multiplier(lambda n: 1.0 if n == 0 else 0.0, window, p)


def f_operator(window: Window, p: float = 2.0) -> WindowedOperator:
    """F = iH + E: +1 on n >= 0, -1 on n < 0. Squares to the identity."""
    return multiplier(lambda n: 1.0 if n >= 0 else -1.0, window, p)


def riesz_projection(window: Window, p: float = 2.0) -> WindowedOperator:
    return multiplier(lambda n: 1.0 if n >= 0 else 0.0, window, p)


def dirac(window: Window, p: float = 2.0) -> WindowedOperator:
    """(1/i) d/dtheta, diagonal with eigenvalue n on e_n."""
    return multiplier(lambda n: n, window, p)


def sign_of_dirac(window: Window, p: float = 2.0) -> WindowedOperator:
    return multiplier(_sgn, window, p)


def multiplication_operator(f: FourierSymbol, in_window: Window, p: float = 2.0) -> WindowedOperator:
    """M_f from ``in_window`` into ``in_window`` widened by the bandwidth; entry (m, n) = c_{m-n}."""
    out_window = in_window.expand(f.bandwidth)
    M = np.zeros((out_window.size, in_window.size), dtype=complex)
    cols = np.arange(in_window.size)
    for k, c in f.coefficients.items():
        rows = cols + (in_window.lo + k - out_window.lo)
        M[rows, cols] = c
    return WindowedOperator(M, in_window, out_window, p)


def commutator_with_F(f: FourierSymbol, window: Window, p: float = 2.0) -> WindowedOperator:
    """[F, M_f] from ``window`` into ``window`` widened by the bandwidth, entrywise exact."""
    Mf = multiplication_operator(f, window, p)
    return f_operator(Mf.out_window, p) @ Mf - Mf @ f_operator(window, p)


# ---------------------------------------------------------------- winding


@dataclass(frozen=True)
class WindingResult:
    winding: int
    min_modulus: float
    samples: int
    log_derivative: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "winding": self.winding,
            "min_modulus": self.min_modulus,
            "samples": self.samples,
            "log_derivative": self.log_derivative,
        }


MIN_MODULUS = 1e-9


def winding_number(f: FourierSymbol, samples: int | None = None) -> WindingResult:
    """Winding number about 0 by argument tracking and by the log-derivative integral.

    The two computations must agree; a symbol that nearly vanishes on the
    circle is refused.
    """
    need = 8 * (f.bandwidth + 1)
    if samples is None:
        samples = max(need, 2048)
    if samples < need:
        raise InputError(f"need at least {need} samples for bandwidth {f.bandwidth}, got {samples}")
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = f(theta)
    mod = np.abs(vals)
    min_mod = float(mod.min())
    if min_mod <= MIN_MODULUS:
        raise VanishingSymbolError(
            f"symbol nearly vanishes on the circle (min modulus {min_mod:.3e}); "
            "it is not invertible in C(T)"
        )
    closed = np.append(vals, vals[0])
    steps = np.angle(closed[1:] / closed[:-1])
    if np.max(np.abs(steps)) > 0.9 * np.pi:
        raise NumericalRefusal("argument step too large for the sample grid; increase samples")
    tracked = steps.sum() / (2 * np.pi)
    wind = int(round(tracked))
    # periodic trapezoid rule for (1/2 pi i) int f'/f, spectrally accurate here
    logd = float((np.mean(f.derivative()(theta) / vals) / 1j).real)
    if abs(tracked - wind) > 1e-6 or abs(logd - wind) > 1e-3:
        raise NumericalRefusal(
            f"winding computations disagree: tracking {tracked:.6f}, log-derivative {logd:.6f}"
        )
    return WindingResult(wind, min_mod, samples, logd)


def fourier_inverse(f: FourierSymbol, tol: float = 1e-10, max_bandwidth: int = 4096) -> FourierSymbol:
    """Trigonometric-polynomial approximation of 1/f with sup-norm residual below ``tol``.

    Raises `NumericalRefusal` if no truncation up to ``max_bandwidth`` reaches
    the residual target.
    """
    if len(f.coefficients) == 1:
        (k, c), = f.coefficients.items()
        return FourierSymbol.monomial(-k, 1 / c)
    winding_number(f)  # refuses vanishing symbols
    check = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    B = 16
    while B <= max_bandwidth:
        M = 8 * B
        theta = 2 * np.pi * np.arange(M) / M
        coef = np.fft.fft(1.0 / f(theta)) / M
        g = FourierSymbol({n: coef[n % M] for n in range(-B, B + 1) if abs(coef[n % M]) > 1e-17})
        residual = float(np.max(np.abs(f(check) * g(check) - 1)))
        if residual < tol:
            return g
        B *= 2
    raise NumericalRefusal(f"could not invert symbol to residual {tol}")
