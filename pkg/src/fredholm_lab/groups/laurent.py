"""Exact integer Laurent polynomials and 2x2 matrices over them."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Laurent:
    """Integer Laurent polynomial in t, stored as sorted (exponent, coefficient) pairs."""

    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, d: dict[int, int]) -> "Laurent":
        return cls(tuple(sorted((k, v) for k, v in d.items() if v)))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "Laurent":
        return cls.from_dict({k: c})

    def __add__(self, other: "Laurent") -> "Laurent":
        d = dict(self.terms)
        for k, v in other.terms:
            d[k] = d.get(k, 0) + v
        return Laurent.from_dict(d)

    def __mul__(self, other: "Laurent") -> "Laurent":
        d: dict[int, int] = {}
        for a, x in self.terms:
            for b, y in other.terms:
                d[a + b] = d.get(a + b, 0) + x * y
        return Laurent.from_dict(d)

    def __call__(self, t: complex) -> complex:
        return sum(c * t ** k for k, c in self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}t^{k}" for k, c in self.terms)


ZERO = Laurent()
ONE = Laurent.monomial(0)

Mat2 = tuple[Laurent, Laurent, Laurent, Laurent]  # row-major
IDENTITY: Mat2 = (ONE, ZERO, ZERO, ONE)


def matmul(A: Mat2, B: Mat2) -> Mat2:
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
