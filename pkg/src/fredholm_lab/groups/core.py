"""Group words, per-group normal forms and the left-invariant order oracles.

Letters are signed generator indices: ``k`` is the k-th generator and ``-k``
its inverse.  Supported group tags are ``Z``, ``Z<d>_lex`` (e.g. ``Z2_lex``),
``B3`` and ``F<k>`` (free group on k generators).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from ..errors import InputError, RouteDisagreement
from . import braids
from .braids import DEFAULT_STEP_BUDGET, free_reduce, inverse

LESS, EQUAL, GREATER = "less", "equal", "greater"


@dataclass(frozen=True)
class GroupWord:
    group: str
    letters: tuple[int, ...]
    canonical: bool = False

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """(generator index, exponent) view of the letters."""
        return tuple((abs(x), 1 if x > 0 else -1) for x in self.letters)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return get_group(self.group).format(self.letters)


class Group:
    """Base class: word normal forms, dedup keys, parsing and formatting."""

    tag: str
    rank: int
    orderable: bool = False
    letter_prefix: str = "g"

    @property
    def letters(self) -> tuple[int, ...]:
        """Generators and inverses in shortlex order."""
        out = []
        for k in range(1, self.rank + 1):
            out += [k, -k]
        return tuple(out)

    def check(self, letters: Sequence[int]) -> tuple[int, ...]:
        w = tuple(int(x) for x in letters)
        for x in w:
            if x == 0 or abs(x) > self.rank:
                raise InputError(f"letter {x} is not a generator of {self.tag}")
        return w

    def normal_form(self, letters: Sequence[int]) -> tuple[int, ...]:
        return free_reduce(self.check(letters))

    def key(self, letters: Sequence[int]) -> Hashable:
        return self.normal_form(letters)

    def equal(self, a: Sequence[int], b: Sequence[int]) -> bool:
        return self.key(a) == self.key(b)

    def word(self, letters: Sequence[int]) -> GroupWord:
        return GroupWord(self.tag, self.normal_form(letters), True)

    def parse(self, text: str) -> tuple[int, ...]:
        return _parse_letters(text, self.letter_prefix, self)

    def format(self, letters: Sequence[int]) -> str:
        return _format_letters(letters, self.letter_prefix)


_TOKEN = re.compile(r"([a-z])(\d+)(?:\^\(?([+-]?\d+)\)?)?$")


def _parse_letters(text: str, prefix: str, group: Group) -> tuple[int, ...]:
    out: list[int] = []
    s = text.strip()
    if s in ("", "e", "1"):
        return ()
    for tok in s.split():
        m = _TOKEN.match(tok)
        if not m or m.group(1) != prefix:
            raise InputError(f"cannot parse {tok!r} as a {group.tag} letter")
        k = int(m.group(2))
        n = int(m.group(3)) if m.group(3) is not None else 1
        out += [k if n > 0 else -k] * abs(n)
    return group.check(out)


def _format_letters(letters: Sequence[int], prefix: str) -> str:
    if not letters:
        return "e"
    parts = []
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        n = (j - i) * (1 if letters[i] > 0 else -1)
        parts.append(f"{prefix}{abs(letters[i])}" + ("" if n == 1 else f"^{n}"))
        i = j
    return " ".join(parts)


class FreeGroup(Group):
    def __init__(self, rank: int):
        if rank < 1:
            raise InputError("free group rank must be >= 1")
        self.rank = rank
        self.tag = f"F{rank}"


class Lattice(Group):
    """Z^d with the lexicographic order; Z when d = 1."""

    orderable = True

    def __init__(self, d: int):
        if d < 1:
            raise InputError("lattice dimension must be >= 1")
        self.rank = d
        self.tag = "Z" if d == 1 else f"Z{d}_lex"

    def vector(self, letters: Sequence[int]) -> tuple[int, ...]:
        v = [0] * self.rank
        for x in self.check(letters):
            v[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(v)

    def from_vector(self, v: Sequence[int]) -> tuple[int, ...]:
        out: list[int] = []
        for k, n in enumerate(v, start=1):
            out += [k if n > 0 else -k] * abs(n)
        return tuple(out)

    def normal_form(self, letters):
        return self.from_vector(self.vector(letters))

    def key(self, letters):
        return self.vector(letters)

    def sign(self, letters: Sequence[int]) -> int:
        for n in self.vector(letters):
            if n:
                return 1 if n > 0 else -1
        return 0

    def parse(self, text: str) -> tuple[int, ...]:
        s = text.strip()
        if s.startswith("("):
            if not s.endswith(")"):
                raise InputError(f"unbalanced vector {text!r}")
            try:
                v = [int(x) for x in s[1:-1].split(",") if x.strip()]
            except ValueError as exc:
                raise InputError(f"cannot parse vector {text!r}") from exc
            if len(v) != self.rank:
                raise InputError(f"expected {self.rank} coordinates, got {len(v)}")
            return self.from_vector(v)
        try:
            n = int(s)
        except ValueError:
            return super().parse(text)
        if self.rank != 1:
            raise InputError(f"{self.tag} elements are written as vectors like (2,-1)")
        return self.from_vector([n])

    def format(self, letters):
        v = self.vector(letters)
        return str(v[0]) if self.rank == 1 else "(" + ",".join(map(str, v)) + ")"


class BraidGroup3(Group):
    """B3 with the Dehornoy order; every decision is cross-checked against Burau."""

    orderable = True
    letter_prefix = "s"

    def __init__(self, budget: int = DEFAULT_STEP_BUDGET):
        self.rank = 2
        self.tag = "B3"
        self.budget = budget
        self.words_checked = 0

    def handle_reduce(self, letters):
        """Handle reduction with the Burau image checked before and after."""
        w = self.check(letters)
        r = braids.handle_reduce(w, self.budget)
        M = braids.burau(w)
        self.words_checked += 1
        if braids.burau(r.word) != M:
            raise RouteDisagreement(f"handle reduction changed the Burau image of {w}")
        if (r.classification == braids.EMPTY) != (M == braids.burau(())):
            raise RouteDisagreement(f"handle reduction and Burau disagree on triviality of {w}")
        return r

    def normal_form(self, letters):
        return self.handle_reduce(letters).word

    def key(self, letters):
        return braids.burau(self.check(letters))

    def equal(self, a, b):
        self.words_checked += 1
        return braids.braid_equal(self.check(a), self.check(b), self.budget)

    def sign(self, letters) -> int:
        return self.handle_reduce(letters).sign


def get_group(tag: str) -> Group:
    tag = tag.strip()
    if tag == "Z":
        return Lattice(1)
    if tag == "B3":
        return BraidGroup3()
    m = re.fullmatch(r"Z(\d+)_lex", tag)
    if m:
        return Lattice(int(m.group(1)))
    m = re.fullmatch(r"F(?:reeGroup\()?(\d+)\)?", tag)
    if m:
        return FreeGroup(int(m.group(1)))
    raise InputError(f"unknown group {tag!r}")


def parse_word(group: str | Group, text: str) -> GroupWord:
    G = get_group(group) if isinstance(group, str) else group
    return GroupWord(G.tag, G.parse(text))


def word_equal(w1: GroupWord, w2: GroupWord) -> bool:
    if w1.group != w2.group:
        raise InputError(f"cannot compare words of {w1.group} and {w2.group}")
    return get_group(w1.group).equal(w1.letters, w2.letters)


@dataclass
class OrderOracle:
    """Left-invariant total order: s < t iff s^-1 t is positive."""

    group: Group
    comparisons: int = field(default=0)

    def __post_init__(self):
        if not self.group.orderable:
            raise InputError(f"no order oracle for {self.group.tag}")

    @classmethod
    def for_group(cls, tag: str) -> "OrderOracle":
        return cls(get_group(tag))

    @property
    def tag(self) -> str:
        return self.group.tag

    def sign(self, s: Sequence[int]) -> int:
        return self.group.sign(s)

    def compare(self, s: Sequence[int], t: Sequence[int]) -> str:
        self.comparisons += 1
        sg = self.group.sign(inverse(s) + tuple(t))
        return GREATER if sg < 0 else LESS if sg > 0 else EQUAL

    def less(self, s, t) -> bool:
        return self.compare(s, t) == LESS


def sign(oracle: OrderOracle, s: GroupWord | Sequence[int]) -> int:
    return oracle.sign(s.letters if isinstance(s, GroupWord) else s)


def order_compare(oracle: OrderOracle, s, t) -> str:
    s = s.letters if isinstance(s, GroupWord) else s
    t = t.letters if isinstance(t, GroupWord) else t
    return oracle.compare(s, t)
