"""Word-length balls in finitely generated groups, with JSON caching."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Sequence

from ..errors import InputError, RouteDisagreement
from .braids import inverse
from .core import Group, get_group

BALL_FORMAT_VERSION = 1


@dataclass
class GroupBall:
    """Distinct group elements of word length <= radius, in shortlex order.

    Breadth-first search extends each representative by the generators in
    shortlex order, so every stored word is the shortlex-minimal spelling of
    its element.
    """

    group: Group
    radius: int
    elements: list[tuple[int, ...]] = field(default_factory=list)
    lengths: list[int] = field(default_factory=list)
    index: dict[Hashable, int] = field(default_factory=dict)

    @classmethod
    def build(cls, group: Group | str, radius: int, verify: bool = True) -> "GroupBall":
        G = get_group(group) if isinstance(group, str) else group
        if radius < 0:
            raise InputError("radius must be >= 0")
        ball = cls(G, radius)
        ball._add((), 0)
        frontier = [()]
        for length in range(1, radius + 1):
            nxt = []
            for w in frontier:
                for x in G.letters:
                    v = w + (x,)
                    k = G.key(v)
                    if k in ball.index:
                        if verify and not G.equal(v, ball.elements[ball.index[k]]):
                            raise RouteDisagreement(f"dedup key collision for {v}")
                        continue
                    ball._add(v, length, k)
                    nxt.append(v)
            frontier = nxt
        return ball

    def _add(self, w: tuple[int, ...], length: int, key: Hashable | None = None) -> None:
        self.index[self.group.key(w) if key is None else key] = len(self.elements)
        self.elements.append(w)
        self.lengths.append(length)

    def __len__(self):
        return len(self.elements)

    def position(self, w: Sequence[int]) -> int | None:
        return self.index.get(self.group.key(w))

    def within(self, radius: int) -> list[int]:
        return [i for i, n in enumerate(self.lengths) if n <= radius]

    def closed_under_inversion(self) -> bool:
        return all(self.position(inverse(w)) is not None for w in self.elements)

    def to_json(self) -> str:
        return json.dumps(
            {
                "format_version": BALL_FORMAT_VERSION,
                "group": self.group.tag,
                "radius": self.radius,
                "elements": [self.group.format(w) for w in self.elements],
                "lengths": self.lengths,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "GroupBall":
        data = json.loads(text)
        if data.get("format_version") != BALL_FORMAT_VERSION:
            raise InputError(f"unsupported ball format version {data.get('format_version')!r}")
        G = get_group(data["group"])
        ball = cls(G, int(data["radius"]))
        for s, n in zip(data["elements"], data["lengths"]):
            w = G.parse(s)
            if G.key(w) in ball.index:
                raise InputError(f"duplicate element {s!r} in cached ball")
            ball._add(w, int(n))
        return ball

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "GroupBall":
        return cls.from_json(Path(path).read_text())
