"""Extended naturals {1, 2, ..., inf} and Pukanszky sets.

Infinity is ``math.inf`` so that ``n + INF == INF`` and ``n * INF == INF``
hold with ordinary Python arithmetic; finite values stay ``int``.
"""

from __future__ import annotations

import math
from typing import Iterable, Union

ExtNat = Union[int, float]

INF = math.inf


def check(v) -> ExtNat:
    """Return ``v`` as an extended natural >= 1, or raise ValueError."""
    if v == INF:
        return INF
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(f"not an extended natural: {v!r}")
    if v < 1:
        raise ValueError(f"extended naturals start at 1, got {v}")
    return v


def parse(v) -> ExtNat:
    """Accept an int, ``"inf"``, ``"∞"`` or a decimal string."""
    if isinstance(v, str):
        s = v.strip()
        if s in ("inf", "∞", "infinity"):
            return INF
        try:
            return check(int(s))
        except ValueError:
            raise ValueError(f"not an extended natural: {v!r}") from None
    return check(v)


def fmt(v: ExtNat) -> str:
    return "inf" if v == INF else str(int(v))


def to_json(v: ExtNat):
    return "inf" if v == INF else int(v)


class PukSet(frozenset):
    """A subset of N ∪ {inf}, printed as ``{1, 3, inf}``."""

    def __new__(cls, values: Iterable = ()):
        return super().__new__(cls, (check(v) for v in values))

    def __str__(self) -> str:
        return "{" + ", ".join(fmt(v) for v in sorted(self)) + "}"

    def __repr__(self) -> str:
        return f"PukSet({str(self)})"

    def union(self, *others) -> "PukSet":
        return PukSet(frozenset.union(self, *others))

    def to_json(self) -> list:
        return [to_json(v) for v in sorted(self)]

    @classmethod
    def from_json(cls, values) -> "PukSet":
        return cls(parse(v) for v in values)
