"""Finite unions of half-open rational intervals with exact Lebesgue measure.

This is the spectrum carrier for continuous rainbow flows: every spectrum is
a finite union of ``[a, b)`` intervals with Fraction endpoints, so unions,
intersections and measures are computed exactly and equality is canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .rationals import format_rational, parse_rational


@dataclass(frozen=True)
class IntervalSet:
    """A sorted tuple of disjoint, non-adjacent, nonempty ``[a, b)`` intervals.

    Normalization (sorting, merging of overlapping and touching intervals,
    dropping empty ones) happens on construction, so two sets covering the
    same points compare equal.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        cleaned: list[tuple[Fraction, Fraction]] = []
        for pair in self.intervals:
            a, b = Fraction(pair[0]), Fraction(pair[1])
            if a > b:
                raise ValueError(f"interval start {a} exceeds end {b}")
            if a < b:
                cleaned.append((a, b))
        cleaned.sort()
        merged: list[tuple[Fraction, Fraction]] = []
        for a, b in cleaned:
            if merged and a <= merged[-1][1]:
                prev_a, prev_b = merged[-1]
                merged[-1] = (prev_a, max(prev_b, b))
            else:
                merged.append((a, b))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "IntervalSet":
        """Build from ``[[a, b], ...]`` with endpoints given as JSON scalars."""
        parsed = tuple(
            (parse_rational(a, what="interval start"), parse_rational(b, what="interval end"))
            for a, b in pairs
        )
        return cls(parsed)

    @property
    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append((lo, hi))
        return IntervalSet(tuple(out))

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return self.union(other)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersection(other)

    def __bool__(self) -> bool:
        return not self.is_empty

    def to_pairs(self) -> list[list[str]]:
        """Inverse of `from_pairs`, endpoints rendered as exact strings."""
        return [[format_rational(a), format_rational(b)] for a, b in self.intervals]
