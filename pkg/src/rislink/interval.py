"""Closed real intervals for ranged engineering quantities."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Interval:
    """``[lo, hi]``; ``lo_open`` marks a bound known only as "< hi" (e.g. ``(0, 10]``)."""

    lo: float
    hi: float
    lo_open: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval bounds out of order: [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def below(cls, hi: float) -> "Interval":
        """Positive quantity bounded above, ``(0, hi]``."""
        return cls(0.0, hi, lo_open=True)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        if self.lo_open:
            return self.lo < x <= self.hi
        return self.lo <= x <= self.hi

    def scale(self, k: float) -> "Interval":
        a, b = self.lo * k, self.hi * k
        return Interval(min(a, b), max(a, b), self.lo_open and k > 0)

    def __mul__(self, other):
        if isinstance(other, Interval):
            prods = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
            return Interval(min(prods), max(prods))
        return self.scale(other)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        return Interval(self.lo + other, self.hi + other, self.lo_open)

    def map_decreasing(self, fn) -> "Interval":
        """Image under a strictly decreasing function."""
        return Interval(fn(self.hi), fn(self.lo))

    def as_tuple(self):
        return self.lo, self.hi
