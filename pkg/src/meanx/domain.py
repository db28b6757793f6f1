"""Interval domains and validated point vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DomainError


@dataclass(frozen=True)
class Interval:
    """A subinterval of the extended real line.

    ``requires_positive`` marks domains on which entries must be strictly
    positive even when ``lo == 0`` (power and Gini means live on (0, inf)).
    """

    lo: float = float("-inf")
    hi: float = float("inf")
    requires_positive: bool = False

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")
        if self.requires_positive and self.lo < 0:
            raise ValueError("requires_positive interval must have lo >= 0")

    def contains(self, v: float) -> bool:
        if math.isnan(v):
            return False
        if self.requires_positive and self.lo == 0.0:
            if v <= 0.0:
                return False
        elif v < self.lo:
            return False
        return v <= self.hi

    def check(self, values: Sequence[float]) -> None:
        """Raise DomainError on the first entry outside the interval."""
        for i, v in enumerate(values):
            if not self.contains(v):
                raise DomainError(f"entry {v!r} at position {i} outside {self}")

    def probe_range(self, span: float = 1e3) -> tuple[float, float]:
        """A finite subrange suitable for randomized spot checks."""
        lo = self.lo
        hi = self.hi
        if self.requires_positive:
            lo = max(lo, 1.0 / span) if lo <= 0 else lo
            hi = min(hi, span)
        else:
            lo = max(lo, -50.0)
            hi = min(hi, 50.0)
        if not lo < hi:
            raise ValueError(f"interval {self} has no usable probe range")
        return lo, hi

    def __str__(self) -> str:
        kind = "(0-excluded) " if self.requires_positive and self.lo == 0 else ""
        return f"{kind}[{self.lo}, {self.hi}]"


#: The positive half-line, shared by all homogeneous families.
POSITIVE = Interval(0.0, float("inf"), requires_positive=True)

#: The whole real line.
REALS = Interval()


@dataclass(frozen=True)
class PointVector:
    """An immutable vector of reals, optionally validated against an interval."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) < 1:
            raise ValueError("point vector must have length >= 1")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def of(cls, values: Sequence[float], interval: Interval | None = None) -> "PointVector":
        pv = cls(tuple(float(v) for v in values))
        if interval is not None:
            interval.check(pv.values)
        return pv

    def drop(self, j: int) -> "PointVector":
        """Remove coordinate j (1-based, matching index-family conventions)."""
        if not 1 <= j <= len(self.values):
            raise IndexError(f"coordinate {j} out of range 1..{len(self.values)}")
        return PointVector(self.values[: j - 1] + self.values[j:])

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]


def as_floats(x: Sequence[float] | PointVector) -> tuple[float, ...]:
    """Coerce a PointVector or any real sequence to a plain float tuple."""
    if isinstance(x, PointVector):
        return x.values
    vals = tuple(float(v) for v in x)
    if not vals:
        raise ValueError("empty vector")
    return vals
