"""Exact cost arithmetic for the 8-connected grid with 1 / sqrt(2) move costs.

A path cost is a pair (cardinals, diagonals) whose numeric value is
``cardinals + diagonals * sqrt(2)``.  Keeping the two counters separate makes
cost comparison exact: since sqrt(2) is irrational, two pairs are equal only
when they are component-wise equal, and ordering reduces to integer sign
analysis.  Optimality checks in the benchmark therefore never depend on
floating-point tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SQRT2 = math.sqrt(2.0)


def compare_counts(c1: int, d1: int, c2: int, d2: int) -> int:
    """Sign of (c1 + d1*sqrt2) - (c2 + d2*sqrt2), computed exactly.

    Returns -1, 0 or +1.  Works for arbitrary (possibly negative) integer
    counts; the comparison squares the difference terms, which is safe with
    Python integers.
    """
    dc = c1 - c2
    dd = d1 - d2
    if dc == 0:
        return 0 if dd == 0 else (1 if dd > 0 else -1)
    if dd == 0:
        return 1 if dc > 0 else -1
    if dc > 0 and dd > 0:
        return 1
    if dc < 0 and dd < 0:
        return -1
    # Mixed signs: compare |dc| against |dd|*sqrt2 via squaring.  Equality is
    # impossible (dc^2 = 2*dd^2 has no nonzero integer solutions).
    if dc > 0:  # dd < 0: positive iff dc > |dd|*sqrt2
        return 1 if dc * dc > 2 * dd * dd else -1
    return 1 if dc * dc < 2 * dd * dd else -1  # dc < 0, dd > 0


@dataclass(frozen=True, order=False)
class ExactCost:
    """Path cost as (cardinal steps, diagonal steps); value c + d*sqrt(2)."""

    cardinals: int
    diagonals: int

    def __post_init__(self):
        if self.cardinals < 0 or self.diagonals < 0:
            raise ValueError(f"negative move counts: {self!r}")

    def __add__(self, other: "ExactCost") -> "ExactCost":
        return ExactCost(self.cardinals + other.cardinals,
                         self.diagonals + other.diagonals)

    def to_float(self) -> float:
        return self.cardinals + self.diagonals * SQRT2

    def compare(self, other: "ExactCost") -> int:
        return compare_counts(self.cardinals, self.diagonals,
                              other.cardinals, other.diagonals)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def as_dict(self) -> dict:
        """JSON form carrying both the exact pair and the float value."""
        return {
            "cardinals": self.cardinals,
            "diagonals": self.diagonals,
            "value": self.to_float(),
        }


ZERO = ExactCost(0, 0)
CARDINAL = ExactCost(1, 0)
DIAGONAL = ExactCost(0, 1)


def add(a: ExactCost, b: ExactCost) -> ExactCost:
    return a + b


def compare(a: ExactCost, b: ExactCost) -> int:
    """Exact three-way comparison: -1 (less), 0 (equal), +1 (greater)."""
    return a.compare(b)


def to_float(a: ExactCost) -> float:
    return a.to_float()
