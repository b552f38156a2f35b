"""Exact counting, enumeration and shape classification of lp balls in Z^n.

A radius r is always carried around as the integer s = r**p (a "pow-radius"),
so that membership of a point z in the ball, sum(|z_i|**p) <= s, is decided in
integer arithmetic with no boundary ties.  The only floating point in this
module is the unit-ball volume, which is genuinely a real quantity.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cache

import numpy as np

from .errors import LimitExceededError

Point = tuple[int, ...]


def iroot(s: int, p: int) -> int:
    """Floor of the p-th root of a nonnegative integer s, exactly."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if p < 1:
        raise ValueError("p must be a positive integer")
    if p == 1:
        return s
    if p == 2:
        return math.isqrt(s)
    if s == 0:
        return 0
    # Float seed, then fix up; the loops run O(1) times for sane inputs.
    k = max(int(round(s ** (1.0 / p))), 0)
    while k > 0 and k**p > s:
        k -= 1
    while (k + 1) ** p <= s:
        k += 1
    return k


@cache
def is_representable(n: int, p: int, s: int) -> bool:
    """True iff s is a sum of exactly n p-th powers of nonnegative integers."""
    if n < 1 or p < 1 or s < 0:
        raise ValueError("need n >= 1, p >= 1, s >= 0")
    if n == 1:
        return iroot(s, p) ** p == s
    # Largest part first: typically hits the base case sooner.
    return any(
        is_representable(n - 1, p, s - a**p) for a in range(iroot(s, p), -1, -1)
    )


@dataclass(frozen=True)
class DistanceSet:
    """All attainable pow-radii for (n, p) up to an inclusive limit.

    elements is strictly increasing and starts with 0.
    """

    n: int
    p: int
    limit: int
    elements: tuple[int, ...]

    def __contains__(self, s: int) -> bool:
        i = bisect_left(self.elements, s)
        return i < len(self.elements) and self.elements[i] == s

    def successor(self, s: int) -> int:
        """Smallest element strictly greater than s.

        Raises LimitExceededError when no larger element was generated;
        the caller should rebuild with a bigger limit.
        """
        i = bisect_right(self.elements, s)
        if i >= len(self.elements):
            raise LimitExceededError(
                f"no successor of {s} within limit {self.limit} for "
                f"(n={self.n}, p={self.p})"
            )
        return self.elements[i]

    def gap_count(self, a: int, b: int) -> int:
        """Number of elements in the half-open interval [a, b)."""
        if not 0 <= a <= b:
            raise ValueError("need 0 <= a <= b")
        if b > self.limit:
            raise LimitExceededError(
                f"gap_count upper end {b} exceeds generated limit {self.limit}"
            )
        return bisect_left(self.elements, b) - bisect_left(self.elements, a)


# Above this limit the boolean sieve array is too large to be worth it;
# generate by direct summation instead (cheap exactly when p is large,
# which is when the limit blows up).
_SIEVE_LIMIT = 1 << 26


@cache
def distance_set(n: int, p: int, limit: int) -> DistanceSet:
    """Generate the distance set for (n, p) up to `limit` inclusive.

    Small limits use a boolean sieve (n-fold fold of the p-th power
    indicator over [0, limit]); huge limits, which only arise for large p
    where the p-th power grid is sparse, enumerate the sums directly.
    """
    if n < 1 or p < 1:
        raise ValueError("need n >= 1 and p >= 1")
    if limit < 0:
        raise ValueError("limit must be nonnegative")
    if limit > _SIEVE_LIMIT:
        powers = [a**p for a in range(iroot(limit, p) + 1)]
        sums = {0}
        for _ in range(n):
            sums = {s + q for s in sums for q in powers if s + q <= limit}
        elements = tuple(sorted(sums))
    else:
        reach = np.zeros(limit + 1, dtype=bool)
        reach[0] = True
        powers = [a**p for a in range(1, iroot(limit, p) + 1)]
        for _ in range(n):
            step = reach.copy()  # the a = 0 term
            for q in powers:
                step[q:] |= reach[: limit + 1 - q]
            reach = step
        elements = tuple(int(v) for v in np.flatnonzero(reach))
    return DistanceSet(n=n, p=p, limit=limit, elements=elements)


def distance_set_at_least(n: int, p: int, at_least: int) -> DistanceSet:
    """Distance set whose limit is >= at_least, rounded up to a power of
    two times 256 so repeated queries share cache entries."""
    limit = 256
    while limit < at_least:
        limit *= 4
    return distance_set(n, p, limit)


def successor(n: int, p: int, s: int) -> int:
    """Smallest attainable pow-radius strictly greater than s, growing the
    sieve limit as needed (never raises LimitExceededError)."""
    limit = max(4 * s, 256)
    while True:
        try:
            return distance_set_at_least(n, p, limit).successor(s)
        except LimitExceededError:
            limit *= 4


def ball_points(n: int, p: int, s: int) -> list[Point]:
    """All z in Z^n with sum(|z_i|**p) <= s, in lexicographic order."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    out: list[Point] = []
    point = [0] * n

    def rec(i: int, budget: int) -> None:
        if i == n:
            out.append(tuple(point))
            return
        k = iroot(budget, p)
        for z in range(-k, k + 1):
            point[i] = z
            rec(i + 1, budget - abs(z) ** p)

    rec(0, s)
    return out


@cache
def mu(n: int, p: int, s: int) -> int:
    """Number of points of Z^n in the ball of pow-radius s (counted, not
    materialized)."""
    if s < 0:
        return 0
    if n == 0:
        return 1
    if n == 1:
        return 2 * iroot(s, p) + 1
    total = mu(n - 1, p, s)
    for z in range(1, iroot(s, p) + 1):
        total += 2 * mu(n - 1, p, s - z**p)
    return total


class BallCase(Enum):
    CASE_I = "CaseI"
    CASE_II = "CaseII"
    CASE_III = "CaseIII"
    CASE_IV = "CaseIV"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class BallShape:
    case: BallCase
    predicted_mu: int | None
    # True when the two circulating variants of the case-(ii) side
    # condition disagree at this input (see classify_ball); the shape is
    # then left unclassified rather than trusting either variant.
    predicate_conflict: bool = False


def classify_ball(n: int, p: int, r: Fraction | int) -> BallShape:
    """Match (n, p, r) against the four closed-form ball shapes.

    All comparisons run on exact rationals via r**p; the logarithmic
    thresholds are evaluated in their equivalent integer-power form
    (ln n / ln(r/(r-1)) <= p  <=>  n*(r-1)**p <= r**p), so boundary
    ties are decided exactly.

    The second side condition of the second case circulates in two
    variants, (n-1)(r-1)^p + (r-2) <= r^p and the same with (r-2)^p.
    Both are checked; if they disagree the result is Unclassified with
    predicate_conflict set, since the closed-form count is only safe
    when the hypotheses hold unambiguously.
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    rp = r**p
    fl = math.floor(r)
    if r.denominator == 1:
        ri = int(r)
        if n * (ri - 1) ** p <= rp:
            return BallShape(BallCase.CASE_I, (2 * ri - 1) ** n + 2 * n)
        side_plain = (n - 1) * (ri - 1) ** p + (ri - 2) <= rp
        side_pow = (n - 1) * (ri - 1) ** p + (ri - 2) ** p <= rp
        if side_plain and side_pow:
            return BallShape(BallCase.CASE_II, (2 * ri - 1) ** n + 2 * n - 2**n)
        if side_plain != side_pow:
            return BallShape(BallCase.UNCLASSIFIED, None, predicate_conflict=True)
        return BallShape(BallCase.UNCLASSIFIED, None)
    # r not an integer from here on.
    if n * fl**p > rp and (n - 1) * fl**p + (fl - 1) ** p <= rp:
        return BallShape(BallCase.CASE_III, (2 * fl + 1) ** n - 2**n)
    # the fourth shape's side condition references the coordinate fl - 2,
    # so it only makes sense for fl >= 2
    if (
        fl >= 2
        and (n - 1) * fl**p + (fl - 1) ** p > rp
        and (n - 1) * fl**p + (fl - 2) ** p <= rp
    ):
        return BallShape(BallCase.CASE_IV, (2 * fl + 1) ** n - (n + 1) * 2**n)
    return BallShape(BallCase.UNCLASSIFIED, None)


def pow_radius_of(r: Fraction | int, p: int) -> int:
    """Largest integer s with s <= r**p; the pow-radius of a rational radius.

    Integer points in the ball of real radius r are exactly those with
    norm**p <= floor(r**p), so classify/count comparisons use this s.
    """
    rp = Fraction(r) ** p
    return rp.numerator // rp.denominator


def unit_ball_volume(n: int, p: int) -> float:
    """Euclidean volume of the unit lp ball in R^n."""
    if n < 1 or p < 1:
        raise ValueError("need n >= 1 and p >= 1")
    return (2.0 * math.gamma(1.0 / p + 1.0)) ** n / math.gamma(n / p + 1.0)
