"""Exact arithmetic on the extended rational line Q u {inf}.

Points are reduced fractions with non-negative denominator, infinity being the
single value 1/0.  Integer matrices of determinant one act by Moebius maps and
carry oriented closed arcs of the circle R u {inf} to arcs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Union

RationalLike = Union["ExtRational", Fraction, int, str]


class ExtRational:
    """Reduced fraction ``num/den`` with ``den >= 0``; ``1/0`` is infinity."""

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int = 1):
        num, den = int(num), int(den)
        if den == 0:
            if num != 1:
                raise ValueError(f"infinity must be written 1/0, got {num}/0")
        else:
            if den < 0:
                num, den = -num, -den
            g = gcd(num, den)
            if g != 1:
                num //= g
                den //= g
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def _unsafe(cls, num: int, den: int) -> "ExtRational":
        # caller guarantees gcd 1, den >= 0, and den == 0 -> num == 1
        self = object.__new__(cls)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        return self

    @classmethod
    def from_pair(cls, x: int, y: int) -> "ExtRational":
        """Point of the projective line with homogeneous coordinates [x : y]."""
        if x == 0 and y == 0:
            raise ValueError("[0 : 0] is not a point")
        if y == 0:
            return INF
        return cls(x, y)

    @classmethod
    def parse(cls, text: str) -> "ExtRational":
        s = text.strip()
        if s.lower() in ("inf", "+inf", "infinity", "oo", "∞"):
            return INF
        if "/" in s:
            p, q = s.split("/", 1)
            p, q = int(p), int(q)
            if q == 0:
                if p <= 0:
                    raise ValueError(f"infinity must be written 1/0, got {s!r}")
                return INF
            return cls(p, q)
        return cls(int(s), 1)

    @classmethod
    def coerce(cls, value: RationalLike) -> "ExtRational":
        if isinstance(value, ExtRational):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, Fraction):
            return cls._unsafe(value.numerator, value.denominator)
        if isinstance(value, int):
            return cls._unsafe(value, 1)
        raise TypeError(f"cannot interpret {value!r} as an extended rational")

    def __setattr__(self, name, value):
        raise AttributeError("ExtRational is immutable")

    @property
    def is_inf(self) -> bool:
        return self.den == 0

    def to_fraction(self) -> Fraction:
        if self.den == 0:
            raise ValueError("infinity has no Fraction value")
        return Fraction(self.num, self.den)

    def __float__(self) -> float:
        if self.den == 0:
            return float("inf")
        return self.num / self.den

    def __eq__(self, other):
        if isinstance(other, ExtRational):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.den != 0 and self.num * Fraction(other).denominator == Fraction(other).numerator * self.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    # Real-line order with infinity placed above every finite value.
    def __lt__(self, other: "ExtRational") -> bool:
        other = ExtRational.coerce(other)
        if self.den == 0:
            return False
        if other.den == 0:
            return True
        return self.num * other.den < other.num * self.den

    def __le__(self, other: "ExtRational") -> bool:
        other = ExtRational.coerce(other)
        return self == other or self < other

    def __gt__(self, other: "ExtRational") -> bool:
        return ExtRational.coerce(other) < self

    def __ge__(self, other: "ExtRational") -> bool:
        return ExtRational.coerce(other) <= self

    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        return f"{self.num}/{self.den}"

    def __repr__(self) -> str:
        return f"ExtRational({self.num}, {self.den})"


INF = ExtRational._unsafe(1, 0)
ZERO = ExtRational._unsafe(0, 1)
ONE = ExtRational._unsafe(1, 1)


def mediant(p: ExtRational, q: ExtRational) -> ExtRational:
    """``(p.num + q.num) / (p.den + q.den)``, reduced."""
    num, den = p.num + q.num, p.den + q.den
    if den == 0:
        # only 1/0 + (-1)/0 could land here, and -1/0 is not representable
        raise ValueError("mediant undefined")
    return ExtRational(num, den)


@dataclass(frozen=True)
class IntMatrix2:
    """Integer matrix ``[[a, b], [c, d]]`` of determinant 1, stored up to sign.

    The sign is fixed so that ``c > 0``, or ``c == 0`` and ``d > 0``.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.rows()} is not 1")
        if self.c < 0 or (self.c == 0 and self.d < 0):
            object.__setattr__(self, "a", -self.a)
            object.__setattr__(self, "b", -self.b)
            object.__setattr__(self, "c", -self.c)
            object.__setattr__(self, "d", -self.d)

    @classmethod
    def identity(cls) -> "IntMatrix2":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    def __matmul__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "IntMatrix2":
        return IntMatrix2(self.d, -self.b, -self.c, self.a)

    def apply(self, x: ExtRational) -> ExtRational:
        return mobius_apply(self, x)


def mobius_apply(g: IntMatrix2, x: ExtRational) -> ExtRational:
    """Image of ``x`` under ``z -> (az + b) / (cz + d)``."""
    num = g.a * x.num + g.b * x.den
    den = g.c * x.num + g.d * x.den
    # a unimodular matrix keeps the pair primitive, so only the sign needs fixing
    if den == 0:
        return INF
    if den < 0:
        num, den = -num, -den
    return ExtRational._unsafe(num, den)


def _circle_key(x: ExtRational, origin: ExtRational):
    """Position of ``x`` when walking the circle upward from ``origin``."""
    if origin.den == 0:
        if x.den == 0:
            return (0, 0)
        return (1, x.to_fraction())
    if x.den == 0:
        return (1, 0)
    fx = Fraction(x.num, x.den)
    if fx >= Fraction(origin.num, origin.den):
        return (0, fx)
    return (2, fx)


@dataclass(frozen=True)
class Arc:
    """Closed arc from ``start`` to ``end`` in the increasing direction, wrapping through infinity."""

    start: ExtRational
    end: ExtRational

    def __post_init__(self):
        object.__setattr__(self, "start", ExtRational.coerce(self.start))
        object.__setattr__(self, "end", ExtRational.coerce(self.end))
        if self.start == self.end:
            raise ValueError(f"degenerate arc {self.start}..{self.end}")

    @classmethod
    def parse(cls, text: str) -> "Arc":
        if ".." not in text:
            raise ValueError(f"arc must be written start..end, got {text!r}")
        s, e = text.split("..", 1)
        return cls(ExtRational.parse(s), ExtRational.parse(e))

    def __str__(self) -> str:
        return f"{self.start}..{self.end}"

    @property
    def wraps(self) -> bool:
        """True when the arc passes through (or ends at) infinity."""
        return self.end.is_inf or self.start.is_inf or self.end < self.start

    def contains(self, x: ExtRational) -> bool:
        return arc_contains(self, x)

    def image(self, g: IntMatrix2) -> "Arc":
        return arc_image(g, self)

    def covers(self, other: "Arc") -> bool:
        """True when ``other`` is a subset of this arc."""
        ks = _circle_key(other.start, self.start)
        ke = _circle_key(other.end, self.start)
        return ks < ke <= _circle_key(self.end, self.start)

    def meets(self, other: "Arc") -> bool:
        """True when the two closed arcs share at least one point."""
        return self.contains(other.start) or self.contains(other.end) or other.contains(self.start)

    def complement_arc(self) -> "Arc":
        """The closure of the complement, i.e. ``end..start``."""
        return Arc(self.end, self.start)


def arc_contains(A: Arc, x: ExtRational) -> bool:
    return _circle_key(x, A.start) <= _circle_key(A.end, A.start)


def arc_image(g: IntMatrix2, A: Arc) -> Arc:
    # det > 0 preserves the cyclic orientation, so endpoints determine the image
    return Arc(mobius_apply(g, A.start), mobius_apply(g, A.end))
