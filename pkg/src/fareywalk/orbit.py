"""Exact word-metric orbit statistics for the Farey group acting on Q u {inf}.

For base points at a vertex of the base tile (0, 1 or inf) orbit counts are
computed on the Cayley tree: every subtree of reduced words sharing a prefix
sends the base point into one closed arc, so whole subtrees are accepted or
rejected at once and only the subtrees straddling a boundary are expanded.
Other base points fall back to enumerating the sphere.
"""
from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Optional

from .errors import ResourceCapError
from .exact import INF, Arc, ExtRational, arc_image, mobius_apply
from .group import (
    BASE_VERTICES,
    EDGE_ARC,
    GENERATOR_MATRICES,
    LETTERS,
    SPHERE_CAP,
    _raw_sphere,
    generator,
    sphere_size,
)
from .minkowski import measure_arc

# radius cap for the tree counter; enumeration is governed by SPHERE_CAP
TREE_CAP = 2000


class _Cover(enum.Enum):
    NONE = 0
    FULL = 1
    PARTIAL = 2


class _ArcTarget:
    def __init__(self, arc: Arc):
        self.arc = arc

    def contains(self, x: ExtRational) -> bool:
        return self.arc.contains(x)

    def classify(self, J: Arc) -> _Cover:
        if self.arc.covers(J):
            return _Cover.FULL
        if not self.arc.meets(J):
            return _Cover.NONE
        return _Cover.PARTIAL


class _HalfLine:
    """Points ``x <= t`` of the real line; infinity is never included."""

    def __init__(self, t: ExtRational):
        self.t = t
        self.arc = None if t.is_inf else Arc(INF, t)

    def contains(self, x: ExtRational) -> bool:
        return not x.is_inf and x <= self.t

    def classify(self, J: Arc) -> _Cover:
        if J.contains(INF):
            if self.arc is not None and J.end.is_inf and not self.arc.contains(J.start):
                return _Cover.NONE
            return _Cover.PARTIAL
        if self.arc is None or self.arc.covers(J):
            return _Cover.FULL
        if not self.arc.meets(J):
            return _Cover.NONE
        return _Cover.PARTIAL


def _vertex_index(base: ExtRational) -> Optional[int]:
    for i, v in enumerate(BASE_VERTICES):
        if v == base:
            return i
    return None


def _tree_count(n: int, base: ExtRational, target) -> int:
    if n == 0:
        return int(target.contains(base))
    total = 0
    stack = [(GENERATOR_MATRICES[s], s, n - 1) for s in LETTERS]
    while stack:
        m, last, depth = stack.pop()
        if depth == 0:
            total += target.contains(mobius_apply(m, base))
            continue
        # m = g * last, and the subtree below m lands in g . EDGE_ARC[last]
        bound = arc_image(m @ GENERATOR_MATRICES[last], EDGE_ARC[last])
        cover = target.classify(bound)
        if cover is _Cover.FULL:
            total += 1 << depth
        elif cover is _Cover.PARTIAL:
            for s in LETTERS:
                if s != last:
                    stack.append((m @ GENERATOR_MATRICES[s], s, depth - 1))
    return total


def orbit_points(n: int, base, cap: int = SPHERE_CAP) -> Iterator[tuple[str, ExtRational]]:
    """``(word, gamma . base)`` for every gamma of word length ``n``."""
    if n > cap:
        raise ResourceCapError("sphere radius", n, cap)
    base = ExtRational.coerce(base)
    x, y = base.num, base.den
    for word, (a, b, c, d) in _raw_sphere(n):
        yield word, ExtRational.from_pair(a * x + b * y, c * x + d * y)


@dataclass(frozen=True)
class OrbitTable:
    base: ExtRational
    level: int
    entries: tuple  # (word, point) pairs

    def __len__(self):
        return len(self.entries)

    def points(self) -> list:
        return [p for _, p in self.entries]


def orbit_table(n: int, base, cap: int = SPHERE_CAP) -> OrbitTable:
    base = ExtRational.coerce(base)
    return OrbitTable(base, n, tuple(orbit_points(n, base, cap)))


def _check_radius(n: int, base: ExtRational, cap: Optional[int]):
    if n < 0:
        raise ValueError("radius must be non-negative")
    vertex = _vertex_index(base) is not None
    limit = cap if cap is not None else (TREE_CAP if vertex else SPHERE_CAP)
    if n > limit:
        raise ResourceCapError("sphere radius", n, limit)
    return vertex


def sphere_count_in_arc(n: int, A: Arc, base=0, cap: Optional[int] = None) -> int:
    """Number of gamma with word length ``n`` and ``gamma . base`` in the closed arc ``A``."""
    base = ExtRational.coerce(base)
    if _check_radius(n, base, cap):
        return _tree_count(n, base, _ArcTarget(A))
    return sum(1 for _, x in orbit_points(n, base, n) if A.contains(x))


def sphere_count_below(n: int, t, base=0, cap: Optional[int] = None) -> int:
    """Number of gamma with word length ``n`` and finite ``gamma . base <= t``."""
    base, t = ExtRational.coerce(base), ExtRational.coerce(t)
    if _check_radius(n, base, cap):
        return _tree_count(n, base, _HalfLine(t))
    return sum(1 for _, x in orbit_points(n, base, n) if not x.is_inf and x <= t)


class WordLimitRow(NamedTuple):
    n: int
    count: int
    ratio: Fraction


@dataclass(frozen=True)
class WordLimitTable:
    arc: Arc
    base: ExtRational
    rows: tuple
    target: Fraction

    def errors(self) -> list:
        return [abs(r.ratio - self.target) for r in self.rows]


def word_limit_table(A: Arc, base=0, n_max: int = 12, cap: Optional[int] = None) -> WordLimitTable:
    """``S_n / |Gamma_n|`` for the indicator of ``A`` for n = 1..n_max, and its limit mass."""
    base = ExtRational.coerce(base)
    _check_radius(n_max, base, cap)
    rows = []
    for n in range(1, n_max + 1):
        count = sphere_count_in_arc(n, A, base, cap)
        rows.append(WordLimitRow(n, count, Fraction(count, sphere_size(n))))
    return WordLimitTable(A, base, tuple(rows), measure_arc(A))


@dataclass(frozen=True)
class DistanceDistribution:
    """Law of the word length after ``step`` uniform steps on {a, b, c}."""

    step: int
    mass: dict

    def __getitem__(self, m: int) -> Fraction:
        return self.mass.get(m, Fraction(0))

    def per_element(self, m: int) -> Fraction:
        """Mass the walk puts on each single element of word length ``m``."""
        return self[m] / sphere_size(m)

    def support(self) -> list:
        return sorted(m for m, p in self.mass.items() if p)


def distance_distribution(n: int) -> DistanceDistribution:
    if n < 0:
        raise ValueError("step count must be non-negative")
    third = Fraction(1, 3)
    probs = {0: Fraction(1)}
    for _ in range(n):
        nxt: dict = {}
        for m, p in probs.items():
            if m == 0:
                nxt[1] = nxt.get(1, 0) + p
            else:
                nxt[m + 1] = nxt.get(m + 1, 0) + 2 * third * p
                nxt[m - 1] = nxt.get(m - 1, 0) + third * p
        probs = nxt
    return DistanceDistribution(n, {m: Fraction(p) for m, p in sorted(probs.items())})


def convolution_cdf(n: int, x0, points: Iterable, cap: Optional[int] = None) -> list:
    """CDF on the real line of the law of ``g . x0`` after ``n`` uniform steps.

    The walk law is spread evenly over each sphere, so the CDF at ``t`` is
    ``sum_m P_n(m) / |Gamma_m| * #{gamma in Gamma_m : gamma . x0 <= t}``.
    Orbit points at infinity contribute to no finite ``t``.
    """
    x0 = ExtRational.coerce(x0)
    points = [ExtRational.coerce(t) for t in points]
    vertex = _check_radius(n, x0, cap)
    dist = distance_distribution(n)
    support = dist.support()
    if vertex:
        return [
            sum((dist.per_element(m) * _tree_count(m, x0, _HalfLine(t)) for m in support), Fraction(0))
            for t in points
        ]
    # enumeration: sort each sphere's finite orbit points once
    sorted_orbits = {}
    for m in support:
        sorted_orbits[m] = sorted(x.to_fraction() for _, x in orbit_points(m, x0, n) if not x.is_inf)
    out = []
    for t in points:
        acc = Fraction(0)
        for m in support:
            if t.is_inf:
                k = len(sorted_orbits[m])
            else:
                k = bisect.bisect_right(sorted_orbits[m], t.to_fraction())
            acc += dist.per_element(m) * k
        out.append(acc)
    return out


def stationarity_check(A: Arc) -> tuple[Fraction, Fraction]:
    """``(mean of measure(s . A) over s in {a, b, c}, measure(A))``; equal when the measure is stationary."""
    images = [arc_image(generator(s).matrix, A) for s in LETTERS]
    lhs = sum((measure_arc(B) for B in images), Fraction(0)) / 3
    return lhs, measure_arc(A)
