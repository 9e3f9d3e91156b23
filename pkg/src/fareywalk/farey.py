"""Mediant-interleaved Farey sequences and Stern-Brocot descent on [0, 1].

``farey_sequence(n)`` is the level-n sequence obtained from ``(0, 1)`` by
inserting the mediant between every pair of neighbours ``n`` times, so it has
``2**n + 1`` terms.  This is not the classical denominator-bounded sequence.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ResourceCapError
from .exact import ONE, ZERO, ExtRational, mediant

FAREY_LEVEL_CAP = 20

LEFT = "L"
RIGHT = "R"


@dataclass(frozen=True)
class FareySequence:
    level: int
    terms: tuple

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    def pairs(self):
        """Adjacent pairs ``(terms[i], terms[i + 1])``."""
        return zip(self.terms, self.terms[1:])


def farey_sequence(n: int, cap: int = FAREY_LEVEL_CAP) -> FareySequence:
    if n < 0:
        raise ValueError("level must be non-negative")
    if n > cap:
        raise ResourceCapError("farey level", n, cap)
    # work on (num, den) pairs; neighbours of a Farey pair stay coprime
    terms = [(0, 1), (1, 1)]
    for _ in range(n):
        nxt = [terms[0]]
        for (p, q), (r, s) in zip(terms, terms[1:]):
            nxt.append((p + r, q + s))
            nxt.append((r, s))
        terms = nxt
    return FareySequence(n, tuple(ExtRational._unsafe(p, q) for p, q in terms))


def is_farey_pair(p: ExtRational, q: ExtRational) -> bool:
    """Unimodularity test ``bc - ad == 1`` for ``p = a/b < q = c/d``."""
    return p.den * q.num - p.num * q.den == 1


def stern_brocot_path(x: ExtRational) -> str:
    """Left/right descent from the bracket (0, 1) ending at ``x``.

    Returned as a string over ``"LR"``; the empty string is the root 1/2.
    """
    x = ExtRational.coerce(x)
    if not (ZERO < x < ONE):
        raise ValueError(f"descent path is defined on the open interval (0, 1), got {x}")
    lo_p, lo_q, hi_p, hi_q = 0, 1, 1, 1
    steps = []
    while True:
        m_p, m_q = lo_p + hi_p, lo_q + hi_q
        # compare x with m_p/m_q
        lhs, rhs = x.num * m_q, m_p * x.den
        if lhs == rhs:
            return "".join(steps)
        if lhs < rhs:
            steps.append(LEFT)
            hi_p, hi_q = m_p, m_q
        else:
            steps.append(RIGHT)
            lo_p, lo_q = m_p, m_q


def follow_path(path: str) -> tuple[ExtRational, ExtRational, ExtRational]:
    """Bracket ``(lo, hi)`` reached by ``path`` and its mediant, as ``(lo, mediant, hi)``."""
    lo, hi = ZERO, ONE
    for step in path:
        m = mediant(lo, hi)
        if step == LEFT:
            hi = m
        elif step == RIGHT:
            lo = m
        else:
            raise ValueError(f"bad step {step!r}")
    return lo, mediant(lo, hi), hi


def farey_pair_level(p: ExtRational, q: ExtRational) -> Optional[int]:
    """Least ``n`` with ``p, q`` adjacent in ``farey_sequence(n)``, or None.

    Found by descending to the mediant ``p (+) q``: a pair first becomes
    adjacent at the level equal to the descent depth of its mediant.
    """
    p, q = ExtRational.coerce(p), ExtRational.coerce(q)
    if p.is_inf or q.is_inf or not (ZERO <= p < q <= ONE):
        raise ValueError(f"need 0 <= p < q <= 1, got {p}, {q}")
    if not is_farey_pair(p, q):
        return None
    return len(stern_brocot_path(mediant(p, q)))


def first_level(x: ExtRational) -> int:
    """Level at which ``x`` first appears in the sequence (0 for the endpoints)."""
    x = ExtRational.coerce(x)
    if x == ZERO or x == ONE:
        return 0
    return len(stern_brocot_path(x)) + 1
