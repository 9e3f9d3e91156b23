"""Minkowski's question-mark function, its extension to the whole line, and
the extended Minkowski measure of arcs.

Two independent evaluators of ``?`` on rationals are provided: the dyadic
descent (ground truth) and the continued-fraction alternating sum.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

import numpy as np

from .exact import INF, ONE, ZERO, Arc, ExtRational
from .farey import LEFT, stern_brocot_path


@dataclass(frozen=True)
class Dyadic:
    """The dyadic rational ``numerator / 2**exponent`` in lowest terms."""

    numerator: int
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be non-negative")
        k, n = self.numerator, self.exponent
        while n > 0 and k % 2 == 0:
            k //= 2
            n -= 1
        object.__setattr__(self, "numerator", k)
        object.__setattr__(self, "exponent", n)

    @classmethod
    def from_fraction(cls, value) -> "Dyadic":
        value = Fraction(value)
        den = value.denominator
        n = den.bit_length() - 1
        if den != 1 << n:
            raise ValueError(f"{value} is not a dyadic rational")
        return cls(value.numerator, n)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self):
        return float(self.to_fraction())

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.numerator == other.numerator and self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __str__(self):
        return str(self.to_fraction())


def question_mark(x) -> Dyadic:
    """``?(x)`` for rational ``x`` in [0, 1] by Stern-Brocot descent.

    Each left step keeps the lower half of the current dyadic interval and each
    right step the upper half; the value at the final mediant is the midpoint.
    """
    x = ExtRational.coerce(x)
    if x.is_inf or x < ZERO or x > ONE:
        raise ValueError(f"question_mark needs 0 <= x <= 1, got {x}")
    if x == ZERO:
        return Dyadic(0, 0)
    if x == ONE:
        return Dyadic(1, 0)
    lo = 0
    path = stern_brocot_path(x)
    for step in path:
        lo = 2 * lo if step == LEFT else 2 * lo + 1
    return Dyadic(2 * lo + 1, len(path) + 1)


def continued_fraction(x: Fraction) -> list[int]:
    """Continued-fraction coefficients ``[a0; a1, ..., an]`` of a rational."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    coeffs = []
    while q:
        a, r = divmod(p, q)
        coeffs.append(a)
        p, q = q, r
    return coeffs


def question_mark_cf(x) -> Dyadic:
    """``?(x) = a0 + 2 * sum_k (-1)**(k+1) / 2**(a1 + ... + ak)``."""
    x = ExtRational.coerce(x)
    if x.is_inf or x < ZERO or x > ONE:
        raise ValueError(f"question_mark_cf needs 0 <= x <= 1, got {x}")
    a0, *rest = continued_fraction(x.to_fraction())
    total = Fraction(a0)
    expo = 0
    sign = 1
    for a in rest:
        expo += a
        total += sign * Fraction(2, 1 << expo)
        sign = -sign
    return Dyadic.from_fraction(total)


def question_mark_inverse(d) -> ExtRational:
    """The rational ``x`` in [0, 1] with ``question_mark(x) == d``."""
    target = d.to_fraction() if isinstance(d, Dyadic) else Fraction(d)
    Dyadic.from_fraction(target)  # validates dyadic-ness
    if not 0 <= target <= 1:
        raise ValueError(f"{target} is outside [0, 1]")
    if target == 0:
        return ZERO
    if target == 1:
        return ONE
    lo_p, lo_q, hi_p, hi_q = 0, 1, 1, 1
    v_lo, v_hi = Fraction(0), Fraction(1)
    while True:
        mid = (v_lo + v_hi) / 2
        m_p, m_q = lo_p + hi_p, lo_q + hi_q
        if target == mid:
            return ExtRational(m_p, m_q)
        if target < mid:
            hi_p, hi_q, v_hi = m_p, m_q, mid
        else:
            lo_p, lo_q, v_lo = m_p, m_q, mid


def _tail(m: int) -> Fraction:
    # sum_{k <= m-1} 2**-|k|
    if m <= 0:
        return Fraction(1, 1 << -m)
    return 3 - Fraction(2, 1 << m)


def mbar(x) -> Fraction:
    """Extended question-mark function on the line; ``mbar(inf) == 1``.

    On ``[m, m + 1)`` it is ``(tail(m) + ?({x}) / 2**|m|) / 3`` where ``tail``
    is the geometric sum of ``2**-|k|`` over ``k < m``.
    """
    x = ExtRational.coerce(x)
    if x.is_inf:
        return Fraction(1)
    m = x.num // x.den
    frac = ExtRational._unsafe(x.num - m * x.den, x.den)
    return (_tail(m) + question_mark(frac).to_fraction() / (1 << abs(m))) / 3


def measure_arc(A: Arc) -> Fraction:
    """Extended Minkowski measure of the closed arc ``A`` (atomless, so closedness is immaterial)."""
    if A.start.is_inf:
        return mbar(A.end)
    if A.end.is_inf or A.start < A.end:
        return mbar(A.end) - mbar(A.start)
    return 1 - mbar(A.start) + mbar(A.end)


def measure_interval(lo, hi) -> Fraction:
    """Mass of ``[lo, hi]`` on the real line; ``lo`` may be ``None`` for minus infinity."""
    upper = mbar(hi)
    return upper if lo is None else upper - mbar(lo)


# ---------------------------------------------------------------------------
# floating-point evaluation for comparisons against samples

_MAX_EXPONENT = 1100


def question_mark_float(x: float) -> float:
    """``?(x)`` of a float via the exact continued fraction of its binary value."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"question_mark_float needs 0 <= x <= 1, got {x}")
    a0, *rest = continued_fraction(Fraction(x))
    total = float(a0)
    expo = 0
    sign = 1.0
    for a in rest:
        expo += a
        if expo > _MAX_EXPONENT:
            break
        total += sign * 2.0 ** (1 - expo)
        sign = -sign
    return total


def question_mark_array(x, iterations: int = 64) -> np.ndarray:
    """Vectorised ``?`` on an array in [0, 1] using the Gauss map in float64.

    Terms are dropped once their weight falls below ``2**-60``; accuracy is
    limited by rounding in the map, typically around 1e-12.
    """
    y = np.array(x, dtype=np.float64, copy=True)
    if np.any((y < 0) | (y > 1)):
        raise ValueError("question_mark_array needs values in [0, 1]")
    out = np.zeros_like(y)
    expo = np.zeros_like(y)
    sign = np.ones_like(y)
    active = y > 0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for _ in range(iterations):
            if not active.any():
                break
            inv = 1.0 / np.where(active, y, 1.0)
            a = np.floor(inv)
            expo = np.where(active, expo + a, expo)
            out = np.where(active, out + sign * np.exp2(1.0 - expo), out)
            sign = -sign
            y = np.where(active, inv - a, 0.0)
            active = active & (y > 0) & (expo < 60)
    return out


def mbar_array(x) -> np.ndarray:
    """Vectorised ``mbar`` on floats; ``+inf -> 1`` and ``-inf -> 0``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos_inf = np.isposinf(x)
    neg_inf = np.isneginf(x)
    finite = ~(pos_inf | neg_inf)
    xf = x[finite]
    m = np.floor(xf)
    frac = np.clip(xf - m, 0.0, 1.0)
    with np.errstate(over="ignore"):
        tail = np.where(m <= 0, np.exp2(m), 3.0 - np.exp2(1.0 - m))
        scale = np.exp2(-np.abs(m))
    out[finite] = (tail + question_mark_array(frac) * scale) / 3.0
    out[pos_inf] = 1.0
    out[neg_inf] = 0.0
    return out


def mbar_float(x: float) -> float:
    if x == float("inf"):
        return 1.0
    if x == float("-inf"):
        return 0.0
    m = floor(x)
    tail = 2.0 ** m if m <= 0 else 3.0 - 2.0 ** (1 - m)
    return (tail + question_mark_float(x - m) * 2.0 ** -abs(m)) / 3.0


__all__ = [
    "Dyadic",
    "INF",
    "continued_fraction",
    "mbar",
    "mbar_array",
    "mbar_float",
    "measure_arc",
    "measure_interval",
    "question_mark",
    "question_mark_array",
    "question_mark_cf",
    "question_mark_float",
    "question_mark_inverse",
]
