import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fareywalk.exact import INF, ONE, ZERO, Arc, ExtRational, mediant
from fareywalk.farey import farey_sequence
from fareywalk.minkowski import (
    Dyadic,
    continued_fraction,
    mbar,
    mbar_array,
    mbar_float,
    measure_arc,
    question_mark,
    question_mark_array,
    question_mark_cf,
    question_mark_float,
    question_mark_inverse,
)

E = ExtRational
F10 = farey_sequence(10)


def index_oracle(x, n=10):
    """?(x) = k / 2**n when x is the (k+1)-th term of the level-n sequence."""
    return Fraction(farey_sequence(n).terms.index(x), 2**n)


@pytest.mark.parametrize("x, value", [(ZERO, 0), (E(1, 2), Fraction(1, 2)), (E(2, 5), Fraction(3, 8)), (E(1, 3), Fraction(1, 4)), (ONE, 1)])
def test_question_mark_examples(x, value):
    assert question_mark(x) == value
    assert question_mark_cf(x) == value


def test_agrees_with_index_definition():
    for x in farey_sequence(6):
        assert question_mark(x).to_fraction() == index_oracle(x, 6)


def test_dual_construction_on_level_10():
    for x in F10:
        assert question_mark(x) == question_mark_cf(x)


def test_midpoint_law_and_pair_gap():
    for n in range(11):
        for p, q in farey_sequence(n).pairs():
            mp, mq = question_mark(p).to_fraction(), question_mark(q).to_fraction()
            assert mq - mp == Fraction(1, 2**n)
            assert question_mark(mediant(p, q)).to_fraction() == (mp + mq) / 2


def test_inverse_round_trip():
    for x in F10:
        assert question_mark_inverse(question_mark(x)) == x


@pytest.mark.parametrize("d, x", [(Fraction(1, 2), E(1, 2)), (Fraction(3, 8), E(2, 5)), (Fraction(1, 4), E(1, 3))])
def test_inverse_examples(d, x):
    assert question_mark_inverse(Dyadic.from_fraction(d)) == x


def test_inverse_rejects_non_dyadic():
    with pytest.raises(ValueError):
        question_mark_inverse(Fraction(1, 3))


def test_dyadic_canonical():
    d = Dyadic(6, 4)
    assert (d.numerator, d.exponent) == (3, 3)
    assert Dyadic(0, 5) == Dyadic(0, 0)


def test_continued_fraction():
    assert continued_fraction(Fraction(2, 5)) == [0, 2, 2]
    assert continued_fraction(Fraction(1)) == [1]


@pytest.mark.parametrize("x, value", [(ZERO, Fraction(1, 3)), (ONE, Fraction(2, 3)), (E(-1), Fraction(1, 6)), (INF, 1)])
def test_mbar_examples(x, value):
    assert mbar(x) == value


def test_mbar_tails():
    assert mbar(E(-10**6)) < Fraction(1, 2**1000)
    assert 1 - mbar(E(10**6)) < Fraction(1, 2**1000)


def test_mbar_closed_form_branches():
    # direct partial sum of the geometric series as an independent check
    for m in range(-10, 11):
        tail = sum(Fraction(1, 2 ** abs(k)) for k in range(-200, m))
        expected = tail / 3
        assert abs(mbar(E(m)) - expected) < Fraction(1, 2**190)
        assert measure_arc(Arc(E(m), E(m + 1))) == Fraction(1, 3 * 2 ** abs(m))


def test_mbar_strictly_increasing():
    rng = random.Random(11)
    xs = sorted({E(rng.randint(-300, 300), rng.randint(1, 40)) for _ in range(500)})
    vals = [mbar(x) for x in xs]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("arc, mass", [(Arc(ZERO, ONE), Fraction(1, 3)), (Arc(ONE, ZERO), Fraction(2, 3))])
def test_measure_examples(arc, mass):
    assert measure_arc(arc) == mass


def test_farey_pair_arc_mass():
    for n in range(9):
        for p, q in farey_sequence(n).pairs():
            assert measure_arc(Arc(p, q)) == Fraction(1, 3 * 2**n)


@given(st.integers(-50, 50), st.integers(1, 30), st.integers(-50, 50), st.integers(1, 30))
def test_complementary_arcs_sum_to_one(p, q, r, s):
    x, y = E(p, q), E(r, s)
    if x == y:
        return
    assert measure_arc(Arc(x, y)) + measure_arc(Arc(y, x)) == 1
    assert measure_arc(Arc(INF, x)) + measure_arc(Arc(x, INF)) == 1


def test_float_evaluators_agree_with_exact():
    for x in list(F10)[::7]:
        assert question_mark_float(float(x)) == pytest.approx(float(question_mark(x)), abs=1e-15)
    rng = np.random.default_rng(5)
    xs = rng.random(2000)
    scalar = np.array([question_mark_float(v) for v in xs])
    assert np.max(np.abs(question_mark_array(xs) - scalar)) < 1e-9
    ys = np.concatenate([rng.normal(scale=5, size=500), [np.inf, -np.inf, 0.0, 1.0, -3.0]])
    expect = np.array([mbar_float(v) for v in ys])
    assert np.max(np.abs(mbar_array(ys) - expect)) < 1e-9


@settings(max_examples=200)
@given(st.integers(-30, 30), st.integers(1, 60))
def test_mbar_float_matches_exact(p, q):
    x = E(p, q)
    assert mbar_float(float(x)) == pytest.approx(float(mbar(x)), abs=1e-12)
