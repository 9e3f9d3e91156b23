import itertools
import math

import pytest

from fareywalk.errors import NotInGroupError, ResourceCapError
from fareywalk.exact import INF, ONE, ZERO, ExtRational, IntMatrix2, mediant
from fareywalk.farey import farey_pair_level, first_level
from fareywalk.group import (
    GroupElement,
    IDENTITY,
    element_from_word,
    generator,
    is_reduced,
    multiply,
    reduce_word,
    sphere,
    sphere_size,
    tile,
    with_word,
    word_of,
)

E = ExtRational
MINUS_I = ((-1, 0), (0, -1))


def raw_product(word):
    """Plain 2x2 integer product with no sign normalisation."""
    gens = {"a": ((1, -2), (1, -1)), "b": ((0, -1), (1, 0)), "c": ((1, -1), (2, -1))}
    m = ((1, 0), (0, 1))
    for ch in word:
        g = gens[ch]
        m = tuple(tuple(sum(m[i][k] * g[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    return m


def reduced_words(n):
    for letters in itertools.product("abc", repeat=n):
        if all(x != y for x, y in zip(letters, letters[1:])):
            yield "".join(letters)


@pytest.mark.parametrize(
    "name, rows",
    [("a", ((1, -2), (1, -1))), ("b", ((0, -1), (1, 0))), ("c", ((1, -1), (2, -1)))],
)
def test_generators(name, rows):
    g = generator(name)
    assert g.matrix.rows() == rows and g.word == name


@pytest.mark.parametrize("s", "abc")
def test_generators_are_involutions(s):
    assert raw_product(s + s) == MINUS_I
    assert multiply(generator(s), generator(s)) == IDENTITY
    assert multiply(generator(s), generator(s)).word == ""


def test_multiply_examples():
    ab = multiply(generator("a"), generator("b"))
    assert ab.word == "ab"
    assert ab.matrix == IntMatrix2(-2, -1, -1, -1)
    assert ab.matrix.rows() == ((2, 1), (1, 1))
    g = element_from_word("cab")
    assert multiply(g, IDENTITY) == g and multiply(g, IDENTITY).word == "cab"


def test_word_cache_reduces():
    assert reduce_word("abba") == ""
    assert reduce_word("abcca") == "aba"
    assert is_reduced("abcab") and not is_reduced("abb")
    g = multiply(element_from_word("abc"), element_from_word("cba"))
    assert g == IDENTITY and g.word == ""


@pytest.mark.parametrize("n, size", [(0, 1), (1, 3), (5, 48)])
def test_sphere_examples(n, size):
    assert len(list(sphere(n))) == size == sphere_size(n)


def test_sphere_one_is_generators():
    assert {g.word for g in sphere(1)} == {"a", "b", "c"}


def test_sphere_matches_independent_products():
    for n in range(7):
        by_words = {w: raw_product(w) for w in reduced_words(n)}
        got = {g.word: g.matrix for g in sphere(n)}
        assert set(got) == set(by_words)
        for w, m in by_words.items():
            assert got[w] == IntMatrix2(m[0][0], m[0][1], m[1][0], m[1][1])


def test_sphere_cap():
    with pytest.raises(ResourceCapError):
        next(sphere(23))
    with pytest.raises(ResourceCapError):
        next(sphere(4, cap=3))


@pytest.mark.parametrize(
    "word, vertices",
    [("", (ZERO, ONE, INF)), ("a", (ONE, E(2), INF)), ("c", (ZERO, E(1, 2), ONE))],
)
def test_tile_examples(word, vertices):
    assert tile(element_from_word(word)).vertices == vertices


@pytest.mark.parametrize("n", range(1, 9))
def test_neighbour_tiles_share_an_edge(n):
    for g in sphere(n):
        verts = set(tile(g))
        for s in "abc":
            assert len(verts & set(tile(multiply(g, generator(s))))) == 2


@pytest.mark.parametrize("n", range(1, 11))
def test_tiles_inside_unit_interval(n):
    seen = 0
    for g in sphere(n):
        t = tile(g)
        if t.has_inf or t.vertices[0] < ZERO or t.vertices[2] > ONE:
            continue
        p, r, q = t.vertices
        assert first_level(r) == n
        assert farey_pair_level(p, q) == n - 1
        assert r == mediant(p, q)
        seen += 1
    assert seen == 2 ** (n - 1)


@pytest.mark.parametrize("n", range(1, 11))
def test_extended_tile_classification(n):
    for g in sphere(n):
        p, r, q = tile(g).vertices
        if q.is_inf:
            assert (p, r) in ((E(n), E(n + 1)), (E(-n), E(1 - n)))
            continue
        m = math.floor(p.num / p.den)
        P, R, Q = (E(x.num - m * x.den, x.den) for x in (p, r, q))
        assert farey_pair_level(P, Q) == n - abs(m) - 1
        assert R == mediant(P, Q)


def test_tile_containment_iff_prefix():
    elems = [g for n in range(1, 8) for g in sphere(n)]
    finite = [(g, tile(g)) for g in elems if not tile(g).has_inf]
    for g, tg in finite:
        lo, hi = tg.vertices[0], tg.vertices[2]
        for h, th in finite:
            if len(h.word) < len(g.word):
                continue
            inside = lo <= th.vertices[0] and th.vertices[2] <= hi
            assert inside == h.word.startswith(g.word), (g.word, h.word)


def test_word_of_examples():
    assert word_of(IDENTITY) == ""
    assert word_of(multiply(generator("a"), generator("b"))) == "ab"


def test_word_of_round_trip_sphere_8():
    elems = list(sphere(8))
    assert len(elems) == 384
    for g in elems:
        assert word_of(GroupElement(g.matrix)) == g.word


def test_word_of_round_trip_all_short_words():
    for n in range(11):
        for w in reduced_words(n):
            assert word_of(GroupElement(element_from_word(w).matrix)) == w


def test_sphere_matrices_distinct_small():
    for n in range(1, 11):
        mats = [g.matrix for g in sphere(n)]
        assert len(set(mats)) == len(mats)


@pytest.mark.parametrize("rows", [(1, 1, 0, 1), (1, 0, 1, 1), (0, 1, -1, 1)])
def test_not_in_group(rows):
    with pytest.raises(NotInGroupError):
        word_of(GroupElement(IntMatrix2(*rows)))


def test_with_word_fills_cache():
    assert with_word(GroupElement(IntMatrix2(2, 1, 1, 1))).word == "ab"
