"""The Farey group: the free product of three involutions a, b, c acting on
the extended rational line as integer Moebius maps.

Elements are sign-normalised matrices, optionally carrying their reduced word.
Reduced words are strings over ``"abc"`` with no letter repeated twice in a row.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import NotInGroupError, ResourceCapError
from .exact import INF, ONE, ZERO, Arc, ExtRational, IntMatrix2, mobius_apply

SPHERE_CAP = 22
LETTERS = "abc"

GENERATOR_MATRICES = {
    "a": IntMatrix2(1, -2, 1, -1),
    "b": IntMatrix2(0, -1, 1, 0),
    "c": IntMatrix2(1, -1, 2, -1),
}

# Each generator reflects the base tile T(0, 1, inf) across one edge; the
# subtree of words starting with that letter lives on the closed arc cut off by
# that edge.  The vertex of the base tile *not* on the edge identifies it.
EDGE_ARC = {
    "a": Arc(ONE, INF),
    "b": Arc(INF, ZERO),
    "c": Arc(ZERO, ONE),
}


def reduce_word(word: str) -> str:
    """Cancel adjacent equal letters (``ss = e``) until none remain."""
    stack = []
    for ch in word:
        if ch not in LETTERS:
            raise ValueError(f"unknown generator {ch!r}")
        if stack and stack[-1] == ch:
            stack.pop()
        else:
            stack.append(ch)
    return "".join(stack)


def is_reduced(word: str) -> bool:
    return all(ch in LETTERS for ch in word) and all(x != y for x, y in zip(word, word[1:]))


@dataclass(frozen=True)
class GroupElement:
    matrix: IntMatrix2
    word: Optional[str] = field(default=None, compare=False)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def __call__(self, x: ExtRational) -> ExtRational:
        return mobius_apply(self.matrix, x)

    @property
    def length(self) -> int:
        return len(self.word if self.word is not None else word_of(self))

    def __str__(self):
        w = self.word if self.word is not None else word_of(self)
        return w or "e"


IDENTITY = GroupElement(IntMatrix2.identity(), "")


def generator(name: str) -> GroupElement:
    if name not in GENERATOR_MATRICES:
        raise ValueError(f"generator must be one of a, b, c; got {name!r}")
    return GroupElement(GENERATOR_MATRICES[name], name)


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    word = None
    if g.word is not None and h.word is not None:
        word = reduce_word(g.word + h.word)
    return GroupElement(g.matrix @ h.matrix, word)


def element_from_word(word: str) -> GroupElement:
    m = IntMatrix2.identity()
    for ch in word:
        if ch not in GENERATOR_MATRICES:
            raise ValueError(f"unknown generator {ch!r}")
        m = m @ GENERATOR_MATRICES[ch]
    return GroupElement(m, reduce_word(word))


def sphere_size(n: int) -> int:
    return 1 if n == 0 else 3 * 2 ** (n - 1)


def _raw_sphere(n: int):
    """Yield ``(word, (a, b, c, d))`` for every reduced word of length ``n``.

    Depth-first, one generator multiplication per tree node.  Matrices are
    unnormalised here; callers normalise if they need a canonical sign.
    """
    gens = {s: (m.a, m.b, m.c, m.d) for s, m in GENERATOR_MATRICES.items()}
    if n == 0:
        yield "", (1, 0, 0, 1)
        return
    stack = [(s, gens[s]) for s in reversed(LETTERS)]
    while stack:
        word, (a, b, c, d) = stack.pop()
        if len(word) == n:
            yield word, (a, b, c, d)
            continue
        last = word[-1]
        for s in reversed(LETTERS):
            if s == last:
                continue
            e, f, g, h = gens[s]
            stack.append((word + s, (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)))


def sphere(n: int, cap: int = SPHERE_CAP) -> Iterator[GroupElement]:
    """Every element of word length exactly ``n``, once each, in lexicographic word order."""
    if n < 0:
        raise ValueError("radius must be non-negative")
    if n > cap:
        raise ResourceCapError("sphere radius", n, cap)
    for word, (a, b, c, d) in _raw_sphere(n):
        yield GroupElement(IntMatrix2(a, b, c, d), word)


@dataclass(frozen=True)
class Tile:
    """Vertex triple of a Farey tile in increasing order, infinity last when present."""

    vertices: tuple

    def __post_init__(self):
        if len(set(self.vertices)) != 3:
            raise ValueError(f"tile vertices must be distinct: {self.vertices}")
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))

    @property
    def has_inf(self) -> bool:
        return self.vertices[2].is_inf

    @property
    def outer(self) -> tuple:
        return self.vertices[0], self.vertices[2]

    @property
    def middle(self) -> ExtRational:
        return self.vertices[1]

    def __iter__(self):
        return iter(self.vertices)

    def __str__(self):
        return "T(" + ", ".join(str(v) for v in self.vertices) + ")"


BASE_VERTICES = (ZERO, ONE, INF)


def tile(g: GroupElement) -> Tile:
    return Tile(tuple(mobius_apply(g.matrix, v) for v in BASE_VERTICES))


def _parent_edge(verts) -> Optional[frozenset]:
    """Edge of the tile facing the base tile, or None for the base tile itself."""
    p, r, q = verts
    if q.is_inf:
        # T(m, m+1, inf)
        if p == ZERO:
            return None
        if p > ZERO:
            return frozenset((p, INF))
        return frozenset((r, INF))
    return frozenset((p, q))


_LETTER_OPPOSITE = {0: "a", 1: "b", 2: "c"}  # index into BASE_VERTICES of the vertex off the edge


def word_of(g: GroupElement, max_steps: Optional[int] = None) -> str:
    """Reduced word of ``g`` by walking its tile back to the base tile.

    At each step the unique neighbour tile nearer the base is the one across
    the edge computed by ``_parent_edge``; the letter crossed is the last
    letter of the word.  Raises NotInGroupError when descent ends on the base
    tile with a non-identity matrix or exceeds the step budget.
    """
    m = g.matrix
    if max_steps is None:
        bits = max(abs(m.a), abs(m.b), abs(m.c), abs(m.d)).bit_length()
        max_steps = 4 * (bits + 2)
    letters = []
    for _ in range(max_steps + 1):
        images = [mobius_apply(m, v) for v in BASE_VERTICES]
        edge = _parent_edge(sorted(images))
        if edge is None:
            if m != IntMatrix2.identity():
                raise NotInGroupError(f"{m.rows()} fixes the base tile but is not the identity")
            return "".join(reversed(letters))
        off = [i for i, x in enumerate(images) if x not in edge]
        if len(off) != 1:
            raise NotInGroupError(f"descent lost track of the tile at {m.rows()}")
        s = _LETTER_OPPOSITE[off[0]]
        letters.append(s)
        m = m @ GENERATOR_MATRICES[s]
    raise NotInGroupError(f"no descent to the base tile within {max_steps} steps")


def with_word(g: GroupElement) -> GroupElement:
    if g.word is not None:
        return g
    return GroupElement(g.matrix, word_of(g))
