"""Gray codes, zig-zag level codes, and edge rankings of path graphs.

The binary codes here drive the disjunctive formulations: a code word per
member set, consecutive words at Hamming distance one.  Edge rankings of
the chain's path graph are the second route to the same covers; a ranking
where every pair of equal labels is separated by a strictly smaller label
converts into a Gray code by flipping the labelled coordinate at each step.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import UsageError, ValidationError

Word = tuple[int, ...]


@dataclass(frozen=True)
class GrayCode:
    """Sequence of distinct binary words, consecutive pairs differing in one bit."""

    words: tuple[Word, ...]

    def __post_init__(self):
        if not self.words:
            raise ValidationError("code needs at least one word")
        width = len(self.words[0])
        for w in self.words:
            if len(w) != width:
                raise ValidationError("all words must share one width")
            if any(b not in (0, 1) for b in w):
                raise ValidationError("words must be binary")
        if len(set(self.words)) != len(self.words):
            raise ValidationError("words must be distinct")
        for a, b in zip(self.words, self.words[1:]):
            if sum(x != y for x, y in zip(a, b)) != 1:
                raise ValidationError(
                    f"consecutive words {a} and {b} differ in != 1 bit")

    @property
    def width(self) -> int:
        return len(self.words[0])

    def __len__(self) -> int:
        return len(self.words)

    def bit(self, i: int, j: int) -> int:
        """Bit j (1-based) of word i (1-based)."""
        return self.words[i - 1][j - 1]


@dataclass(frozen=True)
class EdgeRanking:
    """Edge labels of a path graph, one per edge, validated on construction."""

    labels: tuple[int, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValidationError("ranking needs at least one edge")
        if any((not isinstance(x, int)) or x < 1 for x in self.labels):
            raise ValidationError("labels must be positive integers")
        if not is_reversed_edge_ranking(self.labels):
            raise ValidationError(
                f"{self.labels} has equal labels with no smaller label between")

    @property
    def rank_count(self) -> int:
        return max(self.labels)

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class ZigzagCode:
    """Per-coordinate cumulative flip counts along a reflected code."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.rows:
            raise ValidationError("zig-zag code needs at least one row")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ValidationError("rows must share one width")
        if any(x != 0 for x in self.rows[0]):
            raise ValidationError("first row must be all zeros")
        for a, b in zip(self.rows, self.rows[1:]):
            deltas = [y - x for x, y in zip(a, b)]
            if sorted(deltas) != [0] * (width - 1) + [1]:
                raise ValidationError("each row must add 1 in one coordinate")

    @property
    def width(self) -> int:
        return len(self.rows[0])


def brgc(b: int) -> GrayCode:
    """Reflected binary code on b bits: prefix 0 over the (b-1)-code, then
    prefix 1 over its reverse.  Most significant bit first."""
    if b < 1:
        raise UsageError("bit width must be at least 1")
    words = [(0,), (1,)]
    for _ in range(b - 1):
        words = [(0,) + w for w in words] + [(1,) + w for w in reversed(words)]
    return GrayCode(tuple(words))


def brgc_prefix(d: int) -> GrayCode:
    """First d words of the reflected code on ceil(log2 d) bits.

    d = 1 yields the single zero-width word (no bits are needed to tell
    one alternative apart).
    """
    if d < 1:
        raise UsageError("need at least one word")
    if d == 1:
        return GrayCode(((),))
    bits = (d - 1).bit_length()
    return GrayCode(brgc(bits).words[:d])


def is_reversed_edge_ranking(labels: Sequence[int]) -> bool:
    """Check that equal labels are separated by a strictly smaller label."""
    if not labels:
        raise UsageError("need at least one label")
    for i, a in enumerate(labels):
        for j in range(i + 1, len(labels)):
            if labels[j] != a:
                continue
            if not any(labels[k] < a for k in range(i + 1, j)):
                return False
    return True


def alg1_ranking(n: int, choose_cut: Callable[[int, int], int]) -> EdgeRanking:
    """Label a path's edges by recursive cutting.

    ``choose_cut(lo, hi)`` picks the cut edge index (edge m joins vertices
    m and m+1, 1-based) for the subpath on vertices lo..hi; the cut gets
    the current level, both sides recurse at level + 1.  Any cut choice
    yields a valid ranking.
    """
    if n < 2:
        raise UsageError("path needs at least two vertices")
    labels = [0] * (n - 1)

    def label(lo: int, hi: int, level: int) -> None:
        if hi - lo + 1 <= 1:
            return
        m = choose_cut(lo, hi)
        if not lo <= m < hi:
            raise UsageError(f"cut {m} outside subpath [{lo},{hi})")
        labels[m - 1] = level
        label(lo, m, level + 1)
        label(m + 1, hi, level + 1)

    label(1, n, 1)
    return EdgeRanking(tuple(labels))


def random_ranking(n: int, seed: int) -> EdgeRanking:
    """Ranking from seeded-random cut choices."""
    rng = random.Random(seed)
    return alg1_ranking(n, lambda lo, hi: rng.randint(lo, hi - 1))


def balanced_ranking(n: int, tie: str = "center") -> EdgeRanking:
    """Balanced ranking: cut each subpath in half, rank count = ceil(log2 n).

    Odd subpaths have two half cuts; ``tie`` picks one:

    * ``"center"`` (default): the smaller part lies toward the parent cut,
      the root takes the floor split.  This mirror-symmetric rule is the
      one that reproduces the pinned golden rankings.
    * ``"floor"`` / ``"ceil"``: the left part always gets floor/ceil of
      half the vertices.
    """
    if n < 2:
        raise UsageError("path needs at least two vertices")
    if tie not in ("center", "floor", "ceil"):
        raise UsageError(f"unknown tie rule {tie!r}")
    # parent side per active subpath: which end touches the parent's cut.
    parent_side: dict[tuple[int, int], Optional[str]] = {(1, n): None}

    def choose(lo: int, hi: int) -> int:
        size = hi - lo + 1
        if tie == "floor":
            left = size // 2
        elif tie == "ceil":
            left = (size + 1) // 2
        else:
            side = parent_side.get((lo, hi))
            if size % 2 == 0:
                left = size // 2
            elif side == "right":
                left = (size + 1) // 2
            else:  # parent on the left, or the root
                left = size // 2
        m = lo + left - 1
        parent_side[(lo, m)] = "right"
        parent_side[(m + 1, hi)] = "left"
        return m

    return alg1_ranking(n, choose)


def ranking_to_gray(ranking: EdgeRanking) -> GrayCode:
    """Walk the path, flipping the coordinate named by each edge label.

    Starts from the all-zero word of width rank_count; yields one word per
    path vertex.  The ranking property guarantees a valid code (asserted
    anyway by the GrayCode invariants).
    """
    width = ranking.rank_count
    word = [0] * width
    words = [tuple(word)]
    for lab in ranking.labels:
        word[lab - 1] ^= 1
        words.append(tuple(word))
    return GrayCode(tuple(words))


def balanced_gray(d: int, tie: str = "center") -> GrayCode:
    """Code of width ceil(log2 d) from the balanced ranking; d = 1 gives
    the single zero-width word."""
    if d < 1:
        raise UsageError("need at least one word")
    if d == 1:
        return GrayCode(((),))
    return ranking_to_gray(balanced_ranking(d, tie=tie))


def zigzag_code(r: int) -> ZigzagCode:
    """Cumulative per-coordinate flip counts of the reflected code on r bits."""
    if r < 1:
        raise UsageError("width must be at least 1")
    words = brgc(r).words
    rows = [tuple([0] * r)]
    for prev, cur in zip(words, words[1:]):
        rows.append(tuple(c + abs(a - b)
                          for c, a, b in zip(rows[-1], prev, cur)))
    return ZigzagCode(tuple(rows))
