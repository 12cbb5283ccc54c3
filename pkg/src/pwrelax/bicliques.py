"""Biclique covers of chain-family conflict graphs.

Two constructions: one biclique per code coordinate (elements appearing
only under 0-bits vs only under 1-bits), and one per ranking level via the
divide-and-merge procedure on the chain's path graph.  Both cover exactly
the infeasible pairs, so each biclique can be priced with a single binary
variable downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cdc import CdcFamily, ConflictGraph, check_g1d
from .codes import EdgeRanking, GrayCode
from .errors import StructureError, UsageError, ValidationError


@dataclass(frozen=True)
class Biclique:
    """Complete bipartite pair of disjoint ground-element sets.

    Either side may be empty; an empty side contributes no edges but the
    biclique still occupies a coordinate slot downstream.
    """

    left: frozenset[int]
    right: frozenset[int]

    def __post_init__(self):
        if self.left & self.right:
            raise ValidationError("biclique sides must be disjoint")

    def cross_pairs(self) -> set[frozenset[int]]:
        return {frozenset((u, v)) for u in self.left for v in self.right}


@dataclass(frozen=True)
class BicliqueCover:
    bicliques: tuple[Biclique, ...]

    def __len__(self) -> int:
        return len(self.bicliques)

    def covered_edges(self) -> set[frozenset[int]]:
        out: set[frozenset[int]] = set()
        for b in self.bicliques:
            out |= b.cross_pairs()
        return out


@dataclass(frozen=True)
class SeparationResult:
    """Cut decomposition of a chain: per cut edge, the piece indices on
    each side.  Keys are (level, edge index); edge e joins sets e and e+1."""

    pairs: dict[tuple[int, int], tuple[frozenset[int], frozenset[int]]]

    def by_edge(self) -> dict[int, tuple[frozenset[int], frozenset[int]]]:
        return {e: lr for (_, e), lr in self.pairs.items()}


def _require_g1d(fam: CdcFamily) -> None:
    if not check_g1d(fam):
        raise StructureError("family is not a 1D-ordered chain")


def gray_cover(fam: CdcFamily, code: GrayCode) -> BicliqueCover:
    """One biclique per code coordinate.

    Coordinate j separates the elements appearing only in 0-bit sets from
    those appearing only in 1-bit sets; elements on both sides drop out.
    """
    _require_g1d(fam)
    if len(code) != fam.d:
        raise UsageError(
            f"code has {len(code)} words for {fam.d} sets")
    bicliques = []
    for j in range(1, code.width + 1):
        zeros: frozenset[int] = frozenset()
        ones: frozenset[int] = frozenset()
        for i, s in enumerate(fam.sets, start=1):
            if code.bit(i, j) == 0:
                zeros |= s
            else:
                ones |= s
        bicliques.append(Biclique(zeros - ones, ones - zeros))
    return BicliqueCover(tuple(bicliques))


def separation(fam: CdcFamily, ranking: EdgeRanking) -> SeparationResult:
    """Recursive minimum-level cuts of the chain's path graph.

    Each cut edge records the piece indices to its left and right within
    the current subpath.  The ranking property makes the minimum unique
    in every subpath.
    """
    _require_g1d(fam)
    if len(ranking) != fam.d - 1:
        raise UsageError(
            f"ranking has {len(ranking)} labels for {fam.d} sets")
    pairs: dict[tuple[int, int], tuple[frozenset[int], frozenset[int]]] = {}

    def recurse(lo: int, hi: int) -> None:
        if hi - lo + 1 <= 1:
            return
        edges = range(lo, hi)  # edge e joins sets e and e+1
        cut = min(edges, key=lambda e: ranking.labels[e - 1])
        level = ranking.labels[cut - 1]
        pairs[(level, cut)] = (frozenset(range(lo, cut + 1)),
                               frozenset(range(cut + 1, hi + 1)))
        recurse(lo, cut)
        recurse(cut + 1, hi)

    recurse(1, fam.d)
    return SeparationResult(pairs)


def merge_cover(fam: CdcFamily, ranking: EdgeRanking,
                sep: SeparationResult | None = None) -> BicliqueCover:
    """One biclique per ranking level, merging the level's cuts.

    Within a level, cut edges are taken in path order and their side sets
    alternate into the two accumulators (odd occurrence: left side in,
    even occurrence: right side in).  The biclique is then formed by the
    set differences of the accumulated unions.
    """
    _require_g1d(fam)
    if sep is None:
        sep = separation(fam, ranking)
    by_edge = sep.by_edge()
    bicliques = []
    for level in range(1, ranking.rank_count + 1):
        edges = [e for e in range(1, fam.d)
                 if ranking.labels[e - 1] == level]
        a_idx: set[int] = set()
        b_idx: set[int] = set()
        for count, e in enumerate(edges, start=1):
            left, right = by_edge[e]
            if count % 2 == 1:
                a_idx |= left
                b_idx |= right
            else:
                a_idx |= right
                b_idx |= left
        a_union: frozenset[int] = frozenset().union(
            *(fam.sets[i - 1] for i in a_idx)) if a_idx else frozenset()
        b_union: frozenset[int] = frozenset().union(
            *(fam.sets[i - 1] for i in b_idx)) if b_idx else frozenset()
        bicliques.append(Biclique(a_union - b_union, b_union - a_union))
    return BicliqueCover(tuple(bicliques))


def per_edge_biclique(fam: CdcFamily, sep: SeparationResult,
                      edge: int) -> Biclique:
    """Cut biclique of a single edge: each side's union minus the shared
    middle set of the cut edge."""
    left_idx, right_idx = sep.by_edge()[edge]
    mid = fam.sets[edge - 1] & fam.sets[edge]
    left = frozenset().union(*(fam.sets[i - 1] for i in left_idx)) - mid
    right = frozenset().union(*(fam.sets[i - 1] for i in right_idx)) - mid
    return Biclique(left, right)


def biclique_cover_check(cover: BicliqueCover, graph: ConflictGraph) -> bool:
    """Every cross pair is a graph edge and every graph edge is covered."""
    covered = cover.covered_edges()
    return covered <= set(graph.edges) and set(graph.edges) <= covered


def is_biclique_subgraph(inner: Biclique, outer: Biclique) -> bool:
    """Inner's cross pairs all appear among outer's cross pairs."""
    if not inner.left or not inner.right:
        return True
    return ((inner.left <= outer.left and inner.right <= outer.right)
            or (inner.left <= outer.right and inner.right <= outer.left))
