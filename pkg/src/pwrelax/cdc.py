"""Combinatorial disjunctive constraints over a finite ground set.

A constraint is represented by an ordered family of index sets.  A weight
vector on the ground set satisfies the constraint when its support fits
inside a single member set.  This module holds the family/conflict-graph
representation, feasibility predicates, and the structural class checks
(1D-ordered chains, grid-ordered families, pairwise branching
representability) that the formulation builders rely on.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import SizeError, StructureError, UsageError, ValidationError

FAMILY_SCHEMA_VERSION = 1

# Enumeration guards; beyond these the subset scans refuse rather than guess.
MAX_GROUND_FOR_ENUMERATION = 20
DEFAULT_CARDINALITY_CAP = 4


@dataclass(frozen=True)
class CdcFamily:
    """Ordered family of index sets, optionally arranged on a grid.

    ``sets[k]`` is the k-th member set.  When ``shape`` is present the
    members are addressed by multi-index in row-major order and
    ``len(sets) == prod(shape)``.  Ground elements are dense integer ids
    ``1..|J|``.
    """

    sets: tuple[frozenset[int], ...]
    shape: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if not self.sets:
            raise ValidationError("family needs at least one set")
        for s in self.sets:
            if not s:
                raise ValidationError("member sets must be nonempty")
            if any((not isinstance(v, int)) or v < 1 for v in s):
                raise ValidationError("ground elements must be positive ints")
        ground = frozenset().union(*self.sets)
        if ground != frozenset(range(1, len(ground) + 1)):
            raise ValidationError("ground elements must be dense ids 1..|J|")
        if self.shape is not None:
            if any(d < 1 for d in self.shape):
                raise ValidationError("shape entries must be positive")
            expect = 1
            for d in self.shape:
                expect *= d
            if expect != len(self.sets):
                raise ValidationError(
                    f"shape {self.shape} implies {expect} sets, got {len(self.sets)}"
                )

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]],
                  shape: Optional[Sequence[int]] = None) -> "CdcFamily":
        return cls(tuple(frozenset(s) for s in sets),
                   tuple(shape) if shape is not None else None)

    @property
    def ground(self) -> frozenset[int]:
        return frozenset().union(*self.sets)

    @property
    def d(self) -> int:
        return len(self.sets)

    def multi_indices(self) -> list[tuple[int, ...]]:
        """Row-major multi-indices addressing the sets (1-based per axis)."""
        if self.shape is None:
            return [(i,) for i in range(1, len(self.sets) + 1)]
        return [tuple(i + 1 for i in idx)
                for idx in itertools.product(*(range(d) for d in self.shape))]

    def set_at(self, index: tuple[int, ...]) -> frozenset[int]:
        shape = self.shape if self.shape is not None else (len(self.sets),)
        flat = 0
        for pos, dim in zip(index, shape):
            if not 1 <= pos <= dim:
                raise UsageError(f"index {index} outside grid {shape}")
            flat = flat * dim + (pos - 1)
        return self.sets[flat]

    def is_feasible_set(self, subset: Iterable[int]) -> bool:
        """True when the subset fits inside one member set."""
        sub = frozenset(subset)
        return any(sub <= s for s in self.sets)

    def to_json_dict(self) -> dict:
        doc = {"version": FAMILY_SCHEMA_VERSION,
               "sets": [sorted(s) for s in self.sets]}
        if self.shape is not None:
            doc["shape"] = list(self.shape)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CdcFamily":
        if doc.get("version") != FAMILY_SCHEMA_VERSION:
            raise ValidationError(f"unsupported family document: {doc.get('version')!r}")
        return cls.from_sets(doc["sets"], doc.get("shape"))

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "CdcFamily":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class ConflictGraph:
    """Graph on the ground set whose edges are the infeasible pairs."""

    vertices: frozenset[int]
    edges: frozenset[frozenset[int]]

    def has_edge(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.edges


@dataclass(frozen=True)
class SimplexPoint:
    """Exact nonnegative weights over ground elements, summing to one."""

    weights: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        total = Fraction(0)
        for v, w in self.weights.items():
            w = Fraction(w)
            if w < 0:
                raise ValidationError(f"negative weight at {v}")
            total += w
        if total != 1:
            raise ValidationError(f"weights sum to {total}, expected 1")

    @property
    def support(self) -> frozenset[int]:
        return frozenset(v for v, w in self.weights.items() if w != 0)

    @classmethod
    def unit(cls, v: int) -> "SimplexPoint":
        return cls({v: Fraction(1)})

    @classmethod
    def uniform(cls, elements: Iterable[int]) -> "SimplexPoint":
        elems = sorted(set(elements))
        if not elems:
            raise ValidationError("uniform point needs a nonempty support")
        w = Fraction(1, len(elems))
        return cls({v: w for v in elems})


def conflict_graph(fam: CdcFamily) -> ConflictGraph:
    """All unordered ground pairs not jointly contained in any member set."""
    ground = sorted(fam.ground)
    edges = set()
    for u, v in itertools.combinations(ground, 2):
        if not any(u in s and v in s for s in fam.sets):
            edges.add(frozenset((u, v)))
    return ConflictGraph(frozenset(ground), frozenset(edges))


def cdc_membership(point: SimplexPoint, fam: CdcFamily) -> bool:
    """True iff the point's support fits inside one member set."""
    if not point.support <= fam.ground:
        return False
    return fam.is_feasible_set(point.support)


@dataclass(frozen=True)
class ExceedsCap:
    """Marker result: a minimal infeasible set larger than the cap exists."""

    cap: int
    witness: frozenset[int]


def minimal_infeasible_max_cardinality(fam: CdcFamily,
                                       cap: int = DEFAULT_CARDINALITY_CAP):
    """Largest cardinality of a minimal infeasible subset of the ground set.

    Returns an int (0 when no subset is infeasible) or :class:`ExceedsCap`
    as soon as a minimal infeasible set larger than ``cap`` is found.
    Enumerates every subset size: stopping at ``cap + 1`` would be unsound,
    since a minimal infeasible set can first appear at any size.
    """
    if cap < 1:
        raise UsageError("cap must be positive")
    ground = sorted(fam.ground)
    if len(ground) > MAX_GROUND_FOR_ENUMERATION:
        raise SizeError(
            f"|J| = {len(ground)} exceeds enumeration guard "
            f"{MAX_GROUND_FOR_ENUMERATION}")
    # Bitmask feasibility: subset is feasible iff contained in a member mask.
    index = {v: i for i, v in enumerate(ground)}
    set_masks = [sum(1 << index[v] for v in s) for s in fam.sets]

    def feasible(mask: int) -> bool:
        return any(mask & ~m == 0 for m in set_masks)

    best = 0
    for size in range(2, len(ground) + 1):
        for combo in itertools.combinations(ground, size):
            mask = sum(1 << index[v] for v in combo)
            if feasible(mask):
                continue
            facets_feasible = all(
                feasible(mask & ~(1 << index[v])) for v in combo)
            if not facets_feasible:
                continue
            if size > cap:
                return ExceedsCap(cap, frozenset(combo))
            best = max(best, size)
    return best


def is_pairwise_ib_representable(fam: CdcFamily) -> bool:
    """True iff every minimal infeasible set has at most two elements."""
    result = minimal_infeasible_max_cardinality(fam, cap=2)
    return not isinstance(result, ExceedsCap) and result <= 2


def check_g1d(fam: CdcFamily) -> bool:
    """Chain condition: sets two or more positions apart are disjoint."""
    sets = fam.sets
    for i, j in itertools.combinations(range(len(sets)), 2):
        if j - i >= 2 and sets[i] & sets[j]:
            return False
    return True


def _between_box(i: tuple[int, ...], j: tuple[int, ...]):
    """Multi-indices on an l1-geodesic between i and j (inclusive)."""
    ranges = [range(min(a, b), max(a, b) + 1) for a, b in zip(i, j)]
    return itertools.product(*ranges)


def check_gnd(fam: CdcFamily) -> bool:
    """Grid condition: far cells disjoint, shared elements on geodesics.

    Condition 1: sets whose multi-indices differ by >= 2 in any axis are
    disjoint.  Condition 2: the intersection of two sets is contained in
    every set lying on an l1-geodesic between them (enumerating the lattice
    box between the indices suffices).
    """
    if fam.shape is None:
        raise UsageError("check_gnd needs a family with a grid shape")
    idxs = fam.multi_indices()
    by_index = dict(zip(idxs, fam.sets))
    for a, b in itertools.combinations(idxs, 2):
        inter = by_index[a] & by_index[b]
        if not inter:
            continue
        if max(abs(x - y) for x, y in zip(a, b)) >= 2:
            return False
        for v in _between_box(a, b):
            if not inter <= by_index[v]:
                return False
    return True


def axis_projections(fam: CdcFamily) -> list[CdcFamily]:
    """Per-axis families: union the sets over all other axes.

    Each projected family must form a 1D-ordered chain; a failure means
    the input was not grid-ordered.
    """
    if fam.shape is None:
        raise UsageError("axis_projections needs a family with a grid shape")
    idxs = fam.multi_indices()
    by_index = dict(zip(idxs, fam.sets))
    out = []
    for axis, dim in enumerate(fam.shape):
        slabs = []
        for pos in range(1, dim + 1):
            members = [by_index[i] for i in idxs if i[axis] == pos]
            slabs.append(frozenset().union(*members))
        proj = CdcFamily(tuple(slabs))
        if not check_g1d(proj):
            raise StructureError(
                f"axis {axis + 1} projection is not 1D-ordered; "
                "input family is not grid-ordered")
        out.append(proj)
    return out


def sos2_adjacency_family(n: int) -> CdcFamily:
    """Family of adjacent index pairs {i, i+1} over 1..n (n >= 2)."""
    if n < 2:
        raise UsageError("adjacency family needs at least two elements")
    return CdcFamily.from_sets([{i, i + 1} for i in range(1, n)])
