"""Geometric construction of piecewise linear relaxations.

A univariate relaxation is built per convexity-constant interval: the
curve side of each piece is a chain of tangent lines (one tangent pair
per refinement round, doubling the segment count), the other side is the
chord.  For a convex piece the tangent chain lies below the curve and is
the lower bound; for a concave piece the roles mirror.  Vertices are
snapped to exact rationals once and shared by id between neighbouring
pieces, so the induced index-set family is a 1D-ordered chain by
construction.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .cdc import CdcFamily, check_g1d
from .errors import DegeneracyError, GeometryError, UsageError, ValidationError

RELAXATION_SCHEMA_VERSION = 1

CONVEX = "convex"
CONCAVE = "concave"
AFFINE = "affine"

_SLOPE_TOL = 1e-12
_X_TOL = 1e-12


@dataclass(frozen=True)
class RelaxationConfig:
    """Construction parameters: grid size, tangent segments per piece,
    and the x-values where convexity flips."""

    n_pre: int
    n_seg: int = 1
    inflections: tuple[float, ...] = ()

    def __post_init__(self):
        if self.n_pre < 2:
            raise ValidationError("n_pre must be at least 2")
        if self.n_seg < 1 or self.n_seg & (self.n_seg - 1):
            raise ValidationError("n_seg must be a positive power of two")
        if list(self.inflections) != sorted(self.inflections):
            raise ValidationError("inflections must be sorted")


@dataclass(frozen=True)
class Breakpoints:
    """Strictly increasing x grid with matching values."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.xs) < 2 or len(self.xs) != len(self.ys):
            raise ValidationError("need at least two matching breakpoints")
        if any(a >= b for a, b in zip(self.xs, self.xs[1:])):
            raise ValidationError("xs must be strictly increasing")

    @property
    def segment_count(self) -> int:
        return len(self.xs) - 1

    def value_at(self, x) -> Fraction:
        """Exact piecewise-linear evaluation (x inside the grid span)."""
        x = Fraction(x)
        if x < self.xs[0] or x > self.xs[-1]:
            raise UsageError(f"{float(x)} outside [{self.xs[0]}, {self.xs[-1]}]")
        i = bisect.bisect_right(self.xs, x) - 1
        if i == len(self.xs) - 1:
            return self.ys[-1]
        x0, x1 = self.xs[i], self.xs[i + 1]
        y0, y1 = self.ys[i], self.ys[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


@dataclass(frozen=True)
class Piece:
    """One relaxation polytope: on-curve endpoints plus the tangent
    intersections, counterclockwise."""

    x_lo: Fraction
    x_hi: Fraction
    vertex_ids: tuple[int, ...]
    orientation: str


@dataclass(frozen=True)
class Relaxation1D:
    pieces: tuple[Piece, ...]
    vertex_pool: dict[int, tuple[Fraction, Fraction]]
    family: CdcFamily
    lower_pwl: Breakpoints
    upper_pwl: Breakpoints

    @property
    def x_lo(self) -> Fraction:
        return self.pieces[0].x_lo

    @property
    def x_hi(self) -> Fraction:
        return self.pieces[-1].x_hi

    def piece_for(self, x: float) -> Piece:
        for piece in self.pieces:
            if Fraction(x) <= piece.x_hi:
                return piece
        return self.pieces[-1]

    def piece_halfplanes(self, piece: Piece):
        """Inequalities a*x + b*y <= c describing the piece polytope."""
        pts = [self.vertex_pool[v] for v in piece.vertex_ids]
        out = []
        n = len(pts)
        for i in range(n):
            (x0, y0), (x1, y1) = pts[i], pts[(i + 1) % n]
            # ccw ordering: interior lies left of each directed edge
            a = y1 - y0
            b = -(x1 - x0)
            c = a * x0 + b * y0
            out.append((a, b, c))
        return out

    def contains(self, piece: Piece, x, y, tol: float = 0.0) -> bool:
        x, y = Fraction(x), Fraction(y)
        for a, b, c in self.piece_halfplanes(piece):
            lhs = a * x + b * y - c
            if float(lhs) > tol * max(1.0, abs(float(a)), abs(float(b))):
                return False
        return True

    def to_json_dict(self) -> dict:
        return {
            "version": RELAXATION_SCHEMA_VERSION,
            "pieces": [{
                "x_lo": _coord_str(p.x_lo),
                "x_hi": _coord_str(p.x_hi),
                "orientation": p.orientation,
                "vertex_ids": list(p.vertex_ids),
            } for p in self.pieces],
            "vertices": [[_coord_str(x), _coord_str(y)]
                         for _, (x, y) in sorted(self.vertex_pool.items())],
            "family": self.family.to_json_dict(),
            "lower": _bp_json(self.lower_pwl),
            "upper": _bp_json(self.upper_pwl),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Relaxation1D":
        if doc.get("version") != RELAXATION_SCHEMA_VERSION:
            raise ValidationError("unsupported relaxation document")
        pool = {i + 1: (Fraction(x), Fraction(y))
                for i, (x, y) in enumerate(doc["vertices"])}
        pieces = tuple(
            Piece(Fraction(p["x_lo"]), Fraction(p["x_hi"]),
                  tuple(p["vertex_ids"]), p["orientation"])
            for p in doc["pieces"])
        return cls(pieces, pool, CdcFamily.from_json_dict(doc["family"]),
                   _bp_from_json(doc["lower"]), _bp_from_json(doc["upper"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _coord_str(fr: Fraction) -> str:
    from .milp.io import exact_decimal
    dec = exact_decimal(fr)
    return dec if dec is not None else str(fr)


def _bp_json(bp: Breakpoints) -> dict:
    return {"xs": [_coord_str(x) for x in bp.xs],
            "ys": [_coord_str(y) for y in bp.ys]}


def _bp_from_json(doc: dict) -> Breakpoints:
    return Breakpoints(tuple(Fraction(x) for x in doc["xs"]),
                       tuple(Fraction(y) for y in doc["ys"]))


def split_breakpoints(L: float, U: float, cfg: RelaxationConfig) -> list[float]:
    """Equally spaced grid of n_pre points on [L, U] merged with the
    inflection points, sorted and deduplicated."""
    if not L < U:
        raise UsageError("need L < U")
    step = (U - L) / (cfg.n_pre - 1)
    points = [L + k * step for k in range(cfg.n_pre - 1)] + [U]
    for x in cfg.inflections:
        if not L < x < U:
            raise UsageError(f"inflection {x} outside ({L}, {U})")
        points.append(x)
    points.sort()
    out = [points[0]]
    span = U - L
    for x in points[1:]:
        if x - out[-1] > _X_TOL * max(1.0, span):
            out.append(x)
    return out


def classify_piece(f: Callable[[float], float], fprime: Callable[[float], float],
                   a: float, b: float) -> str:
    """Convexity of f on [a, b] from the endpoint slopes (constant
    convexity assumed; equal slopes mean affine)."""
    sa, sb = fprime(a), fprime(b)
    if abs(sa - sb) <= _SLOPE_TOL * max(1.0, abs(sa), abs(sb)):
        return AFFINE
    return CONVEX if sa < sb else CONCAVE


def _tangent_intersection(f, fprime, p: float, q: float) -> tuple[float, float]:
    sp, sq = fprime(p), fprime(q)
    if abs(sp - sq) <= _SLOPE_TOL * max(1.0, abs(sp), abs(sq)):
        raise DegeneracyError(
            f"parallel tangents at {p} and {q} on a non-affine piece")
    x = (f(q) - f(p) + sp * p - sq * q) / (sp - sq)
    if not p < x < q:
        raise GeometryError(
            f"tangent intersection {x} left the interval ({p}, {q})")
    y = f(p) + sp * (x - p)
    return x, y


def tangent_chain(f, fprime, a: float, b: float, orientation: str,
                  n_seg: int) -> list[tuple[float, float]]:
    """Extreme points of one piece: [A, intersections..., B].

    Each refinement round projects the current intersections onto the
    curve as new tangent points and recomputes intersections, doubling
    the segment count; the projected points are not vertices (they land
    on the new chain).
    """
    if orientation == AFFINE:
        return [(a, f(a)), (b, f(b))]
    if n_seg < 1 or n_seg & (n_seg - 1):
        raise UsageError("n_seg must be a positive power of two")
    tangent_points = [a, b]
    rounds = int(math.log2(n_seg))
    for _ in range(rounds):
        cuts = [_tangent_intersection(f, fprime, p, q)[0]
                for p, q in zip(tangent_points, tangent_points[1:])]
        merged = []
        for p, c in zip(tangent_points, cuts):
            merged += [p, c]
        merged.append(tangent_points[-1])
        tangent_points = merged
    chain = [(a, f(a))]
    for p, q in zip(tangent_points, tangent_points[1:]):
        chain.append(_tangent_intersection(f, fprime, p, q))
    chain.append((b, f(b)))
    return chain


def build_relaxation_1d(f, fprime, L: float, U: float,
                        cfg: RelaxationConfig) -> Relaxation1D:
    """One piece per breakpoint interval, shared on-curve vertices,
    envelopes assembled from the chain/chord sides."""
    xs = split_breakpoints(L, U, cfg)
    pool: dict[int, tuple[Fraction, Fraction]] = {}
    curve_ids: dict[int, int] = {}

    def add_vertex(x: float, y: float) -> int:
        vid = len(pool) + 1
        pool[vid] = (Fraction(x), Fraction(y))
        return vid

    def curve_vertex(k: int) -> int:
        if k not in curve_ids:
            curve_ids[k] = add_vertex(xs[k], f(xs[k]))
        return curve_ids[k]

    pieces = []
    sets = []
    lower_parts: list[list[tuple[Fraction, Fraction]]] = []
    upper_parts: list[list[tuple[Fraction, Fraction]]] = []
    for k in range(len(xs) - 1):
        a, b = xs[k], xs[k + 1]
        orientation = classify_piece(f, fprime, a, b)
        chain = tangent_chain(f, fprime, a, b, orientation, cfg.n_seg)
        left = curve_vertex(k)
        interior = [add_vertex(x, y) for x, y in chain[1:-1]]
        right = curve_vertex(k + 1)
        if orientation == CONCAVE:
            # chain above the curve: ccw order walks the chord first
            ids = (left, right) + tuple(reversed(interior))
        else:
            ids = (left,) + tuple(interior) + (right,)
        piece = Piece(Fraction(a), Fraction(b), ids, orientation)
        pieces.append(piece)
        sets.append({left, right, *interior})

        chain_pts = ([pool[left]] + [pool[v] for v in interior]
                     + [pool[right]])
        chord_pts = [pool[left], pool[right]]
        if orientation == CONVEX:
            lower_parts.append(chain_pts)
            upper_parts.append(chord_pts)
        elif orientation == CONCAVE:
            lower_parts.append(chord_pts)
            upper_parts.append(chain_pts)
        else:
            lower_parts.append(chord_pts)
            upper_parts.append(chord_pts)

    family = CdcFamily.from_sets(sets)
    if not check_g1d(family):
        raise GeometryError("piece vertex sets do not form a chain")
    return Relaxation1D(tuple(pieces), pool, family,
                        _assemble(lower_parts), _assemble(upper_parts))


def _assemble(parts: Sequence[Sequence[tuple[Fraction, Fraction]]]) -> Breakpoints:
    xs: list[Fraction] = []
    ys: list[Fraction] = []
    for part in parts:
        for x, y in part:
            if xs and x == xs[-1]:
                continue
            xs.append(x)
            ys.append(y)
    return Breakpoints(tuple(xs), tuple(ys))


def mccormick_grid(L1, U1, L2, U2, xs1: Sequence, xs2: Sequence):
    """Grid family for a product term: ground points are the lattice
    nodes with coordinates (x1, x2, x1*x2); sets are the per-cell corner
    quadruples, row-major with shape (d1, d2)."""
    xs1 = [Fraction(x) for x in xs1]
    xs2 = [Fraction(x) for x in xs2]
    if xs1[0] != Fraction(L1) or xs1[-1] != Fraction(U1):
        raise UsageError("first axis grid must span [L1, U1]")
    if xs2[0] != Fraction(L2) or xs2[-1] != Fraction(U2):
        raise UsageError("second axis grid must span [L2, U2]")
    if any(a >= b for a, b in zip(xs1, xs1[1:])) or \
            any(a >= b for a, b in zip(xs2, xs2[1:])):
        raise UsageError("grids must be strictly increasing")
    d1, d2 = len(xs1) - 1, len(xs2) - 1
    cols = d2 + 1

    def node(i: int, j: int) -> int:
        return i * cols + j + 1  # row-major, 1-based

    pool = {}
    for i, x1 in enumerate(xs1):
        for j, x2 in enumerate(xs2):
            pool[node(i, j)] = (x1, x2, x1 * x2)
    sets = []
    for i in range(d1):
        for j in range(d2):
            sets.append({node(i, j), node(i, j + 1),
                         node(i + 1, j), node(i + 1, j + 1)})
    family = CdcFamily.from_sets(sets, shape=(d1, d2))
    return family, pool


# built-in scalar functions used by the command line and the instances

def logistic(u: float) -> tuple[Callable, Callable]:
    def value(x: float) -> float:
        return 1.0 / (1.0 + math.exp(u - x))

    def slope(x: float) -> float:
        p = value(x)
        return p * (1.0 - p)

    return value, slope


def sin_inflections(L: float, U: float) -> tuple[float, ...]:
    k = math.ceil(L / math.pi)
    out = []
    while k * math.pi < U:
        if k * math.pi > L:
            out.append(k * math.pi)
        k += 1
    return tuple(out)


def cos_inflections(L: float, U: float) -> tuple[float, ...]:
    k = math.ceil((L - math.pi / 2) / math.pi)
    out = []
    while math.pi / 2 + k * math.pi < U:
        x = math.pi / 2 + k * math.pi
        if x > L:
            out.append(x)
        k += 1
    return tuple(out)


FUNCTION_REGISTRY: dict[str, dict] = {
    "sin": {"f": math.sin, "fprime": math.cos,
            "inflections": sin_inflections},
    "cos": {"f": math.cos, "fprime": lambda x: -math.sin(x),
            "inflections": cos_inflections},
    "exp": {"f": math.exp, "fprime": math.exp,
            "inflections": lambda L, U: ()},
}


def registry_relaxation(name: str, L: float, U: float, n_pre: int,
                        n_seg: int, u: Optional[float] = None) -> Relaxation1D:
    """Relaxation of a named function; ``logistic`` takes the hurdle u."""
    if name == "logistic":
        if u is None:
            raise UsageError("logistic needs its hurdle parameter")
        f, fp = logistic(u)
        inflections = (u,) if L < u < U else ()
    elif name in FUNCTION_REGISTRY:
        entry = FUNCTION_REGISTRY[name]
        f, fp = entry["f"], entry["fprime"]
        inflections = entry["inflections"](L, U)
    else:
        raise UsageError(f"unknown function {name!r}")
    cfg = RelaxationConfig(n_pre, n_seg, tuple(inflections))
    return build_relaxation_1d(f, fp, L, U, cfg)
