"""Best-first branch-and-bound over the exact LP relaxation.

Branches on the most-fractional integer variable; declarative SOS2 groups
are enforced by the standard two-child split of allowed adjacent pairs.
Deterministic given the model: node bounds are exact Fractions and every
tie-break is by insertion order.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..errors import UsageError
from .model import MAX, MIN, MilpModel
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, lp_solve

LIMIT = "limit"


@dataclass
class MipSolution:
    status: str                      # optimal | infeasible | unbounded | limit
    values: dict[str, Fraction]
    primal: Optional[Fraction]
    dual: Optional[Fraction]
    node_count: int


def _frac_part(x: Fraction) -> Fraction:
    f = x - (x.numerator // x.denominator)
    return min(f, 1 - f)


def _merge_bounds(model, overrides, name, lo=None, hi=None):
    base = overrides.get(name)
    if base is None:
        var = model.variables[name]
        base = (var.lb, var.ub)
    new_lo = base[0] if lo is None else (lo if base[0] is None else max(base[0], lo))
    new_hi = base[1] if hi is None else (hi if base[1] is None else min(base[1], hi))
    out = dict(overrides)
    out[name] = (new_lo, new_hi)
    return out


def _sos2_violation(model, values):
    """First violated SOS2 group and a strict interior split position."""
    for group in model.sos2_groups.values():
        support = [pos for pos, name in enumerate(group.members)
                   if values[name] != 0]
        if len(support) >= 2 and support[-1] - support[0] >= 2:
            split = (support[0] + support[-1]) // 2
            return group, split
    return None


def mip_solve(model: MilpModel,
              node_cap: Optional[int] = None,
              time_cap: Optional[float] = None,
              rule: str = "bland") -> MipSolution:
    sense = model.objective.sense
    if sense not in (MIN, MAX):
        raise UsageError("model objective sense must be set")
    for name in model.integer_variables():
        var = model.variables[name]
        if var.lb is None or var.ub is None:
            raise UsageError(f"integer variable {name!r} must be bounded")

    def better(a: Fraction, b: Fraction) -> bool:
        return a < b if sense == MIN else a > b

    def heap_key(obj: Fraction) -> Fraction:
        return obj if sense == MIN else -obj

    start = time.monotonic()
    counter = 0
    nodes_solved = 0
    heap: list[tuple[Fraction, int, dict]] = []
    incumbent: Optional[dict[str, Fraction]] = None
    primal: Optional[Fraction] = None
    hit_limit = False
    root_unbounded = False

    def solve_node(overrides):
        nonlocal nodes_solved
        nodes_solved += 1
        return lp_solve(model, bound_overrides=overrides, rule=rule)

    root = solve_node({})
    if root.status == UNBOUNDED:
        return MipSolution(UNBOUNDED, {}, None, None, nodes_solved)
    if root.status == INFEASIBLE:
        return MipSolution(INFEASIBLE, {}, None, None, nodes_solved)
    heapq.heappush(heap, (heap_key(root.objective), counter, ({}, root)))

    int_vars = model.integer_variables()
    while heap:
        if node_cap is not None and nodes_solved >= node_cap:
            hit_limit = True
            break
        if time_cap is not None and time.monotonic() - start > time_cap:
            hit_limit = True
            break
        _, _, (overrides, sol) = heapq.heappop(heap)
        if primal is not None and not better(sol.objective, primal):
            continue
        values = sol.values

        frac_name = None
        frac_score = Fraction(0)
        for name in int_vars:
            score = _frac_part(values[name])
            if score > frac_score:
                frac_name, frac_score = name, score
        if frac_name is not None:
            x = values[frac_name]
            floor = Fraction(x.numerator // x.denominator)
            children = [
                _merge_bounds(model, overrides, frac_name, hi=floor),
                _merge_bounds(model, overrides, frac_name, lo=floor + 1),
            ]
        else:
            violation = _sos2_violation(model, values)
            if violation is None:
                if primal is None or better(sol.objective, primal):
                    incumbent, primal = dict(values), sol.objective
                continue
            group, split = violation
            left = dict(overrides)
            for name in group.members[:split]:
                left = _merge_bounds(model, left, name,
                                     lo=Fraction(0), hi=Fraction(0))
            right = dict(overrides)
            for name in group.members[split + 1:]:
                right = _merge_bounds(model, right, name,
                                      lo=Fraction(0), hi=Fraction(0))
            children = [right, left]  # keep low-index side explored first

        for child in children:
            csol = lp_solve(model, bound_overrides=child, rule=rule)
            nodes_solved += 1
            if csol.status == UNBOUNDED:
                return MipSolution(UNBOUNDED, {}, None, None, nodes_solved)
            if csol.status == INFEASIBLE:
                continue
            if primal is not None and not better(csol.objective, primal):
                continue
            counter += 1
            heapq.heappush(heap, (heap_key(csol.objective), counter,
                                  (child, csol)))

    if hit_limit:
        open_bounds = [entry[2][1].objective for entry in heap]
        if open_bounds:
            dual = min(open_bounds) if sense == MIN else max(open_bounds)
        else:
            dual = primal
        return MipSolution(LIMIT, incumbent or {}, primal, dual, nodes_solved)
    if incumbent is None:
        return MipSolution(INFEASIBLE, {}, None, None, nodes_solved)
    return MipSolution(OPTIMAL, incumbent, primal, primal, nodes_solved)
