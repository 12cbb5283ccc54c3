"""Exact rational primal simplex with bounded variables.

Two-phase, full-tableau, Bland's anti-cycling rule by default (Dantzig
pricing available behind a flag, never used by the verification oracles).
All arithmetic is Fraction; an optimal result is a basic feasible solution,
i.e. a vertex of the feasible region whenever one exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..errors import UsageError
from .model import MAX, MilpModel

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)

# column states
_AT_LOWER = 0
_AT_UPPER = 1
_BASIC = 2


@dataclass
class LpSolution:
    status: str
    values: dict[str, Fraction]
    objective: Optional[Fraction]
    basis: tuple[str, ...]


class _Tableau:
    """Dense bounded-variable simplex state."""

    def __init__(self, names, lbs, ubs, rows):
        self.names = list(names)
        self.lb = list(lbs)
        self.ub = list(ubs)
        self.T = [list(r) for r in rows]   # m x n, equals B^-1 A throughout
        self.beta: list[Fraction] = []     # current basic values
        self.basis: list[int] = []
        self.state: list[int] = []
        self.val: list[Fraction] = []      # rest value per column (nonbasic)
        self.z: list[Fraction] = []        # reduced costs
        self.obj = _ZERO

    @property
    def m(self):
        return len(self.T)

    @property
    def n(self):
        return len(self.names)

    def rest_value(self, j) -> Fraction:
        if self.state[j] == _AT_UPPER and self.ub[j] is not None:
            return self.ub[j]
        if self.lb[j] is not None:
            return self.lb[j]
        if self.ub[j] is not None:
            return self.ub[j]
        return _ZERO

    def pivot(self, r, j_in):
        T, z = self.T, self.z
        piv = T[r][j_in]
        inv = _ONE / piv
        T[r] = row = [a * inv for a in T[r]]
        for i in range(self.m):
            if i == r:
                continue
            factor = T[i][j_in]
            if factor:
                T[i] = [a - factor * b for a, b in zip(T[i], row)]
        factor = z[j_in]
        if factor:
            self.z = [a - factor * b for a, b in zip(z, row)]

    def _is_free(self, j) -> bool:
        return self.lb[j] is None and self.ub[j] is None

    def _entering(self, n_candidates, bland) -> Optional[int]:
        best = None
        best_gain = _ZERO
        for j in range(n_candidates):
            if self.state[j] == _BASIC:
                continue
            rc = self.z[j]
            if self.state[j] == _AT_UPPER:
                if rc <= 0:
                    continue
                gain = rc
            elif rc < 0:
                gain = -rc
            elif rc > 0 and self._is_free(j):
                gain = rc
            else:
                continue
            if bland:
                return j
            if best is None or gain > best_gain:
                best, best_gain = j, gain
        return best

    def iterate(self, n_candidates, bland=True) -> str:
        while True:
            j = self._entering(n_candidates, bland)
            if j is None:
                return OPTIMAL
            rc = self.z[j]
            if self.state[j] == _AT_UPPER:
                direction = -1
            elif rc < 0:
                direction = 1
            else:
                direction = -1  # free column improving downward
            # ratio test: basic k in row i moves by -direction * T[i][j] * t
            limit_t = None
            limit_idx = None   # variable index for Bland tie-break
            limit_row = None   # None = entering flips to its other bound
            if self.lb[j] is not None and self.ub[j] is not None:
                limit_t, limit_idx = self.ub[j] - self.lb[j], j
            for i in range(self.m):
                alpha = self.T[i][j]
                if not alpha:
                    continue
                delta = -direction * alpha
                k = self.basis[i]
                if delta < 0:
                    if self.lb[k] is None:
                        continue
                    t = (self.beta[i] - self.lb[k]) / (-delta)
                else:
                    if self.ub[k] is None:
                        continue
                    t = (self.ub[k] - self.beta[i]) / delta
                if (limit_t is None or t < limit_t
                        or (t == limit_t and k < limit_idx)):
                    limit_t, limit_idx, limit_row = t, k, i
            if limit_t is None:
                return UNBOUNDED
            t = limit_t
            if t:
                for i in range(self.m):
                    alpha = self.T[i][j]
                    if alpha:
                        self.beta[i] -= direction * alpha * t
                self.obj += rc * direction * t
            if limit_row is None:
                self.state[j] = _AT_UPPER if direction == 1 else _AT_LOWER
                self.val[j] = self.rest_value(j)
                continue
            row = limit_row
            leaving = self.basis[row]
            moved_up = (-direction * self.T[row][j]) > 0
            new_value = self.val[j] + direction * t
            self.pivot(row, j)
            self.basis[row] = j
            self.beta[row] = new_value
            self.state[j] = _BASIC
            self.state[leaving] = _AT_UPPER if moved_up else _AT_LOWER
            self.val[leaving] = self.rest_value(leaving)

    def force_pivot(self, row, j_in):
        """Degenerate basis repair: bring column j_in in at its current value."""
        leaving = self.basis[row]
        self.pivot(row, j_in)
        self.basis[row] = j_in
        self.beta[row] = self.val[j_in]
        self.state[j_in] = _BASIC
        self.state[leaving] = _AT_LOWER
        self.val[leaving] = self.rest_value(leaving)


def _standard_form(model: MilpModel, overrides: dict):
    names, lbs, ubs = [], [], []
    for var in model.variables.values():
        lo, hi = var.lb, var.ub
        if var.name in overrides:
            lo, hi = overrides[var.name]
        names.append(var.name)
        lbs.append(lo)
        ubs.append(hi)
    col = {name: j for j, name in enumerate(names)}
    n_struct = len(names)

    cons = list(model.constraints.values())
    for con in cons:
        if con.sense != "=":
            names.append(f"__slack.{con.name}")
            if con.sense == "<=":
                lbs.append(_ZERO)
                ubs.append(None)
            else:
                lbs.append(None)
                ubs.append(_ZERO)
    width = len(names)
    rows, rhs_vec = [], []
    slack_j = n_struct
    for con in cons:
        row = [_ZERO] * width
        for var, c in con.coeffs.items():
            row[col[var]] += c
        if con.sense != "=":
            row[slack_j] = _ONE
            slack_j += 1
        rows.append(row)
        rhs_vec.append(con.rhs)
    return names, lbs, ubs, rows, rhs_vec, col, n_struct


def _phase1(names, lbs, ubs, rows, rhs_vec) -> tuple[_Tableau, int]:
    tab = _Tableau(names, lbs, ubs, rows)
    n_real = tab.n
    tab.state = [_AT_UPPER if (lo is None and hi is not None) else _AT_LOWER
                 for lo, hi in zip(tab.lb, tab.ub)]
    tab.val = [_ZERO] * n_real
    for j in range(n_real):
        tab.val[j] = tab.rest_value(j)
    for i in range(tab.m):
        res = rhs_vec[i]
        for j, a in enumerate(tab.T[i]):
            if a:
                res -= a * tab.val[j]
        # artificial column with +1 after scaling the row by the residual sign
        if res < 0:
            tab.T[i] = [-a for a in tab.T[i]]
            res = -res
        for k in range(tab.m):
            tab.T[k].append(_ONE if k == i else _ZERO)
        tab.names.append(f"__art{i}")
        tab.lb.append(_ZERO)
        tab.ub.append(None)
        tab.state.append(_BASIC)
        tab.val.append(_ZERO)
        tab.basis.append(n_real + i)
        tab.beta.append(res)
    tab.z = [_ZERO] * tab.n
    for j in range(n_real):
        tab.z[j] = -sum(tab.T[i][j] for i in range(tab.m))
    tab.obj = sum(tab.beta, _ZERO)
    return tab, n_real


def _drop_artificials(tab: _Tableau, n_real: int) -> None:
    drop_rows = []
    for i in range(tab.m):
        if tab.basis[i] < n_real:
            continue
        pivot_col = None
        for j in range(n_real):
            if tab.state[j] != _BASIC and tab.T[i][j]:
                pivot_col = j
                break
        if pivot_col is None:
            drop_rows.append(i)  # redundant row
        else:
            tab.force_pivot(i, pivot_col)
    for i in reversed(drop_rows):
        del tab.T[i]
        del tab.basis[i]
        del tab.beta[i]
    tab.T = [row[:n_real] for row in tab.T]
    tab.names = tab.names[:n_real]
    tab.lb = tab.lb[:n_real]
    tab.ub = tab.ub[:n_real]
    tab.state = tab.state[:n_real]
    tab.val = tab.val[:n_real]


def lp_solve(model: MilpModel,
             bound_overrides: Optional[dict] = None,
             rule: str = "bland") -> LpSolution:
    """Solve the LP relaxation of ``model`` exactly.

    ``bound_overrides`` maps variable names to (lb, ub) pairs replacing
    the declared bounds (branch-and-bound uses this).  Integrality and
    SOS2 markers are ignored here.
    """
    if rule not in ("bland", "dantzig"):
        raise UsageError(f"unknown pivot rule {rule!r}")
    overrides = bound_overrides or {}
    for name, (lo, hi) in overrides.items():
        if lo is not None and hi is not None and lo > hi:
            return LpSolution(INFEASIBLE, {}, None, ())
    for var in model.variables.values():
        if (var.lb is not None and var.ub is not None and var.lb > var.ub
                and var.name not in overrides):
            return LpSolution(INFEASIBLE, {}, None, ())

    names, lbs, ubs, rows, rhs_vec, col, n_struct = _standard_form(
        model, overrides)
    tab, n_real = _phase1(names, lbs, ubs, rows, rhs_vec)
    tab.iterate(n_real, bland=True)  # bounded below by 0, never unbounded
    if tab.obj > 0:
        return LpSolution(INFEASIBLE, {}, None, ())
    _drop_artificials(tab, n_real)

    sense_flip = model.objective.sense == MAX
    cost = [_ZERO] * tab.n
    for var, c in model.objective.coeffs.items():
        cost[col[var]] = -c if sense_flip else c
    cb = [cost[k] for k in tab.basis]
    tab.z = [cost[j] - sum(cb[i] * tab.T[i][j] for i in range(tab.m))
             for j in range(tab.n)]
    tab.obj = (sum(cb[i] * tab.beta[i] for i in range(tab.m))
               + sum(cost[j] * tab.val[j] for j in range(tab.n)
                     if tab.state[j] != _BASIC))
    status = tab.iterate(tab.n, bland=(rule == "bland"))
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, {}, None, ())

    basic_row = {j: i for i, j in enumerate(tab.basis)}
    values = {}
    for j in range(n_struct):
        if j in basic_row:
            values[names[j]] = tab.beta[basic_row[j]]
        else:
            values[names[j]] = tab.val[j]
    objective = model.evaluate(values, model.objective.coeffs)
    basis = tuple(sorted(tab.names[k] for k in tab.basis))
    return LpSolution(OPTIMAL, values, objective, basis)
