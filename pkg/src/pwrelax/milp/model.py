"""Mixed-integer linear model container with exact rational coefficients.

Everything numeric is a Fraction: floats are converted exactly (they are
dyadic), so a model built from snapped geometry stays exact end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Union

from ..errors import UsageError, ValidationError

Numeric = Union[int, float, str, Fraction]

CONTINUOUS = "continuous"
BINARY = "binary"
INTEGER = "integer"
KINDS = (CONTINUOUS, BINARY, INTEGER)

SENSES = ("<=", "=", ">=")
MIN = "min"
MAX = "max"


def to_frac(x: Numeric) -> Fraction:
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # exact: floats are dyadic rationals
    if isinstance(x, str):
        return Fraction(x)
    raise UsageError(f"cannot interpret {x!r} as a rational")


@dataclass
class Variable:
    name: str
    kind: str = CONTINUOUS
    lb: Optional[Fraction] = Fraction(0)
    ub: Optional[Fraction] = None  # None = unbounded on that side


@dataclass
class Constraint:
    name: str
    coeffs: dict[str, Fraction]
    sense: str
    rhs: Fraction


@dataclass
class Objective:
    sense: str = MIN
    coeffs: dict[str, Fraction] = field(default_factory=dict)


@dataclass
class Sos2Group:
    """Declarative ordered-adjacency marker over a variable list."""

    name: str
    members: tuple[str, ...]


class MilpModel:
    """Single-writer model: build, then hand to a solver or writer."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: dict[str, Variable] = {}
        self.constraints: dict[str, Constraint] = {}
        self.objective = Objective()
        self.sos2_groups: dict[str, Sos2Group] = {}

    # -- construction -------------------------------------------------

    def add_var(self, name: str, kind: str = CONTINUOUS,
                lb: Optional[Numeric] = Fraction(0),
                ub: Optional[Numeric] = None) -> str:
        if name in self.variables:
            raise ValidationError(f"duplicate variable {name!r}")
        if kind not in KINDS:
            raise UsageError(f"unknown variable kind {kind!r}")
        if kind == BINARY:
            lb, ub = Fraction(0), Fraction(1)
        lo = to_frac(lb) if lb is not None else None
        hi = to_frac(ub) if ub is not None else None
        if lo is not None and hi is not None and lo > hi:
            raise ValidationError(f"empty bound interval for {name!r}")
        self.variables[name] = Variable(name, kind, lo, hi)
        return name

    def add_constraint(self, name: str, coeffs: dict[str, Numeric],
                       sense: str, rhs: Numeric) -> str:
        if name in self.constraints:
            raise ValidationError(f"duplicate constraint {name!r}")
        if sense not in SENSES:
            raise UsageError(f"unknown sense {sense!r}")
        clean = {}
        for var, c in coeffs.items():
            if var not in self.variables:
                raise ValidationError(f"constraint {name!r} uses undeclared {var!r}")
            c = to_frac(c)
            if c != 0:
                clean[var] = c
        self.constraints[name] = Constraint(name, clean, sense, to_frac(rhs))
        return name

    def set_objective(self, sense: str, coeffs: dict[str, Numeric]) -> None:
        if sense not in (MIN, MAX):
            raise UsageError(f"objective sense must be min or max, got {sense!r}")
        clean = {}
        for var, c in coeffs.items():
            if var not in self.variables:
                raise ValidationError(f"objective uses undeclared {var!r}")
            c = to_frac(c)
            if c != 0:
                clean[var] = c
        self.objective = Objective(sense, clean)

    def add_sos2(self, name: str, members: Iterable[str]) -> str:
        if name in self.sos2_groups:
            raise ValidationError(f"duplicate SOS2 group {name!r}")
        mem = tuple(members)
        for var in mem:
            if var not in self.variables:
                raise ValidationError(f"SOS2 group {name!r} uses undeclared {var!r}")
        if len(mem) < 2:
            raise UsageError("SOS2 group needs at least two members")
        self.sos2_groups[name] = Sos2Group(name, mem)
        return name

    # -- queries ------------------------------------------------------

    def integer_variables(self) -> list[str]:
        return [v.name for v in self.variables.values()
                if v.kind in (BINARY, INTEGER)]

    def coefficient_signature(self):
        """Canonical structure for exact model comparison.

        Name-sorted: declaration order is not semantic and the file
        formats do not fully preserve it.
        """
        return (
            tuple(sorted((v.name, v.kind, v.lb, v.ub)
                         for v in self.variables.values())),
            tuple(sorted((c.name, tuple(sorted(c.coeffs.items())), c.sense, c.rhs)
                         for c in self.constraints.values())),
            (self.objective.sense, tuple(sorted(self.objective.coeffs.items()))),
            tuple(sorted((g.name, g.members)
                         for g in self.sos2_groups.values())),
        )

    def evaluate(self, values: dict[str, Fraction],
                 coeffs: dict[str, Fraction]) -> Fraction:
        return sum((c * values[v] for v, c in coeffs.items()), Fraction(0))

    def is_feasible_point(self, values: dict[str, Fraction]) -> bool:
        """Exact feasibility of a full assignment (bounds + rows, not
        integrality)."""
        for var in self.variables.values():
            x = values[var.name]
            if var.lb is not None and x < var.lb:
                return False
            if var.ub is not None and x > var.ub:
                return False
        for con in self.constraints.values():
            lhs = self.evaluate(values, con.coeffs)
            if con.sense == "<=" and lhs > con.rhs:
                return False
            if con.sense == ">=" and lhs < con.rhs:
                return False
            if con.sense == "=" and lhs != con.rhs:
                return False
        return True
