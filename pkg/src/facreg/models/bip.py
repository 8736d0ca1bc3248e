"""
BIP Models for facreg

Binary variables, integral linear constraints, selection vectors and the
lowered 0-1 program that all logical operators compile into.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from facreg.errors import PartialAssignment, SolverError
from facreg.models.spaces import Attribute


@dataclass(frozen=True)
class Var:
    """Binary variable; `fixed` pins it to 0 or 1 and removes it from the free set"""
    index: int
    fixed: Optional[int] = None

    @property
    def is_fixed(self) -> bool:
        return self.fixed is not None

    @property
    def name(self) -> str:
        return f"x{self.index}"


class Relation(Enum):
    """Constraint relation"""
    LE = "<="
    GE = ">="
    EQ = "="


Term = Tuple[int, Var]


@dataclass(frozen=True)
class LinearConstraint:
    """sum(coef * var) <relation> rhs with integer coefficients"""
    terms: Tuple[Term, ...]
    relation: Relation
    rhs: int
    label: str = ""

    def activity(self, assignment: Sequence[int]) -> int:
        return sum(c * assignment[v.index] for c, v in self.terms)

    def holds(self, assignment: Sequence[int]) -> bool:
        lhs = self.activity(assignment)
        if self.relation == Relation.LE:
            return lhs <= self.rhs
        if self.relation == Relation.GE:
            return lhs >= self.rhs
        return lhs == self.rhs

    def to_dict(self) -> Dict[str, Any]:
        return {
            "terms": [[c, v.index] for c, v in self.terms],
            "relation": self.relation.value,
            "rhs": self.rhs,
            "label": self.label,
        }


@dataclass
class LinearExpression:
    """sum(coef * var); fixed variables stay as terms so their cost is kept"""
    terms: List[Tuple[float, Var]] = field(default_factory=list)

    def add(self, coef: float, var: Var) -> None:
        self.terms.append((coef, var))

    def value(self, assignment: Sequence[int]) -> float:
        return math.fsum(c * assignment[v.index] for c, v in self.terms)

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SelectionVector:
    """
    One-hot choice of a candidate for one component and attribute.

    Attributes:
        attribute: Space the vector selects from
        component: Component index i
        vars: One variable per candidate; entries outside `support` are fixed to 0
        support: Candidate indices whose variable is not fixed to 0
    """
    attribute: Attribute
    component: int
    vars: Tuple[Var, ...]
    support: FrozenSet[int]

    def __len__(self) -> int:
        return len(self.vars)

    def selected(self, assignment: Sequence[int]) -> int:
        """Index of the chosen candidate under a full assignment"""
        chosen = [j for j in sorted(self.support) if assignment[self.vars[j].index] == 1]
        if len(chosen) != 1:
            raise SolverError(
                f"{self.attribute.value}[{self.component}] selects {len(chosen)} candidates"
            )
        return chosen[0]


class BipModel:
    """
    A 0-1 linear program: minimize objective subject to integral constraints.

    Variables are created through new_var()/const(); constants are cached so
    every folded 0 or 1 shares one fixed variable.
    """

    def __init__(self, name: str = "bip"):
        self.name = name
        self.num_vars = 0
        self.constraints: List[LinearConstraint] = []
        self.objective: List[Tuple[float, Var]] = []
        self.fixed_assignments: Dict[int, int] = {}
        self.labels: Dict[int, str] = {}
        self._consts: Dict[int, Var] = {}

    # ============ Variables ============

    def new_var(self, label: str = "") -> Var:
        var = Var(self.num_vars)
        self.num_vars += 1
        if label:
            self.labels[var.index] = label
        return var

    def const(self, value: int) -> Var:
        """Shared variable fixed to `value` (0 or 1)"""
        if value not in (0, 1):
            raise ValueError(f"binary constant expected, got {value}")
        if value not in self._consts:
            var = Var(self.num_vars, fixed=value)
            self.num_vars += 1
            self.fixed_assignments[var.index] = value
            self.labels[var.index] = f"const{value}"
            self._consts[value] = var
        return self._consts[value]

    def fixed_value(self, var: Var) -> Optional[int]:
        return self.fixed_assignments.get(var.index)

    def free_vars(self) -> List[int]:
        return [i for i in range(self.num_vars) if i not in self.fixed_assignments]

    @property
    def num_free(self) -> int:
        return self.num_vars - len(self.fixed_assignments)

    # ============ Constraints and objective ============

    def add_constraint(
        self,
        terms: Iterable[Tuple[int, Var]],
        relation: Relation,
        rhs: int,
        label: str = "",
    ) -> int:
        """Append a constraint and return its index"""
        checked: List[Term] = []
        for coef, var in terms:
            if int(coef) != coef:
                raise ValueError(f"non-integral coefficient {coef} in constraint {label!r}")
            self._check_var(var)
            checked.append((int(coef), var))
        if int(rhs) != rhs:
            raise ValueError(f"non-integral rhs {rhs} in constraint {label!r}")
        self.constraints.append(LinearConstraint(tuple(checked), relation, int(rhs), label))
        return len(self.constraints) - 1

    def add_objective(self, coef: float, var: Var) -> None:
        if not math.isfinite(coef):
            raise ValueError(f"objective coefficient must be finite, got {coef}")
        self._check_var(var)
        self.objective.append((float(coef), var))

    def add_expression(self, expr: LinearExpression, weight: float = 1.0) -> None:
        for coef, var in expr.terms:
            self.add_objective(weight * coef, var)

    def _check_var(self, var: Var) -> None:
        if not 0 <= var.index < self.num_vars:
            raise ValueError(f"variable x{var.index} does not belong to model {self.name!r}")

    # ============ Evaluation ============

    def objective_coefficients(self) -> List[float]:
        """Objective coefficient per variable index (duplicates summed)"""
        coefs = [0.0] * self.num_vars
        for c, v in self.objective:
            coefs[v.index] += c
        return coefs

    def evaluate_objective(self, assignment: Sequence[int]) -> float:
        return math.fsum(c * assignment[v.index] for c, v in self.objective)

    def complete(self, assignment: Any) -> Tuple[int, ...]:
        """Normalize a mapping or sequence into a full assignment tuple"""
        if isinstance(assignment, dict):
            missing = [i for i in range(self.num_vars) if i not in assignment]
            if missing:
                raise PartialAssignment(f"no value for x{missing[0]} ({len(missing)} missing)")
            values = [int(assignment[i]) for i in range(self.num_vars)]
        else:
            values = [int(v) for v in assignment]
            if len(values) != self.num_vars:
                raise PartialAssignment(
                    f"assignment has {len(values)} values, model has {self.num_vars} variables"
                )
        if any(v not in (0, 1) for v in values):
            raise ValueError("assignment values must be 0 or 1")
        return tuple(values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "num_vars": self.num_vars,
            "num_free": self.num_free,
            "constraints": [c.to_dict() for c in self.constraints],
            "objective": [[c, v.index] for c, v in self.objective],
            "fixed": {str(k): v for k, v in sorted(self.fixed_assignments.items())},
        }


class SolveStatus(Enum):
    """Solver outcome"""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    TIMED_OUT = "timed_out"


@dataclass
class SolveStats:
    """Search statistics"""
    nodes: int = 0
    wall_time: float = 0.0
    free_vars: int = 0
    incumbent_history: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nodes": self.nodes,
            "wall_time": self.wall_time,
            "free_vars": self.free_vars,
            "incumbent_history": self.incumbent_history,
        }


@dataclass
class Solution:
    """
    Solver result.

    `assignment` holds one value per variable index; it is None when no
    feasible assignment was found.
    """
    assignment: Optional[Tuple[int, ...]]
    objective_value: float
    status: SolveStatus
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def has_assignment(self) -> bool:
        return self.assignment is not None

    def value(self, var: Var) -> int:
        if self.assignment is None:
            raise SolverError(f"no assignment ({self.status.value})")
        return self.assignment[var.index]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "objective_value": self.objective_value,
            "stats": self.stats.to_dict(),
        }


@dataclass
class FeasibilityReport:
    """Result of check_feasible"""
    feasible: bool
    violated: List[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.feasible
