"""
Layout Regularizer

Purpose:
    Pick, for every component and attribute, one candidate from the model
    spaces so that the picks stay close to the detected values while using as
    few distinct categories as possible, subject to the structural rules.

Objective:
    data term      sum_a sum_i sum_j scale_a * |eps_i^a[j]| * x_ij^a
    category term  sum_a omega_a * enum(xi^a)

Constraints:
    C1  exactly one candidate per component and attribute
    C2  no two components share both their p and z category
    C3  n, lambda and theta come from one orientation candidate (a single
        selection vector over the orientation space)
    R1  same z category implies same theta class
    R2  same p category implies same lambda class

Usage:
    >>> regularized, report = regularize(layout, Config())
    >>> report.counts_after
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from facreg.core.attrspace import (
    build_model_spaces,
    component_values,
    orientation_classes,
    residual_matrix,
)
from facreg.core.config import Config, WeightMode, WeightsConfig
from facreg.core.geometry import validate_layout
from facreg.core.logic import class_vector, enum_expr, margin_support, same, selection_vector
from facreg.core.solver import solve_bb
from facreg.errors import NoSolution, RegularizationError, SpaceMismatch
from facreg.models.bip import BipModel, Relation, SelectionVector, Solution, SolveStatus, Var
from facreg.models.layout import GeomParams, Layout
from facreg.models.spaces import (
    GEOMETRIC_ATTRIBUTES,
    STATS_ORDER,
    Attribute,
    ModelSpaces,
)

logger = logging.getLogger(__name__)

OMEGA_FLOOR = 1e-6


# ============ Residuals and weights ============


@dataclass(frozen=True)
class Residuals:
    """Per attribute, an (N, k) matrix of distances from initial values to candidates"""
    values: Dict[Attribute, np.ndarray]

    def __getitem__(self, attribute: Attribute) -> np.ndarray:
        return self.values[attribute]

    def of(self, attribute: Attribute, component: int) -> np.ndarray:
        return self.values[attribute][component]

    def to_dict(self) -> Dict[str, Any]:
        return {a.value: self.values[a].tolist() for a in GEOMETRIC_ATTRIBUTES}


def compute_residuals(layout: Layout, spaces: ModelSpaces) -> Residuals:
    """
    Distance of each component's initial value to every candidate.

    Raises:
        SpaceMismatch: If the spaces were built for a different layout
    """
    values: Dict[Attribute, np.ndarray] = {}
    for attribute in GEOMETRIC_ATTRIBUTES:
        space = spaces[attribute]
        rows = component_values(layout, attribute)
        if len(space.member_map) != rows.shape[0]:
            raise SpaceMismatch(
                f"{attribute.value} space covers {len(space.member_map)} components, "
                f"layout has {rows.shape[0]}"
            )
        if space.values.ndim != 2 or space.values.shape[1] != rows.shape[1]:
            raise SpaceMismatch(
                f"{attribute.value} candidates have dimension {space.values.shape[-1]}, "
                f"expected {rows.shape[1]}"
            )
        if any(j >= space.size for support in space.member_map for j in support):
            raise SpaceMismatch(f"{attribute.value} support refers to a missing candidate")
        values[attribute] = residual_matrix(space, rows)
    return Residuals(values)


@dataclass(frozen=True)
class Weights:
    """Resolved regularization weight per attribute"""
    omega: Dict[Attribute, float]
    mode: WeightMode = WeightMode.AUTO

    def to_dict(self) -> Dict[str, Any]:
        return {"mode": self.mode.value, "omega": {a.value: w for a, w in self.omega.items()}}


def resolve_weights(config: WeightsConfig, residuals: Residuals) -> Weights:
    """
    Manual mode takes config.omega as is.

    Auto mode sets omega_a = auto_gain * data_scale_a * sum_i min_j eps_ij,
    floored at 1e-6, so one category outweighs the attribute's whole data
    cost at the nearest candidates. A noise-free layout stays at the floor.
    """
    if config.mode == WeightMode.MANUAL:
        return Weights({a: config.omega.get(a) for a in GEOMETRIC_ATTRIBUTES}, config.mode)

    omega = {}
    for attribute in GEOMETRIC_ATTRIBUTES:
        nearest = residuals[attribute].min(axis=1)
        scale = config.data_scale.get(attribute)
        omega[attribute] = max(config.auto_gain * scale * float(nearest.sum()), OMEGA_FLOOR)
    return Weights(omega, config.mode)


def category_margin(weights: Weights, config: WeightsConfig, attribute: Attribute) -> float:
    """
    Largest extra data cost a pick can carry over the component's nearest
    candidate and still be optimal: omega_a / data_scale_a.

    Moving a pick beyond it to the nearest candidate saves more data cost
    than the one category it can add.
    """
    scale = config.data_scale.get(attribute)
    if scale <= 0:
        return math.inf
    return weights.omega[attribute] / scale


# ============ Model assembly ============


@dataclass
class VarMap:
    """Selection vectors of the built model and the orientation class tables"""
    vectors: Dict[Attribute, List[SelectionVector]] = field(default_factory=dict)
    theta_classes: List[int] = field(default_factory=list)
    lambda_classes: List[int] = field(default_factory=list)
    class_vectors: Dict[Tuple[Attribute, int], SelectionVector] = field(default_factory=dict)
    same_vars: Dict[Tuple[Attribute, int, int], Var] = field(default_factory=dict)
    constraint_counts: Dict[str, int] = field(default_factory=dict)

    def vector(self, attribute: Attribute, component: int) -> SelectionVector:
        return self.vectors[attribute][component]

    def selected(self, attribute: Attribute, assignment: Tuple[int, ...]) -> List[int]:
        """Chosen candidate index of every component for one attribute"""
        return [v.selected(assignment) for v in self.vectors[attribute]]


CONSTRAINT_FAMILIES = ("C1", "enum", "same", "C2", "R1", "R2")

# class gates belong to the rule that needs them
_SAME_FAMILY = {
    Attribute.P: "same",
    Attribute.Z: "same",
    Attribute.THETA: "R1",
    Attribute.LAMBDA: "R2",
}


class _Builder:
    """Accumulates one BipModel; caches same() and class vectors per pair"""

    def __init__(self, model: BipModel, varmap: VarMap):
        self.model = model
        self.varmap = varmap
        for family in CONSTRAINT_FAMILIES:
            varmap.constraint_counts.setdefault(family, 0)

    def count(self, family: str, before: int) -> None:
        added = len(self.model.constraints) - before
        self.varmap.constraint_counts[family] = (
            self.varmap.constraint_counts.get(family, 0) + added
        )

    def same(self, attribute: Attribute, i: int, j: int) -> Var:
        key = (attribute, i, j)
        if key not in self.varmap.same_vars:
            before = len(self.model.constraints)
            if attribute in (Attribute.THETA, Attribute.LAMBDA):
                a, b = self.class_vector(attribute, i), self.class_vector(attribute, j)
            else:
                a, b = self.varmap.vector(attribute, i), self.varmap.vector(attribute, j)
            self.varmap.same_vars[key] = same(a, b, self.model)
            self.count(_SAME_FAMILY[attribute], before)
        return self.varmap.same_vars[key]

    def overlaps(self, attribute: Attribute, i: int, j: int) -> bool:
        return bool(self.varmap.vector(attribute, i).support & self.varmap.vector(attribute, j).support)

    def class_vector(self, attribute: Attribute, i: int) -> SelectionVector:
        key = (attribute, i)
        if key not in self.varmap.class_vectors:
            classes = (
                self.varmap.theta_classes
                if attribute == Attribute.THETA
                else self.varmap.lambda_classes
            )
            self.varmap.class_vectors[key] = class_vector(
                self.varmap.vector(Attribute.O, i), classes, attribute, self.model
            )
        return self.varmap.class_vectors[key]

    def at_most_one(self, a: Var, b: Var, family: str, label: str) -> None:
        """a + b <= 1, skipped when it holds for every assignment"""
        fa, fb = self.model.fixed_value(a), self.model.fixed_value(b)
        if fa == 0 or fb == 0:
            return
        self.model.add_constraint([(1, a), (1, b)], Relation.LE, 1, label)
        self.varmap.constraint_counts[family] += 1

    def implies(self, a: Var, b: Var, family: str, label: str) -> None:
        """a <= b, skipped when it holds for every assignment"""
        if self.model.fixed_value(a) == 0 or self.model.fixed_value(b) == 1 or a == b:
            return
        self.model.add_constraint([(1, a), (-1, b)], Relation.LE, 0, label)
        self.varmap.constraint_counts[family] += 1


def build_bip(
    layout: Layout,
    spaces: ModelSpaces,
    weights: Weights,
    config: Optional[Config] = None,
    residuals: Optional[Residuals] = None,
) -> Tuple[BipModel, VarMap]:
    """
    Assemble the regularization program.

    A component's support is its member-map entry (pruned or full, as the
    spaces were built) joined with every candidate inside the category
    margin of its nearest one, so pruning never cuts a pick that could lower
    the category count.

    Returns:
        (model, varmap) where varmap.constraint_counts splits the emitted rows
        into C1, C2, R1, R2, the gate rows of the category term ("enum") and
        the p/z same() gates shared by C2, R1 and R2 ("same")
    """
    config = config or Config()
    residuals = residuals or compute_residuals(layout, spaces)
    model = BipModel(name=layout.building_id or "layout")
    varmap = VarMap()
    builder = _Builder(model, varmap)
    n = len(layout)

    # C1 and data term
    before = len(model.constraints)
    for attribute in GEOMETRIC_ATTRIBUTES:
        space = spaces[attribute]
        scale = config.weights.data_scale.get(attribute)
        margin = category_margin(weights, config.weights, attribute)
        vectors = []
        for i in range(n):
            eps = residuals.of(attribute, i)
            support = space.member_map[i] | margin_support(eps, margin)
            vec = selection_vector(model, attribute, i, space.size, support)
            for j in sorted(support):
                model.add_objective(scale * float(eps[j]), vec.vars[j])
            vectors.append(vec)
        varmap.vectors[attribute] = vectors
    builder.count("C1", before)

    # category term
    before = len(model.constraints)
    for attribute in GEOMETRIC_ATTRIBUTES:
        omega = weights.omega[attribute]
        if omega > 0:
            model.add_expression(enum_expr(varmap.vectors[attribute], model), omega)
    builder.count("enum", before)

    varmap.theta_classes, varmap.lambda_classes = orientation_classes(spaces[Attribute.O])

    # gates are built only for pairs a rule can still bind
    for i, j in combinations(range(n), 2):
        s_p = builder.same(Attribute.P, i, j)
        if model.fixed_value(s_p) != 0:
            s_z = builder.same(Attribute.Z, i, j)
            builder.at_most_one(s_p, s_z, "C2", f"C2 {i},{j}")
            builder.implies(s_p, builder.same(Attribute.LAMBDA, i, j), "R2", f"R2 {i},{j}")

        if builder.overlaps(Attribute.Z, i, j):
            s_theta = builder.same(Attribute.THETA, i, j)
            if model.fixed_value(s_theta) != 1:
                builder.implies(builder.same(Attribute.Z, i, j), s_theta, "R1", f"R1 {i},{j}")

    logger.info(
        "Built BIP %s: %d vars (%d free), %d constraints %s",
        model.name, model.num_vars, model.num_free, len(model.constraints),
        varmap.constraint_counts,
    )
    return model, varmap


# ============ Decoding ============


def decode(
    solution: Solution,
    varmap: VarMap,
    spaces: ModelSpaces,
    layout: Layout,
) -> Layout:
    """
    Replace every component's parameters by its selected candidates.

    Raises:
        NoSolution: If the solution carries no assignment
    """
    if not solution.has_assignment:
        raise NoSolution(f"solver returned status {solution.status.value} without an assignment")

    assignment = solution.assignment
    picks = {a: varmap.selected(a, assignment) for a in GEOMETRIC_ATTRIBUTES}
    components = []
    for i, comp in enumerate(layout.components):
        p = spaces[Attribute.P].candidate(picks[Attribute.P][i])
        n, lam, theta = spaces[Attribute.O].candidate(picks[Attribute.O][i])
        params = GeomParams(
            p=(p[0], p[1]),
            z=spaces[Attribute.Z].candidate(picks[Attribute.Z][i]),
            w=spaces[Attribute.W].candidate(picks[Attribute.W][i]),
            h=spaces[Attribute.H].candidate(picks[Attribute.H][i]),
            n=n,
            lam=lam,
            theta=theta,
        )
        components.append(comp.with_params(params))
    return layout.with_components(components)


def selected_counts(varmap: VarMap, assignment: Tuple[int, ...]) -> Tuple[int, ...]:
    """Distinct selected candidates per attribute in (P, Z, O, W, H) order"""
    return tuple(len(set(varmap.selected(a, assignment))) for a in STATS_ORDER)


# ============ Pipeline ============


@dataclass
class RunReport:
    """Summary of one regularize() run"""
    building_id: str
    status: SolveStatus
    objective_value: float
    stats: Dict[str, Any]
    counts_before: Tuple[int, ...]
    counts_after: Tuple[int, ...]
    free_vars_pruned: int
    free_vars_unpruned: Optional[int]
    num_constraints: int
    constraint_counts: Dict[str, int]
    omega: Dict[str, float]
    deltas: Dict[str, float]
    warnings: List[str] = field(default_factory=list)
    pruning_fallback: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "building_id": self.building_id,
            "status": self.status.value,
            "objective_value": self.objective_value,
            "stats": self.stats,
            "counts_before": dict(zip([a.value for a in STATS_ORDER], self.counts_before)),
            "counts_after": dict(zip([a.value for a in STATS_ORDER], self.counts_after)),
            "free_vars_pruned": self.free_vars_pruned,
            "free_vars_unpruned": self.free_vars_unpruned,
            "num_constraints": self.num_constraints,
            "constraint_counts": self.constraint_counts,
            "omega": self.omega,
            "deltas": self.deltas,
            "warnings": self.warnings,
            "pruning_fallback": self.pruning_fallback,
        }


def _require_valid(layout: Layout) -> None:
    report = validate_layout(layout)
    if not report.ok:
        raise RegularizationError(f"invalid layout: {report.summary()}")


def _count_unpruned(layout: Layout, weights: Weights, config: Config) -> int:
    spaces = build_model_spaces(layout, prune_radius_factor=None)
    model, _ = build_bip(layout, spaces, weights, config)
    return model.num_free


def regularize(layout: Layout, config: Optional[Config] = None) -> Tuple[Layout, RunReport]:
    """
    Run spaces -> residuals -> BIP -> branch-and-bound -> decode.

    A timed-out search is decoded from its incumbent and flagged in the
    report's warnings. When the pruned program is infeasible the run is
    repeated on full supports, so pruning never turns a feasible layout
    into a failure; the report then sets pruning_fallback.

    Raises:
        RegularizationError: If the layout is invalid
        NoSolution: If the program is infeasible or no incumbent was found
    """
    config = config or Config()
    _require_valid(layout)

    spaces = build_model_spaces(layout, config.prune_radius_factor)
    residuals = compute_residuals(layout, spaces)
    weights = resolve_weights(config.weights, residuals)
    model, varmap = build_bip(layout, spaces, weights, config, residuals)
    pruned_free = model.num_free

    unpruned: Optional[int] = model.num_free
    if config.pruning.enabled:
        unpruned = _count_unpruned(layout, weights, config) if config.report_unpruned else None

    solution = solve_bb(model, config.solver)
    warnings: List[str] = []
    fallback = False
    if solution.status == SolveStatus.INFEASIBLE and config.pruning.enabled:
        logger.warning("Pruned model of %s is infeasible; solving on full supports", model.name)
        warnings.append("pruned model infeasible; solved on full supports")
        fallback = True
        spaces = build_model_spaces(layout, prune_radius_factor=None)
        model, varmap = build_bip(layout, spaces, weights, config, residuals)
        solution = solve_bb(model, config.solver)

    if solution.status == SolveStatus.TIMED_OUT:
        warnings.append(
            f"time limit {config.solver.time_limit_s}s reached; result is the best incumbent"
        )
        logger.warning("Regularization of %s timed out", model.name)

    regularized = decode(solution, varmap, spaces, layout)
    report = RunReport(
        building_id=layout.building_id,
        status=solution.status,
        objective_value=solution.objective_value,
        stats=solution.stats.to_dict(),
        counts_before=spaces.counts(),
        counts_after=selected_counts(varmap, solution.assignment),
        free_vars_pruned=pruned_free,
        free_vars_unpruned=unpruned,
        num_constraints=len(model.constraints),
        constraint_counts=dict(varmap.constraint_counts),
        omega={a.value: w for a, w in weights.omega.items()},
        deltas=spaces.deltas(),
        warnings=warnings,
        pruning_fallback=fallback,
    )
    logger.info(
        "Regularized %s: objective=%.9g categories %s -> %s",
        layout.building_id or "<layout>", solution.objective_value,
        report.counts_before, report.counts_after,
    )
    return regularized, report


# ============ Pruning comparison ============


@dataclass
class PruningRun:
    free_vars: int
    num_constraints: int
    wall_time: float
    objective_value: float
    status: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "free_vars": self.free_vars,
            "num_constraints": self.num_constraints,
            "wall_time": self.wall_time,
            "objective_value": self.objective_value,
            "status": self.status,
        }


@dataclass
class PruningComparison:
    """Same layout regularized with and without support pruning"""
    pruned: PruningRun
    unpruned: PruningRun

    @property
    def reduction(self) -> float:
        """Fraction of free variables removed by pruning"""
        if self.unpruned.free_vars == 0:
            return 0.0
        return 1.0 - self.pruned.free_vars / self.unpruned.free_vars

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pruned": self.pruned.to_dict(),
            "unpruned": self.unpruned.to_dict(),
            "reduction": self.reduction,
        }


def _timed_run(layout: Layout, config: Config) -> PruningRun:
    started = time.monotonic()
    _, report = regularize(layout, config)
    return PruningRun(
        free_vars=report.free_vars_pruned,
        num_constraints=report.num_constraints,
        wall_time=time.monotonic() - started,
        objective_value=report.objective_value,
        status=report.status.value,
    )


def compare_pruning(layout: Layout, config: Optional[Config] = None) -> PruningComparison:
    """
    Regularize twice, with pruning on and off, and compare model sizes,
    wall times and objectives.

    Candidates do not depend on pruning, so both runs resolve the same
    weights and their objectives are comparable.
    """
    config = (config or Config()).model_copy(update={"report_unpruned": False})
    comparison = PruningComparison(
        _timed_run(layout, config.with_pruning(True)),
        _timed_run(layout, config.with_pruning(False)),
    )
    logger.info(
        "Pruning removed %.1f%% of free variables (%d -> %d)",
        100 * comparison.reduction, comparison.unpruned.free_vars, comparison.pruned.free_vars,
    )
    return comparison
