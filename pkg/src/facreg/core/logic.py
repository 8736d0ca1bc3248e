"""
Logical Operators as 0-1 Constraints

Purpose:
    Lower boolean gates over binary variables to integral linear constraints
    and build the `same` and `enum` combinators on selection vectors.

Capabilities:
    - encode_gate: And / Or / Not / Xor with constant folding
    - selection_vector: one-hot vector over a pruned support (exactly-one row)
    - same: indicator that two selection vectors pick the same candidate
    - enum_expr: number of distinct candidates picked by a set of vectors
    - class_vector: regroup a vector's candidates into coarser classes
    - prune_support: candidates kept within factor * delta of the initial value
    - margin_support: candidates within a cost margin of the nearest one

Encodings (z is the gate output):
    And:  z >= sum(x) - (n - 1),  z <= x_i
    Or:   z <= sum(x),            z >= x_i
    Xor:  z <= x + y,  z >= x - y,  z >= y - x,  z <= 2 - x - y
    Not:  z + x = 1
"""

from __future__ import annotations

from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np

from facreg.errors import ArityError, AttributeMismatch, EmptyArgument
from facreg.models.bip import (
    BipModel,
    LinearExpression,
    Relation,
    SelectionVector,
    Var,
)
from facreg.models.spaces import Attribute


class Gate(Enum):
    """Boolean gates with a linear 0-1 encoding"""
    AND = "and"
    OR = "or"
    NOT = "not"
    XOR = "xor"


def _dedup(inputs: Sequence[Var]) -> List[Var]:
    seen = set()
    out = []
    for v in inputs:
        if v.index not in seen:
            seen.add(v.index)
            out.append(v)
    return out


def _and(inputs: Sequence[Var], model: BipModel) -> Var:
    if any(model.fixed_value(v) == 0 for v in inputs):
        return model.const(0)
    live = _dedup([v for v in inputs if model.fixed_value(v) is None])
    if not live:
        return model.const(1)
    if len(live) == 1:
        return live[0]

    z = model.new_var("and")
    model.add_constraint([(1, v) for v in live] + [(-1, z)], Relation.LE, len(live) - 1, "and")
    for v in live:
        model.add_constraint([(1, z), (-1, v)], Relation.LE, 0, "and")
    return z


def _or(inputs: Sequence[Var], model: BipModel) -> Var:
    if any(model.fixed_value(v) == 1 for v in inputs):
        return model.const(1)
    live = _dedup([v for v in inputs if model.fixed_value(v) is None])
    if not live:
        return model.const(0)
    if len(live) == 1:
        return live[0]

    z = model.new_var("or")
    model.add_constraint([(1, z)] + [(-1, v) for v in live], Relation.LE, 0, "or")
    for v in live:
        model.add_constraint([(1, v), (-1, z)], Relation.LE, 0, "or")
    return z


def _not(x: Var, model: BipModel) -> Var:
    fixed = model.fixed_value(x)
    if fixed is not None:
        return model.const(1 - fixed)
    z = model.new_var("not")
    model.add_constraint([(1, z), (1, x)], Relation.EQ, 1, "not")
    return z


def _xor(x: Var, y: Var, model: BipModel) -> Var:
    fx, fy = model.fixed_value(x), model.fixed_value(y)
    if fx is not None and fy is not None:
        return model.const(fx ^ fy)
    if fx is not None or fy is not None:
        fixed, other = (fx, y) if fx is not None else (fy, x)
        return other if fixed == 0 else _not(other, model)
    if x.index == y.index:
        return model.const(0)

    z = model.new_var("xor")
    model.add_constraint([(1, z), (-1, x), (-1, y)], Relation.LE, 0, "xor")
    model.add_constraint([(1, z), (-1, x), (1, y)], Relation.GE, 0, "xor")
    model.add_constraint([(1, z), (1, x), (-1, y)], Relation.GE, 0, "xor")
    model.add_constraint([(1, z), (1, x), (1, y)], Relation.LE, 2, "xor")
    return z


def encode_gate(gate: Gate, inputs: Sequence[Var], model: BipModel) -> Var:
    """
    Bind a gate output variable to its inputs.

    Fixed inputs are folded away at encode time: the result may be an input
    itself or one of the model's constants, and then no constraint is emitted.

    Raises:
        ArityError: Not needs 1 input, Xor 2, And/Or at least 2
    """
    n = len(inputs)
    if gate == Gate.NOT:
        if n != 1:
            raise ArityError(f"Not takes 1 input, got {n}")
        return _not(inputs[0], model)
    if gate == Gate.XOR:
        if n != 2:
            raise ArityError(f"Xor takes 2 inputs, got {n}")
        return _xor(inputs[0], inputs[1], model)
    if n < 2:
        raise ArityError(f"{gate.value.capitalize()} takes at least 2 inputs, got {n}")
    if gate == Gate.AND:
        return _and(inputs, model)
    return _or(inputs, model)


# ============ Selection vectors ============


def prune_support(
    residuals: Sequence[float],
    delta: float,
    factor: Optional[float] = 5.0,
) -> frozenset:
    """
    Candidate indices j with residual <= factor * delta.

    Falls back to the single nearest candidate when nothing is inside the
    radius. factor=None keeps every candidate.
    """
    r = np.abs(np.asarray(residuals, dtype=float))
    if factor is None:
        return frozenset(range(r.shape[0]))
    kept = frozenset(int(j) for j in np.flatnonzero(r <= factor * delta))
    if kept:
        return kept
    return frozenset({int(np.argmin(r))})


def margin_support(residuals: Sequence[float], margin: float) -> frozenset:
    """
    Candidate indices whose residual is within `margin` of the smallest one.

    An infinite margin keeps every candidate.
    """
    r = np.abs(np.asarray(residuals, dtype=float))
    if r.shape[0] == 0:
        return frozenset()
    if not np.isfinite(margin):
        return frozenset(range(r.shape[0]))
    return frozenset(int(j) for j in np.flatnonzero(r <= r.min() + margin))


def selection_vector(
    model: BipModel,
    attribute: Attribute,
    component: int,
    size: int,
    support: frozenset,
) -> SelectionVector:
    """
    Create x_{i,j} for one component and attribute and emit its exactly-one row.

    Candidates outside `support` share the model's constant 0. A singleton
    support is pinned to the constant 1 instead of getting a constraint.
    """
    if not support:
        raise EmptyArgument(f"{attribute.value}[{component}] has an empty support")

    vars_: List[Var] = []
    single = len(support) == 1
    for j in range(size):
        if j not in support:
            vars_.append(model.const(0))
        elif single:
            vars_.append(model.const(1))
        else:
            vars_.append(model.new_var(f"{attribute.value}[{component}][{j}]"))

    if not single:
        model.add_constraint(
            [(1, vars_[j]) for j in sorted(support)],
            Relation.EQ,
            1,
            f"C1 {attribute.value}[{component}]",
        )
    return SelectionVector(attribute, component, tuple(vars_), frozenset(support))


def _check_compatible(vectors: Sequence[SelectionVector]) -> None:
    first = vectors[0]
    for v in vectors[1:]:
        if v.attribute != first.attribute or len(v.vars) != len(first.vars):
            raise AttributeMismatch(
                f"cannot combine {first.attribute.value} ({len(first.vars)} candidates) "
                f"with {v.attribute.value} ({len(v.vars)} candidates)"
            )


def same(a: SelectionVector, b: SelectionVector, model: BipModel) -> Var:
    """
    1 iff a and b select the same candidate: Not(Or_j (a_j Xor b_j)).

    Only indices in either support produce a term, and disjoint supports give
    the constant 0 directly.
    """
    _check_compatible([a, b])
    if not (a.support & b.support):
        return model.const(0)

    terms = []
    for j in sorted(a.support | b.support):
        if j in a.support and j in b.support:
            terms.append(_xor(a.vars[j], b.vars[j], model))
        elif j in a.support:
            terms.append(a.vars[j])
        else:
            terms.append(b.vars[j])
    return _not(_or(terms, model), model)


def enum_expr(vectors: Sequence[SelectionVector], model: BipModel) -> LinearExpression:
    """
    Sum over candidates j of y_j = Or_i x_{i,j}; its value is the number of
    distinct candidates the vectors select.

    Raises:
        EmptyArgument: If vectors is empty
        AttributeMismatch: If the vectors come from different spaces
    """
    if not vectors:
        raise EmptyArgument("enum needs at least one selection vector")
    _check_compatible(vectors)

    expr = LinearExpression()
    union = set().union(*(v.support for v in vectors))
    for j in sorted(union):
        y = _or([v.vars[j] for v in vectors if j in v.support], model)
        expr.add(1.0, y)
    return expr


def class_vector(
    vector: SelectionVector,
    classes: Sequence[int],
    attribute: Attribute,
    model: BipModel,
) -> SelectionVector:
    """
    Regroup a selection vector: entry k is the Or of the entries whose
    candidate belongs to class k. A support that lies in one class fixes
    that entry to 1.

    Args:
        vector: Vector over the fine candidates
        classes: Class index of each fine candidate
        attribute: Attribute tag of the coarse vector
    """
    num_classes = max(classes) + 1 if len(classes) else 0
    members: Dict[int, List[Var]] = {}
    for j in sorted(vector.support):
        members.setdefault(classes[j], []).append(vector.vars[j])

    single = len(members) == 1
    vars_: List[Var] = []
    for k in range(num_classes):
        if k not in members:
            vars_.append(model.const(0))
        elif single:
            vars_.append(model.const(1))
        else:
            vars_.append(_or(members[k], model))
    return SelectionVector(attribute, vector.component, tuple(vars_), frozenset(members))
