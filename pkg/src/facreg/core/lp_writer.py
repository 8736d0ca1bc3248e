"""
CPLEX LP export for BipModel, so a model can be cross-checked with an
external solver. Variables are named x<index>; fixed variables are pinned in
Bounds and left out of the Binary section. An objective or row without
variable terms is written as the constant 0.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, List, Tuple, Union

from facreg.models.bip import BipModel, Relation

logger = logging.getLogger(__name__)

TERMS_PER_LINE = 8

_RELATIONS = {Relation.LE: "<=", Relation.GE: ">=", Relation.EQ: "="}


def _number(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return "%.17g" % value


def _terms(terms: Iterable[Tuple[float, str]]) -> List[str]:
    parts: List[str] = []
    for coef, name in terms:
        body = f"{_number(abs(coef))} {name}"
        if coef < 0:
            parts.append(f"- {body}")
        else:
            parts.append(f"+ {body}" if parts else body)
    return parts


def _wrap(head: str, parts: List[str], tail: str = "") -> List[str]:
    lines = []
    parts = parts or ["0"]
    for start in range(0, len(parts), TERMS_PER_LINE):
        chunk = " ".join(parts[start:start + TERMS_PER_LINE])
        lines.append((f" {head} " if start == 0 else "   ") + chunk)
    lines[-1] = (lines[-1] + tail).rstrip()
    return lines


def export_lp(model: BipModel) -> str:
    """Render a model as CPLEX LP text, deterministic in variable index order"""
    lines = [f"\\ {model.name}: {model.num_vars} variables, {len(model.constraints)} constraints"]

    lines.append("Minimize")
    coefs = model.objective_coefficients()
    objective = [(c, f"x{i}") for i, c in enumerate(coefs) if c != 0.0]
    lines.extend(_wrap("obj:", _terms(objective)))

    lines.append("Subject To")
    for r, constraint in enumerate(model.constraints):
        merged = {}
        for c, v in constraint.terms:
            merged[v.index] = merged.get(v.index, 0) + c
        terms = [(c, f"x{i}") for i, c in sorted(merged.items()) if c != 0]
        relation = _RELATIONS[constraint.relation]
        lines.extend(_wrap(f"c{r}:", _terms(terms), f" {relation} {constraint.rhs}"))

    lines.append("Bounds")
    for i in range(model.num_vars):
        fixed = model.fixed_assignments.get(i)
        if fixed is not None:
            lines.append(f" x{i} = {fixed}")

    lines.append("Binary")
    for i in model.free_vars():
        lines.append(f" x{i}")

    lines.append("End")
    return "\n".join(lines) + "\n"


def write_lp(model: BipModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(export_lp(model), encoding="utf-8")
    logger.info("Wrote LP model %s to %s", model.name, path)
    return path
