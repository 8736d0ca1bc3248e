"""
Constraint Audit

Checks the structural rules directly on a decoded layout, without the BIP:
each value is one candidate, no two components share a (p, z) category, equal
z categories have equal theta class and equal p categories equal lambda class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from facreg.core.attrspace import component_values, orientation_classes
from facreg.models.layout import Layout
from facreg.models.spaces import GEOMETRIC_ATTRIBUTES, Attribute, ModelSpaces

MATCH_TOL = 1e-9


def coincident_pairs(layout: Layout, tol: float = MATCH_TOL) -> List[Tuple[str, str]]:
    """Id pairs whose centers share p and z within tol"""
    pairs = []
    comps = layout.components
    for a, b in combinations(comps, 2):
        dp = np.hypot(a.params.p[0] - b.params.p[0], a.params.p[1] - b.params.p[1])
        if dp <= tol and abs(a.params.z - b.params.z) <= tol:
            pairs.append((a.id, b.id))
    return pairs


@dataclass(frozen=True)
class AuditViolation:
    rule: str
    component_ids: Tuple[str, ...]
    message: str

    def to_dict(self) -> Dict[str, Any]:
        return {"rule": self.rule, "ids": list(self.component_ids), "message": self.message}


@dataclass
class AuditReport:
    violations: List[AuditViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def of_rule(self, rule: str) -> List[AuditViolation]:
        return [v for v in self.violations if v.rule == rule]

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def categories(layout: Layout, spaces: ModelSpaces, tol: float = MATCH_TOL) -> Dict[Attribute, List[Optional[int]]]:
    """Candidate index each component's value equals (None if it matches none)"""
    out: Dict[Attribute, List[Optional[int]]] = {}
    for attribute in GEOMETRIC_ATTRIBUTES:
        rows = component_values(layout, attribute)
        cands = spaces[attribute].values
        dist = np.linalg.norm(rows[:, None, :] - cands[None, :, :], axis=-1)
        picks: List[Optional[int]] = []
        for i in range(rows.shape[0]):
            hits = np.flatnonzero(dist[i] <= tol)
            picks.append(int(hits[0]) if len(hits) == 1 else None)
        out[attribute] = picks
    return out


def audit_constraints(layout: Layout, spaces: ModelSpaces, tol: float = MATCH_TOL) -> AuditReport:
    """List every C1, C2, R1 and R2 violation of a decoded layout"""
    report = AuditReport()
    ids = layout.ids
    cats = categories(layout, spaces, tol)
    theta_cls, lambda_cls = orientation_classes(spaces[Attribute.O])

    for attribute, picks in cats.items():
        for i, pick in enumerate(picks):
            if pick is None:
                report.violations.append(
                    AuditViolation("C1", (ids[i],), f"{attribute.value} is not a single candidate")
                )

    p, z, o = cats[Attribute.P], cats[Attribute.Z], cats[Attribute.O]
    for i, j in combinations(range(len(ids)), 2):
        pair = (ids[i], ids[j])
        same_p = p[i] is not None and p[i] == p[j]
        same_z = z[i] is not None and z[i] == z[j]
        if same_p and same_z:
            report.violations.append(AuditViolation("C2", pair, "shared p and z category"))
        if o[i] is None or o[j] is None:
            continue
        oi, oj = o[i], o[j]
        if same_z and theta_cls[oi] != theta_cls[oj]:
            report.violations.append(AuditViolation("R1", pair, "same z, different theta class"))
        if same_p and lambda_cls[oi] != lambda_cls[oj]:
            report.violations.append(AuditViolation("R2", pair, "same p, different lambda class"))
    return report
