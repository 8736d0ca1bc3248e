"""
facreg Evaluation

Scoring against ground truth, noise protocol, mean-shift baseline, sweeps.
"""

from .metrics import (
    EvalReport,
    Rect,
    component_rect,
    rect_intersection_area,
    prf,
    category_stats,
)

from .noise import NoiseSpec, perturb, shortest_edge

from .meanshift import MeanShift, meanshift_baseline

from .audit import (
    AuditReport,
    AuditViolation,
    coincident_pairs,
    audit_constraints,
)

from .sweep import CSV_HEADER, SweepRow, robustness_sweep

__all__ = [
    "EvalReport",
    "Rect",
    "component_rect",
    "rect_intersection_area",
    "prf",
    "category_stats",
    "NoiseSpec",
    "perturb",
    "shortest_edge",
    "MeanShift",
    "meanshift_baseline",
    "AuditReport",
    "AuditViolation",
    "coincident_pairs",
    "audit_constraints",
    "CSV_HEADER",
    "SweepRow",
    "robustness_sweep",
]
