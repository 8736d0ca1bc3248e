"""
Layout Metrics

Purpose:
    Area-based precision / recall / F-score of a layout against ground truth
    and the per-attribute category statistics.

Capabilities:
    - rect_intersection_area: overlap of two oriented rectangles
    - prf: P = sum(overlap) / sum(layout area), R = sum(overlap) / sum(truth area)
    - category_stats: (|P|, |Z|, |O|, |W|, |H|) of a layout's model spaces

Rectangles are placed at absolute elevation base_elevation + z. Components are
paired with their truth counterpart by id.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from facreg.core.attrspace import category_counts
from facreg.core.geometry import frame_axes
from facreg.errors import InvalidSize, UnmatchedComponent
from facreg.models.layout import Component, Layout

logger = logging.getLogger(__name__)

MAX_NORMAL_ANGLE = math.radians(60.0)

Point = Tuple[float, float]


@dataclass(frozen=True)
class Rect:
    """Oriented rectangle in world coordinates"""
    center: np.ndarray
    u: np.ndarray
    v: np.ndarray
    n: np.ndarray
    w: float
    h: float

    @property
    def area(self) -> float:
        return self.w * self.h

    def corners(self) -> List[np.ndarray]:
        hu, hv = 0.5 * self.w * self.u, 0.5 * self.h * self.v
        c = self.center
        return [c - hu - hv, c + hu - hv, c + hu + hv, c - hu + hv]


def component_rect(component: Component, base_elevation: float = 0.0) -> Rect:
    """World rectangle of a component"""
    params = component.params
    if not (params.w > 0 and params.h > 0):
        raise InvalidSize(f"{component.id}: rectangle needs w, h > 0, got {params.w}, {params.h}")
    n = np.asarray(params.n, dtype=float)
    n = n / np.linalg.norm(n)
    u, n, v = frame_axes(n)
    center = np.array([params.p[0], params.p[1], base_elevation + params.z])
    return Rect(center, u, v, n, params.w, params.h)


def clip_polygon(subject: Sequence[Point], clip: Sequence[Point]) -> List[Point]:
    """Sutherland-Hodgman clip of `subject` by the convex counter-clockwise `clip`"""
    output = list(subject)
    if not output or not clip:
        return []

    def inside(p: Point, a: Point, b: Point) -> bool:
        return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0

    def intersection(s: Point, e: Point, a: Point, b: Point) -> Point:
        dc = (a[0] - b[0], a[1] - b[1])
        dp = (s[0] - e[0], s[1] - e[1])
        n1 = a[0] * b[1] - a[1] * b[0]
        n2 = s[0] * e[1] - s[1] * e[0]
        denom = dc[0] * dp[1] - dc[1] * dp[0]
        return ((n1 * dp[0] - n2 * dc[0]) / denom, (n1 * dp[1] - n2 * dc[1]) / denom)

    a = clip[-1]
    for b in clip:
        if not output:
            return []
        source, output = output, []
        s = source[-1]
        for e in source:
            if inside(e, a, b):
                if not inside(s, a, b):
                    output.append(intersection(s, e, a, b))
                output.append(e)
            elif inside(s, a, b):
                output.append(intersection(s, e, a, b))
            s = e
        a = b
    return output


def polygon_area(polygon: Sequence[Point]) -> float:
    """Shoelace area"""
    if len(polygon) < 3:
        return 0.0
    total = 0.0
    for (x0, y0), (x1, y1) in zip(polygon, list(polygon[1:]) + [polygon[0]]):
        total += x0 * y1 - x1 * y0
    return abs(total) / 2.0


def rect_intersection_area(a: Rect, b: Rect) -> float:
    """
    Area of a projected onto b's plane and clipped by b.

    Rectangles whose normals differ by more than 60 degrees do not overlap.
    """
    for r in (a, b):
        if not (r.w > 0 and r.h > 0):
            raise InvalidSize(f"rectangle needs w, h > 0, got {r.w}, {r.h}")
    cos_angle = float(np.clip(np.dot(a.n, b.n), -1.0, 1.0))
    if math.acos(cos_angle) > MAX_NORMAL_ANGLE:
        return 0.0

    # in b's (u, v) plane coordinates, projecting along b.n
    def to_plane(point: np.ndarray) -> Point:
        d = point - b.center
        return (float(np.dot(d, b.u)), float(np.dot(d, b.v)))

    subject = [to_plane(c) for c in a.corners()]
    if polygon_area(subject) == 0.0:
        return 0.0
    # clip needs counter-clockwise order
    signed = sum(
        x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(subject, subject[1:] + subject[:1])
    )
    if signed < 0:
        subject.reverse()

    hw, hh = 0.5 * b.w, 0.5 * b.h
    clip = [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)]
    return polygon_area(clip_polygon(subject, clip))


@dataclass
class Overlap:
    component_id: str
    intersection: float
    own_area: float
    truth_area: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.component_id,
            "intersection": self.intersection,
            "area": self.own_area,
            "truth_area": self.truth_area,
        }


@dataclass
class EvalReport:
    """Area-based precision, recall and F-score"""
    precision: float
    recall: float
    f_score: float
    per_component_overlap: List[Overlap] = field(default_factory=list)
    unmatched: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_score": self.f_score,
            "per_component_overlap": [o.to_dict() for o in self.per_component_overlap],
            "unmatched": self.unmatched,
        }


def f_measure(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def prf(layout: Layout, truth: Layout, strict: bool = False) -> EvalReport:
    """
    Score a layout against ground truth paired by component id.

    Components without a truth counterpart count with zero intersection and
    are listed in `unmatched`; truth components nobody refers to still add
    to the recall denominator.

    Raises:
        UnmatchedComponent: In strict mode, if any layout id has no truth
    """
    truth_by_id = truth.by_id()
    overlaps: List[Overlap] = []
    unmatched: List[str] = []

    for comp in layout.components:
        own = component_rect(comp, layout.base_elevation)
        match = truth_by_id.get(comp.id)
        if match is None:
            unmatched.append(comp.id)
            overlaps.append(Overlap(comp.id, 0.0, own.area, 0.0))
            continue
        ref = component_rect(match, truth.base_elevation)
        inter = min(rect_intersection_area(own, ref), own.area, ref.area)
        overlaps.append(Overlap(comp.id, inter, own.area, ref.area))

    if unmatched:
        if strict:
            raise UnmatchedComponent(f"no ground truth for {', '.join(unmatched)}")
        logger.warning("%d components have no ground truth: %s", len(unmatched), unmatched)

    total_inter = math.fsum(o.intersection for o in overlaps)
    total_own = math.fsum(o.own_area for o in overlaps)
    total_truth = math.fsum(
        component_rect(c, truth.base_elevation).area for c in truth.components
    )
    precision = total_inter / total_own if total_own > 0 else 0.0
    recall = total_inter / total_truth if total_truth > 0 else 0.0
    return EvalReport(
        precision=precision,
        recall=recall,
        f_score=f_measure(precision, recall),
        per_component_overlap=overlaps,
        unmatched=unmatched,
    )


def category_stats(layout: Layout) -> Tuple[int, int, int, int, int]:
    """Candidate counts (|P|, |Z|, |O|, |W|, |H|)"""
    return category_counts(layout)
