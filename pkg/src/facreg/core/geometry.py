"""
Component Geometry

Purpose:
    Invertible mapping between decomposed component parameters
    (p, z, w, h, n, lambda, theta) and the 4x4 component transform.

Canonical component:
    A unit rectangle centered at the origin in the XZ-plane, outward normal +Y,
    width along +X, height along +Z, depth scale fixed at 1.

    T = Translate(p.x, p.y, z) * Rotate(n) * Scale(width=w, height=h, depth=1)

    Rotate(n) has columns (u, n, v): u is the horizontal width axis
    (n.y, -n.x, 0) / |(n.x, n.y)| and v = u x n is the up axis. At the poles
    u = (0, -1, 0), which is the lambda = 0 convention.

Usage:
    >>> params = make_params((2.0, 3.0), 5.0, 1.2, 1.5, (0.0, 1.0, 0.0))
    >>> t = params_to_transform(params)
    >>> transform_to_params(t) == params
"""

from __future__ import annotations

import math
from typing import Sequence, Tuple

import numpy as np

from facreg.errors import InvalidNormal, InvalidSize, InvalidTransform
from facreg.models.layout import (
    GeomParams,
    IssueKind,
    Layout,
    Transform,
    ValidationIssue,
    ValidationReport,
)

TOLERANCE = 1e-9
POLE_EPS = 1e-12


def _plus_zero(x: float) -> float:
    # maps -0.0 to 0.0
    return float(x) + 0.0


def derive_angles(n: Sequence[float]) -> Tuple[float, float]:
    """
    Horizontal and elevation angle of a normal.

    Returns:
        (lambda, theta) with lambda in (-pi, pi] (0 at the poles) and
        theta in [-pi/2, pi/2]

    Raises:
        InvalidNormal: If n has zero length or non-finite entries
    """
    v = np.asarray(n, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidNormal(f"normal must be a finite 3-vector, got {list(n)}")
    if float(np.linalg.norm(v)) == 0.0:
        raise InvalidNormal("normal has zero length")

    if math.hypot(v[0], v[1]) < POLE_EPS:
        lam = 0.0
    else:
        lam = math.atan2(v[1], v[0])
        if lam <= -math.pi:
            lam = math.pi
    theta = math.asin(max(-1.0, min(1.0, float(v[2]))))
    return _plus_zero(lam), _plus_zero(theta)


def normal_from_angles(lam: float, theta: float) -> np.ndarray:
    return np.array(
        [math.cos(theta) * math.cos(lam), math.cos(theta) * math.sin(lam), math.sin(theta)]
    )


def make_params(
    p: Sequence[float],
    z: float,
    w: float,
    h: float,
    n: Sequence[float],
) -> GeomParams:
    """Build GeomParams with lambda and theta derived from n"""
    lam, theta = derive_angles(n)
    return GeomParams(
        p=(float(p[0]), float(p[1])),
        z=float(z),
        w=float(w),
        h=float(h),
        n=(float(n[0]), float(n[1]), float(n[2])),
        lam=lam,
        theta=theta,
    )


def frame_axes(n: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Width axis u, normal n and up axis v of a component facing n"""
    nv = np.asarray(n, dtype=float)
    horiz = math.hypot(nv[0], nv[1])
    if horiz < POLE_EPS:
        u = np.array([0.0, -1.0, 0.0])
    else:
        u = np.array([nv[1] / horiz, -nv[0] / horiz, 0.0]) + 0.0
    v = np.cross(u, nv) + 0.0
    return u, nv, v


def _check_size(w: float, h: float) -> None:
    for name, value in (("w", w), ("h", h)):
        if not math.isfinite(value) or value <= 0:
            raise InvalidSize(f"{name} must be positive, got {value}")


def _check_unit(n: Sequence[float]) -> None:
    norm = float(np.linalg.norm(np.asarray(n, dtype=float)))
    if not math.isfinite(norm) or abs(norm - 1.0) > TOLERANCE:
        raise InvalidNormal(f"normal must be unit length, |n| = {norm}")


def params_to_transform(params: GeomParams) -> Transform:
    """
    Compose the component transform.

    Raises:
        InvalidNormal: If n is not unit length
        InvalidSize: If w or h is not positive
    """
    _check_size(params.w, params.h)
    _check_unit(params.n)

    u, n, v = frame_axes(params.n)
    m = np.eye(4)
    m[:3, 0] = params.w * u
    m[:3, 1] = n
    m[:3, 2] = params.h * v
    m[:3, 3] = (params.p[0], params.p[1], params.z)
    return Transform(m + 0.0)


def transform_to_params(t: Transform) -> GeomParams:
    """
    Decompose a component transform back into parameters.

    Raises:
        InvalidTransform: If the matrix is not translation * upright rotation *
            (w, 1, h) scale within 1e-9
    """
    m = np.asarray(t.m, dtype=float)
    if m.shape != (4, 4) or not np.all(np.isfinite(m)):
        raise InvalidTransform("transform must be a finite 4x4 matrix")
    if np.max(np.abs(m[3] - np.array([0.0, 0.0, 0.0, 1.0]))) > TOLERANCE:
        raise InvalidTransform(f"last row must be (0, 0, 0, 1), got {m[3].tolist()}")

    block = m[:3, :3]
    w, depth, h = (float(np.linalg.norm(block[:, k])) for k in range(3))
    if min(w, depth, h) <= 0:
        raise InvalidTransform("scale entries must be positive")
    if abs(depth - 1.0) > TOLERANCE:
        raise InvalidTransform(f"depth scale must be 1, got {depth}")

    rot = block / np.array([w, depth, h])
    if np.max(np.abs(rot.T @ rot - np.eye(3))) > TOLERANCE or np.linalg.det(rot) <= 0:
        raise InvalidTransform("rotation block is not orthonormal")

    n = rot[:, 1]
    u_expected, _, _ = frame_axes(n)
    if np.max(np.abs(rot[:, 0] - u_expected)) > TOLERANCE:
        raise InvalidTransform("rotation has a roll about the normal")

    return make_params((m[0, 3], m[1, 3]), m[2, 3], w, h, n + 0.0)


def _angle_gap(a: float, b: float) -> float:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def validate_layout(layout: Layout) -> ValidationReport:
    """List every invariant violation of a layout; never raises"""
    report = ValidationReport()
    if len(layout.components) == 0:
        report.issues.append(
            ValidationIssue(IssueKind.EMPTY_LAYOUT, None, "components", "layout has no components")
        )
        return report

    seen = set()
    for comp in layout.components:
        if comp.id in seen:
            report.issues.append(
                ValidationIssue(IssueKind.DUPLICATE_ID, comp.id, "id", "duplicate component id")
            )
        seen.add(comp.id)

        params = comp.params
        for name, value in (("w", params.w), ("h", params.h)):
            if not math.isfinite(value) or value <= 0:
                report.issues.append(
                    ValidationIssue(
                        IssueKind.INVALID_SIZE, comp.id, name, f"must be positive, got {value}"
                    )
                )

        n = np.asarray(params.n, dtype=float)
        norm = float(np.linalg.norm(n)) if np.all(np.isfinite(n)) else math.nan
        if not math.isfinite(norm) or abs(norm - 1.0) > TOLERANCE:
            report.issues.append(
                ValidationIssue(
                    IssueKind.INVALID_NORMAL, comp.id, "normal", f"must be unit length, |n| = {norm}"
                )
            )
            continue

        lam, theta = derive_angles(n)
        bad = []
        pole = math.hypot(n[0], n[1]) < POLE_EPS
        if not -math.pi < params.lam <= math.pi or (
            not pole and _angle_gap(params.lam, lam) > TOLERANCE
        ):
            bad.append("lambda")
        if abs(params.theta - theta) > TOLERANCE:
            bad.append("theta")
        if bad:
            report.issues.append(
                ValidationIssue(
                    IssueKind.ANGLE_INCONSISTENCY,
                    comp.id,
                    ",".join(bad),
                    f"angles ({params.lam}, {params.theta}) do not match normal {list(params.n)}",
                )
            )
    return report
