"""
Attribute Spaces

Purpose:
    Group the initial per-component values of p, z, w, h and n into candidate
    spaces with an adaptive threshold: delta is the mean distance of each value
    to its nearest other value, and values linked at <= 2 * delta form one
    candidate (single linkage).

Capabilities:
    - adjacency_delta: adaptive threshold base per attribute
    - cluster_attribute: single-linkage grouping into separated candidates
    - build_model_spaces: all five spaces plus per-component pruned supports
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from facreg.core.geometry import derive_angles
from facreg.core.logic import prune_support
from facreg.errors import EmptyAttribute
from facreg.models.layout import Layout
from facreg.models.spaces import (
    ATTRIBUTE_METRICS,
    GEOMETRIC_ATTRIBUTES,
    Attribute,
    AttributeSpace,
    Metric,
    ModelSpaces,
)

logger = logging.getLogger(__name__)

DELTA_FLOOR = 1e-6
DEFAULT_PRUNE_RADIUS_FACTOR = 5.0
CLASS_LINK_FACTOR = 5.0


def as_rows(values: Sequence, metric: Metric) -> np.ndarray:
    """Attribute values as a (k, d) float array"""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return arr


def pairwise_distances(a: np.ndarray, b: np.ndarray, metric: Metric) -> np.ndarray:
    """Distance matrix between the rows of a and the rows of b"""
    if metric == Metric.ANGULAR:
        return np.arccos(np.clip(a @ b.T, -1.0, 1.0))
    diff = a[:, None, :] - b[None, :, :]
    if metric == Metric.CIRCULAR:
        d = np.abs(diff[..., 0]) % (2 * np.pi)
        return np.minimum(d, 2 * np.pi - d)
    return np.linalg.norm(diff, axis=-1)


def component_values(layout: Layout, attribute: Attribute) -> np.ndarray:
    """Initial values of one attribute for every component, shape (N, d)"""
    comps = layout.components
    if attribute == Attribute.P:
        return np.array([c.params.p for c in comps], dtype=float).reshape(-1, 2)
    if attribute == Attribute.Z:
        return np.array([[c.params.z] for c in comps], dtype=float).reshape(-1, 1)
    if attribute == Attribute.W:
        return np.array([[c.params.w] for c in comps], dtype=float).reshape(-1, 1)
    if attribute == Attribute.H:
        return np.array([[c.params.h] for c in comps], dtype=float).reshape(-1, 1)
    if attribute == Attribute.O:
        return np.array([c.params.n for c in comps], dtype=float).reshape(-1, 3)
    raise ValueError(f"{attribute} is not a layout attribute")


def adjacency_delta(values: Sequence, metric: Metric) -> float:
    """
    Mean nearest-neighbour distance among values, floored at 1e-6.

    Fewer than two values also return the floor so single-component layouts
    stay processable.
    """
    rows = as_rows(values, metric)
    if rows.shape[0] < 2:
        return DELTA_FLOOR
    dist = pairwise_distances(rows, rows, metric)
    np.fill_diagonal(dist, np.inf)
    delta = float(np.mean(np.min(dist, axis=1)))
    return max(delta, DELTA_FLOOR)


def _link_groups(rows: np.ndarray, metric: Metric, threshold: float) -> np.ndarray:
    adjacency = pairwise_distances(rows, rows, metric) <= threshold
    _, labels = connected_components(csr_matrix(adjacency), directed=False)
    return labels


def _representative(members: np.ndarray, metric: Metric) -> np.ndarray:
    if np.all(members == members[0]):
        return members[0].copy()
    mean = members.mean(axis=0)
    if metric == Metric.ANGULAR:
        norm = float(np.linalg.norm(mean))
        if norm < 1e-12:
            return members[0].copy()
        return mean / norm
    return mean


def _sort_key(row: np.ndarray, metric: Metric) -> Tuple[float, ...]:
    if metric == Metric.ANGULAR:
        return derive_angles(row)
    return tuple(float(v) for v in row)


def _cluster_rows(
    rows: np.ndarray, metric: Metric, delta: float
) -> Tuple[np.ndarray, List[int]]:
    threshold = 2.0 * delta
    labels = _link_groups(rows, metric, threshold)

    # merge groups whose representatives still fall within 2 * delta
    while True:
        groups = sorted(set(labels.tolist()))
        reps = np.array([_representative(rows[labels == g], metric) for g in groups])
        merged = _link_groups(reps, metric, threshold)
        if len(set(merged.tolist())) == len(groups):
            break
        remap = {g: int(merged[k]) for k, g in enumerate(groups)}
        labels = np.array([remap[int(g)] for g in labels])

    order = sorted(range(len(groups)), key=lambda k: _sort_key(reps[k], metric))
    position = {groups[k]: pos for pos, k in enumerate(order)}
    candidates = reps[order]
    return candidates, [position[int(g)] for g in labels]


def cluster_attribute(
    values: Sequence,
    metric: Metric,
    delta: float,
    attribute: Optional[Attribute] = None,
) -> AttributeSpace:
    """
    Single-linkage grouping with link distance 2 * delta.

    Candidates are group means (renormalized normals for the angular metric),
    sorted ascending, lexicographically for 2-vectors, and by (lambda, theta)
    for normals. member_map is the full support; build_model_spaces prunes it.

    Raises:
        EmptyAttribute: If there are no values
    """
    rows = as_rows(values, metric)
    if rows.shape[0] == 0:
        raise EmptyAttribute(f"no values to cluster for {attribute or metric.value}")
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")

    candidates, labels = _cluster_rows(rows, metric, delta)
    if attribute is None:
        attribute = {
            Metric.EUCLIDEAN: Attribute.P,
            Metric.ANGULAR: Attribute.O,
        }.get(metric, Attribute.Z)

    angles = None
    if metric == Metric.ANGULAR:
        angles = np.array([derive_angles(c) for c in candidates], dtype=float).reshape(-1, 2)

    full = frozenset(range(candidates.shape[0]))
    return AttributeSpace(
        attribute=attribute,
        values=candidates,
        delta=float(delta),
        member_map=tuple(full for _ in range(rows.shape[0])),
        labels=tuple(labels),
        angles=angles,
    )


def residual_matrix(space: AttributeSpace, rows: np.ndarray) -> np.ndarray:
    """Distance of each component value (rows) to each candidate, shape (N, k)"""
    return pairwise_distances(rows, space.values, space.metric)


def with_supports(
    space: AttributeSpace,
    rows: np.ndarray,
    prune_radius_factor: Optional[float],
) -> AttributeSpace:
    """Copy of space whose member_map keeps candidates within factor * delta"""
    residuals = residual_matrix(space, rows)
    member_map = tuple(
        prune_support(residuals[i], space.delta, prune_radius_factor)
        for i in range(residuals.shape[0])
    )
    return AttributeSpace(
        attribute=space.attribute,
        values=space.values,
        delta=space.delta,
        member_map=member_map,
        labels=space.labels,
        angles=space.angles,
    )


def _build_space(
    layout: Layout, attribute: Attribute, prune_radius_factor: Optional[float]
) -> AttributeSpace:
    metric = ATTRIBUTE_METRICS[attribute]
    rows = component_values(layout, attribute)
    delta = adjacency_delta(rows, metric)
    space = cluster_attribute(rows, metric, delta, attribute)
    return with_supports(space, rows, prune_radius_factor)


def build_model_spaces(
    layout: Layout,
    prune_radius_factor: Optional[float] = DEFAULT_PRUNE_RADIUS_FACTOR,
    workers: int = 1,
) -> ModelSpaces:
    """
    Build P, Z, W, H and O spaces from a layout.

    Args:
        layout: Valid initial layout
        prune_radius_factor: Support radius as a multiple of delta; None keeps
            every candidate in every support
        workers: Threads used to cluster the five attributes

    Returns:
        ModelSpaces with pruned member maps
    """
    spaces: Dict[Attribute, AttributeSpace] = {}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                a: pool.submit(_build_space, layout, a, prune_radius_factor)
                for a in GEOMETRIC_ATTRIBUTES
            }
            spaces = {a: f.result() for a, f in futures.items()}
    else:
        spaces = {a: _build_space(layout, a, prune_radius_factor) for a in GEOMETRIC_ATTRIBUTES}

    result = ModelSpaces(spaces)
    logger.info(
        "Built model spaces for %s: |P|=%d |Z|=%d |O|=%d |W|=%d |H|=%d",
        layout.building_id or "<layout>",
        *result.counts(),
    )
    logger.debug("Adaptive deltas: %s", result.deltas())
    return result


def orientation_classes(space: AttributeSpace) -> Tuple[List[int], List[int]]:
    """
    Theta-class and lambda-class of each orientation candidate.

    Candidates whose elevation angles (resp. horizontal angles, compared
    around the circle) link at <= CLASS_LINK_FACTOR * delta share a class.
    """
    if space.angles is None:
        raise ValueError(f"{space.attribute.value} space carries no angles")
    threshold = CLASS_LINK_FACTOR * space.delta
    lam = space.angles[:, 0:1]
    theta = space.angles[:, 1:2]
    theta_classes = _link_groups(theta, Metric.ABSOLUTE, threshold)
    lambda_classes = _link_groups(lam, Metric.CIRCULAR, threshold)
    return [int(c) for c in theta_classes], [int(c) for c in lambda_classes]


def category_counts(layout: Layout) -> Tuple[int, int, int, int, int]:
    """Candidate counts (|P|, |Z|, |O|, |W|, |H|) of a layout's model spaces"""
    return build_model_spaces(layout, prune_radius_factor=None).counts()
