"""
Mean-Shift Baseline

Per-attribute mode seeking with a flat kernel, used as the comparison method.
Each attribute is clustered on its own, so nothing keeps two components from
landing on the same position and elevation.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Tuple

import numpy as np

from facreg.core.attrspace import adjacency_delta, component_values, pairwise_distances
from facreg.core.geometry import make_params
from facreg.models.layout import Layout
from facreg.models.spaces import ATTRIBUTE_METRICS, GEOMETRIC_ATTRIBUTES, Attribute, Metric

logger = logging.getLogger(__name__)

DEFAULT_BANDWIDTH_FACTOR = 2.0
MAX_ITER = 300
MODE_TOL = 1e-6


def merge_modes(
    points: np.ndarray, bandwidth: float, metric: Metric = Metric.EUCLIDEAN
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Merge converged points into cluster centres.

    Every point keeps the mode it converged to. Modes are visited by
    population (then first occurrence); a mode within the bandwidth of a kept
    centre joins that centre, otherwise it becomes a centre. A point's label
    is the centre that took its own mode.

    Returns:
        (centers, labels)
    """
    if len(points) == 0:
        return points, np.empty(0, dtype=int)
    dist = pairwise_distances(points, points, metric)
    mode_of = np.argmax((dist <= MODE_TOL) | np.eye(len(points), dtype=bool), axis=1)
    firsts, counts = np.unique(mode_of, return_counts=True)
    order = sorted(zip(firsts, counts), key=lambda fc: (-fc[1], fc[0]))

    centers: List[int] = []
    center_of: Dict[int, int] = {}
    for first, _ in order:
        joined = next((c for c, kept in enumerate(centers) if dist[first, kept] < bandwidth), None)
        if joined is None:
            joined = len(centers)
            centers.append(int(first))
        center_of[int(first)] = joined

    labels = np.array([center_of[int(m)] for m in mode_of], dtype=int)
    return points[centers], labels


class MeanShift:
    """
    Flat-kernel mean shift.

    Every point moves to the mean of the samples within `bandwidth` until it
    stops; see merge_modes for how the converged points become clusters.
    """

    def __init__(self, bandwidth: float, metric: Metric = Metric.EUCLIDEAN, max_iter: int = MAX_ITER):
        self.bandwidth = bandwidth
        self.metric = metric
        self.max_iter = max_iter
        self.cluster_centers_: np.ndarray = np.empty((0, 0))
        self.labels_: np.ndarray = np.empty(0, dtype=int)

    def _normalize(self, points: np.ndarray, fallback: np.ndarray) -> np.ndarray:
        if self.metric != Metric.ANGULAR:
            return points
        norms = np.linalg.norm(points, axis=1, keepdims=True)
        ok = norms[:, 0] > 1e-12
        out = fallback.copy()
        out[ok] = points[ok] / norms[ok]
        return out

    def fit(self, x: np.ndarray) -> "MeanShift":
        x = np.asarray(x, dtype=float)
        points = x.copy()
        for _ in range(self.max_iter):
            dist = pairwise_distances(points, x, self.metric)
            mask = dist <= self.bandwidth
            # a point with no sample in range uses its nearest sample
            mask |= ~mask.any(axis=1, keepdims=True) & (dist == dist.min(axis=1, keepdims=True))
            shifted = (mask @ x) / mask.sum(axis=1, keepdims=True)
            shifted = self._normalize(shifted, points)
            # neighbourhoods of equal samples keep that exact value
            low = np.where(mask[..., None], x[None, :, :], np.inf).min(axis=1)
            high = np.where(mask[..., None], x[None, :, :], -np.inf).max(axis=1)
            uniform = np.all(low == high, axis=1)
            shifted[uniform] = low[uniform]
            if np.array_equal(shifted, points):
                break
            points = shifted

        self.cluster_centers_, self.labels_ = merge_modes(points, self.bandwidth, self.metric)
        return self

    def modes(self) -> np.ndarray:
        """Mode of every fitted sample"""
        return self.cluster_centers_[self.labels_]


def meanshift_baseline(layout: Layout, bandwidth_factor: float = DEFAULT_BANDWIDTH_FACTOR) -> Layout:
    """Replace every attribute value by its mean-shift mode (bandwidth = factor * delta)"""
    modes: Dict[Attribute, np.ndarray] = {}
    for attribute in GEOMETRIC_ATTRIBUTES:
        metric = ATTRIBUTE_METRICS[attribute]
        values = component_values(layout, attribute)
        bandwidth = bandwidth_factor * adjacency_delta(values, metric)
        modes[attribute] = MeanShift(bandwidth, metric).fit(values).modes()
        logger.debug(
            "Mean shift on %s: bandwidth=%.6g, %d modes",
            attribute.value, bandwidth, len(np.unique(modes[attribute], axis=0)),
        )

    components = []
    for i, comp in enumerate(layout.components):
        p = modes[Attribute.P][i]
        params = make_params(
            (p[0], p[1]),
            modes[Attribute.Z][i, 0],
            modes[Attribute.W][i, 0],
            modes[Attribute.H][i, 0],
            modes[Attribute.O][i],
        )
        components.append(comp.with_params(params))
    return layout.with_components(components)
