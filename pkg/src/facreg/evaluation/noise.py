"""
Gaussian Noise Protocol

Perturbs a ground-truth layout at noise level k: sigma = k * delta_e with
delta_e = 0.005 * e, where e is the shortest rectangle edge of the truth.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from facreg.core.geometry import frame_axes, make_params
from facreg.errors import InvalidSpec
from facreg.models.layout import Layout

logger = logging.getLogger(__name__)

BASE_FRACTION = 0.005
MIN_SIZE_FRACTION = 0.05


def shortest_edge(layout: Layout) -> float:
    """Shortest rectangle edge e over all components"""
    return min(min(c.params.w, c.params.h) for c in layout.components)


@dataclass(frozen=True)
class NoiseSpec:
    """
    One noise setting.

    Attributes:
        base_sigma: delta_e = 0.005 * e
        level: Multiplier k; 0 leaves the layout untouched
        seed: Seed of the numpy generator
    """
    base_sigma: float
    level: int
    seed: int

    def __post_init__(self) -> None:
        if not (self.base_sigma > 0 and math.isfinite(self.base_sigma)):
            raise InvalidSpec(f"base_sigma must be positive, got {self.base_sigma}")
        if self.level < 0:
            raise InvalidSpec(f"noise level must be >= 0, got {self.level}")

    @classmethod
    def for_truth(cls, truth: Layout, level: int, seed: int) -> "NoiseSpec":
        return cls(BASE_FRACTION * shortest_edge(truth), level, seed)

    @property
    def edge(self) -> float:
        return self.base_sigma / BASE_FRACTION

    @property
    def sigma(self) -> float:
        return self.level * self.base_sigma

    def to_dict(self) -> Dict[str, Any]:
        return {"base_sigma": self.base_sigma, "level": self.level, "seed": self.seed}


def _rotate_normal(n: np.ndarray, rng: np.random.Generator, angle_sigma: float) -> np.ndarray:
    # rotate about a random axis in the tangent plane of n
    u, _, v = frame_axes(n)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    alpha = rng.normal(0.0, angle_sigma)
    axis = math.cos(phi) * u + math.sin(phi) * v
    rotated = n * math.cos(alpha) + np.cross(axis, n) * math.sin(alpha)
    return rotated / np.linalg.norm(rotated)


def perturb(truth: Layout, spec: NoiseSpec) -> Layout:
    """
    Add zero-mean Gaussian noise with standard deviation sigma to p.x, p.y,
    z, w and h of every component (w, h kept >= 0.05 * e) and tilt each
    normal by an angle with standard deviation sigma / e radians.

    Deterministic for a given spec.
    """
    sigma = spec.sigma
    if sigma == 0:
        return truth

    rng = np.random.default_rng(spec.seed)
    floor = MIN_SIZE_FRACTION * spec.edge
    components = []
    for comp in truth.components:
        params = comp.params
        dx, dy, dz, dw, dh = rng.normal(0.0, sigma, 5)
        n = _rotate_normal(np.asarray(params.n, dtype=float), rng, sigma / spec.edge)
        noisy = make_params(
            (params.p[0] + dx, params.p[1] + dy),
            params.z + dz,
            max(params.w + dw, floor),
            max(params.h + dh, floor),
            n,
        )
        components.append(comp.with_params(noisy))

    logger.debug("Perturbed %d components with sigma=%.6g", len(components), sigma)
    return truth.with_components(components)
