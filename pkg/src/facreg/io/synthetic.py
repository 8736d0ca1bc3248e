"""
Synthetic Layouts

Perfectly regular facade grids with known categories, used as ground truth.

The footprint is a square of side columns * spacing with one corner at the
origin. Facade k faces -Y, +X, +Y, -X for k = 0, 1, 2, 3; column c sits at
(c + 0.5) * spacing along its side and floor f at z = (f + 0.5) * floor_height.
Doors are only placed on floor 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from facreg.core.geometry import make_params
from facreg.errors import InvalidSpec
from facreg.models.layout import Component, ComponentKind, Layout

FACADE_NORMALS: Tuple[Tuple[float, float, float], ...] = (
    (0.0, -1.0, 0.0),
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (-1.0, 0.0, 0.0),
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a regular multi-facade grid"""
    floors: int = 3
    columns: int = 4
    facades: int = 1
    spacing: float = 2.0
    floor_height: float = 3.0
    w: float = 1.2
    h: float = 1.5
    kind_mix: Dict[str, float] = field(default_factory=lambda: {"window": 1.0})
    seed: int = 0
    building_id: str = "synthetic"
    base_elevation: float = 0.0

    @property
    def has_exact_stats(self) -> bool:
        """
        True when every p, z and orientation value repeats (or the grid is a
        single component), so adaptive clustering recovers the built categories.
        """
        if self.floors * self.columns * self.facades == 1:
            return True
        return self.floors >= 2 and self.columns * self.facades >= 2

    def expected_stats(self) -> Tuple[int, int, int, int, int]:
        """
        Category counts (|P|, |Z|, |O|, |W|, |H|) the generated grid has.

        Raises:
            InvalidSpec: If the spec is invalid, or a single floor or a single
                column on one facade leaves values unrepeated
        """
        self.validate()
        if not self.has_exact_stats:
            raise InvalidSpec(
                f"{self.floors} floor(s) x {self.columns * self.facades} column(s): "
                "category counts need floors >= 2 and columns * facades >= 2"
            )
        return (self.columns * self.facades, self.floors, self.facades, 1, 1)

    def validate(self) -> None:
        """
        Raises:
            InvalidSpec: On the first violated invariant
        """
        if self.floors < 1 or self.columns < 1:
            raise InvalidSpec("floors and columns must be >= 1")
        if not 1 <= self.facades <= 4:
            raise InvalidSpec(f"facades must be in 1..4, got {self.facades}")
        if not (self.w > 0 and self.h > 0):
            raise InvalidSpec("component w and h must be positive")
        if not self.spacing > self.w:
            raise InvalidSpec(f"spacing {self.spacing} must exceed w {self.w}")
        if not self.floor_height > self.h:
            raise InvalidSpec(f"floor_height {self.floor_height} must exceed h {self.h}")
        kinds = {k.value for k in ComponentKind}
        unknown = set(self.kind_mix) - kinds
        if unknown:
            raise InvalidSpec(f"unknown component kinds {sorted(unknown)}")
        if any(v < 0 for v in self.kind_mix.values()) or sum(self.kind_mix.values()) <= 0:
            raise InvalidSpec("kind_mix needs non-negative proportions with a positive sum")


def _kind_weights(mix: Dict[str, float], allow_door: bool) -> Tuple[List[ComponentKind], np.ndarray]:
    kinds = [k for k in ComponentKind if mix.get(k.value, 0) > 0]
    if not allow_door:
        kinds = [k for k in kinds if k != ComponentKind.DOOR]
    if not kinds:
        return [ComponentKind.WINDOW], np.array([1.0])
    weights = np.array([mix[k.value] for k in kinds], dtype=float)
    return kinds, weights / weights.sum()


def _position(facade: int, column: int, spec: SyntheticSpec) -> Tuple[float, float]:
    side = spec.columns * spec.spacing
    offset = (column + 0.5) * spec.spacing
    if facade == 0:
        return offset, 0.0
    if facade == 1:
        return side, offset
    if facade == 2:
        return side - offset, side
    return 0.0, side - offset


def generate_synthetic(spec: SyntheticSpec) -> Layout:
    """
    Build the grid: facades x floors x columns components.

    Any floors, columns >= 1 are generated. category_stats of the result
    equals spec.expected_stats() only when spec.has_exact_stats: with one
    floor the p values are all distinct and neighbouring columns link.

    Raises:
        InvalidSpec: If the spec violates its invariants
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    ground = _kind_weights(spec.kind_mix, allow_door=True)
    upper = _kind_weights(spec.kind_mix, allow_door=False)

    components = []
    for k in range(spec.facades):
        normal = FACADE_NORMALS[k]
        for f in range(spec.floors):
            kinds, weights = ground if f == 0 else upper
            for c in range(spec.columns):
                kind = kinds[int(rng.choice(len(kinds), p=weights))]
                params = make_params(
                    _position(k, c, spec),
                    (f + 0.5) * spec.floor_height,
                    spec.w,
                    spec.h,
                    normal,
                )
                components.append(
                    Component(
                        id=f"f{k}-r{f}-c{c}",
                        kind=kind,
                        instance_ref=f"{kind.value}_{spec.w:g}x{spec.h:g}",
                        params=params,
                    )
                )
    return Layout(tuple(components), spec.building_id, spec.base_elevation)
