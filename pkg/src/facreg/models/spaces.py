"""
Attribute Space Models for facreg

Clustered candidate-value spaces for position, elevation, width, height and
orientation, built from an initial layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Tuple

import numpy as np


class Attribute(Enum):
    """Selectable attributes; THETA and LAMBDA are orientation class groupings"""
    P = "p"
    Z = "z"
    W = "w"
    H = "h"
    O = "o"
    THETA = "theta"
    LAMBDA = "lambda"


# Order used by every per-attribute loop over the layout parameters
GEOMETRIC_ATTRIBUTES: Tuple[Attribute, ...] = (
    Attribute.P,
    Attribute.Z,
    Attribute.W,
    Attribute.H,
    Attribute.O,
)

# Column order of the category statistics table
STATS_ORDER: Tuple[Attribute, ...] = (
    Attribute.P,
    Attribute.Z,
    Attribute.O,
    Attribute.W,
    Attribute.H,
)


class Metric(Enum):
    """Distance used to compare attribute values"""
    EUCLIDEAN = "euclidean"  # 2-vectors (p)
    ABSOLUTE = "absolute"    # scalars (z, w, h)
    ANGULAR = "angular"      # unit normals, acos(a . b)
    CIRCULAR = "circular"    # angles, wrapped absolute difference


ATTRIBUTE_METRICS: Dict[Attribute, Metric] = {
    Attribute.P: Metric.EUCLIDEAN,
    Attribute.Z: Metric.ABSOLUTE,
    Attribute.W: Metric.ABSOLUTE,
    Attribute.H: Metric.ABSOLUTE,
    Attribute.O: Metric.ANGULAR,
}


@dataclass(frozen=True, eq=False)
class AttributeSpace:
    """
    Candidate values for one attribute.

    Attributes:
        attribute: Which parameter the space covers
        values: Candidate values, shape (k, d); d = 2 for P, 1 for scalars, 3 for O normals
        delta: Adaptive threshold base for this attribute
        member_map: Per component, the candidate indices inside the pruning radius
        labels: Per component, the index of the candidate its cluster produced
        angles: For O only, (lambda, theta) of each candidate normal, shape (k, 2)
    """
    attribute: Attribute
    values: np.ndarray
    delta: float
    member_map: Tuple[FrozenSet[int], ...]
    labels: Tuple[int, ...]
    angles: Optional[np.ndarray] = None

    @property
    def metric(self) -> Metric:
        return ATTRIBUTE_METRICS[self.attribute]

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.size

    def candidate(self, j: int) -> Any:
        """Candidate j as a float, a 2-tuple (P) or an (n, lambda, theta) triple (O)"""
        row = self.values[j]
        if self.attribute == Attribute.O:
            assert self.angles is not None
            n = (float(row[0]), float(row[1]), float(row[2]))
            return n, float(self.angles[j, 0]), float(self.angles[j, 1])
        if row.shape[0] == 1:
            return float(row[0])
        return tuple(float(v) for v in row)

    @property
    def candidates(self) -> List[Any]:
        return [self.candidate(j) for j in range(self.size)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "attribute": self.attribute.value,
            "delta": self.delta,
            "candidates": [
                {"n": list(c[0]), "lambda": c[1], "theta": c[2]}
                if self.attribute == Attribute.O
                else c
                for c in self.candidates
            ],
            "member_map": [sorted(m) for m in self.member_map],
        }


@dataclass(frozen=True)
class ModelSpaces:
    """One AttributeSpace per geometric attribute"""
    spaces: Dict[Attribute, AttributeSpace]

    def __getitem__(self, attribute: Attribute) -> AttributeSpace:
        return self.spaces[attribute]

    def __iter__(self) -> Iterator[AttributeSpace]:
        return (self.spaces[a] for a in GEOMETRIC_ATTRIBUTES)

    @property
    def num_components(self) -> int:
        return len(self.spaces[Attribute.P].member_map)

    def counts(self) -> Tuple[int, int, int, int, int]:
        """Candidate counts in (|P|, |Z|, |O|, |W|, |H|) order"""
        p, z, o, w, h = (self.spaces[a].size for a in STATS_ORDER)
        return p, z, o, w, h

    def deltas(self) -> Dict[str, float]:
        return {a.value: self.spaces[a].delta for a in GEOMETRIC_ATTRIBUTES}

    def to_dict(self) -> Dict[str, Any]:
        return {a.value: self.spaces[a].to_dict() for a in GEOMETRIC_ATTRIBUTES}
