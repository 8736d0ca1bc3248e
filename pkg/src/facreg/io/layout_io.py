"""
Layout Files

JSON layout format (UTF-8):

    {
      "building_id": str,
      "base_elevation": float,
      "components": [
        {"id": str, "kind": "window"|"door"|"balcony", "instance_ref": str,
         "p": [x, y], "z": float, "w": float, "h": float, "normal": [x, y, z]}
      ]
    }

lambda and theta are derived on load and never written. Floats are written
with Python's shortest round-trip repr, so save(load(f)) reproduces a file
written by save() byte for byte.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from facreg.core.geometry import make_params, validate_layout
from facreg.errors import FacregError, ParseError
from facreg.models.layout import Component, ComponentKind, Layout

logger = logging.getLogger(__name__)


class _Record(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class ComponentRecord(_Record):
    """One component as stored on disk"""
    id: str
    kind: ComponentKind
    instance_ref: str = ""
    p: Tuple[float, float]
    z: float
    w: float = Field(gt=0)
    h: float = Field(gt=0)
    normal: Tuple[float, float, float]


class LayoutRecord(_Record):
    building_id: str = ""
    base_elevation: float = 0.0
    components: List[ComponentRecord] = Field(min_length=1)


def _locate(error: Dict[str, Any], raw: Any) -> str:
    loc = list(error["loc"])
    if len(loc) >= 2 and loc[0] == "components" and isinstance(loc[1], int):
        index = loc[1]
        ident = f"#{index}"
        try:
            ident = str(raw["components"][index]["id"])
        except (KeyError, IndexError, TypeError):
            pass
        field = ".".join(str(part) for part in loc[2:]) or "<component>"
        return f"component {ident}: field {field!r}"
    return f"field {'.'.join(str(part) for part in loc) or '<root>'!r}"


def parse_layout(text: str, source: str = "<layout>") -> Layout:
    """
    Parse and validate layout JSON.

    Raises:
        ParseError: With line/column for malformed JSON, or component id and
            field for schema and invariant violations
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e

    try:
        record = LayoutRecord.model_validate(raw)
    except ValidationError as e:
        err = e.errors()[0]
        raise ParseError(f"{source}: {_locate(err, raw)}: {err['msg']}") from e

    components = []
    for rec in record.components:
        try:
            params = make_params(rec.p, rec.z, rec.w, rec.h, rec.normal)
        except FacregError as e:
            raise ParseError(f"{source}: component {rec.id}: field 'normal': {e}") from e
        components.append(Component(rec.id, rec.kind, rec.instance_ref, params))

    layout = Layout(tuple(components), record.building_id, record.base_elevation)
    report = validate_layout(layout)
    if not report.ok:
        issue = report.issues[0]
        raise ParseError(
            f"{source}: component {issue.component_id}: field {issue.field!r}: {issue.message}"
        )
    return layout


def load_layout(path: Union[str, Path]) -> Layout:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{path}: {e}") from e
    layout = parse_layout(text, str(path))
    logger.debug("Loaded %d components from %s", len(layout), path)
    return layout


def layout_to_record(layout: Layout) -> Dict[str, Any]:
    """Serializable mapping in file field order"""
    return {
        "building_id": layout.building_id,
        "base_elevation": float(layout.base_elevation),
        "components": [
            {
                "id": c.id,
                "kind": c.kind.value,
                "instance_ref": c.instance_ref,
                "p": [float(c.params.p[0]), float(c.params.p[1])],
                "z": float(c.params.z),
                "w": float(c.params.w),
                "h": float(c.params.h),
                "normal": [float(v) for v in c.params.n],
            }
            for c in layout.components
        ],
    }


def dumps_layout(layout: Layout) -> str:
    return json.dumps(layout_to_record(layout), indent=2, allow_nan=False) + "\n"


def save_layout(layout: Layout, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dumps_layout(layout), encoding="utf-8")
    logger.info("Wrote %d components to %s", len(layout), path)
    return path
