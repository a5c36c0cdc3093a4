"""Line-delimited JSON interchange formats for detections and labels.

Three record kinds share one container (one JSON object per line, "kind"
field discriminates):

    kind "cam3d": frame, camera, category, score, sigma,
                  center [x, y, z] (camera frame), dims [w, h, l], yaw
    kind "ego3d": frame, category, score, center [x, y, z] (ego frame),
                  dims [w, h, l], yaw, source_camera (optional)
    kind "bev":   frame, category, score, center [x, y], dims [l, w],
                  yaw, source_camera
    kind "box2d": frame, camera, category, score, center [u, v],
                  size [width, height]
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .boxes import CLASS_NAMES, BevBox, Box2D, Box3D
from .errors import FormatError


def class_id_of(category: str) -> int:
    try:
        return CLASS_NAMES.index(category)
    except ValueError:
        raise FormatError(f"unknown category {category!r}") from None


@dataclass(frozen=True)
class DetectionRecord:
    """One labelled or detected object with its frame/camera provenance."""

    kind: str
    frame: str
    camera: str | None
    box: Box3D | BevBox | Box2D
    class_id: int
    score: float


def _require(obj: dict, key: str, line_no: int):
    if key not in obj:
        raise FormatError(f"line {line_no}: missing field {key!r}")
    return obj[key]


def _floats(values, n, key, line_no):
    if not isinstance(values, list) or len(values) != n:
        raise FormatError(f"line {line_no}: field {key!r} must be a list of {n} numbers")
    out = []
    for v in values:
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise FormatError(f"line {line_no}: field {key!r} has a non-finite entry")
        out.append(float(v))
    return out


def _parse_record(obj: dict, line_no: int) -> DetectionRecord:
    kind = _require(obj, "kind", line_no)
    frame = str(_require(obj, "frame", line_no))
    category = _require(obj, "category", line_no)
    class_id = class_id_of(category)
    score = float(obj.get("score", 1.0))
    if kind in ("cam3d", "ego3d"):
        center = _floats(_require(obj, "center", line_no), 3, "center", line_no)
        dims = _floats(_require(obj, "dims", line_no), 3, "dims", line_no)
        yaw = float(_require(obj, "yaw", line_no))
        camera = str(_require(obj, "camera", line_no)) if kind == "cam3d" else obj.get("source_camera")
        box = Box3D(
            x=center[0],
            y=center[1],
            z=center[2],
            w=dims[0],
            h=dims[1],
            l=dims[2],
            yaw=yaw,
            class_id=class_id,
            score=score,
            sigma=float(obj.get("sigma", 0.0)),
            frame="cam" if kind == "cam3d" else "ego",
        )
        return DetectionRecord(kind, frame, camera, box, class_id, score)
    if kind == "bev":
        center = _floats(_require(obj, "center", line_no), 2, "center", line_no)
        dims = _floats(_require(obj, "dims", line_no), 2, "dims", line_no)
        box = BevBox(
            x=center[0],
            y=center[1],
            l=dims[0],
            w=dims[1],
            yaw=float(_require(obj, "yaw", line_no)),
            class_id=class_id,
            score=score,
            source_camera=str(obj.get("source_camera", "")),
        )
        return DetectionRecord(kind, frame, obj.get("source_camera"), box, class_id, score)
    if kind == "box2d":
        center = _floats(_require(obj, "center", line_no), 2, "center", line_no)
        size = _floats(_require(obj, "size", line_no), 2, "size", line_no)
        camera = str(_require(obj, "camera", line_no))
        box = Box2D(u=center[0], v=center[1], width=size[0], height=size[1])
        return DetectionRecord(kind, frame, camera, box, class_id, score)
    raise FormatError(f"line {line_no}: unknown record kind {kind!r}")


def read_records(path) -> list[DetectionRecord]:
    records = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {line_no}: malformed JSON: {exc}") from exc
        records.append(_parse_record(obj, line_no))
    return records


def record_to_obj(rec: DetectionRecord) -> dict:
    category = CLASS_NAMES[rec.class_id]
    if rec.kind == "cam3d":
        b = rec.box
        return {
            "kind": "cam3d",
            "frame": rec.frame,
            "camera": rec.camera,
            "category": category,
            "score": rec.score,
            "sigma": b.sigma,
            "center": [b.x, b.y, b.z],
            "dims": [b.w, b.h, b.l],
            "yaw": b.yaw,
        }
    if rec.kind == "ego3d":
        b = rec.box
        obj = {
            "kind": "ego3d",
            "frame": rec.frame,
            "category": category,
            "score": rec.score,
            "sigma": b.sigma,
            "center": [b.x, b.y, b.z],
            "dims": [b.w, b.h, b.l],
            "yaw": b.yaw,
        }
        if rec.camera:
            obj["source_camera"] = rec.camera
        return obj
    if rec.kind == "bev":
        b = rec.box
        return {
            "kind": "bev",
            "frame": rec.frame,
            "category": category,
            "score": rec.score,
            "center": [b.x, b.y],
            "dims": [b.l, b.w],
            "yaw": b.yaw,
            "source_camera": b.source_camera,
        }
    if rec.kind == "box2d":
        b = rec.box
        return {
            "kind": "box2d",
            "frame": rec.frame,
            "camera": rec.camera,
            "category": category,
            "score": rec.score,
            "center": [b.u, b.v],
            "size": [b.width, b.height],
        }
    raise FormatError(f"unknown record kind {rec.kind!r}")


def write_records(path, records: list[DetectionRecord]):
    lines = [json.dumps(record_to_obj(rec)) for rec in records]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
