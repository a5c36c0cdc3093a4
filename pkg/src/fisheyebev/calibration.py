"""Calibration file for a four-camera surround rig.

JSON document, one file per rig:

    {
      "format_version": 1,
      "cameras": {
        "front": {"image_width": ..., "image_height": ...,
                  "f_u": ..., "f_v": ..., "c_u": ..., "c_v": ...,
                  "k1": ..., "k2": ..., "k3": ..., "k4": ...,
                  "x": ..., "y": ..., "z": ...,
                  "pitch": ..., "yaw": ..., "roll": ...},
        ...
      }
    }

Lengths in meters, angles in radians. The parser rejects missing fields
and non-finite numbers.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .distortion import DistortionCoeffs
from .errors import CalibrationError
from .geometry import CameraModel, ExtrinsicPose, Intrinsics

FORMAT_VERSION = 1
CAMERA_IDS = ("front", "left", "right", "rear")

_NUMERIC_FIELDS = (
    "f_u",
    "f_v",
    "c_u",
    "c_v",
    "k1",
    "k2",
    "k3",
    "k4",
    "x",
    "y",
    "z",
    "pitch",
    "yaw",
    "roll",
)
_INT_FIELDS = ("image_width", "image_height")


def _parse_camera(cam_id: str, entry: dict) -> CameraModel:
    for key in _NUMERIC_FIELDS + _INT_FIELDS:
        if key not in entry:
            raise CalibrationError(f"camera {cam_id!r}: missing field {key!r}")
        value = entry[key]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise CalibrationError(f"camera {cam_id!r}: field {key!r} is not numeric")
        if not math.isfinite(value):
            raise CalibrationError(f"camera {cam_id!r}: field {key!r} is not finite")
    return CameraModel(
        intrinsics=Intrinsics(entry["f_u"], entry["f_v"], entry["c_u"], entry["c_v"]),
        distortion=DistortionCoeffs(entry["k1"], entry["k2"], entry["k3"], entry["k4"]),
        pose=ExtrinsicPose(
            x=entry["x"],
            y=entry["y"],
            z=entry["z"],
            pitch=entry["pitch"],
            yaw=entry["yaw"],
            roll=entry["roll"],
        ),
        image_width=int(entry["image_width"]),
        image_height=int(entry["image_height"]),
    )


def load_rig(path) -> dict[str, CameraModel]:
    """Parse a calibration file into CameraModel objects keyed by camera id."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CalibrationError(f"cannot read calibration file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise CalibrationError("calibration document must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise CalibrationError(
            f"unsupported format_version {doc.get('format_version')!r}"
        )
    cameras = doc.get("cameras")
    if not isinstance(cameras, dict) or not cameras:
        raise CalibrationError("calibration document has no cameras")
    rig = {}
    for cam_id, entry in cameras.items():
        if not isinstance(entry, dict):
            raise CalibrationError(f"camera {cam_id!r}: entry must be an object")
        rig[cam_id] = _parse_camera(cam_id, entry)
    return rig


def save_rig(path, rig: dict[str, CameraModel]):
    """Serialize CameraModel objects to the calibration schema."""
    cameras = {}
    for cam_id, cam in rig.items():
        k = cam.intrinsics
        d = cam.distortion
        p = cam.pose
        cameras[cam_id] = {
            "image_width": cam.image_width,
            "image_height": cam.image_height,
            "f_u": k.f_u,
            "f_v": k.f_v,
            "c_u": k.c_u,
            "c_v": k.c_v,
            "k1": d.k1,
            "k2": d.k2,
            "k3": d.k3,
            "k4": d.k4,
            "x": p.x,
            "y": p.y,
            "z": p.z,
            "pitch": p.pitch,
            "yaw": p.yaw,
            "roll": p.roll,
        }
    doc = {"format_version": FORMAT_VERSION, "cameras": cameras}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
