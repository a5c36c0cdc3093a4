"""Oriented box types shared by the codec, fusion and evaluation stages."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

CLASS_NAMES = (
    "car",
    "truck",
    "pedestrian",
    "rider",
    "baby_carriage",
    "traffic_cones",
    "motorbike",
    "no_stop_sign",
)
N_CLASSES = len(CLASS_NAMES)


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    m = a % (2.0 * math.pi)
    return m if m <= math.pi else m - 2.0 * math.pi


@dataclass(frozen=True)
class Box3D:
    """Oriented 3D box in the camera or ego frame.

    dims are (w, h, l): lateral width, vertical height, length along the
    heading. yaw is about the vertical (ego z) axis; for camera-frame
    boxes it is stored relative to the pose's ground-plane rotation.
    """

    x: float
    y: float
    z: float
    w: float
    h: float
    l: float
    yaw: float
    class_id: int
    score: float = 1.0
    sigma: float = 0.0
    frame: str = "cam"

    def __post_init__(self):
        if min(self.w, self.h, self.l) <= 0.0:
            raise DomainError("box dimensions must be positive")
        if not (0.0 <= self.score <= 1.0):
            raise DomainError("score must lie in [0, 1]")
        if self.sigma < 0.0:
            raise DomainError("sigma must be non-negative")
        if not (0 <= self.class_id < N_CLASSES):
            raise DomainError(f"class_id must be in [0, {N_CLASSES})")
        if self.frame not in ("cam", "ego"):
            raise DomainError("frame must be 'cam' or 'ego'")
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))

    @property
    def center(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def with_center(self, center, frame: str) -> "Box3D":
        cx, cy, cz = (float(v) for v in center)
        return replace(self, x=cx, y=cy, z=cz, frame=frame)


def ego_box_corners(box: Box3D) -> np.ndarray:
    """The 8 corners of an ego-frame box, shape (8, 3)."""
    if box.frame != "ego":
        raise DomainError("corners are defined for ego-frame boxes")
    dx, dy, dz = box.l / 2.0, box.w / 2.0, box.h / 2.0
    signs = np.array(
        [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
        dtype=np.float64,
    )
    local = signs * np.array([dx, dy, dz])
    c, s = math.cos(box.yaw), math.sin(box.yaw)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return local @ rot.T + box.center


@dataclass(frozen=True)
class Box2D:
    """Axis-aligned image box: continuous center and size in pixels."""

    u: float
    v: float
    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0.0 or self.height <= 0.0:
            raise DomainError("2D box size must be positive")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (
            self.u - self.width / 2.0,
            self.v - self.height / 2.0,
            self.u + self.width / 2.0,
            self.v + self.height / 2.0,
        )


@dataclass(frozen=True)
class BevBox:
    """Ground-plane footprint of a 3D box in the ego frame."""

    x: float
    y: float
    l: float
    w: float
    yaw: float
    class_id: int
    score: float = 1.0
    source_camera: str = ""

    def __post_init__(self):
        if self.l <= 0.0 or self.w <= 0.0:
            raise DomainError("footprint dimensions must be positive")
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))

    def corners(self) -> np.ndarray:
        """Footprint polygon, counter-clockwise, shape (4, 2)."""
        dx, dy = self.l / 2.0, self.w / 2.0
        local = np.array([[dx, dy], [-dx, dy], [-dx, -dy], [dx, -dy]])
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + np.array([self.x, self.y])
