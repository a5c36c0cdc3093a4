"""Fisheye camera model: projection, unprojection and rigid transforms.

Conventions
-----------
Camera frame: z along the optical axis (forward), x right, y down.
Ego frame: origin at the front-bumper center, x forward, y left, z up
(ground plane at z = 0).
Extrinsic rotation composes as R = Rz(yaw) @ Ry(pitch) @ Rx(roll) about
the ego axes; a camera point maps to ego via p_ego = R @ p_cam + t.
Pixels are continuous; nothing in this module rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .distortion import (
    HALF_PI,
    DistortionCoeffs,
    DistortionTable,
    build_lut,
    lut_theta_from_theta_d,
    theta_d_from_theta,
    theta_from_theta_d_exact,
)
from .errors import BehindCamera, DomainError, FieldOfViewExceeded

EPSILON_Z = 1e-6
# below this radius/angle the distortion ratio is replaced by its limit of 1
RADIAL_EPS = 1e-9


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole-style intrinsics: focal lengths and principal point, in pixels."""

    f_u: float
    f_v: float
    c_u: float
    c_v: float

    def __post_init__(self):
        if not (self.f_u > 0.0 and self.f_v > 0.0):
            raise DomainError("focal lengths must be positive")
        if not (math.isfinite(self.c_u) and math.isfinite(self.c_v)):
            raise DomainError("principal point must be finite")


def rotation_matrix(pitch: float, yaw: float, roll: float) -> np.ndarray:
    """R = Rz(yaw) @ Ry(pitch) @ Rx(roll)."""
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cr, sr = math.cos(roll), math.sin(roll)
    rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
    return rz @ ry @ rx


@dataclass(frozen=True)
class ExtrinsicPose:
    """6-DoF camera-to-ego pose: translation in meters, rotation in radians."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0
    roll: float = 0.0

    @property
    def rotation(self) -> np.ndarray:
        return rotation_matrix(self.pitch, self.yaw, self.roll)

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def ground_yaw(self) -> float:
        """Ground-plane rotation component used for heading transfer."""
        return self.yaw

    def __post_init__(self):
        r = self.rotation
        if not np.allclose(r @ r.T, np.eye(3), atol=1e-9):
            raise DomainError("rotation is not orthonormal")
        if abs(np.linalg.det(r) - 1.0) > 1e-9:
            raise DomainError("rotation determinant must be +1")


@dataclass(frozen=True)
class CameraModel:
    """A calibrated fisheye camera; the inverse-distortion table is built once."""

    intrinsics: Intrinsics
    distortion: DistortionCoeffs
    pose: ExtrinsicPose
    image_width: int
    image_height: int
    lut: DistortionTable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.image_width <= 0 or self.image_height <= 0:
            raise DomainError("image dimensions must be positive")
        object.__setattr__(self, "lut", build_lut(self.distortion))


def project(points, camera: CameraModel):
    """Project camera-frame 3D points to distorted pixel coordinates.

    points: (3,) or (N, 3) array-like with z > 0.
    Returns (u, v) as a (2,) or (N, 2) float array.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    single = np.asarray(points).ndim == 1
    z = pts[:, 2]
    if np.any(z <= EPSILON_Z):
        raise BehindCamera(f"projection requires z > {EPSILON_Z}")
    a = pts[:, 0] / z
    b = pts[:, 1] / z
    r = np.hypot(a, b)
    theta = np.arctan(r)
    if np.any(theta > HALF_PI):
        raise FieldOfViewExceeded("field angle exceeds pi/2")
    theta_d = theta_d_from_theta(theta, camera.distortion)
    scale = np.where(r < RADIAL_EPS, 1.0, theta_d / np.where(r < RADIAL_EPS, 1.0, r))
    xd = scale * a
    yd = scale * b
    k = camera.intrinsics
    uv = np.stack([k.f_u * xd + k.c_u, k.f_v * yd + k.c_v], axis=-1)
    return uv[0] if single else uv


def unproject(pixels, depth_z, camera: CameraModel, mode: str = "exact"):
    """Recover camera-frame 3D points from pixels and depth along the axis.

    mode selects the angle inversion: "exact" (bisection oracle) or "lut"
    (table interpolation). depth_z broadcasts against the pixel batch.
    """
    if mode not in ("exact", "lut"):
        raise DomainError(f"unknown unprojection mode {mode!r}")
    px = np.atleast_2d(np.asarray(pixels, dtype=np.float64))
    single = np.asarray(pixels).ndim == 1
    depth = np.broadcast_to(np.asarray(depth_z, dtype=np.float64), px.shape[:1]).copy()
    if np.any(depth <= 0.0):
        raise DomainError("depth must be positive")
    k = camera.intrinsics
    xd = (px[:, 0] - k.c_u) / k.f_u
    yd = (px[:, 1] - k.c_v) / k.f_v
    theta_d = np.hypot(xd, yd)
    if mode == "exact":
        theta = theta_from_theta_d_exact(theta_d, camera.distortion)
    else:
        theta = lut_theta_from_theta_d(camera.lut, theta_d)
    r = np.tan(theta)
    ratio = np.where(theta_d < RADIAL_EPS, 1.0, r / np.where(theta_d < RADIAL_EPS, 1.0, theta_d))
    a = xd * ratio
    b = yd * ratio
    pts = np.stack([a * depth, b * depth, depth], axis=-1)
    return pts[0] if single else pts


def adjust_intrinsics_for_preprocess(
    camera: CameraModel,
    crop_top: int,
    crop_bottom: int,
    out_w: int,
    out_h: int,
) -> CameraModel:
    """Rescale intrinsics for a vertical crop followed by a resize.

    Distortion coefficients act on angles, not pixels, so they pass
    through unchanged; only the affine pixel mapping is updated.
    """
    if crop_top < 0 or crop_bottom < 0 or crop_top + crop_bottom >= camera.image_height:
        raise DomainError("invalid crop: must leave a positive image height")
    if out_w <= 0 or out_h <= 0:
        raise DomainError("output dimensions must be positive")
    s_x = out_w / camera.image_width
    s_y = out_h / (camera.image_height - crop_top - crop_bottom)
    k = camera.intrinsics
    new_k = Intrinsics(
        f_u=k.f_u * s_x,
        f_v=k.f_v * s_y,
        c_u=k.c_u * s_x,
        c_v=(k.c_v - crop_top) * s_y,
    )
    return replace(camera, intrinsics=new_k, image_width=out_w, image_height=out_h)


def cam_to_ego(points, pose: ExtrinsicPose):
    """Rigid transform of camera-frame points into the ego frame."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    single = np.asarray(points).ndim == 1
    out = pts @ pose.rotation.T + pose.translation
    return out[0] if single else out


def ego_to_cam(points, pose: ExtrinsicPose):
    """Exact inverse of cam_to_ego."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    single = np.asarray(points).ndim == 1
    out = (pts - pose.translation) @ pose.rotation
    return out[0] if single else out
