"""Randomized parking-lot scene generator used as the end-to-end oracle.

Produces ego-frame ground-truth boxes, their camera-frame counterparts,
and projected 2D labels (the outer bounding rectangle of the 8 projected
box corners). Ideal target maps built from this ground truth stand in
for a trained network's predictions.

Rig fixture values (poses, intrinsics, distortion coefficients) are
synthetic test scaffolding validated only for internal consistency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boxes import CLASS_NAMES, Box2D, Box3D, ego_box_corners
from .codec import DEFAULT_DOWNSAMPLE, TargetMaps, encode_scene
from .distortion import HALF_PI, DistortionCoeffs
from .errors import DomainError, FisheyeBevError
from .fusion import from_ego
from .geometry import CameraModel, ExtrinsicPose, Intrinsics, ego_to_cam, project
from .multibin import MultiBinCodec

MAX_VISIBLE_RANGE = 15.0
FIXTURE_COEFFS = DistortionCoeffs(k1=-0.05, k2=0.01, k3=-0.002, k4=0.0001)

# (length, width, height) ranges in meters per category; commonsense
# scaffolding values, never asserted against any external reference
DIMENSION_PRIORS = {
    "car": ((4.2, 4.9), (1.7, 1.9), (1.4, 1.6)),
    "truck": ((6.0, 8.5), (2.2, 2.6), (2.5, 3.4)),
    "pedestrian": ((0.4, 0.6), (0.4, 0.6), (1.5, 1.9)),
    "rider": ((1.6, 2.0), (0.6, 0.8), (1.5, 1.8)),
    "baby_carriage": ((0.8, 1.1), (0.5, 0.7), (0.9, 1.1)),
    "traffic_cones": ((0.3, 0.45), (0.3, 0.45), (0.5, 0.8)),
    "motorbike": ((1.8, 2.2), (0.7, 0.9), (1.1, 1.4)),
    "no_stop_sign": ((0.3, 0.5), (0.3, 0.5), (1.0, 1.5)),
}


@dataclass(frozen=True)
class SceneSpec:
    """Parameters of one randomized scene draw."""

    rng_seed: int = 0
    n_objects: tuple[int, int] = (4, 8)
    class_weights: tuple[float, ...] | None = None
    range_m: tuple[float, float] = (2.0, 14.0)
    occlusion_free: bool = True
    min_separation: float = 0.5
    max_attempts: int = 200

    def __post_init__(self):
        if self.range_m[1] > MAX_VISIBLE_RANGE:
            raise DomainError(f"placement range capped at {MAX_VISIBLE_RANGE} m")
        if self.range_m[0] <= 0.0 or self.range_m[0] >= self.range_m[1]:
            raise DomainError("placement annulus must satisfy 0 < near < far")


@dataclass(frozen=True)
class RigSpec:
    """Four-camera surround rig fixture."""

    cameras: dict[str, CameraModel]

    @property
    def poses(self) -> dict[str, ExtrinsicPose]:
        return {cam_id: cam.pose for cam_id, cam in self.cameras.items()}


def default_rig(
    image_width: int = 1920,
    image_height: int = 1280,
    focal: float = 620.0,
    coeffs: DistortionCoeffs = FIXTURE_COEFFS,
) -> RigSpec:
    """Plausible surround-view rig: four fisheye cameras covering 360 deg.

    Each pose combines the camera-to-ego axis permutation (optical axis
    out, image y down) with a mounting azimuth; expressed in the
    yaw/pitch/roll convention of ExtrinsicPose.
    """
    intr = Intrinsics(focal, focal, image_width / 2.0, image_height / 2.0)

    def cam(x, y, z, azimuth):
        return CameraModel(
            intrinsics=intr,
            distortion=coeffs,
            pose=ExtrinsicPose(
                x=x, y=y, z=z, pitch=0.0, yaw=azimuth - math.pi / 2.0, roll=-math.pi / 2.0
            ),
            image_width=image_width,
            image_height=image_height,
        )

    return RigSpec(
        cameras={
            "front": cam(0.0, 0.0, 0.65, 0.0),
            "left": cam(-2.0, 0.95, 0.90, math.pi / 2.0),
            "right": cam(-2.0, -0.95, 0.90, -math.pi / 2.0),
            "rear": cam(-4.3, 0.0, 0.85, math.pi),
        }
    )


@dataclass
class CameraView:
    """One camera's view of a scene: paired cam-frame boxes and 2D labels."""

    cam_boxes: list[Box3D] = field(default_factory=list)
    labels_2d: list[Box2D] = field(default_factory=list)
    source_indices: list[int] = field(default_factory=list)


@dataclass
class Scene:
    """A generated scene: ego ground truth plus per-camera projections."""

    ego_boxes: list[Box3D]
    views: dict[str, CameraView]


def _corner_label(ego_box: Box3D, camera: CameraModel) -> Box2D | None:
    """Tight axis-aligned rectangle around the 8 projected corners."""
    corners_ego = ego_box_corners(ego_box)
    corners_cam = ego_to_cam(corners_ego, camera.pose)
    if np.any(corners_cam[:, 2] <= 1e-3):
        return None
    uv = project(corners_cam, camera)
    u0, v0 = uv.min(axis=0)
    u1, v1 = uv.max(axis=0)
    if u1 - u0 <= 0.0 or v1 - v0 <= 0.0:
        return None
    return Box2D(
        u=float((u0 + u1) / 2.0),
        v=float((v0 + v1) / 2.0),
        width=float(u1 - u0),
        height=float(v1 - v0),
    )


def _center_visible(ego_box: Box3D, camera: CameraModel, margin_px: float) -> bool:
    center_cam = ego_to_cam(ego_box.center, camera.pose)
    if center_cam[2] <= 0.3:
        return False
    r = math.hypot(center_cam[0], center_cam[1]) / center_cam[2]
    if math.atan(r) > 0.95 * HALF_PI:
        return False
    try:
        u, v = project(center_cam, camera)
    except FisheyeBevError:
        return False
    return (
        margin_px <= u <= camera.image_width - margin_px
        and margin_px <= v <= camera.image_height - margin_px
    )


def generate(spec: SceneSpec, rig: RigSpec) -> Scene:
    """Draw one scene; deterministic in (spec, rig).

    Objects are placed in an ego-frame annulus resting on the ground
    plane. A camera lists an object when its center projects inside the
    image with margin and all 8 corners are in front of the lens. With
    occlusion_free set, placements are resampled so objects keep clear of
    each other on the ground and their projected centers keep apart in
    every image.
    """
    rng = np.random.default_rng(spec.rng_seed)
    n_objects = int(rng.integers(spec.n_objects[0], spec.n_objects[1] + 1))
    weights = None
    if spec.class_weights is not None:
        weights = np.asarray(spec.class_weights, dtype=np.float64)
        weights = weights / weights.sum()

    margin_px = 4.0 * DEFAULT_DOWNSAMPLE
    ego_boxes: list[Box3D] = []
    placed_centers: list[tuple[float, float, float]] = []  # x, y, clearance radius

    for _ in range(n_objects):
        for _attempt in range(spec.max_attempts):
            class_id = int(rng.choice(len(CLASS_NAMES), p=weights))
            (l0, l1), (w0, w1), (h0, h1) = DIMENSION_PRIORS[CLASS_NAMES[class_id]]
            l = float(rng.uniform(l0, l1))
            w = float(rng.uniform(w0, w1))
            h = float(rng.uniform(h0, h1))
            dist = float(rng.uniform(*spec.range_m))
            azimuth = float(rng.uniform(-math.pi, math.pi))
            x = dist * math.cos(azimuth)
            y = dist * math.sin(azimuth)
            yaw = float(rng.uniform(-math.pi, math.pi))
            clearance = math.hypot(l, w) / 2.0
            if spec.occlusion_free:
                too_close = any(
                    math.hypot(x - px, y - py) < clearance + pr + spec.min_separation
                    for px, py, pr in placed_centers
                )
                if too_close:
                    continue
            candidate = Box3D(
                x=x, y=y, z=h / 2.0, w=w, h=h, l=l, yaw=yaw,
                class_id=class_id, frame="ego",
            )
            if not _visible_somewhere(candidate, rig, margin_px):
                continue
            if spec.occlusion_free and _projected_centers_collide(
                candidate, ego_boxes, rig, margin_px
            ):
                continue
            ego_boxes.append(candidate)
            placed_centers.append((x, y, clearance))
            break

    views = {cam_id: CameraView() for cam_id in rig.cameras}
    for idx, ego_box in enumerate(ego_boxes):
        for cam_id, camera in rig.cameras.items():
            if not _center_visible(ego_box, camera, margin_px):
                continue
            label = _corner_label(ego_box, camera)
            if label is None:
                continue
            view = views[cam_id]
            view.cam_boxes.append(from_ego(ego_box, camera.pose))
            view.labels_2d.append(label)
            view.source_indices.append(idx)
    return Scene(ego_boxes=ego_boxes, views=views)


def _visible_somewhere(candidate: Box3D, rig: RigSpec, margin_px: float) -> bool:
    """At least one camera sees the center with margin and all 8 corners."""
    return any(
        _center_visible(candidate, camera, margin_px)
        and _corner_label(candidate, camera) is not None
        for camera in rig.cameras.values()
    )


def _projected_centers_collide(
    candidate: Box3D, existing: list[Box3D], rig: RigSpec, margin_px: float
) -> bool:
    """Projected centers closer than ~4 grid cells in any shared camera.

    Keeps encoded Gaussian splats from corrupting each other's peak
    neighborhoods, which the decoder's sub-cell refinement relies on; the
    encoder's peak-cell collision check is class-agnostic, so this is too.
    """
    min_px = 4.0 * DEFAULT_DOWNSAMPLE
    for camera in rig.cameras.values():
        if not _center_visible(candidate, camera, margin_px):
            continue
        cu, cv = project(ego_to_cam(candidate.center, camera.pose), camera)
        for other in existing:
            if not _center_visible(other, camera, margin_px):
                continue
            ou, ov = project(ego_to_cam(other.center, camera.pose), camera)
            if math.hypot(cu - ou, cv - ov) < min_px:
                return True
    return False


@dataclass(frozen=True)
class NoiseSpec:
    """Seeded Gaussian perturbations applied to ideal prediction maps."""

    depth_std: float = 0.0
    dims_std: float = 0.0
    center_std: float = 0.0  # in feature-grid cells, applied to offset_2d
    seed: int = 0


def perfect_predictions(
    scene: Scene,
    rig: RigSpec,
    downsample: int = DEFAULT_DOWNSAMPLE,
    noise: NoiseSpec | None = None,
    codec: MultiBinCodec | None = None,
) -> dict[str, TargetMaps]:
    """Ideal per-camera prediction maps; decoding them reproduces the GT.

    With a noise spec, depth / 3D-size / 2D-offset channels are perturbed
    at object cells by seeded Gaussians for metric-degradation studies.
    """
    maps_by_camera: dict[str, TargetMaps] = {}
    rng = np.random.default_rng(noise.seed) if noise else None
    for cam_id, camera in rig.cameras.items():
        view = scene.views[cam_id]
        maps, _skipped = encode_scene(
            view.cam_boxes, view.labels_2d, camera, downsample, codec=codec
        )
        if noise is not None:
            cells = maps.valid_mask > 0.0
            n = int(np.count_nonzero(cells))
            if n:
                if noise.depth_std > 0.0:
                    maps.depth[cells] += rng.normal(0.0, noise.depth_std, n)
                if noise.dims_std > 0.0:
                    maps.size_3d[:, cells] += rng.normal(0.0, noise.dims_std, (3, n))
                if noise.center_std > 0.0:
                    maps.offset_2d[:, cells] += rng.normal(0.0, noise.center_std, (2, n))
        maps_by_camera[cam_id] = maps
    return maps_by_camera
