"""Ego-frame transfer of detections and surround-view fusion.

Four cameras see overlapping regions, so the same object can be detected
more than once. Fusion is a score-greedy geometric suppression in the BEV
plane: keep the best-scoring detection, drop later same-class detections
whose footprint overlaps it (rotated IoU) or whose center is closer than
a gate distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boxes import BevBox, Box3D, wrap_angle
from .errors import DomainError
from .evaluation import iou_bev
from .geometry import ExtrinsicPose, cam_to_ego

DEFAULT_IOU_THRESHOLD = 0.3
DEFAULT_CENTER_DIST_THRESHOLD = 0.5
CAMERA_ORDER = ("front", "left", "right", "rear")


def to_ego(box: Box3D, pose: ExtrinsicPose) -> Box3D:
    """Transform a camera-frame box to the ego frame.

    The center moves rigidly; the heading shifts by the pose's
    ground-plane rotation component; dimensions are frame-independent.
    """
    if box.frame != "cam":
        raise DomainError("to_ego expects a camera-frame box")
    center = cam_to_ego(box.center, pose)
    ego = box.with_center(center, frame="ego")
    return type(box)(
        x=ego.x,
        y=ego.y,
        z=ego.z,
        w=box.w,
        h=box.h,
        l=box.l,
        yaw=wrap_angle(box.yaw + pose.ground_yaw),
        class_id=box.class_id,
        score=box.score,
        sigma=box.sigma,
        frame="ego",
    )


def from_ego(box: Box3D, pose: ExtrinsicPose) -> Box3D:
    """Inverse of to_ego: express an ego-frame box in a camera's frame."""
    if box.frame != "ego":
        raise DomainError("from_ego expects an ego-frame box")
    rot = pose.rotation
    center = rot.T @ (box.center - pose.translation)
    return type(box)(
        x=float(center[0]),
        y=float(center[1]),
        z=float(center[2]),
        w=box.w,
        h=box.h,
        l=box.l,
        yaw=wrap_angle(box.yaw - pose.ground_yaw),
        class_id=box.class_id,
        score=box.score,
        sigma=box.sigma,
        frame="cam",
    )


def to_bev(box: Box3D, source_camera: str = "") -> BevBox:
    """Drop the vertical extent, keeping the ground-plane footprint."""
    if box.frame != "ego":
        raise DomainError("to_bev expects an ego-frame box")
    return BevBox(
        x=box.x,
        y=box.y,
        l=box.l,
        w=box.w,
        yaw=box.yaw,
        class_id=box.class_id,
        score=box.score,
        source_camera=source_camera,
    )


@dataclass(frozen=True)
class SurroundFrame:
    """Per-camera camera-frame detections captured at one timestamp."""

    detections: dict[str, list[Box3D]]
    timestamp: str = ""

    def __post_init__(self):
        for cam_id, boxes in self.detections.items():
            for b in boxes:
                if b.frame != "cam":
                    raise DomainError(
                        f"camera {cam_id!r}: surround frames hold camera-frame boxes"
                    )


@dataclass
class FusedDetection:
    """A kept ego-frame detection with its source camera."""

    box: Box3D
    source_camera: str

    @property
    def bev(self) -> BevBox:
        return to_bev(self.box, self.source_camera)


def _camera_rank(cam_id: str) -> int:
    try:
        return CAMERA_ORDER.index(cam_id)
    except ValueError:
        return len(CAMERA_ORDER)


def fuse_surround_3d(
    frame: SurroundFrame,
    poses: dict[str, ExtrinsicPose],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    center_dist_threshold: float = DEFAULT_CENTER_DIST_THRESHOLD,
) -> list[FusedDetection]:
    """Greedy same-class suppression in the ego BEV plane, keeping 3D boxes.

    Candidates sort by score descending with a deterministic tie-break
    (camera order front < left < right < rear, then input index).
    """
    candidates: list[tuple[float, int, int, FusedDetection]] = []
    for cam_id, boxes in frame.detections.items():
        if cam_id not in poses:
            raise DomainError(f"unknown camera id {cam_id!r}: no pose available")
        pose = poses[cam_id]
        for idx, box in enumerate(boxes):
            ego = to_ego(box, pose)
            candidates.append(
                (-box.score, _camera_rank(cam_id), idx, FusedDetection(ego, cam_id))
            )
    candidates.sort(key=lambda t: t[:3])
    kept: list[FusedDetection] = []
    for _, _, _, cand in candidates:
        cb = cand.bev
        suppressed = False
        for existing in kept:
            eb = existing.bev
            if eb.class_id != cb.class_id:
                continue
            dist = float(np.hypot(eb.x - cb.x, eb.y - cb.y))
            if dist < center_dist_threshold or iou_bev(eb, cb) > iou_threshold:
                suppressed = True
                break
        if not suppressed:
            kept.append(cand)
    return kept


def fuse_surround(
    frame: SurroundFrame,
    poses: dict[str, ExtrinsicPose],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    center_dist_threshold: float = DEFAULT_CENTER_DIST_THRESHOLD,
) -> list[BevBox]:
    """Fused 360-degree BEV object set for one surround frame."""
    return [
        d.bev
        for d in fuse_surround_3d(frame, poses, iou_threshold, center_dist_threshold)
    ]
