"""Fisheye-camera geometry and surround-view BEV perception toolkit.

Subsystems:
    distortion / geometry  - fisheye projection model with LUT-accelerated
                             angle inversion and rigid ego transforms
    codec / losses         - center-keypoint target encoding, decoding and
                             training-loss formulas
    fusion                 - ego-frame transfer and 360-degree BEV fusion
    evaluation             - IoU metrics, 40-point AP, depth error
    synth                  - randomized scene oracle for end-to-end checks
    cli                    - command-line entry points
"""

from ._core import get_backend
from .boxes import CLASS_NAMES, BevBox, Box2D, Box3D
from .calibration import load_rig, save_rig
from .codec import TargetMaps, decode, encode_scene
from .distortion import (
    DistortionCoeffs,
    DistortionTable,
    build_lut,
    lut_theta_from_theta_d,
    theta_d_from_theta,
    theta_from_theta_d_exact,
)
from .evaluation import EvalReport, MatchConfig, abs_rel, average_precision, iou_2d, iou_3d, iou_bev
from .fusion import SurroundFrame, fuse_surround, to_bev, to_ego
from .geometry import (
    CameraModel,
    ExtrinsicPose,
    Intrinsics,
    adjust_intrinsics_for_preprocess,
    cam_to_ego,
    ego_to_cam,
    project,
    unproject,
)
from .losses import bin_ce_loss, focal_loss, l1_loss, laplacian_uncertainty_loss
from .multibin import MultiBinCodec, multibin_decode, multibin_encode
from .synth import RigSpec, SceneSpec, default_rig, generate, perfect_predictions

__version__ = "0.1.0"

__all__ = [
    "BevBox",
    "Box2D",
    "Box3D",
    "CLASS_NAMES",
    "CameraModel",
    "DistortionCoeffs",
    "DistortionTable",
    "EvalReport",
    "ExtrinsicPose",
    "Intrinsics",
    "MatchConfig",
    "MultiBinCodec",
    "RigSpec",
    "SceneSpec",
    "SurroundFrame",
    "TargetMaps",
    "abs_rel",
    "adjust_intrinsics_for_preprocess",
    "average_precision",
    "bin_ce_loss",
    "build_lut",
    "cam_to_ego",
    "decode",
    "default_rig",
    "ego_to_cam",
    "encode_scene",
    "focal_loss",
    "fuse_surround",
    "generate",
    "get_backend",
    "iou_2d",
    "iou_3d",
    "iou_bev",
    "l1_loss",
    "laplacian_uncertainty_loss",
    "load_rig",
    "lut_theta_from_theta_d",
    "multibin_decode",
    "multibin_encode",
    "perfect_predictions",
    "project",
    "save_rig",
    "theta_d_from_theta",
    "theta_from_theta_d_exact",
    "to_bev",
    "to_ego",
    "unproject",
]
