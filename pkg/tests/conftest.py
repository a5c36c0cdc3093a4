import math

import pytest

from fisheyebev.distortion import DistortionCoeffs
from fisheyebev.geometry import CameraModel, ExtrinsicPose, Intrinsics
from fisheyebev.synth import default_rig

# shared distortion fixture used across suites
K_FIXTURE = DistortionCoeffs(k1=-0.05, k2=0.01, k3=-0.002, k4=0.0001)


@pytest.fixture
def k_coeffs():
    return K_FIXTURE


@pytest.fixture
def zero_coeffs():
    return DistortionCoeffs()


@pytest.fixture
def simple_camera(k_coeffs):
    """640x480 camera with the shared distortion fixture, identity pose."""
    return CameraModel(
        intrinsics=Intrinsics(400.0, 400.0, 320.0, 240.0),
        distortion=k_coeffs,
        pose=ExtrinsicPose(),
        image_width=640,
        image_height=480,
    )


@pytest.fixture
def undistorted_camera(zero_coeffs):
    return CameraModel(
        intrinsics=Intrinsics(400.0, 400.0, 320.0, 240.0),
        distortion=zero_coeffs,
        pose=ExtrinsicPose(),
        image_width=640,
        image_height=480,
    )


@pytest.fixture(scope="session")
def rig():
    return default_rig()
