import math

import numpy as np
import pytest

from fisheyebev.distortion import theta_d_from_theta
from fisheyebev.errors import BehindCamera, DomainError
from fisheyebev.geometry import (
    CameraModel,
    ExtrinsicPose,
    Intrinsics,
    adjust_intrinsics_for_preprocess,
    cam_to_ego,
    ego_to_cam,
    project,
    rotation_matrix,
    unproject,
)


class TestProjection:
    def test_optical_axis_hits_principal_point(self, simple_camera):
        uv = project((0.0, 0.0, 3.0), simple_camera)
        np.testing.assert_allclose(uv, [320.0, 240.0], atol=1e-12)

    def test_undistorted_45deg_point(self, undistorted_camera):
        # a = 1, r = 1, theta = pi/4; with zero coeffs theta_d = theta,
        # x' = theta_d / r * a = pi/4, so u = 400 * pi/4 + 320
        uv = project((1.0, 0.0, 1.0), undistorted_camera)
        assert uv[0] == pytest.approx(400.0 * math.pi / 4.0 + 320.0, abs=1e-9)
        assert uv[1] == pytest.approx(240.0, abs=1e-9)

    def test_matches_scalar_oracle(self, simple_camera):
        # hand-rolled scalar pipeline, written independently of project()
        x, y, z = 1.0, 1.0, 2.0
        a, b = x / z, y / z
        r = math.hypot(a, b)
        theta = math.atan(r)
        theta_d = theta_d_from_theta(theta, simple_camera.distortion)
        xd, yd = theta_d / r * a, theta_d / r * b
        want_u = 400.0 * xd + 320.0
        want_v = 400.0 * yd + 240.0
        uv = project((x, y, z), simple_camera)
        assert uv[0] == pytest.approx(want_u, rel=1e-13)
        assert uv[1] == pytest.approx(want_v, rel=1e-13)

    def test_batch_matches_scalar(self, simple_camera):
        pts = np.array([[0.5, -0.2, 2.0], [0.0, 0.0, 1.0], [-1.0, 0.7, 3.0]])
        batch = project(pts, simple_camera)
        for i, p in enumerate(pts):
            np.testing.assert_allclose(batch[i], project(p, simple_camera), atol=1e-12)

    def test_behind_camera(self, simple_camera):
        with pytest.raises(BehindCamera):
            project((0.0, 0.0, -1.0), simple_camera)
        with pytest.raises(BehindCamera):
            project((1.0, 1.0, 0.0), simple_camera)


class TestUnprojection:
    def test_principal_point(self, simple_camera):
        pt = unproject((320.0, 240.0), 5.0, simple_camera)
        np.testing.assert_allclose(pt, [0.0, 0.0, 5.0], atol=1e-12)

    def test_round_trip_exact(self, simple_camera):
        original = np.array([1.2, -0.8, 2.5])
        uv = project(original, simple_camera)
        back = unproject(uv, original[2], simple_camera, mode="exact")
        np.testing.assert_allclose(back, original, atol=1e-9)

    def test_round_trip_lut(self, simple_camera):
        original = np.array([1.2, -0.8, 2.5])
        uv = project(original, simple_camera)
        back = unproject(uv, original[2], simple_camera, mode="lut")
        np.testing.assert_allclose(back, original, atol=5e-3)

    def test_depth_broadcast(self, simple_camera):
        pts = np.array([[0.5, 0.1, 2.0], [0.2, -0.3, 4.0]])
        uv = project(pts, simple_camera)
        back = unproject(uv, pts[:, 2], simple_camera)
        np.testing.assert_allclose(back, pts, atol=1e-9)

    def test_invalid_mode_and_depth(self, simple_camera):
        with pytest.raises(DomainError):
            unproject((320.0, 240.0), 1.0, simple_camera, mode="nearest")
        with pytest.raises(DomainError):
            unproject((320.0, 240.0), 0.0, simple_camera)


class TestPreprocessAdjustment:
    def test_no_op(self, simple_camera):
        adjusted = adjust_intrinsics_for_preprocess(simple_camera, 0, 0, 640, 480)
        assert adjusted.intrinsics == simple_camera.intrinsics

    def test_scales(self, simple_camera):
        adjusted = adjust_intrinsics_for_preprocess(simple_camera, 40, 40, 320, 200)
        k = adjusted.intrinsics
        assert k.f_u == pytest.approx(400.0 * 320 / 640)
        assert k.f_v == pytest.approx(400.0 * 200 / 400)
        assert k.c_u == pytest.approx(320.0 * 320 / 640)
        assert k.c_v == pytest.approx((240.0 - 40) * 200 / 400)
        assert adjusted.image_width == 320
        assert adjusted.image_height == 200

    def test_commutes_with_pixel_transform(self, simple_camera):
        """Projecting with adjusted intrinsics equals transforming the
        original pixel: u' = u * s_x, v' = (v - crop_top) * s_y."""
        crop_top, crop_bottom, out_w, out_h = 30, 50, 320, 200
        adjusted = adjust_intrinsics_for_preprocess(
            simple_camera, crop_top, crop_bottom, out_w, out_h
        )
        s_x = out_w / simple_camera.image_width
        s_y = out_h / (simple_camera.image_height - crop_top - crop_bottom)
        rng = np.random.default_rng(7)
        pts = np.column_stack(
            [rng.uniform(-1, 1, 200), rng.uniform(-1, 1, 200), rng.uniform(1, 10, 200)]
        )
        uv = project(pts, simple_camera)
        uv_adj = project(pts, adjusted)
        want = np.column_stack([uv[:, 0] * s_x, (uv[:, 1] - crop_top) * s_y])
        assert np.abs(uv_adj - want).max() < 1e-9

    def test_invalid_crop(self, simple_camera):
        with pytest.raises(DomainError):
            adjust_intrinsics_for_preprocess(simple_camera, 240, 240, 640, 480)
        with pytest.raises(DomainError):
            adjust_intrinsics_for_preprocess(simple_camera, -1, 0, 640, 480)


class TestRigidTransforms:
    def test_identity_pose(self):
        pose = ExtrinsicPose()
        np.testing.assert_allclose(cam_to_ego((1.0, 2.0, 3.0), pose), [1.0, 2.0, 3.0])

    def test_pure_translation(self):
        pose = ExtrinsicPose(x=1.0, y=-2.0, z=0.5)
        np.testing.assert_allclose(cam_to_ego((0.0, 0.0, 0.0), pose), [1.0, -2.0, 0.5])

    def test_yaw_quarter_turn(self):
        pose = ExtrinsicPose(yaw=math.pi / 2.0)
        # Rz(pi/2) maps +x to +y
        np.testing.assert_allclose(cam_to_ego((1.0, 0.0, 0.0), pose), [0.0, 1.0, 0.0], atol=1e-12)

    def test_matches_matrix_oracle(self):
        pose = ExtrinsicPose(x=0.3, y=0.7, z=-0.2, pitch=0.2, yaw=-1.1, roll=0.5)
        p = np.array([0.4, -1.2, 2.0])
        want = pose.rotation @ p + pose.translation
        np.testing.assert_allclose(cam_to_ego(p, pose), want, atol=1e-12)

    def test_round_trip(self):
        pose = ExtrinsicPose(x=0.3, y=0.7, z=-0.2, pitch=0.2, yaw=-1.1, roll=0.5)
        rng = np.random.default_rng(3)
        pts = rng.uniform(-5, 5, (50, 3))
        back = ego_to_cam(cam_to_ego(pts, pose), pose)
        assert np.abs(back - pts).max() < 1e-9

    def test_rotation_composition_order(self):
        # Rz(yaw) @ Ry(pitch) @ Rx(roll), checked against explicit products
        r = rotation_matrix(0.3, 0.7, -0.4)
        rz = rotation_matrix(0.0, 0.7, 0.0)
        ry = rotation_matrix(0.3, 0.0, 0.0)
        rx = rotation_matrix(0.0, 0.0, -0.4)
        np.testing.assert_allclose(r, rz @ ry @ rx, atol=1e-12)

    def test_pose_rotation_is_orthonormal(self):
        pose = ExtrinsicPose(pitch=0.4, yaw=2.0, roll=-1.3)
        r = pose.rotation
        np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)


class TestIntrinsicsValidation:
    def test_rejects_nonpositive_focal(self):
        with pytest.raises(DomainError):
            Intrinsics(0.0, 400.0, 320.0, 240.0)

    def test_rejects_nonfinite_center(self):
        with pytest.raises(DomainError):
            Intrinsics(400.0, 400.0, math.nan, 240.0)

    def test_rejects_bad_image_size(self, k_coeffs):
        with pytest.raises(DomainError):
            CameraModel(
                intrinsics=Intrinsics(400.0, 400.0, 320.0, 240.0),
                distortion=k_coeffs,
                pose=ExtrinsicPose(),
                image_width=0,
                image_height=480,
            )
