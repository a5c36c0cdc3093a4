import json

import pytest

from fisheyebev.calibration import load_rig, save_rig
from fisheyebev.errors import CalibrationError
from fisheyebev.interchange import DetectionRecord, read_records, write_records
from fisheyebev.boxes import Box2D, Box3D, BevBox
from fisheyebev.errors import FormatError


@pytest.fixture
def rig_file(tmp_path, rig):
    path = tmp_path / "calibration.json"
    save_rig(path, rig.cameras)
    return path


class TestCalibrationIO:
    def test_round_trip(self, rig_file, rig):
        loaded = load_rig(rig_file)
        assert set(loaded) == set(rig.cameras)
        for cam_id, cam in rig.cameras.items():
            got = loaded[cam_id]
            assert got.intrinsics == cam.intrinsics
            assert got.distortion == cam.distortion
            assert got.pose == cam.pose
            assert (got.image_width, got.image_height) == (cam.image_width, cam.image_height)

    def test_missing_field(self, rig_file):
        doc = json.loads(rig_file.read_text())
        del doc["cameras"]["front"]["f_u"]
        rig_file.write_text(json.dumps(doc))
        with pytest.raises(CalibrationError, match="f_u"):
            load_rig(rig_file)

    def test_non_finite_field(self, rig_file):
        doc = json.loads(rig_file.read_text())
        doc["cameras"]["front"]["k1"] = float("nan")
        rig_file.write_text(json.dumps(doc, allow_nan=True))
        with pytest.raises(CalibrationError, match="finite"):
            load_rig(rig_file)

    def test_boolean_is_not_numeric(self, rig_file):
        doc = json.loads(rig_file.read_text())
        doc["cameras"]["front"]["yaw"] = True
        rig_file.write_text(json.dumps(doc))
        with pytest.raises(CalibrationError, match="numeric"):
            load_rig(rig_file)

    def test_wrong_version(self, rig_file):
        doc = json.loads(rig_file.read_text())
        doc["format_version"] = 2
        rig_file.write_text(json.dumps(doc))
        with pytest.raises(CalibrationError, match="format_version"):
            load_rig(rig_file)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(CalibrationError):
            load_rig(path)

    def test_empty_cameras(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text(json.dumps({"format_version": 1, "cameras": {}}))
        with pytest.raises(CalibrationError, match="no cameras"):
            load_rig(path)


class TestInterchange:
    def records(self):
        cam_box = Box3D(1.0, -0.5, 6.0, 1.8, 1.5, 4.5, 0.3, 0, score=0.9, sigma=0.2)
        ego_box = Box3D(6.0, 1.0, 0.75, 1.8, 1.5, 4.5, 1.2, 1, score=0.8, frame="ego")
        bev_box = BevBox(6.0, 1.0, 4.5, 1.8, 1.2, 1, score=0.8, source_camera="front")
        box2d = Box2D(400.0, 300.0, 120.0, 80.0)
        return [
            DetectionRecord("cam3d", "000000", "front", cam_box, 0, 0.9),
            DetectionRecord("ego3d", "000000", "front", ego_box, 1, 0.8),
            DetectionRecord("bev", "000000", "front", bev_box, 1, 0.8),
            DetectionRecord("box2d", "000000", "front", box2d, 0, 0.9),
        ]

    def test_round_trip(self, tmp_path):
        path = tmp_path / "records.jsonl"
        originals = self.records()
        write_records(path, originals)
        loaded = read_records(path)
        assert len(loaded) == len(originals)
        for got, want in zip(loaded, originals):
            assert got.kind == want.kind
            assert got.frame == want.frame
            assert got.class_id == want.class_id
            assert got.score == pytest.approx(want.score)
            assert type(got.box) is type(want.box)

    def test_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "records.jsonl"
        write_records(path, self.records())
        path.write_text(path.read_text() + "\n\n")
        assert len(read_records(path)) == 4

    def test_malformed_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        write_records(path, self.records()[:1])
        path.write_text(path.read_text() + "{oops\n")
        with pytest.raises(FormatError, match="line 2"):
            read_records(path)

    def test_unknown_kind(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps({"kind": "voxels", "frame": "0", "category": "car"}) + "\n")
        with pytest.raises(FormatError, match="kind"):
            read_records(path)

    def test_unknown_category(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            json.dumps({"kind": "box2d", "frame": "0", "camera": "front",
                        "category": "unicycle", "center": [1, 2], "size": [3, 4]}) + "\n"
        )
        with pytest.raises(FormatError, match="category"):
            read_records(path)

    def test_wrong_vector_length(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            json.dumps({"kind": "cam3d", "frame": "0", "camera": "front", "category": "car",
                        "center": [1, 2], "dims": [1, 1, 1], "yaw": 0.0}) + "\n"
        )
        with pytest.raises(FormatError, match="center"):
            read_records(path)
