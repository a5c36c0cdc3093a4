"""Command-line surface for the toolkit.

Exit codes: 0 success, 1 domain error (error name on stderr), 2 usage
error (argparse). All commands are deterministic given identical inputs
and seeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .boxes import CLASS_NAMES
from .calibration import load_rig, save_rig
from .codec import (
    DEFAULT_DOWNSAMPLE,
    DEFAULT_SCORE_THRESHOLD,
    DEFAULT_TOP_K,
    TargetMaps,
    decode,
    encode_scene,
)
from .distortion import DistortionCoeffs, build_lut, lut_theta_from_theta_d, theta_d_from_theta
from .errors import CalibrationError, DomainError, FisheyeBevError, FormatError
from .evaluation import (
    EvalReport,
    MatchConfig,
    abs_rel,
    evaluate_detections,
    iou_2d,
    iou_3d,
    iou_bev,
)
from .fusion import (
    DEFAULT_CENTER_DIST_THRESHOLD,
    DEFAULT_IOU_THRESHOLD,
    SurroundFrame,
    fuse_surround_3d,
)
from .interchange import DetectionRecord, read_records, write_records
from .render import DEFAULT_CANVAS_M, DEFAULT_PX_PER_M, render_bev
from .synth import NoiseSpec, SceneSpec, default_rig, generate, perfect_predictions
from .tensorio import read_tensor_container


def _camera_from_args(args):
    rig = load_rig(args.calib)
    if args.camera not in rig:
        raise CalibrationError(f"camera {args.camera!r} not present in {args.calib}")
    return rig[args.camera]


def _cmd_project(args) -> int:
    camera = _camera_from_args(args)
    from .geometry import project

    u, v = project(tuple(args.point), camera)
    print(f"{u:.6f} {v:.6f}")
    return 0


def _cmd_unproject(args) -> int:
    camera = _camera_from_args(args)
    from .geometry import unproject

    x, y, z = unproject(tuple(args.pixel), args.depth, camera, mode=args.mode)
    print(f"{x:.6f} {y:.6f} {z:.6f}")
    return 0


def _coeffs_from_args(args) -> DistortionCoeffs:
    if args.coeffs is not None:
        return DistortionCoeffs(*args.coeffs)
    if args.calib is None or args.camera is None:
        raise DomainError("either --coeffs or --calib/--camera is required")
    return _camera_from_args(args).distortion


def _cmd_lut(args) -> int:
    coeffs = _coeffs_from_args(args)
    table = build_lut(coeffs, args.n_grids)
    if args.dump:
        for theta, theta_d in zip(table.theta_grid, table.theta_d_grid):
            print(f"{theta:.12f} {theta_d:.12f}")
    if args.theta_d is not None:
        print(f"{lut_theta_from_theta_d(table, args.theta_d):.12f}")
    if args.theta is not None:
        print(f"{theta_d_from_theta(args.theta, coeffs):.12f}")
    return 0


def _paired_boxes(records: list[DetectionRecord], frame: str, camera_id: str):
    """Pair cam3d boxes with box2d labels by order within the selection."""
    boxes3d = [
        r.box for r in records if r.kind == "cam3d" and r.frame == frame and r.camera == camera_id
    ]
    boxes2d = [
        r.box for r in records if r.kind == "box2d" and r.frame == frame and r.camera == camera_id
    ]
    if len(boxes3d) != len(boxes2d):
        raise FormatError(
            f"frame {frame!r} camera {camera_id!r}: {len(boxes3d)} cam3d records "
            f"but {len(boxes2d)} box2d records; encode needs index-paired lists"
        )
    return boxes3d, boxes2d


def _cmd_encode(args) -> int:
    camera = _camera_from_args(args)
    records = read_records(args.input)
    boxes3d, boxes2d = _paired_boxes(records, args.frame, args.camera)
    maps, skipped = encode_scene(boxes3d, boxes2d, camera, args.downsample)
    maps.save(args.out)
    print(f"encoded {len(boxes3d) - len(skipped)} objects ({len(skipped)} skipped)")
    return 0


def _cmd_decode(args) -> int:
    camera = _camera_from_args(args)
    maps = TargetMaps.load(args.maps)
    detections = decode(
        maps,
        camera,
        top_k=args.top_k,
        score_threshold=args.score_threshold,
        mode=args.mode,
    )
    records = []
    for box3d, box2d in detections:
        records.append(
            DetectionRecord("cam3d", args.frame, args.camera, box3d, box3d.class_id, box3d.score)
        )
        records.append(
            DetectionRecord("box2d", args.frame, args.camera, box2d, box3d.class_id, box3d.score)
        )
    write_records(args.out, records)
    print(f"decoded {len(detections)} detections")
    return 0


def _cmd_fuse(args) -> int:
    rig = load_rig(args.calib)
    poses = {cam_id: cam.pose for cam_id, cam in rig.items()}
    records = [r for r in read_records(args.input) if r.kind == "cam3d"]
    by_frame = defaultdict(lambda: defaultdict(list))
    for rec in records:
        by_frame[rec.frame][rec.camera].append(rec.box)
    out_records = []
    ego_records = []
    for frame_id in sorted(by_frame):
        frame = SurroundFrame(detections=dict(by_frame[frame_id]), timestamp=frame_id)
        fused = fuse_surround_3d(
            frame,
            poses,
            iou_threshold=args.iou_threshold,
            center_dist_threshold=args.center_dist_threshold,
        )
        for det in fused:
            bev = det.bev
            out_records.append(
                DetectionRecord("bev", frame_id, det.source_camera, bev, bev.class_id, bev.score)
            )
            ego_records.append(
                DetectionRecord(
                    "ego3d", frame_id, det.source_camera, det.box, det.box.class_id, det.box.score
                )
            )
    write_records(args.out, out_records)
    if args.ego_out:
        write_records(args.ego_out, ego_records)
    print(f"fused {len(records)} detections into {len(out_records)} BEV objects")
    return 0


def _load_depth_pair(gt_path, pred_path):
    gt_channels, _ = read_tensor_container(gt_path)
    pred_channels, _ = read_tensor_container(pred_path)
    if "depth" not in gt_channels or "depth" not in pred_channels:
        raise FormatError("depth containers must hold a 'depth' channel")
    gt = gt_channels["depth"].astype(np.float64)
    pred = pred_channels["depth"].astype(np.float64)
    if "valid_mask" in gt_channels:
        mask = gt_channels["valid_mask"] > 0.0
    else:
        mask = gt > 0.0
    return pred, gt, mask


def _cmd_eval(args) -> int:
    gt_records = read_records(args.gt)
    det_records = read_records(args.det)
    config = MatchConfig()
    report = EvalReport()

    gt_2d = [(f"{r.frame}/{r.camera}", r.class_id, r.box) for r in gt_records if r.kind == "box2d"]
    det_2d = [
        (f"{r.frame}/{r.camera}", r.class_id, r.score, r.box)
        for r in det_records
        if r.kind == "box2d"
    ]
    if gt_2d or det_2d:
        report.per_class_2d = evaluate_detections(
            det_2d, gt_2d, iou_2d, config.iou_threshold_2d, config
        )

    gt_3d = [(r.frame, r.class_id, r.box) for r in gt_records if r.kind == "ego3d"]
    det_3d = [(r.frame, r.class_id, r.score, r.box) for r in det_records if r.kind == "ego3d"]
    if gt_3d or det_3d:
        report.per_class_3d = evaluate_detections(
            det_3d, gt_3d, iou_3d, config.iou_threshold_3d, config
        )
        from .fusion import to_bev

        gt_bev = [(f, c, to_bev(b)) for f, c, b in gt_3d]
        det_bev = [(f, c, s, to_bev(b)) for f, c, s, b in det_3d]
        report.per_class_bev = evaluate_detections(
            det_bev, gt_bev, iou_bev, config.iou_threshold_3d, config
        )

    if args.depth_gt and args.depth_pred:
        pred, gt, mask = _load_depth_pair(args.depth_gt, args.depth_pred)
        report.abs_rel = abs_rel(pred, gt, mask)

    print(report.summary_text())
    if args.out:
        Path(args.out).write_text(json.dumps(report.summary_dict(), indent=2) + "\n")
    return 0


def _cmd_synth(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rig = default_rig()
    save_rig(out_dir / "calibration.json", rig.cameras)
    ego_records = []
    cam_records = []
    for i in range(args.n_frames):
        frame_id = f"{i:06d}"
        spec = SceneSpec(
            rng_seed=args.seed + i,
            n_objects=(args.n_objects_min, args.n_objects_max),
        )
        scene = generate(spec, rig)
        for box in scene.ego_boxes:
            ego_records.append(DetectionRecord("ego3d", frame_id, None, box, box.class_id, box.score))
        for cam_id, view in scene.views.items():
            for box3d, box2d in zip(view.cam_boxes, view.labels_2d):
                cam_records.append(
                    DetectionRecord("cam3d", frame_id, cam_id, box3d, box3d.class_id, box3d.score)
                )
                cam_records.append(
                    DetectionRecord("box2d", frame_id, cam_id, box2d, box3d.class_id, box3d.score)
                )
        if args.write_maps:
            noise = None
            if args.depth_noise > 0.0:
                noise = NoiseSpec(depth_std=args.depth_noise, seed=args.seed + i)
            maps = perfect_predictions(scene, rig, args.downsample, noise=noise)
            for cam_id, m in maps.items():
                m.save(out_dir / f"maps_{frame_id}_{cam_id}.fpnt")
    write_records(out_dir / "gt_ego.jsonl", ego_records)
    write_records(out_dir / "gt_cam.jsonl", cam_records)
    print(f"wrote {args.n_frames} frames to {out_dir}")
    return 0


def _cmd_render_bev(args) -> int:
    records = read_records(args.input)
    boxes = [r.box for r in records if r.kind == "bev" and (args.frame is None or r.frame == args.frame)]
    render_bev(boxes, args.out, px_per_m=args.px_per_m, canvas_m=args.canvas_m)
    print(f"rendered {len(boxes)} boxes to {args.out}")
    return 0


def _cmd_bench(args) -> int:
    if args.coeffs is not None:
        coeffs = DistortionCoeffs(*args.coeffs)
    else:
        from .synth import FIXTURE_COEFFS

        coeffs = FIXTURE_COEFFS
    results = bench_mod.run_inversion_bench(coeffs, n=args.n)
    print(bench_mod.format_results(results, args.n))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fisheyebev",
        description="Fisheye geometry, detection codec, BEV fusion and evaluation tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_calib(p, required=True):
        p.add_argument("--calib", required=required, help="calibration JSON file")
        p.add_argument("--camera", required=required, help="camera id, e.g. front")

    p = sub.add_parser("project", help="project a camera-frame 3D point to pixels")
    add_calib(p)
    p.add_argument("--point", type=float, nargs=3, required=True, metavar=("X", "Y", "Z"))
    p.set_defaults(fn=_cmd_project)

    p = sub.add_parser("unproject", help="recover a 3D point from pixel + depth")
    add_calib(p)
    p.add_argument("--pixel", type=float, nargs=2, required=True, metavar=("U", "V"))
    p.add_argument("--depth", type=float, required=True)
    p.add_argument("--mode", choices=("exact", "lut"), default="exact")
    p.set_defaults(fn=_cmd_unproject)

    p = sub.add_parser("lut", help="build / query the distortion lookup table")
    add_calib(p, required=False)
    p.add_argument("--coeffs", type=float, nargs=4, metavar=("K1", "K2", "K3", "K4"))
    p.add_argument("--n-grids", type=int, default=900)
    p.add_argument("--dump", action="store_true", help="print the full table")
    p.add_argument("--theta-d", type=float, help="invert one distorted angle")
    p.add_argument("--theta", type=float, help="evaluate the forward map")
    p.set_defaults(fn=_cmd_lut)

    p = sub.add_parser("encode", help="encode GT boxes into target maps")
    add_calib(p)
    p.add_argument("--input", required=True, help="interchange file with cam3d + box2d records")
    p.add_argument("--frame", required=True)
    p.add_argument("--downsample", type=int, default=DEFAULT_DOWNSAMPLE, choices=(4, 8))
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_encode)

    p = sub.add_parser("decode", help="decode prediction maps into detections")
    add_calib(p)
    p.add_argument("--maps", required=True, help="tensor container path")
    p.add_argument("--frame", required=True)
    p.add_argument("--mode", choices=("exact", "lut"), default="lut")
    p.add_argument("--top-k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--score-threshold", type=float, default=DEFAULT_SCORE_THRESHOLD)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_decode)

    p = sub.add_parser("fuse", help="fuse per-camera detections into ego BEV")
    p.add_argument("--calib", required=True)
    p.add_argument("--input", required=True, help="interchange file with cam3d records")
    p.add_argument("--iou-threshold", type=float, default=DEFAULT_IOU_THRESHOLD)
    p.add_argument("--center-dist-threshold", type=float, default=DEFAULT_CENTER_DIST_THRESHOLD)
    p.add_argument("--out", required=True, help="output BEV records")
    p.add_argument("--ego-out", help="optional output of fused ego3d records")
    p.set_defaults(fn=_cmd_fuse)

    p = sub.add_parser("eval", help="evaluate detections against ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--det", required=True)
    p.add_argument("--depth-gt", help="tensor container with a depth channel")
    p.add_argument("--depth-pred", help="tensor container with a depth channel")
    p.add_argument("--out", help="write machine-readable summary JSON")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("synth", help="generate synthetic scenes and fixtures")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-frames", type=int, default=1)
    p.add_argument("--n-objects-min", type=int, default=4)
    p.add_argument("--n-objects-max", type=int, default=8)
    p.add_argument("--write-maps", action="store_true")
    p.add_argument("--downsample", type=int, default=DEFAULT_DOWNSAMPLE, choices=(4, 8))
    p.add_argument("--depth-noise", type=float, default=0.0)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("render-bev", help="rasterize BEV records to a PNG")
    p.add_argument("--input", required=True, help="interchange file with bev records")
    p.add_argument("--frame", help="restrict to one frame id")
    p.add_argument("--out", required=True)
    p.add_argument("--px-per-m", type=float, default=DEFAULT_PX_PER_M)
    p.add_argument("--canvas-m", type=float, default=DEFAULT_CANVAS_M)
    p.set_defaults(fn=_cmd_render_bev)

    p = sub.add_parser("bench", help="time exact vs LUT angle inversion")
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--coeffs", type=float, nargs=4, metavar=("K1", "K2", "K3", "K4"))
    p.set_defaults(fn=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except FisheyeBevError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
