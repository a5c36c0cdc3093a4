"""Detection metrics: IoU functions, 40-point average precision, recall,
and the absolute relative depth error.

Matching is score-greedy with one-to-one GT assignment, pooled across
frames per class. AP follows the 40-point interpolation convention
(recall levels 1/40 .. 40/40, interpolated precision = max precision at
recall >= level).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .boxes import CLASS_NAMES, BevBox, Box2D, Box3D
from .errors import DomainError

DEGENERATE_AREA = 1e-12


@dataclass(frozen=True)
class MatchConfig:
    """Matching thresholds and the recall discretization."""

    iou_threshold_2d: float = 0.7
    iou_threshold_3d: float = 0.5
    n_recall_points: int = 40
    per_class: bool = True

    def __post_init__(self):
        for t in (self.iou_threshold_2d, self.iou_threshold_3d):
            if not (0.0 < t <= 1.0):
                raise DomainError("IoU thresholds must lie in (0, 1]")
        if self.n_recall_points < 1:
            raise DomainError("n_recall_points must be at least 1")


def iou_2d(a: Box2D, b: Box2D) -> float:
    """Axis-aligned intersection over union."""
    ax0, ay0, ax1, ay1 = a.bounds
    bx0, by0, bx1, by1 = b.bounds
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = a.width * a.height + b.width * b.height - inter
    return inter / union


def clip_polygon(subject: np.ndarray, clipper: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clipping of a polygon by a convex clipper.

    Both polygons are (N, 2) arrays with counter-clockwise winding.
    Returns the clipped polygon (possibly empty).
    """
    output = [tuple(p) for p in subject]
    n = len(clipper)
    for i in range(n):
        if not output:
            break
        cp1 = clipper[i]
        cp2 = clipper[(i + 1) % n]
        edge = (cp2[0] - cp1[0], cp2[1] - cp1[1])

        def inside(p):
            return edge[0] * (p[1] - cp1[1]) - edge[1] * (p[0] - cp1[0]) >= 0.0

        def intersect(p, q):
            dp = (q[0] - p[0], q[1] - p[1])
            denom = edge[0] * dp[1] - edge[1] * dp[0]
            num = edge[1] * (p[0] - cp1[0]) - edge[0] * (p[1] - cp1[1])
            t = num / denom
            return (p[0] + t * dp[0], p[1] + t * dp[1])

        polygon, output = output, []
        for j, cur in enumerate(polygon):
            prev = polygon[j - 1]
            if inside(cur):
                if not inside(prev):
                    output.append(intersect(prev, cur))
                output.append(cur)
            elif inside(prev):
                output.append(intersect(prev, cur))
    return np.array(output) if output else np.empty((0, 2))


def polygon_area(poly: np.ndarray) -> float:
    """Shoelace area of a simple polygon with CCW winding."""
    if len(poly) < 3:
        return 0.0
    x = poly[:, 0]
    y = poly[:, 1]
    return 0.5 * float(np.abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def iou_bev(a: BevBox, b: BevBox) -> float:
    """Rotated-rectangle IoU via convex polygon clipping."""
    area_a = a.l * a.w
    area_b = b.l * b.w
    if area_a < DEGENERATE_AREA or area_b < DEGENERATE_AREA:
        return 0.0
    inter = polygon_area(clip_polygon(a.corners(), b.corners()))
    union = area_a + area_b - inter
    if union < DEGENERATE_AREA:
        return 0.0
    return min(1.0, inter / union)


def iou_bev_monte_carlo(a: BevBox, b: BevBox, n_samples: int = 1_000_000, seed: int = 0) -> float:
    """Point-sampling estimate of the rotated IoU; the oracle for iou_bev."""
    rng = np.random.default_rng(seed)
    ca = a.corners()
    cb = b.corners()
    lo = np.minimum(ca.min(axis=0), cb.min(axis=0))
    hi = np.maximum(ca.max(axis=0), cb.max(axis=0))
    pts = rng.uniform(lo, hi, size=(n_samples, 2))

    def inside(box: BevBox, p: np.ndarray) -> np.ndarray:
        rel = p - np.array([box.x, box.y])
        c, s = math.cos(box.yaw), math.sin(box.yaw)
        local_x = rel[:, 0] * c + rel[:, 1] * s
        local_y = -rel[:, 0] * s + rel[:, 1] * c
        return (np.abs(local_x) <= box.l / 2.0) & (np.abs(local_y) <= box.w / 2.0)

    in_a = inside(a, pts)
    in_b = inside(b, pts)
    inter = in_a & in_b
    union = in_a | in_b
    n_union = int(np.count_nonzero(union))
    if n_union == 0:
        return 0.0
    return int(np.count_nonzero(inter)) / n_union


def iou_3d(a: Box3D, b: Box3D) -> float:
    """Volumetric IoU: BEV footprint intersection times vertical overlap."""
    if a.frame != "ego" or b.frame != "ego":
        raise DomainError("iou_3d expects ego-frame boxes")
    fa = BevBox(a.x, a.y, a.l, a.w, a.yaw, a.class_id)
    fb = BevBox(b.x, b.y, b.l, b.w, b.yaw, b.class_id)
    footprint = polygon_area(clip_polygon(fa.corners(), fb.corners()))
    za0, za1 = a.z - a.h / 2.0, a.z + a.h / 2.0
    zb0, zb1 = b.z - b.h / 2.0, b.z + b.h / 2.0
    dz = min(za1, zb1) - max(za0, zb0)
    if dz <= 0.0 or footprint < DEGENERATE_AREA:
        return 0.0
    inter = footprint * dz
    union = a.l * a.w * a.h + b.l * b.w * b.h - inter
    return min(1.0, inter / union)


@dataclass
class ClassResult:
    """Per-class outcome; ap/ar are None when the class has no ground truth."""

    ap: float | None
    ar: float | None
    n_gt: int
    tp: int
    fp: int

    @property
    def fn(self) -> int:
        return self.n_gt - self.tp


def _greedy_match(detections, gts, iou_fn, iou_threshold):
    """Score-descending greedy matching; each GT matches at most once.

    detections: list of (frame_id, score, obj); gts: list of (frame_id, obj).
    Returns a boolean TP flag per detection in score order, plus the order.
    """
    order = sorted(range(len(detections)), key=lambda i: -detections[i][1])
    gt_by_frame = defaultdict(list)
    for gi, (frame_id, obj) in enumerate(gts):
        gt_by_frame[frame_id].append((gi, obj))
    matched = set()
    tp_flags = []
    for i in order:
        frame_id, _, obj = detections[i]
        best_iou = 0.0
        best_gi = None
        for gi, gt_obj in gt_by_frame.get(frame_id, ()):
            if gi in matched:
                continue
            iou = iou_fn(obj, gt_obj)
            if iou > best_iou:
                best_iou = iou
                best_gi = gi
        if best_gi is not None and best_iou >= iou_threshold:
            matched.add(best_gi)
            tp_flags.append(True)
        else:
            tp_flags.append(False)
    return tp_flags, order


def average_precision(detections, gts, iou_fn, iou_threshold: float, n_recall_points: int = 40) -> ClassResult:
    """40-point interpolated AP (in percent) plus final recall (AR).

    detections: (frame_id, score, obj) triples; gts: (frame_id, obj) pairs.
    With no GT the metric is undefined and reported as None.
    """
    n_gt = len(gts)
    if n_gt == 0:
        return ClassResult(ap=None, ar=None, n_gt=0, tp=0, fp=len(detections))
    if not detections:
        return ClassResult(ap=0.0, ar=0.0, n_gt=n_gt, tp=0, fp=0)
    tp_flags, _ = _greedy_match(detections, gts, iou_fn, iou_threshold)
    tp_cum = np.cumsum(tp_flags)
    fp_cum = np.cumsum([not f for f in tp_flags])
    recalls = tp_cum / n_gt
    precisions = tp_cum / (tp_cum + fp_cum)
    levels = (np.arange(n_recall_points) + 1) / n_recall_points
    interp = np.zeros(n_recall_points)
    for k, level in enumerate(levels):
        at_level = precisions[recalls >= level - 1e-12]
        interp[k] = at_level.max() if at_level.size else 0.0
    ap = float(interp.mean() * 100.0)
    ar = float(recalls[-1] * 100.0)
    return ClassResult(
        ap=ap,
        ar=ar,
        n_gt=n_gt,
        tp=int(tp_cum[-1]),
        fp=int(fp_cum[-1]),
    )


def abs_rel(pred_depth, gt_depth, valid_mask) -> float:
    """Mean |pred - gt| / gt over valid cells; gt must be positive there."""
    pred = np.asarray(pred_depth, dtype=np.float64)
    gt = np.asarray(gt_depth, dtype=np.float64)
    mask = np.asarray(valid_mask, dtype=bool)
    if pred.shape != gt.shape or gt.shape != mask.shape:
        raise DomainError("depth map shapes must match")
    if not mask.any():
        raise DomainError("empty validity mask")
    g = gt[mask]
    if np.any(g <= 0.0):
        raise DomainError("ground-truth depth must be positive on the mask")
    return float((np.abs(pred[mask] - g) / g).mean())


@dataclass
class EvalReport:
    """Aggregated metrics with per-class breakdown (values in percent)."""

    per_class_2d: dict[str, ClassResult] = field(default_factory=dict)
    per_class_3d: dict[str, ClassResult] = field(default_factory=dict)
    per_class_bev: dict[str, ClassResult] = field(default_factory=dict)
    abs_rel: float | None = None

    @staticmethod
    def _mean(results: dict[str, ClassResult], attr: str) -> float | None:
        values = [getattr(r, attr) for r in results.values() if getattr(r, attr) is not None]
        if not values:
            return None
        return float(np.mean(values))

    @property
    def ap_2d(self) -> float | None:
        return self._mean(self.per_class_2d, "ap")

    @property
    def ar_2d(self) -> float | None:
        return self._mean(self.per_class_2d, "ar")

    @property
    def ap_3d(self) -> float | None:
        return self._mean(self.per_class_3d, "ap")

    @property
    def ap_bev(self) -> float | None:
        return self._mean(self.per_class_bev, "ap")

    def summary_dict(self) -> dict:
        def fmt(results):
            return {
                name: {"ap": r.ap, "ar": r.ar, "n_gt": r.n_gt, "tp": r.tp, "fp": r.fp, "fn": r.fn}
                for name, r in results.items()
            }

        return {
            "ap_2d": self.ap_2d,
            "ar_2d": self.ar_2d,
            "ap_3d": self.ap_3d,
            "ap_bev": self.ap_bev,
            "abs_rel": self.abs_rel,
            "classes_2d": fmt(self.per_class_2d),
            "classes_3d": fmt(self.per_class_3d),
            "classes_bev": fmt(self.per_class_bev),
        }

    def summary_text(self) -> str:
        def show(v):
            return "absent" if v is None else f"{v:.2f}"

        lines = [
            f"AP_2D  {show(self.ap_2d)}",
            f"AR_2D  {show(self.ar_2d)}",
            f"AP_3D  {show(self.ap_3d)}",
            f"AP_BEV {show(self.ap_bev)}",
            f"abs_rel {'absent' if self.abs_rel is None else f'{self.abs_rel:.4f}'}",
        ]
        return "\n".join(lines)


def _split_by_class(items, class_of):
    by_class = defaultdict(list)
    for item in items:
        by_class[class_of(item)].append(item)
    return by_class


def evaluate_class_agnostic(detections, gts, iou_fn, iou_threshold, n_recall_points=40) -> ClassResult:
    """Single AP over all classes with class-blind matching."""
    return average_precision(detections, gts, iou_fn, iou_threshold, n_recall_points)


def evaluate_detections(
    detections,
    gts,
    iou_fn,
    iou_threshold: float,
    config: MatchConfig | None = None,
) -> dict[str, ClassResult]:
    """Class-wise evaluation.

    detections: (frame_id, class_id, score, obj); gts: (frame_id, class_id, obj).
    Returns a result for every class that appears in either list.
    """
    config = config or MatchConfig()
    det_by_class = _split_by_class(detections, lambda d: d[1])
    gt_by_class = _split_by_class(gts, lambda g: g[1])
    results = {}
    for class_id in sorted(set(det_by_class) | set(gt_by_class)):
        dets = [(d[0], d[2], d[3]) for d in det_by_class.get(class_id, [])]
        gt_list = [(g[0], g[2]) for g in gt_by_class.get(class_id, [])]
        results[CLASS_NAMES[class_id]] = average_precision(
            dets, gt_list, iou_fn, iou_threshold, config.n_recall_points
        )
    return results
