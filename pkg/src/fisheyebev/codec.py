"""Encoding of ground truth into center-keypoint target maps, and the
inverse post-processing that turns predicted maps into scored boxes.

The keypoint is the projected 3D box center. Its sub-cell position is
carried by the Gaussian splat itself: the splat is centered at the
continuous grid position and normalized so the nearest cell holds exactly
1.0, which lets the decoder recover the continuous peak by log-parabola
interpolation over the peak's 4-neighborhood. No extra channel is spent
on quantization residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boxes import N_CLASSES, Box2D, Box3D
from .errors import DomainError, FisheyeBevError, FormatError
from .geometry import CameraModel, project, unproject
from .multibin import MultiBinCodec, multibin_decode, multibin_encode
from . import tensorio

DEFAULT_DOWNSAMPLE = 8
DEFAULT_TOP_K = 100
DEFAULT_SCORE_THRESHOLD = 0.1
MIN_OVERLAP = 0.7


@dataclass
class TargetMaps:
    """Per-camera encoded grids; channel meanings follow the detection head.

    heatmap: (n_classes, H, W); offset_2d/size_2d: (2, H, W);
    size_3d: (3, H, W) as (w, h, l); bin_logits/bin_residual: (n_bins, H, W);
    depth, sigma, valid_mask: (H, W). Arrays are float64 in memory and
    serialized as float32 planes.
    """

    heatmap: np.ndarray
    offset_2d: np.ndarray
    size_2d: np.ndarray
    size_3d: np.ndarray
    depth: np.ndarray
    sigma: np.ndarray
    bin_logits: np.ndarray
    bin_residual: np.ndarray
    valid_mask: np.ndarray
    downsample: int
    image_width: int
    image_height: int

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.heatmap.shape[1], self.heatmap.shape[2]

    @property
    def n_classes(self) -> int:
        return self.heatmap.shape[0]

    @property
    def n_bins(self) -> int:
        return self.bin_logits.shape[0]

    @classmethod
    def zeros(
        cls,
        grid_h: int,
        grid_w: int,
        downsample: int,
        image_width: int,
        image_height: int,
        n_classes: int = N_CLASSES,
        n_bins: int = 2,
    ) -> "TargetMaps":
        z = lambda *shape: np.zeros(shape, dtype=np.float64)
        return cls(
            heatmap=z(n_classes, grid_h, grid_w),
            offset_2d=z(2, grid_h, grid_w),
            size_2d=z(2, grid_h, grid_w),
            size_3d=z(3, grid_h, grid_w),
            depth=z(grid_h, grid_w),
            sigma=z(grid_h, grid_w),
            bin_logits=z(n_bins, grid_h, grid_w),
            bin_residual=z(n_bins, grid_h, grid_w),
            valid_mask=z(grid_h, grid_w),
            downsample=downsample,
            image_width=image_width,
            image_height=image_height,
        )

    def channels(self) -> dict[str, np.ndarray]:
        return {
            "heatmap": self.heatmap,
            "offset_2d": self.offset_2d,
            "size_2d": self.size_2d,
            "size_3d": self.size_3d,
            "depth": self.depth,
            "sigma": self.sigma,
            "bin_logits": self.bin_logits,
            "bin_residual": self.bin_residual,
            "valid_mask": self.valid_mask,
        }

    def meta(self) -> dict:
        return {
            "downsample": self.downsample,
            "image_width": self.image_width,
            "image_height": self.image_height,
        }

    def save(self, path):
        tensorio.write_tensor_container(path, self.channels(), self.meta())

    @classmethod
    def load(cls, path) -> "TargetMaps":
        channels, meta = tensorio.read_tensor_container(path)
        required = (
            "heatmap",
            "offset_2d",
            "size_2d",
            "size_3d",
            "depth",
            "sigma",
            "bin_logits",
            "bin_residual",
            "valid_mask",
        )
        missing = [k for k in required if k not in channels]
        if missing:
            raise FormatError(f"tensor container missing channels: {missing}")
        kwargs = {k: channels[k].astype(np.float64) for k in required}
        try:
            return cls(
                downsample=int(meta["downsample"]),
                image_width=int(meta["image_width"]),
                image_height=int(meta["image_height"]),
                **kwargs,
            )
        except KeyError as exc:
            raise FormatError(f"tensor container missing meta field: {exc}") from exc


def gaussian_radius(det_size: tuple[float, float], min_overlap: float = MIN_OVERLAP) -> float:
    """Splat radius guaranteeing IoU >= min_overlap under corner jitter."""
    height, width = det_size
    a1 = 1.0
    b1 = height + width
    c1 = width * height * (1.0 - min_overlap) / (1.0 + min_overlap)
    r1 = (b1 + math.sqrt(b1 * b1 - 4.0 * a1 * c1)) / 2.0

    a2 = 4.0
    b2 = 2.0 * (height + width)
    c2 = (1.0 - min_overlap) * width * height
    r2 = (b2 + math.sqrt(b2 * b2 - 4.0 * a2 * c2)) / 2.0

    a3 = 4.0 * min_overlap
    b3 = -2.0 * min_overlap * (height + width)
    c3 = (min_overlap - 1.0) * width * height
    r3 = (b3 + math.sqrt(b3 * b3 - 4.0 * a3 * c3)) / 2.0
    return min(r1, r2, r3)


def _splat_gaussian(channel: np.ndarray, gu: float, gv: float, radius: int):
    """Max-combine a normalized Gaussian centered at the continuous grid
    position (gu, gv); the nearest cell receives exactly 1.0."""
    grid_h, grid_w = channel.shape
    cx = int(math.floor(gu + 0.5))
    cy = int(math.floor(gv + 0.5))
    sigma = (2.0 * radius + 1.0) / 6.0
    x0, x1 = max(0, cx - radius), min(grid_w - 1, cx + radius)
    y0, y1 = max(0, cy - radius), min(grid_h - 1, cy + radius)
    xs = np.arange(x0, x1 + 1)
    ys = np.arange(y0, y1 + 1)
    d2 = (xs[None, :] - gu) ** 2 + (ys[:, None] - gv) ** 2
    peak_d2 = (cx - gu) ** 2 + (cy - gv) ** 2
    patch = np.exp(-(d2 - peak_d2) / (2.0 * sigma * sigma))
    region = channel[y0 : y1 + 1, x0 : x1 + 1]
    np.maximum(region, patch, out=region)
    channel[cy, cx] = 1.0


def encode_scene(
    boxes3d: list[Box3D],
    boxes2d: list[Box2D],
    camera: CameraModel,
    downsample: int = DEFAULT_DOWNSAMPLE,
    codec: MultiBinCodec | None = None,
) -> tuple[TargetMaps, list[int]]:
    """Encode camera-frame boxes into target maps.

    boxes2d pairs with boxes3d by index. Boxes that do not land inside the
    usable grid (behind the camera, beyond the FoV, or whose peak cell
    touches the grid border where sub-cell recovery is impossible) are
    skipped; their indices are returned alongside the maps.
    """
    if len(boxes3d) != len(boxes2d):
        raise DomainError("boxes3d and boxes2d must pair by index")
    codec = codec or MultiBinCodec()
    grid_w = camera.image_width // downsample
    grid_h = camera.image_height // downsample
    maps = TargetMaps.zeros(
        grid_h,
        grid_w,
        downsample,
        camera.image_width,
        camera.image_height,
        n_bins=codec.n_bins,
    )
    skipped: list[int] = []
    for i, (box, box2d) in enumerate(zip(boxes3d, boxes2d)):
        if box.frame != "cam":
            raise DomainError("encode_scene expects camera-frame boxes")
        try:
            u, v = project(box.center, camera)
        except FisheyeBevError:
            skipped.append(i)
            continue
        gu = u / downsample - 0.5
        gv = v / downsample - 0.5
        cx = int(math.floor(gu + 0.5))
        cy = int(math.floor(gv + 0.5))
        # interior cells only: the decoder needs both lateral neighbors
        if not (1 <= cx <= grid_w - 2 and 1 <= cy <= grid_h - 2):
            skipped.append(i)
            continue
        if maps.valid_mask[cy, cx]:
            skipped.append(i)
            continue
        radius = max(1, int(gaussian_radius((box2d.height / downsample, box2d.width / downsample))))
        _splat_gaussian(maps.heatmap[box.class_id], gu, gv, radius)
        maps.offset_2d[0, cy, cx] = (box2d.u - u) / downsample
        maps.offset_2d[1, cy, cx] = (box2d.v - v) / downsample
        maps.size_2d[0, cy, cx] = box2d.width
        maps.size_2d[1, cy, cx] = box2d.height
        maps.size_3d[:, cy, cx] = (box.w, box.h, box.l)
        maps.depth[cy, cx] = box.z
        maps.sigma[cy, cx] = box.sigma
        bin_idx, residual = multibin_encode(box.yaw, codec)
        maps.bin_logits[bin_idx, cy, cx] = 1.0
        maps.bin_residual[bin_idx, cy, cx] = residual
        maps.valid_mask[cy, cx] = 1.0
    return maps, skipped


def _local_maxima(channel: np.ndarray) -> np.ndarray:
    """Cells that are >= all 8 neighbors (3x3 suppression)."""
    padded = np.pad(channel, 1, constant_values=-np.inf)
    stacks = [
        padded[1 + dy : 1 + dy + channel.shape[0], 1 + dx : 1 + dx + channel.shape[1]]
        for dy in (-1, 0, 1)
        for dx in (-1, 0, 1)
    ]
    return channel >= np.max(stacks, axis=0)


def _refine_axis(left: float, center: float, right: float) -> float:
    """Sub-cell offset of a log-parabola vertex fitted at -1, 0, +1.

    Exact for a Gaussian splat; falls back to 0 when the neighborhood is
    not usable (zeros or a non-concave fit)."""
    if left <= 0.0 or right <= 0.0 or center <= 0.0:
        return 0.0
    ll, lc, lr = math.log(left), math.log(center), math.log(right)
    denom = ll + lr - 2.0 * lc
    if denom >= -1e-12:
        return 0.0
    delta = 0.5 * (ll - lr) / denom
    return min(0.5, max(-0.5, delta))


@dataclass
class DecodeDiagnostics:
    """Counts of peaks dropped during decoding, by reason."""

    out_of_range: int = 0
    bad_depth: int = 0
    bad_dims: int = 0


def decode(
    maps: TargetMaps,
    camera: CameraModel,
    top_k: int = DEFAULT_TOP_K,
    score_threshold: float = DEFAULT_SCORE_THRESHOLD,
    mode: str = "lut",
    codec: MultiBinCodec | None = None,
    diagnostics: DecodeDiagnostics | None = None,
) -> list[tuple[Box3D, Box2D]]:
    """Turn predicted maps into scored camera-frame detections.

    Peaks are 3x3 local maxima per class, refined to sub-cell precision,
    scored as peak * exp(-sigma), filtered by score, and capped at top_k
    per class. Peaks whose pixel cannot be unprojected are dropped and
    counted in the diagnostics.
    """
    codec = codec or MultiBinCodec(maps.n_bins)
    ds = maps.downsample
    results: list[tuple[float, Box3D, Box2D]] = []
    diag = diagnostics if diagnostics is not None else DecodeDiagnostics()
    for class_id in range(maps.n_classes):
        channel = maps.heatmap[class_id]
        peak_mask = _local_maxima(channel) & (channel > 0.0)
        ys, xs = np.nonzero(peak_mask)
        order = np.argsort(channel[ys, xs])[::-1]
        kept = 0
        for j in order:
            if kept >= top_k:
                break
            cy, cx = int(ys[j]), int(xs[j])
            peak = float(channel[cy, cx])
            sigma = float(maps.sigma[cy, cx])
            score = peak * math.exp(-sigma)
            if score < score_threshold:
                continue
            dx = dy = 0.0
            if 1 <= cx <= channel.shape[1] - 2:
                dx = _refine_axis(channel[cy, cx - 1], peak, channel[cy, cx + 1])
            if 1 <= cy <= channel.shape[0] - 2:
                dy = _refine_axis(channel[cy - 1, cx], peak, channel[cy + 1, cx])
            u = (cx + dx + 0.5) * ds
            v = (cy + dy + 0.5) * ds
            depth = float(maps.depth[cy, cx])
            if depth <= 0.0:
                diag.bad_depth += 1
                continue
            w, h, l = (float(s) for s in maps.size_3d[:, cy, cx])
            if min(w, h, l) <= 0.0:
                diag.bad_dims += 1
                continue
            try:
                center = unproject((u, v), depth, camera, mode=mode)
            except FisheyeBevError:
                diag.out_of_range += 1
                continue
            bin_idx = int(np.argmax(maps.bin_logits[:, cy, cx]))
            yaw = multibin_decode(bin_idx, float(maps.bin_residual[bin_idx, cy, cx]), codec)
            box3d = Box3D(
                x=float(center[0]),
                y=float(center[1]),
                z=float(center[2]),
                w=w,
                h=h,
                l=l,
                yaw=yaw,
                class_id=class_id,
                score=min(1.0, max(0.0, score)),
                sigma=max(0.0, sigma),
                frame="cam",
            )
            u2d = u + float(maps.offset_2d[0, cy, cx]) * ds
            v2d = v + float(maps.offset_2d[1, cy, cx]) * ds
            w2d = max(1e-6, float(maps.size_2d[0, cy, cx]))
            h2d = max(1e-6, float(maps.size_2d[1, cy, cx]))
            box2d = Box2D(u=u2d, v=v2d, width=w2d, height=h2d)
            results.append((score, box3d, box2d))
            kept += 1
    results.sort(key=lambda t: -t[0])
    return [(b3, b2) for _, b3, b2 in results]
