"""Rasterize ego-frame BEV boxes to an image file.

Canvas is ego-centric: ego x (forward) points up, ego y (left) points
left, fixed meters-per-pixel scale. Boxes draw as red rectangles with the
heading edge highlighted in blue.
"""

from __future__ import annotations

import numpy as np
from PIL import Image, ImageDraw

from .boxes import BevBox

DEFAULT_PX_PER_M = 50.0
DEFAULT_CANVAS_M = 30.0


def render_bev(
    boxes: list[BevBox],
    path,
    px_per_m: float = DEFAULT_PX_PER_M,
    canvas_m: float = DEFAULT_CANVAS_M,
):
    """Write a PNG of the BEV scene centered on the ego origin."""
    size = int(round(canvas_m * px_per_m))
    img = Image.new("RGB", (size, size), (255, 255, 255))
    draw = ImageDraw.Draw(img)

    def to_px(x: float, y: float) -> tuple[float, float]:
        # ego x up, ego y left
        return (size / 2.0 - y * px_per_m, size / 2.0 - x * px_per_m)

    # ego marker
    cx, cy = to_px(0.0, 0.0)
    draw.ellipse([cx - 4, cy - 4, cx + 4, cy + 4], fill=(0, 0, 0))

    for box in boxes:
        corners = box.corners()
        pts = [to_px(float(px), float(py)) for px, py in corners]
        draw.polygon(pts, outline=(255, 0, 0))
        # heading edge: corners 0 and 3 lie at +l/2 along the heading
        draw.line([pts[3], pts[0]], fill=(0, 0, 255), width=3)
    img.save(path, format="PNG")
    return np.asarray(img)
