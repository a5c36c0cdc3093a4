"""Training-loss formulas for the detection head outputs.

All functions are pure reductions over numpy arrays; there is no autograd
here. Empty masks reduce to 0 by definition so callers can sum terms
without special cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

HEATMAP_EPS = 1e-7
FOCAL_GAMMA = 2.0
FOCAL_BETA = 4.0


def focal_loss(
    heatmap,
    heatmap_star,
    gamma: float = FOCAL_GAMMA,
    beta: float = FOCAL_BETA,
) -> float:
    """Penalty-reduced focal loss over a keypoint heatmap.

    Positive cells are those where the target equals 1 exactly; all other
    cells are negatives weighted by (1 - target)^beta. Normalized by the
    number of positives; defined as 0 when there are none. Predictions
    are clamped to (eps, 1 - eps) before the logs.
    """
    h = np.asarray(heatmap, dtype=np.float64)
    hs = np.asarray(heatmap_star, dtype=np.float64)
    if h.shape != hs.shape:
        raise DomainError("heatmap shapes must match")
    h = np.clip(h, HEATMAP_EPS, 1.0 - HEATMAP_EPS)
    pos = hs == 1.0
    n = int(np.count_nonzero(pos))
    if n == 0:
        return 0.0
    pos_term = np.where(pos, (1.0 - h) ** gamma * np.log(h), 0.0)
    neg_term = np.where(pos, 0.0, (1.0 - hs) ** beta * h**gamma * np.log(1.0 - h))
    return float(-(pos_term.sum() + neg_term.sum()) / n)


def l1_loss(values, targets, mask, weight: float = 1.0) -> float:
    """weight * mean absolute error over masked cells.

    For multi-channel maps the mask applies to the trailing spatial axes
    and the mean runs over channels as well.
    """
    s = np.asarray(values, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if s.shape != t.shape:
        raise DomainError("value/target shapes must match")
    m = np.asarray(mask, dtype=bool)
    m = np.broadcast_to(m, s.shape)
    if not m.any():
        return 0.0
    return float(weight * np.abs(s - t)[m].mean())


def laplacian_uncertainty_loss(depth, log_sigma, depth_star, mask) -> float:
    """Depth regression under a Laplace noise model with learned scale.

    mean over masked cells of sqrt(2) |d - d*| / sigma + log sigma, with
    sigma = exp(log_sigma) so the scale is positive by construction.
    """
    d = np.asarray(depth, dtype=np.float64)
    ls = np.asarray(log_sigma, dtype=np.float64)
    ds = np.asarray(depth_star, dtype=np.float64)
    if d.shape != ds.shape or d.shape != ls.shape:
        raise DomainError("depth/log_sigma/target shapes must match")
    m = np.asarray(mask, dtype=bool)
    if not m.any():
        return 0.0
    sigma = np.exp(ls[m])
    return float((math.sqrt(2.0) * np.abs(d[m] - ds[m]) / sigma + ls[m]).mean())


def bin_ce_loss(bin_logits, bin_index_star, mask) -> float:
    """Mean softmax cross-entropy of the heading-bin classification.

    bin_logits: (n_bins, H, W); bin_index_star: (H, W) integer targets.
    """
    logits = np.asarray(bin_logits, dtype=np.float64)
    idx = np.asarray(bin_index_star, dtype=np.int64)
    m = np.asarray(mask, dtype=bool)
    if logits.shape[1:] != idx.shape or idx.shape != m.shape:
        raise DomainError("logit/target/mask shapes must match")
    if not m.any():
        return 0.0
    sel = logits[:, m]  # (n_bins, M)
    tgt = idx[m]
    shifted = sel - sel.max(axis=0, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=0))
    log_p = shifted[tgt, np.arange(sel.shape[1])] - log_z
    return float(-log_p.mean())


@dataclass(frozen=True)
class LossWeights:
    """Per-task weights; the formulas leave them as free configuration."""

    focal: float = 1.0
    offset: float = 1.0
    size_2d: float = 1.0
    size_3d: float = 1.0
    depth: float = 1.0
    bin_ce: float = 1.0
    residual: float = 1.0


@dataclass(frozen=True)
class LossBreakdown:
    """Individual loss terms plus their weighted total."""

    focal: float
    offset_l1: float
    size2d_l1: float
    size3d_l1: float
    depth_uncertainty: float
    bin_ce: float
    residual_l1: float
    total: float
