"""Heading-angle codec: discrete bins over (-pi, pi] plus an in-bin residual."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boxes import wrap_angle
from .errors import DomainError

DEFAULT_N_BINS = 2


@dataclass(frozen=True)
class MultiBinCodec:
    """Uniform partition of (-pi, pi] into n_bins heading bins."""

    n_bins: int = DEFAULT_N_BINS
    bin_centers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_bins < 1:
            raise DomainError("n_bins must be at least 1")
        width = 2.0 * math.pi / self.n_bins
        centers = -math.pi + (np.arange(self.n_bins) + 0.5) * width
        object.__setattr__(self, "bin_centers", centers)

    @property
    def bin_width(self) -> float:
        return 2.0 * math.pi / self.n_bins


def multibin_encode(yaw: float, codec: MultiBinCodec) -> tuple[int, float]:
    """Map a heading angle to (bin index, residual from the bin center).

    The residual satisfies |residual| <= pi / n_bins; the upper bound is
    attained only at the wrap point yaw = pi.
    """
    y = wrap_angle(yaw)
    width = codec.bin_width
    idx = min(int((y + math.pi) // width), codec.n_bins - 1)
    residual = y - float(codec.bin_centers[idx])
    return idx, residual


def multibin_decode(bin_index: int, residual: float, codec: MultiBinCodec) -> float:
    """Recover the heading angle, wrapped to (-pi, pi]."""
    if not (0 <= bin_index < codec.n_bins):
        raise DomainError("bin index out of range")
    return wrap_angle(float(codec.bin_centers[bin_index]) + residual)
