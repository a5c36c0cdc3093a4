"""Backend selection for the angle-distortion kernels.

Prefers the compiled extension; falls back to the numpy implementation
when the build is unavailable. ``get_backend()`` reports which one won.
"""

from . import _kernels_py

try:
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    _impl = _kernels_py
    BACKEND = "python"

distort_angles = _impl.distort_angles
invert_distortion_bisect = _impl.invert_distortion_bisect
table_lookup = _impl.table_lookup


def get_backend() -> str:
    return BACKEND
