"""Microbenchmarks for the angle-inversion hot path.

Times the exact bisection solver against table lookup, per backend
(compiled extension and pure-numpy fallback), over batched calls.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _core
from ._core import _kernels_py
from .distortion import (
    EXACT_SOLVER_TOL,
    HALF_PI,
    DistortionCoeffs,
    build_lut,
    theta_d_max,
)


@dataclass(frozen=True)
class BenchResult:
    backend: str
    exact_ns_per_op: float
    lut_ns_per_op: float

    @property
    def speedup(self) -> float:
        return self.exact_ns_per_op / self.lut_ns_per_op


def _time_call(fn, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run_inversion_bench(
    coeffs: DistortionCoeffs,
    n: int = 1_000_000,
    backends: tuple[str, ...] = ("active", "python"),
    seed: int = 0,
) -> list[BenchResult]:
    """Time n angle inversions in both modes for the requested backends.

    "active" is whichever backend the package selected at import
    (compiled when available); "python" forces the numpy fallback.
    """
    rng = np.random.default_rng(seed)
    table = build_lut(coeffs)
    hi = theta_d_max(coeffs)
    theta_d = np.ascontiguousarray(rng.uniform(0.0, hi, n))
    k = coeffs.as_tuple()

    results = []
    for name in backends:
        if name == "active":
            impl = _core._impl
            label = _core.get_backend()
        elif name == "python":
            impl = _kernels_py
            label = "python"
        else:
            raise ValueError(f"unknown backend {name!r}")
        t_exact = _time_call(
            lambda: impl.invert_distortion_bisect(theta_d, *k, HALF_PI, EXACT_SOLVER_TOL)
        )
        t_lut = _time_call(
            lambda: impl.table_lookup(theta_d, table.theta_d_grid, table.theta_grid)
        )
        results.append(
            BenchResult(
                backend=label,
                exact_ns_per_op=t_exact / n * 1e9,
                lut_ns_per_op=t_lut / n * 1e9,
            )
        )
    return results


def format_results(results: list[BenchResult], n: int) -> str:
    lines = [f"angle inversion, N = {n}"]
    for r in results:
        lines.append(
            f"  [{r.backend}] exact {r.exact_ns_per_op:10.1f} ns/op | "
            f"lut {r.lut_ns_per_op:8.1f} ns/op | speedup {r.speedup:6.1f}x"
        )
    return "\n".join(lines)
