"""Wall-clock comparison of the box and gradient low-pass filters.

Single-threaded and not thread-safe: run one benchmark per process.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from .lowpass import Strategy, box_lowpass, gradient_lowpass
from .transform import Spectrum

__all__ = ["BenchResult", "bench_lowpass", "bench_spectra", "format_table", "results_to_json",
           "DEFAULT_DIMS"]

DEFAULT_DIMS = ((84, 84), (256, 256))
MIN_ITERATIONS = 10


@dataclass(frozen=True)
class BenchResult:
    strategy: str
    height: int
    width: int
    iterations: int
    median_s: float
    p90_s: float

    @property
    def dims(self) -> str:
        return f"{self.height}x{self.width}"


def _time_calls(fn, iterations: int, warmup: int):
    for _ in range(warmup):
        fn()
    samples = np.empty(iterations)
    out = None
    for i in range(iterations):
        t0 = time.perf_counter()
        out = fn()
        samples[i] = time.perf_counter() - t0
    return samples, out


def bench_spectra(dims, seed: int = 0) -> list[Spectrum]:
    """The random spectra :func:`bench_lowpass` times, one per size."""
    rng = np.random.default_rng(seed)
    return [Spectrum(rng.standard_normal((h, w))) for h, w in dims]


def bench_lowpass(dims=DEFAULT_DIMS, iterations: int = 20, seed: int = 0,
                  r: float = 0.15, k: float = 2.0, warmup: int = 3,
                  outputs: dict | None = None) -> list[BenchResult]:
    """Time both strategies on the same random spectrum for every size in ``dims``.

    If ``outputs`` is given, the last spectrum each timed call returned is
    stored there under ``(strategy, (h, w))``.
    """
    if iterations < MIN_ITERATIONS:
        raise ValueError(f"need at least {MIN_ITERATIONS} iterations, got {iterations}")
    dims = [tuple(d) for d in dims]
    results = []
    for (h, w), spectrum in zip(dims, bench_spectra(dims, seed)):
        calls = {
            Strategy.BOX: lambda: box_lowpass(spectrum, r),
            Strategy.GRADIENT: lambda: gradient_lowpass(spectrum, k),
        }
        for strategy, fn in calls.items():
            samples, out = _time_calls(fn, iterations, warmup)
            if outputs is not None:
                outputs[(strategy.value, (h, w))] = out
            median, p90 = np.percentile(samples, [50, 90])
            results.append(BenchResult(strategy.value, h, w, iterations,
                                       float(median), float(p90)))
    return results


def results_to_json(results) -> str:
    rows = [{**asdict(r), "dims": r.dims} for r in results]
    return json.dumps({"results": rows}, indent=2)


def format_table(results) -> str:
    lines = [f"{'strategy':<10} {'dims':>9} {'iters':>6} {'median':>12} {'p90':>12}"]
    for r in results:
        lines.append(f"{r.strategy:<10} {r.dims:>9} {r.iterations:>6} "
                     f"{r.median_s * 1e6:>9.1f} us {r.p90_s * 1e6:>9.1f} us")
    return "\n".join(lines)
