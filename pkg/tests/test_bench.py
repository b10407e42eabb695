import json

import numpy as np
import pytest

from freqfuse.bench import bench_lowpass, bench_spectra, format_table, results_to_json
from freqfuse.lowpass import box_lowpass, gradient_lowpass
from freqfuse.transform import Spectrum


def test_smoke_8x8():
    results = bench_lowpass([(8, 8)], iterations=10, seed=0)
    assert [r.strategy for r in results] == ["box", "gradient"]
    for r in results:
        assert r.iterations == 10 and 0 < r.median_s <= r.p90_s


def test_requires_ten_iterations():
    with pytest.raises(ValueError):
        bench_lowpass([(8, 8)], iterations=9)


def test_gradient_slower_at_256():
    for _ in range(2):
        by = {r.strategy: r for r in bench_lowpass([(256, 256)], iterations=10, seed=0)}
        assert by["gradient"].median_s > by["box"].median_s


def test_json_and_table():
    results = bench_lowpass([(16, 8)], iterations=10)
    rows = json.loads(results_to_json(results))["results"]
    assert set(rows[0]) >= {"strategy", "dims", "median_s", "p90_s"}
    assert rows[0]["dims"] == "16x8"
    assert "gradient" in format_table(results)


def test_bench_outputs_match_direct_calls():
    dims = [(32, 32), (20, 12)]
    outputs = {}
    bench_lowpass(dims, iterations=10, seed=3, outputs=outputs)
    for d, s in zip(dims, bench_spectra(dims, seed=3)):
        assert np.array_equal(outputs[("box", d)].coeffs, box_lowpass(s, 0.15).coeffs)
        assert np.array_equal(outputs[("gradient", d)].coeffs, gradient_lowpass(s, 2.0).coeffs)
