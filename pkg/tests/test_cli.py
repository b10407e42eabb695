import json
import subprocess
import sys

import numpy as np
import pytest

from freqfuse.cli import main
from freqfuse.episodes import Role
from freqfuse.imageio import PixelImage, load_pnm, save_pnm
from freqfuse.specfile import load_spectrum


@pytest.fixture
def gray_file(tmp_path, rng):
    path = tmp_path / "in.pgm"
    save_pnm(PixelImage(rng.integers(0, 256, size=(12, 10), dtype=np.uint8)), path)
    return path


class TestTransform:

    def test_forward_writes_spectrum(self, tmp_path, gray_file):
        out = tmp_path / "s.spec"
        assert main(["transform", str(gray_file), str(out)]) == 0
        assert load_spectrum(out).shape == (12, 10)

    def test_roundtrip_through_files(self, tmp_path, gray_file):
        spec, back = tmp_path / "s.spec", tmp_path / "back.pgm"
        assert main(["transform", str(gray_file), str(spec)]) == 0
        assert main(["transform", "--inverse", str(spec), str(back)]) == 0
        assert load_pnm(back) == load_pnm(gray_file)

    def test_paper_mode_equals_orthonormal_at_8x8(self, tmp_path, rng):
        src = tmp_path / "e.pgm"
        save_pnm(PixelImage(rng.integers(0, 256, size=(8, 8), dtype=np.uint8)), src)
        main(["transform", "--mode", "paper", str(src), str(tmp_path / "p.spec")])
        main(["transform", str(src), str(tmp_path / "o.spec")])
        p, o = load_spectrum(tmp_path / "p.spec"), load_spectrum(tmp_path / "o.spec")
        assert np.array_equal(p.coeffs, o.coeffs)

    def test_inverse_mode_mismatch_is_data_error(self, tmp_path, gray_file):
        spec = tmp_path / "s.spec"
        main(["transform", str(gray_file), str(spec)])
        assert main(["transform", "--inverse", "--mode", "paper", str(spec),
                     str(tmp_path / "x.pgm")]) == 2

    def test_missing_input(self, tmp_path, capsys):
        assert main(["transform", str(tmp_path / "none.pgm"), str(tmp_path / "o")]) == 2
        assert "none.pgm" in capsys.readouterr().err


class TestFuse:

    def write_ppms(self, folder, rng, n=3):
        folder.mkdir()
        for i in range(n):
            save_pnm(PixelImage(rng.integers(0, 256, size=(16, 20, 3), dtype=np.uint8)),
                     folder / f"im{i}.ppm")

    def test_directory(self, tmp_path, rng):
        self.write_ppms(tmp_path / "in", rng)
        assert main(["fuse", str(tmp_path / "in"), str(tmp_path / "out")]) == 0
        outs = sorted(p.name for p in (tmp_path / "out").iterdir())
        assert outs == ["im0.ppm", "im1.ppm", "im2.ppm", "provenance.json"]
        prov = json.loads((tmp_path / "out" / "provenance.json").read_text())
        assert prov["params"]["retention_ratio"] == 0.15
        assert prov["params"]["strategy"] == "box"
        assert prov["params"]["combine"] == "addclamp"
        assert prov["params"]["sigma_multiplier"] == 2.0

    def test_identity_setting(self, tmp_path, rng):
        self.write_ppms(tmp_path / "in", rng)
        assert main(["fuse", "--r", "1", "--combine", "average",
                     str(tmp_path / "in"), str(tmp_path / "out")]) == 0
        for i in range(3):
            assert load_pnm(tmp_path / "out" / f"im{i}.ppm") == load_pnm(tmp_path / "in" / f"im{i}.ppm")

    def test_gradient_flags_recorded(self, tmp_path, gray_file):
        assert main(["fuse", "--strategy", "gradient", "--k", "1.5", str(gray_file),
                     str(tmp_path / "out")]) == 0
        prov = json.loads((tmp_path / "out" / "provenance.json").read_text())
        assert prov["params"]["strategy"] == "gradient" and prov["params"]["sigma_multiplier"] == 1.5

    def test_fail_fast_lists_bad_inputs(self, tmp_path, rng, capsys):
        self.write_ppms(tmp_path / "in", rng, n=2)
        (tmp_path / "in" / "bad.ppm").write_bytes(b"P3 junk")
        assert main(["fuse", str(tmp_path / "in"), str(tmp_path / "out")]) == 2
        assert "bad.ppm" in capsys.readouterr().err
        assert not (tmp_path / "out").exists()

    def test_usage_errors(self, tmp_path, gray_file):
        with pytest.raises(SystemExit) as info:
            main(["fuse", "--r", "2", str(gray_file), str(tmp_path)])
        assert info.value.code == 1
        with pytest.raises(SystemExit) as info:
            main(["fuse", "--strategy", "circle", str(gray_file), str(tmp_path)])
        assert info.value.code == 1

    def test_bad_thread_env_is_usage_error(self, tmp_path, gray_file, monkeypatch):
        monkeypatch.setenv("FREQFUSE_THREADS", "-2")
        assert main(["fuse", str(gray_file), str(tmp_path / "out")]) == 1


class TestEval:

    def test_two_arms(self, tmp_path, synthetic_dataset, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(f"manifest = {synthetic_dataset[Role.TEST]}\n"
                       "n_tasks = 20\npreprocessing = raw, fused\n")
        assert main(["eval", str(cfg), "--out", str(tmp_path / "rep")]) == 0
        names = sorted(p.name for p in (tmp_path / "rep").iterdir())
        assert names == ["comparison.json", "comparison.txt", "fused.report.json",
                         "fused.report.txt", "raw.report.json", "raw.report.txt"]
        raw = json.loads((tmp_path / "rep" / "raw.report.json").read_text())
        assert raw["n_tasks"] == 20 and raw["metadata"]["config"]["preprocessing"] == "raw"
        out = capsys.readouterr().out
        assert " ± " in out and "delta" in out

    def test_missing_manifest_names_key(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("n_tasks = 20\n")
        assert main(["eval", str(cfg)]) == 2
        assert "'manifest'" in capsys.readouterr().err


class TestBench:

    def test_results_file(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        assert main(["bench", "--dims", "16x16", "--iters", "10", "--out", str(out)]) == 0
        rows = json.loads(out.read_text())["results"]
        assert [(r["strategy"], r["dims"]) for r in rows] == [("box", "16x16"), ("gradient", "16x16")]
        assert "median" in capsys.readouterr().out

    def test_default_dims(self, tmp_path):
        out = tmp_path / "bench.json"
        assert main(["bench", "--iters", "10", "--out", str(out)]) == 0
        dims = {r["dims"] for r in json.loads(out.read_text())["results"]}
        assert dims == {"84x84", "256x256"}

    def test_too_few_iterations(self):
        with pytest.raises(SystemExit) as info:
            main(["bench", "--iters", "3"])
        assert info.value.code == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "freqfuse", "synth", str(tmp_path / "d"),
                           "--images-per-class", "16"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "d" / "test.txt").exists()
    proc = subprocess.run([sys.executable, "-m", "freqfuse"], capture_output=True, text=True)
    assert proc.returncode == 1
