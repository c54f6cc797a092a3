import json
import os

import numpy as np
import pytest
from PIL import Image

from cmapopt.cli import main
from cmapopt.io import round_half_up_bytes


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture()
def zigzag_table(tmp_path):
    p = tmp_path / "zigzag.txt"
    p.write_text("255 255 0\n0 0 255\n255 255 0\n0 0 255\n")
    return str(p)


class TestList:
    def test_builtins_listed(self, capsys):
        code, out, _ = run(capsys, "list")
        assert code == 0
        assert out.split() == ["viridis", "jet", "grayscale-jp", "cividis"]


class TestOptimize:
    def test_stdout_table(self, capsys):
        code, out, _ = run(capsys, "optimize", "--input", "viridis", "--method", "max-range")
        assert code == 0
        rows = out.strip().splitlines()
        assert len(rows) == 256
        values = np.array([[float(v) for v in r.split()] for r in rows])
        assert np.all(values >= 0) and np.all(values <= 1)

    def test_outputs_and_determinism(self, tmp_path, capsys):
        t1, t2 = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
        l1, l2 = str(tmp_path / "a.lut"), str(tmp_path / "b.lut")
        png = str(tmp_path / "a.png")
        for t, l in ((t1, l1), (t2, l2)):
            code, _, _ = run(capsys, "optimize", "--input", "viridis",
                             "--out-table", t, "--out-lut", l, "--out-png", png)
            assert code == 0
        body = lambda p: [l for l in open(p).read().splitlines() if not l.startswith("#")]
        assert body(t1) == body(t2)
        assert open(l1, "rb").read() == open(l2, "rb").read()
        assert os.path.getsize(l1) == 768
        assert os.path.exists(png) and os.path.exists(l1 + ".meta.json")
        meta = json.load(open(l1 + ".meta.json"))
        assert meta["cvd"] == {"kind": "deuteranomaly", "severity": 100.0}
        assert meta["method"] == "max_range"

    def test_size_flag(self, tmp_path, capsys):
        t = str(tmp_path / "s.txt")
        code, _, _ = run(capsys, "optimize", "--input", "viridis", "--size", "64",
                         "--out-table", t)
        assert code == 0
        assert len([l for l in open(t).read().splitlines() if not l.startswith("#")]) == 64

    def test_infeasible_names_fallback(self, zigzag_table, capsys):
        code, _, err = run(capsys, "optimize", "--input", zigzag_table,
                           "--method", "max-range")
        assert code == 1
        assert "infeasible" in err
        assert "--method fit" in err

    def test_fit_method_succeeds_on_zigzag(self, zigzag_table, tmp_path, capsys):
        code, _, _ = run(capsys, "optimize", "--input", zigzag_table, "--method", "fit",
                         "--out-table", str(tmp_path / "z.txt"))
        assert code == 0

    def test_viewing_conditions_file(self, tmp_path, capsys):
        vc = tmp_path / "vc.json"
        vc.write_text(json.dumps({"L_A": 30.0, "surround": "dim"}))
        t = str(tmp_path / "v.txt")
        code, _, _ = run(capsys, "optimize", "--input", "viridis",
                         "--viewing-conditions", str(vc), "--out-table", t)
        assert code == 0
        header = "\n".join(l for l in open(t).read().splitlines() if l.startswith("#"))
        assert '"surround": "dim"' in header

    def test_unknown_input_fails(self, capsys):
        code, _, err = run(capsys, "optimize", "--input", "nope")
        assert code == 1
        assert "built-in" in err


class TestSimulate:
    def test_severity_zero_identity(self, tmp_path, capsys, viridis):
        t = str(tmp_path / "s.txt")
        code, _, _ = run(capsys, "simulate", "--input", "viridis", "--severity", "0",
                         "--out-table", t)
        assert code == 0
        rows = [l for l in open(t).read().splitlines() if not l.startswith("#")]
        values = np.array([[float(v) for v in r.split()] for r in rows])
        assert np.max(np.abs(values - viridis.entries)) < 1e-6

    def test_png_round_trip(self, tmp_path, capsys):
        src = str(tmp_path / "in.png")
        out = str(tmp_path / "out.png")
        rgb = np.zeros((4, 4, 3), dtype=np.uint8)
        rgb[..., 0] = 200
        Image.fromarray(rgb).save(src)
        code, _, _ = run(capsys, "simulate", "--input", src, "--out-png", out)
        assert code == 0
        sim = np.asarray(Image.open(out))
        assert sim.shape == (4, 4, 3)
        assert sim[0, 0, 2] < 40  # red loses its blue-free punch but stays warm

    def test_png_requires_out(self, tmp_path, capsys):
        src = str(tmp_path / "in.png")
        Image.fromarray(np.zeros((2, 2, 3), dtype=np.uint8)).save(src)
        code, _, err = run(capsys, "simulate", "--input", src)
        assert code == 1
        assert "--out-png" in err


class TestTestimage:
    def test_grayscale_png(self, tmp_path, capsys):
        p = str(tmp_path / "k.png")
        code, _, _ = run(capsys, "testimage", "--width", "128", "--height", "32",
                         "--out", p)
        assert code == 0
        img = np.asarray(Image.open(p))
        assert img.shape == (32, 128, 3)
        # bottom row is the plain ramp
        assert np.array_equal(img[-1, :, 0], round_half_up_bytes(np.arange(128) / 127.0))

    def test_overlay(self, tmp_path, capsys):
        p = str(tmp_path / "ko.png")
        code, _, _ = run(capsys, "testimage", "--width", "128", "--height", "32",
                         "--overlay", "cividis", "--out", p)
        assert code == 0
        meta = json.load(open(p + ".meta.json"))
        assert meta["overlay"] == "cividis"


class TestGamutFraction:
    def test_severity_zero_prints_one(self, capsys):
        code, out, _ = run(capsys, "gamut-fraction", "--severity", "0",
                           "--resolution", "32")
        assert code == 0
        assert out.strip() == "0,1.0"

    def test_multiple_severities_csv(self, tmp_path, capsys):
        p = str(tmp_path / "f.csv")
        code, out, _ = run(capsys, "gamut-fraction", "--severity", "0", "50", "100",
                           "--resolution", "32", "--out", p)
        assert code == 0
        lines = open(p).read().splitlines()
        assert lines[0] == "severity,fraction"
        fractions = [float(l.split(",")[1]) for l in lines[1:]]
        assert fractions[0] == 1.0
        assert fractions[0] >= fractions[1] >= fractions[2]


class TestCdps:
    def test_end_to_end(self, tmp_path, capsys):
        img_path = str(tmp_path / "img.png")
        gray = np.tile(np.arange(256, dtype=np.uint8), (8, 1))
        Image.fromarray(np.repeat(gray[:, :, None], 3, axis=2)).save(img_path)
        path_csv = tmp_path / "path.csv"
        path_csv.write_text("\n".join(f"{x},4" for x in range(256)))
        out_csv = str(tmp_path / "cdps.csv")
        code, out, _ = run(capsys, "cdps", "--image", img_path, "--path", str(path_csv),
                           "--map", "grayscale-jp", "--out-csv", out_csv)
        assert code == 0
        assert "slope=1.0" in out and "r2=" in out
        rows = open(out_csv).read().splitlines()
        assert rows[0] == "data_delta,perceptual_delta"
        assert len(rows) == 256  # header + 255 pairs
        meta = json.load(open(out_csv + ".meta.json"))
        assert meta["n_pairs"] == 255
        assert meta["r2"] >= 0.999


class TestArgErrors:
    def test_bad_flag_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["optimize", "--no-such-flag"])
        assert exc.value.code == 2

    def test_missing_command_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_bad_severity_rejected(self, capsys):
        code, _, err = run(capsys, "optimize", "--input", "viridis", "--severity", "250")
        assert code == 1
        assert "severity" in err
