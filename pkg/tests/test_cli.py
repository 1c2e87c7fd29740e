"""Tests for the command-line interface, driven in-process via main()."""

import json

import numpy as np
import pytest

from mammocad.cli import main
from mammocad.image_io import GrayImage, load_pgm, save_pgm
from mammocad.pipeline import read_report


@pytest.fixture(scope="module")
def phantom_dir(tmp_path_factory):
    """A small seeded phantom batch shared by the detect/froc tests."""
    out = tmp_path_factory.mktemp("phantoms")
    rc = main(["phantom", "--out", str(out), "--count", "2", "--seed", "3",
               "--nodules", "2", "--lines", "1",
               "--width", "256", "--height", "256"])
    assert rc == 0
    return out


class TestPhantom:
    def test_writes_images_and_truth_sidecars(self, phantom_dir):
        for i in range(2):
            stem = phantom_dir / ("phantom_%03d" % i)
            img = load_pgm(stem.with_suffix(".pgm"))
            assert (img.width, img.height) == (256, 256)
            doc = json.loads(stem.with_suffix(".truth.json").read_text())
            assert len(doc["truths"]) == 3  # 2 nodules + 1 line
            assert doc["seed"] == 3 + i

    def test_invalid_size_fails_cleanly(self, tmp_path, capsys):
        rc = main(["phantom", "--out", str(tmp_path), "--width", "100",
                   "--height", "100"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestEnhance:
    def test_round_trip(self, tmp_path):
        g = np.random.default_rng(0)
        img = GrayImage(g.uniform(0, 255, (64, 64)).round(), bit_depth=8)
        src, dst = tmp_path / "in.pgm", tmp_path / "out.pgm"
        save_pgm(img, src)
        rc = main(["enhance", str(src), str(dst), "--gain", "1.5",
                   "--levels", "3"])
        assert rc == 0
        out = load_pgm(dst)
        assert (out.width, out.height) == (64, 64)
        assert out.data.max() == 255  # normalized back to full range

    def test_missing_input_is_an_input_error(self, tmp_path, capsys):
        rc = main(["enhance", str(tmp_path / "absent.pgm"),
                   str(tmp_path / "out.pgm")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestDetect:
    def test_writes_report_and_overlay(self, phantom_dir, tmp_path, capsys):
        src = phantom_dir / "phantom_000.pgm"
        report_path = tmp_path / "phantom_000.report.json"
        overlay_path = tmp_path / "overlay.ppm"
        rc = main(["detect", str(src), "--report", str(report_path),
                   "--overlay", str(overlay_path)])
        assert rc == 0
        report = read_report(report_path)
        assert report.source == str(src)
        assert (report.width, report.height) == (256, 256)
        assert overlay_path.read_bytes().startswith(b"P6")
        assert str(src) in capsys.readouterr().out

    def test_config_file_is_honored(self, phantom_dir, tmp_path):
        src = phantom_dir / "phantom_000.pgm"
        cfg_path = tmp_path / "cfg.json"
        base = main(["detect", str(src), "--report",
                     str(tmp_path / "base.json")])
        assert base == 0
        doc = json.loads((tmp_path / "base.json").read_text())
        doc["config"]["validity"]["cd_threshold"] = 99.0  # reject everything
        cfg_path.write_text(json.dumps(doc["config"]))
        rc = main(["detect", str(src), "--config", str(cfg_path),
                   "--report", str(tmp_path / "strict.json")])
        assert rc == 0
        strict = read_report(tmp_path / "strict.json")
        assert strict.accepted() == []

    def test_missing_input_is_an_input_error(self, tmp_path, capsys):
        rc = main(["detect", str(tmp_path / "absent.pgm")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestFroc:
    def test_builds_a_curve_from_matching_stems(self, phantom_dir, tmp_path):
        reports = tmp_path / "reports"
        reports.mkdir()
        for i in range(2):
            src = phantom_dir / ("phantom_%03d.pgm" % i)
            rc = main(["detect", str(src), "--report",
                       str(reports / ("phantom_%03d.report.json" % i))])
            assert rc == 0
        out = tmp_path / "froc.csv"
        rc = main(["froc", "--reports", str(reports), "--truths",
                   str(phantom_dir), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "fp_per_image,tp_ratio,cd,rst"
        assert len(lines) > 1

    def test_missing_truth_file_is_an_input_error(self, phantom_dir,
                                                  tmp_path, capsys):
        reports = tmp_path / "reports"
        reports.mkdir()
        src = phantom_dir / "phantom_000.pgm"
        assert main(["detect", str(src), "--report",
                     str(reports / "other_stem.report.json")]) == 0
        rc = main(["froc", "--reports", str(reports), "--truths",
                   str(phantom_dir), "--out", str(tmp_path / "froc.csv")])
        assert rc == 1
        assert "other_stem.truth.json" in capsys.readouterr().err

    def test_empty_report_dir_is_an_input_error(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        rc = main(["froc", "--reports", str(empty), "--truths", str(empty),
                   "--out", str(tmp_path / "froc.csv")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


def test_unknown_command_exits_via_argparse():
    with pytest.raises(SystemExit):
        main(["no-such-command"])
