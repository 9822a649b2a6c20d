import json
import math
import subprocess
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

from fragrect.cli import main
from fragrect.paths import HybridPath, path_to_csv


@pytest.fixture
def runner():
    return CliRunner()


def _write_half_diag(path: Path):
    with open(path, "w") as fh:
        path_to_csv(HybridPath.linear(0.5, 0.5), fh)


class TestSimulate:
    def test_root_only_snapshot(self, runner, tmp_path):
        out = tmp_path / "tree.csv"
        res = runner.invoke(main, ["simulate", "--seed", "1", "--t", "0", "--out", str(out)])
        assert res.exit_code == 0, res.output
        lines = out.read_text().splitlines()
        assert len(lines) == 2  # header + root
        assert lines[1].startswith("r,1.0,1.0,0.0,0.0,0.0,")

    def test_byte_identical_reruns(self, runner, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for out in (a, b):
            res = runner.invoke(
                main, ["simulate", "--seed", "5", "--t", "3.0", "--out", str(out)]
            )
            assert res.exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_resource_cap_exit_code(self, runner, tmp_path):
        res = runner.invoke(
            main,
            ["simulate", "--seed", "1", "--t", "40", "--cap", "1000", "--out", str(tmp_path / "x.csv")],
        )
        assert res.exit_code == 3

    def test_config_error_exit_code(self, runner, tmp_path):
        res = runner.invoke(main, ["simulate", "--seed", "1", "--out", str(tmp_path / "x.csv")])
        assert res.exit_code == 2

    def test_config_file_with_flag_override(self, runner, tmp_path):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text("simulate:\n  seed: 5\n  t: 1.0\n")
        out = tmp_path / "tree.csv"
        res = runner.invoke(
            main, ["simulate", "--config", str(cfg), "--t", "0", "--out", str(out)]
        )
        assert res.exit_code == 0
        assert len(out.read_text().splitlines()) == 2  # flag t=0 overrode config


class TestRender:
    def test_svg_rectangle_count(self, runner, tmp_path):
        tree_csv = tmp_path / "tree.csv"
        frames_csv = tmp_path / "frames.csv"
        res = runner.invoke(
            main,
            [
                "simulate", "--seed", "2", "--t", "2.0", "--out", str(tree_csv),
                "--frames", str(frames_csv), "--frame-times", "2.0",
            ],
        )
        assert res.exit_code == 0
        n_rects = len(frames_csv.read_text().splitlines()) - 1
        svg = tmp_path / "out.svg"
        res = runner.invoke(main, ["render", "--frames", str(frames_csv), "--out", str(svg)])
        assert res.exit_code == 0, res.output
        assert svg.read_text().count("<rect") == n_rects

    def test_single_root_is_yellow_square(self, runner, tmp_path):
        frames_csv = tmp_path / "frames.csv"
        frames_csv.write_text(
            "frame,vertex_id,x0,y0,base,height\n0,r,0.0,0.0,1.0,1.0\n"
        )
        svg = tmp_path / "out.svg"
        res = runner.invoke(main, ["render", "--frames", str(frames_csv), "--out", str(svg)])
        assert res.exit_code == 0
        text = svg.read_text()
        assert text.count("<rect") == 1
        assert "#f2d338" in text  # near-square: yellow

    def test_malformed_frames_exit_code(self, runner, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("frame,vertex_id,x0,y0,base,height\n0,r,broken\n")
        res = runner.invoke(
            main, ["render", "--frames", str(bad), "--out", str(tmp_path / "x.svg")]
        )
        assert res.exit_code == 2
        assert "line 2" in res.output


class TestRates:
    def test_half_diagonal_summary(self, runner, tmp_path):
        src = tmp_path / "path.csv"
        _write_half_diag(src)
        summary = tmp_path / "summary.csv"
        profile = tmp_path / "profile.csv"
        res = runner.invoke(
            main,
            ["rates", "--path-csv", str(src), "--out-summary", str(summary),
             "--out-profile", str(profile)],
        )
        assert res.exit_code == 0, res.output
        header, row = summary.read_text().splitlines()
        k_val = float(row.split(",")[2])
        assert abs(k_val - (2.0 * math.sqrt(2.0) - 2.0)) <= 1e-6
        assert len(profile.read_text().splitlines()) > 100

    def test_jump_path_j_exceeds_i(self, runner, tmp_path):
        from fragrect.paths import Track

        src = tmp_path / "path.csv"
        jumpy = HybridPath(
            Track([0.0, 0.5, 1.0], [0.0, 0.35, 0.6], [0.0, 0.1, 0.0]),
            Track.linear(0.5),
        )
        with open(src, "w") as fh:
            path_to_csv(jumpy, fh)
        summary = tmp_path / "summary.csv"
        res = runner.invoke(main, ["rates", "--path-csv", str(src), "--out-summary", str(summary)])
        assert res.exit_code == 0
        _, row = summary.read_text().splitlines()
        i_val, j_val = (float(x) for x in row.split(",")[:2])
        assert j_val > i_val


class TestKappaMap:
    def test_map_rows_and_region(self, runner, tmp_path):
        out = tmp_path / "map.csv"
        res = runner.invoke(main, ["kappa-map", "--steps", "50", "--out", str(out)])
        assert res.exit_code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 50 * 50 + 1
        # kappa(1,1) = 1 row present (lambda = mu = 1 on a steps=50 grid of max 10)
        hits = [l for l in lines[1:] if l.startswith("1.0,1.0,")]
        assert len(hits) == 1
        assert float(hits[0].split(",")[2]) == pytest.approx(1.0)
        # every outside-region row has negative kappa
        for line in lines[1:]:
            lam, mu, k, member = line.split(",")
            if member == "0":
                assert float(k) < 0.0

    def test_diagonal_brackets_upper_root(self, runner, tmp_path):
        out = tmp_path / "map.csv"
        res = runner.invoke(
            main, ["kappa-map", "--steps", "400", "--out", str(out)]
        )
        assert res.exit_code == 0
        # with step 0.025 both diagonal roots 3/2 +- sqrt2 are bracketed
        assert "0.075, 0.1" in res.output.replace("(", "").replace(")", "") or "sign changes" in res.output
        root_hi = 1.5 + math.sqrt(2.0)
        root_lo = 1.5 - math.sqrt(2.0)
        import re

        pairs = re.findall(r"\(([\d.]+), ([\d.]+)\)", res.output)
        brackets = [(float(a), float(b)) for a, b in pairs]
        assert any(a <= root_lo <= b for a, b in brackets)
        assert any(a <= root_hi <= b for a, b in brackets)


class TestVerifyCommand:
    def test_list_suites(self, runner):
        res = runner.invoke(main, ["verify", "--list"])
        assert res.exit_code == 0
        suites = res.output.split(":", 1)[1].split()
        assert len(suites) == 8

    def test_unknown_suite(self, runner):
        res = runner.invoke(main, ["verify", "nonsense"])
        assert res.exit_code == 2

    def test_quick_suite_passes(self, runner):
        res = runner.invoke(main, ["verify", "moments", "--quick"])
        assert res.exit_code == 0, res.output
        assert "PASS" in res.output


class TestOptimizeCommand:
    def test_endpoint_run_with_outputs(self, runner, tmp_path):
        path_csv = tmp_path / "best.csv"
        log = tmp_path / "log.jsonl"
        res = runner.invoke(
            main,
            ["optimize", "--seed", "3", "--n", "2", "--m-bound", "3.0",
             "--endpoint", "0.5,0.5", "--out-path", str(path_csv), "--out-log", str(log)],
        )
        assert res.exit_code == 0, res.output
        assert "best value" in res.output
        entries = [json.loads(l) for l in log.read_text().splitlines()]
        by_start = {}
        for e in entries:
            by_start.setdefault(e["start"], []).append(e["value"])
        for vals in by_start.values():
            assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
        assert path_csv.read_text().startswith("component,time,value,is_jump")

    def test_infeasible_exit_code(self, runner, tmp_path):
        res = runner.invoke(
            main,
            ["optimize", "--seed", "3", "--n", "2", "--m-bound", "10.0",
             "--endpoint", "10,10"],
        )
        assert res.exit_code == 4

    def test_determinism(self, runner, tmp_path):
        outs = []
        for name in ("a", "b"):
            p = tmp_path / f"{name}.csv"
            res = runner.invoke(
                main,
                ["optimize", "--seed", "9", "--n", "2", "--m-bound", "3.0",
                 "--out-path", str(p)],
            )
            assert res.exit_code == 0
            outs.append(p.read_bytes())
        assert outs[0] == outs[1]

    def test_bad_endpoint_flag(self, runner):
        res = runner.invoke(main, ["optimize", "--endpoint", "1;2"])
        assert res.exit_code == 2


def test_entry_point_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "fragrect.cli", "--help"] if False else ["fragrect", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "fragmentation" in proc.stdout
