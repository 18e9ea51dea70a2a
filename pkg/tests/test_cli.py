"""Tests for the finch command line"""
import json

import numpy as np
import pytest

from finch.cli import build_parser, main


@pytest.fixture(autouse=True)
def short_runs(monkeypatch):
    monkeypatch.setenv("FINCH_T_END", "0.5")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_euclidean_report(self, capsys):
        code, out, _ = run(capsys, "analyze", "--metric", "euclidean", "--y", "3,4")
        assert code == 0
        report = json.loads(out)
        assert report["seed"] == 42
        assert report["point"] == {"x": [0.0, 0.0], "y": [3.0, 4.0]}
        assert report["metric_jet"]["F"] == pytest.approx(5.0)
        assert report["metric_jet"]["det_g"] == pytest.approx(1.0)
        assert np.abs(report["curvature"]["chi"]).max() < 1e-12
        assert report["integrals"]["lambda"] == pytest.approx(0.0, abs=1e-12)

    def test_funk_integrals(self, capsys):
        code, out, _ = run(capsys, "analyze", "--metric", "funk", "--x", "0.1,0.2", "--y", "0.5,-0.3")
        assert code == 0
        integrals = json.loads(out)["integrals"]
        assert integrals["f"] == pytest.approx(1.5, abs=1e-8)
        assert integrals["lambda"] == pytest.approx(1.5, abs=1e-8)
        assert integrals["I0"] is None

    def test_validation_section(self, capsys, tmp_path):
        out_file = tmp_path / "report.json"
        code, out, _ = run(capsys, "analyze", "--metric", "randers", "--y", "1,0", "--validate",
                           "--samples", "5", "--out", str(out_file))
        assert code == 0
        assert out == ""
        assert json.loads(out_file.read_text())["validation"]["passed"] is True

    def test_point_outside_domain(self, capsys):
        code, _, err = run(capsys, "analyze", "--metric", "funk", "--x", "1.5,0", "--y", "1,0")
        assert code == 2
        assert err.startswith("E2 domain:")

    def test_malformed_spec(self, capsys):
        code, _, err = run(capsys, "analyze", "--metric", "{not json", "--y", "1,0")
        assert code == 2
        assert err.startswith("E2 param:")

    def test_unwritable_output(self, capsys, tmp_path):
        target = tmp_path / "missing" / "report.json"
        code, _, err = run(capsys, "analyze", "--metric", "euclidean", "--y", "3,4", "--out", str(target))
        assert code == 2
        assert err.startswith("E2 io:")
        assert "Traceback" not in err

    def test_negative_seed(self, capsys):
        code, _, err = run(capsys, "analyze", "--metric", "euclidean", "--y", "3,4", "--validate", "--seed", "-1")
        assert code == 2
        assert err.startswith("E2 param:")

    def test_bad_vector(self, capsys):
        code, _, err = run(capsys, "analyze", "--metric", "euclidean", "--y", "1,a")
        assert code == 2
        assert "--y" in err


class TestVerify:
    def test_euclidean_hypotheses_fail(self, capsys):
        code, out, err = run(capsys, "verify", "--metric", "euclidean", "--theorem", "1",
                             "--samples", "4", "--trajectories", "1")
        assert code == 4
        assert json.loads(out)["verdict"] == "hypotheses_fail"
        assert "verdict: hypotheses_fail" in err

    def test_funk_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--metric", "funk", "--theorem", "1",
                           "--samples", "4", "--trajectories", "1", "--seed", "3")
        assert code == 0
        report = json.loads(out)
        assert report["seed"] == 3
        assert report["integral_range"][0] == pytest.approx(1.5, abs=1e-6)

    def test_reproducible(self, capsys):
        argv = ("verify", "--metric", "funk", "--theorem", "2", "--samples", "3", "--trajectories", "1")
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second


class TestGeodesic:
    def test_straight_line_csv(self, capsys, tmp_path):
        out_file = tmp_path / "line.csv"
        code, _, err = run(capsys, "geodesic", "--metric", "euclidean", "--x0", "0,0", "--y0", "1,2",
                           "--t", "1", "--controller", "rk4:0.25", "--out", str(out_file))
        assert code == 0
        lines = out_file.read_text().splitlines()
        assert lines[0].startswith("# metric:")
        assert "# status: completed" in lines
        header = next(line for line in lines if not line.startswith("#"))
        assert header == "t,x1,x2,y1,y2,F"
        rows = [line for line in lines if not line.startswith("#")][1:]
        assert len(rows) == 5
        last = [float(v) for v in rows[-1].split(",")]
        assert last[:3] == pytest.approx([1.0, 1.0, 2.0])
        assert last[-1] == pytest.approx(np.sqrt(5.0))
        assert err.strip().splitlines()[-1].startswith("drift")

    def test_unknown_quantity(self, capsys):
        code, _, err = run(capsys, "geodesic", "--metric", "euclidean", "--x0", "0,0", "--y0", "1,0",
                           "--track", "bogus")
        assert code == 2
        assert err.startswith("E2 param:")

    def test_painleve_integral_along_klein(self, capsys):
        code, out, _ = run(capsys, "geodesic", "--metric", "klein", "--aux", "euclidean", "--x0", "0.1,0",
                           "--y0", "0.5,0.5", "--track", "F,I0")
        assert code == 0
        rows = [line.split(",") for line in out.splitlines() if not line.startswith("#")][1:]
        values = np.array([float(row[-1]) for row in rows])
        assert np.allclose(values, values[0], rtol=1e-6)


class TestPairCheck:
    def test_klein_euclidean_related(self, capsys):
        code, out, _ = run(capsys, "pair-check", "--metric", "klein", "--aux", "euclidean", "--samples", "8")
        assert code == 0
        report = json.loads(out)
        assert report["projectively_related"] is True
        assert report["P_trace_vs_log_max_gap"] < 1e-6

    def test_funk_riemannian_unrelated(self, capsys):
        code, out, _ = run(capsys, "pair-check", "--metric", "funk", "--aux", "riemannian", "--samples", "8")
        assert code == 0
        assert json.loads(out)["projectively_related"] is False

    def test_dimension_mismatch(self, capsys):
        code, _, err = run(capsys, "pair-check", "--metric", "klein", "--dim", "2",
                           "--aux", '{"dim": 3, "kind": "builtin", "name": "euclidean"}')
        assert code == 2
        assert "dimension" in err


class TestParser:
    def test_no_command(self, capsys):
        assert main([]) == 2

    def test_common_flags_on_every_command(self):
        parser = build_parser()
        for command in ("analyze", "verify", "geodesic", "pair-check"):
            extra = {
                "analyze": ["--y", "1,0"],
                "verify": ["--theorem", "1"],
                "geodesic": ["--x0", "0,0", "--y0", "1,0"],
                "pair-check": ["--aux", "euclidean"],
            }[command]
            args = parser.parse_args([command, "--metric", "funk", "--dim", "3", "--tol", "1e-4", *extra])
            assert args.dim == 3
            assert args.tol == 1e-4
