import json
import math

import numpy as np
import pytest

from systolab import cli


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestFlatCommands:
    def test_reduce_hexagonal(self, capsys):
        code, report = run_cli(capsys, [
            "flat", "reduce", "--v1", "2,0", "--v2", "1,1.7320508"])
        assert code == 0
        assert report["schema"] == 1
        assert report["modulus"]["x0"] == pytest.approx(0.5, abs=1e-7)
        assert report["ratio"] == pytest.approx(2.0 / math.sqrt(3.0), abs=1e-7)
        assert all(c["status"] == "pass" for c in report["checks"])

    def test_klein(self, capsys):
        code, report = run_cli(capsys, ["flat", "klein", "--w", "2", "--h", "1"])
        assert code == 0
        assert report["systole"] == 1.0
        assert report["ratio"] == 0.5

    def test_degenerate_input_exits_2(self, capsys):
        code = cli.main(["flat", "reduce", "--v1", "1,0", "--v2", "2,0"])
        captured = capsys.readouterr()
        assert code == 2
        assert "error" in captured.err


class TestLoewnerCommand:
    def test_check_constant_grid(self, capsys, tmp_path):
        grid = tmp_path / "f.csv"
        np.savetxt(grid, np.ones((16, 16)), delimiter=",")
        code, report = run_cli(capsys, [
            "loewner", "check",
            "--modulus", "0.5,%.17g" % (math.sqrt(3.0) / 2.0),
            "--f-grid", str(grid)])
        assert code == 0
        assert report["sigma_upper"] == pytest.approx(2.0 / math.sqrt(3.0), abs=1e-12)
        assert all(abs(g) < 1e-12 for g in report["stage_gaps"])

    def test_malformed_csv_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\nnot,numbers\n")
        code = cli.main(["loewner", "check", "--modulus", "0,1",
                         "--f-grid", str(bad)])
        capsys.readouterr()
        assert code == 2


class TestZollCommands:
    def test_certify(self, capsys):
        code, report = run_cli(capsys, ["zoll", "certify", "--h", "0.3"])
        assert code == 0
        assert report["zoll"] is True
        assert report["ratio"] == pytest.approx(math.pi, abs=1e-4)
        assert len(report["closure_defects"]) == 20

    def test_trace_writes_csv(self, capsys, tmp_path):
        out = tmp_path / "traj.csv"
        code, report = run_cli(capsys, [
            "--out", str(out), "zoll", "trace", "--h", "0.3",
            "--pphi", "0.7", "--length", "12.56"])
        assert code == 0
        table = np.loadtxt(out, delimiter=",", skiprows=1)
        assert table.shape[1] == 5
        header = out.read_text().splitlines()[0]
        assert header == "s,theta,phi,p_theta,p_phi"
        assert report["energy_drift"] < 1e-8


class TestSymplecticCommands:
    def test_ellipsoid(self, capsys):
        code, report = run_cli(capsys, ["symplectic", "ellipsoid", "--a", "2,5"])
        assert code == 0
        assert report["capacity"] == pytest.approx(2 * math.pi)
        assert report["viterbo_ratio"] == pytest.approx(0.4)

    def test_shadow_squeeze_control(self, capsys, tmp_path):
        mat = tmp_path / "m.csv"
        np.savetxt(mat, np.diag([0.5, 2.0, 0.5, 2.0]), delimiter=",")
        code, report = run_cli(capsys, ["symplectic", "shadow", "--matrix", str(mat)])
        assert code == 0
        assert report["symplectic"] is False
        assert report["shadow_area"] == pytest.approx(0.25 * math.pi)
        assert report["checks"] == []

    def test_check_identity(self, capsys, tmp_path):
        mat = tmp_path / "eye.csv"
        np.savetxt(mat, np.eye(4), delimiter=",")
        code, report = run_cli(capsys, ["symplectic", "check", "--matrix", str(mat)])
        assert code == 0
        assert report["symplectic"] is True
        assert report["residual"] == 0.0


class TestBWCommand:
    def test_constant_default(self, capsys):
        code, report = run_cli(capsys, ["bw", "ratio", "--euler", "2"])
        assert code == 0
        assert report["ratio"] == pytest.approx(0.5)
        assert report["is_zoll_equality"] is True

    def test_harmonics_file(self, capsys, tmp_path):
        c10 = 0.2 / math.sqrt(3.0 / (4.0 * math.pi))
        spec = tmp_path / "psi.json"
        spec.write_text(json.dumps({"constant": 1.0, "terms": [[1, 0, c10]]}))
        code, report = run_cli(capsys, [
            "bw", "ratio", "--euler", "1", "--psi-harmonics", str(spec)])
        assert code == 0
        assert report["tmin_upper_bound"] == pytest.approx(0.8, abs=1e-8)
        assert report["is_zoll_equality"] is False


class TestConvexCommands:
    def test_mahler_square(self, capsys, tmp_path):
        verts = tmp_path / "sq.csv"
        np.savetxt(verts, [[1, 1], [1, -1], [-1, 1], [-1, -1]], delimiter=",")
        code, report = run_cli(capsys, ["convex", "mahler", "--vertices", str(verts)])
        assert code == 0
        assert report["mahler_volume"] == pytest.approx(8.0)

    def test_mvee(self, capsys, tmp_path):
        rng = np.random.default_rng(71)
        pts = tmp_path / "pts.csv"
        np.savetxt(pts, rng.normal(size=(40, 3)), delimiter=",")
        code, report = run_cli(capsys, [
            "convex", "mvee", "--points", str(pts), "--tol", "1e-7"])
        assert code == 0
        assert report["min_containment_slack"] >= -1e-7


class TestReportMachinery:
    def test_byte_identical_reports(self, capsys):
        argv = ["--seed", "7", "zoll", "certify", "--h", "0.15"]
        cli.main(argv)
        first = capsys.readouterr().out
        cli.main(argv)
        second = capsys.readouterr().out
        assert first == second

    def test_verify_all_byte_identical(self, capsys, monkeypatch):
        from systolab import acceptance
        quick = [acceptance.criterion_3_klein, acceptance.criterion_7_hopf]
        monkeypatch.setattr(acceptance, "ALL_CRITERIA", quick)
        code = cli.main(["verify-all", "--seed", "7"])
        first = capsys.readouterr().out
        assert code == 0
        cli.main(["verify-all", "--seed", "7"])
        second = capsys.readouterr().out
        assert first == second
        report = json.loads(first)
        assert report["all_passed"] is True
        assert all(c["runtime_within_limit"] for c in report["criteria"])

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        cli.main(["--out", str(out), "flat", "klein", "--w", "1", "--h", "2"])
        stdout = capsys.readouterr().out
        assert out.read_text() == stdout

    def test_float_formatting_17_digits(self):
        text = cli.render_json({"x": math.pi})
        assert "3.1415926535897931" in text

    def test_failed_check_exit_code(self):
        class Args:
            seed = 7

        entry = cli._check_entry("impossible", 2.0, 1.0, "<=")
        _, code = cli._report("test", Args(), {}, [entry])
        assert entry["status"] == "fail"
        assert code == 1

    def test_compact_mode_single_line(self, capsys):
        cli.main(["--json", "flat", "klein", "--w", "1", "--h", "1"])
        out = capsys.readouterr().out
        assert out.count("\n") == 1
        json.loads(out)
