import json

import pytest

from primefock.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestVerifyCommand:
    def test_ccr_all_pass_exit_zero(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "ccr", "--p-max", "13", "--a-max", "4", "--omega-max", "4"
        )
        assert code == 0
        reports = [json.loads(line) for line in out.strip().splitlines()]
        assert all(r["passed"] for r in reports)
        assert all(r["residual"] <= 1e-12 for r in reports)

    def test_unknown_suite_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "verify", "bogus")
        assert code == 2
        assert "unknown suite" in err

    def test_forced_failure_exit_one(self, capsys):
        # an impossible tolerance turns every report red
        code, out, _ = run_cli(capsys, "verify", "uncertainty", "--tol", "0")
        assert code == 1

    def test_resolution_suite(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "resolution", "--sigma", "0.8")
        assert code == 0
        rep = json.loads(out.strip().splitlines()[0])
        assert rep["residual"] < 1e-12


class TestNcsCommand:
    def test_amplitudes_header_and_footer(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "ncs", "amplitudes", "--sigma", "2", "--t", "0",
            "--p-max", "13", "--a-max", "4", "--omega-max", "4", "--limit", "3",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "# schema=primefock.ncs.amplitudes.v1"
        assert lines[1] == "k,re,im,prob"
        first = lines[2].split(",")
        assert first[0] == "1"
        assert lines[-1].startswith("# residual_mass=")

    def test_pmf_totals(self, capsys):
        code, out, _ = run_cli(capsys, "ncs", "pmf", "--sigma", "1", "--n-max", "10")
        assert code == 0
        rows = [l for l in out.splitlines() if l and not l.startswith("#")][1:]
        total = sum(float(r.split(",")[1]) for r in rows)
        assert total >= 1.0 - 1e-8

    def test_expect_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "ncs", "expect", "--sigma", "1", "--observable", "N",
            "--p-max", "31", "--a-max", "5", "--omega-max", "5",
        )
        assert code == 0
        row = out.strip().splitlines()[2].split(",")
        assert row[0] == "N"
        assert float(row[1]) == pytest.approx(0.452247, abs=1e-5)

    def test_sigma_required(self, capsys):
        code, _, err = run_cli(capsys, "ncs", "pmf")
        assert code == 2
        assert "sigma" in err

    def test_domain_violation_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "ncs", "pmf", "--sigma", "0.4")
        assert code == 2
        assert "Re s > 1/2" in err

    def test_z_flag_parsing(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "ncs", "amplitudes", "--sigma", "1.0", "--z", "2=0.5+0.5i",
            "--p-max", "13", "--a-max", "3", "--omega-max", "3", "--format", "json",
        )
        assert code == 0
        body = json.loads(out)
        # mass parameter is the single-site weighted sum |z_2|^2 / 4
        assert body["mass_parameter"] == pytest.approx(0.5 / 4.0)


class TestSpectrumCommand:
    def test_dimer(self, capsys):
        code, out, _ = run_cli(
            capsys, "spectrum", "-N", "2", "-n", "2",
            "--tau", "1", "--delta", "0", "--gamma", "0",
        )
        assert code == 0
        rows = [l.split(",") for l in out.strip().splitlines()[2:]]
        assert [round(float(r[2]), 10) for r in rows] == [-2.0, 0.0, 2.0]

    def test_figure_preset_writes_two_files(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "spectrum", "--figure1", "--outdir", str(tmp_path))
        assert code == 0
        d0 = tmp_path / "figure1_delta0.csv"
        d1 = tmp_path / "figure1_delta1.csv"
        assert d0.exists() and d1.exists()
        for path in (d0, d1):
            lines = path.read_text().strip().splitlines()
            assert lines[1] == "tau,mode_rank,eigenvalue,alpha"
            assert len(lines) == 2 + 121 * 15

    def test_figure_preset_is_bit_stable(self, capsys, tmp_path):
        run_cli(capsys, "spectrum", "--figure1", "--outdir", str(tmp_path / "a"))
        run_cli(capsys, "spectrum", "--figure1", "--outdir", str(tmp_path / "b"))
        for name in ("figure1_delta0.csv", "figure1_delta1.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_transitions_inside_window(self, capsys):
        code, out, _ = run_cli(capsys, "spectrum", "--transitions", "--delta", "1")
        assert code == 0
        rows = [l.split(",") for l in out.strip().splitlines()[2:]]
        assert rows, "expected at least one transition"
        low, high = float(rows[0][0]), float(rows[0][1])
        assert 0.4 < low < high < 1.0

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "spectrum", "-N", "3", "-n", "1", "--tau", "0.5", "--format", "json"
        )
        assert code == 0
        body = json.loads(out)
        assert body["schema_version"] == "primefock.v1"
        assert len(body["rows"]) == 3

    def test_byte_identical_stdout(self, capsys):
        args = ("spectrum", "-N", "4", "-n", "2", "--tau-min", "0", "--tau-max", "0.2",
                "--tau-step", "0.1", "--m-lowest", "5")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
