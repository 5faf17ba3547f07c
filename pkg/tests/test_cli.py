import json
import math

import pytest

from cascade.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSolve:
    def test_regime_ii_point(self, capsys):
        code, out, _ = run(capsys, "solve", "--kappa", "3", "--length", "2",
                           "--delta-s", "10", "--eta-s", "1", "--degenerate")
        assert code == 0
        doc = json.loads(out)
        assert doc["regime"] == "II"
        assert doc["observables"]["n_as"] > 1

    def test_zero_couplings_vacuum(self, capsys):
        code, out, _ = run(capsys, "solve", "--length", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["observables"]["n_as"] == 0
        assert doc["observables"]["minvar_a"] == 1.0

    def test_oracle_matches_analytic(self, capsys):
        argv = ["solve", "--kappa", "3", "--eta-s", "1", "--eta-i", "2",
                "--delta-tilde", "1", "--delta-s", "2", "--delta-i", "3",
                "--length", "0.7"]
        _, out_a, _ = run(capsys, *argv, "--solver", "analytic")
        _, out_o, _ = run(capsys, *argv, "--solver", "oracle")
        a = json.loads(out_a)["matrix"]
        o = json.loads(out_o)["matrix"]
        for key, val in a.items():
            if key == "z":
                continue
            for x, y in zip(val, o[key]):
                assert x == pytest.approx(y, rel=1e-6, abs=1e-9)

    def test_invalid_input_exit_2(self, capsys):
        code, _, err = run(capsys, "solve", "--length", "-1")
        assert code == 2
        assert "length" in err

    def test_no_fallback_exit_3(self, capsys):
        # phase-matched plain PDC sits on the multiple-root curve
        code, _, err = run(capsys, "solve", "--kappa", "3", "--no-fallback")
        assert code == 3
        assert "oracle" in err

    def test_fallback_solves_multiple_root_point(self, capsys):
        code, out, _ = run(capsys, "solve", "--kappa", "3", "--length", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["observables"]["n_as"] == pytest.approx(
            math.sinh(3.0) ** 2, rel=1e-9)

    def test_reproducible_bytes(self, capsys):
        argv = ["solve", "--kappa", "2.5", "--eta-s", "1.5", "--degenerate",
                "--delta-s", "4", "--length", "1.3"]
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2

    def test_config_file_with_flag_override(self, capsys, tmp_path):
        cfg = tmp_path / "p.json"
        cfg.write_text(json.dumps({
            "kappa": [3.0, 0.0], "eta_s": [1.0, 0.0], "eta_i": [1.0, 0.0],
            "delta_tilde": 0.0, "delta_s": 10.0, "delta_i": 10.0,
            "length": 2.0}))
        code, out, _ = run(capsys, "solve", "--config", str(cfg),
                           "--delta-s", "0", "--degenerate")
        assert code == 0
        doc = json.loads(out)
        assert doc["params"]["delta_s"] == 0.0
        assert doc["regime"] == "IV"


class TestClassify:
    def test_roots_and_label(self, capsys):
        code, out, _ = run(capsys, "classify", "--kappa", "3",
                           "--delta-tilde", "4")
        assert code == 0
        doc = json.loads(out)
        assert doc["regime"] == "II"
        assert len(doc["roots"]) == 4
        assert doc["coefficients"]["P"] == pytest.approx(-1.0)

    def test_three_mode_flag(self, capsys):
        code, out, _ = run(capsys, "classify", "--kappa", "1", "--eta-s", "3",
                           "--three-mode")
        assert code == 0
        assert json.loads(out)["regime"] == "I"


class TestCompare:
    def test_no_upconversion_columns_identical(self, capsys):
        code, out, _ = run(capsys, "compare", "--kappa", "2", "--length", "1",
                           "--degenerate")
        assert code == 0
        doc = json.loads(out)
        for key in ("n_a", "n_b", "minvar_a"):
            assert doc["exact"][key] == pytest.approx(doc["averaged"][key],
                                                      rel=1e-9, abs=1e-12)
            assert doc["exact"][key] == pytest.approx(doc["pdc_only"][key],
                                                      rel=1e-9, abs=1e-12)

    def test_even_sinc_multiple_kills_averaged(self, capsys):
        length = 2.0
        ds = 4 * math.pi / length
        code, out, _ = run(capsys, "compare", "--kappa", "1.5", "--eta-s",
                           "1.5", "--delta-s", str(ds), "--degenerate",
                           "--length", str(length))
        assert code == 0
        doc = json.loads(out)
        assert doc["averaged"]["n_b"] == 0.0
        assert doc["exact"]["n_b"] > 0.0

    def test_same_order_of_magnitude_at_high_gain(self, capsys):
        # strongly mismatched up-conversion barely dents the PDC output
        length = 1.0
        ds = 15 * math.pi / length
        code, out, _ = run(capsys, "compare", "--kappa", "4", "--eta-s", "4",
                           "--delta-s", str(ds), "--degenerate",
                           "--length", str(length))
        assert code == 0
        doc = json.loads(out)
        assert 0.1 < doc["exact"]["n_a"] / doc["pdc_only"]["n_a"] < 10


class TestScanAndSweep:
    def test_scan_csv(self, capsys, tmp_path):
        spec = {
            "base": {"kappa": [3.0, 0.0], "eta_s": [1.0, 0.0],
                     "eta_i": [1.0, 0.0], "delta_tilde": 0.0,
                     "delta_s": 0.0, "delta_i": 0.0, "length": 2.0},
            "axis1": {"name": "delta_s", "min": 0.0, "max": 10.0, "count": 3},
            "quantities": ["regime", "n_as"],
            "solver": "analytic",
            "degenerate": True,
        }
        f = tmp_path / "spec.json"
        f.write_text(json.dumps(spec))
        out_file = tmp_path / "scan.csv"
        code, _, _ = run(capsys, "scan", "--spec", str(f), "--output",
                         str(out_file))
        assert code == 0
        lines = out_file.read_text().strip().split("\n")
        assert lines[0] == "delta_s,regime,n_as"
        assert len(lines) == 4

    def test_sweep_gain_stdout(self, capsys):
        code, out, _ = run(capsys, "sweep-gain", "--delta-s-l",
                           str(15 * math.pi), "--ratio", "1", "--gamma-max",
                           "2", "--points", "3", "--format", "csv")
        assert code == 0
        header = out.splitlines()[0]
        assert header.startswith("gamma,exact_n_a")

    def test_help_mentions_units(self, capsys):
        for cmd in ("solve", "classify", "scan", "sweep-gain", "compare"):
            with pytest.raises(SystemExit) as exc:
                main([cmd, "--help"])
            assert exc.value.code == 0
            text = capsys.readouterr().out
            assert "--help" in text
            if cmd in ("solve", "classify", "compare"):
                assert "cm^-1" in text and "[cm]" in text
