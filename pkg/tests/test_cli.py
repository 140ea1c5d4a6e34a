import configparser
import csv
import io
import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

import nvlab.cli as cli
from nvlab import read_snapshot

SCHEMA_PATH = Path(cli.__file__).parent / "schemas" / "perturb_summary.schema.json"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestConfigPlumbing:
    def test_no_command_is_usage_error(self, capsys):
        assert cli.main([]) == 2
        assert "usage" in capsys.readouterr().out.lower()

    def test_dump_config_lists_every_section(self, capsys):
        assert cli.main(["evolve", "--dump-config"]) == 0
        parser = configparser.ConfigParser()
        parser.read_string(capsys.readouterr().out)
        assert set(parser.sections()) == {"evolve", "scan", "trace", "perturb",
                                          "speed-profile"}
        assert parser["evolve"]["dt"] == "1e-3"

    def test_unknown_set_key_rejected(self, tmp_path, capsys):
        assert cli.main(["speed-profile", "--out", str(tmp_path),
                         "--set", "bogus=1"]) == 2
        assert "unknown key" in capsys.readouterr().err

    def test_malformed_set_rejected(self, tmp_path):
        assert cli.main(["speed-profile", "--out", str(tmp_path),
                         "--set", "n_samples"]) == 2

    def test_missing_config_file_rejected(self, tmp_path):
        assert cli.main(["speed-profile", "--out", str(tmp_path),
                         "--config", str(tmp_path / "nope.ini")]) == 2

    def test_config_file_overrides_defaults(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[speed-profile]\nn_samples = 10\n")
        assert cli.main(["speed-profile", "--out", str(tmp_path),
                         "--config", str(ini)]) == 0
        assert len(read_csv(tmp_path / "speed_profile.csv")) == 11

    def test_unknown_config_key_rejected(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[speed-profile]\nbogus = 1\n")
        assert cli.main(["speed-profile", "--out", str(tmp_path),
                         "--config", str(ini)]) == 2

    def test_flag_beats_config_file(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[speed-profile]\nn_samples = 10\n")
        assert cli.main(["speed-profile", "--out", str(tmp_path),
                         "--config", str(ini), "--set", "n_samples=4"]) == 0
        assert len(read_csv(tmp_path / "speed_profile.csv")) == 5


class TestSpeedProfile:
    def test_default_table(self, tmp_path):
        assert cli.main(["speed-profile", "--out", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "speed_profile.csv")
        assert rows[0] == ["alpha", "kappa", "speed"]
        assert len(rows) == 361
        alpha, kap, speed = map(float, rows[1])
        assert alpha == 0.0 and kap == 1.0 and speed == 1.0


class TestEvolve:
    def test_short_soliton_run_outputs(self, tmp_path):
        assert cli.main(["evolve", "--out", str(tmp_path),
                         "--set", "L=64", "--set", "M=8",
                         "--set", "t_final=0.02", "--set", "stride=10"]) == 0
        rows = read_csv(tmp_path / "diagnostics.csv")
        assert rows[0] == ["t", "l2_norm", "mean", "max_abs"]
        assert len(rows) == 4  # t = 0, 0.01, 0.02 plus header
        assert float(rows[1][3]) == pytest.approx(2.0, rel=1e-6)
        snaps = sorted(tmp_path.glob("snapshot_*.nvg"))
        assert len(snaps) == 3
        field, t = read_snapshot(snaps[-1])
        assert t == pytest.approx(0.02)
        assert field.grid.L == 64
        assert field.samples.min() == pytest.approx(-2.0, abs=1e-3)

    def test_zero_preset_without_snapshots(self, tmp_path):
        assert cli.main(["evolve", "--out", str(tmp_path),
                         "--set", "preset=zero", "--set", "L=16",
                         "--set", "M=8", "--set", "Wx=6.283185307179586",
                         "--set", "Wy=6.283185307179586",
                         "--set", "t_final=0.01", "--set", "snapshots=false"]) == 0
        assert not list(tmp_path.glob("snapshot_*.nvg"))
        rows = read_csv(tmp_path / "diagnostics.csv")
        assert all(float(r[1]) == 0.0 for r in rows[1:])

    def test_divergence_exit_code(self, tmp_path, capsys):
        assert cli.main(["evolve", "--out", str(tmp_path),
                         "--set", "L=128", "--set", "M=8",
                         "--set", "theta=0.0", "--set", "dt=0.5",
                         "--set", "first_step=copy_previous",
                         "--set", "snapshots=false",
                         "--set", "t_final=50"]) == 3
        assert "diverged" in capsys.readouterr().err
        assert (tmp_path / "diagnostics.csv").exists()

    def test_bad_preset(self, tmp_path):
        assert cli.main(["evolve", "--out", str(tmp_path),
                         "--set", "preset=vortex"]) == 2


class TestScan:
    def test_grid_scan_rows(self, tmp_path):
        assert cli.main(["scan", "--out", str(tmp_path), "--workers", "1",
                         "--set", "k_min=0.4", "--set", "k_max=0.6",
                         "--set", "nk=3", "--set", "gamma_min=0.3",
                         "--set", "gamma_max=0.4", "--set", "ngamma=3",
                         "--set", "x_match=6"]) == 0
        rows = read_csv(tmp_path / "scan.csv")
        assert rows[0] == ["k", "gamma", "normalized_absD", "method"]
        assert len(rows) == 10
        assert all(r[3] == "bidirectional" for r in rows[1:])
        vals = np.array([[float(r[0]), float(r[1]), float(r[2])] for r in rows[1:]])
        assert np.isfinite(vals[:, 2]).all()
        # the zero curve passes inside this window: the smallest residual
        # should be near gamma = k(1-k)(2-k)
        best = vals[np.argmin(vals[:, 2])]
        law = best[0] * (1 - best[0]) * (2 - best[0])
        assert abs(best[1] - law) <= 0.05

    def test_nan_sentinel_for_invalid_points(self, tmp_path):
        # k = 0 makes the asymptotic basis degenerate: row kept, value nan
        assert cli.main(["scan", "--out", str(tmp_path), "--workers", "1",
                         "--set", "k_min=0.0", "--set", "k_max=0.0",
                         "--set", "nk=1", "--set", "gamma_min=0.1",
                         "--set", "gamma_max=0.1", "--set", "ngamma=1",
                         "--set", "x_match=6"]) == 0
        rows = read_csv(tmp_path / "scan.csv")
        assert len(rows) == 2
        assert rows[1][2] == "nan"

    def test_k0_scan(self, tmp_path):
        assert cli.main(["scan", "--k0", "--out", str(tmp_path),
                         "--set", "gamma_min=0.0", "--set", "gamma_max=0.1",
                         "--set", "ngamma_k0=5", "--set", "x_match=12"]) == 0
        rows = read_csv(tmp_path / "scan_k0.csv")
        assert rows[0] == ["gamma", "D0"]
        assert len(rows) == 6
        assert abs(float(rows[1][1])) < 1e-6  # vanishes at gamma = 0


class TestTrace:
    def test_short_trace_outputs(self, tmp_path, capsys):
        assert cli.main(["trace", "--out", str(tmp_path),
                         "--set", "seed_k=0.42", "--set", "step=0.02",
                         "--set", "max_points=8", "--set", "x_match=8"]) == 0
        out = capsys.readouterr().out
        rows = read_csv(tmp_path / "trace.csv")
        assert rows[0] == ["s", "k", "gamma", "residual"]
        assert len(rows) == 9
        for r in rows[1:]:
            k, gamma = float(r[1]), float(r[2])
            law = k * (1 - k) * (2 - k)
            assert gamma == pytest.approx(law, abs=1e-4)
        band_line = (tmp_path / "band.txt").read_text()
        assert band_line.startswith("band k_min=")
        assert "closed=false" in band_line
        assert band_line.strip() in out

    def test_lost_seed_exit_code(self, tmp_path, capsys):
        assert cli.main(["trace", "--out", str(tmp_path),
                         "--set", "seed_k=0.5", "--set", "seed_gamma=0.1",
                         "--set", "x_match=6"]) == 4
        assert "trace:" in capsys.readouterr().err
        assert not (tmp_path / "trace.csv").exists()

    def test_seed_from_scan_csv(self, tmp_path):
        scan = tmp_path / "scan.csv"
        with open(scan, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "gamma", "normalized_absD", "method"])
            w.writerow(["0.42", "0.384", "1e-9", "bidirectional"])
            w.writerow(["0.9", "0.1", "0.3", "bidirectional"])
        assert cli.main(["trace", "--out", str(tmp_path),
                         "--seed-from", str(scan),
                         "--set", "step=0.02", "--set", "max_points=4",
                         "--set", "x_match=8"]) == 0
        rows = read_csv(tmp_path / "trace.csv")
        assert float(rows[1][1]) == pytest.approx(0.42, abs=0.02)

    def test_seed_from_unusable_scan(self, tmp_path):
        scan = tmp_path / "scan.csv"
        with open(scan, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "gamma", "normalized_absD", "method"])
            w.writerow(["0.02", "0.3", "1e-9", "bidirectional"])  # k too small
        assert cli.main(["trace", "--out", str(tmp_path),
                         "--seed-from", str(scan)]) == 2


class TestPerturb:
    def test_off_curve_point_exit_code(self, tmp_path, capsys):
        assert cli.main(["perturb", "--out", str(tmp_path),
                         "--set", "k=0.5", "--set", "gamma=0.2",
                         "--set", "x_match=8"]) == 5
        assert "off the instability curve" in capsys.readouterr().err

    def test_quick_growth_run(self, tmp_path, capsys):
        assert cli.main(["perturb", "--out", str(tmp_path),
                         "--set", "k=0.504", "--set", "gamma=0.374",
                         "--set", "L=64", "--set", "M=16",
                         "--set", "t_final=0.1", "--set", "stride=10"]) == 0
        out = capsys.readouterr().out
        assert "gamma_est=" in out

        shape_rows = read_csv(tmp_path / "shape.csv")
        assert shape_rows[0] == ["x", "f", "g", "h_imag"]
        fvals = [abs(float(r[1])) for r in shape_rows[1:]]
        assert max(fvals) == pytest.approx(1.0)

        dev_rows = read_csv(tmp_path / "deviation.csv")
        assert dev_rows[0] == ["t", "deviation_l2", "gamma_running"]
        assert all(float(r[1]) > 0 for r in dev_rows[1:])

        summary = json.loads((tmp_path / "summary.json").read_text())
        schema = json.loads(SCHEMA_PATH.read_text())
        jsonschema.validate(summary, schema)
        assert summary["gamma"] == pytest.approx(0.504 * 0.496 * 1.496, abs=1e-6)
        assert summary["gamma_input"] == 0.374
        assert summary["grid"]["M"] == 16
