import json

import numpy as np
import pytest

from udnsim.cli import run_cli
from udnsim.config import ScenarioConfig
from udnsim.heatmap import parse_csv


def run(args):
    return run_cli(args)


SMALL = ["--lambda", "8", "--rho", "10", "--area-km", "1.0", "--grid", "3",
         "--trials", "20", "--seed", "5", "--quiet"]


class TestCliRuns:
    def test_writes_png_and_csv(self, tmp_path):
        out = tmp_path / "m.png"
        assert run(SMALL + ["--out", str(out)]) == 0
        assert out.exists()
        assert out.with_suffix(".csv").exists()
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_deterministic_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
        assert run(SMALL + ["--out", str(out1)]) == 0
        assert run(SMALL + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert out1.with_suffix(".csv").read_bytes() == out2.with_suffix(".csv").read_bytes()

    def test_csv_only(self, tmp_path):
        out = tmp_path / "m.csv"
        assert run(SMALL + ["--out", str(out), "--format", "csv"]) == 0
        assert out.exists() and not out.with_suffix(".png").exists()
        parsed = parse_csv(out.read_bytes())
        assert parsed.resolution == 3

    def test_preset_run(self, tmp_path):
        out = tmp_path / "p.png"
        rc = run(["--preset", "fig2b", "--density", "lte50", "--grid", "3",
                  "--trials", "10", "--out", str(out), "--quiet"])
        assert rc == 0 and out.exists()

    def test_config_file(self, tmp_path):
        cfg = ScenarioConfig(lambda_bs_per_km2=6.0, rho_ue_per_km2=0.0,
                             side_km=1.0, resolution=2, trials=15, master_seed=3)
        f = tmp_path / "scenario.json"
        f.write_text(cfg.to_json())
        out = tmp_path / "m.png"
        assert run(["--config", str(f), "--out", str(out), "--quiet"]) == 0

    def test_flag_overrides_config(self, tmp_path, capsys):
        f = tmp_path / "scenario.json"
        f.write_text(ScenarioConfig(lambda_bs_per_km2=6.0, side_km=1.0,
                                    resolution=2, trials=5).to_json())
        out = tmp_path / "m.png"
        assert run(["--config", str(f), "--trials", "7", "--out", str(out),
                    "--quiet"]) == 0


class TestGamma:
    def test_zero_db_is_unity_linear(self, tmp_path):
        out_a = tmp_path / "a.png"
        out_b = tmp_path / "b.png"
        assert run(SMALL + ["--gamma-db", "0", "--out", str(out_a)]) == 0
        assert run(SMALL + ["--out", str(out_b)]) == 0  # default gamma = 1
        assert out_a.read_bytes() == out_b.read_bytes()


class TestErrors:
    def test_unknown_flag_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run(SMALL + ["--bogus"])
        assert exc.value.code == 2

    def test_bad_value_returns_2(self):
        assert run(["--lambda", "-4", "--quiet"]) == 2

    def test_bad_config_file_returns_2(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text("{\"gamma\": -1}")
        assert run(["--config", str(f), "--quiet"]) == 2

    def test_ul_without_tdd_fails(self, tmp_path):
        rc = run(SMALL + ["--direction", "ul", "--out", str(tmp_path / "x.png")])
        assert rc == 1

    def test_antenna_delta_flag(self, tmp_path):
        out = tmp_path / "d.png"
        rc = run(SMALL + ["--antenna-delta-m", "8.5", "--out", str(out)])
        assert rc == 0
