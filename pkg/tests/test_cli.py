"""Command-line interface: config validation, outputs, exit codes."""

import csv
import json
import math

import numpy as np
import pytest

from trcgauss.awgn import AwgnSpec, r_star_awgn, trc_lower_awgn
from trcgauss.cli import RunConfig, load_config, main

FLAT = {
    "channel": {"power": 2.0, "noise": {"type": "white", "level": 1.0}},
    "beta": 1.0,
    "rates": {"min": 0.0, "max": 0.3, "step": 0.01},
}


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestConfig:
    def test_round_trip(self, tmp_path):
        cfg = load_config(write(tmp_path, FLAT))
        again = RunConfig.from_dict(cfg.to_dict())
        assert again.to_dict() == cfg.to_dict()

    def test_rate_grid_inclusive(self, tmp_path):
        grid = load_config(write(tmp_path, FLAT)).rate_grid()
        assert len(grid) == 31 and grid[-1] == pytest.approx(0.3)

    def test_infinite_temperature(self, tmp_path):
        cfg = dict(FLAT, beta="inf")
        assert math.isinf(load_config(write(tmp_path, cfg)).gld.beta)

    @pytest.mark.parametrize("bad", [
        {"beta": -1.0},
        {"beta": "hot"},
        {"rates": {"min": 0.2, "max": 0.1, "step": 0.01}},
        {"channel": {"power": -2.0, "noise": {"type": "white"}}},
        {"channel": {"power": 2.0, "noise": {"type": "pink"}}},
        {"surprise": 1},
    ])
    def test_invalid_configs_exit_2(self, tmp_path, bad):
        path = write(tmp_path, {**FLAT, **bad})
        assert main(["awgn-curve", "--config", path, "--out", str(tmp_path)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["rates", "--config", str(tmp_path / "none.json")]) == 2

    def test_small_grid_rejected(self, tmp_path):
        assert main(["colored-curve", "--config", write(tmp_path, FLAT), "--grid", "4"]) == 2


class TestCommands:
    def test_awgn_curve(self, tmp_path):
        cfg = dict(FLAT, rates={"values": [0.0, 0.03, 0.05, 0.1]})
        assert main(["awgn-curve", "--config", write(tmp_path, cfg), "--out", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "awgn_curve.csv")
        assert [r["marker"] for r in rows] == ["", "", "r_star", ""]
        spec = AwgnSpec(2.0)
        for r in rows:
            R = float(r["rate"])
            assert float(r["exponent_lower"]) == pytest.approx(trc_lower_awgn(R, spec), abs=1e-15)
            assert float(r["exponent_exact"]) == pytest.approx(float(r["exponent_lower"]), abs=1e-6)
        summary = json.loads((tmp_path / "awgn_summary.json").read_text())
        assert summary["r_star"] == pytest.approx(r_star_awgn(spec))
        assert summary["r_t"] == pytest.approx(0.5 * math.log1p(1 / math.sqrt(2)), abs=1e-6)

    def test_awgn_line_endings(self, tmp_path):
        cfg = dict(FLAT, beta="inf", rates={"values": [0.0, 0.1]})
        assert main(["awgn-curve", "--config", write(tmp_path, cfg), "--out", str(tmp_path)]) == 0
        assert b"\r\n" not in (tmp_path / "awgn_curve.csv").read_bytes()

    def test_awgn_rejects_colored_noise(self, tmp_path):
        cfg = dict(FLAT, channel={"power": 2.0, "noise": {"type": "ar1", "a": 0.5}})
        assert main(["awgn-curve", "--config", write(tmp_path, cfg), "--out", str(tmp_path)]) == 2

    def test_colored_curve_flat_matches_awgn(self, tmp_path):
        cfg = dict(FLAT, rates={"values": [0.0, 0.02, 0.2]})
        assert main(["colored-curve", "--config", write(tmp_path, cfg), "--out", str(tmp_path),
                     "--grid", "8"]) == 0
        rows = read_csv(tmp_path / "colored_curve.csv")
        got = [float(r["exponent"]) for r in rows]
        np.testing.assert_allclose(got, trc_lower_awgn(np.array([0.0, 0.02, 0.2]), AwgnSpec(2.0)),
                                   atol=1e-9)
        assert rows[0]["theta_opt"] == "inf"

    def test_waterpour(self, tmp_path):
        cfg = {"channel": {"power": 1.0, "noise": {"type": "two_level", "low": 0.5, "high": 2.0}},
               "beta": 1.0, "rates": {"values": [0.05]}}
        assert main(["waterpour", "--config", write(tmp_path, cfg), "--out", str(tmp_path),
                     "--grid", "16"]) == 0
        sol = json.loads((tmp_path / "waterpour.json").read_text())["solutions"][0]
        assert sol["achieved_power"] == pytest.approx(1.0, abs=1e-8)
        assert len(read_csv(tmp_path / "waterpour_sx.csv")) == 16

    def test_evd_check(self, tmp_path):
        cfg = {"channel": {"power": 1.0, "noise": {"type": "ar1", "a": 0.5}},
               "beta": 1.0, "rates": {"values": [0.0]}, "evd": {"n": [8, 32], "functions": ["x", "log"]}}
        assert main(["evd-check", "--config", write(tmp_path, cfg), "--out", str(tmp_path),
                     "--grid", "256"]) == 0
        rows = read_csv(tmp_path / "evd_check.csv")
        assert len(rows) == 4
        gaps = {(int(r["n"]), r["function"]): float(r["gap"]) for r in rows}
        assert gaps[(32, "log")] < gaps[(8, "log")]
        assert gaps[(32, "x")] < 1e-10

    def test_simulate(self, tmp_path):
        cfg = dict(FLAT, sim={"n": 2, "ell": 4, "rate": 0.3, "trials_codes": 3,
                              "trials_noise": 20, "seed": 1})
        assert main(["simulate", "--config", write(tmp_path, cfg), "--out", str(tmp_path)]) == 0
        est = json.loads((tmp_path / "sim_estimate.json").read_text())
        assert est["num_messages"] == round(math.exp(2.4))
        assert len(read_csv(tmp_path / "sim_per_code.csv")) == 3

    def test_simulate_needs_section(self, tmp_path):
        assert main(["simulate", "--config", write(tmp_path, FLAT), "--out", str(tmp_path)]) == 2

    def test_rates(self, tmp_path):
        assert main(["rates", "--config", write(tmp_path, FLAT), "--out", str(tmp_path),
                     "--grid", "8"]) == 0
        rates = json.loads((tmp_path / "rates.json").read_text())
        assert rates["r_star"] == pytest.approx(r_star_awgn(AwgnSpec(2.0)))
        assert rates["zero_rate_exponent"] == pytest.approx(0.5)
        assert rates["r_t"] == pytest.approx(0.5 * math.log1p(1 / math.sqrt(2)), abs=1e-6)
        tight = json.loads((tmp_path / "tightness.json").read_text())
        assert "tightness rate exceeds the critical rate" in tight["flags"]
        assert len(read_csv(tmp_path / "zeta_profile.csv")) == 25
