"""End-to-end CLI runs: determinism, file contents, exit codes."""
import filecmp
import json
import math

import numpy as np
import pytest

from socaccel import derive_modes, TrapConfig
from socaccel.cli import main

WT = 2 * math.pi * 1000.0


def base_config():
    return {
        "schema_version": 1,
        "trap": {"mass": 1.44316e-25, "omega_tilde": WT, "epsilon": 3.0},
        "species": "Rb87",
        "sequence": {"kind": "up", "r0": [6.8e-7, 0.0], "t": 4 * math.pi / WT},
        "drive": {"kind": "circular", "amplitude": 0.68, "omega": 1.5 * WT, "sense": -1},
        "thermal": {"n_plus": 1.0, "n_minus": 1.0},
        "monte_carlo": {"count": 200, "seed": 42},
        "apparatus": {
            "temperature": 1e-6,
            "layer_spacing": 1e-6,
            "homogeneity_radius": 25e-6,
            "omega_tilde": WT,
            "epsilon": 22.0,
            "atoms_per_layer": 1e6,
        },
        "trajectory": {"kind": "cp", "r0": [6.8e-7, 0.0], "t": math.pi / WT, "points": 200},
        # window chosen so both mode frequencies fall on echo-curve zeros
        "response": {"points": 2048, "t": 4 * math.pi / WT},
        "sweep": {"atoms_min": 100, "atoms_max": 1e6, "points": 7},
    }


def write_config(tmp_path, cfg, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run(cmd, cfg_path, out_dir, *extra):
    return main([cmd, "--config", cfg_path, "--out", str(out_dir), *extra])


@pytest.mark.parametrize("cmd", ["modes", "trajectory", "response", "thermal", "sensitivity"])
def test_repeat_runs_are_byte_identical(tmp_path, cmd):
    cfg_path = write_config(tmp_path, base_config())
    d1, d2 = tmp_path / "one", tmp_path / "two"
    assert run(cmd, cfg_path, d1) == 0
    assert run(cmd, cfg_path, d2) == 0
    names = sorted(p.name for p in d1.iterdir())
    assert names == sorted(p.name for p in d2.iterdir()) and names
    for name in names:
        assert filecmp.cmp(d1 / name, d2 / name, shallow=False), f"{cmd}/{name} differs"


class TestModes:
    def test_report_contents(self, tmp_path, capsys):
        cfg_path = write_config(tmp_path, base_config())
        assert run("modes", cfg_path, tmp_path / "out") == 0
        report = json.loads((tmp_path / "out" / "modes.json").read_text())
        assert abs(report["epsilon"] - 3.0) < 1e-12
        assert abs(report["omega_plus"] - 3.0 * report["omega_minus"]) < 1e-9 * report["omega_plus"]
        assert abs(report["omega_tilde"] - WT) < 1e-9 * WT
        out = capsys.readouterr().out
        assert "omega_plus" in out and "l_osc" in out

    def test_uncoupled_trap_degenerate_modes(self, tmp_path):
        cfg = base_config()
        cfg["trap"] = {"mass": 1.44316e-25, "omega0": WT, "omega_c": 0.0}
        cfg_path = write_config(tmp_path, cfg)
        assert run("modes", cfg_path, tmp_path / "out") == 0
        report = json.loads((tmp_path / "out" / "modes.json").read_text())
        assert report["omega_plus"] == report["omega_minus"]
        assert report["epsilon"] == 1.0


class TestTrajectory:
    def load(self, out_dir):
        data = np.loadtxt(out_dir / "trajectory.csv", delimiter=",", skiprows=1)
        header = (out_dir / "trajectory.csv").read_text().splitlines()[0]
        assert header == "t_s,x_up_m,y_up_m,x_down_m,y_down_m"
        return data

    def test_up_starts_at_displacement_and_mirrors(self, tmp_path):
        cfg = base_config()
        cfg["trajectory"] = {"kind": "up", "r0": [6.8e-7, 0.0], "t": 2 * math.pi / WT, "points": 401}
        cfg_path = write_config(tmp_path, cfg)
        assert run("trajectory", cfg_path, tmp_path / "out") == 0
        data = self.load(tmp_path / "out")
        assert data[0, 0] == 0.0
        assert data[0, 1] == 6.8e-7 and data[0, 2] == 0.0
        assert data[0, 3] == 6.8e-7 and data[0, 4] == 0.0
        # spin paths mirror across the release axis (x here)
        assert np.allclose(data[:, 1], data[:, 3], rtol=0, atol=1e-12 * 6.8e-7)
        assert np.allclose(data[:, 2], -data[:, 4], rtol=0, atol=1e-12 * 6.8e-7)

    def test_cp_path_closes_at_four_t(self, tmp_path):
        cfg_path = write_config(tmp_path, base_config())  # cp, t = pi/WT
        assert run("trajectory", cfg_path, tmp_path / "out") == 0
        data = self.load(tmp_path / "out")
        t_seg = math.pi / WT
        assert abs(data[-1, 0] - 4 * t_seg) < 1e-15
        for col in (1, 2, 3, 4):
            assert abs(data[-1, col] - data[0, col]) < 1e-9 * 6.8e-7, f"column {col} did not close"

    def test_json_format(self, tmp_path):
        cfg_path = write_config(tmp_path, base_config())
        assert run("trajectory", cfg_path, tmp_path / "out", "--format", "json") == 0
        payload = json.loads((tmp_path / "out" / "trajectory.json").read_text())
        assert set(payload) == {"t_s", "up_m", "down_m"}
        assert len(payload["t_s"]) == len(payload["up_m"])

    def test_bad_kind_is_config_error(self, tmp_path):
        cfg = base_config()
        cfg["trajectory"]["kind"] = "spiral"
        cfg_path = write_config(tmp_path, cfg)
        assert run("trajectory", cfg_path, tmp_path / "out") == 2


class TestResponse:
    def test_curves_and_summary(self, tmp_path):
        cfg_path = write_config(tmp_path, base_config())
        out = tmp_path / "out"
        assert run("response", cfg_path, out) == 0
        assert {p.name for p in out.iterdir()} == {
            "response_up.csv", "response_cp.csv", "response_summary.json",
        }
        cp = np.loadtxt(out / "response_cp.csv", delimiter=",", skiprows=1)
        assert cp[0, 1] == 0.0 and cp[0, 2] == 0.0, "echo curve must vanish at DC"
        summary = json.loads((out / "response_summary.json").read_text())
        modes = derive_modes(TrapConfig(1.44316e-25, 2 * WT * math.sqrt(3.0) / 4.0, 2 * WT * 2.0 / 4.0))
        spacing = cp[1, 0] - cp[0, 0]
        zeros = summary["cp"]["zeros_rad_per_s"]
        for target in (0.0, modes.omega_minus, modes.omega_plus):
            assert min(abs(z - target) for z in zeros) <= spacing / 2.0
        assert summary["up"]["main_lobe_fwhm_rad_per_s"] > 0

    def test_rescale_flag_is_plotting_only(self, tmp_path):
        cfg_path = write_config(tmp_path, base_config())
        plain, scaled = tmp_path / "plain", tmp_path / "scaled"
        assert run("response", cfg_path, plain) == 0
        assert run("response", cfg_path, scaled, "--rescale-cp") == 0
        a = np.loadtxt(plain / "response_cp.csv", delimiter=",", skiprows=1)
        b = np.loadtxt(scaled / "response_cp.csv", delimiter=",", skiprows=1)
        assert np.array_equal(b[:, 1], 4.0 * a[:, 1])
        assert np.array_equal(b[:, 2], 4.0 * a[:, 2])
        assert np.allclose(b[:, 3], 16.0 * a[:, 3], rtol=1e-12, atol=0)
        s_plain = json.loads((plain / "response_summary.json").read_text())
        s_scaled = json.loads((scaled / "response_summary.json").read_text())
        assert s_scaled["rescale_cp"] is True
        assert s_scaled["cp"] == s_plain["cp"], "summary must describe the unscaled curve"
        assert np.array_equal(
            np.loadtxt(plain / "response_up.csv", delimiter=",", skiprows=1),
            np.loadtxt(scaled / "response_up.csv", delimiter=",", skiprows=1),
        )

    def test_unresolved_grid_is_numerical_failure(self, tmp_path):
        cfg = base_config()
        cfg["response"]["points"] = 32
        cfg_path = write_config(tmp_path, cfg)
        assert run("response", cfg_path, tmp_path / "out") == 4


class TestThermal:
    def test_report_and_seed_override(self, tmp_path):
        cfg_path = write_config(tmp_path, base_config())
        d1, d2, d3 = tmp_path / "a", tmp_path / "b", tmp_path / "c"
        assert run("thermal", cfg_path, d1) == 0
        assert run("thermal", cfg_path, d2, "--seed", "42") == 0
        assert run("thermal", cfg_path, d3, "--seed", "43") == 0
        assert filecmp.cmp(d1 / "thermal.json", d2 / "thermal.json", shallow=False)
        assert not filecmp.cmp(d1 / "thermal.json", d3 / "thermal.json", shallow=False)
        payload = json.loads((d1 / "thermal.json").read_text())
        assert payload["sequence"] == "up"
        assert payload["count"] == 200 and payload["seed"] == 42
        assert 0.0 < payload["suppression"] < 1.0
        assert payload["mc_stderr"] > 0.0

    def test_zero_temperature_suppression_is_unity(self, tmp_path):
        cfg = base_config()
        cfg["thermal"] = {"temperature": 0.0}
        cfg["monte_carlo"]["count"] = 100
        cfg_path = write_config(tmp_path, cfg)
        assert run("thermal", cfg_path, tmp_path / "out") == 0
        payload = json.loads((tmp_path / "out" / "thermal.json").read_text())
        assert payload["suppression"] == 1.0
        assert abs(payload["mc_mean"] - payload["analytic"]) < 1e-13


class TestSensitivity:
    def test_report_and_sweeps(self, tmp_path):
        cfg_path = write_config(tmp_path, base_config())
        out = tmp_path / "out"
        assert run("sensitivity", cfg_path, out) == 0
        report = json.loads((out / "sensitivity.json").read_text())
        assert report["n_layers"] == 25
        assert abs(report["N_c"] - 218.2) < 1e-3 * 218.2
        s_sweep = np.loadtxt(out / "sweep_s_vs_n.csv", delimiter=",", skiprows=1)
        assert s_sweep.shape == (7, 3)
        s = s_sweep[:, 2]
        assert np.all(s[:-1] >= s[1:] * (1 - 1e-12)), "S must not increase with atoms"
        bw = np.loadtxt(out / "sweep_bandwidth_vs_n.csv", delimiter=",", skiprows=1)
        above_nc = bw[bw[:, 0] > 1.5 * report["N_c"]][:, 1]
        # small-N optima can pin to the scan boundary, so only monotone overall
        assert np.all(np.diff(above_nc) >= 0), "bandwidth must not fall above N_c"
        assert above_nc[-1] > 10 * above_nc[0], "bandwidth should grow strongly at large N"

    def test_infeasible_geometry_exit_code(self, tmp_path):
        cfg = base_config()
        cfg["apparatus"]["temperature"] = 1e-3
        cfg_path = write_config(tmp_path, cfg)
        assert run("sensitivity", cfg_path, tmp_path / "out") == 3


class TestConfigValidation:
    def test_unknown_top_level_key(self, tmp_path):
        cfg = base_config()
        cfg["tarp"] = {}
        assert run("modes", write_config(tmp_path, cfg), tmp_path / "out") == 2

    def test_unknown_nested_key(self, tmp_path):
        cfg = base_config()
        cfg["trap"]["massx"] = 1.0
        assert run("modes", write_config(tmp_path, cfg), tmp_path / "out") == 2

    def test_invalid_mass(self, tmp_path):
        cfg = base_config()
        cfg["trap"]["mass"] = -1.0
        assert run("modes", write_config(tmp_path, cfg), tmp_path / "out") == 2

    def test_missing_schema_version(self, tmp_path):
        cfg = base_config()
        del cfg["schema_version"]
        assert run("modes", write_config(tmp_path, cfg), tmp_path / "out") == 2

    def test_unsupported_schema_version(self, tmp_path):
        cfg = base_config()
        cfg["schema_version"] = 2
        assert run("modes", write_config(tmp_path, cfg), tmp_path / "out") == 2

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["modes", "--config", str(path), "--out", str(tmp_path / "out")]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["modes", "--config", str(tmp_path / "absent.json")]) == 2

    def test_seed_must_fit_64_bits(self, tmp_path):
        cfg_path = write_config(tmp_path, base_config())
        assert main(["thermal", "--config", cfg_path, "--out", str(tmp_path / "out"), "--seed", "-1"]) == 2
