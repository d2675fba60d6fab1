"""Test configuration models and file output"""
import json

import numpy as np
import pandas as pd
import pytest

from app.data.io import load_model, parse_model, read_csv, read_snapshot, write_csv, write_snapshot, write_summary
from app.data.schema import FrontModel, ParamsModel, RunSummary, ScenarioModel, StateModel
from app.errors import ConfigError
from app.solver.scenarios import build_scenario


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return path


class TestModels:
    """Validated configuration files"""

    def test_state_file(self, tmp_path):
        path = write_json(tmp_path / "s.json", {"schema_version": 1, "p": 1.0, "v": [0.1, 0.2], "H": [1.0, 0.0], "S": 0.3})
        state = load_model(path, StateModel).to_state()
        assert state.p == 1.0
        assert np.allclose(state.v, [0.1, 0.2, 0.0])
        print("✅ state file loaded")

    def test_unknown_key(self, tmp_path):
        """Extra keys are configuration errors"""
        path = write_json(tmp_path / "s.json", {"p": 1.0, "velocity": [0.0, 0.0]})
        with pytest.raises(ConfigError) as exc:
            load_model(path, StateModel)
        assert "velocity" in str(exc.value)

    def test_schema_version(self, tmp_path):
        path = write_json(tmp_path / "s.json", {"schema_version": 2, "p": 1.0})
        with pytest.raises(ConfigError):
            load_model(path, StateModel)

    def test_component_count(self, tmp_path):
        path = write_json(tmp_path / "s.json", {"p": 1.0, "v": [0.0, 0.0, 0.0, 0.0]})
        with pytest.raises(ConfigError):
            load_model(path, StateModel)

    def test_bad_json(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_model(path, StateModel)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_model(tmp_path / "absent.json", StateModel)

    def test_scenario_defaults(self):
        """An empty scenario is a zero-source constant state"""
        model = ScenarioModel()
        assert model.source.kind == "zero"
        assert model.basic_state.kind == "constant"
        assert model.mode == "direct"

    def test_params_round_trip(self):
        params = ParamsModel(gamma=1.5, pbar=0.2).to_params()
        assert params.gamma == 1.5 and params.pbar == 0.2

    def test_stiff_gamma_needs_override(self):
        """gamma > 2 is refused unless allowed"""
        with pytest.raises(ConfigError):
            ParamsModel(gamma=2.5).to_params()
        assert ParamsModel(gamma=2.5, allow_stiff=True).to_params().gamma == 2.5

    def test_front_geometry(self):
        geom = FrontModel(dtphi=0.3, d2phi=0.0).geometry()
        assert np.allclose(geom.n, [1.0, 0.0, 0.0])
        assert geom.sigma == pytest.approx(0.3)

    def test_sampled_front(self):
        """phi and phi_t become a FrontFunction; phi_t alone is rejected"""
        front = FrontModel(phi=[0.0, 0.1, 0.0, -0.1, 0.0], phi_t=[0.0, 0.2, 0.0, -0.2, 0.0]).front_function()
        assert np.allclose(front.phi, [0.0, 0.1, 0.0, -0.1, 0.0])
        assert np.allclose(front.dtphi, [0.0, 0.2, 0.0, -0.2, 0.0])
        assert FrontModel().front_function() is None
        with pytest.raises(ConfigError):
            parse_model({"phi_t": [0.0] * 5}, FrontModel)
        with pytest.raises(ConfigError):
            parse_model({"phi": [0.0] * 5, "phi_t": [0.0] * 6}, FrontModel)

    def test_gridded_scenario_file(self, tmp_path):
        """A scenario file with node values and a sampled front reaches the basic state"""
        n1, n2 = 8, 8
        x2 = np.arange(n2) / n2
        phi = 0.05 * np.sin(2.0 * np.pi * x2)
        values = np.zeros((2, n1 + 1, n2, 6))
        values[..., 0] = 1.0
        values[..., 3:5] = [0.8, 0.3]
        values[0, ..., 5], values[1, ..., 5] = 0.5, -0.5
        payload = {
            "schema_version": 1,
            "name": "gridded",
            "basic_state": {"kind": "gridded", "values": values.tolist(), "front": {"phi": phi.tolist()}},
            "grid": {"n1": n1, "n2": n2, "L1": 2.0, "T": 0.05},
        }
        model = load_model(write_json(tmp_path / "scenario.json", payload), ScenarioModel)
        basic = build_scenario(model).basic
        assert np.allclose(basic.real, values)
        assert np.allclose(basic.front.phi, phi)
        assert np.all(basic.front.dtphi == 0.0)
        print("✅ gridded scenario loaded")

    def test_gridded_needs_values(self):
        with pytest.raises(ConfigError):
            parse_model({"basic_state": {"kind": "gridded"}}, ScenarioModel)
        with pytest.raises(ConfigError):
            parse_model({"basic_state": {"kind": "constant", "values": [[[[0.0]]]]}}, ScenarioModel)


class TestOutput:
    """CSV, summaries and binary snapshots"""

    def test_csv_full_precision(self, tmp_path):
        """Floats survive the CSV round trip bit for bit"""
        values = [0.1, 1.0 / 3.0, np.pi * 1e-17, 2.0 ** 0.5]
        path = write_csv(pd.DataFrame({"step": [0, 1, 2, 3], "I": values}), tmp_path / "d.csv")
        back = read_csv(path)
        assert list(back["I"]) == values
        print("✅ CSV keeps 17 significant digits")

    def test_csv_deterministic(self, tmp_path):
        frame = pd.DataFrame({"t": np.linspace(0.0, 1.0, 7), "I": np.exp(np.linspace(0.0, 1.0, 7))})
        a = write_csv(frame, tmp_path / "a.csv").read_bytes()
        b = write_csv(frame, tmp_path / "b.csv").read_bytes()
        assert a == b

    def test_summary(self, tmp_path):
        path = write_summary(RunSummary(command="verify", seed=7, flags={"symmetry": True}), tmp_path / "s.json")
        data = json.loads(path.read_text())
        assert data["schema_version"] == 1
        assert data["seed"] == 7
        assert data["flags"] == {"symmetry": True}

    def test_snapshot(self, tmp_path):
        """Raw little-endian float64 with a JSON sidecar"""
        array = np.arange(24, dtype=float).reshape(2, 3, 4) / 7.0
        bin_path = write_snapshot(tmp_path / "U", array, {"axes": ["side", "x1", "x2"]})
        assert bin_path.stat().st_size == array.size * 8
        data, meta = read_snapshot(tmp_path / "U")
        assert np.array_equal(data, array)
        assert meta["shape"] == [2, 3, 4]
        assert meta["dtype"] == "<f8"
        assert meta["axes"] == ["side", "x1", "x2"]
        print("✅ snapshot written")

    def test_missing_snapshot(self, tmp_path):
        with pytest.raises(ConfigError):
            read_snapshot(tmp_path / "nothing")
