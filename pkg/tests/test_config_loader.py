#!/usr/bin/env python3
"""
Unit tests for run-document loading and validation.

Tests YAML/JSON parsing, field-level error messages, CLI overrides,
unit conversion and the config echo block.
"""

import json
import math
import sys
from pathlib import Path

import pytest
import yaml
from pydantic import ValidationError

# Add lib to path for import
sys.path.insert(0, str(Path(__file__).parent.parent / "lib"))

from shadowqec import __version__
from shadowqec.config import SweepConfig
from shadowqec.config_loader import ConfigLoader
from shadowqec.models import DeviceParams, TransmonParams

CONFIG_DIR = Path(__file__).parent.parent / "configs"


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    """Small lifetime sweep document."""
    path = tmp_path / "run.yaml"
    path.write_text(
        yaml.dump(
            {
                "experiment": "lifetimes",
                "method": "both",
                "device": {"W": 35.0, "Omega": 5.0},
                "lifetimes": {"T1P_grid": [1.0, 10.0]},
            }
        )
    )
    return path


class TestConfigLoader:
    """Test ConfigLoader against files on disk."""

    def test_load_yaml(self, config_file: Path) -> None:
        """Test a YAML document loads with defaults filled in."""
        config = ConfigLoader(config_file).load()
        assert config.method == "both"
        assert config.lifetimes.T1P_grid == [1.0, 10.0]
        assert config.device.delta == 350.0

    def test_load_json(self, tmp_path: Path) -> None:
        """Test JSON documents parse through the same path."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"experiment": "rates", "device": {"gamma_S": 40.0}}))
        config = ConfigLoader(path).load()
        assert config.experiment == "rates"
        assert config.device.gamma_S == 40.0

    def test_empty_file_gives_defaults(self, tmp_path: Path) -> None:
        """Test an empty document is the default run."""
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert ConfigLoader(path).load() == SweepConfig()

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test a nonexistent path."""
        with pytest.raises(FileNotFoundError):
            ConfigLoader(tmp_path / "absent.yaml").load()

    def test_invalid_yaml(self, tmp_path: Path) -> None:
        """Test unparseable YAML is reported."""
        path = tmp_path / "bad.yaml"
        path.write_text("device: [unclosed\n")
        with pytest.raises(yaml.YAMLError):
            ConfigLoader(path).load()

    def test_non_mapping_root(self, tmp_path: Path) -> None:
        """Test a list at the root."""
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ValueError):
            ConfigLoader(path).load()

    def test_overrides_replace_fields(self, config_file: Path) -> None:
        """Test CLI overrides win and None values are ignored."""
        config = ConfigLoader(config_file).load({"seed": 42, "threads": None})
        assert config.seed == 42
        assert config.threads == 1

    def test_validate_reports_fields(self, tmp_path: Path) -> None:
        """Test validation errors name the offending section and field."""
        path = tmp_path / "bad.yaml"
        path.write_text(yaml.dump({"device": {"W": -1.0}, "lifetimes": {"T1P_grid": [1.0, -2.0]}}))
        ok, errors = ConfigLoader(path).validate()
        assert not ok
        assert any(e.startswith("device -> W") for e in errors)
        assert any(e.startswith("lifetimes -> T1P_grid") for e in errors)

    def test_validate_good_file(self, config_file: Path) -> None:
        """Test a valid document passes."""
        assert ConfigLoader(config_file).validate() == (True, [])

    def test_load_rereads_document(self, config_file: Path) -> None:
        """Test each load reflects the file on disk, not an earlier result."""
        loader = ConfigLoader(config_file)
        assert loader.load().lifetimes.T1P_grid == [1.0, 10.0]
        config_file.write_text(yaml.dump({"experiment": "lifetimes", "lifetimes": {"T1P_grid": [3.0]}}))
        assert loader.load().lifetimes.T1P_grid == [3.0]

    def test_save_round_trip(self, tmp_path: Path) -> None:
        """Test saved documents reload to the same config."""
        path = tmp_path / "saved.yaml"
        config = SweepConfig(experiment="plan", seed=3)
        ConfigLoader(path).save(config)
        assert ConfigLoader(path).load() == config

    def test_create_default(self, tmp_path: Path) -> None:
        """Test the default document is written and valid."""
        path = tmp_path / "nested" / "default.yaml"
        ConfigLoader(path).create_default()
        assert path.exists()
        assert ConfigLoader(path).validate()[0]

    @pytest.mark.parametrize("name", ["lifetimes.yaml", "one_over_f.yaml", "telegraph.yaml", "rates.json", "plan.yaml", "transmon.yaml"])
    def test_shipped_configs_valid(self, name: str) -> None:
        """Test every shipped run document validates."""
        ok, errors = ConfigLoader(CONFIG_DIR / name).validate()
        assert ok, errors


class TestSweepConfig:
    """Test schema rules and conversions."""

    def test_dephasing_needs_seed(self) -> None:
        """Test stochastic runs require a master seed."""
        with pytest.raises(ValidationError):
            SweepConfig(experiment="dephasing")
        assert SweepConfig(experiment="dephasing", seed=1).seed == 1

    def test_unknown_field_value(self) -> None:
        """Test an unknown method is rejected."""
        with pytest.raises(ValidationError):
            SweepConfig(method="montecarlo")  # type: ignore[arg-type]

    def test_mhz_conversion(self) -> None:
        """Test MHz entries are multiplied by 2π."""
        params = SweepConfig().device_params(T1P=10.0)
        assert params.W == pytest.approx(2 * math.pi * 35.0)
        assert params.gamma_P == pytest.approx(0.1)
        assert params.gamma_S == 50.0

    def test_angular_units_pass_through(self) -> None:
        """Test rad/µs entries are used as given."""
        config = SweepConfig(units="rad_per_us", device={"W": 200.0})
        assert config.device_params().W == 200.0

    def test_telegraph_grid_order(self) -> None:
        """Test the grid iterates Γ_sw fastest."""
        config = SweepConfig(
            units="rad_per_us",
            telegraph={"W_grid": [1.0, 2.0], "delta_omega10_grid": [3.0, 4.0], "gamma_sw_grid": [5.0, 6.0]},
        )
        grid = config.telegraph_grid()
        assert len(grid) == 8
        assert grid[:2] == [(1.0, 3.0, 5.0), (1.0, 3.0, 6.0)]

    def test_fit_floor_choices(self) -> None:
        """Test the time-domain floor defaults to steady state and rejects unknown modes."""
        assert SweepConfig().lifetimes.fit_floor == "steady_state"
        assert SweepConfig(lifetimes={"fit_floor": "fixed"}).lifetimes.fit_floor == "fixed"
        with pytest.raises(ValidationError):
            SweepConfig(lifetimes={"fit_floor": "zero"})

    def test_transmon_params(self) -> None:
        """Test EJ is rebuilt from EJ/EC."""
        params = SweepConfig().transmon_params()
        assert params.EJ == pytest.approx(15.0)
        assert params.ratio == pytest.approx(50.0)

    def test_echo_block(self) -> None:
        """Test entered and resolved values are both echoed."""
        echo = SweepConfig(seed=5).echo()
        assert echo["entered"]["device"]["W"] == 35.0
        assert echo["resolved"]["device"]["W"] == pytest.approx(2 * math.pi * 35.0)
        assert echo["units"] == "mhz_2pi"
        assert echo["seed"] == 5
        assert echo["version"] == __version__
        json.dumps(echo)


class TestModels:
    """Test parameter model validation."""

    def test_negative_coupling_rejected(self) -> None:
        """Test W ≥ 0."""
        with pytest.raises(ValidationError):
            DeviceParams(W=-1.0, delta=1.0, Omega=1.0)

    def test_with_loss(self) -> None:
        """Test T1P sets Γ_P = 1/T1P."""
        params = DeviceParams(W=1.0, delta=1.0, Omega=1.0).with_loss(4.0)
        assert params.gamma_P == 0.25
        assert params.T1P == 4.0

    def test_lossless_lifetime(self) -> None:
        """Test no loss has no finite T1P."""
        assert DeviceParams(W=1.0, delta=1.0, Omega=1.0).T1P is None

    def test_frozen(self) -> None:
        """Test parameters are immutable."""
        params = DeviceParams(W=1.0, delta=1.0, Omega=1.0)
        with pytest.raises(ValidationError):
            params.W = 2.0  # type: ignore[misc]

    def test_charge_cutoff_minimum(self) -> None:
        """Test n_cutoff ≥ 20."""
        with pytest.raises(ValidationError):
            TransmonParams(EJ=50.0, EC=1.0, n_cutoff=10)
