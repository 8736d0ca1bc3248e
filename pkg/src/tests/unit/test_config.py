"""
Unit Tests for Configuration

Usage:
    pytest src/tests/unit/test_config.py -v
"""

import pytest

from facreg.core.config import (
    Config,
    SolverConfig,
    WeightMode,
    load_config,
    parse_config,
)
from facreg.errors import ConfigError
from facreg.models.spaces import Attribute


# ============ Default Tests ============

class TestDefaults:
    """Tests for default settings"""

    def test_defaults(self):
        """Test load_config without a path"""
        config = load_config()
        assert config.weights.mode == WeightMode.AUTO
        assert config.pruning.enabled is True
        assert config.prune_radius_factor == 5.0
        assert config.solver.time_limit_s == 300.0
        assert config.solver.workers == 1

    def test_pruning_toggle(self):
        """Test disabling pruning clears the radius"""
        config = Config().with_pruning(False)
        assert config.prune_radius_factor is None
        assert Config().prune_radius_factor == 5.0

    def test_frozen(self):
        """Test configs are immutable"""
        with pytest.raises(Exception):
            SolverConfig().workers = 4

    def test_to_dict(self):
        """Test config serialization"""
        data = Config().to_dict()
        assert data["weights"]["mode"] == "auto"
        assert data["solver"]["time_limit_s"] == 300.0


# ============ File Loading Tests ============

class TestLoadConfig:
    """Tests for TOML and YAML loading"""

    def test_toml(self, tmp_path):
        """Test a TOML file with manual weights"""
        path = tmp_path / "facreg.toml"
        path.write_text(
            "[weights]\n"
            'mode = "manual"\n'
            "[weights.omega]\n"
            "p = 0.5\n"
            "o = 0.0\n"
            "[solver]\n"
            "time_limit_s = 30\n"
            "workers = 2\n"
        )
        config = load_config(path)
        assert config.weights.mode == WeightMode.MANUAL
        assert config.weights.omega.get(Attribute.P) == 0.5
        assert config.weights.omega.get(Attribute.O) == 0.0
        assert config.weights.omega.get(Attribute.Z) == 1.0
        assert config.solver.workers == 2

    def test_yaml(self, tmp_path):
        """Test a YAML file"""
        path = tmp_path / "facreg.yaml"
        path.write_text("pruning:\n  enabled: false\nreport_unpruned: false\n")
        config = load_config(path)
        assert config.prune_radius_factor is None
        assert config.report_unpruned is False

    def test_empty_yaml(self, tmp_path):
        """Test an empty YAML file gives the defaults"""
        path = tmp_path / "empty.yml"
        path.write_text("")
        assert load_config(path) == Config()

    def test_unknown_key(self):
        """Test typos are reported with their dotted key"""
        with pytest.raises(ConfigError, match="solver.time_limit"):
            parse_config({"solver": {"time_limit": 10}})

    def test_negative_weight(self):
        """Test negative weights are rejected"""
        with pytest.raises(ConfigError, match="weights.omega.z"):
            parse_config({"weights": {"omega": {"z": -1}}})

    def test_non_positive_time_limit(self):
        """Test time limit must be positive"""
        with pytest.raises(ConfigError):
            parse_config({"solver": {"time_limit_s": 0}})

    def test_unsupported_format(self, tmp_path):
        """Test unknown suffixes raise"""
        path = tmp_path / "facreg.ini"
        path.write_text("[solver]\n")
        with pytest.raises(ConfigError, match="unsupported"):
            load_config(path)

    def test_malformed_toml(self, tmp_path):
        """Test TOML syntax errors raise ConfigError"""
        path = tmp_path / "bad.toml"
        path.write_text("[solver\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        """Test a missing file raises ConfigError"""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.toml")
