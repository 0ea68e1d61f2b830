"""
Unit tests for experiment configuration.
"""

import json
import logging

import pytest
from pydantic import ValidationError

from config import (
    AdversaryGroup,
    ExperimentConfig,
    LrScheduleConfig,
    parse_adversary,
    parse_attack,
    require_valid,
    validate_config,
)
from errors import ConfigError
from field import DEFAULT_PRIME
from protocol import AttackMode


class TestExperimentConfig:
    """Test cases for ExperimentConfig."""

    def test_defaults(self):
        """Test the reference setting and that it validates."""
        cfg = ExperimentConfig()
        assert (cfg.N, cfg.A, cfg.D, cfg.T, cfg.m, cfg.q) == (40, 12, 0, 7, 13, 1024)
        assert cfg.p == DEFAULT_PRIME
        assert cfg.byzantine_count == 12
        assert validate_config(cfg) == []

    def test_one_user_short(self):
        """Test that N=39 reports the required N=40."""
        problems = validate_config(ExperimentConfig().with_overrides(N=39))
        assert any("need" in p and "40" in p for p in problems)
        with pytest.raises(ConfigError) as excinfo:
            require_valid(ExperimentConfig(N=39))
        assert excinfo.value.violations == problems

    def test_with_overrides(self):
        """Test that None overrides are ignored and others revalidated."""
        cfg = ExperimentConfig()
        assert cfg.with_overrides(N=None, q=None) is cfg
        assert cfg.with_overrides(q=256, seed=None).q == 256
        with pytest.raises(ValidationError):
            cfg.with_overrides(q=0)

    def test_unknown_field_rejected(self):
        """Test that typos in a configuration are errors."""
        with pytest.raises(ValidationError):
            ExperimentConfig(rounds=5, learning_rate=0.1)

    def test_from_json(self, temp_directory):
        """Test loading a file with nested sections."""
        path = temp_directory / "exp.json"
        path.write_text(
            json.dumps(
                {
                    "N": 9,
                    "A": 1,
                    "D": 1,
                    "T": 2,
                    "m": 2,
                    "adversary": [{"mode": "CorruptDistances", "count": 1}],
                    "dropout": {"count": 1, "phase": "share"},
                    "dataset": {"kind": "gaussian", "n_samples": 500},
                }
            ),
            encoding="utf-8",
        )
        cfg = ExperimentConfig.from_json(path)
        assert cfg.N == 9
        assert cfg.adversary[0].attack is AttackMode.CORRUPT_DISTANCES
        assert cfg.dropout.phase == "share"
        assert cfg.dataset.kind == "gaussian"
        assert validate_config(cfg) == []

    def test_from_json_errors(self, temp_directory):
        """Test a missing file and a badly typed field."""
        with pytest.raises(FileNotFoundError):
            ExperimentConfig.from_json(temp_directory / "missing.json")
        path = temp_directory / "bad.json"
        path.write_text('{"N": "many"}', encoding="utf-8")
        with pytest.raises(ValidationError):
            ExperimentConfig.from_json(path)

    def test_write_resolved_round_trip(self, temp_directory):
        """Test that the resolved file loads back to the same config."""
        cfg = ExperimentConfig(rounds=7, seed=11)
        path = cfg.write_resolved(temp_directory / "run")
        assert path.name == "config.resolved.json"
        assert ExperimentConfig.from_json(path) == cfg

    def test_round_config(self):
        """Test the protocol parameters derived from a config."""
        cfg = ExperimentConfig(N=9, A=1, D=1, T=2, m=2, q=64, batch_verify=False)
        round_cfg = cfg.round_config()
        assert (round_cfg.N, round_cfg.T, round_cfg.m, round_cfg.q) == (9, 2, 2, 64)
        assert round_cfg.batch_verify is False
        assert round_cfg.field.p == DEFAULT_PRIME


class TestValidateConfig:
    """Test cases for the cross-field checks."""

    def test_composite_modulus(self):
        """Test that a non-prime p is reported."""
        problems = validate_config(ExperimentConfig(p=2**32))
        assert any(p.startswith("field:") for p in problems)

    def test_quantization_headroom(self):
        """Test q^2 against (p-1)/2."""
        problems = validate_config(ExperimentConfig(q=65536))
        assert any("headroom" in p for p in problems)

    def test_too_many_adversaries_and_dropouts(self):
        """Test adversary and dropout counts against A and D."""
        cfg = ExperimentConfig(
            adversary=[{"mode": "PoisonModel", "count": 13}], dropout={"count": 1}
        )
        problems = " ".join(validate_config(cfg))
        assert "exceed A=12" in problems
        assert "exceed D=0" in problems

    def test_csv_needs_path(self):
        """Test the csv dataset without a path."""
        problems = validate_config(ExperimentConfig(dataset={"kind": "csv"}))
        assert any("csv" in p for p in problems)

    def test_constant_rate_warns(self, caplog):
        """Test the warning for a non-decaying learning rate."""
        with caplog.at_level(logging.WARNING):
            validate_config(ExperimentConfig(lr={"kind": "constant"}))
        assert "constant learning rate" in caplog.text

    def test_decay_power_range(self):
        """Test that the decay power must lie in (0.5, 1]."""
        with pytest.raises(ValidationError):
            LrScheduleConfig(power=0.5)
        assert LrScheduleConfig(power=1.0).schedule()(1) == pytest.approx(0.035)


class TestAdversarySpecs:
    """Test cases for attack and adversary parsing."""

    def test_parse_attack_combinations(self):
        """Test single names and combined modes."""
        assert parse_attack("PoisonModel") is AttackMode.POISON_MODEL
        combined = parse_attack("CorruptDistances|CorruptAggregates")
        assert combined == (
            AttackMode.CORRUPT_DISTANCES | AttackMode.CORRUPT_AGGREGATES
        )
        mixed = parse_attack("InvalidShares+FalseAccusations")
        assert mixed & AttackMode.FALSE_ACCUSATIONS

    def test_parse_adversary(self):
        """Test the none, default-count and explicit-count forms."""
        assert parse_adversary("none", 12) == []
        (group,) = parse_adversary("PoisonModel", 12)
        assert group.count == 12
        groups = parse_adversary("PoisonModel:6, CorruptDistances:6", 12)
        assert [(g.mode, g.count) for g in groups] == [
            ("PoisonModel", 6),
            ("CorruptDistances", 6),
        ]

    def test_unknown_mode(self):
        """Test that an unknown attack name fails validation."""
        with pytest.raises(ValidationError):
            AdversaryGroup(mode="Sabotage", count=1)
        with pytest.raises(ValidationError):
            parse_adversary("Sabotage:2", 12)
