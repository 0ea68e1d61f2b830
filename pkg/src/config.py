"""
Experiment configuration.

Configurations are JSON files validated by pydantic; command-line flags are
applied as overrides and the result is validated again. validate_config
checks the protocol-level inequalities that pydantic's field constraints
cannot express.
"""

import json
import logging
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import ConfigError, NotPrime
from .field import DEFAULT_PRIME, PrimeField
from .protocol import AttackMode, RoundConfig, round_violations
from .trainer import LrSchedule

logger = logging.getLogger(__name__)


def parse_attack(text):
    """Parse "PoisonModel" or a combination such as "CorruptDistances|PoisonModel"."""
    mode = AttackMode.NONE
    for part in str(text).replace("+", "|").split("|"):
        if part.strip():
            mode |= AttackMode.parse(part.strip())
    return mode


class AdversaryGroup(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: str = "PoisonModel"
    count: int = Field(0, ge=0)

    @field_validator("mode")
    @classmethod
    def known_mode(cls, value):
        parse_attack(value)
        return value

    @property
    def attack(self):
        return parse_attack(self.mode)


class DropoutConfig(BaseModel):
    """`count` honest users, drawn anew every round, stop sending from `phase`."""

    model_config = ConfigDict(extra="forbid")

    count: int = Field(0, ge=0)
    phase: Literal["share", "distance", "aggregate"] = "aggregate"


class LrScheduleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["decay", "constant"] = "decay"
    gamma0: float = Field(0.07, gt=0)
    power: float = Field(0.55, gt=0.5, le=1.0)

    def schedule(self):
        return LrSchedule(kind=self.kind, gamma0=self.gamma0, power=self.power)


class DatasetConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["digits", "gaussian", "csv"] = "digits"
    path: Optional[str] = None
    n_samples: int = Field(2000, ge=2)
    n_features: int = Field(8, ge=1)
    n_classes: int = Field(10, ge=2)
    cluster_std: float = Field(1.0, gt=0)
    test_size: float = Field(0.25, gt=0, lt=1)
    feature_scale: float = Field(1.0, gt=0)


class ExperimentConfig(BaseModel):
    """All inputs of an experiment; defaults reproduce the reference setting."""

    model_config = ConfigDict(extra="forbid")

    N: int = Field(40, ge=1)
    A: int = Field(12, ge=0)
    D: int = Field(0, ge=0)
    T: int = Field(7, ge=0)
    m: int = Field(13, ge=0)
    q: int = Field(1024, ge=1)
    p: int = Field(DEFAULT_PRIME, ge=2)
    rounds: int = Field(100, ge=1)
    seed: int = Field(0, ge=0)
    scheme: Literal["fedavg", "brea", "both"] = "both"
    adversary: List[AdversaryGroup] = Field(
        default_factory=lambda: [AdversaryGroup(mode="PoisonModel", count=12)]
    )
    dropout: DropoutConfig = Field(default_factory=DropoutConfig)
    lr: LrScheduleConfig = Field(default_factory=LrScheduleConfig)
    dataset: DatasetConfig = Field(default_factory=DatasetConfig)
    batch_size: int = Field(50, ge=1)
    local_optimizer: Literal["sgd", "adam"] = "sgd"
    batch_verify: bool = True
    record_timing: bool = False
    moment_warmup: int = Field(10, ge=2)
    out: str = "out"

    @classmethod
    def from_json(cls, path):
        """
        Load a configuration file.

        Raises:
            FileNotFoundError: If the file does not exist
            pydantic.ValidationError: If a field has the wrong type or range
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        return cls.model_validate_json(path.read_text(encoding="utf-8"))

    def with_overrides(self, **overrides):
        """Copy with every non-None override applied, validated again."""
        updates = {key: value for key, value in overrides.items() if value is not None}
        if not updates:
            return self
        return type(self).model_validate({**self.model_dump(), **updates})

    @property
    def byzantine_count(self):
        return sum(group.count for group in self.adversary)

    def round_config(self):
        return RoundConfig.build(
            self.N,
            self.A,
            self.D,
            self.T,
            self.m,
            self.q,
            p=self.p,
            batch_verify=self.batch_verify,
        )

    def write_resolved(self, directory):
        """Write config.resolved.json into directory and return its path."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / "config.resolved.json"
        text = json.dumps(self.model_dump(mode="json"), indent=2) + "\n"
        path.write_text(text, encoding="utf-8")
        return path


def parse_adversary(text, default_count):
    """
    Parse a command-line adversary mix.

    "PoisonModel" puts default_count users in that mode, "PoisonModel:6,
    CorruptDistances:6" gives explicit counts and "none" means no adversary.
    """
    text = text.strip()
    if text.lower() in ("", "none"):
        return []
    groups = []
    for item in text.split(","):
        mode, _, count = item.strip().partition(":")
        count = int(count) if count else default_count
        groups.append(AdversaryGroup(mode=mode.strip(), count=count))
    return groups


def validate_config(cfg):
    """
    Check an experiment configuration beyond per-field constraints.

    Returns:
        list: Violation messages with the numbers involved, empty when the
            configuration can run
    """
    problems = []
    try:
        PrimeField(cfg.p)
    except NotPrime as exc:
        problems.append(f"field: {exc}")
    problems.extend(round_violations(cfg.N, cfg.A, cfg.D, cfg.T, cfg.m, cfg.p))
    half = (cfg.p - 1) // 2
    if cfg.q**2 >= half:
        problems.append(
            f"quantization headroom: q^2 = {cfg.q ** 2} >= (p-1)/2 = {half}"
        )
    if cfg.byzantine_count > cfg.A:
        problems.append(
            f"adversaries: {cfg.byzantine_count} Byzantine users exceed A={cfg.A}"
        )
    if cfg.dropout.count > cfg.D:
        problems.append(f"dropouts: {cfg.dropout.count} per round exceed D={cfg.D}")
    if cfg.byzantine_count + cfg.dropout.count > cfg.N:
        problems.append(
            f"population: {cfg.byzantine_count} Byzantine + "
            f"{cfg.dropout.count} dropped > N={cfg.N}"
        )
    if cfg.dataset.kind == "csv" and not cfg.dataset.path:
        problems.append("dataset: kind 'csv' needs a path")
    if cfg.lr.kind == "constant":
        logger.warning(
            "constant learning rate does not satisfy the decaying step-size conditions"
        )
    return problems


def require_valid(cfg):
    """Raise ConfigError listing every violation."""
    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg
