"""
Experiment runner: training loop, metrics and per-round outcome files.

This module runs J rounds of FedAvg and/or secure aggregation on the
configured task, writes one metrics.csv row per (scheme, round) and one
outcome JSON per secure round.
"""

import json
import logging
from dataclasses import asdict, dataclass, field as dataclass_field
from pathlib import Path

import numpy as np
import pandas as pd

from .config import require_valid
from .network import Phase
from .trainer import (
    FederatedTrainer,
    MomentMonitor,
    evaluate,
    init_model,
    load_csv_dataset,
    load_digits_dataset,
    make_gaussian_mixture,
)
from .utils import STREAM_BYZANTINE, STREAM_DROPOUT, derive_rng

logger = logging.getLogger(__name__)

METRICS_COLUMNS = [
    "round",
    "scheme",
    "loss",
    "accuracy",
    "selected",
    "accusations",
    "errors_found",
    "ms",
]


@dataclass(frozen=True)
class MetricsRow:
    round: int
    scheme: str
    loss: float
    accuracy: float
    selected: str
    accusations: int
    errors_found: str
    ms: float = 0.0


@dataclass
class ExperimentResult:
    """Metrics rows, final models per scheme and the secure rounds' outcomes."""

    rows: list = dataclass_field(default_factory=list)
    models: dict = dataclass_field(default_factory=dict)
    outcomes: list = dataclass_field(default_factory=list)
    moment_flags: list = dataclass_field(default_factory=list)

    def frame(self):
        return pd.DataFrame([asdict(row) for row in self.rows], columns=METRICS_COLUMNS)

    def scheme_rows(self, scheme):
        return [row for row in self.rows if row.scheme == scheme]

    def final_loss(self, scheme):
        return self.scheme_rows(scheme)[-1].loss

    def final_accuracy(self, scheme):
        return self.scheme_rows(scheme)[-1].accuracy

    @property
    def aborted_rounds(self):
        return sum(1 for outcome in self.outcomes if outcome["aborted"])

    @property
    def all_aborted(self):
        """True when secure rounds ran and none of them completed."""
        return bool(self.outcomes) and self.aborted_rounds == len(self.outcomes)


def _ids(users):
    return " ".join(str(u) for u in users)


def build_dataset(cfg):
    dataset = _load_dataset(cfg)
    if cfg.dataset.feature_scale != 1.0:
        dataset = dataset.scaled(cfg.dataset.feature_scale)
    return dataset


def _load_dataset(cfg):
    data = cfg.dataset
    if data.kind == "digits":
        return load_digits_dataset(seed=cfg.seed, test_size=data.test_size)
    if data.kind == "gaussian":
        return make_gaussian_mixture(
            n_samples=data.n_samples,
            n_features=data.n_features,
            n_classes=data.n_classes,
            cluster_std=data.cluster_std,
            seed=cfg.seed,
            test_size=data.test_size,
        )
    return load_csv_dataset(data.path, seed=cfg.seed, test_size=data.test_size)


def assign_adversaries(cfg):
    """
    Place the configured adversaries on users by a seeded permutation.

    Returns:
        dict: user index -> AttackMode, fixed for the whole experiment
    """
    rng = derive_rng(cfg.seed, 0, 0, STREAM_BYZANTINE)
    order = rng.permutation(np.arange(1, cfg.N + 1))
    placement = {}
    position = 0
    for group in cfg.adversary:
        for user in order[position : position + group.count]:
            placement[int(user)] = group.attack
        position += group.count
    return dict(sorted(placement.items()))


def dropouts_for_round(cfg, round_index, byzantine):
    """Honest users dropping this round: user -> Phase they stop sending from."""
    if cfg.dropout.count == 0:
        return {}
    honest = [u for u in range(1, cfg.N + 1) if u not in byzantine]
    rng = derive_rng(cfg.seed, round_index, 0, STREAM_DROPOUT)
    chosen = rng.choice(honest, size=min(cfg.dropout.count, len(honest)), replace=False)
    phase = Phase[cfg.dropout.phase.upper()]
    return {int(u): phase for u in sorted(chosen)}


class ExperimentRunner:
    """
    Runs one configured experiment and owns its output directory.

    Args:
        cfg (ExperimentConfig): Validated configuration
        out_dir: Output directory, defaults to cfg.out
        write (bool): Write metrics.csv, outcome files and the resolved config
    """

    def __init__(self, cfg, out_dir=None, write=True):
        self.cfg = cfg
        self.out_dir = Path(out_dir if out_dir is not None else cfg.out)
        self.write = write
        self.dataset = build_dataset(cfg)
        self.byzantine = assign_adversaries(cfg)
        self.round_cfg = None

    def schemes(self):
        return ["fedavg", "brea"] if self.cfg.scheme == "both" else [self.cfg.scheme]

    def run(self):
        """
        Run every requested scheme for cfg.rounds rounds.

        Returns:
            ExperimentResult: Rows, final models and outcomes
        """
        result = ExperimentResult()
        if self.write:
            self.cfg.write_resolved(self.out_dir)
        logger.info(
            "experiment: N=%d A=%d D=%d T=%d m=%d q=%d, %d Byzantine users at %s",
            self.cfg.N,
            self.cfg.A,
            self.cfg.D,
            self.cfg.T,
            self.cfg.m,
            self.cfg.q,
            len(self.byzantine),
            sorted(self.byzantine),
        )
        for scheme in self.schemes():
            if scheme == "fedavg":
                result.models[scheme] = self._run_fedavg(result)
            else:
                result.models[scheme] = self._run_brea(result)
        if self.write:
            self.save_metrics(result.frame())
        return result

    def _trainer(self):
        return FederatedTrainer(
            self.dataset,
            self.cfg.N,
            batch_size=self.cfg.batch_size,
            seed=self.cfg.seed,
            local_optimizer=self.cfg.local_optimizer,
        )

    def _run_fedavg(self, result):
        cfg = self.cfg
        trainer = self._trainer()
        schedule = cfg.lr.schedule()
        quant = self._round_config().quant
        w = init_model(self.dataset)
        for t in range(cfg.rounds):
            w, chosen = trainer.fedavg_step(
                w, t, cfg.m, schedule(t), byzantine=self.byzantine, quant=quant
            )
            loss, accuracy = evaluate(w, self.dataset)
            row = MetricsRow(t, "fedavg", loss, accuracy, _ids(chosen), 0, "")
            result.rows.append(row)
            logger.info("fedavg round %d: loss %.4f accuracy %.3f", t, loss, accuracy)
        return w

    def _round_config(self):
        if self.round_cfg is None:
            self.round_cfg = self.cfg.round_config()
        return self.round_cfg

    def _run_brea(self, result):
        cfg = self.cfg
        trainer = self._trainer()
        schedule = cfg.lr.schedule()
        round_cfg = self._round_config()
        monitor = MomentMonitor(warmup=cfg.moment_warmup)
        w = init_model(self.dataset)
        for t in range(cfg.rounds):
            dropouts = dropouts_for_round(cfg, t, self.byzantine)
            w_sq = float(np.dot(w, w))
            w, outcome, round_ = trainer.brea_step(
                w,
                t,
                round_cfg,
                schedule(t),
                byzantine=self.byzantine,
                dropouts=dropouts,
            )
            loss, accuracy = evaluate(w, self.dataset)
            record = outcome.to_dict()
            record.update(loss=loss, accuracy=accuracy, lr=schedule(t))
            if round_ is not None:
                g_sq = self._max_quantized_norm(round_)
                flagged = monitor.observe(t, w_sq, g_sq)
                record.update(
                    grad_sq=g_sq, moment_bound=monitor.bound(w_sq), moment_flag=flagged
                )
                if flagged:
                    result.moment_flags.append(t)
            result.outcomes.append(record)
            ms = sum(outcome.timings_ms.values()) if cfg.record_timing else 0.0
            result.rows.append(
                MetricsRow(
                    t,
                    "brea",
                    loss,
                    accuracy,
                    _ids(outcome.selected),
                    outcome.accusation_count,
                    _ids(outcome.error_positions),
                    round(ms, 3),
                )
            )
            if outcome.aborted:
                logger.info("brea round %d aborted in %s", t, outcome.abort_phase)
            else:
                logger.info(
                    "brea round %d: loss %.4f accuracy %.3f selected %s",
                    t,
                    loss,
                    accuracy,
                    list(outcome.selected),
                )
            if self.write:
                self._write_outcome(record)
        return w

    def _max_quantized_norm(self, round_):
        field, q = self.round_cfg.field, self.round_cfg.q
        norms = [
            float(np.sum((np.asarray(state.preimage(field), float) / q) ** 2))
            for state in round_.users.values()
            if not state.is_byzantine and state.quantized is not None
        ]
        return max(norms) if norms else 0.0

    def _write_outcome(self, record):
        directory = self.out_dir / "outcomes"
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"round_{record['round']:04d}.json"
        text = json.dumps(record, indent=2, default=float) + "\n"
        path.write_text(text, encoding="utf-8")

    def save_metrics(self, frame, filename="metrics.csv"):
        """Save the metrics table and return its path."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / filename
        frame.to_csv(path, index=False, encoding="utf-8")
        logger.info("metrics saved to %s", path)
        return path

    def load_metrics(self, filename="metrics.csv"):
        """Load a metrics table written by save_metrics."""
        path = self.out_dir / filename
        if not path.exists():
            raise FileNotFoundError(f"metrics file not found: {path}")
        return pd.read_csv(path, encoding="utf-8", keep_default_na=False)


def run_experiment(cfg, out_dir=None, write=True):
    """
    Validate the configuration and run it.

    Raises:
        ConfigError: If validate_config reports any violation
    """
    require_valid(cfg)
    return ExperimentRunner(cfg, out_dir=out_dir, write=write).run()


def sweep_q(cfg, q_values, out_dir=None, write=True):
    """
    Run the same experiment once per quantization level.

    Every run shares the seed; outputs go to <out>/q_<q>/.

    Returns:
        dict: q -> ExperimentResult
    """
    base = Path(out_dir if out_dir is not None else cfg.out)
    configs = {q: require_valid(cfg.with_overrides(q=q)) for q in q_values}
    results = {}
    for q, run_cfg in configs.items():
        logger.info("sweep: q=%d", q)
        runner = ExperimentRunner(run_cfg, out_dir=base / f"q_{q}", write=write)
        results[q] = runner.run()
    return results
