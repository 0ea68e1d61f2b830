"""
Desk-scale federated learning task for exercising the protocol.

Users hold equal i.i.d. shares of a small classification dataset and train a
multinomial logistic regression model. Each round every user reports a local
model (its mini-batch gradient, or a local ADAM step) and the server either
sums m random ones (FedAvg) or runs a secure aggregation round over them.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.optimize import nnls
from scipy.special import softmax
from sklearn.datasets import load_digits, make_blobs
from sklearn.metrics import accuracy_score, log_loss
from sklearn.model_selection import train_test_split

from .errors import BadParams, EmptyPartition, RoundAbort
from .protocol import AttackMode, BreaRound
from .quantize import unmap_phi_vector
from .utils import STREAM_FEDAVG, STREAM_GRADIENT, derive_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dataset:
    """Train/test split of a labelled dataset."""

    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    n_classes: int
    intercept: float = 1.0

    @property
    def n_features(self):
        return self.X_train.shape[1]

    @property
    def dim(self):
        """Parameter count of the softmax model: (features + bias) * classes."""
        return (self.n_features + 1) * self.n_classes

    def scaled(self, factor):
        """Copy with the features and the intercept column multiplied by factor."""
        return replace(
            self,
            X_train=self.X_train * factor,
            X_test=self.X_test * factor,
            intercept=self.intercept * factor,
        )

    @classmethod
    def from_arrays(cls, X, y, seed=0, test_size=0.25):
        X = np.asarray(X, dtype=np.float64)
        labels, y = np.unique(np.asarray(y), return_inverse=True)
        X_train, X_test, y_train, y_test = train_test_split(
            X, y, test_size=test_size, random_state=seed, stratify=y
        )
        return cls(X_train, y_train, X_test, y_test, n_classes=len(labels))


def load_digits_dataset(seed=0, test_size=0.25):
    """8x8 handwritten digits with pixels scaled to [0, 1]."""
    digits = load_digits()
    return Dataset.from_arrays(digits.data / 16.0, digits.target, seed, test_size)


def make_gaussian_mixture(
    n_samples=2000,
    n_features=8,
    n_classes=10,
    cluster_std=1.0,
    seed=0,
    test_size=0.25,
):
    X, y = make_blobs(
        n_samples=n_samples,
        n_features=n_features,
        centers=n_classes,
        cluster_std=cluster_std,
        random_state=seed,
    )
    # Keep features on a unit scale so quantized gradients stay small.
    X = (X - X.mean(axis=0)) / X.std(axis=0)
    return Dataset.from_arrays(X, y, seed, test_size)


def load_csv_dataset(path, seed=0, test_size=0.25):
    """
    Load one sample per row with the label in the last column.

    Args:
        path: CSV file path
        seed (int): Seed for the train/test split
        test_size (float): Fraction held out for testing

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the file has fewer than two columns
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    frame = pd.read_csv(path)
    if frame.shape[1] < 2:
        raise ValueError(f"{path} needs feature columns and a label column")
    features = frame.iloc[:, :-1].to_numpy(dtype=np.float64)
    return Dataset.from_arrays(features, frame.iloc[:, -1].to_numpy(), seed, test_size)


def partition(n_samples, n_users, rng):
    """
    Shuffle sample indices and split them into n_users equal parts.

    Samples beyond n_users * (n_samples // n_users) are left out.

    Returns:
        dict: user index (1..n_users) -> index array

    Raises:
        EmptyPartition: If there are fewer samples than users
    """
    size = n_samples // n_users
    if size == 0:
        raise EmptyPartition(f"{n_samples} samples cannot feed {n_users} users")
    order = rng.permutation(n_samples)
    return {
        user: order[(user - 1) * size : user * size]
        for user in range(1, n_users + 1)
    }


# Softmax regression


def init_model(dataset):
    return np.zeros(dataset.dim)


def _augment(X, intercept=1.0):
    return np.hstack([X, np.full((X.shape[0], 1), intercept)])


def predict_proba(w, X, n_classes, intercept=1.0):
    weights = np.asarray(w, dtype=np.float64).reshape(-1, n_classes)
    return softmax(_augment(X, intercept) @ weights, axis=1)


def cross_entropy(w, X, y, n_classes, intercept=1.0):
    loss, _ = score_predictions(predict_proba(w, X, n_classes, intercept), y)
    return loss


def full_gradient(w, X, y, n_classes, intercept=1.0):
    """Gradient of the mean cross-entropy over (X, y)."""
    if len(y) == 0:
        raise EmptyPartition("gradient of an empty sample set")
    X_aug = _augment(X, intercept)
    residual = softmax(X_aug @ np.asarray(w).reshape(-1, n_classes), axis=1)
    residual[np.arange(len(y)), y] -= 1.0
    return (X_aug.T @ residual / len(y)).ravel()


def local_gradient(w, X, y, batch_size, rng, n_classes, intercept=1.0):
    """
    Mini-batch gradient on a uniformly sampled batch without replacement.

    Args:
        w (np.ndarray): Current global model
        X, y: The user's partition
        batch_size (int): Samples per batch, at most the partition size
        rng (np.random.Generator): Batch sampler
        n_classes (int): Number of classes
        intercept (float): Value of the constant input column

    Raises:
        EmptyPartition: If the partition is empty
        BadParams: If batch_size exceeds the partition
    """
    if len(y) == 0:
        raise EmptyPartition("user partition has no samples")
    if batch_size > len(y):
        raise BadParams(f"batch of {batch_size} from a partition of {len(y)}")
    batch = rng.choice(len(y), size=batch_size, replace=False)
    return full_gradient(w, X[batch], y[batch], n_classes, intercept)


def score_predictions(proba, y):
    """Cross-entropy and accuracy of class probabilities against labels."""
    n_classes = proba.shape[1]
    loss = float(log_loss(y, proba, labels=list(range(n_classes))))
    accuracy = float(accuracy_score(y, np.argmax(proba, axis=1)))
    return loss, accuracy


def evaluate(w, dataset):
    """
    Training cross-entropy and test accuracy of a model.

    Returns:
        tuple: (cross_entropy, accuracy)
    """
    loss = cross_entropy(
        w, dataset.X_train, dataset.y_train, dataset.n_classes, dataset.intercept
    )
    proba = predict_proba(w, dataset.X_test, dataset.n_classes, dataset.intercept)
    _, accuracy = score_predictions(proba, dataset.y_test)
    return loss, accuracy


@dataclass(frozen=True)
class LrSchedule:
    """gamma(t) = gamma0 / (1 + t)^power for "decay", gamma0 for "constant"."""

    kind: str = "decay"
    gamma0: float = 0.07
    power: float = 0.55

    def __post_init__(self):
        if self.kind not in ("decay", "constant"):
            raise BadParams(f"unknown learning-rate schedule {self.kind!r}")
        if self.gamma0 <= 0:
            raise BadParams("gamma0 must be positive")
        if self.kind == "decay" and not 0.5 < self.power <= 1.0:
            raise BadParams(f"decay power {self.power} must lie in (0.5, 1]")

    def __call__(self, t):
        if self.kind == "constant":
            return self.gamma0
        return self.gamma0 / (1.0 + t) ** self.power


class AdamState:
    """Per-user ADAM moments; step() returns the bias-corrected direction."""

    def __init__(self, dim, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(dim)
        self.v = np.zeros(dim)
        self.t = 0

    def step(self, grad):
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad**2
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        return m_hat / (np.sqrt(v_hat) + self.eps)


class MomentMonitor:
    """
    Tracks whether squared quantized-gradient norms stay below A2 + B2 * ||w||^2.

    The constants are fitted on the first `warmup` observations (least squares
    with non-negative coefficients, then scaled to cover every warm-up point);
    afterwards an observation above (1 + tolerance) times the bound is flagged.
    """

    def __init__(self, warmup=10, tolerance=0.5):
        self.warmup = warmup
        self.tolerance = tolerance
        self.history = []
        self.coeffs = None
        self.flags = []

    def bound(self, w_sq):
        if self.coeffs is None:
            return None
        a2, b2 = self.coeffs
        return a2 + b2 * w_sq

    def _fit(self):
        w_sq = np.array([h[1] for h in self.history])
        g_sq = np.array([h[2] for h in self.history])
        design = np.column_stack([np.ones_like(w_sq), w_sq])
        coeffs, _ = nnls(design, g_sq)
        predicted = design @ coeffs
        if np.all(predicted <= 0):
            coeffs = np.array([g_sq.max(), 0.0])
        else:
            scale = max(1.0, float(np.max(g_sq / np.maximum(predicted, 1e-12))))
            coeffs = coeffs * scale
        self.coeffs = (float(coeffs[0]), float(coeffs[1]))
        logger.debug("moment bound fitted: A2=%.4g B2=%.4g", *self.coeffs)

    def observe(self, t, w_sq, g_sq):
        """Record one round; returns True when the round violates the bound."""
        self.history.append((t, float(w_sq), float(g_sq)))
        if self.coeffs is None:
            if len(self.history) >= self.warmup:
                self._fit()
            return False
        if g_sq > (1 + self.tolerance) * self.bound(w_sq):
            logger.warning(
                "round %d: ||Q(g)||^2 = %.4g above the fitted moment bound", t, g_sq
            )
            self.flags.append(t)
            return True
        return False


def poison_vector(dim, quant, rng):
    """A uniform random field vector read back as a real model."""
    vec = quant.field.random_vector(rng, dim)
    return np.asarray(unmap_phi_vector(vec, quant.field), dtype=np.float64) / quant.q


def fedavg_round(w, models, lr):
    """w <- w - lr * sum of the given local models."""
    w = np.asarray(w, dtype=np.float64)
    if not models:
        return w.copy()
    return w - lr * np.sum(np.stack(list(models)), axis=0)


def brea_round(
    w, models, cfg, lr, behaviors=None, dropouts=None, seed=0, round_index=0
):
    """
    One secure aggregation round applied to the global model.

    Returns:
        tuple: (new global model, RoundOutcome, BreaRound)

    Raises:
        RoundAbort: Propagated from the protocol
    """
    round_ = BreaRound(cfg, seed=seed, round_index=round_index)
    outcome = round_.run(
        models, behaviors=behaviors, dropouts=dropouts, global_model=w, lr=lr
    )
    return outcome.global_model, outcome, round_


class FederatedTrainer:
    """
    Per-user local computation shared by the FedAvg and secure schemes.

    Args:
        dataset (Dataset): Task data
        n_users (int): Number of users N
        batch_size (int): Mini-batch size per user per round
        seed (int): Master seed
        local_optimizer (str): "sgd" (report the gradient) or "adam"
    """

    def __init__(
        self, dataset, n_users, batch_size=50, seed=0, local_optimizer="sgd"
    ):
        if local_optimizer not in ("sgd", "adam"):
            raise BadParams(f"unknown local optimizer {local_optimizer!r}")
        self.dataset = dataset
        self.n_users = n_users
        self.seed = seed
        self.local_optimizer = local_optimizer
        rng = derive_rng(seed, 0, 0, STREAM_GRADIENT)
        self.partitions = partition(len(dataset.y_train), n_users, rng)
        smallest = min(len(idx) for idx in self.partitions.values())
        self.batch_size = min(batch_size, smallest)
        if self.batch_size < batch_size:
            logger.warning(
                "batch size reduced to the partition size %d", self.batch_size
            )
        self._adam = {}

    def local_models(self, w, round_index):
        """Local model of every user for this round: user -> vector."""
        out = {}
        for user, idx in self.partitions.items():
            rng = derive_rng(self.seed, round_index, user, STREAM_GRADIENT)
            grad = local_gradient(
                w,
                self.dataset.X_train[idx],
                self.dataset.y_train[idx],
                self.batch_size,
                rng,
                self.dataset.n_classes,
                self.dataset.intercept,
            )
            if self.local_optimizer == "adam":
                state = self._adam.setdefault(user, AdamState(len(grad)))
                grad = state.step(grad)
            out[user] = grad
        return out

    def fedavg_step(self, w, round_index, m, lr, byzantine=None, quant=None):
        """
        FedAvg with m users drawn uniformly; poisoning users send random models.

        Returns:
            tuple: (new model, chosen users)
        """
        models = self.local_models(w, round_index)
        rng = derive_rng(self.seed, round_index, 0, STREAM_FEDAVG)
        draw = rng.choice(sorted(models), size=m, replace=False)
        chosen = sorted(int(u) for u in draw)
        picked = []
        for user in chosen:
            mode = (byzantine or {}).get(user, AttackMode.NONE)
            if quant is not None and AttackMode.parse(mode) & AttackMode.POISON_MODEL:
                user_rng = derive_rng(self.seed, round_index, user, STREAM_FEDAVG)
                picked.append(poison_vector(len(w), quant, user_rng))
            else:
                picked.append(models[user])
        return fedavg_round(w, picked, lr), tuple(chosen)

    def brea_step(self, w, round_index, cfg, lr, byzantine=None, dropouts=None):
        """
        Secure aggregation step; on abort the model is left unchanged.

        Returns:
            tuple: (new model, RoundOutcome, BreaRound)
        """
        models = self.local_models(w, round_index)
        try:
            return brea_round(
                w,
                models,
                cfg,
                lr,
                behaviors=byzantine,
                dropouts=dropouts,
                seed=self.seed,
                round_index=round_index,
            )
        except RoundAbort as exc:
            logger.warning("round %d skipped: %s", round_index, exc)
            return np.asarray(w, dtype=np.float64).copy(), exc.outcome, None
