"""
Server-side distance recovery and multi-Krum selection.

The server decodes one squared distance per unordered pair of candidate
users from the users' share-domain reports, converts them to reals and then
runs multi-Krum to pick the m models that get aggregated.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import BadParams, DecodeFailure, RadiusViolated
from .quantize import dequantize_distance
from .rscode import rs_decode_vectors

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DistanceMatrix:
    """Real-domain squared distances between candidate users."""

    users: tuple
    values: np.ndarray

    def __post_init__(self):
        n = len(self.users)
        if self.values.shape != (n, n):
            raise ValueError(f"{n} users but a {self.values.shape} matrix")

    def index(self, user):
        return self.users.index(user)

    def distance(self, j, k):
        return float(self.values[self.index(j), self.index(k)])

    def scaled(self, factor):
        return DistanceMatrix(self.users, self.values * factor)

    @classmethod
    def from_numerators(cls, numerators, q):
        """
        Plaintext matrix ||Q_q(w_j) - Q_q(w_k)||^2 from integer numerators.

        Args:
            numerators (dict): user index -> q * Q_q(w) integer vector
            q (int): Quantization level
        """
        users = tuple(sorted(numerators))
        values = np.zeros((len(users), len(users)))
        for a, b in combinations(range(len(users)), 2):
            diff = np.asarray(numerators[users[a]], dtype=object) - np.asarray(
                numerators[users[b]], dtype=object
            )
            values[a, b] = values[b, a] = int(np.dot(diff, diff)) / q**2
        return cls(users, values)


@dataclass(frozen=True)
class SelectionResult:
    """Users picked by multi-Krum, in pick order, with every iteration's scores."""

    selected: tuple
    scores: tuple

    def __len__(self):
        return len(self.selected)


def decode_all_distances(reports, candidates, points, T, A, cfg, rng):
    """
    Recover the pairwise distance matrix from per-user distance reports.

    Each unordered candidate pair is one Reed-Solomon word of degree 2T whose
    evaluation at theta_i is user i's report. Pairs with the same set of
    reporters are decoded together.

    Args:
        reports (dict): reporter index -> {(j, k): field value} with j < k
        candidates: User indices eligible for selection
        points (EvalPoints): Evaluation points
        T (int): Sharing degree
        A (int): Byzantine budget
        cfg (QuantConfig): Quantization settings for the real conversion
        rng (np.random.Generator): Source of decoder combining weights

    Returns:
        tuple: (DistanceMatrix, frozenset of reporter indices found in error)

    Raises:
        DecodeFailure: Tagged with the first failing pair
    """
    field = cfg.field
    users = tuple(sorted(candidates))
    reporters = sorted(reports)
    groups = defaultdict(list)
    for pair in combinations(users, 2):
        mask = tuple(i for i in reporters if pair in reports[i])
        groups[mask].append(pair)

    values = np.zeros((len(users), len(users)))
    position = {u: i for i, u in enumerate(users)}
    errors = set()
    wrapped = 0
    degree = 2 * T
    for mask, pairs in sorted(groups.items(), key=lambda item: item[1][0]):
        max_errors = min(A, (len(mask) - degree - 1) // 2)
        if max_errors < 0:
            raise DecodeFailure(
                f"pair {pairs[0]}: {len(mask)} reports cannot fix a degree-{degree} "
                "polynomial",
                agreements=len(mask),
                pair=pairs[0],
            )
        matrix = np.array(
            [[reports[i][pair] for pair in pairs] for i in mask], dtype=object
        )
        try:
            result = rs_decode_vectors(
                [points.theta(i) for i in mask],
                field.vector(matrix),
                degree,
                max_errors,
                field,
                rng,
            )
        except RadiusViolated as exc:
            raise DecodeFailure(str(exc), agreements=len(mask), pair=pairs[0]) from exc
        except DecodeFailure as exc:
            exc.pair = pairs[exc.column] if exc.column is not None else pairs[0]
            raise
        errors |= set(result.error_positions)
        for (j, k), secret in zip(pairs, result.secrets):
            d = dequantize_distance(secret, cfg)
            if d < 0:
                # A squared norm cannot be negative: the sum wrapped around p.
                d = np.inf
                wrapped += 1
            values[position[j], position[k]] = values[position[k], position[j]] = d
    if wrapped:
        logger.debug("%d decoded distances wrapped around the field", wrapped)
    theta_to_user = {points.theta(i): i for i in reporters}
    found = frozenset(theta_to_user.get(t, t) for t in errors)
    return DistanceMatrix(users, values), found


def krum_score(j, k_iter, dist, remaining, A):
    """
    Sum of the smallest (|remaining|) - A - 2 distances from j to the other
    users still in the running at iteration k_iter.

    Raises:
        BadParams: If the closest-set size is below 1
    """
    size = len(remaining) - A - 2
    if size < 1:
        raise BadParams(
            f"iteration {k_iter}: closest set of size {len(remaining)} - {A} - 2 < 1"
        )
    row = dist.values[dist.index(j)]
    others = sorted(row[dist.index(u)] for u in remaining if u != j)
    return float(sum(others[:size]))


def multi_krum(dist, A, m):
    """
    Select m users by repeated Krum over the decoded distances.

    Each iteration scores every remaining user and removes the lowest score;
    ties go to the lowest user index.

    Args:
        dist (DistanceMatrix): Distances between the candidates
        A (int): Byzantine budget
        m (int): Number of users to select

    Returns:
        SelectionResult: Selected users in pick order plus all scores

    Raises:
        BadParams: If m < 1, m exceeds the candidates, or the last
            iteration's closest set would be empty
    """
    n = len(dist.users)
    if m < 1 or m > n:
        raise BadParams(f"cannot select m={m} of {n} candidates")
    if n - m + 1 - A - 2 < 1:
        raise BadParams(f"n={n}, A={A}, m={m}: last closest set would be empty")
    if 2 * A + 2 >= n - m:
        logger.warning("2A+2 < N-m does not hold (A=%d, N=%d, m=%d)", A, n, m)
    remaining = list(dist.users)
    selected, history = [], []
    for k_iter in range(1, m + 1):
        scores = {j: krum_score(j, k_iter, dist, remaining, A) for j in remaining}
        winner = min(remaining, key=lambda j: (scores[j], j))
        selected.append(winner)
        history.append(scores)
        remaining.remove(winner)
    return SelectionResult(selected=tuple(selected), scores=tuple(history))
