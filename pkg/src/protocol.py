"""
One round of Byzantine-resilient secure aggregation.

Users quantize their local models, share them with Feldman VSS, verify what
they receive and report share-domain pairwise distances. The server decodes
the distances, runs multi-Krum and broadcasts the selected set; users then
return the sum of the selected shares and the server decodes the aggregate
and updates the global model. All traffic goes through a phase-ordered
Network; the round's phase functions are also usable on their own.
"""

import logging
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field as dataclass_field
from enum import Flag, auto
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import (
    BadParams,
    DecodeFailure,
    OutOfRange,
    OverflowViolation,
    RadiusViolated,
    RefusedSmallSet,
    RoundAbort,
)
from .field import DEFAULT_PRIME, PrimeField, find_commit_group
from .network import BROADCAST, SERVER, MessageKind, Network, Phase, RoundMessage
from .quantize import (
    OverflowMode,
    QuantConfig,
    QuantizedModel,
    check_overflow,
    dequantize_aggregate,
    quantize_model,
)
from .rscode import rs_decode_vectors
from .selection import decode_all_distances, multi_krum
from .utils import (
    STREAM_BYZANTINE,
    STREAM_DECODE,
    STREAM_FOLD,
    STREAM_SHARES,
    derive_rng,
)
from .vss import (
    EvalPoints,
    Share,
    fold_commitments,
    fold_share,
    gen_commitments,
    gen_shares,
    verify_share,
)

logger = logging.getLogger(__name__)

# Errors that end a round instead of the experiment.
ABORTING_ERRORS = (
    DecodeFailure,
    RadiusViolated,
    OverflowViolation,
    OutOfRange,
    BadParams,
)


def threshold_bound(A, D, T, m):
    """Smallest N that tolerates A Byzantine users and D dropouts."""
    return 2 * A + 1 + max(m + 2, D + 2 * T)


def round_violations(N, A, D, T, m, p=None):
    """Every violated round-parameter inequality, with its numbers."""
    problems = []
    bound = threshold_bound(A, D, T, m)
    if N < bound:
        problems.append(
            f"resilience bound: need N >= 2A+1+max(m+2, D+2T) = "
            f"2*{A}+1+max({m + 2}, {D + 2 * T}) = {bound}, got N={N}"
        )
    if not 2 * A + 2 < N - m:
        problems.append(
            f"selection margin: need 2A+2 < N-m, got {2 * A + 2} >= {N - m}"
        )
    if T < 1:
        problems.append(f"sharing degree: need T >= 1, got T={T}")
    if m < 1:
        problems.append(f"selected set: need m >= 1, got m={m}")
    if m > N:
        problems.append(f"selected set: need m <= N, got m={m} > N={N}")
    if p is not None and N >= p:
        problems.append(f"evaluation points: need N < p, got N={N} >= p={p}")
    return problems


class AttackMode(Flag):
    """What a Byzantine user does wrong; modes combine with |."""

    NONE = 0
    POISON_MODEL = auto()
    INVALID_SHARES = auto()
    CORRUPT_DISTANCES = auto()
    CORRUPT_AGGREGATES = auto()
    FALSE_ACCUSATIONS = auto()
    ALL = POISON_MODEL | INVALID_SHARES | CORRUPT_DISTANCES | CORRUPT_AGGREGATES

    @classmethod
    def parse(cls, name):
        """Accept "PoisonModel", "poison_model", "AllOfTheAbove", "all" and so on."""
        if isinstance(name, cls):
            return name
        key = str(name).replace("_", "").replace("-", "").lower()
        if key in ("all", "alloftheabove"):
            return cls.ALL
        for member in cls:
            if member.name and member.name.replace("_", "").lower() == key:
                return member
        raise ValueError(f"unknown attack mode {name!r}")


@dataclass
class ByzantineBehavior:
    mode: AttackMode
    rng: Optional[np.random.Generator] = None

    def has(self, mode):
        return bool(self.mode & mode)

    def offset(self, field, size):
        """Uniform nonzero perturbation, so a corrupted value always differs."""
        if self.rng is None:
            raise ValueError("Byzantine behavior needs a random stream")
        return field.random_nonzero(self.rng, size)


@dataclass(frozen=True)
class RoundConfig:
    """System parameters of a round plus the field, group and points they imply."""

    N: int
    A: int
    D: int
    T: int
    m: int
    q: int
    field: PrimeField
    grp: object
    points: EvalPoints
    batch_verify: bool = True

    @classmethod
    def build(cls, N, A, D, T, m, q, p=DEFAULT_PRIME, batch_verify=True):
        """
        Build a config with theta_i = i and the first commitment group found.

        Args:
            N, A, D, T, m (int): Users, Byzantine budget, dropout budget,
                sharing degree and selected-set size
            q (int): Quantization level
            p (int): Field modulus
            batch_verify (bool): Verify folded shares instead of every coordinate
        """
        field = PrimeField(p)
        return cls(
            N=N,
            A=A,
            D=D,
            T=T,
            m=m,
            q=q,
            field=field,
            grp=find_commit_group(field),
            points=EvalPoints.consecutive(N, field),
            batch_verify=batch_verify,
        )

    @property
    def quant(self):
        return QuantConfig(self.q, self.field)

    @property
    def bound(self):
        return threshold_bound(self.A, self.D, self.T, self.m)

    def violations(self):
        return round_violations(self.N, self.A, self.D, self.T, self.m, self.field.p)


@dataclass(frozen=True)
class DistanceReport:
    """One user's share-domain distances for every pair it can compute."""

    reporter: int
    distances: dict
    accusations: frozenset = frozenset()

    def __len__(self):
        return len(self.distances)


@dataclass
class UserState:
    """
    What one user holds during a round.

    Besides its own model, a user only ever sees shares addressed to it,
    the commitment broadcasts and the selected-set broadcast.
    """

    user: int
    model: np.ndarray
    behavior: Optional[ByzantineBehavior] = None
    quantized: Optional[QuantizedModel] = None
    shares: dict = dataclass_field(default_factory=dict)
    valid: set = dataclass_field(default_factory=set)
    accused: set = dataclass_field(default_factory=set)
    selected: tuple = ()

    @property
    def is_byzantine(self):
        return self.behavior is not None and self.behavior.mode != AttackMode.NONE

    def attacks(self, mode):
        return self.is_byzantine and self.behavior.has(mode)

    def preimage(self, field):
        """Integer numerators behind the shared vector (simulator-side only)."""
        if self.quantized is None:
            return None
        return self.quantized.numerators(field)


@dataclass
class ServerState:
    rng: np.random.Generator
    global_model: Optional[np.ndarray] = None
    committed: set = dataclass_field(default_factory=set)
    reporters: tuple = ()
    accusations: dict = dataclass_field(default_factory=dict)
    excluded: frozenset = frozenset()
    candidates: tuple = ()
    distances: object = None
    distance_errors: frozenset = frozenset()
    selection: object = None
    field_aggregate: Optional[np.ndarray] = None
    aggregate: Optional[np.ndarray] = None
    aggregate_errors: frozenset = frozenset()


class CommitmentBoard:
    """
    The round's commitment broadcasts as every verifier sees them.

    With fold weights set, shares are checked in folded form and each
    dealer's commitments are folded only once.
    """

    def __init__(self, commits, grp, field, weights=None):
        self.commits = dict(commits)
        self.grp = grp
        self.field = field
        self.weights = weights
        self._folded = {}

    @property
    def senders(self):
        return sorted(self.commits)

    def verify(self, share, theta):
        commits = self.commits.get(share.from_user)
        if commits is None or commits.dim != len(share.value):
            return False
        if self.weights is None:
            return verify_share(share, commits, theta, self.grp)
        if len(self.weights) != commits.dim:
            return False
        folded = self._folded.get(share.from_user)
        if folded is None:
            folded = fold_commitments(commits, self.weights, self.grp)
            self._folded[share.from_user] = folded
        folded_share = fold_share(share, self.weights, self.field)
        return verify_share(folded_share, folded, theta, self.grp)


# Phase functions


def user_share_phase(state, cfg, rng):
    """
    Quantize the local model, share it and commit to the sharing polynomial.

    Returns:
        tuple: (list of ShareMsg for users 1..N, CommitBroadcast)
    """
    field = cfg.field
    if state.attacks(AttackMode.POISON_MODEL):
        poisoned = field.random_vector(state.behavior.rng, len(state.model))
        state.quantized = QuantizedModel(poisoned)
    else:
        state.quantized = quantize_model(state.model, cfg.quant, rng)
    poly, shares = gen_shares(
        state.quantized, cfg.T, cfg.points, rng, field, dealer=state.user
    )
    commits = gen_commitments(poly, cfg.grp, dealer=state.user)
    if state.attacks(AttackMode.INVALID_SHARES):
        shares = [
            share
            if share.to_user == state.user
            else Share(
                share.from_user,
                share.to_user,
                share.value + state.behavior.offset(field, len(share.value)),
            )
            for share in shares
        ]
    messages = [
        RoundMessage(MessageKind.SHARE, state.user, s.to_user, s) for s in shares
    ]
    return messages, RoundMessage(MessageKind.COMMIT, state.user, BROADCAST, commits)


def user_verify_phase(state, shares, board, cfg):
    """
    Check every received share against its dealer's commitments.

    Args:
        state (UserState): Receiving user
        shares: Share objects addressed to this user
        board (CommitmentBoard): Commitment broadcasts of the round
        cfg (RoundConfig): Round parameters

    Returns:
        frozenset: Senders this user accuses
    """
    theta = cfg.points.theta(state.user)
    state.shares = {share.from_user: share for share in shares}
    state.valid = set()
    failed = set()
    for sender in sorted(state.shares):
        if board.verify(state.shares[sender], theta):
            state.valid.add(sender)
        else:
            failed.add(sender)
    if state.attacks(AttackMode.FALSE_ACCUSATIONS):
        failed = set(board.senders) - {state.user}
    elif failed:
        logger.debug("user %d rejects shares from %s", state.user, sorted(failed))
    state.accused = failed
    return frozenset(failed)


def user_distance_phase(state, cfg):
    """
    Squared distances between the shares this user verified, per pair j < k.

    Pairs involving a sender the user accuses or never heard from are left
    out of the report.
    """
    field = cfg.field
    senders = sorted(state.valid)
    distances = {}
    if len(senders) >= 2:
        rows = field.stack([state.shares[j].value for j in senders])
        matrix = field.pairwise_sq_dists(rows)
        distances = {
            (senders[a], senders[b]): int(matrix[a, b])
            for a, b in combinations(range(len(senders)), 2)
        }
    if distances and state.attacks(AttackMode.CORRUPT_DISTANCES):
        noise = state.behavior.offset(field, len(distances))
        distances = {
            pair: (value + int(delta)) % field.p
            for (pair, value), delta in zip(distances.items(), noise)
        }
    return DistanceReport(state.user, distances, frozenset(state.accused))


def server_select_phase(server, reports, cfg, preimages=None):
    """
    Exclude majority-accused senders, decode the distances and run multi-Krum.

    Args:
        server (ServerState): Server state, updated in place
        reports: DistanceReport per reporting user
        cfg (RoundConfig): Round parameters
        preimages (dict): Optional user -> numerators of honest users, used
            to check the distance computation did not wrap around

    Returns:
        RoundMessage: SelectedSetBroadcast carrying the sorted selected set
    """
    by_reporter = {report.reporter: report for report in reports}
    server.reporters = tuple(sorted(by_reporter))
    accusers = defaultdict(set)
    for report in reports:
        for sender in report.accusations:
            if sender != report.reporter:
                accusers[sender].add(report.reporter)
    server.accusations = {s: frozenset(a) for s, a in sorted(accusers.items())}
    server.excluded = frozenset(s for s, a in accusers.items() if len(a) > cfg.A)
    if server.excluded:
        logger.info(
            "excluding senders accused by more than %d users: %s",
            cfg.A,
            sorted(server.excluded),
        )
    present = server.committed & set(by_reporter)
    server.candidates = tuple(sorted(present - server.excluded))

    if preimages is not None:
        check_overflow(
            {u: z for u, z in preimages.items() if u in server.candidates},
            cfg.quant,
            OverflowMode.DISTANCE,
        )
    usable = {
        reporter: report.distances
        for reporter, report in by_reporter.items()
        if reporter not in server.excluded
    }
    server.distances, server.distance_errors = decode_all_distances(
        usable, server.candidates, cfg.points, cfg.T, cfg.A, cfg.quant, server.rng
    )
    server.selection = multi_krum(server.distances, cfg.A, cfg.m)
    selected = tuple(sorted(server.selection.selected))
    return RoundMessage(MessageKind.SELECTED_SET, SERVER, BROADCAST, selected)


def user_aggregate_phase(state, selected, cfg):
    """
    Sum the shares of the selected users.

    Returns:
        RoundMessage or None: AggregateShareMsg, or None when the user lacks
            a valid share for some selected user

    Raises:
        RefusedSmallSet: If an honest user receives a set whose size is not m
    """
    selected = tuple(selected)
    if len(selected) != cfg.m and not state.is_byzantine:
        raise RefusedSmallSet(
            f"user {state.user}: selected set {selected} has size != m={cfg.m}"
        )
    state.selected = selected
    missing = [j for j in selected if j not in state.valid]
    if missing:
        logger.debug(
            "user %d withholds its aggregate, no valid share from %s",
            state.user,
            missing,
        )
        return None
    field = cfg.field
    total = field.vsum([state.shares[j].value for j in selected])
    if state.attacks(AttackMode.CORRUPT_AGGREGATES):
        total = total + state.behavior.offset(field, len(total))
    return RoundMessage(MessageKind.AGGREGATE_SHARE, state.user, SERVER, total)


def server_update_phase(server, messages, cfg, lr, preimages=None):
    """
    Decode the aggregate of the selected models and take the gradient step.

    Args:
        server (ServerState): Server state, updated in place
        messages: AggregateShareMsg messages
        cfg (RoundConfig): Round parameters
        lr (float): Step size
        preimages (dict): Optional user -> numerators of the selected users,
            used to check the aggregate did not wrap around

    Returns:
        RoundMessage: GlobalModelBroadcast with the updated model
    """
    field = cfg.field
    if not messages:
        raise RadiusViolated("no aggregate shares arrived")
    thetas = [cfg.points.theta(msg.sender) for msg in messages]
    values = field.stack([msg.payload for msg in messages])
    max_errors = min(cfg.A, max((len(messages) - cfg.T - 1) // 2, 0))
    result = rs_decode_vectors(thetas, values, cfg.T, max_errors, field, server.rng)
    theta_to_user = {cfg.points.theta(msg.sender): msg.sender for msg in messages}
    errors = result.error_positions
    server.aggregate_errors = frozenset(theta_to_user[t] for t in errors)
    server.field_aggregate = result.secrets
    if preimages is not None:
        check_overflow(preimages, cfg.quant, OverflowMode.AGGREGATE)
    server.aggregate = dequantize_aggregate(result.secrets, cfg.quant)
    if server.global_model is not None:
        server.global_model = server.global_model - lr * server.aggregate
    return RoundMessage(
        MessageKind.GLOBAL_MODEL, SERVER, BROADCAST, server.global_model
    )


# Orchestration


@dataclass
class RoundOutcome:
    """Result and diagnostics of one round."""

    round_index: int
    selected: tuple = ()
    pick_order: tuple = ()
    candidates: tuple = ()
    excluded: tuple = ()
    accusations: dict = dataclass_field(default_factory=dict)
    distance_errors: tuple = ()
    aggregate_errors: tuple = ()
    byzantine: tuple = ()
    dropped: dict = dataclass_field(default_factory=dict)
    message_counts: dict = dataclass_field(default_factory=dict)
    timings_ms: dict = dataclass_field(default_factory=dict)
    field_aggregate: Optional[np.ndarray] = None
    aggregate: Optional[np.ndarray] = None
    global_model: Optional[np.ndarray] = None
    abort_phase: Optional[str] = None
    abort_reason: Optional[str] = None

    @property
    def aborted(self):
        return self.abort_phase is not None

    @property
    def error_positions(self):
        return tuple(sorted(set(self.distance_errors) | set(self.aggregate_errors)))

    @property
    def accusation_count(self):
        return sum(len(accusers) for accusers in self.accusations.values())

    def to_dict(self):
        """JSON-ready summary; model vectors are left out."""
        return {
            "round": self.round_index,
            "aborted": self.aborted,
            "abort_phase": self.abort_phase,
            "abort_reason": self.abort_reason,
            "selected": list(self.selected),
            "pick_order": list(self.pick_order),
            "candidates": list(self.candidates),
            "excluded": list(self.excluded),
            "accusations": {str(s): sorted(a) for s, a in self.accusations.items()},
            "distance_errors": list(self.distance_errors),
            "aggregate_errors": list(self.aggregate_errors),
            "byzantine": list(self.byzantine),
            "dropped": {str(u): phase for u, phase in self.dropped.items()},
            "message_counts": dict(self.message_counts),
            "timings_ms": {k: round(v, 3) for k, v in self.timings_ms.items()},
        }


def _as_phase(value):
    if isinstance(value, Phase):
        return value
    if isinstance(value, str):
        return Phase[value.upper()]
    return Phase(value)


class BreaRound:
    """
    Runs the five phases of one round over a fresh Network.

    Random streams are derived from (seed, round_index, user, purpose), so a
    round is reproducible on its own.
    """

    def __init__(self, cfg, seed=0, round_index=0):
        self.cfg = cfg
        self.seed = seed
        self.round_index = round_index
        self.users = {}
        self.server = None
        self.network = None
        self.dropouts = {}

    def _rng(self, user, stream):
        return derive_rng(self.seed, self.round_index, user, stream)

    def _active(self, user, phase):
        drop = self.dropouts.get(user)
        return drop is None or phase < drop

    def _behaviors(self, behaviors):
        out = {}
        for user, behavior in (behaviors or {}).items():
            if not isinstance(behavior, ByzantineBehavior):
                behavior = ByzantineBehavior(AttackMode.parse(behavior))
            if behavior.rng is None:
                behavior.rng = self._rng(user, STREAM_BYZANTINE)
            out[user] = behavior
        return out

    @contextmanager
    def _phase(self, outcome, phase):
        start = time.perf_counter()
        try:
            yield
        except ABORTING_ERRORS as exc:
            logger.warning(
                "round %d aborted in %s: %s", self.round_index, phase.name, exc
            )
            reason = f"{type(exc).__name__}: {exc}"
            raise RoundAbort(phase.name, reason, cause=exc) from exc
        finally:
            outcome.timings_ms[phase.name] = (time.perf_counter() - start) * 1000.0

    def _preimages(self, users, honest_only=False):
        field = self.cfg.field
        out = {}
        for user in users:
            state = self.users[user]
            if honest_only and state.is_byzantine:
                continue
            preimage = state.preimage(field)
            if preimage is not None:
                out[user] = preimage
        return out

    def run(self, models, behaviors=None, dropouts=None, global_model=None, lr=0.0):
        """
        Execute one round.

        Args:
            models (dict): user index (1..N) -> real local model vector
            behaviors (dict): user -> AttackMode, attack name or ByzantineBehavior
            dropouts: dict user -> Phase from which the user stops sending,
                or a collection of users that send nothing this round
            global_model (np.ndarray): Model updated by the aggregate, optional
            lr (float): Step size applied to the aggregate

        Returns:
            RoundOutcome: Selected set, decoded aggregate and diagnostics

        Raises:
            RoundAbort: Naming the phase that could not complete; the partial
                outcome is attached as .outcome
        """
        cfg = self.cfg
        if sorted(models) != list(cfg.points.users):
            raise BadParams(
                f"expected models for users 1..{cfg.N}, got {sorted(models)}"
            )
        if dropouts is None:
            dropouts = {}
        elif not isinstance(dropouts, dict):
            dropouts = {user: Phase.SHARE for user in dropouts}
        self.dropouts = {user: _as_phase(phase) for user, phase in dropouts.items()}
        behaviors = self._behaviors(behaviors)
        if len(self.dropouts) > cfg.D or len(behaviors) > cfg.A:
            logger.warning(
                "%d dropouts and %d Byzantine users exceed D=%d, A=%d",
                len(self.dropouts),
                len(behaviors),
                cfg.D,
                cfg.A,
            )

        self.users = {
            user: UserState(
                user, np.asarray(models[user], dtype=np.float64), behaviors.get(user)
            )
            for user in cfg.points.users
        }
        if global_model is not None:
            global_model = np.asarray(global_model, dtype=np.float64)
        self.server = ServerState(
            rng=self._rng(SERVER, STREAM_DECODE), global_model=global_model
        )
        self.network = net = Network(cfg.N)
        outcome = RoundOutcome(
            round_index=self.round_index,
            byzantine=tuple(sorted(behaviors)),
            dropped={user: phase.name for user, phase in sorted(self.dropouts.items())},
        )
        try:
            self._run_phases(net, outcome, lr)
        except RoundAbort as exc:
            outcome.abort_phase = exc.phase
            outcome.abort_reason = exc.reason
            self._collect(outcome)
            exc.outcome = outcome
            raise
        self._collect(outcome)
        logger.debug(
            "round %d: selected %s, excluded %s, errors at %s",
            self.round_index,
            list(outcome.selected),
            list(outcome.excluded),
            list(outcome.error_positions),
        )
        return outcome

    def _run_phases(self, net, outcome, lr):
        cfg, server, users = self.cfg, self.server, self.users

        with self._phase(outcome, Phase.SHARE):
            net.open_phase(Phase.SHARE)
            for user, state in users.items():
                if self._active(user, Phase.SHARE):
                    rng = self._rng(user, STREAM_SHARES)
                    shares, commit = user_share_phase(state, cfg, rng)
                    for msg in shares:
                        net.send(msg)
                    net.send(commit)
            broadcasts = net.deliver(SERVER, MessageKind.COMMIT)
            server.committed = {msg.sender for msg in broadcasts}

        with self._phase(outcome, Phase.DISTANCE):
            net.open_phase(Phase.DISTANCE)
            weights = None
            if cfg.batch_verify:
                dim = len(next(iter(users.values())).model)
                weights = cfg.field.random_nonzero(self._rng(SERVER, STREAM_FOLD), dim)
            commits = {msg.sender: msg.payload for msg in broadcasts}
            board = CommitmentBoard(commits, cfg.grp, cfg.field, weights)
            for user, state in users.items():
                if not self._active(user, Phase.DISTANCE):
                    continue
                shares = [msg.payload for msg in net.deliver(user, MessageKind.SHARE)]
                user_verify_phase(state, shares, board, cfg)
                report = user_distance_phase(state, cfg)
                net.send(
                    RoundMessage(MessageKind.DISTANCE_REPORT, user, SERVER, report)
                )

        with self._phase(outcome, Phase.SELECT):
            net.open_phase(Phase.SELECT)
            inbox = net.deliver(SERVER, MessageKind.DISTANCE_REPORT)
            reports = [msg.payload for msg in inbox]
            honest = self._preimages(users, honest_only=True)
            net.send(server_select_phase(server, reports, cfg, preimages=honest))

        with self._phase(outcome, Phase.AGGREGATE):
            net.open_phase(Phase.AGGREGATE)
            for user, state in users.items():
                if not self._active(user, Phase.AGGREGATE):
                    continue
                (broadcast,) = net.deliver(user, MessageKind.SELECTED_SET)
                try:
                    msg = user_aggregate_phase(state, broadcast.payload, cfg)
                except RefusedSmallSet as exc:
                    logger.warning("%s", exc)
                    continue
                if msg is not None:
                    net.send(msg)

        with self._phase(outcome, Phase.UPDATE):
            net.open_phase(Phase.UPDATE)
            messages = net.deliver(SERVER, MessageKind.AGGREGATE_SHARE)
            selected = self._preimages(server.selection.selected)
            net.send(server_update_phase(server, messages, cfg, lr, preimages=selected))

    def _collect(self, outcome):
        server = self.server
        if server.selection is not None:
            outcome.selected = tuple(sorted(server.selection.selected))
            outcome.pick_order = tuple(server.selection.selected)
        outcome.candidates = tuple(server.candidates)
        outcome.excluded = tuple(sorted(server.excluded))
        outcome.accusations = dict(server.accusations)
        outcome.distance_errors = tuple(sorted(server.distance_errors))
        outcome.aggregate_errors = tuple(sorted(server.aggregate_errors))
        outcome.message_counts = self.network.message_counts()
        outcome.field_aggregate = server.field_aggregate
        outcome.aggregate = server.aggregate
        outcome.global_model = server.global_model

    def plaintext_aggregate(self, selected=None):
        """Field sum of the selected users' shared vectors (test oracle)."""
        selected = self.server.selection.selected if selected is None else selected
        return self.cfg.field.vsum([self.users[j].quantized.vec for j in selected])


def run_round(
    models,
    cfg,
    behaviors=None,
    dropouts=None,
    seed=0,
    round_index=0,
    global_model=None,
    lr=0.0,
):
    """Run one round; see BreaRound.run."""
    return BreaRound(cfg, seed=seed, round_index=round_index).run(
        models, behaviors=behaviors, dropouts=dropouts, global_model=global_model, lr=lr
    )
