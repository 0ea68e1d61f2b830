"""
In-process message bus for one protocol round.

Messages are grouped into phases that open strictly in order. A message may
only be sent in its own phase and only read in that phase or a later one.
Raw shares never reach the server.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Any

from .errors import PhaseOrderError, PrivacyViolation

logger = logging.getLogger(__name__)

SERVER = 0
BROADCAST = -1


class Phase(IntEnum):
    SHARE = 1
    DISTANCE = 2
    SELECT = 3
    AGGREGATE = 4
    UPDATE = 5


class MessageKind(str, Enum):
    SHARE = "ShareMsg"
    COMMIT = "CommitBroadcast"
    DISTANCE_REPORT = "DistanceReport"
    SELECTED_SET = "SelectedSetBroadcast"
    AGGREGATE_SHARE = "AggregateShareMsg"
    GLOBAL_MODEL = "GlobalModelBroadcast"

    @property
    def phase(self):
        return KIND_PHASE[self]


KIND_PHASE = {
    MessageKind.SHARE: Phase.SHARE,
    MessageKind.COMMIT: Phase.SHARE,
    MessageKind.DISTANCE_REPORT: Phase.DISTANCE,
    MessageKind.SELECTED_SET: Phase.SELECT,
    MessageKind.AGGREGATE_SHARE: Phase.AGGREGATE,
    MessageKind.GLOBAL_MODEL: Phase.UPDATE,
}


@dataclass(frozen=True)
class RoundMessage:
    kind: MessageKind
    sender: int
    receiver: int
    payload: Any

    @property
    def is_broadcast(self):
        return self.receiver == BROADCAST


class Network:
    """
    Simulated channels between N users (indices 1..N) and the server (0).

    Delivery order inside a kind is by sender index, so a round reads the
    same messages in the same order however the senders were scheduled.
    """

    def __init__(self, n_users):
        self.n_users = n_users
        self.phase = None
        self.counts = Counter()
        self._messages = []

    def open_phase(self, phase):
        """Advance to the next phase; phases never go backwards."""
        phase = Phase(phase)
        if self.phase is not None and phase <= self.phase:
            raise PhaseOrderError(f"cannot open {phase.name} after {self.phase.name}")
        logger.debug("opening phase %s", phase.name)
        self.phase = phase

    def _check_endpoint(self, index, role):
        if index in (SERVER, BROADCAST) or 1 <= index <= self.n_users:
            return
        raise ValueError(f"unknown {role} {index}")

    def send(self, message):
        """
        Queue a message for delivery.

        Raises:
            PhaseOrderError: If the message kind belongs to another phase
            PrivacyViolation: If a share is addressed to the server or
                broadcast
        """
        if self.phase is None or message.kind.phase != self.phase:
            current = self.phase.name if self.phase else "no phase"
            raise PhaseOrderError(f"{message.kind.value} sent during {current}")
        self._check_endpoint(message.sender, "sender")
        self._check_endpoint(message.receiver, "receiver")
        to_server = message.receiver in (SERVER, BROADCAST)
        if message.kind is MessageKind.SHARE and to_server:
            raise PrivacyViolation(
                f"share from user {message.sender} would reach the server"
            )
        self._messages.append(message)
        self.counts[message.kind] += 1

    def deliver(self, receiver, kind):
        """
        Messages of one kind addressed to receiver (or broadcast), by sender.

        Raises:
            PhaseOrderError: If the kind belongs to a phase not yet open
            PrivacyViolation: If the server asks for shares
        """
        kind = MessageKind(kind)
        if self.phase is None or kind.phase > self.phase:
            raise PhaseOrderError(f"{kind.value} read before its phase opened")
        if kind is MessageKind.SHARE and receiver == SERVER:
            raise PrivacyViolation("the server cannot read shares")
        inbox = [
            msg
            for msg in self._messages
            if msg.kind is kind and msg.receiver in (receiver, BROADCAST)
        ]
        return sorted(inbox, key=lambda msg: msg.sender)

    def message_counts(self):
        return {kind.value: self.counts.get(kind, 0) for kind in MessageKind}

    @property
    def total_messages(self):
        return sum(self.counts.values())
