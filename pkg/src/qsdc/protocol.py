"""Round-based state machine for the N-partner direct communication protocol.

Each round distributes a fresh GHZ state (Alice keeps qubit 0, partner k holds
qubit k), applies the configured attack to the travel qubits in transit, and
then runs in one of two modes:

* Message mode: everyone measures Bz.  Alice announces "yes" when the bit she
  wants to send matches her outcome under the convention bit 0 <-> |0>, and
  "no" otherwise.  A receiver decodes 0 when the announcement is consistent
  with Alice sharing the receiver's own outcome, i.e. decode 0 iff
  (yes and outcome |0>) or (no and outcome |1>).
* Control mode (probability c per round): Alice picks Bz or Bx uniformly,
  everyone measures in that basis and announces.  Bz outcomes must coincide;
  Bx outcomes must multiply to +1.  A violation flags an eavesdropper and the
  session stops at that round.

Sessions are deterministic functions of their configuration: the seed drives
a single generator consumed in a fixed order (attack sampling, mode draw,
basis draw, measurement), so identical configs give bit-identical transcripts.
A session is sequential; independent sessions can run concurrently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .attacks import AttackModel, NoAttack, apply_attack_sampled, attack_to_dict
from .quantum import Basis, PureState, ghz_state, measure_all


class Mode(str, Enum):
    MESSAGE = "message"
    CONTROL = "control"


class MessageKind(str, Enum):
    RECEIPT = "receipt"
    MODE_ANNOUNCE = "mode_announce"
    YES_NO = "yes_no"
    BASIS_ANNOUNCE = "basis_announce"
    OUTCOME_ANNOUNCE = "outcome_announce"


@dataclass(frozen=True)
class PublicMessage:
    """One classical broadcast on the public channel (party 0 is Alice)."""

    sender: int
    kind: MessageKind
    payload: str


def encode_announcement(bit: int, alice_outcome: int) -> str:
    """Alice's public yes/no for a message bit given her Bz outcome (+1 is |0>)."""
    return "yes" if (bit == 0) == (alice_outcome == 1) else "no"


def decode_bit(announcement: str, receiver_outcome: int) -> int:
    """Receiver decode rule: 0 iff (yes and |0>) or (no and |1>)."""
    return 0 if (announcement == "yes") == (receiver_outcome == 1) else 1


@dataclass(frozen=True, eq=False)
class Round:
    """Full record of one protocol round.

    ``post_attack_state`` is the sampled pure-state trajectory realization of
    the attack for this round; the ensemble-averaged post-attack state is
    available from :func:`qsdc.attacks.apply_attack`.
    """

    index: int
    mode: Mode
    basis: Basis
    pre_attack_state: PureState | None
    post_attack_state: PureState
    alice_outcome: int
    outcomes: tuple[int, ...]
    announcements: tuple[PublicMessage, ...]
    receiver_decodes: tuple[int, ...] | None
    detection_flag: bool | None

    def __post_init__(self) -> None:
        if self.mode is Mode.MESSAGE:
            if self.receiver_decodes is None or self.detection_flag is not None:
                raise ValueError("message rounds carry decodes and no detection flag")
        else:
            if self.receiver_decodes is not None or self.detection_flag is None:
                raise ValueError("control rounds carry a detection flag and no decodes")
        first_mode = next(
            (i for i, m in enumerate(self.announcements) if m.kind is MessageKind.MODE_ANNOUNCE),
            len(self.announcements),
        )
        if any(m.kind is MessageKind.RECEIPT for m in self.announcements[first_mode:]):
            raise ValueError("receipts must precede the mode announcement")

    def to_dict(self) -> dict:
        data: dict = {
            "index": self.index,
            "mode": self.mode.value,
        }
        if self.mode is Mode.CONTROL:
            data["basis"] = self.basis.value
        data["outcomes"] = list(self.outcomes)
        data["announcements"] = [
            {"sender": m.sender, "kind": m.kind.value, "payload": m.payload}
            for m in self.announcements
        ]
        if self.mode is Mode.MESSAGE:
            data["decodes"] = list(self.receiver_decodes)
        else:
            data["detected"] = self.detection_flag
        return data


@dataclass(frozen=True)
class SessionConfig:
    """Parameters of one protocol session."""

    n_parties: int
    control_probability: float
    message_bits: tuple[int, ...]
    seed: int
    attack: AttackModel = field(default_factory=NoAttack)

    def __post_init__(self) -> None:
        if not 3 <= self.n_parties <= 16:
            raise ValueError(f"n_parties must be in [3, 16], got {self.n_parties}")
        if not 0.0 <= self.control_probability <= 1.0:
            raise ValueError(f"control probability must be in [0, 1], got {self.control_probability}")
        bits = tuple(int(b) for b in self.message_bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("message bits must be 0 or 1")
        object.__setattr__(self, "message_bits", bits)

    def to_dict(self) -> dict:
        return {
            "n_parties": self.n_parties,
            "control_probability": self.control_probability,
            "message_bits": list(self.message_bits),
            "seed": self.seed,
            "attack": attack_to_dict(self.attack),
        }


@dataclass(frozen=True, eq=False)
class Transcript:
    """Auditable record of a full session."""

    config: SessionConfig
    rounds: tuple[Round, ...]
    decoded_message: tuple[tuple[int, ...], ...]
    aborted: bool
    abort_round: int | None

    def __post_init__(self) -> None:
        flagged = [r.index for r in self.rounds if r.detection_flag]
        if self.aborted:
            if not self.rounds or self.rounds[-1].detection_flag is not True:
                raise ValueError("aborted transcripts end at the flagged control round")
            if self.abort_round != self.rounds[-1].index or flagged != [self.abort_round]:
                raise ValueError("abort_round must be the unique flagged round")
        elif flagged or self.abort_round is not None:
            raise ValueError("non-aborted transcripts cannot contain flagged rounds")

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "rounds": [r.to_dict() for r in self.rounds],
            "decoded_message": [list(bits) for bits in self.decoded_message],
            "aborted": self.aborted,
            "abort_round": self.abort_round,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _receipts(n_parties: int) -> list[PublicMessage]:
    return [PublicMessage(k, MessageKind.RECEIPT, "received") for k in range(1, n_parties)]


def run_message_round(
    state: PureState,
    bit: int,
    rng: np.random.Generator,
    *,
    index: int = 1,
    pre_attack_state: PureState | None = None,
) -> Round:
    """One message-mode round on the (post-attack) joint state.

    Wrong decodes under attack are data, not errors; compare
    ``receiver_decodes`` against the sent bit to observe them.
    """
    n = state.n_qubits
    record = measure_all(state, Basis.BZ, rng)
    alice = record.outcomes[0]
    announcement = encode_announcement(bit, alice)
    messages = (
        *_receipts(n),
        PublicMessage(0, MessageKind.MODE_ANNOUNCE, Mode.MESSAGE.value),
        PublicMessage(0, MessageKind.YES_NO, announcement),
    )
    decodes = tuple(decode_bit(announcement, record.outcomes[k]) for k in range(1, n))
    return Round(
        index=index,
        mode=Mode.MESSAGE,
        basis=Basis.BZ,
        pre_attack_state=pre_attack_state,
        post_attack_state=state,
        alice_outcome=alice,
        outcomes=record.outcomes,
        announcements=messages,
        receiver_decodes=decodes,
        detection_flag=None,
    )


def control_flag(basis: Basis, outcomes: tuple[int, ...]) -> bool:
    """Eavesdropper test: Bz outcomes must coincide, Bx outcomes must multiply to +1."""
    if basis is Basis.BZ:
        return any(o != outcomes[0] for o in outcomes)
    return outcomes.count(-1) % 2 == 1


def run_control_round(
    state: PureState,
    rng: np.random.Generator,
    *,
    index: int = 1,
    pre_attack_state: PureState | None = None,
) -> Round:
    """One control-mode round: uniform basis pick, coincidence or parity test."""
    n = state.n_qubits
    basis = Basis.BZ if rng.integers(2) == 0 else Basis.BX
    record = measure_all(state, basis, rng)
    messages = (
        *_receipts(n),
        PublicMessage(0, MessageKind.MODE_ANNOUNCE, Mode.CONTROL.value),
        PublicMessage(0, MessageKind.BASIS_ANNOUNCE, basis.value),
        *(
            PublicMessage(k, MessageKind.OUTCOME_ANNOUNCE, f"{record.outcomes[k]:+d}")
            for k in range(n)
        ),
    )
    return Round(
        index=index,
        mode=Mode.CONTROL,
        basis=basis,
        pre_attack_state=pre_attack_state,
        post_attack_state=state,
        alice_outcome=record.outcomes[0],
        outcomes=record.outcomes,
        announcements=messages,
        receiver_decodes=None,
        detection_flag=control_flag(basis, record.outcomes),
    )


def run_session(config: SessionConfig, *, max_rounds: int | None = None) -> Transcript:
    """Run a full session until the message is delivered or a detection aborts it.

    Control rounds do not consume message bits, so with control probability 1
    and an undetectable attack the session cannot terminate; pass
    ``max_rounds`` to fail fast in that corner (a RuntimeError, not a
    transcript outcome).
    """
    rng = np.random.default_rng(config.seed)
    n = config.n_parties
    ideal = ghz_state(n)
    rounds: list[Round] = []
    per_receiver: list[list[int]] = [[] for _ in range(n - 1)]
    aborted = False
    bit_pos = 0
    index = 0
    while bit_pos < len(config.message_bits):
        index += 1
        if max_rounds is not None and index > max_rounds:
            raise RuntimeError(
                f"session exceeded {max_rounds} rounds with "
                f"{len(config.message_bits) - bit_pos} message bits pending"
            )
        post = apply_attack_sampled(config.attack, ideal, rng)
        if rng.random() < config.control_probability:
            round_ = run_control_round(post, rng, index=index, pre_attack_state=ideal)
            rounds.append(round_)
            if round_.detection_flag:
                aborted = True
                break
        else:
            round_ = run_message_round(
                post, config.message_bits[bit_pos], rng, index=index, pre_attack_state=ideal
            )
            rounds.append(round_)
            for k, decoded in enumerate(round_.receiver_decodes):
                per_receiver[k].append(decoded)
            bit_pos += 1
    return Transcript(
        config=config,
        rounds=tuple(rounds),
        decoded_message=tuple(tuple(bits) for bits in per_receiver),
        aborted=aborted,
        abort_round=rounds[-1].index if aborted else None,
    )
