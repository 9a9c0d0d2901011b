"""Party state machines and the commitment/reveal protocol.

One run simulates three fixed sites on a line: the committer (Alice), the
receiver (Bob), and the receiver's trusted agent (Charlie), with every
message traveling at light speed.

Commit phase, at t0:
  Alice encodes her value in the two-bit label of N Bell pairs, ships one
  half of each pair to Charlie, and sends Bob a contentless marker so he
  can start his clock.

Swap and teleport, one light trip later:
  Charlie scrambles the arriving halves with random Paulis and Bell-measures
  them against his halves of pre-shared Bob-Charlie pairs, swapping the
  entanglement onto an Alice-Bob pair whose label nobody yet knows.  At the
  same instant Bob teleports randomly rotated probe qubits to Alice through
  those swapped pairs.

Reveal, immediately after:
  Alice applies the reveal Pauli derived from her committed labels to the
  teleported qubits, returns them to Bob, and announces her labels to both
  Bob and Charlie.  Charlie forwards his Paulis, outcomes, and arrival
  times to Bob.  Bob reconstructs what the residual Pauli on each probe
  must have been if the announcement is honest, undoes it, and checks that
  every probe measures back to its prepared bit and that both arrival
  windows equal one light trip exactly.

Runs execute in one of two modes sharing one orchestration path: SYMBOLIC
tracks labels and Pauli frames only (exact for Clifford probe rotations),
ORACLE simulates each pair's five qubits as a dense statevector.  With the
same randomness plan the two modes produce identical transcripts.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .pauli_bell import (
    BELL_LABELS,
    BellLabel,
    CLIFFORD_GROUP,
    CliffordOp,
    PauliLabel,
    apply_pauli_to_label,
    compose_paulis,
    conjugate_pauli,
    reveal_pauli,
    swap_labels,
    teleport_correction,
)
from . import statevector as sv
from .spacetime import (
    SPEED_OF_LIGHT_M_PER_S,
    EventQueue,
    TimingWindow,
    cross_check_clocks,
    latency,
)

__all__ = [
    "RunMode",
    "CommitmentValue",
    "encode_commitment",
    "decode_commitment",
    "InconsistentLabelsError",
    "MalformedMessage",
    "RejectReason",
    "Verdict",
    "Geometry",
    "PairPlan",
    "RandomPlan",
    "Message",
    "PairRecord",
    "BobPairCheck",
    "ProtocolTranscript",
    "AliceStrategy",
    "ChannelTap",
    "RunSettings",
    "ProtocolRun",
    "run_protocol",
    "decide_verdict",
]


class RunMode(str, enum.Enum):
    SYMBOLIC = "symbolic"
    ORACLE = "oracle"


class CommitmentValue(str, enum.Enum):
    BIT0 = "BIT0"
    BIT1 = "BIT1"
    QUBIT_PLUS = "QUBIT_PLUS"
    QUBIT_MINUS = "QUBIT_MINUS"


_COMMITMENT_CODE = {
    CommitmentValue.BIT0: BellLabel(0, 0),
    CommitmentValue.BIT1: BellLabel(0, 1),
    CommitmentValue.QUBIT_PLUS: BellLabel(1, 0),
    CommitmentValue.QUBIT_MINUS: BellLabel(1, 1),
}
_CODE_TO_VALUE = {label: value for value, label in _COMMITMENT_CODE.items()}


def encode_commitment(value: CommitmentValue) -> BellLabel:
    """Bell label the committer prepares for a given commitment value."""
    return _COMMITMENT_CODE[CommitmentValue(value)]


class InconsistentLabelsError(ValueError):
    """Announced labels differ across pairs, so they encode no value."""


def decode_commitment(labels: Sequence[BellLabel]) -> CommitmentValue:
    """Inverse of the commitment code; all labels must agree."""
    if not labels:
        raise ValueError("cannot decode an empty label list")
    first = labels[0]
    if any(lbl != first for lbl in labels):
        raise InconsistentLabelsError(f"labels differ across pairs: {[str(l) for l in labels]}")
    return _CODE_TO_VALUE[first]


class MalformedMessage(Exception):
    """A handler received a structurally invalid message."""


class RejectReason(str, enum.Enum):
    STATE_MISMATCH = "STATE_MISMATCH"
    INCONSISTENT_LABELS = "INCONSISTENT_LABELS"
    TIMING_VIOLATION = "TIMING_VIOLATION"
    MALFORMED_MESSAGE = "MALFORMED_MESSAGE"


@dataclass(frozen=True)
class Verdict:
    status: str  # "ACCEPT" or "REJECT"
    value: Optional[CommitmentValue] = None
    reason: Optional[RejectReason] = None
    detail: str = ""

    @property
    def accepted(self) -> bool:
        return self.status == "ACCEPT"


@dataclass(frozen=True)
class Geometry:
    """1D positions of the three sites, in meters."""

    alice_m: float
    bob_m: float
    charlie_m: float

    @classmethod
    def canonical(cls, distance_m: float = 3.0e5) -> "Geometry":
        """Collinear layout with the committer midway: agent, committer, receiver."""
        return cls(alice_m=0.0, bob_m=distance_m, charlie_m=-distance_m)


# ---------------------------------------------------------------------------
# Randomness plan
# ---------------------------------------------------------------------------
#
# Every stochastic choice in a run is drawn up front into a plan, one entry
# per pair.  Measurement outcomes are represented as pre-drawn uniforms so
# the symbolic and oracle backends consume identical randomness; golden and
# enumeration tests instead force outcomes outright.

BsmSource = Union[BellLabel, float]


@dataclass
class PairPlan:
    bc_label: BellLabel
    charlie_pauli: PauliLabel
    charlie_bsm: BsmSource
    prepared_bit: int
    unitary: Union[CliffordOp, np.ndarray]
    teleport_bsm: BsmSource
    final_draw: float = 0.0
    intercept_draw: float = 0.0
    intercept_measure: float = 0.0


@dataclass
class RandomPlan:
    pairs: list[PairPlan]

    @classmethod
    def sample(
        cls,
        rng: np.random.Generator,
        n_pairs: int,
        pauli_set: Sequence[PauliLabel],
        u_distribution: str = "clifford",
    ) -> "RandomPlan":
        pairs = []
        for _ in range(n_pairs):
            bc = BELL_LABELS[int(rng.integers(4))]
            pauli = pauli_set[int(rng.integers(len(pauli_set)))]
            charlie_bsm = float(rng.random())
            prepared = int(rng.integers(2))
            if u_distribution == "clifford":
                unitary: Union[CliffordOp, np.ndarray] = CLIFFORD_GROUP[int(rng.integers(24))]
            elif u_distribution == "haar":
                unitary = sv.haar_random_unitary2(rng)
            else:
                raise ValueError(f"unknown unitary distribution {u_distribution!r}")
            pairs.append(
                PairPlan(
                    bc_label=bc,
                    charlie_pauli=pauli,
                    charlie_bsm=charlie_bsm,
                    prepared_bit=prepared,
                    unitary=unitary,
                    teleport_bsm=float(rng.random()),
                    final_draw=float(rng.random()),
                    intercept_draw=float(rng.random()),
                    intercept_measure=float(rng.random()),
                )
            )
        return cls(pairs=pairs)


# ---------------------------------------------------------------------------
# Quantum backends
# ---------------------------------------------------------------------------


def _source_to_bell(source: BsmSource) -> BellLabel:
    if isinstance(source, BellLabel):
        return source
    return BELL_LABELS[min(int(source * 4), 3)]


class SymbolicBackend:
    """Label and Pauli-frame bookkeeping, exact for Clifford probe rotations.

    All operations commute at the label level, so corrections are derived
    lazily at measurement time from the final labels; this makes the
    backend indifferent to event ordering.
    """

    mode = RunMode.SYMBOLIC

    def __init__(self, n_pairs: int):
        self.ac_labels: list[Optional[BellLabel]] = [None] * n_pairs
        self.bc_labels: list[Optional[BellLabel]] = [None] * n_pairs
        self.charlie_outcomes: list[Optional[BellLabel]] = [None] * n_pairs
        self.alice_post: list[PauliLabel] = [PauliLabel(0, 0)] * n_pairs
        self.prepared: list[int] = [0] * n_pairs
        self.unitaries: list[Optional[CliffordOp]] = [None] * n_pairs
        self.teleport_outcomes: list[Optional[BellLabel]] = [None] * n_pairs

    def init_pair(self, n: int, ac_label: BellLabel, bc_label: BellLabel) -> None:
        self.ac_labels[n] = ac_label
        self.bc_labels[n] = bc_label

    def intercept_resend(self, n: int, plan: PairPlan) -> int:
        raise NotImplementedError(
            "intercept-resend collapses entanglement and needs the oracle backend"
        )

    def charlie_pauli(self, n: int, p: PauliLabel) -> None:
        if self.charlie_outcomes[n] is not None:
            raise RuntimeError("pair already swapped")
        self.ac_labels[n] = apply_pauli_to_label(self.ac_labels[n], p)

    def alice_retained_pauli(self, n: int, p: PauliLabel) -> None:
        # Before the swap this shifts the committer-agent label; afterwards
        # it rides on the held qubit's Pauli frame.  Both give the same
        # final algebra.
        if self.charlie_outcomes[n] is None:
            self.ac_labels[n] = apply_pauli_to_label(self.ac_labels[n], p)
        else:
            self.alice_post[n] = compose_paulis(p, self.alice_post[n])

    def charlie_bsm(self, n: int, source: BsmSource) -> BellLabel:
        outcome = _source_to_bell(source)
        self.charlie_outcomes[n] = outcome
        return outcome

    def swapped_label(self, n: int) -> BellLabel:
        return swap_labels(self.ac_labels[n], self.bc_labels[n], self.charlie_outcomes[n])

    def teleport(self, n: int, prepared_bit: int, unitary, source: BsmSource) -> BellLabel:
        if not isinstance(unitary, CliffordOp):
            raise TypeError("symbolic runs require Clifford probe rotations")
        self.prepared[n] = prepared_bit
        self.unitaries[n] = unitary
        outcome = _source_to_bell(source)
        self.teleport_outcomes[n] = outcome
        return outcome

    def alice_reveal_pauli(self, n: int, p: PauliLabel) -> None:
        self.alice_post[n] = compose_paulis(p, self.alice_post[n])

    def undo_and_measure(self, n: int, undo: PauliLabel, source: float) -> int:
        k, k_prime = teleport_correction(self.swapped_label(n), self.teleport_outcomes[n])
        frame = compose_paulis(self.alice_post[n], PauliLabel(k, k_prime))
        residual = compose_paulis(undo, frame)
        rotated, _sign = conjugate_pauli(self.unitaries[n], residual)
        return self.prepared[n] ^ rotated.x_exp


class OracleBackend:
    """Dense five-qubit statevector per pair.

    Qubit layout per pair: 0 committer's retained half, 1 the shipped half,
    2 agent's half of the agent-receiver pair, 3 receiver's half, 4 the
    receiver's probe qubit.
    """

    mode = RunMode.ORACLE

    def __init__(self, n_pairs: int):
        self.states: list[Optional[sv.StateVector]] = [None] * n_pairs
        self.prepared: list[int] = [0] * n_pairs
        self.unitaries: list[Optional[np.ndarray]] = [None] * n_pairs

    def init_pair(self, n: int, ac_label: BellLabel, bc_label: BellLabel) -> None:
        self.states[n] = sv.product_state(
            [
                ((0, 1), sv.prepare_bell(ac_label)),
                ((3, 2), sv.prepare_bell(bc_label)),
                ((4,), sv.basis_state(1, [0])),
            ]
        )

    def intercept_resend(self, n: int, plan: PairPlan) -> int:
        result = sv.measure_computational(self.states[n], 1, plan.intercept_measure)
        self.states[n] = result.state
        return result.bit

    def charlie_pauli(self, n: int, p: PauliLabel) -> None:
        self.states[n] = sv.apply_pauli(self.states[n], 1, p)

    def alice_retained_pauli(self, n: int, p: PauliLabel) -> None:
        self.states[n] = sv.apply_pauli(self.states[n], 0, p)

    def charlie_bsm(self, n: int, source: BsmSource) -> BellLabel:
        result = sv.bsm(self.states[n], 1, 2, source)
        if result.state is None:
            raise ValueError(f"forced swap outcome {result.outcome} has probability 0")
        self.states[n] = result.state
        return result.outcome

    def teleport(self, n: int, prepared_bit: int, unitary, source: BsmSource) -> BellLabel:
        matrix = unitary.matrix() if isinstance(unitary, CliffordOp) else np.asarray(unitary)
        self.prepared[n] = prepared_bit
        self.unitaries[n] = matrix
        state = self.states[n]
        if prepared_bit:
            state = sv.apply_pauli(state, 4, PauliLabel(0, 1))
        state = sv.apply_single_qubit(state, 4, matrix)
        result = sv.bsm(state, 4, 3, source)
        if result.state is None:
            raise ValueError(f"forced teleport outcome {result.outcome} has probability 0")
        self.states[n] = result.state
        return result.outcome

    def alice_reveal_pauli(self, n: int, p: PauliLabel) -> None:
        self.states[n] = sv.apply_pauli(self.states[n], 0, p)

    def undo_and_measure(self, n: int, undo: PauliLabel, source: float) -> int:
        state = sv.apply_pauli(self.states[n], 0, undo)
        state = sv.apply_single_qubit(state, 0, self.unitaries[n].conj().T)
        result = sv.measure_computational(state, 0, source)
        self.states[n] = result.state
        return result.bit


def make_backend(mode: RunMode, n_pairs: int):
    return SymbolicBackend(n_pairs) if RunMode(mode) is RunMode.SYMBOLIC else OracleBackend(n_pairs)


# ---------------------------------------------------------------------------
# Strategies (honest defaults; adversaries subclass)
# ---------------------------------------------------------------------------


class AliceStrategy:
    """Honest committer: announce what was committed, on time, from here."""

    def __init__(self, value: CommitmentValue):
        self.value = CommitmentValue(value)

    def prepare(self, n_pairs: int, rng: Optional[np.random.Generator]) -> None:
        """Called once at run start, before any event fires."""

    def committed_label(self) -> BellLabel:
        return encode_commitment(self.value)

    def retained_paulis(self, n_pairs: int) -> Optional[list[PauliLabel]]:
        """Extra Paulis to apply to the retained halves before revealing."""
        return None

    def announced_labels(self, n_pairs: int) -> list[BellLabel]:
        return [self.committed_label()] * n_pairs

    def reveal_delay_s(self) -> float:
        return 0.0

    def reveal_origin_m(self, committed_position_m: float) -> float:
        return committed_position_m


class ChannelTap:
    """Hook on the committer-to-agent quantum channel; default does nothing."""

    def intercept(self, backend, n: int, plan: PairPlan) -> bool:
        return False


# ---------------------------------------------------------------------------
# Transcript records
# ---------------------------------------------------------------------------


@dataclass
class Message:
    kind: str
    sender: str
    receiver: str
    send_time_s: float
    recv_time_s: float
    payload: dict = field(default_factory=dict)

    def log_entry(self) -> dict:
        return {
            "sender": self.sender,
            "receiver": self.receiver,
            "kind": self.kind,
            "send_time_s": self.send_time_s,
            "recv_time_s": self.recv_time_s,
        }


@dataclass
class PairRecord:
    index: int
    alice_label: BellLabel
    bc_label: BellLabel
    charlie_pauli: Optional[PauliLabel] = None
    charlie_bsm: Optional[BellLabel] = None
    bob_prepared_bit: Optional[int] = None
    bob_unitary: Optional[Union[CliffordOp, np.ndarray]] = None
    bob_teleport_bsm: Optional[BellLabel] = None
    intercepted: bool = False

    def to_dict(self) -> dict:
        if isinstance(self.bob_unitary, CliffordOp):
            unitary: Union[int, list, None] = self.bob_unitary.index
        elif self.bob_unitary is None:
            unitary = None
        else:
            unitary = [[[float(x.real), float(x.imag)] for x in row] for row in self.bob_unitary]
        return {
            "index": self.index,
            "alice_label": str(self.alice_label),
            "bc_label": str(self.bc_label),
            "charlie_pauli": None if self.charlie_pauli is None else self.charlie_pauli.name,
            "charlie_bsm": None if self.charlie_bsm is None else str(self.charlie_bsm),
            "bob_prepared_bit": self.bob_prepared_bit,
            "bob_unitary": unitary,
            "bob_teleport_bsm": None if self.bob_teleport_bsm is None else str(self.bob_teleport_bsm),
            "intercepted": self.intercepted,
        }


@dataclass
class BobPairCheck:
    """What the receiver reconstructs for one pair during verification."""

    index: int
    claimed_ac: BellLabel
    claimed_swapped: BellLabel
    k: int
    k_prime: int
    measured_bit: int
    expected_bit: int

    @property
    def passed(self) -> bool:
        return self.measured_bit == self.expected_bit

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "claimed_ac": str(self.claimed_ac),
            "claimed_swapped": str(self.claimed_swapped),
            "k": self.k,
            "k_prime": self.k_prime,
            "measured_bit": self.measured_bit,
            "expected_bit": self.expected_bit,
            "passed": self.passed,
        }


@dataclass
class ProtocolTranscript:
    """Complete record of one protocol run, the golden-file format."""

    mode: RunMode
    n_pairs: int
    geometry: Geometry
    epsilon_s: float
    processing_delay_s: float
    pair_records: list[PairRecord]
    messages: list[Message]
    announced_labels: list[BellLabel]
    announced_position_m: Optional[float]
    bob_checks: list[BobPairCheck]
    bob_window: Optional[TimingWindow]
    agent_window: Optional[TimingWindow]
    verdict: Verdict
    amplitude_dumps: Optional[list[list[list[float]]]] = None

    def to_dict(self, include_mode: bool = True, include_amplitudes: bool = True) -> dict:
        def window_dict(w: Optional[TimingWindow]) -> Optional[dict]:
            if w is None:
                return None
            return {"start_s": w.start_s, "end_s": w.end_s, "distance_m": w.distance_m}

        doc = {
            "n_pairs": self.n_pairs,
            "geometry": {
                "alice_m": self.geometry.alice_m,
                "bob_m": self.geometry.bob_m,
                "charlie_m": self.geometry.charlie_m,
            },
            "epsilon_s": self.epsilon_s,
            "processing_delay_s": self.processing_delay_s,
            "pairs": [r.to_dict() for r in self.pair_records],
            "messages": [m.log_entry() for m in self.messages],
            "announced_labels": [str(l) for l in self.announced_labels],
            "announced_position_m": self.announced_position_m,
            "bob_checks": [c.to_dict() for c in self.bob_checks],
            "timing": {
                "bob": window_dict(self.bob_window),
                "agent": window_dict(self.agent_window),
            },
            "verdict": {
                "status": self.verdict.status,
                "value": None if self.verdict.value is None else self.verdict.value.value,
                "reason": None if self.verdict.reason is None else self.verdict.reason.value,
                "detail": self.verdict.detail,
            },
        }
        if include_mode:
            doc["mode"] = self.mode.value
        if include_amplitudes and self.amplitude_dumps is not None:
            doc["amplitude_dumps"] = self.amplitude_dumps
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def core_dict(self) -> dict:
        """Mode-independent view used by the mode-agreement checks."""
        return self.to_dict(include_mode=False, include_amplitudes=False)


# ---------------------------------------------------------------------------
# The run itself
# ---------------------------------------------------------------------------


@dataclass
class RunSettings:
    mode: RunMode = RunMode.SYMBOLIC
    n_pairs: int = 3
    geometry: Geometry = field(default_factory=Geometry.canonical)
    epsilon_s: float = 0.0
    processing_delay_s: float = 0.0
    record_amplitudes: bool = False

    def __post_init__(self) -> None:
        self.mode = RunMode(self.mode)
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be at least 1")


MSG_COMMIT_QUBITS = "commit_qubits"
MSG_COMMIT_DUMMY = "commit_dummy"
MSG_POSITION = "position_announcement"
MSG_REVEAL_QUBITS = "reveal_qubits"
MSG_REVEAL_LABELS = "reveal_labels"
MSG_AGENT_REPORT = "agent_report"

ALICE, BOB, CHARLIE = "alice", "bob", "charlie"


def decide_verdict(
    checks: Sequence[BobPairCheck],
    announced: Sequence[BellLabel],
    bob_window: TimingWindow,
    agent_window: TimingWindow,
    epsilon_s: float,
) -> Verdict:
    """Pure verdict logic: state checks, label consistency, then timing."""
    for check in checks:
        if not check.passed:
            return Verdict(
                "REJECT",
                reason=RejectReason.STATE_MISMATCH,
                detail=f"pair {check.index} measured {check.measured_bit}, expected {check.expected_bit}",
            )
    try:
        value = decode_commitment(list(announced))
    except InconsistentLabelsError as exc:
        return Verdict("REJECT", reason=RejectReason.INCONSISTENT_LABELS, detail=str(exc))
    if not cross_check_clocks(bob_window, agent_window, epsilon_s):
        return Verdict(
            "REJECT",
            reason=RejectReason.TIMING_VIOLATION,
            detail=(
                f"receiver window {bob_window.elapsed_s!r}s vs "
                f"{bob_window.distance_m / SPEED_OF_LIGHT_M_PER_S!r}s, "
                f"agent window {agent_window.elapsed_s!r}s"
            ),
        )
    return Verdict("ACCEPT", value=value)


class ProtocolRun:
    def __init__(
        self,
        settings: RunSettings,
        plan: RandomPlan,
        strategy: AliceStrategy,
        tap: Optional[ChannelTap] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        if len(plan.pairs) != settings.n_pairs:
            raise ValueError("randomness plan size does not match n_pairs")
        self.settings = settings
        self.plan = plan
        self.strategy = strategy
        self.tap = tap or ChannelTap()
        self.rng = rng
        self.queue = EventQueue()
        self.backend = make_backend(settings.mode, settings.n_pairs)
        self.records = [
            PairRecord(index=n, alice_label=strategy.committed_label(), bc_label=plan.pairs[n].bc_label)
            for n in range(settings.n_pairs)
        ]
        self.messages: list[Message] = []
        self.announced: Optional[list[BellLabel]] = None
        self.announced_position: Optional[float] = None
        self.charlie_report: Optional[dict] = None
        self.bob_t: Optional[float] = None
        self.bob_reveal_arrivals: dict[str, float] = {}
        self.charlie_t: Optional[float] = None
        self.charlie_report_received: Optional[dict] = None
        self.bob_checks: list[BobPairCheck] = []
        self.bob_window: Optional[TimingWindow] = None
        self.agent_window: Optional[TimingWindow] = None
        self.verdict: Optional[Verdict] = None

    # -- messaging ----------------------------------------------------------

    def _position_of(self, party: str) -> float:
        g = self.settings.geometry
        return {ALICE: g.alice_m, BOB: g.bob_m, CHARLIE: g.charlie_m}[party]

    def _send(
        self,
        kind: str,
        sender: str,
        receiver: str,
        payload: dict,
        origin_m: Optional[float] = None,
        send_time_s: Optional[float] = None,
    ) -> None:
        origin = self._position_of(sender) if origin_m is None else origin_m
        send_time = self.queue.now if send_time_s is None else send_time_s
        recv_time = send_time + latency(origin, self._position_of(receiver))
        msg = Message(kind, sender, receiver, send_time, recv_time, payload)
        self.messages.append(msg)
        self.queue.schedule(recv_time, lambda m=msg: self._deliver(m), note=f"{kind}->{receiver}")

    def _deliver(self, msg: Message) -> None:
        if self.verdict is not None:
            return
        handler = {
            (MSG_COMMIT_QUBITS, CHARLIE): self._charlie_on_qubits,
            (MSG_COMMIT_DUMMY, BOB): self._bob_on_dummy,
            (MSG_POSITION, BOB): self._bob_on_position,
            (MSG_POSITION, CHARLIE): self._charlie_on_position,
            (MSG_REVEAL_LABELS, CHARLIE): self._charlie_on_reveal_labels,
            (MSG_REVEAL_QUBITS, BOB): self._bob_on_reveal_qubits,
            (MSG_REVEAL_LABELS, BOB): self._bob_on_reveal_labels,
            (MSG_AGENT_REPORT, BOB): self._bob_on_agent_report,
        }.get((msg.kind, msg.receiver))
        if handler is None:
            raise MalformedMessage(f"no handler for {msg.kind} at {msg.receiver}")
        handler(msg)

    # -- commit phase --------------------------------------------------------

    def _alice_commit(self) -> None:
        n_pairs = self.settings.n_pairs
        self.strategy.prepare(n_pairs, self.rng)
        label = self.strategy.committed_label()
        for n in range(n_pairs):
            self.backend.init_pair(n, label, self.plan.pairs[n].bc_label)
        position = self._position_of(ALICE)
        self._send(MSG_COMMIT_QUBITS, ALICE, CHARLIE, {"n_pairs": n_pairs})
        self._send(MSG_COMMIT_DUMMY, ALICE, BOB, {"dummy": True})
        self._send(MSG_POSITION, ALICE, BOB, {"position_m": position})
        self._send(MSG_POSITION, ALICE, CHARLIE, {"position_m": position})
        # The reveal fires as soon as both neighbors have acted, i.e. one
        # light trip to the farther of the two.
        base = self.queue.now + max(
            latency(position, self._position_of(BOB)),
            latency(position, self._position_of(CHARLIE)),
        )
        reveal_time = base + self.strategy.reveal_delay_s() + self.settings.processing_delay_s
        self.queue.schedule(reveal_time, self._alice_reveal, note="alice reveal")

    def _charlie_on_qubits(self, msg: Message) -> None:
        if msg.payload.get("n_pairs") != self.settings.n_pairs:
            raise MalformedMessage("quantum shipment size does not match the session")
        self.charlie_t = msg.recv_time_s
        for n in range(self.settings.n_pairs):
            plan = self.plan.pairs[n]
            if self.tap.intercept(self.backend, n, plan):
                self.records[n].intercepted = True
            self.backend.charlie_pauli(n, plan.charlie_pauli)
            outcome = self.backend.charlie_bsm(n, plan.charlie_bsm)
            self.records[n].charlie_pauli = plan.charlie_pauli
            self.records[n].charlie_bsm = outcome

    def _bob_on_dummy(self, msg: Message) -> None:
        self.bob_t = msg.recv_time_s
        for n in range(self.settings.n_pairs):
            plan = self.plan.pairs[n]
            outcome = self.backend.teleport(n, plan.prepared_bit, plan.unitary, plan.teleport_bsm)
            self.records[n].bob_prepared_bit = plan.prepared_bit
            self.records[n].bob_unitary = plan.unitary
            self.records[n].bob_teleport_bsm = outcome

    def _bob_on_position(self, msg: Message) -> None:
        self.announced_position = float(msg.payload["position_m"])

    def _charlie_on_position(self, msg: Message) -> None:
        pass  # recorded in the message log; the agent echoes times, not positions

    # -- reveal phase ---------------------------------------------------------

    def _alice_reveal(self) -> None:
        n_pairs = self.settings.n_pairs
        extra = self.strategy.retained_paulis(n_pairs)
        if extra is not None:
            if len(extra) != n_pairs:
                raise ValueError("retained Pauli list must have one entry per pair")
            for n, p in enumerate(extra):
                self.backend.alice_retained_pauli(n, p)
        announced = self.strategy.announced_labels(n_pairs)
        if len(announced) != n_pairs:
            raise ValueError("announcement must carry one label per pair")
        for n, lbl in enumerate(announced):
            self.backend.alice_reveal_pauli(n, reveal_pauli(lbl))
        origin = self.strategy.reveal_origin_m(self._position_of(ALICE))
        labels_payload = {"labels": [str(l) for l in announced]}
        self._send(MSG_REVEAL_QUBITS, ALICE, BOB, {"n_pairs": n_pairs}, origin_m=origin)
        self._send(MSG_REVEAL_LABELS, ALICE, BOB, labels_payload, origin_m=origin)
        self._send(MSG_REVEAL_LABELS, ALICE, CHARLIE, labels_payload, origin_m=origin)

    def _parse_labels(self, payload: dict) -> list[BellLabel]:
        raw = payload.get("labels")
        if not isinstance(raw, list) or len(raw) != self.settings.n_pairs:
            raise MalformedMessage("announcement must carry one label per pair")
        try:
            return [BellLabel.from_string(s) for s in raw]
        except (ValueError, TypeError) as exc:
            raise MalformedMessage(f"unparseable Bell label in announcement: {exc}") from exc

    def _charlie_on_reveal_labels(self, msg: Message) -> None:
        if self.charlie_t is None:
            raise MalformedMessage("reveal announcement arrived before the committed qubits")
        labels = self._parse_labels(msg.payload)
        report = {
            "t_prime_s": self.charlie_t,
            "big_t_prime_s": msg.recv_time_s,
            "paulis": [r.charlie_pauli.name for r in self.records],
            "bsm_outcomes": [str(r.charlie_bsm) for r in self.records],
            "announced_labels_seen": [str(l) for l in labels],
        }
        self.charlie_report = report
        self._send(
            MSG_AGENT_REPORT,
            CHARLIE,
            BOB,
            report,
            send_time_s=msg.recv_time_s + self.settings.processing_delay_s,
        )

    def _bob_on_reveal_qubits(self, msg: Message) -> None:
        if msg.payload.get("n_pairs") != self.settings.n_pairs:
            raise MalformedMessage("returned qubit shipment size does not match the session")
        self.bob_reveal_arrivals["qubits"] = msg.recv_time_s
        self._bob_maybe_finalize()

    def _bob_on_reveal_labels(self, msg: Message) -> None:
        self.announced = self._parse_labels(msg.payload)
        self.bob_reveal_arrivals["labels"] = msg.recv_time_s
        self._bob_maybe_finalize()

    def _bob_on_agent_report(self, msg: Message) -> None:
        report = msg.payload
        for key in ("t_prime_s", "big_t_prime_s", "paulis", "bsm_outcomes"):
            if key not in report:
                raise MalformedMessage(f"agent report missing {key}")
        if len(report["paulis"]) != self.settings.n_pairs or len(report["bsm_outcomes"]) != self.settings.n_pairs:
            raise MalformedMessage("agent report must cover every pair")
        self.charlie_report_received = report
        self._bob_maybe_finalize()

    def _bob_maybe_finalize(self) -> None:
        if self.verdict is not None:
            return
        if (
            self.announced is None
            or self.charlie_report_received is None
            or "qubits" not in self.bob_reveal_arrivals
            or self.bob_t is None
            or self.announced_position is None
        ):
            return
        self._bob_verify()

    def _bob_verify(self) -> None:
        report = self.charlie_report_received
        paulis = [PauliLabel.from_name(s) for s in report["paulis"]]
        outcomes = [BellLabel.from_string(s) for s in report["bsm_outcomes"]]
        checks = []
        for n in range(self.settings.n_pairs):
            record = self.records[n]
            claimed_ac = apply_pauli_to_label(self.announced[n], paulis[n])
            claimed_swapped = swap_labels(claimed_ac, record.bc_label, outcomes[n])
            k, k_prime = teleport_correction(claimed_swapped, record.bob_teleport_bsm)
            undo = compose_paulis(reveal_pauli(self.announced[n]), PauliLabel(k, k_prime))
            measured = self.backend.undo_and_measure(n, undo, self.plan.pairs[n].final_draw)
            checks.append(
                BobPairCheck(
                    index=n,
                    claimed_ac=claimed_ac,
                    claimed_swapped=claimed_swapped,
                    k=k,
                    k_prime=k_prime,
                    measured_bit=measured,
                    expected_bit=record.bob_prepared_bit,
                )
            )
        reveal_arrival = max(self.bob_reveal_arrivals.values())
        self.bob_window = TimingWindow(
            start_s=self.bob_t,
            end_s=reveal_arrival,
            distance_m=abs(self.announced_position - self._position_of(BOB)),
        )
        self.agent_window = TimingWindow(
            start_s=report["t_prime_s"],
            end_s=report["big_t_prime_s"],
            distance_m=abs(self.announced_position - self._position_of(CHARLIE)),
        )
        self.bob_checks = checks
        self.verdict = decide_verdict(
            checks, self.announced, self.bob_window, self.agent_window, self.settings.epsilon_s
        )

    # -- execution -------------------------------------------------------------

    def execute(self) -> ProtocolTranscript:
        self.queue.schedule(0.0, self._alice_commit, note="alice commit")
        try:
            self.queue.run_until_idle()
        except MalformedMessage as exc:
            self.verdict = Verdict("REJECT", reason=RejectReason.MALFORMED_MESSAGE, detail=str(exc))
        if self.verdict is None:
            # Reveal-phase traffic never completed; past the window this is
            # indistinguishable from stalling.
            self.verdict = Verdict(
                "REJECT",
                reason=RejectReason.TIMING_VIOLATION,
                detail="reveal-phase messages missing at end of run",
            )
        dumps = None
        if self.settings.record_amplitudes and isinstance(self.backend, OracleBackend):
            dumps = [
                sv.amplitudes_as_pairs(state) if state is not None else []
                for state in self.backend.states
            ]
        return ProtocolTranscript(
            mode=self.settings.mode,
            n_pairs=self.settings.n_pairs,
            geometry=self.settings.geometry,
            epsilon_s=self.settings.epsilon_s,
            processing_delay_s=self.settings.processing_delay_s,
            pair_records=self.records,
            messages=self.messages,
            announced_labels=self.announced or [],
            announced_position_m=self.announced_position,
            bob_checks=self.bob_checks,
            bob_window=self.bob_window,
            agent_window=self.agent_window,
            verdict=self.verdict,
            amplitude_dumps=dumps,
        )


def run_protocol(
    settings: RunSettings,
    plan: RandomPlan,
    strategy: AliceStrategy,
    tap: Optional[ChannelTap] = None,
    rng: Optional[np.random.Generator] = None,
) -> ProtocolTranscript:
    """Execute one full commitment/reveal round and return its transcript."""
    return ProtocolRun(settings, plan, strategy, tap=tap, rng=rng).execute()
