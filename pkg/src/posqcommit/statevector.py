"""Dense statevector oracle for small qubit registers.

This is the brute-force half of every dual check in the library: the label
algebra in :mod:`posqcommit.pauli_bell` is fast but convention-laden, and
this module settles the conventions by explicit amplitude arithmetic.  It
also runs the protocol when the committer's partner uses non-Clifford
unitaries, and models state-destroying attacks (intercept-resend).

Conventions, fixed and load-bearing:

* Qubit ordering is big-endian: qubit 0 is the most significant bit of the
  amplitude index, so ``reshape([2] * n)`` puts qubit ``k`` on axis ``k``.
* ``Bell(phase, parity)`` has amplitude 1/sqrt(2) on ``|0, parity>`` and
  ``(-1)^phase / sqrt(2)`` on ``|1, 1 xor parity>``.
* All state comparisons are squared-overlap fidelity (global phase blind),
  with absolute tolerance 1e-9; register sizes stay at or below 12 qubits,
  which keeps accumulated rounding far under that.
* A Bell measurement leaves the two measured qubits in place, collapsed to
  the named Bell state; nothing is factored out, so qubit indices stay
  stable for the caller.

Measurement outcome sources come in three flavors so that enumeration
stays deterministic while Monte Carlo stays honest: a forced outcome, a
pre-drawn uniform float in [0, 1), or a ``numpy.random.Generator``.
"""

from __future__ import annotations

from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .pauli_bell import BELL_LABELS, BellLabel, PauliLabel

__all__ = [
    "ATOL",
    "MAX_QUBITS",
    "StateVector",
    "BsmResult",
    "MeasureResult",
    "basis_state",
    "prepare_bell",
    "product_state",
    "apply_single_qubit",
    "apply_pauli",
    "bsm",
    "bsm_probabilities",
    "measure_computational",
    "fidelity",
    "pauli_matrix",
    "hermitian_pauli_matrix",
    "haar_random_unitary2",
    "haar_random_state",
    "amplitudes_as_pairs",
]

ATOL = 1e-9
MAX_QUBITS = 12

_SQRT_HALF = 0.5**0.5

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "ZX": np.array([[0, 1], [-1, 0]], dtype=complex),  # sigma_z sigma_x
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
}


class StateVector:
    """Normalized complex amplitude vector over ``n_qubits`` qubits."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**n_qubits:
            raise ValueError(
                f"amplitude vector has length {amps.size}, expected {2**n_qubits}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 by more than {ATOL}")
        self.n_qubits = n_qubits
        self.amplitudes = amps

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.n_qubits)

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


class BsmResult(NamedTuple):
    outcome: BellLabel
    state: Optional[StateVector]  # None flags a forced zero-probability outcome
    probability: float


class MeasureResult(NamedTuple):
    bit: int
    state: Optional[StateVector]
    probability: float


def basis_state(n_qubits: int, bits: Sequence[int]) -> StateVector:
    """Computational basis state |bits[0] bits[1] ...>."""
    if len(bits) != n_qubits:
        raise ValueError("one bit per qubit required")
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        index = (index << 1) | b
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


def _bell_amplitudes(label: BellLabel) -> np.ndarray:
    amps = np.zeros(4, dtype=complex)
    amps[label.parity] = _SQRT_HALF  # |0, parity>
    amps[2 + (1 ^ label.parity)] = (-1.0) ** label.phase * _SQRT_HALF
    return amps


def prepare_bell(label: BellLabel) -> StateVector:
    """Two-qubit Bell state named by ``label``."""
    return StateVector(2, _bell_amplitudes(label))


def product_state(factors: Sequence[tuple[Sequence[int], StateVector]]) -> StateVector:
    """Tensor product of sub-states placed on explicit qubit positions.

    ``factors`` is a sequence of ``(qubits, state)`` pairs whose qubit
    positions must exactly tile ``0..n-1``.
    """
    order: list[int] = []
    tensors = []
    for qubits, sub in factors:
        if len(qubits) != sub.n_qubits:
            raise ValueError("factor qubit count does not match its state")
        order.extend(qubits)
        tensors.append(sub.amplitudes)
    n = len(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"factor qubits must tile 0..{n - 1} exactly, got {order}")
    amps = tensors[0]
    for t in tensors[1:]:
        amps = np.kron(amps, t)
    # amps axes are currently in `order`; permute back to register order.
    tensor = amps.reshape([2] * n)
    tensor = np.moveaxis(tensor, range(n), order)
    return StateVector(n, tensor.reshape(-1))


def apply_single_qubit(state: StateVector, qubit_index: int, u: np.ndarray) -> StateVector:
    """Apply a 2x2 unitary to one qubit, identity elsewhere."""
    n = state.n_qubits
    if not 0 <= qubit_index < n:
        raise IndexError(f"qubit index {qubit_index} out of range for {n} qubits")
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > ATOL:
        raise ValueError("matrix is not unitary within tolerance")
    t = np.tensordot(u, state.tensor(), axes=([1], [qubit_index]))
    t = np.moveaxis(t, 0, qubit_index)
    return StateVector(n, t.reshape(-1))


def pauli_matrix(p: PauliLabel) -> np.ndarray:
    """Matrix sigma_z^z_exp sigma_x^x_exp for a Pauli label (exact phase)."""
    return np.array(_PAULI_MATRICES[p.name])


def hermitian_pauli_matrix(p: PauliLabel) -> np.ndarray:
    """Hermitian representative of a Pauli label ("ZX" maps to Y)."""
    return np.array(_PAULI_MATRICES["Y" if p.name == "ZX" else p.name])


def apply_pauli(state: StateVector, qubit_index: int, p: PauliLabel) -> StateVector:
    return apply_single_qubit(state, qubit_index, pauli_matrix(p))


OutcomeSource = Union[BellLabel, int, float, np.random.Generator]


def _draw_index(probs: np.ndarray, source: Union[float, np.random.Generator]) -> int:
    if isinstance(source, np.random.Generator):
        u = float(source.random())
    elif isinstance(source, float):
        if not 0.0 <= source < 1.0:
            raise ValueError(f"pre-drawn uniform must lie in [0, 1), got {source}")
        u = source
    else:
        raise TypeError(f"unsupported outcome source {source!r}")
    return min(int(np.searchsorted(np.cumsum(probs), u, side="right")), len(probs) - 1)


def _project_pair(tensor: np.ndarray, q1: int, q2: int, pair_amps: np.ndarray) -> np.ndarray:
    """<pair|_{q1,q2} psi: residual tensor over the remaining axes."""
    return np.tensordot(pair_amps.reshape(2, 2).conj(), tensor, axes=([0, 1], [q1, q2]))


def bsm_probabilities(state: StateVector, q1: int, q2: int) -> np.ndarray:
    """Born probabilities of the four Bell outcomes on (q1, q2)."""
    if q1 == q2:
        raise ValueError("Bell measurement requires two distinct qubits")
    for q in (q1, q2):
        if not 0 <= q < state.n_qubits:
            raise IndexError(f"qubit index {q} out of range")
    t = state.tensor()
    probs = np.array(
        [
            np.sum(np.abs(_project_pair(t, q1, q2, _bell_amplitudes(lbl))) ** 2)
            for lbl in BELL_LABELS
        ]
    )
    return probs


def bsm(
    state: StateVector, q1: int, q2: int, outcome_source: OutcomeSource
) -> BsmResult:
    """Bell-state measurement of qubits (q1, q2).

    The measured qubits are left in place, collapsed to the outcome's Bell
    state.  Forcing an outcome whose Born probability is (numerically) zero
    yields ``state=None`` with ``probability=0.0`` instead of a collapse.
    """
    probs = bsm_probabilities(state, q1, q2)
    if isinstance(outcome_source, BellLabel):
        outcome = outcome_source
    else:
        outcome = BELL_LABELS[_draw_index(probs, outcome_source)]
    p = float(probs[outcome.index])
    if p < 1e-12:
        return BsmResult(outcome, None, 0.0)
    pair = _bell_amplitudes(outcome)
    residual = _project_pair(state.tensor(), q1, q2, pair) / np.sqrt(p)
    collapsed = np.moveaxis(
        np.tensordot(pair.reshape(2, 2), residual, axes=0), [0, 1], [q1, q2]
    )
    return BsmResult(outcome, StateVector(state.n_qubits, collapsed.reshape(-1)), p)


def measure_computational(
    state: StateVector, qubit_index: int, outcome_source: OutcomeSource
) -> MeasureResult:
    """Projective measurement of one qubit in the computational basis."""
    n = state.n_qubits
    if not 0 <= qubit_index < n:
        raise IndexError(f"qubit index {qubit_index} out of range")
    t = state.tensor()
    other_axes = tuple(i for i in range(n) if i != qubit_index)
    probs = np.sum(np.abs(t) ** 2, axis=other_axes)
    if isinstance(outcome_source, BellLabel):
        raise TypeError("computational measurement takes a bit, not a Bell label")
    if isinstance(outcome_source, bool) or (
        isinstance(outcome_source, (int, np.integer)) and not isinstance(outcome_source, float)
    ):
        bit = int(outcome_source)
        if bit not in (0, 1):
            raise ValueError(f"forced bit must be 0 or 1, got {outcome_source!r}")
    else:
        bit = _draw_index(probs, outcome_source)
    p = float(probs[bit])
    if p < 1e-12:
        return MeasureResult(bit, None, 0.0)
    collapsed = t.copy()
    index = [slice(None)] * n
    index[qubit_index] = 1 - bit
    collapsed[tuple(index)] = 0.0
    collapsed = collapsed / np.sqrt(p)
    return MeasureResult(bit, StateVector(n, collapsed.reshape(-1)), p)


def fidelity(s1: StateVector, s2: StateVector) -> float:
    """Squared overlap |<s1|s2>|^2; invariant under global phase."""
    if s1.n_qubits != s2.n_qubits:
        raise ValueError(
            f"qubit count mismatch: {s1.n_qubits} vs {s2.n_qubits}"
        )
    return float(abs(np.vdot(s1.amplitudes, s2.amplitudes)) ** 2)


def haar_random_unitary2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary from orthonormalized complex normal entries."""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    # Fix the QR phase ambiguity so the distribution is exactly Haar.
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    z = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return StateVector(n_qubits, z / np.linalg.norm(z))


def amplitudes_as_pairs(state: StateVector) -> list[list[float]]:
    """Amplitudes as [re, im] pairs, the transcript debug-dump format."""
    return [[float(a.real), float(a.imag)] for a in state.amplitudes]
