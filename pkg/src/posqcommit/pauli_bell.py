"""Symbolic Bell-label and Pauli algebra.

Every quantum step of the commitment protocol is, for Clifford operations,
pure bookkeeping on two-bit labels:

* A Bell state is named by a phase bit and a parity bit,

      Bell(phase, parity) = (|0, parity> + (-1)^phase |1, 1 xor parity>) / sqrt(2)

  so "00" is the usual Phi+ pair and "11" the singlet.
* A Pauli operator is named by its exponent pair, sigma_z^z sigma_x^x,
  with global phase discarded.  Composition is componentwise XOR.
* A single-qubit Clifford operation is named by its conjugation action on
  X and Z (a tableau of signed Paulis).  There are exactly 24 of them.

Global phase is systematically dropped at this layer: no decision anywhere
in the protocol depends on it.  Signs produced by Clifford conjugation are
tracked internally but discarded by label-level callers.  Every rule in
this module is cross-checked against the dense statevector oracle by the
test suite; the oracle is the authority if a labeling convention is ever
in doubt.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BellLabel",
    "PauliLabel",
    "CliffordOp",
    "BELL_LABELS",
    "PAULI_I",
    "PAULI_X",
    "PAULI_Z",
    "PAULI_ZX",
    "PAULI_LABELS",
    "CLIFFORD_GROUP",
    "CLIFFORD_IDENTITY",
    "CLIFFORD_HADAMARD",
    "CLIFFORD_PHASE",
    "apply_pauli_to_label",
    "swap_labels",
    "teleport_correction",
    "reveal_pauli",
    "compose_paulis",
    "conjugate_pauli",
    "clifford_from_index",
]


def _check_bit(value: int, what: str) -> int:
    if value not in (0, 1):
        raise ValueError(f"{what} must be 0 or 1, got {value!r}")
    return value


@dataclass(frozen=True)
class BellLabel:
    """Two-bit name of a Bell state: a phase bit and a parity bit.

    Serializes as the two characters "<phase><parity>", e.g. "01"; these
    strings appear verbatim in protocol transcripts.
    """

    phase: int
    parity: int

    def __post_init__(self) -> None:
        _check_bit(self.phase, "phase")
        _check_bit(self.parity, "parity")

    def __xor__(self, other: "BellLabel") -> "BellLabel":
        return BellLabel(self.phase ^ other.phase, self.parity ^ other.parity)

    def __str__(self) -> str:
        return f"{self.phase}{self.parity}"

    @property
    def index(self) -> int:
        """Position in BELL_LABELS: 2 * phase + parity."""
        return 2 * self.phase + self.parity

    @classmethod
    def from_index(cls, i: int) -> "BellLabel":
        if not 0 <= i < 4:
            raise ValueError(f"Bell label index must be in 0..3, got {i!r}")
        return BELL_LABELS[i]

    @classmethod
    def from_string(cls, s: str) -> "BellLabel":
        if len(s) != 2 or s[0] not in "01" or s[1] not in "01":
            raise ValueError(f"Bell label string must be two bits, got {s!r}")
        return cls(int(s[0]), int(s[1]))


BELL_LABELS: tuple[BellLabel, ...] = tuple(
    BellLabel(i, j) for i in (0, 1) for j in (0, 1)
)


@dataclass(frozen=True)
class PauliLabel:
    """Exponent pair naming sigma_z^z_exp sigma_x^x_exp up to global phase.

    Serializes as one of "I", "X", "Z", "ZX".
    """

    z_exp: int
    x_exp: int

    def __post_init__(self) -> None:
        _check_bit(self.z_exp, "z_exp")
        _check_bit(self.x_exp, "x_exp")

    @property
    def name(self) -> str:
        return _PAULI_NAMES[(self.z_exp, self.x_exp)]

    def __str__(self) -> str:
        return self.name

    @classmethod
    def from_name(cls, name: str) -> "PauliLabel":
        try:
            return cls(*_PAULI_EXPONENTS[name])
        except KeyError:
            raise ValueError(
                f"Pauli name must be one of I, X, Z, ZX, got {name!r}"
            ) from None


_PAULI_NAMES = {(0, 0): "I", (0, 1): "X", (1, 0): "Z", (1, 1): "ZX"}
_PAULI_EXPONENTS = {v: k for k, v in _PAULI_NAMES.items()}

PAULI_I = PauliLabel(0, 0)
PAULI_X = PauliLabel(0, 1)
PAULI_Z = PauliLabel(1, 0)
PAULI_ZX = PauliLabel(1, 1)
PAULI_LABELS: tuple[PauliLabel, ...] = (PAULI_I, PAULI_X, PAULI_Z, PAULI_ZX)


def compose_paulis(p: PauliLabel, q: PauliLabel) -> PauliLabel:
    """Product of two Pauli labels, global phase discarded."""
    return PauliLabel(p.z_exp ^ q.z_exp, p.x_exp ^ q.x_exp)


def apply_pauli_to_label(label: BellLabel, p: PauliLabel) -> BellLabel:
    """Bell label after applying a Pauli to either qubit of the pair.

    A sigma_z on one half flips the phase bit, a sigma_x flips the parity
    bit; which half is acted on changes at most a global phase.
    """
    return BellLabel(label.phase ^ p.z_exp, label.parity ^ p.x_exp)


def swap_labels(a: BellLabel, b: BellLabel, m: BellLabel) -> BellLabel:
    """Residual Bell label after an entanglement swap.

    ``a`` and ``b`` name the two source pairs and ``m`` the Bell-measurement
    outcome on the two inner qubits; the two outer qubits are left in
    ``a ^ b ^ m``.  The convention is fixed against the statevector oracle
    (all 64 cases are checked at fidelity 1).
    """
    return a ^ b ^ m

def teleport_correction(shared: BellLabel, bsm: BellLabel) -> tuple[int, int]:
    """Exponents (k, k') of the residual Pauli sigma_z^k sigma_x^k' left on
    the receiver's qubit after teleporting through ``shared`` with sender
    Bell-measurement outcome ``bsm``.

    The closed form is componentwise XOR of the two labels; e.g. through
    "00" the residual exponents are the raw outcome bits, while through
    "01" the second outcome bit arrives flipped.
    """
    return (shared.phase ^ bsm.phase, shared.parity ^ bsm.parity)


def reveal_pauli(committed: BellLabel) -> PauliLabel:
    """Pauli the committer applies to each returned qubit at reveal time.

    For a committed label (u_a, u_c) this is sigma_z^(1 xor u_a) sigma_x^(u_c);
    "10" is the only committed label that requires no operation.
    """
    return PauliLabel(committed.phase ^ 1, committed.parity)


# ---------------------------------------------------------------------------
# Single-qubit Clifford group
# ---------------------------------------------------------------------------
#
# Signs are tracked through the Hermitian representatives of the labels
# (I, X, Y, Z), where the "ZX" label stands for Y.  Products of Hermitian
# Paulis pick up quarter-turn phases; a power-of-i exponent (mod 4) keeps
# the arithmetic exact.  Conjugating a Hermitian Pauli by a Clifford always
# lands back on a signed Hermitian Pauli, so the stored sign is a single bit.


def _hermitian_product(p: PauliLabel, q: PauliLabel) -> tuple[PauliLabel, int]:
    """h(p) * h(q) = i^w * h(p xor q); returns (p xor q, w mod 4)."""
    z1, x1, z2, x2 = p.z_exp, p.x_exp, q.z_exp, q.x_exp
    z, x = z1 ^ z2, x1 ^ x2
    w = (2 * (x1 & z2) + 3 * (z1 & x1) + 3 * (z2 & x2) + (z & x)) % 4
    return PauliLabel(z, x), w


@dataclass(frozen=True)
class CliffordOp:
    """A single-qubit Clifford element, named by its conjugation action.

    ``image_x`` and ``image_z`` are the signed Paulis u^dagger X u and
    u^dagger Z u (sign bit: 0 for +, 1 for -).  The images must anticommute,
    which for single-qubit Paulis means: distinct and both non-identity.
    """

    image_x: tuple[PauliLabel, int]
    image_z: tuple[PauliLabel, int]

    def __post_init__(self) -> None:
        for label, sign in (self.image_x, self.image_z):
            _check_bit(sign, "sign")
            if label == PAULI_I:
                raise ValueError("Clifford images must be non-identity Paulis")
        if self.image_x[0] == self.image_z[0]:
            raise ValueError("Clifford images of X and Z must anticommute")

    def conjugate(self, p: PauliLabel) -> tuple[PauliLabel, int]:
        """u^dagger h(p) u as a signed Hermitian Pauli (label, sign bit)."""
        if p == PAULI_I:
            return PAULI_I, 0
        # h(z,x) = i^(3*z*x) * h(Z)^z * h(X)^x, and conjugation is
        # multiplicative, so conjugate factor by factor.
        w = (3 * (p.z_exp & p.x_exp)) % 4
        label = PAULI_I
        for exponent, (img, sign) in ((p.z_exp, self.image_z), (p.x_exp, self.image_x)):
            if exponent:
                label, dw = _hermitian_product(label, img)
                w = (w + dw + 2 * sign) % 4
        if w % 2:
            raise AssertionError("Clifford conjugation produced a non-real phase")
        return label, w // 2

    def compose(self, inner: "CliffordOp") -> "CliffordOp":
        """Operator product self * inner (apply ``inner`` first)."""

        def push(image: tuple[PauliLabel, int]) -> tuple[PauliLabel, int]:
            label, sign = image
            label2, sign2 = inner.conjugate(label)
            return label2, sign ^ sign2

        return CliffordOp(image_x=push(self.image_x), image_z=push(self.image_z))

    def inverse(self) -> "CliffordOp":
        return _CLIFFORD_INVERSES[self]

    @property
    def index(self) -> int:
        """Canonical position (0..23) in CLIFFORD_GROUP."""
        return _CLIFFORD_INDEX[self]

    def matrix(self) -> np.ndarray:
        """2x2 unitary realizing this element (phase convention arbitrary)."""
        return np.array(_CLIFFORD_MATRICES[self.index], dtype=complex)

    def __str__(self) -> str:
        return f"C{self.index}"


CLIFFORD_IDENTITY = CliffordOp(image_x=(PAULI_X, 0), image_z=(PAULI_Z, 0))
CLIFFORD_HADAMARD = CliffordOp(image_x=(PAULI_Z, 0), image_z=(PAULI_X, 0))
# S = diag(1, i): conjugation sends X to -Y and fixes Z.
CLIFFORD_PHASE = CliffordOp(image_x=(PAULI_ZX, 1), image_z=(PAULI_Z, 0))

_SQRT_HALF = 0.5**0.5
_GENERATOR_MATRICES = {
    CLIFFORD_HADAMARD: (
        (_SQRT_HALF, _SQRT_HALF),
        (_SQRT_HALF, -_SQRT_HALF),
    ),
    CLIFFORD_PHASE: ((1.0, 0.0), (0.0, 1.0j)),
}


def _matmul2(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2))
        for i in range(2)
    )


def _close_group() -> tuple[list[CliffordOp], list]:
    elements = [CLIFFORD_IDENTITY]
    matrices = [((1.0, 0.0), (0.0, 1.0))]
    seen = {CLIFFORD_IDENTITY: 0}
    frontier = [0]
    while frontier:
        new_frontier = []
        for idx in frontier:
            for gen, gen_mat in _GENERATOR_MATRICES.items():
                product = gen.compose(elements[idx])
                if product not in seen:
                    seen[product] = len(elements)
                    elements.append(product)
                    matrices.append(_matmul2(gen_mat, matrices[idx]))
                    new_frontier.append(seen[product])
        frontier = new_frontier
    if len(elements) != 24:
        raise AssertionError(f"expected 24 Clifford elements, found {len(elements)}")
    return elements, matrices


_group, _CLIFFORD_MATRICES = _close_group()
CLIFFORD_GROUP: tuple[CliffordOp, ...] = tuple(_group)
_CLIFFORD_INDEX = {op: i for i, op in enumerate(CLIFFORD_GROUP)}
_CLIFFORD_INVERSES = {
    op: next(v for v in CLIFFORD_GROUP if op.compose(v) == CLIFFORD_IDENTITY)
    for op in CLIFFORD_GROUP
}


def clifford_from_index(i: int) -> CliffordOp:
    if not 0 <= i < len(CLIFFORD_GROUP):
        raise ValueError(f"Clifford index must be in 0..23, got {i!r}")
    return CLIFFORD_GROUP[i]


def conjugate_pauli(u: CliffordOp, p: PauliLabel) -> tuple[PauliLabel, int]:
    """u^dagger p u as (PauliLabel, sign bit); label-level callers drop the sign."""
    return u.conjugate(p)
