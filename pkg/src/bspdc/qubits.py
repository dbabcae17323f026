"""Dense statevector simulator with post-selected Bell measurements.

Conventions, fixed and relied on by the circuit builders:

* Qubit 0 is the least significant bit of the basis index: basis state b
  assigns qubit q the value (b >> q) & 1.  Printed bitstrings read
  "qubit Q-1 ... qubit 0" (plain binary).
* RY(theta) = exp(-i theta Y / 2) = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]].
* Explicit blocks act on their target list with the first listed target as
  the most significant bit of the block index.
* Bell states on a pair (i, j), written |b_i b_j>:
  phi+ = (00+11)/sqrt2, phi- = (00-11)/sqrt2, psi+ = (01+10)/sqrt2,
  psi- = (01-10)/sqrt2.  The canonical cap is the phi+ outcome.

Circuits serialize to a line-oriented text format, one op per line
(kind, controls, targets, angle/matrix), for golden tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from .fock import ATOL_MATRIX

_SQRT2_INV = 1.0 / math.sqrt(2.0)

BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")
_BELL_VECTORS = {
    "phi+": np.array([_SQRT2_INV, 0.0, 0.0, _SQRT2_INV], dtype=complex),
    "phi-": np.array([_SQRT2_INV, 0.0, 0.0, -_SQRT2_INV], dtype=complex),
    "psi+": np.array([0.0, _SQRT2_INV, _SQRT2_INV, 0.0], dtype=complex),
    "psi-": np.array([0.0, _SQRT2_INV, -_SQRT2_INV, 0.0], dtype=complex),
}

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * _SQRT2_INV
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def _ry_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class QubitState:
    """Normalized dense state over num_qubits qubits (length 2**num_qubits)."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.num_qubits,):
            raise ValueError(f"expected {2**self.num_qubits} amplitudes, got {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state norm {norm} is not 1")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def probability(self, basis_index: int) -> float:
        return float(abs(self.amplitudes[basis_index]) ** 2)


def zero_state(num_qubits: int) -> QubitState:
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[0] = 1.0
    return QubitState(num_qubits, amps)


@dataclass(frozen=True)
class GateOp:
    """One gate application: named kind or explicit unitary block, plus controls."""

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "controls", tuple(self.controls))
        if set(self.targets) & set(self.controls):
            raise ValueError("controls and targets must be disjoint")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("duplicate target qubits")
        kind = self.kind
        if kind in ("x", "h"):
            self._expect(targets=1)
        elif kind == "ry":
            self._expect(targets=1)
            if self.angle is None:
                raise ValueError("ry requires an angle")
        elif kind == "swap":
            self._expect(targets=2)
        elif kind == "cnot":
            self._expect(targets=1, controls=1)
        elif kind == "ccnot":
            self._expect(targets=1, controls=2)
        elif kind == "block":
            if self.matrix is None:
                raise ValueError("block requires an explicit matrix")
            matrix = np.asarray(self.matrix, dtype=complex)
            dim = 2 ** len(self.targets)
            if matrix.shape != (dim, dim):
                raise ValueError(f"matrix shape {matrix.shape} does not fit {len(self.targets)} targets")
            defect = np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim)))
            if defect > ATOL_MATRIX:
                raise ValueError(f"block is not unitary (defect {defect:.2e})")
            matrix = matrix.copy()
            matrix.setflags(write=False)
            object.__setattr__(self, "matrix", matrix)
        else:
            raise ValueError(f"unknown gate kind {kind!r}")

    def _expect(self, targets: int, controls: int | None = None) -> None:
        if len(self.targets) != targets:
            raise ValueError(f"{self.kind} takes {targets} target(s)")
        if controls is not None and len(self.controls) != controls:
            raise ValueError(f"{self.kind} takes {controls} control(s)")

    def expansion(self) -> np.ndarray:
        """Unitary on the target qubits (controls handled by the engine)."""
        if self.kind == "x" or self.kind == "cnot" or self.kind == "ccnot":
            return _X
        if self.kind == "h":
            return _H
        if self.kind == "ry":
            return _ry_matrix(self.angle)
        if self.kind == "swap":
            return _SWAP
        return self.matrix


@dataclass(frozen=True)
class EprPrep:
    """Cup: Bell pair (|00> + |11>)/sqrt2 prepared on two qubits held in |0>."""

    targets: tuple[int, int]


@dataclass(frozen=True)
class BellMeasure:
    """Cap: post-selected Bell-basis measurement of a qubit pair."""

    targets: tuple[int, int]
    outcome: str = "phi+"

    def __post_init__(self) -> None:
        if self.outcome not in BELL_LABELS:
            raise ValueError(f"unknown Bell outcome {self.outcome!r}")


CircuitOp = Union[GateOp, EprPrep, BellMeasure]


def _axis(qubit: int, num_qubits: int) -> int:
    return num_qubits - 1 - qubit


def _apply_matrix(
    amps: np.ndarray,
    num_qubits: int,
    matrix: np.ndarray,
    targets: tuple[int, ...],
    controls: tuple[int, ...],
) -> np.ndarray:
    """Apply a 2^k x 2^k unitary to the target qubits, gated on all controls = 1."""
    for q in (*targets, *controls):
        if not 0 <= q < num_qubits:
            raise IndexError(f"qubit index {q} out of range for {num_qubits} qubits")
    tensor = amps.reshape([2] * num_qubits)
    ctrl_axes = [_axis(q, num_qubits) for q in controls]
    target_axes = [_axis(q, num_qubits) for q in targets]
    front = ctrl_axes + target_axes
    moved = np.moveaxis(tensor, front, range(len(front)))
    shape = moved.shape
    work = moved.reshape(2 ** len(controls), 2 ** len(targets), -1).copy()
    work[-1] = matrix @ work[-1]
    result = np.moveaxis(work.reshape(shape), range(len(front)), front)
    return result.reshape(-1)


def apply(state: QubitState, op: GateOp) -> QubitState:
    """Apply one gate; returns a new state (norm preserved)."""
    amps = _apply_matrix(state.amplitudes, state.num_qubits, op.expansion(), op.targets, op.controls)
    return QubitState(state.num_qubits, amps)


def prepare_epr(state: QubitState, i: int, j: int) -> QubitState:
    """Create the phi+ pair on (i, j); both qubits must currently hold |0>."""
    tensor = state.amplitudes.reshape([2] * state.num_qubits)
    for q in (i, j):
        occupied = np.linalg.norm(np.take(tensor, 1, axis=_axis(q, state.num_qubits)))
        if occupied > 1e-12:
            raise ValueError(f"qubit {q} is not in |0>; cannot prepare a fresh pair")
    state = apply(state, GateOp("h", (i,)))
    return apply(state, GateOp("cnot", (j,), controls=(i,)))


@dataclass(frozen=True)
class BellOutcome:
    """Result of projecting a pair onto one Bell state."""

    pair: tuple[int, int]
    outcome: str
    probability: float
    post_state: QubitState | None
    zero_probability: bool = False


def project_bell(state_amps: np.ndarray, num_qubits: int, i: int, j: int, outcome: str) -> np.ndarray:
    """Unnormalized amplitudes on the remaining qubits after a Bell projection.

    The squared norm of the result is the outcome probability.  Remaining
    qubits keep their relative order and are renumbered from 0.
    """
    bell = _BELL_VECTORS[outcome].reshape(2, 2)
    tensor = state_amps.reshape([2] * num_qubits)
    moved = np.moveaxis(tensor, (_axis(i, num_qubits), _axis(j, num_qubits)), (0, 1))
    projected = np.tensordot(bell.conj(), moved, axes=([0, 1], [0, 1]))
    return projected.reshape(-1)


def bell_postselect(state: QubitState, i: int, j: int, outcome: str) -> BellOutcome:
    """Project (i, j) onto a Bell outcome; renormalizes the remaining qubits."""
    remaining = project_bell(state.amplitudes, state.num_qubits, i, j, outcome)
    probability = float(np.linalg.norm(remaining) ** 2)
    if probability < 1e-30:
        return BellOutcome((i, j), outcome, 0.0, None, zero_probability=True)
    post = QubitState(state.num_qubits - 2, remaining / math.sqrt(probability))
    return BellOutcome((i, j), outcome, probability, post)


def sample(state: QubitState, shots: int, seed: int | None = None) -> dict[str, int]:
    """Seeded multinomial sampling; keys are bitstrings "q_{Q-1} ... q_0"."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    probs = np.abs(state.amplitudes) ** 2
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    width = state.num_qubits
    return {format(idx, f"0{width}b"): int(c) for idx, c in enumerate(counts) if c}


@dataclass(frozen=True)
class Circuit:
    """Ordered gate applications, pair preparations and post-selected caps."""

    num_qubits: int
    ops: tuple[CircuitOp, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))

    def to_text(self) -> str:
        return "\n".join(_op_to_line(op) for op in self.ops) + "\n"

    @classmethod
    def from_text(cls, num_qubits: int, text: str) -> "Circuit":
        ops = [_op_from_line(line) for line in text.splitlines() if line.strip()]
        return cls(num_qubits, tuple(ops))


@dataclass(frozen=True)
class ExactExecution:
    """Final unnormalized amplitudes; squared norm = total post-selection probability."""

    amplitudes: np.ndarray
    qubit_labels: tuple[int, ...]
    num_caps: int


def execute_exact(circuit: Circuit, initial: QubitState | None = None) -> ExactExecution:
    """Run a circuit with caps applied as exact (unnormalized) projections."""
    if initial is None:
        initial = zero_state(circuit.num_qubits)
    amps = initial.amplitudes.copy()
    labels = list(range(circuit.num_qubits))
    caps = 0
    for op in circuit.ops:
        if isinstance(op, BellMeasure):
            i, j = (labels.index(q) for q in op.targets)
            amps = project_bell(amps, len(labels), i, j, op.outcome)
            labels = [q for q in labels if q not in op.targets]
            caps += 1
        elif isinstance(op, EprPrep):
            i, j = (labels.index(q) for q in op.targets)
            state = prepare_epr(QubitState(len(labels), amps / np.linalg.norm(amps)), i, j)
            amps = state.amplitudes * np.linalg.norm(amps)
        else:
            mapped = GateOp(
                op.kind,
                tuple(labels.index(q) for q in op.targets),
                tuple(labels.index(q) for q in op.controls),
                op.angle,
                op.matrix,
            )
            amps = _apply_matrix(amps, len(labels), mapped.expansion(), mapped.targets, mapped.controls)
    return ExactExecution(amps, tuple(labels), caps)


def rewrite_for_sampling(circuit: Circuit) -> tuple[Circuit, list[tuple[int, int]]]:
    """Replace caps by their basis change; accepted shots read 0 on both wires.

    CNOT(i -> j) then H(i) maps phi+ to |00> on (i, j), so post-selection on
    the phi+ cap becomes acceptance of the all-zero outcome of the pair.
    """
    ops: list[CircuitOp] = []
    cap_pairs: list[tuple[int, int]] = []
    for op in circuit.ops:
        if isinstance(op, BellMeasure):
            if op.outcome != "phi+":
                raise ValueError("sampling path only rewrites the canonical phi+ cap")
            i, j = op.targets
            ops.append(GateOp("cnot", (j,), controls=(i,)))
            ops.append(GateOp("h", (i,)))
            cap_pairs.append((i, j))
        else:
            ops.append(op)
    return Circuit(circuit.num_qubits, tuple(ops)), cap_pairs


def _fmt_ints(values: Iterable[int]) -> str:
    return ",".join(str(v) for v in values)


def _op_to_line(op: CircuitOp) -> str:
    if isinstance(op, EprPrep):
        return f"epr targets={_fmt_ints(op.targets)}"
    if isinstance(op, BellMeasure):
        return f"bell targets={_fmt_ints(op.targets)} outcome={op.outcome}"
    parts = [op.kind]
    if op.controls:
        parts.append(f"controls={_fmt_ints(op.controls)}")
    parts.append(f"targets={_fmt_ints(op.targets)}")
    if op.angle is not None:
        parts.append(f"angle={op.angle!r}")
    if op.matrix is not None:
        flat = ";".join(repr(complex(v)) for v in np.asarray(op.matrix).ravel())
        parts.append(f"matrix={flat}")
    return " ".join(parts)


def _op_from_line(line: str) -> CircuitOp:
    tokens = line.split()
    kind, fields = tokens[0], {}
    for token in tokens[1:]:
        key, _, value = token.partition("=")
        fields[key] = value
    targets = tuple(int(v) for v in fields["targets"].split(","))
    if kind == "epr":
        return EprPrep(targets)
    if kind == "bell":
        return BellMeasure(targets, fields.get("outcome", "phi+"))
    controls = tuple(int(v) for v in fields["controls"].split(",")) if "controls" in fields else ()
    angle = float(fields["angle"]) if "angle" in fields else None
    matrix = None
    if "matrix" in fields:
        values = [complex(v) for v in fields["matrix"].split(";")]
        dim = 2 ** len(targets)
        matrix = np.array(values, dtype=complex).reshape(dim, dim)
    return GateOp(kind, targets, controls, angle, matrix)
