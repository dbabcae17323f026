"""Occupation-number encodings and the order-1 amplifier circuit.

The amplifier truncated at order q maps |n, m> onto the first q + 1 states of
its fixed-imbalance ladder, with the exact transition probabilities of the
full device.  ``qpdc_amplitudes`` evaluates those probabilities directly from
the Fock-space amplitudes for any q; that is the reference path.

``build_q1_circuit`` realizes the q = 1 case as a five-qubit post-selected
circuit that only ever applies beam-splitter physics, exploiting the duality

    <l, s| U_PDC(g) |n, m> = (1/sqrt g) <l, m| U_BS(1/g) |n, s>.

The swap of the lower-mode indices is implemented as a teleportation: a cup
(EPR pair) feeds the summed-over occupation s into the beam splitter's lower
input, and a cap (post-selected phi+ Bell measurement) forces the lower
output to equal the original m.  Wire layout for inputs with n, m <= 1:

    q0  ancilla flagging the two-photon register state
    q1  upper mode register (binary occupation)
    q2  lower mode register wire, fed by the cup after the SWAP
    q3  cap partner, holding m after the SWAP
    q4  cup memory, read out as the lower output s

The encoded beam splitter acts per total photon number N = n + s:
N = 0 is the identity, N = 1 is a two-level rotation inside the
{|01>, |10>} register subspace, and the N = 2 register state |11> is routed
through the composite encoding (|11> <-> the symmetric two-particle state)
where the device is exactly RY(2 theta) on each physical qubit.  The ancilla,
set by a CCNOT and uncomputed afterwards, marks that branch so its leakage
into occupations the register cannot hold ((2,0) and (0,2)) stays flagged.

Inputs (1, 0) and (2, 0) (and mirrors) need a two-qubit upper register to
hold their order-1 outputs; for those the encoded device is assembled
numerically from exact sector unitaries as one explicit block, with the
unrepresentable outputs parked on cap-killed slots.

Post-selection accounting: each cap contributes an amplitude factor 1/2 and
the duality a factor 1/sqrt(g), so physical probabilities are recovered from
post-selected ones by |2^caps / sqrt(g)|^2.  Exact mode applies the
correction analytically; shots mode reports both raw post-selected
frequencies and corrected estimates.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .devices import BeamSplitter, ParametricAmplifier, bs_sector_unitary, pdc_amplitude
from .fock import FockState2
from .qubits import (
    BellMeasure,
    Circuit,
    EprPrep,
    GateOp,
    QubitState,
    execute_exact,
    rewrite_for_sampling,
    sample,
    zero_state,
)

#: inputs the q = 1 circuit accepts (mirrored pairs handled by mode swap)
SUPPORTED_INPUTS = ((0, 0), (1, 1), (1, 0), (0, 1), (2, 0), (0, 2))


@dataclass(frozen=True)
class BinaryEncoding:
    """Fixed-width big-endian binary register for one mode's occupation."""

    width: int

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError(f"width must be >= 1, got {self.width}")

    def encode(self, n: int) -> str:
        if not 0 <= n < 2**self.width:
            raise ValueError(f"{n} does not fit in {self.width} bit(s)")
        return format(n, f"0{self.width}b")

    def decode(self, bits: str) -> int:
        if len(bits) != self.width or set(bits) - {"0", "1"}:
            raise ValueError(f"expected {self.width} binary digits, got {bits!r}")
        return int(bits, 2)


def width_for(n_max_encoded: int) -> int:
    """Register width needed to hold occupations 0..n_max_encoded.

    One qubit even for n_max_encoded <= 1, so that 0 and 1 stay
    distinguishable states of an actual register.
    """
    return max(1, int(n_max_encoded).bit_length())


def encode_binary(n: int, width: int) -> str:
    return BinaryEncoding(width).encode(n)


def decode_binary(bits: str) -> int:
    return BinaryEncoding(len(bits)).decode(bits)


@dataclass(frozen=True)
class PhysicalEncoding:
    """Symmetrized multi-particle encoding of one fixed-total sector.

    Each physical qubit carries one particle's mode label, |0> for the upper
    mode and |1> for the lower mode; an occupation ket maps to the normalized
    symmetric combination of its labels.
    """

    sector: int

    def __post_init__(self) -> None:
        if self.sector not in (0, 1, 2):
            raise ValueError(f"physical encoding implemented for sectors 0..2, got {self.sector}")

    @property
    def num_qubits(self) -> int:
        return self.sector

    def encode(self, state: FockState2) -> QubitState:
        state = FockState2(*state)
        if state.total != self.sector:
            raise ValueError(f"{tuple(state)} is not in the {self.sector}-photon sector")
        if self.sector == 0:
            return QubitState(0, np.array([1.0], dtype=complex))
        if self.sector == 1:
            amps = np.zeros(2, dtype=complex)
            amps[0 if state.n == 1 else 1] = 1.0
            return QubitState(1, amps)
        amps = np.zeros(4, dtype=complex)
        if state.n == 2:
            amps[0] = 1.0  # |aa>
        elif state.n == 0:
            amps[3] = 1.0  # |bb>
        else:
            amps[1] = amps[2] = 1.0 / math.sqrt(2.0)  # (|ab> + |ba>)/sqrt2
        return QubitState(2, amps)


def symmetrize(state: FockState2 | tuple[int, int]) -> QubitState:
    """Composite encoding of an occupation ket, sectors 0..2."""
    state = FockState2(*state)
    return PhysicalEncoding(state.total).encode(state)


@dataclass(frozen=True)
class QpdcSpec:
    """Parameters of one truncated-amplifier evaluation."""

    g: float
    q: int
    input: FockState2
    mode: str = "exact"
    shots: int = 2000
    seed: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "input", FockState2(*self.input))
        if self.g < 1.0:
            raise ValueError(f"gain must be >= 1, got {self.g}")
        if self.q < 0:
            raise ValueError(f"q must be >= 0, got {self.q}")
        if self.mode not in ("exact", "shots"):
            raise ValueError(f"mode must be 'exact' or 'shots', got {self.mode!r}")
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")


def _ladder_outputs(state: FockState2, q: int) -> list[FockState2]:
    # fixed-imbalance ladder starting at the input's lowest rung
    if state.n >= state.m:
        return [FockState2(state.imbalance + l, l) for l in range(q + 1)]
    return [FockState2(l, -state.imbalance + l) for l in range(q + 1)]


def qpdc_amplitudes(spec: QpdcSpec) -> list[tuple[FockState2, float]]:
    """Exact transition probabilities onto the first q + 1 ladder states.

    Reference path for any q, straight from the Fock-space amplitudes; the
    probabilities sum to 1 only in the q -> infinity limit.
    """
    pa = ParametricAmplifier(spec.g)
    return [
        (out, float(abs(pdc_amplitude(pa, spec.input, out)) ** 2))
        for out in _ladder_outputs(spec.input, spec.q)
    ]


def _n1_register_rotation(theta: float) -> np.ndarray:
    # one-photon sector on the register: |01> -> c|01> + s|10>, |10> -> -s|01> + c|10>
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]], dtype=complex
    )


def _composite_encoding_block() -> np.ndarray:
    # |11> <-> (|01> + |10>)/sqrt2 on the marked branch; unitary completion
    r = 1.0 / math.sqrt(2.0)
    return np.array(
        [[1, 0, 0, 0], [0, r, 0, r], [0, -r, 0, r], [0, 0, 1, 0]], dtype=complex
    )


def _figure_circuit(g: float, occupation: int) -> Circuit:
    """Five-qubit circuit for the balanced inputs |0,0> and |1,1>."""
    theta = BeamSplitter(1.0 / g).theta
    encode = _composite_encoding_block()
    ops: list = []
    if occupation:
        ops += [GateOp("x", (1,)), GateOp("x", (2,))]
    ops += [
        EprPrep((3, 4)),
        GateOp("swap", (2, 3)),
        GateOp("ccnot", (0,), controls=(1, 2)),
        GateOp("block", (1, 2), matrix=_n1_register_rotation(theta)),
        GateOp("block", (1, 2), controls=(0,), matrix=encode),
        GateOp("ry", (1,), controls=(0,), angle=2.0 * theta),
        GateOp("ry", (2,), controls=(0,), angle=2.0 * theta),
        GateOp("block", (1, 2), controls=(0,), matrix=encode.conj().T),
        GateOp("ccnot", (0,), controls=(1, 2)),
        BellMeasure((2, 3)),
    ]
    return Circuit(5, tuple(ops))


def _encoded_device_block(g: float, n0: int) -> np.ndarray:
    """Encoded beam splitter for a two-qubit upper register and m = 0.

    Exact sector-unitary columns for the two exercised register inputs
    (n0, s = 0) and (n0, s = 1); outputs the register cannot hold are parked,
    per column, on an l-slot of the w = 1 row, which the m = 0 cap kills.
    The remaining columns are an orthonormal completion and never see
    amplitude.  Block basis |q_hi q_lo w>, index 2 l + w.
    """
    bs = BeamSplitter(1.0 / g)
    block = np.zeros((8, 8), dtype=complex)
    used_w1 = {n0 - 1, n0}
    parking = [l for l in range(4) if l not in used_w1]
    for s in (0, 1):
        sector = n0 + s
        unitary = bs_sector_unitary(bs, sector)
        column = np.zeros(8, dtype=complex)
        column[2 * sector + 0] = unitary[sector, n0]          # (sector, 0)
        column[2 * (sector - 1) + 1] = unitary[sector - 1, n0]  # (sector - 1, 1)
        leak = 1.0 - float(np.sum(np.abs(column) ** 2))
        if leak > 1e-15:
            column[2 * parking[s] + 1] = math.sqrt(leak)
        block[:, 2 * n0 + s] = column
    exercised = [2 * n0, 2 * n0 + 1]
    rest = scipy.linalg.null_space(block[:, exercised].conj().T)
    free = [i for i in range(8) if i not in exercised]
    for idx, col in zip(free, rest.T):
        block[:, idx] = col
    defect = np.max(np.abs(block.conj().T @ block - np.eye(8)))
    if defect > 1e-12:
        raise AssertionError(f"device block completion failed (defect {defect:.2e})")
    return block


def _widened_circuit(g: float, n0: int) -> Circuit:
    """Five-qubit circuit for inputs (n0, 0) with n0 in {1, 2}.

    q0, q1 form the upper register (q0 the high bit); q2 is the lower wire,
    q3 the cap partner, q4 the cup memory.
    """
    ops: list = []
    if n0 & 2:
        ops.append(GateOp("x", (0,)))
    if n0 & 1:
        ops.append(GateOp("x", (1,)))
    ops += [
        EprPrep((3, 4)),
        GateOp("swap", (2, 3)),
        GateOp("block", (0, 1, 2), matrix=_encoded_device_block(g, n0)),
        BellMeasure((2, 3)),
    ]
    return Circuit(5, tuple(ops))


def _normalized_input(state: FockState2) -> tuple[FockState2, bool]:
    # mode-swapped instance when the imbalance is negative; physics identical
    if state.n >= state.m:
        return state, False
    return FockState2(state.m, state.n), True


def build_q1_circuit(spec: QpdcSpec) -> Circuit:
    """Circuit realization of the order-1 amplifier for the supported inputs.

    Inputs with negative imbalance are built as their mode-swapped twin;
    ``run_qpdc`` swaps the output labels back.
    """
    if spec.q != 1:
        raise ValueError(f"circuit construction requires q = 1, got q = {spec.q}")
    if tuple(spec.input) not in SUPPORTED_INPUTS:
        raise ValueError(f"unsupported input state {tuple(spec.input)}; supported: {SUPPORTED_INPUTS}")
    state, _ = _normalized_input(spec.input)
    if state.n == state.m:
        return _figure_circuit(spec.g, state.n)
    return _widened_circuit(spec.g, state.n)


@dataclass(frozen=True)
class QpdcOutcome:
    """One reported transition, with post-selection already corrected for."""

    output: FockState2
    probability: float
    stderr: float
    raw_frequency: float


def _outcome_bits(state: FockState2, variant_balanced: bool, l: int, s: int) -> int:
    # remaining qubits after the cap: (q0, q1, q4) -> new (0, 1, 2), qubit 0 = LSB
    if variant_balanced:
        return (l << 1) | (s << 2)  # anc = 0, q1 = l, q4 = s
    return (l >> 1) | ((l & 1) << 1) | (s << 2)  # upper high, upper low, q4


def run_qpdc(spec: QpdcSpec) -> list[QpdcOutcome]:
    """Evaluate the q = 1 circuit, exactly or by seeded sampling.

    Exact mode reads post-selected amplitudes and applies the cap and duality
    corrections analytically.  Shots mode samples the rewritten circuit,
    discards shots that fail the cap or land in the ancilla-flagged garbage,
    and reports binomial standard errors alongside corrected estimates.
    """
    circuit = build_q1_circuit(spec)
    state, mirrored = _normalized_input(spec.input)
    balanced = state.n == state.m
    ladder = _ladder_outputs(state, spec.q)
    correction = 2.0 / math.sqrt(spec.g)  # one cap, amplitude factor

    if spec.mode == "exact":
        execution = execute_exact(circuit)
        outcomes = []
        for l_index, out in enumerate(ladder):
            l_value, s_value = out.n, out.m
            amp = execution.amplitudes[_outcome_bits(state, balanced, l_value, s_value)]
            raw = float(abs(amp) ** 2)
            outcomes.append((out, raw * correction**2, 0.0, raw))
    else:
        sampled, cap_pairs = rewrite_for_sampling(circuit)
        execution = execute_exact(sampled)  # no caps left; unnormalized = normalized
        final = QubitState(circuit.num_qubits, execution.amplitudes)
        counts = sample(final, spec.shots, spec.seed)
        accepted: dict[tuple[int, int], int] = {}
        for bits, count in counts.items():
            value = int(bits, 2)
            if any((value >> i) & 1 or (value >> j) & 1 for i, j in cap_pairs):
                continue
            if balanced:
                if (value >> 0) & 1:
                    continue  # ancilla-flagged garbage, heralded failure
                l_value, s_value = (value >> 1) & 1, (value >> 4) & 1
            else:
                l_value = ((value >> 0) & 1) << 1 | (value >> 1) & 1
                s_value = (value >> 4) & 1
            key = (l_value, s_value)
            accepted[key] = accepted.get(key, 0) + count
        if not accepted:
            warnings.warn("no shots survived post-selection; estimates are all zero")
        outcomes = []
        for out in ladder:
            raw = accepted.get((out.n, out.m), 0) / spec.shots
            stderr = correction**2 * math.sqrt(raw * (1.0 - raw) / spec.shots)
            outcomes.append((out, raw * correction**2, stderr, raw))

    results = []
    for out, prob, stderr, raw in outcomes:
        label = FockState2(out.m, out.n) if mirrored else out
        results.append(QpdcOutcome(label, prob, stderr, raw))
    return results
