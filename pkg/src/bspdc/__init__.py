"""Two-mode beam-splitter / parametric-amplifier simulator.

Exact Fock-space amplitudes for both devices, numerical verification of the
Wick-rotation duality eta = 1/g between them, a post-selected qubit-circuit
realization of the order-1 truncated amplifier, and the associated optical
observables.
"""
from .fock import (
    ATOL_EXACT,
    ATOL_MATRIX,
    ATOL_TRUNC,
    FockState2,
    SparseOperator,
    TruncationPolicy,
    TwoModeVector,
    apply_ladder,
    casimir,
    generator,
)
from .devices import (
    BeamSplitter,
    ParametricAmplifier,
    bs_amplitude,
    bs_sector_unitary,
    exponential_oracle,
    oracle_element,
    pdc_amplitude,
    pdc_apply,
    pdc_vacuum_coefficients,
)
from .duality import DualityInstance, check_duality, duality_sweep, find_sign_mismatches, wick_map
from .qubits import (
    BellMeasure,
    BellOutcome,
    Circuit,
    EprPrep,
    GateOp,
    QubitState,
    apply,
    bell_postselect,
    prepare_epr,
    sample,
    zero_state,
)
from .qpdc import (
    BinaryEncoding,
    PhysicalEncoding,
    QpdcOutcome,
    QpdcSpec,
    build_q1_circuit,
    decode_binary,
    encode_binary,
    qpdc_amplitudes,
    run_qpdc,
    symmetrize,
)
from .observables import (
    mean_photons,
    mean_photons_oracle,
    mean_photons_ratio,
    quadrature_fluctuation,
    quadrature_fluctuation_oracle,
)

__version__ = "0.1.0"
