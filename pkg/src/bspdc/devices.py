"""Lossless beam splitter and two-mode parametric amplifier on Fock space.

Conventions used throughout the package:

* A beam splitter of transmittance eta in [0, 1] has mixing angle
  theta = arccos(sqrt(eta)) and unitary U_BS = exp(2i theta Jy).  It is block
  diagonal over the total photon number, and each block is real orthogonal.
* A parametric amplifier of gain g >= 1 has squeezing angle
  phi = arccosh(sqrt(g)) and unitary U_PDC = exp(2i phi Ky)
  = exp(phi (a+ b+ - a b)).  It conserves the photon imbalance n - m.
* U_PDC is evaluated through the normal-ordered factorization

      exp(K+ tanh phi) * sech(phi)^(N + 1) * exp(-K- tanh phi),

  with K+ = a+ b+ and K- = a b.  Applied right to left, the lowering series
  terminates, the middle factor is diagonal, and the raising series is cut at
  the policy boundary.  Every retained matrix element is exact, so truncation
  acts as an orthogonal projection of the exact image.

Independent of that series, ``exponential_oracle`` exponentiates the
truncated generator directly (scaling-and-squaring Pade via scipy); the two
routes share no code beyond the generator definitions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .fock import ATOL_TRUNC, FockState2, TruncationPolicy, TwoModeVector, generator


@dataclass(frozen=True)
class BeamSplitter:
    """Lossless beam splitter of transmittance eta."""

    eta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"transmittance must lie in [0, 1], got {self.eta}")

    @property
    def theta(self) -> float:
        return math.acos(math.sqrt(self.eta))


@dataclass(frozen=True)
class ParametricAmplifier:
    """Two-mode parametric amplifier of gain g in the unitary regime g >= 1."""

    g: float

    def __post_init__(self) -> None:
        if self.g < 1.0:
            raise ValueError(f"gain must be >= 1, got {self.g}")

    @property
    def phi(self) -> float:
        return math.acosh(math.sqrt(self.g))


@lru_cache(maxsize=None)
def _sector_unitary_cached(eta: float, total: int) -> np.ndarray:
    # Jy block on the fixed-total sector, exponentiated through its eigenbasis.
    # Basis inside the sector: (n, total - n) at position n.
    theta = math.acos(math.sqrt(eta))
    dim = total + 1
    block = np.zeros((dim, dim), dtype=complex)
    for n in range(total):
        amp = math.sqrt((n + 1) * (total - n)) / 2.0
        block[n + 1, n] = amp / 1j   # a+ b
        block[n, n + 1] = -amp / 1j  # a b+
    evals, evecs = np.linalg.eigh(block)
    unitary = (evecs * np.exp(2j * theta * evals)) @ evecs.conj().T
    unitary.setflags(write=False)
    return unitary


def bs_sector_unitary(bs: BeamSplitter, total: int) -> np.ndarray:
    """(total+1) x (total+1) unitary of the beam splitter on one sector.

    Index i inside the sector is the mode-a occupation, i.e.
    result[j, i] = <j, total-j| U |i, total-i>.
    """
    if total < 0:
        raise ValueError(f"total photon number must be >= 0, got {total}")
    return _sector_unitary_cached(bs.eta, total)


def bs_amplitude(bs: BeamSplitter, state_in: FockState2, state_out: FockState2) -> complex:
    """<out| U_BS |in>; zero unless the total photon number is conserved."""
    state_in, state_out = FockState2(*state_in), FockState2(*state_out)
    if state_in.total != state_out.total:
        return 0.0 + 0.0j
    unitary = bs_sector_unitary(bs, state_in.total)
    return complex(unitary[state_out.n, state_in.n])


def pdc_vacuum_coefficients(pa: ParametricAmplifier, q: int) -> np.ndarray:
    """Amplitudes c_l = tanh(phi)^l / sqrt(g) of the pair ladder |l, l> from vacuum."""
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    t = math.tanh(pa.phi)
    return t ** np.arange(q + 1) / math.sqrt(pa.g)


def _pair_shift(amps: dict, raise_pair: bool, n_max: int) -> dict:
    """One application of a b (lower) or a+ b+ (raise); raising drops above n_max."""
    out: dict[FockState2, complex] = {}
    for (n, m), amp in amps.items():
        if raise_pair:
            if n + m + 2 > n_max:
                continue
            out[FockState2(n + 1, m + 1)] = amp * math.sqrt((n + 1) * (m + 1))
        else:
            if n == 0 or m == 0:
                continue
            out[FockState2(n - 1, m - 1)] = amp * math.sqrt(n * m)
    return out


def pdc_apply(pa: ParametricAmplifier, vector: TwoModeVector) -> tuple[TwoModeVector, float]:
    """Apply U_PDC through the normal-ordered factorization.

    Returns the truncated image and the squared norm lost at the cutoff.
    Since every retained element is exact, the result is the orthogonal
    projection of the exact image and its norm never exceeds the input norm.
    """
    policy = vector.policy
    t = math.tanh(pa.phi)
    sech = 1.0 / math.cosh(pa.phi)

    # exp(-K- t): finite series, lowers both modes together
    staged = dict(vector.amplitudes)
    term = dict(vector.amplitudes)
    k = 0
    while term:
        k += 1
        shifted = _pair_shift(term, raise_pair=False, n_max=policy.n_max)
        term = {s: a * (-t) / k for s, a in shifted.items()}
        for state, amp in term.items():
            staged[state] = staged.get(state, 0.0) + amp

    # sech(phi)^(n + m + 1)
    staged = {s: a * sech ** (s[0] + s[1] + 1) for s, a in staged.items()}

    # exp(K+ t): truncated at the policy boundary
    result = dict(staged)
    term = staged
    k = 0
    while term:
        k += 1
        shifted = _pair_shift(term, raise_pair=True, n_max=policy.n_max)
        term = {s: a * t / k for s, a in shifted.items()}
        for state, amp in term.items():
            result[state] = result.get(state, 0.0) + amp

    out = TwoModeVector({s: a for s, a in result.items() if a != 0.0}, policy)
    dropped = max(0.0, vector.norm() ** 2 - out.norm() ** 2)
    return out, dropped


def pdc_amplitude(pa: ParametricAmplifier, state_in: FockState2, state_out: FockState2) -> complex:
    """<out| U_PDC |in>; zero unless the imbalance n - m is conserved.

    The cutoff is chosen internally so the requested element is exact: the
    raising series reaches a fixed output through finitely many terms.
    """
    state_in, state_out = FockState2(*state_in), FockState2(*state_out)
    if state_in.imbalance != state_out.imbalance:
        return 0.0 + 0.0j
    n_max = max(state_in.total, state_out.total) + 2
    policy = TruncationPolicy(n_max)
    image, _ = pdc_apply(pa, TwoModeVector.basis_state(policy, state_in))
    return image.amplitude(state_out)


def exponential_oracle(
    device: BeamSplitter | ParametricAmplifier, policy: TruncationPolicy
) -> np.ndarray:
    """Dense exp(2i theta Jy) or exp(2i phi Ky) on the whole truncated basis.

    Uses scipy's scaling-and-squaring Pade exponential.  For the beam splitter
    the truncated generator is exact (block diagonal), so the result matches
    the sector unitaries to round-off.  For the amplifier the generator is
    truncated, the matrix is still exactly orthogonal, but individual elements
    approach the true amplitudes only as n_max grows; trust elements well in
    the interior (total <= n_max / 2) and check convergence when in doubt.
    """
    if isinstance(device, BeamSplitter):
        angle, kind = device.theta, "jy"
    elif isinstance(device, ParametricAmplifier):
        angle, kind = device.phi, "ky"
    else:
        raise TypeError(f"unsupported device {type(device).__name__}")
    gen = generator(kind, policy).dense()
    return scipy.linalg.expm(2j * angle * gen)


@dataclass(frozen=True)
class OracleElement:
    """Single oracle matrix element together with a doubled-cutoff check."""

    value: complex
    value_refined: complex
    delta: float
    converged: bool


def oracle_element(
    device: BeamSplitter | ParametricAmplifier,
    state_in: FockState2,
    state_out: FockState2,
    n_max: int,
    tol: float = ATOL_TRUNC,
) -> OracleElement:
    """Oracle element at n_max, re-evaluated at 2 n_max to flag non-convergence."""
    state_in, state_out = FockState2(*state_in), FockState2(*state_out)
    values = []
    for cutoff in (n_max, 2 * n_max):
        policy = TruncationPolicy(cutoff)
        matrix = exponential_oracle(device, policy)
        values.append(complex(matrix[policy.index_of(state_out), policy.index_of(state_in)]))
    delta = abs(values[1] - values[0])
    return OracleElement(values[0], values[1], delta, delta <= tol)
