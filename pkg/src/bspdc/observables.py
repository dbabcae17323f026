"""Optical observables of the order-q truncated amplifier acting on vacuum.

With r = tanh(phi)^2 = (g - 1)/g, the state after the truncated device is
sum_{l<=q} c_l |l, l> with |c_l|^2 = r^l / g.  The primary closed forms below
follow the literal sums over that ladder without renormalizing the truncated
state (its squared norm is 1 - r^(q+1)):

    <N>_q        = sum_{l<=q} 2 l r^l / g          -> 2 (g - 1) as q -> inf
    <N>_q/<N>_inf = 1 - (1 + q) r^q + q r^(q+1)
    <a+ b+>_q    = sqrt(r) (1 - r^(q+1)) + (sqrt(r)/2) <N>_q
    <X X+>_q     = 1 + <N>_q + 2 cos(2 theta) <a+ b+>_q

One subtlety the pair term forces into the open: a+ b+ maps the top rung
l = q out of the q-ladder, so the partial sum through l = q above is the
matrix element between the q- and (q+1)-truncated ladders rather than an
expectation on a single state.  The primary forms keep that literal-sum
convention; the ``renormalized`` variants are instead genuine expectations
on the unit-normalized q-ladder (their pair sum stops at l = q - 1).  Both
flavors are checked against brute-force evaluations of their own state
construction.

Quadrature conventions: X(theta) = e^{-i theta} a + e^{i theta} b+ and
Y(theta) = i e^{i theta} a+ - i e^{-i theta} b, which satisfy [X, Y] = 2i.
(The sign on the second Y term is forced by that commutator.)  The phase
factor multiplying <a+ b+> is cos(2 theta), as the operator expansion of
X X+ = 1 + N + e^{2i theta} a+ b+ + e^{-2i theta} a b dictates.  Note
Y Y+ = 1 + N - e^{2i theta} a+ b+ - e^{-2i theta} a b, so the Y fluctuation
equals the X fluctuation evaluated a quarter period away in theta.
"""
from __future__ import annotations

import math

import numpy as np

from .devices import ParametricAmplifier, pdc_apply
from .fock import FockState2, TruncationPolicy, TwoModeVector


def _tail_ratio(g: float) -> float:
    return (g - 1.0) / g


def mean_photons(g: float, q: int | None, renormalized: bool = False) -> float:
    """Mean total photon number of the order-q amplified vacuum.

    q = None means the untruncated device, giving 2 (g - 1).  The default is
    the literal ladder sum; ``renormalized`` divides by the truncated state's
    squared norm.
    """
    if g < 1.0:
        raise ValueError(f"gain must be >= 1, got {g}")
    if q is None:
        return 2.0 * (g - 1.0)
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    r = _tail_ratio(g)
    if r == 0.0:
        return 0.0
    literal = 2.0 * (g - 1.0) * (1.0 - (1.0 + q) * r**q + q * r ** (q + 1))
    if renormalized:
        return literal / (1.0 - r ** (q + 1))
    return literal


def mean_photons_ratio(g: float, q: int | None) -> float:
    """<N>_q / <N>_infinity in closed form; 1 by continuity at g = 1 (q >= 1)."""
    if g < 1.0:
        raise ValueError(f"gain must be >= 1, got {g}")
    if q is None:
        return 1.0
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    r = _tail_ratio(g)
    return 1.0 - (1.0 + q) * r**q + q * r ** (q + 1)


def _pair_sum(g: float, top: int) -> float:
    # sum_{l=0}^{top} (l + 1) tanh(phi)^(2l+1) / g; empty for top < 0
    if top < 0:
        return 0.0
    r = _tail_ratio(g)
    sqrt_r = math.sqrt(r)
    return sqrt_r * (1.0 - r ** (top + 1)) + 0.5 * sqrt_r * mean_photons(g, top)


def quadrature_fluctuation(g: float, q: int, theta: float, renormalized: bool = False) -> float:
    """<X(theta) X(theta)+> of the order-q amplified vacuum, closed form.

    Default: the literal-sum form 1 + <N>_q + 2 cos(2 theta) <a+ b+>_q with
    the pair sum through l = q.  Renormalized: the expectation on the
    unit-normalized q-ladder, whose pair sum stops at l = q - 1.
    """
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    n_q = mean_photons(g, q)
    if not renormalized:
        return 1.0 + n_q + 2.0 * math.cos(2.0 * theta) * _pair_sum(g, q)
    norm_sq = 1.0 - _tail_ratio(g) ** (q + 1)
    pair = _pair_sum(g, q - 1)
    return (norm_sq + n_q + 2.0 * math.cos(2.0 * theta) * pair) / norm_sq


# --- brute-force oracles -------------------------------------------------
#
# These rebuild the truncated state through the device series and evaluate
# expectations with explicit operator matrices; they share no algebra with
# the closed forms above.


def truncated_pair_state(g: float, q: int, policy: TruncationPolicy | None = None) -> TwoModeVector:
    """Amplified vacuum restricted to the first q + 1 pair states (not renormalized)."""
    if policy is None:
        policy = TruncationPolicy(2 * q + 6)
    image, _ = pdc_apply(ParametricAmplifier(g), TwoModeVector.basis_state(policy, (0, 0)))
    kept = {s: a for s, a in image.amplitudes.items() if s[0] <= q}
    return TwoModeVector(kept, policy)


def mean_photons_oracle(g: float, q: int, renormalized: bool = False) -> float:
    """Direct <N> on the explicitly built truncated state."""
    state = truncated_pair_state(g, q)
    total = sum((s.n + s.m) * abs(a) ** 2 for s, a in state.amplitudes.items())
    if renormalized:
        return float(total) / state.norm() ** 2
    return float(total)


def _ladder_matrices(policy: TruncationPolicy) -> tuple[np.ndarray, np.ndarray]:
    size = policy.size
    lower_a = np.zeros((size, size), dtype=complex)
    lower_b = np.zeros((size, size), dtype=complex)
    for state in policy.basis:
        n, m = state
        col = policy.index_of(state)
        if n >= 1:
            lower_a[policy.index_of(FockState2(n - 1, m)), col] = math.sqrt(n)
        if m >= 1:
            lower_b[policy.index_of(FockState2(n, m - 1)), col] = math.sqrt(m)
    return lower_a, lower_b


def quadrature_fluctuation_oracle(
    g: float, q: int, theta: float, renormalized: bool = False
) -> float:
    """<X X+> by explicit matrix assembly on explicitly built ladder states.

    Renormalized: plain expectation on the unit-normalized q-ladder.
    Literal: 1 + <N> on the q-ladder plus the pair correlation taken between
    the q- and (q+1)-truncated ladders, which is what the partial sum through
    l = q amounts to.  The states carry headroom in the policy so every
    operator product is exact on their support.
    """
    policy = TruncationPolicy(2 * q + 8)
    state = truncated_pair_state(g, q, policy)
    lower_a, lower_b = _ladder_matrices(policy)
    x_op = np.exp(-1j * theta) * lower_a + np.exp(1j * theta) * lower_b.conj().T
    dense = state.dense()
    if renormalized:
        xxdag = x_op @ x_op.conj().T
        expectation = float(np.real(dense.conj() @ (xxdag @ dense)))
        return expectation / state.norm() ** 2
    number_op = lower_a.conj().T @ lower_a + lower_b.conj().T @ lower_b
    n_exp = float(np.real(dense.conj() @ (number_op @ dense)))
    pair_raise = lower_a.conj().T @ lower_b.conj().T
    bra = truncated_pair_state(g, q + 1, policy).dense()
    pair_term = np.exp(2j * theta) * (bra.conj() @ (pair_raise @ dense))
    return 1.0 + n_exp + 2.0 * float(np.real(pair_term))
