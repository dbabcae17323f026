"""Two-mode Fock space truncated by total photon number.

Basis convention, fixed for reproducibility: kets (n, m) with n + m <= n_max,
sorted by ascending total N = n + m and by ascending n inside each sector.
With this grading, operators that conserve the total photon number are block
diagonal and a sector is a contiguous index range.

Generators follow the two-mode Jordan-Schwinger realization

    Jx = (a+ b + a b+)/2     Kx = (a+ b+ + a b)/2
    Jy = (a+ b - a b+)/2i    Ky = (a+ b+ - a b)/2i
    Jz = (a+ a - b+ b)/2     Kz = (a+ a + b+ b + 1)/2

so the J family conserves n + m and the K family conserves n - m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Mapping, NamedTuple

import numpy as np

#: tolerance for identities that are exact on the truncated space
ATOL_EXACT = 1e-10
#: tolerance for identities limited by truncation effects
ATOL_TRUNC = 1e-8
#: tolerance for structural matrix checks (hermiticity, unitarity)
ATOL_MATRIX = 1e-12

LadderKind = Literal["a", "b", "a_dag", "b_dag"]
GeneratorKind = Literal["jx", "jy", "jz", "kx", "ky", "kz"]
CasimirKind = Literal["j2", "k2"]


class _OccupationPair(NamedTuple):
    n: int
    m: int


class FockState2(_OccupationPair):
    """Occupation pair |n, m> of the two bosonic modes."""

    __slots__ = ()

    def __new__(cls, n: int, m: int) -> "FockState2":
        if n < 0 or m < 0:
            raise ValueError(f"occupation numbers must be non-negative, got ({n}, {m})")
        return super().__new__(cls, n, m)

    @property
    def total(self) -> int:
        return self.n + self.m

    @property
    def imbalance(self) -> int:
        return self.n - self.m


@dataclass(frozen=True)
class TruncationPolicy:
    """Keep every ket with n + m <= n_max; everything above is dropped."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")

    @cached_property
    def basis(self) -> tuple[FockState2, ...]:
        states = []
        for total in range(self.n_max + 1):
            for n in range(total + 1):
                states.append(FockState2(n, total - n))
        return tuple(states)

    @cached_property
    def _index(self) -> dict[FockState2, int]:
        return {state: i for i, state in enumerate(self.basis)}

    @property
    def size(self) -> int:
        # (n_max + 1)(n_max + 2)/2 states
        return len(self.basis)

    def contains(self, state: FockState2) -> bool:
        return state.n + state.m <= self.n_max

    def index_of(self, state: FockState2) -> int:
        return self._index[FockState2(*state)]

    def sector_indices(self, total: int) -> range:
        """Contiguous index range of the fixed-total sector."""
        if not 0 <= total <= self.n_max:
            raise ValueError(f"sector {total} outside policy n_max={self.n_max}")
        start = total * (total + 1) // 2
        return range(start, start + total + 1)


@dataclass(frozen=True)
class TwoModeVector:
    """Finite complex amplitude map over the truncated two-mode basis.

    Treated as an immutable value; operations return new vectors.
    """

    amplitudes: Mapping[FockState2, complex]
    policy: TruncationPolicy

    def __post_init__(self) -> None:
        for state in self.amplitudes:
            if not self.policy.contains(FockState2(*state)):
                raise ValueError(f"state {state} violates policy n_max={self.policy.n_max}")

    @classmethod
    def zero(cls, policy: TruncationPolicy) -> "TwoModeVector":
        return cls({}, policy)

    @classmethod
    def basis_state(cls, policy: TruncationPolicy, state: FockState2 | tuple[int, int]) -> "TwoModeVector":
        state = FockState2(*state)
        return cls({state: 1.0 + 0.0j}, policy)

    @classmethod
    def from_dense(cls, policy: TruncationPolicy, dense: np.ndarray) -> "TwoModeVector":
        if dense.shape != (policy.size,):
            raise ValueError(f"expected shape ({policy.size},), got {dense.shape}")
        amps = {s: complex(dense[i]) for i, s in enumerate(policy.basis) if dense[i] != 0}
        return cls(amps, policy)

    def dense(self) -> np.ndarray:
        out = np.zeros(self.policy.size, dtype=complex)
        for state, amp in self.amplitudes.items():
            out[self.policy.index_of(state)] = amp
        return out

    def amplitude(self, state: FockState2 | tuple[int, int]) -> complex:
        return complex(self.amplitudes.get(FockState2(*state), 0.0))

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def inner(self, other: "TwoModeVector") -> complex:
        # <self|other>
        small, big = self.amplitudes, other.amplitudes
        if len(big) < len(small):
            return complex(np.conj(other.inner(self)))
        return sum(np.conj(amp) * big.get(state, 0.0) for state, amp in small.items())


@dataclass(frozen=True)
class SparseOperator:
    """Operator on the truncated basis stored as an entry map (out, in) -> value."""

    entries: Mapping[tuple[FockState2, FockState2], complex]
    policy: TruncationPolicy

    def dense(self) -> np.ndarray:
        mat = np.zeros((self.policy.size, self.policy.size), dtype=complex)
        for (out_state, in_state), value in self.entries.items():
            mat[self.policy.index_of(out_state), self.policy.index_of(in_state)] = value
        return mat

    def adjoint(self) -> "SparseOperator":
        entries = {(i, o): np.conj(v) for (o, i), v in self.entries.items()}
        return SparseOperator(entries, self.policy)

    def apply(self, vector: TwoModeVector) -> TwoModeVector:
        out: dict[FockState2, complex] = {}
        for (out_state, in_state), value in self.entries.items():
            amp = vector.amplitudes.get(in_state)
            if amp:
                out[out_state] = out.get(out_state, 0.0) + value * amp
        return TwoModeVector(out, self.policy)


def apply_ladder(which: LadderKind, vector: TwoModeVector) -> tuple[TwoModeVector, float]:
    """Apply a single ladder operator.

    Returns the truncated result together with the squared norm that was
    pushed above n_max and dropped (zero for the lowering operators).
    """
    policy = vector.policy
    out: dict[FockState2, complex] = {}
    dropped = 0.0
    for state, amp in vector.amplitudes.items():
        n, m = state
        if which == "a":
            if n == 0:
                continue
            target, factor = FockState2(n - 1, m), math.sqrt(n)
        elif which == "b":
            if m == 0:
                continue
            target, factor = FockState2(n, m - 1), math.sqrt(m)
        elif which == "a_dag":
            target, factor = FockState2(n + 1, m), math.sqrt(n + 1)
        elif which == "b_dag":
            target, factor = FockState2(n, m + 1), math.sqrt(m + 1)
        else:
            raise ValueError(f"unknown ladder operator {which!r}")
        value = factor * amp
        if policy.contains(target):
            out[target] = out.get(target, 0.0) + value
        else:
            dropped += abs(value) ** 2
    return TwoModeVector(out, policy), dropped


def _add(entries: dict, out_state: FockState2, in_state: FockState2, value: complex) -> None:
    key = (out_state, in_state)
    entries[key] = entries.get(key, 0.0) + value


def generator(which: GeneratorKind, policy: TruncationPolicy) -> SparseOperator:
    """Matrix realization of a Jordan-Schwinger generator on the truncated basis.

    Raising contributions that would exceed n_max are dropped, so the K family
    matrices are the truncated generators (their commutation relations hold on
    rows/columns with total <= n_max - 2).
    """
    entries: dict[tuple[FockState2, FockState2], complex] = {}
    for state in policy.basis:
        n, m = state
        if which in ("jx", "jy"):
            sign = 1.0 if which == "jx" else 1.0 / 1j
            # a+ b : (n, m) -> (n+1, m-1)
            if m >= 1:
                _add(entries, FockState2(n + 1, m - 1), state, sign * math.sqrt((n + 1) * m) / 2)
            # a b+ : (n, m) -> (n-1, m+1)
            if n >= 1:
                flip = 1.0 if which == "jx" else -1.0
                _add(entries, FockState2(n - 1, m + 1), state, flip * sign * math.sqrt(n * (m + 1)) / 2)
        elif which == "jz":
            if n != m:
                _add(entries, state, state, (n - m) / 2)
        elif which in ("kx", "ky"):
            sign = 1.0 if which == "kx" else 1.0 / 1j
            up = FockState2(n + 1, m + 1)
            if policy.contains(up):
                _add(entries, up, state, sign * math.sqrt((n + 1) * (m + 1)) / 2)
            if n >= 1 and m >= 1:
                flip = 1.0 if which == "kx" else -1.0
                _add(entries, FockState2(n - 1, m - 1), state, flip * sign * math.sqrt(n * m) / 2)
        elif which == "kz":
            _add(entries, state, state, (n + m + 1) / 2)
        else:
            raise ValueError(f"unknown generator {which!r}")
    return SparseOperator(entries, policy)


def casimir(which: CasimirKind, policy: TruncationPolicy) -> SparseOperator:
    """Diagonal Casimir operators.

    j2 has eigenvalue (N/2)(N/2 + 1) on |n, m> with N = n + m.  k2 has
    eigenvalue d(d + 1) with d = (n - m)/2, i.e. it is a function of the
    imbalance alone (the same quantity the K family conserves).
    """
    entries: dict[tuple[FockState2, FockState2], complex] = {}
    for state in policy.basis:
        n, m = state
        if which == "j2":
            half = (n + m) / 2
        elif which == "k2":
            half = (n - m) / 2
        else:
            raise ValueError(f"unknown casimir {which!r}")
        value = half * (half + 1)
        if value != 0.0:
            _add(entries, state, state, value)
    return SparseOperator(entries, policy)
