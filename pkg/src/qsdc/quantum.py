"""Exact finite-dimensional quantum states, measurements, channels and spectral functionals.

Conventions used throughout the package:

* Qubit 0 is Alice's retained qubit; qubits 1..n-1 are the travel qubits,
  in partner order.
* Basis index bit k holds qubit k's value, so the computational basis ket
  ``|b0 b1 ... b_{n-1}>`` (qubit 0 written first) sits at index
  ``sum_k b_k * 2**k`` of the amplitude vector.
* Measurement outcomes are encoded as +1/-1.  In Bz, +1 <-> |0> and
  -1 <-> |1>; in Bx, +1 <-> |+> and -1 <-> |->.  With this encoding the
  n-party parity check in the Hadamard basis is a plain product of outcomes.
* Entropies are in bits (log base 2).

All values are immutable after construction and all operations are pure
functions of their inputs plus an explicit random generator, so everything
here is safe to use concurrently.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

MAX_QUBITS = 16

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_TOL = 1e-9
KRAUS_TOL = 1e-10
ENTROPY_CLIP = 1e-12

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


class Basis(str, Enum):
    """Single-qubit product measurement basis for all parties."""

    BZ = "Bz"
    BX = "Bx"


def ket_string(index: int, n_qubits: int) -> str:
    """Bit string of a basis index with qubit 0 (Alice) written first."""
    return "".join(str((index >> k) & 1) for k in range(n_qubits))


def _check_qubit_count(n: int, minimum: int) -> None:
    if not isinstance(n, (int, np.integer)) or not minimum <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be an integer in [{minimum}, {MAX_QUBITS}], got {n!r}")


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized complex amplitude vector over the n-qubit computational basis."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        _check_qubit_count(self.n_qubits, 1)
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"amplitude vector must have length {2**self.n_qubits}, got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |a|^2 = {norm_sq!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def density(self) -> "DensityOperator":
        """Projector |psi><psi| as a density operator."""
        return DensityOperator(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def to_dict(self) -> dict:
        """JSON form ``{n_qubits, amplitudes: [[re, im], ...]}``."""
        return {
            "n_qubits": self.n_qubits,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PureState":
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(int(data["n_qubits"]), amps)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix on n qubits."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        _check_qubit_count(self.n_qubits, 1)
        dim = 2**self.n_qubits
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix must be {dim}x{dim}, got shape {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian")
        trace = complex(np.trace(mat)).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1, got {trace!r}")
        min_eig = float(np.linalg.eigvalsh(mat)[0])
        if min_eig < -EIGENVALUE_TOL:
            raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {min_eig!r}")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Outcome of measuring every qubit in one product basis."""

    basis: Basis
    outcomes: tuple[int, ...]
    post_state: PureState

    def __post_init__(self) -> None:
        if len(self.outcomes) != self.post_state.n_qubits:
            raise ValueError("one outcome per qubit required")
        if any(o not in (+1, -1) for o in self.outcomes):
            raise ValueError("outcomes must be +1 or -1")


def _pure_unchecked(n: int, amplitudes: np.ndarray) -> PureState:
    """Internal fast path for amplitudes already known to be normalized."""
    state = object.__new__(PureState)
    amplitudes.flags.writeable = False
    object.__setattr__(state, "n_qubits", n)
    object.__setattr__(state, "amplitudes", amplitudes)
    return state


def ghz_state(n: int) -> PureState:
    """The n-qubit GHZ state (|0...0> + |1...1>)/sqrt(2); for n=1 this is |+>."""
    _check_qubit_count(n, 1)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = _INV_SQRT2
    amps[-1] = _INV_SQRT2
    return PureState(n, amps)


def w_state(n: int) -> PureState:
    """The n-qubit W state: amplitude 1/sqrt(n) on every single-excitation ket."""
    _check_qubit_count(n, 2)
    amps = np.zeros(2**n, dtype=complex)
    for k in range(n):
        amps[1 << k] = 1.0 / np.sqrt(n)
    return PureState(n, amps)


def ghz_pairs(n: int) -> list[int]:
    """Canonical representatives of the complementary index pairs {x, ~x}, in basis order.

    Each GHZ-type basis state is supported on one pair.  The representative of
    a pair is its minimum-Hamming-weight member (ties, which occur only for
    even n at weight n/2, go to the smaller integer), and pairs are ordered by
    (weight of representative, representative value).  For n=3 this yields the
    representatives |000>, |100>, |010>, |001> in that order.
    """
    _check_qubit_count(n, 2)
    full = (1 << n) - 1
    reps = []
    for x in range(1 << (n - 1)):
        # x runs over all indices with the top qubit 0, hitting every pair once
        xbar = full ^ x
        wx, wxbar = bin(x).count("1"), bin(xbar).count("1")
        reps.append(x if (wx, x) <= (wxbar, xbar) else xbar)
    reps.sort(key=lambda r: (bin(r).count("1"), r))
    return reps


def ghz_basis_state(n: int, index: int) -> PureState:
    """Basis state ``(|x> + (-1)^s |~x>)/sqrt(2)`` with index = 2*pair + s.

    The representative x carries the +1/sqrt(2) amplitude; the minus sign of
    odd-index states sits on its complement.  Index 0 is the GHZ state.
    """
    _check_qubit_count(n, 2)
    if not 0 <= index < 2**n:
        raise ValueError(f"basis index must be in [0, {2**n - 1}], got {index}")
    pair, sign_bit = divmod(index, 2)
    rep = ghz_pairs(n)[pair]
    comp = ((1 << n) - 1) ^ rep
    amps = np.zeros(2**n, dtype=complex)
    amps[rep] = _INV_SQRT2
    amps[comp] = -_INV_SQRT2 if sign_bit else _INV_SQRT2
    return PureState(n, amps)


def ghz_basis(n: int) -> list[PureState]:
    """The complete orthonormal GHZ-type basis of 2**n states, in canonical order.

    See :func:`ghz_basis_state` and :func:`ghz_pairs` for the ordering rule;
    at n=3 the list is the standard eight three-qubit GHZ-type states starting
    with the GHZ state itself.
    """
    return [ghz_basis_state(n, i) for i in range(2**n)]


# --- tensor helpers -------------------------------------------------------
#
# Reshaping a 2**n vector to shape [2]*n puts qubit q on axis n-1-q (the
# first axis is the most significant index bit).  Operators on a qubit subset
# are contracted along those axes and moved back in place.


def _axes_for(qubits: Sequence[int], n: int) -> list[int]:
    return [n - 1 - q for q in reversed(list(qubits))]


def _apply_matrix_tensor(tensor: np.ndarray, matrix: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    mt = np.asarray(matrix, dtype=complex).reshape([2] * (2 * k))
    out = np.tensordot(mt, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, range(k), axes)


def _check_targets(qubits: Sequence[int], n: int) -> list[int]:
    qs = list(qubits)
    if not qs or len(set(qs)) != len(qs) or any(not 0 <= q < n for q in qs):
        raise ValueError(f"target qubits must be distinct indices in [0, {n - 1}], got {qubits!r}")
    return qs


def apply_unitary(state: PureState, matrix: np.ndarray, qubits: Sequence[int]) -> PureState:
    """Apply a unitary on the given qubit subset of a pure state.

    ``matrix`` is 2**k x 2**k with subspace index bit j holding qubit
    ``qubits[j]``'s value, matching the global index convention.
    """
    n = state.n_qubits
    qs = _check_targets(qubits, n)
    mat = np.asarray(matrix, dtype=complex)
    dim = 2 ** len(qs)
    if mat.shape != (dim, dim):
        raise ValueError(f"operator must be {dim}x{dim} for {len(qs)} qubits")
    if np.max(np.abs(mat.conj().T @ mat - np.eye(dim))) > KRAUS_TOL:
        raise ValueError("operator is not unitary")
    tensor = state.amplitudes.reshape([2] * n)
    out = _apply_matrix_tensor(tensor, mat, _axes_for(qs, n))
    return PureState(n, out.reshape(-1))


def apply_channel(
    rho: DensityOperator, kraus_set: Sequence[np.ndarray], target_qubits: Sequence[int]
) -> DensityOperator:
    """Apply a CPTP map given by Kraus operators on a qubit subset.

    The Kraus set must satisfy sum K^dag K = identity on the target subspace
    within 1e-10, otherwise a ValueError is raised.
    """
    n = rho.n_qubits
    qs = _check_targets(target_qubits, n)
    dim = 2 ** len(qs)
    kraus = [np.asarray(k, dtype=complex) for k in kraus_set]
    if any(k.shape != (dim, dim) for k in kraus):
        raise ValueError(f"every Kraus operator must be {dim}x{dim} for {len(qs)} qubits")
    total = sum(k.conj().T @ k for k in kraus)
    if np.max(np.abs(total - np.eye(dim))) > KRAUS_TOL:
        raise ValueError("Kraus set is not trace preserving on the target subspace")

    ket_axes = _axes_for(qs, n)
    bra_axes = [n + a for a in ket_axes]
    tensor = rho.matrix.reshape([2] * (2 * n))
    out = np.zeros_like(tensor)
    for k in kraus:
        term = _apply_matrix_tensor(tensor, k, ket_axes)
        out = out + _apply_matrix_tensor(term, k.conj(), bra_axes)
    dim_full = 2**n
    mat = out.reshape(dim_full, dim_full)
    mat = (mat + mat.conj().T) / 2.0  # scrub float asymmetry
    return DensityOperator(n, mat)


@functools.lru_cache(maxsize=None)
def _hadamard_matrix(n: int) -> np.ndarray:
    h1 = np.array([[1.0, 1.0], [1.0, -1.0]]) * _INV_SQRT2
    h = np.array([[1.0]])
    for _ in range(n):
        h = np.kron(h, h1)
    h.flags.writeable = False
    return h


_HADAMARD_DENSE_LIMIT = 8  # full 2^n x 2^n transform kept cached up to here


def _to_x_basis(amplitudes: np.ndarray, n: int) -> np.ndarray:
    """Amplitudes in the |+/-> product basis (Hadamard on every qubit)."""
    if n <= _HADAMARD_DENSE_LIMIT:
        return _hadamard_matrix(n) @ amplitudes
    tensor = amplitudes.reshape([2] * n)
    h1 = _hadamard_matrix(1)
    for q in range(n):
        tensor = _apply_matrix_tensor(tensor, h1, [n - 1 - q])
    return tensor.reshape(-1)


def outcomes_for_index(index: int, n: int) -> tuple[int, ...]:
    """Per-qubit +1/-1 outcome tuple for a basis index (bit 0 -> +1, bit 1 -> -1)."""
    return tuple(1 - 2 * ((index >> k) & 1) for k in range(n))


def measure_all(state: PureState, basis: Basis, rng: np.random.Generator) -> MeasurementRecord:
    """Measure every qubit in the given product basis, sampling from the Born rule.

    Deterministic for a fixed generator state.  The post-measurement state is
    the product basis state selected by the outcome tuple.
    """
    n = state.n_qubits
    amps = state.amplitudes if basis is Basis.BZ else _to_x_basis(state.amplitudes, n)
    probs = np.abs(amps) ** 2
    cumulative = np.cumsum(probs)
    index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    index = min(index, 2**n - 1)
    if basis is Basis.BZ:
        post = np.zeros(2**n, dtype=complex)
        post[index] = 1.0
    else:
        if n <= _HADAMARD_DENSE_LIMIT:
            post = _hadamard_matrix(n)[:, index].astype(complex)
        else:
            signs = np.ones(2**n)
            for k in range(n):
                if (index >> k) & 1:
                    idx = (np.arange(2**n) >> k) & 1
                    signs[idx == 1] *= -1.0
            post = signs.astype(complex) / np.sqrt(2**n)
    return MeasurementRecord(basis, outcomes_for_index(index, n), _pure_unchecked(n, post))


def measure_all_density(
    rho: DensityOperator, basis: Basis
) -> dict[tuple[int, ...], float]:
    """Exact Born probabilities of every outcome tuple of a product measurement.

    Returns a table keyed by +1/-1 outcome tuples covering all 2**n of them;
    the probabilities sum to 1 within 1e-12.
    """
    n = rho.n_qubits
    if basis is Basis.BZ:
        probs = np.real(np.diag(rho.matrix)).copy()
    elif n <= _HADAMARD_DENSE_LIMIT:
        h = _hadamard_matrix(n)
        probs = np.real(np.diag(h @ rho.matrix @ h))
    else:
        tensor = rho.matrix.reshape([2] * (2 * n))
        h1 = _hadamard_matrix(1)
        for q in range(n):
            tensor = _apply_matrix_tensor(tensor, h1, [n - 1 - q])
            tensor = _apply_matrix_tensor(tensor, h1, [2 * n - 1 - q])
        probs = np.real(np.diag(tensor.reshape(2**n, 2**n)))
    probs = np.clip(probs, 0.0, None)
    return {outcomes_for_index(i, n): float(p) for i, p in enumerate(probs)}


def von_neumann_entropy(rho: DensityOperator) -> float:
    """Spectral entropy -sum lambda log2 lambda in bits, with 0 log 0 = 0.

    Eigenvalues below 1e-12 (including the small negatives tolerated by the
    density-operator invariant) are clipped to zero.
    """
    eigenvalues = np.linalg.eigvalsh(rho.matrix)
    eigenvalues = eigenvalues[eigenvalues >= ENTROPY_CLIP]
    if eigenvalues.size == 0:
        return 0.0
    return float(-np.sum(eigenvalues * np.log2(eigenvalues)))


def fidelity_to_target(rho: DensityOperator, target: PureState) -> float:
    """Fidelity sqrt(<target| rho |target>) between a state and a pure target."""
    if rho.n_qubits != target.n_qubits:
        raise ValueError(
            f"dimension mismatch: rho has {rho.n_qubits} qubits, target {target.n_qubits}"
        )
    overlap = np.real(np.vdot(target.amplitudes, rho.matrix @ target.amplitudes))
    return float(np.sqrt(min(max(overlap, 0.0), 1.0)))
