"""Dense state-vector and density-matrix primitives for a handful of qubits.

Basis convention: qubit 1 is the most significant bit, so the ket
``|q1 q2 ... qn>`` sits at index ``sum(q_j * 2**(n - j))``.  This makes ket
strings such as ``"0101"`` read directly as binary indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from typing import Union

import numpy as np

from .exceptions import DegeneracyError, DimensionError

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

HERMITIAN_TOL = 1e-12


def basis_index(bits: str) -> int:
    """Index of the computational basis ket labelled by ``bits`` (qubit 1 first)."""
    return int(bits, 2)


def basis_label(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


@dataclass(frozen=True)
class QuantumState:
    """Normalised amplitude vector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.n_qubits:
            raise DimensionError(
                f"{self.n_qubits} qubits need {2 ** self.n_qubits} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec) -> "QuantumState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        n = int(round(np.log2(vec.size)))
        if 2 ** n != vec.size:
            raise DimensionError(f"length {vec.size} is not a power of two")
        return cls(n, vec)

    @classmethod
    def basis(cls, bits: str) -> "QuantumState":
        vec = np.zeros(2 ** len(bits), dtype=complex)
        vec[basis_index(bits)] = 1.0
        return cls(len(bits), vec)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "QuantumState") -> complex:
        """``<self|other>``."""
        _check_dim(self.dim, other.dim)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[basis_index(bits)])


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian matrix over ``n_qubits`` qubits.

    Deviation matrices are allowed, so the trace is not required to be one.
    """

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        dim = 2 ** self.n_qubits
        if mat.shape != (dim, dim):
            raise DimensionError(f"expected {dim}x{dim} matrix, got {mat.shape}")
        if not is_hermitian(mat):
            raise ValueError("density operator must be Hermitian")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def conjugate_by(self, unitary: np.ndarray) -> "DensityOperator":
        """Return ``U rho U^dagger``."""
        _check_dim(self.dim, unitary.shape[0])
        mat = unitary @ self.matrix @ unitary.conj().T
        return DensityOperator(self.n_qubits, 0.5 * (mat + mat.conj().T))


@dataclass(frozen=True)
class PauliTerm:
    """``coefficient * P_1 (x) P_2 (x) ... (x) P_n`` with ``P_k`` in {I, X, Y, Z}."""

    coefficient: float
    factors: str

    def __post_init__(self):
        factors = self.factors.upper()
        bad = set(factors) - set(PAULI)
        if bad:
            raise ValueError(f"unknown Pauli labels {sorted(bad)}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @classmethod
    def on(cls, coefficient: float, n_qubits: int, **sites: str) -> "PauliTerm":
        """Build a term from 1-based site assignments, e.g. ``on(1, 4, q1="Z", q3="Z")``."""
        labels = ["I"] * n_qubits
        for key, label in sites.items():
            labels[int(key.lstrip("q")) - 1] = label
        return cls(coefficient, "".join(labels))

    @property
    def n_qubits(self) -> int:
        return len(self.factors)

    def matrix(self) -> np.ndarray:
        return materialize(self, self.n_qubits)


@dataclass
class HamiltonianSum:
    """Sum of Pauli terms on a fixed register."""

    terms: list = field(default_factory=list)
    n_qubits: int = 0

    def __post_init__(self):
        self.terms = list(self.terms)
        if not self.n_qubits and self.terms:
            self.n_qubits = self.terms[0].n_qubits
        for term in self.terms:
            if term.n_qubits != self.n_qubits:
                raise DimensionError(
                    f"term {term.factors} acts on {term.n_qubits} qubits, "
                    f"Hamiltonian has {self.n_qubits}")

    def __add__(self, other: "HamiltonianSum") -> "HamiltonianSum":
        return HamiltonianSum(self.terms + other.terms, self.n_qubits or other.n_qubits)

    def scaled(self, factor: float) -> "HamiltonianSum":
        return HamiltonianSum(
            [PauliTerm(factor * t.coefficient, t.factors) for t in self.terms], self.n_qubits)

    def matrix(self) -> np.ndarray:
        dim = 2 ** self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for term in self.terms:
            out += materialize(term, self.n_qubits)
        return out


Operator = Union[PauliTerm, HamiltonianSum, np.ndarray]


def materialize(term: PauliTerm, n_qubits: int) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of a Pauli term, qubit 1 leftmost."""
    if len(term.factors) != n_qubits:
        raise DimensionError(
            f"term {term.factors!r} has {len(term.factors)} factors, expected {n_qubits}")
    mats = [PAULI[label] for label in term.factors]
    return term.coefficient * reduce(np.kron, mats)


def operator_matrix(op: Operator) -> np.ndarray:
    if isinstance(op, PauliTerm):
        return op.matrix()
    if isinstance(op, HamiltonianSum):
        return op.matrix()
    return np.asarray(op, dtype=complex)


def is_hermitian(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(mat)))) if mat.size else 1.0
    return bool(np.max(np.abs(mat - mat.conj().T), initial=0.0) <= tol * scale)


def _check_dim(expected: int, got: int):
    if expected != got:
        raise DimensionError(f"dimension mismatch: {expected} vs {got}")


def expectation(state: QuantumState, op: Operator) -> complex:
    """``<psi|O|psi>``."""
    mat = operator_matrix(op)
    _check_dim(state.dim, mat.shape[0])
    psi = state.amplitudes
    return complex(np.vdot(psi, mat @ psi))


def apply(unitary: np.ndarray, state: QuantumState) -> QuantumState:
    _check_dim(state.dim, unitary.shape[0])
    return QuantumState(state.n_qubits, unitary @ state.amplitudes)


def pauli_decompose(mat: np.ndarray, tol: float = 1e-12) -> HamiltonianSum:
    """Expand a Hermitian matrix in the Pauli-string basis."""
    mat = np.asarray(mat, dtype=complex)
    n = int(round(np.log2(mat.shape[0])))
    terms = []
    for labels in product("IXYZ", repeat=n):
        factors = "".join(labels)
        coeff = np.trace(materialize(PauliTerm(1.0, factors), n) @ mat) / 2 ** n
        if abs(coeff) > tol:
            terms.append(PauliTerm(coeff.real, factors))
    return HamiltonianSum(terms, n)


def eigh_hermitian(mat: np.ndarray):
    if not is_hermitian(mat, 1e-10):
        raise ValueError("operator is not Hermitian")
    return np.linalg.eigh(0.5 * (mat + mat.conj().T))


def propagator(H: Operator, t: float) -> np.ndarray:
    """Exact ``exp(-i H t)`` from the Hermitian eigendecomposition."""
    energies, vecs = eigh_hermitian(operator_matrix(H))
    return (vecs * np.exp(-1j * energies * t)) @ vecs.conj().T


def evolve_exact(H: Operator, t: float, state: QuantumState) -> QuantumState:
    """Return ``exp(-i H t) |psi>``."""
    mat = operator_matrix(H)
    _check_dim(state.dim, mat.shape[0])
    return apply(propagator(mat, t), state)


def evolve_exact_batch(H: Operator, times: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Evolve row ``k`` of ``vectors`` for time ``times[k]``.

    ``vectors`` has shape ``(len(times), dim)``; a single vector of shape
    ``(dim,)`` is broadcast over all times.
    """
    energies, vecs = eigh_hermitian(operator_matrix(H))
    times = np.asarray(times, dtype=float)
    vectors = np.broadcast_to(np.asarray(vectors, dtype=complex), (times.size, energies.size))
    coeffs = vectors @ vecs.conj()
    coeffs = coeffs * np.exp(-1j * np.outer(times, energies))
    return coeffs @ vecs.T


def pauli_rotation(term: PauliTerm, theta: float) -> np.ndarray:
    """``exp(-i theta P)`` for a unit-coefficient Pauli string ``P`` (involution)."""
    P = materialize(PauliTerm(1.0, term.factors), term.n_qubits)
    return np.cos(theta) * np.eye(P.shape[0]) - 1j * np.sin(theta) * P


def controlled(unitary: np.ndarray) -> np.ndarray:
    """``|0><0| (x) I + |1><1| (x) U`` with the control prepended as qubit 0."""
    dim = unitary.shape[0]
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    out[:dim, :dim] = np.eye(dim)
    out[dim:, dim:] = unitary
    return out


def embed(single: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Place a 2x2 operator on ``qubit`` (1-based) of an ``n_qubits`` register."""
    mats = [np.eye(2, dtype=complex) for _ in range(n_qubits)]
    mats[qubit - 1] = np.asarray(single, dtype=complex)
    return reduce(np.kron, mats)


def two_level_rotation(dim: int, i: int, j: int, theta: float, axis: str = "y") -> np.ndarray:
    """Unitary rotating only the ``{i, j}`` subspace by ``theta``.

    The 2x2 block in the ``(i, j)`` ordering is ``[[c, -s], [s, c]]`` for
    ``axis="y"`` and ``[[c, -1j*s], [-1j*s, c]]`` for ``axis="x"``, with
    ``c = cos(theta/2)``, ``s = sin(theta/2)``.  Acting on a diagonal state it
    moves a fraction ``s**2`` of the population of ``j`` onto ``i`` and vice
    versa.
    """
    if i == j:
        raise DegeneracyError("two-level rotation needs two distinct levels")
    if not (0 <= i < dim and 0 <= j < dim):
        raise DimensionError(f"levels ({i}, {j}) outside 0..{dim - 1}")
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = np.eye(dim, dtype=complex)
    if axis.lower().startswith("y"):
        block = np.array([[c, -s], [s, c]], dtype=complex)
    elif axis.lower().startswith("x"):
        block = np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    idx = np.array([i, j])
    out[np.ix_(idx, idx)] = block
    return out
