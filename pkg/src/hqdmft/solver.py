"""Impurity ground states and the ancilla circuit that measures their correlators.

The impurity correlators are

    O1(t) = <Psi| e^{iHt} q1 e^{-iHt} q1 |Psi>
    O2(t) = <Psi| e^{iHt} q1 e^{-iHt} q2 |Psi>

with ``q1 = sigma_x^1`` and ``q2 = -sigma_y^1``.  They are read out from an
ancilla prepended as qubit 0 of a 5-qubit register.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegeneracyError, DimensionError
from .model import N_QUBITS, SiamParams, build_spin_hamiltonian
from .qsim import (
    PAULI,
    HamiltonianSum,
    PauliTerm,
    QuantumState,
    controlled,
    eigh_hermitian,
    embed,
    evolve_exact_batch,
    expectation,
    materialize,
    pauli_rotation,
    propagator,
)

GAP_TOL = 1e-9

# factor order of one first-order Trotter step
TROTTER_ORDER = ("ZIZI", "XXII", "YYII", "IIXX", "IIYY")

Q1 = embed(PAULI["X"], 1, N_QUBITS)
Q2 = embed(-PAULI["Y"], 1, N_QUBITS)


@dataclass(frozen=True)
class AspSchedule:
    """Linear ramp of the interaction term over ``M`` steps of length ``T / M``."""

    T: float = 4.0
    M: int = 50

    def __post_init__(self):
        if self.T <= 0 or self.M < 1:
            raise ValueError(f"need T > 0 and M >= 1, got T={self.T}, M={self.M}")

    @property
    def dT(self) -> float:
        return self.T / self.M

    def s(self) -> np.ndarray:
        return np.arange(self.M + 1) / self.M


@dataclass(frozen=True)
class TrotterPlan:
    n: int
    theta1: float
    theta2: float

    @classmethod
    def for_time(cls, params: SiamParams, t: float, n: int) -> "TrotterPlan":
        if n < 1:
            raise ValueError(f"Trotter segment count must be >= 1, got {n}")
        return cls(n, params.U * t / (4 * n), params.V * t / (2 * n))

    def factors(self):
        angles = (self.theta1,) + (self.theta2,) * 4
        return list(zip(TROTTER_ORDER, angles))

    def unitary(self) -> np.ndarray:
        step = np.eye(2 ** N_QUBITS, dtype=complex)
        for label, theta in self.factors():
            step = step @ pauli_rotation(PauliTerm(1.0, label), theta)
        return np.linalg.matrix_power(step, self.n)


@dataclass(frozen=True)
class CorrelatorRequest:
    which: str
    t: float
    params: SiamParams
    mode: str = "exact"
    trotter_n: int = 1

    def __post_init__(self):
        if self.which not in ("O1", "O2"):
            raise ValueError(f"which must be 'O1' or 'O2', got {self.which!r}")
        if self.mode not in ("exact", "trotter"):
            raise ValueError(f"mode must be 'exact' or 'trotter', got {self.mode!r}")


def ground_state_ed(H: HamiltonianSum | np.ndarray):
    """Lowest eigenpair; phase fixed so the largest amplitude is real positive."""
    mat = H.matrix() if isinstance(H, HamiltonianSum) else np.asarray(H, dtype=complex)
    energies, vecs = eigh_hermitian(mat)
    if energies[1] - energies[0] <= GAP_TOL:
        raise DegeneracyError(
            f"ground level is degenerate (gap {energies[1] - energies[0]:.3e})")
    vec = vecs[:, 0]
    mags = np.abs(vec)
    # first index among (near-)ties keeps the choice stable under roundoff
    lead = int(np.flatnonzero(mags >= mags.max() - 1e-9)[0])
    vec = vec * np.exp(-1j * np.angle(vec[lead]))
    n = int(round(np.log2(vec.size)))
    return float(energies[0]), QuantumState(n, vec)


def psi0_closed_form() -> QuantumState:
    vec = np.zeros(16, dtype=complex)
    for bits, sign in (("0101", 1), ("0110", -1), ("1001", -1), ("1010", 1)):
        vec[int(bits, 2)] = sign / 2
    return QuantumState(4, vec)


def psi0_preparation_gates():
    """Three gates taking ``|0000>`` to the product of singlets on (1,2) and (3,4).

    ``U1`` rotates qubits 1 and 3 to ``(|0> - |1>)/sqrt(2)``, ``U2`` copies them
    onto qubits 2 and 4 with CNOTs, ``U3`` flips qubits 2 and 4.
    """
    ry = pauli_rotation(PauliTerm(1.0, "Y"), -np.pi / 4)
    U1 = embed(ry, 1, 4) @ embed(ry, 3, 4)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    cnot12 = embed(p0, 1, 4) + embed(p1, 1, 4) @ embed(PAULI["X"], 2, 4)
    cnot34 = embed(p0, 3, 4) + embed(p1, 3, 4) @ embed(PAULI["X"], 4, 4)
    U2 = cnot34 @ cnot12
    U3 = embed(PAULI["X"], 2, 4) @ embed(PAULI["X"], 4, 4)
    return U1, U2, U3


def prepare_psi0() -> QuantumState:
    """U = 0 ground state, built by the preparation circuit and checked against the closed form."""
    U1, U2, U3 = psi0_preparation_gates()
    vec = U3 @ U2 @ U1 @ QuantumState.basis("0000").amplitudes
    state = QuantumState(4, vec)
    ref = psi0_closed_form()
    if np.max(np.abs(state.amplitudes - ref.amplitudes)) > 1e-12:
        raise RuntimeError("preparation circuit does not reproduce Psi0")
    return state


def adiabatic_hamiltonian(params: SiamParams, s: float) -> HamiltonianSum:
    return build_spin_hamiltonian(SiamParams.half_filled(s * params.U, params.V))


def asp_evolve(params: SiamParams, schedule: AspSchedule = AspSchedule()):
    """Adiabatic ramp of U from 0, one Trotterised step per schedule slot.

    Returns the final state and the fidelity with the instantaneous ground
    state at every ``s = m/M`` for ``m = 0..M`` (entry 0 is the initial state).
    """
    if params.V <= 0:
        raise ValueError(f"adiabatic preparation needs V > 0, got {params.V}")
    state = prepare_psi0()
    fidelity = np.empty(schedule.M + 1)
    _, gs = ground_state_ed(adiabatic_hamiltonian(params, 0.0))
    fidelity[0] = abs(gs.overlap(state)) ** 2
    vec = state.amplitudes
    dT = schedule.dT
    for m in range(1, schedule.M + 1):
        s = m / schedule.M
        angles = (s * params.U * dT / 4,) + (params.V * dT / 2,) * 4
        # same operator product as TrotterPlan: rightmost factor acts first
        for label, theta in reversed(list(zip(TROTTER_ORDER, angles))):
            vec = pauli_rotation(PauliTerm(1.0, label), theta) @ vec
        _, gs = ground_state_ed(adiabatic_hamiltonian(params, s))
        fidelity[m] = abs(np.vdot(gs.amplitudes, vec)) ** 2
    return QuantumState(4, vec), fidelity


def trotter_evolve(params: SiamParams, t: float, n: int, state: QuantumState) -> QuantumState:
    """``[prod_k exp(-i theta_k P_k)]**n |psi>`` with the fixed factor order."""
    if state.n_qubits != N_QUBITS:
        raise DimensionError(f"expected a 4-qubit state, got {state.n_qubits}")
    W = TrotterPlan.for_time(params, t, n).unitary()
    return QuantumState(N_QUBITS, W @ state.amplitudes)


def _signed_permutation(P: np.ndarray):
    """Pauli strings have one nonzero per row: ``(P v)[i] = phase[i] * v[perm[i]]``."""
    perm = np.argmax(np.abs(P), axis=1)
    return perm, P[np.arange(P.shape[0]), perm]


def _sector_labels() -> np.ndarray:
    """``(N_dn, N_up)`` of every basis state, encoded as ``3 * N_dn + N_up``."""
    idx = np.arange(2 ** N_QUBITS)
    bits = (idx[:, None] >> np.arange(N_QUBITS - 1, -1, -1)[None, :]) & 1
    return 3 * (bits[:, 0] + bits[:, 1]) + bits[:, 2] + bits[:, 3]


SECTORS = _sector_labels()
SUPPORT_TOL = 1e-14


def _support(vectors: np.ndarray) -> np.ndarray:
    """Basis states sharing a particle-number sector with any non-negligible amplitude."""
    mags = np.abs(vectors)
    occupied = np.unique(SECTORS[np.any(mags > SUPPORT_TOL * mags.max(initial=1.0), axis=0)])
    return np.flatnonzero(np.isin(SECTORS, occupied))


def trotter_blocks(params: SiamParams, times, n: int, idx) -> np.ndarray:
    """One Trotter step per time, restricted to the basis states ``idx``.

    Each XX/YY pair acts as a number-conserving hop, so the step maps a union
    of particle-number sectors onto itself.
    """
    if n < 1:
        raise ValueError(f"Trotter segment count must be >= 1, got {n}")
    times = np.asarray(times, dtype=float)
    thetas = [params.U * times / (4 * n)] + [params.V * times / (2 * n)] * 4
    cols = np.eye(2 ** N_QUBITS, dtype=complex)[:, idx]
    step = np.array(np.broadcast_to(cols, (times.size,) + cols.shape))
    # the product's rightmost factor acts first
    for label, theta in reversed(list(zip(TROTTER_ORDER, thetas))):
        perm, phase = _signed_permutation(materialize(PauliTerm(1.0, label), N_QUBITS))
        c = np.cos(theta)[:, None, None]
        s = np.sin(theta)[:, None, None]
        step = c * step - 1j * s * (step[:, perm, :] * phase[None, :, None])
    return step[:, idx, :]


def _trotter_batch(params: SiamParams, times, n: int, vectors, adjoint: bool = False):
    """Apply the Trotter product (or its adjoint) row-wise, one time per row."""
    times = np.asarray(times, dtype=float)
    vectors = np.array(np.broadcast_to(vectors, (times.size, 2 ** N_QUBITS)), dtype=complex)
    idx = _support(vectors)
    block = trotter_blocks(params, times, n, idx)
    if adjoint:
        block = block.conj().transpose(0, 2, 1)
    sub = vectors[:, idx, None]
    for _ in range(n):
        sub = block @ sub
    out = np.zeros_like(vectors)
    out[:, idx] = sub[:, :, 0]
    return out


def _evolution(params: SiamParams, t: float, mode: str, trotter_n: int) -> np.ndarray:
    if mode == "exact":
        return propagator(build_spin_hamiltonian(params), t)
    return TrotterPlan.for_time(params, t, trotter_n).unitary()


def _check_ground(ground: QuantumState):
    if ground.dim != 16:
        raise DimensionError(f"ground state must have 16 amplitudes, got {ground.dim}")


def _first_gate(which: str) -> np.ndarray:
    return Q1 if which == "O1" else Q2


def scattering_correlation(req: CorrelatorRequest, ground: QuantumState) -> complex:
    """Run the 5-qubit scattering circuit for one time and read the ancilla.

    The controlled ``U_C = u1^dagger u2 u1 u2'`` is built from controlled
    evolution ``u1`` and controlled single-qubit gates; the correlator is
    ``<sigma_x> + i <sigma_y>`` of the ancilla, which equals
    ``<Psi|U_{1,2}(t)|Psi>``.
    """
    _check_ground(ground)
    W = _evolution(req.params, req.t, req.mode, req.trotter_n)
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    psi = np.kron(hadamard @ np.array([1, 0], dtype=complex), ground.amplitudes)
    u1 = controlled(W)
    u1_dag = controlled(W.conj().T)
    psi = controlled(_first_gate(req.which)) @ psi
    psi = u1 @ psi
    psi = controlled(Q1) @ psi
    psi = u1_dag @ psi
    final = QuantumState(5, psi)
    sx = expectation(final, embed(PAULI["X"], 1, 5)).real
    sy = expectation(final, embed(PAULI["Y"], 1, 5)).real
    return complex(sx, sy)


def direct_correlation(req: CorrelatorRequest, ground: QuantumState) -> complex:
    """``<Psi| W^dagger q1 W q |Psi>`` evaluated on the 4-qubit register."""
    _check_ground(ground)
    W = _evolution(req.params, req.t, req.mode, req.trotter_n)
    psi = ground.amplitudes
    right = W @ (_first_gate(req.which) @ psi)
    left = W @ psi
    return complex(np.vdot(left, Q1 @ right))


def _forward(params, times, vectors, mode, trotter_n):
    if mode == "exact":
        return evolve_exact_batch(build_spin_hamiltonian(params), times, vectors)
    return _trotter_batch(params, times, trotter_n, vectors)


def _backward(params, times, vectors, mode, trotter_n):
    if mode == "exact":
        return evolve_exact_batch(build_spin_hamiltonian(params), -np.asarray(times), vectors)
    return _trotter_batch(params, times, trotter_n, vectors, adjoint=True)


def scattering_correlations(which: str, times, params: SiamParams, ground: QuantumState,
                            mode: str = "exact", trotter_n: int = 1) -> np.ndarray:
    """Vectorised scattering circuit over a time grid.

    Equivalent to calling :func:`scattering_correlation` per time: the
    controlled gates only touch the ancilla-``|1>`` half of the register, so
    the two halves are propagated separately.
    """
    _check_ground(ground)
    CorrelatorRequest(which, 0.0, params, mode, trotter_n)
    times = np.asarray(times, dtype=float)
    half = ground.amplitudes / np.sqrt(2)
    upper = np.broadcast_to(half, (times.size, 16))
    lower = np.broadcast_to(_first_gate(which) @ half, (times.size, 16))
    lower = _forward(params, times, lower, mode, trotter_n)
    lower = _backward(params, times, lower @ Q1.T, mode, trotter_n)
    # <sx> = 2 Re<upper|lower>, <sy> = 2 Im<upper|lower>
    overlap = np.einsum("ij,ij->i", upper.conj(), lower)
    sx = 2 * overlap.real
    sy = 2 * overlap.imag
    return sx + 1j * sy


def direct_correlations(which: str, times, params: SiamParams, ground: QuantumState,
                        mode: str = "exact", trotter_n: int = 1) -> np.ndarray:
    _check_ground(ground)
    times = np.asarray(times, dtype=float)
    psi = ground.amplitudes
    left = _forward(params, times, psi, mode, trotter_n)
    right = _forward(params, times, _first_gate(which) @ psi, mode, trotter_n)
    return np.einsum("ij,ij->i", left.conj(), right @ Q1.T)


def impurity_ground_state(params: SiamParams, source: str = "ed",
                          schedule: AspSchedule = AspSchedule()) -> QuantumState:
    if source == "ed":
        return ground_state_ed(build_spin_hamiltonian(params))[1]
    if source == "asp":
        return asp_evolve(params, schedule)[0]
    raise ValueError(f"ground-state source must be 'ed' or 'asp', got {source!r}")
