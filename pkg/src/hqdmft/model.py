"""Two-site Anderson impurity model in fermionic and qubit form.

Fermion modes are ordered (1dn, 2dn, 1up, 2up) on qubits 1..4, where site 1
is the impurity and site 2 the single bath site.  Occupied means qubit state
``|1>``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .qsim import PAULI, HamiltonianSum, PauliTerm, embed, pauli_decompose

N_QUBITS = 4
MODES = ("1dn", "2dn", "1up", "2up")

# sigma^- = |1><0| raises the occupation in the |1> = occupied convention
_LOWER_SPIN = (PAULI["X"] - 1j * PAULI["Y"]) / 2


@dataclass(frozen=True)
class SiamParams:
    """Interaction ``U``, chemical potential ``mu``, bath level ``eps`` and hybridisation ``V``."""

    U: float
    mu: float
    eps: float
    V: float

    def __post_init__(self):
        if self.U < 0:
            raise ValueError(f"U must be non-negative, got {self.U}")

    @classmethod
    def half_filled(cls, U: float, V: float) -> "SiamParams":
        return cls(U=float(U), mu=float(U) / 2, eps=0.0, V=float(V))

    @property
    def is_half_filled(self) -> bool:
        return abs(self.mu - self.U / 2) <= 1e-12 and abs(self.eps) <= 1e-12

    def with_V(self, V: float) -> "SiamParams":
        return replace(self, V=float(V))


@dataclass(frozen=True)
class FermionOps:
    """Dense creation/annihilation matrices keyed by mode name."""

    create: dict
    annihilate: dict

    @property
    def q1(self) -> np.ndarray:
        c = self.annihilate["1dn"]
        return c + c.conj().T

    @property
    def q2(self) -> np.ndarray:
        c = self.annihilate["1dn"]
        return 1j * (c - c.conj().T)

    def number(self, mode: str) -> np.ndarray:
        return self.create[mode] @ self.annihilate[mode]


@dataclass(frozen=True)
class BetheLattice:
    """Semicircular density of states of half-bandwidth ``2 * t_star``."""

    t_star: float = 1.0

    def dos(self, x):
        return bethe_dos(x, self)


def fermion_operators() -> FermionOps:
    """Jordan-Wigner strings ``c_k^dagger = Z_1 ... Z_{k-1} sigma^-_k``."""
    create, annihilate = {}, {}
    for k, mode in enumerate(MODES, start=1):
        op = embed(_LOWER_SPIN, k, N_QUBITS)
        for p in range(1, k):
            op = embed(PAULI["Z"], p, N_QUBITS) @ op
        create[mode] = op
        annihilate[mode] = op.conj().T
    return FermionOps(create, annihilate)


def _require_half_filling(params: SiamParams):
    if not params.is_half_filled:
        raise NotImplementedError(
            "the qubit Hamiltonian is only defined at half filling (mu = U/2, eps = 0); "
            f"got mu={params.mu}, eps={params.eps}, U={params.U}")


def build_spin_hamiltonian(params: SiamParams) -> HamiltonianSum:
    """``U/4 Z1 Z3 + V/2 (X1X2 + Y1Y2 + X3X4 + Y3Y4)``."""
    _require_half_filling(params)
    U, V = params.U, params.V
    return HamiltonianSum([
        PauliTerm(U / 4, "ZIZI"),
        PauliTerm(V / 2, "XXII"),
        PauliTerm(V / 2, "YYII"),
        PauliTerm(V / 2, "IIXX"),
        PauliTerm(V / 2, "IIYY"),
    ], N_QUBITS)


def fermionic_hamiltonian_matrix(params: SiamParams, ops: FermionOps | None = None) -> np.ndarray:
    ops = ops or fermion_operators()
    n = ops.number
    H = params.U * n("1dn") @ n("1up")
    H = H - params.mu * (n("1dn") + n("1up"))
    H = H + params.eps * (n("2dn") + n("2up"))
    for spin in ("dn", "up"):
        hop = ops.create["1" + spin] @ ops.annihilate["2" + spin]
        H = H + params.V * (hop + hop.conj().T)
    return H


def jordan_wigner(params: SiamParams):
    """Fermion operators and the fermionic Hamiltonian rewritten as Pauli strings.

    At half filling the result equals ``build_spin_hamiltonian(params)`` plus an
    identity term ``-U/4``.
    """
    ops = fermion_operators()
    return ops, pauli_decompose(fermionic_hamiltonian_matrix(params, ops))


def bethe_dos(x, lattice: BetheLattice = BetheLattice()):
    t2 = lattice.t_star ** 2
    x = np.asarray(x, dtype=float)
    inside = np.clip(4 * t2 - x ** 2, 0.0, None)
    out = np.sqrt(inside) / (2 * np.pi * t2)
    return out if out.ndim else float(out)


def _frequencies(grid) -> np.ndarray:
    return np.asarray(getattr(grid, "frequencies", grid), dtype=float)


def bare_g0_inv(grid, params: SiamParams) -> np.ndarray:
    """Inverse non-interacting impurity Green's function of the discrete bath.

    ``iw + mu - V**2 / (iw - eps)``, evaluated on the Matsubara frequencies of
    ``grid`` (a grid object or a plain array of ``w_n``).
    """
    iw = 1j * _frequencies(grid)
    denom = iw - params.eps
    if np.any(np.abs(denom) == 0):
        raise ZeroDivisionError("bath pole: i*w_n coincides with eps")
    return iw + params.mu - params.V ** 2 / denom


def weiss_inv(G, mu: float, grid) -> np.ndarray:
    """Bethe-lattice (t* = 1) Weiss field ``iw + mu - G(iw)``."""
    iw = 1j * _frequencies(grid)
    G = np.asarray(G, dtype=complex)
    if G.shape != iw.shape:
        raise ValueError(f"G has shape {G.shape}, grid has {iw.shape}")
    return iw + mu - G


def self_energy(g0_inv, g_inv) -> np.ndarray:
    g0_inv = np.asarray(g0_inv, dtype=complex)
    g_inv = np.asarray(g_inv, dtype=complex)
    if g0_inv.shape != g_inv.shape:
        raise ValueError(f"length mismatch: {g0_inv.shape} vs {g_inv.shape}")
    return g0_inv - g_inv
