"""Line-selective pseudo-pure-state preparation on a deviation density matrix.

The sequence is thermal -> SP1 -> gradient -> SP2 -> gradient, where SP1
depletes bit-complement pairs and SP2 spreads the all-ones population.  Spin ``k`` in basis state ``b`` carries magnetization
``m_k = +1/2`` for bit ``0`` and ``-1/2`` for bit ``1``; the gradient keeps
only matrix elements whose weighted order ``sum_k w_k (m_k(i) - m_k(j))``
vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError
from .qsim import DensityOperator, basis_label, two_level_rotation

ORDER_TOL = 1e-12
PPS_TOL = 1e-12
GAMMA_F_OVER_H = 0.9407


@dataclass(frozen=True)
class SpinLayout:
    n_qubits: int
    species: tuple
    gamma_ratio: tuple

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ValueError(f"need at least 2 qubits, got {self.n_qubits}")
        if len(self.species) != self.n_qubits or len(self.gamma_ratio) != self.n_qubits:
            raise DimensionError("species and gamma_ratio must have one entry per qubit")
        if any(w <= 0 for w in self.gamma_ratio):
            raise ValueError("gyromagnetic weights must be positive")
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "gamma_ratio", tuple(float(w) for w in self.gamma_ratio))

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def name(self) -> str:
        return "".join(self.species)

    @classmethod
    def from_species(cls, species: str, weights: dict) -> "SpinLayout":
        return cls(len(species), tuple(species), tuple(weights[s] for s in species))

    @classmethod
    def fffhh(cls, r: float = GAMMA_F_OVER_H) -> "SpinLayout":
        return cls.from_species("FFFHH", {"F": r, "H": 1.0})

    @classmethod
    def aaaa(cls) -> "SpinLayout":
        return cls.from_species("AAAA", {"A": 1.0})

    @classmethod
    def abbb(cls, ratio: float = 2.0) -> "SpinLayout":
        return cls.from_species("ABBB", {"A": ratio, "B": 1.0})

    @classmethod
    def aabb(cls, ratio: float = 2.0) -> "SpinLayout":
        return cls.from_species("AABB", {"A": ratio, "B": 1.0})

    @classmethod
    def named(cls, name: str) -> "SpinLayout":
        factories = {"FFFHH": cls.fffhh, "AAAA": cls.aaaa, "ABBB": cls.abbb, "AABB": cls.aabb}
        try:
            return factories[name.upper()]()
        except KeyError:
            raise ValueError(f"unknown layout {name!r}; choose from {sorted(factories)}") from None

    def magnetization(self) -> np.ndarray:
        """Weighted magnetization ``sum_k w_k m_k`` of every basis state."""
        idx = np.arange(self.dim)
        shifts = np.arange(self.n_qubits - 1, -1, -1)
        bits = (idx[:, None] >> shifts[None, :]) & 1
        return (0.5 - bits) @ np.asarray(self.gamma_ratio)


@dataclass(frozen=True)
class CoherenceElement:
    i: int
    j: int
    order: float


def coherence_order(layout: SpinLayout, i: int, j: int) -> CoherenceElement:
    m = layout.magnetization()
    return CoherenceElement(i, j, float(m[i] - m[j]))


def order_matrix(layout: SpinLayout) -> np.ndarray:
    m = layout.magnetization()
    return m[:, None] - m[None, :]


def complement(index: int, n_qubits: int) -> int:
    return (2 ** n_qubits - 1) ^ index


def _require_diagonal(rho: DensityOperator, stage: str):
    off = rho.matrix - np.diag(rho.matrix.diagonal())
    if np.max(np.abs(off), initial=0.0) > PPS_TOL:
        raise ValueError(f"{stage} requires a diagonal input state")


def thermal_deviation(layout: SpinLayout) -> DensityOperator:
    """``sum_k w_k Z_k``: twice the weighted magnetization on the diagonal."""
    return DensityOperator(layout.n_qubits, np.diag(2.0 * layout.magnetization()).astype(complex))


def sp1_deplete(rho: DensityOperator, layout: SpinLayout) -> DensityOperator:
    _require_diagonal(rho, "SP1")
    n = layout.n_qubits
    out = rho
    for s in range(1, layout.dim // 2):
        out = out.conjugate_by(two_level_rotation(layout.dim, s, complement(s, n), np.pi / 2))
    return out


def gradient_dephase(rho: DensityOperator, layout: SpinLayout) -> DensityOperator:
    keep = np.abs(order_matrix(layout)) <= ORDER_TOL
    return DensityOperator(rho.n_qubits, np.where(keep, rho.matrix, 0.0))


def sp2_angles(n_qubits: int) -> np.ndarray:
    k = np.arange(2 ** n_qubits - 1, 1, -1)
    return 2 * np.arcsin(np.sqrt(1.0 / k))


def sp2_redistribute(rho: DensityOperator, layout: SpinLayout) -> DensityOperator:
    """Spread the all-ones population evenly over every state but all-zeros."""
    _require_diagonal(rho, "SP2")
    ones = layout.dim - 1
    out = rho
    for target, theta in zip(range(1, ones), sp2_angles(layout.n_qubits)):
        out = out.conjugate_by(two_level_rotation(layout.dim, target, ones, theta))
    return out


@dataclass(frozen=True)
class PpsReport:
    is_pps: bool
    background: float
    signal: float
    max_offdiag: float
    max_background_spread: float


def verify_pps(rho: DensityOperator) -> PpsReport:
    pops = rho.populations()
    rest = pops[1:]
    off = rho.matrix - np.diag(rho.matrix.diagonal())
    max_off = float(np.max(np.abs(off), initial=0.0))
    spread = float(np.ptp(rest))
    background = float(np.mean(rest))
    return PpsReport(
        is_pps=max_off <= PPS_TOL and spread <= PPS_TOL,
        background=background,
        signal=float(pops[0] - background),
        max_offdiag=max_off,
        max_background_spread=spread,
    )


def prepare_pps(layout: SpinLayout) -> dict:
    """Run the full sequence and return every intermediate state by stage name."""
    stages = {"thermal": thermal_deviation(layout)}
    stages["sp1"] = sp1_deplete(stages["thermal"], layout)
    stages["gz1"] = gradient_dephase(stages["sp1"], layout)
    stages["sp2"] = sp2_redistribute(stages["gz1"], layout)
    stages["gz2"] = gradient_dephase(stages["sp2"], layout)
    return stages


def population_table(stages: dict, layout: SpinLayout) -> list[tuple[str, ...]]:
    header = ("state",) + tuple(stages)
    rows = [header]
    for idx in range(layout.dim):
        rows.append((basis_label(idx, layout.n_qubits),)
                    + tuple(f"{st.populations()[idx]:.12g}" for st in stages.values()))
    return rows
