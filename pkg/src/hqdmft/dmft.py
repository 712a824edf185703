"""Self-consistent determination of the bath coupling.

Each iteration measures the impurity Green's function at ``V`` and at
``V + delta_V``, forms the forward-difference gradient ``g`` of the Matsubara
cost and updates ``V <- V - g * delta_V``.  The raw step is clamped to
``+/- max_step``; the clamp is halved whenever the step direction reverses,
which turns the fixed learning rate into a convergent descent on steep costs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .greens import (
    MatsubaraGrid,
    TimeGrid,
    default_omega_grid,
    green_matsubara,
    green_realfreq,
    impurity_series,
    spectral_density,
)
from .model import SiamParams, bare_g0_inv, weiss_inv
from .solver import AspSchedule

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DmftConfig:
    params: SiamParams = field(default_factory=lambda: SiamParams.half_filled(1.0, 0.5))
    V0: float = 0.5
    delta_V: float = 0.05
    grid: MatsubaraGrid = MatsubaraGrid()
    eta_matsubara: float = 0.3
    time_grid: TimeGrid = TimeGrid()
    mode: str = "exact"
    trotter_n: int = 1
    ground_state: str = "ed"
    schedule: AspSchedule = AspSchedule()
    max_iters: int = 100
    tol_f: float = 1e-6
    V_min: float = 0.01
    V_max: float = 2.0
    max_step: float = 0.1

    def __post_init__(self):
        if not self.V_min <= self.V0 <= self.V_max:
            raise ValueError(f"V0={self.V0} outside [{self.V_min}, {self.V_max}]")
        if self.delta_V <= 0:
            raise ValueError(f"delta_V must be positive, got {self.delta_V}")
        if self.max_step <= 0:
            raise ValueError(f"max_step must be positive, got {self.max_step}")
        if self.mode not in ("exact", "trotter"):
            raise ValueError(f"mode must be 'exact' or 'trotter', got {self.mode!r}")

    @classmethod
    def for_U(cls, U: float, **kwargs) -> "DmftConfig":
        V0 = kwargs.get("V0", cls.V0)
        return cls(params=SiamParams.half_filled(U, V0), **kwargs)


@dataclass
class DmftIteration:
    k: int
    V: float
    f: float
    spectrum: Optional[np.ndarray] = None


@dataclass
class DmftTrace:
    iterations: list = field(default_factory=list)
    converged: bool = False

    @property
    def V(self) -> np.ndarray:
        return np.array([it.V for it in self.iterations])

    @property
    def f(self) -> np.ndarray:
        return np.array([it.f for it in self.iterations])

    @property
    def final_V(self) -> float:
        return self.iterations[-1].V

    def __len__(self):
        return len(self.iterations)


@dataclass(frozen=True)
class SaturationEstimate:
    mean_V: float
    std_V: float
    window: int


def cost(G, V: float, params: SiamParams, grid: MatsubaraGrid) -> float:
    """``sum_n |G~0^{-1}(iw_n) - G0^{-1}(iw_n)|**2``."""
    G = np.asarray(G, dtype=complex)
    if G.shape != grid.frequencies.shape:
        raise ValueError(f"G has {G.size} values, grid has {grid.n_max}")
    diff = weiss_inv(G, params.mu, grid) - bare_g0_inv(grid, params.with_V(V))
    return float(np.sum(np.abs(diff) ** 2))


def matsubara_green(V: float, config: DmftConfig) -> np.ndarray:
    params = config.params.with_V(V)
    times = config.time_grid.truncated(config.eta_matsubara + config.grid.frequencies[0])
    series = impurity_series(params, times, config.mode, config.trotter_n,
                             config.ground_state, config.schedule)
    return green_matsubara(series, config.grid, config.eta_matsubara).values


def evaluate_f(V: float, config: DmftConfig) -> float:
    """Full pipeline at one bath coupling: ground state, circuit, transforms, cost."""
    if not config.V_min <= V <= config.V_max + config.delta_V:
        raise ValueError(f"V={V} outside [{config.V_min}, {config.V_max}]")
    return cost(matsubara_green(V, config), V, config.params, config.grid)


def spectrum_at(V: float, config: DmftConfig, omega=None, eta: float = 0.1):
    omega = default_omega_grid() if omega is None else np.asarray(omega)
    params = config.params.with_V(V)
    series = impurity_series(params, config.time_grid, config.mode, config.trotter_n,
                             config.ground_state, config.schedule)
    return omega, spectral_density(green_realfreq(series, omega, eta))


def dmft_iterate(config: DmftConfig, callback: Callable[[DmftIteration], None] | None = None,
                 record_spectra: bool = False, omega=None) -> DmftTrace:
    trace = DmftTrace()
    V = float(config.V0)
    cap = config.max_step
    prev_step = 0.0
    f_prev = None
    for k in range(config.max_iters):
        f = evaluate_f(V, config)
        spectrum = spectrum_at(V, config, omega)[1] if record_spectra else None
        it = DmftIteration(k, V, f, spectrum)
        trace.iterations.append(it)
        if callback is not None:
            callback(it)
        log.debug("k=%d V=%.6f f=%.9g", k, V, f)
        if f_prev is not None and abs(f - f_prev) < config.tol_f:
            trace.converged = True
            break
        g = (evaluate_f(V + config.delta_V, config) - f) / config.delta_V
        step = -g * config.delta_V
        if step * prev_step < 0:
            cap /= 2
        step = float(np.clip(step, -cap, cap))
        V = float(np.clip(V + step, config.V_min, config.V_max))
        prev_step = step
        f_prev = f
    return trace


def saturation_estimate(trace: DmftTrace, window: int = 5) -> SaturationEstimate:
    """Mean and sample standard deviation of the last ``window`` couplings."""
    if window < 1 or window > len(trace):
        raise ValueError(f"window {window} does not fit a trace of length {len(trace)}")
    tail = trace.V[-window:]
    std = float(np.std(tail, ddof=1)) if window > 1 else 0.0
    return SaturationEstimate(float(np.mean(tail)), std, window)


def scan_minimizer(config: DmftConfig, V_values=None):
    """Brute-force minimiser of :func:`evaluate_f` over a dense coupling grid."""
    if V_values is None:
        V_values = np.round(np.arange(0.01, 1.0 + 1e-9, 0.005), 10)
    f_values = np.array([evaluate_f(V, config) for V in V_values])
    return float(V_values[np.argmin(f_values)]), np.asarray(V_values), f_values
