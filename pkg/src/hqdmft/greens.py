"""Green's functions from real-time impurity correlators.

Particle and hole functions are ``G^{p,h}(t) = (O1(t) +/- O2(t)) / 2``.  Both
frequency transforms integrate ``G^p(t) + conj(G^h(t))`` with the trapezoidal
rule on a uniform time grid:

    G(w)    = -i int exp(i (w + i eta) t) [...] dt
    G(i w_n) = -i int exp(-(eta + w_n) t) [...] dt
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import SiamParams, build_spin_hamiltonian, fermion_operators
from .qsim import eigh_hermitian
from .solver import AspSchedule, GAP_TOL, impurity_ground_state, scattering_correlations
from .exceptions import DegeneracyError

_CHUNK = 64


class TruncationWarning(UserWarning):
    """The time grid ends before the integrand has decayed."""


@dataclass(frozen=True)
class TimeGrid:
    t_start: float = 0.0
    dt: float = 0.02
    t_max: float = 200.0

    def __post_init__(self):
        if self.dt <= 0 or self.t_max <= self.t_start:
            raise ValueError(f"invalid time grid {self}")

    @property
    def times(self) -> np.ndarray:
        n = int(round((self.t_max - self.t_start) / self.dt))
        return self.t_start + self.dt * np.arange(n + 1)

    def truncated(self, decay: float, tol: float = 1e-13) -> "TimeGrid":
        """Shorten the window to where ``exp(-decay * t)`` drops below ``tol``."""
        if decay <= 0:
            return self
        t_cut = self.t_start + np.ceil(-np.log(tol) / decay / self.dt) * self.dt
        return self if t_cut >= self.t_max else TimeGrid(self.t_start, self.dt, float(t_cut))


@dataclass(frozen=True)
class MatsubaraGrid:
    """Fermionic frequencies ``w_n = (2n + 1) pi / beta`` for ``n < n_max``."""

    beta: float = 200.0
    n_max: int = 2

    def __post_init__(self):
        if self.beta <= 0 or self.n_max < 1:
            raise ValueError(f"invalid Matsubara grid {self}")

    @property
    def frequencies(self) -> np.ndarray:
        return (2 * np.arange(self.n_max) + 1) * np.pi / self.beta


def default_omega_grid(w_min: float = -6.0, w_max: float = 6.0, step: float = 0.01) -> np.ndarray:
    n = int(round((w_max - w_min) / step))
    return np.linspace(w_min, w_max, n + 1)


@dataclass(frozen=True)
class GreensSeries:
    times: np.ndarray
    gp: np.ndarray
    gh: np.ndarray

    @property
    def kernel(self) -> np.ndarray:
        return self.gp + np.conj(self.gh)


@dataclass(frozen=True)
class GreensSpectrum:
    """Green's function sampled on a real (``kind="real"``) or Matsubara axis."""

    axis: np.ndarray
    values: np.ndarray
    eta: float
    kind: str = "real"


def greens_from_correlators(o1, o2, times=None) -> GreensSeries:
    o1 = np.asarray(o1, dtype=complex)
    o2 = np.asarray(o2, dtype=complex)
    if o1.shape != o2.shape:
        raise ValueError(f"length mismatch: {o1.shape} vs {o2.shape}")
    if times is None:
        times = np.arange(o1.size, dtype=float)
    return GreensSeries(np.asarray(times, dtype=float), (o1 + o2) / 2, (o1 - o2) / 2)


def _trapezoid_weights(times: np.ndarray) -> np.ndarray:
    dt = np.diff(times)
    w = np.zeros_like(times)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    return w


def _laplace(series: GreensSeries, z: np.ndarray) -> np.ndarray:
    """``-i sum_j w_j exp(i z t_j) K(t_j)`` for each complex ``z``."""
    t = series.times
    weighted = _trapezoid_weights(t) * series.kernel
    out = np.empty(z.size, dtype=complex)
    for start in range(0, z.size, _CHUNK):
        zz = z[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.exp(1j * np.outer(zz, t)) @ weighted
    return -1j * out


def green_realfreq(series: GreensSeries, omega_grid, eta: float = 0.1) -> GreensSpectrum:
    if eta <= 0:
        raise ValueError(f"real-axis transform diverges without damping: eta={eta}")
    omega = np.asarray(omega_grid, dtype=float)
    return GreensSpectrum(omega, _laplace(series, omega + 1j * eta), eta, "real")


def green_matsubara(series: GreensSeries, grid: MatsubaraGrid, eta: float = 0.3) -> GreensSpectrum:
    if eta < 0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    w = grid.frequencies
    decay = eta + w[0]
    span = series.times[-1] - series.times[0]
    bound = np.exp(-decay * span)
    if bound >= 1e-8:
        warnings.warn(
            f"time grid truncates the Matsubara integral: exp(-(eta + w0) t_max) = {bound:.3e}",
            TruncationWarning, stacklevel=2)
    return GreensSpectrum(w, _laplace(series, 1j * (w + eta)), eta, "matsubara")


def spectral_density(spec: GreensSpectrum) -> np.ndarray:
    if spec.kind != "real":
        raise ValueError("spectral density needs a real-frequency Green's function")
    return -np.asarray(spec.values).imag / np.pi


def impurity_series(params: SiamParams, time_grid: TimeGrid = TimeGrid(), mode: str = "exact",
                    trotter_n: int = 1, ground_state: str = "ed",
                    schedule: AspSchedule = AspSchedule(), ground=None) -> GreensSeries:
    """Measure O1 and O2 on the time grid through the scattering circuit."""
    if ground is None:
        ground = impurity_ground_state(params, ground_state, schedule)
    t = time_grid.times
    o1 = scattering_correlations("O1", t, params, ground, mode, trotter_n)
    o2 = scattering_correlations("O2", t, params, ground, mode, trotter_n)
    return greens_from_correlators(o1, o2, t)


def lehmann_poles(params: SiamParams):
    """Excitation energies and weights of the impurity Green's function.

    Built from an exact eigendecomposition and the fermionic ``c_1``; particle
    poles sit at ``E_m - E_0`` and hole poles at ``E_0 - E_m``.
    """
    energies, vecs = eigh_hermitian(build_spin_hamiltonian(params).matrix())
    if energies[1] - energies[0] <= GAP_TOL:
        raise DegeneracyError("Lehmann sum needs a non-degenerate ground state")
    c = fermion_operators().annihilate["1dn"]
    gs = vecs[:, 0]
    particle = np.abs(vecs.conj().T @ (c.conj().T @ gs)) ** 2
    hole = np.abs(vecs.conj().T @ (c @ gs)) ** 2
    excitation = energies - energies[0]
    poles = np.concatenate([excitation, -excitation])
    weights = np.concatenate([particle, hole])
    keep = weights > 1e-14
    return poles[keep], weights[keep]


def lehmann_oracle(params: SiamParams, eta: float, axis, kind: str = "real") -> GreensSpectrum:
    poles, weights = lehmann_poles(params)
    axis = np.asarray(getattr(axis, "frequencies", axis), dtype=float)
    if kind == "real":
        z = axis + 1j * eta
    elif kind == "matsubara":
        z = 1j * (axis + eta)
    else:
        raise ValueError(f"kind must be 'real' or 'matsubara', got {kind!r}")
    values = (weights[:, None] / (z[None, :] - poles[:, None])).sum(axis=0)
    return GreensSpectrum(axis, values, eta, kind)


def local_maxima(values) -> np.ndarray:
    """Indices of strict interior local maxima."""
    v = np.asarray(values)
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    return np.flatnonzero(inner) + 1
