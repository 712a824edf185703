"""Estimator-style wrapper around the self-consistency loop."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .dmft import DmftConfig, dmft_iterate, evaluate_f, saturation_estimate, spectrum_at
from .greens import MatsubaraGrid, TimeGrid
from .model import SiamParams
from .solver import AspSchedule


class DMFTSolver(BaseEstimator):
    """Fit the bath coupling ``V`` for a fixed interaction ``U``.

    ``fit`` ignores its arguments; the problem is fully set by the
    hyperparameters.  ``predict(omega)`` returns the impurity spectral
    density at the fitted coupling.
    """

    def __init__(self, U: float = 1.0, V0: float = 0.5, delta_V: float = 0.05,
                 beta: float = 200.0, n_max: int = 2, eta_matsubara: float = 0.3,
                 eta_real: float = 0.1, dt: float = 0.02, t_max: float = 200.0,
                 mode: str = "exact", trotter_n: int = 1, ground_state: str = "ed",
                 asp_T: float = 4.0, asp_M: int = 50, max_iters: int = 100,
                 tol_f: float = 1e-6, max_step: float = 0.1, window: int = 5):
        self.U = U
        self.V0 = V0
        self.delta_V = delta_V
        self.beta = beta
        self.n_max = n_max
        self.eta_matsubara = eta_matsubara
        self.eta_real = eta_real
        self.dt = dt
        self.t_max = t_max
        self.mode = mode
        self.trotter_n = trotter_n
        self.ground_state = ground_state
        self.asp_T = asp_T
        self.asp_M = asp_M
        self.max_iters = max_iters
        self.tol_f = tol_f
        self.max_step = max_step
        self.window = window

    def _config(self) -> DmftConfig:
        return DmftConfig(
            params=SiamParams.half_filled(self.U, self.V0), V0=self.V0, delta_V=self.delta_V,
            grid=MatsubaraGrid(self.beta, self.n_max), eta_matsubara=self.eta_matsubara,
            time_grid=TimeGrid(0.0, self.dt, self.t_max), mode=self.mode,
            trotter_n=self.trotter_n, ground_state=self.ground_state,
            schedule=AspSchedule(self.asp_T, self.asp_M), max_iters=self.max_iters,
            tol_f=self.tol_f, max_step=self.max_step,
        )

    def fit(self, X=None, y=None):
        config = self._config()
        trace = dmft_iterate(config)
        self.config_ = config
        self.trace_ = trace
        self.V_ = trace.final_V
        self.converged_ = trace.converged
        self.n_iter_ = len(trace)
        self.saturation_ = saturation_estimate(trace, min(self.window, len(trace)))
        return self

    def predict(self, omega) -> np.ndarray:
        check_is_fitted(self, "V_")
        omega = check_array(omega, ensure_2d=False, dtype=float).ravel()
        return spectrum_at(self.V_, self.config_, omega, self.eta_real)[1]

    def score(self, X=None, y=None) -> float:
        """Negative cost at the fitted coupling; larger is better."""
        check_is_fitted(self, "V_")
        return -evaluate_f(self.V_, self.config_)
