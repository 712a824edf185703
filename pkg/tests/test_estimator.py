import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hqdmft import DMFTSolver


def test_params_roundtrip():
    est = DMFTSolver(U=2.0, n_max=3)
    params = est.get_params()
    assert params["U"] == 2.0 and params["n_max"] == 3
    assert clone(est).set_params(U=0.5).U == 0.5


def test_unfitted_predict():
    with pytest.raises(NotFittedError):
        DMFTSolver().predict([0.0])


def test_fit_predict_score():
    est = DMFTSolver(U=0.0).fit()
    assert est.converged_ and abs(est.V_ - 0.171) <= 0.06
    assert est.n_iter_ == len(est.trace_)
    A = est.predict(np.linspace(-1, 1, 201))
    assert A.shape == (201,) and np.all(A > 0)
    assert est.score() <= 0
    assert est.saturation_.window == 5


def test_predict_validates_input():
    est = DMFTSolver(U=0.0, max_iters=2).fit()
    with pytest.raises(ValueError):
        est.predict([np.nan])
