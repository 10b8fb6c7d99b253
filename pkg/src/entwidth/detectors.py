"""Width witnesses with a scikit-learn estimator interface.

Each witness turns one criterion into a classifier over pure states: ``X`` is
an array of state vectors, one per row. ``fit`` computes the bound (it
ignores the states), ``decision_function`` returns the signed slack
(negative means the bound is beaten) and ``predict`` returns 1 for states
certified to have entanglement width above the tested hypothesis.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .chi_criteria import chi, chi_classical_bound
from .gradient_sdp import b_squared_operator, j_squared_operator, sdp_intercept
from .reports import VIOLATION_TOL
from .spin_ops import ChainGeometry
from .variance_criteria import state_variance, width_bound_matching, width_bound_simple


def check_states(X, n: int, atol: float = 1e-8) -> np.ndarray:
    """Validate a 2-D array of normalized state vectors on ``n`` qubits."""
    X = np.asarray(X, dtype=complex)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != 2**n:
        raise ValueError(f"expected shape (n_samples, {2**n}), got {np.shape(X)}")
    if not np.all(np.isfinite(X)):
        raise ValueError("states contain NaN or inf")
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1) > atol):
        raise ValueError("every state must have unit norm")
    return X


class _Witness(ClassifierMixin, BaseEstimator):
    def _scores(self, X) -> np.ndarray:
        raise NotImplementedError

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "bound_")
        return self._scores(check_states(X, self.n))

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) < -self.tol).astype(int)


class VarianceWidthWitness(_Witness):
    """Variance of the position-weighted spin against the width-``width`` bound."""

    def __init__(self, n: int = 16, x0: float = -0.5, lambda_over_d: float = 32.0, width: int = 2,
                 method: str = "matching", tol: float = VIOLATION_TOL):
        self.n = n
        self.x0 = x0
        self.lambda_over_d = lambda_over_d
        self.width = width
        self.method = method
        self.tol = tol

    def fit(self, X=None, y=None):
        geometry = ChainGeometry(self.n, self.x0)
        if self.method == "matching":
            self.bound_ = width_bound_matching(geometry, self.lambda_over_d, self.width)
        elif self.method == "simple":
            self.bound_ = width_bound_simple(geometry, self.lambda_over_d, self.width)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.geometry_ = geometry
        self.classes_ = np.array([0, 1])
        return self

    def _scores(self, X):
        return np.array([state_variance(x, self.geometry_, self.lambda_over_d) for x in X]) - self.bound_


class ChiWidthWitness(_Witness):
    """Long-range correlation sum against the nearest-neighbour limit."""

    def __init__(self, n: int = 8, tol: float = VIOLATION_TOL):
        self.n = n
        self.tol = tol

    def fit(self, X=None, y=None):
        self.bound_ = chi_classical_bound(self.n)
        self.classes_ = np.array([0, 1])
        return self

    def _scores(self, X):
        return np.array([chi(x, self.n) for x in X]) - self.bound_


class GradientWidthWitness(_Witness):
    """``<B^2> <= intercept + slope <J^2>`` with the intercept certified by SDP.

    ``families`` lists cut sets; a state obeying any one family's PPT
    constraints satisfies the joint line, whose intercept is the largest.
    """

    def __init__(self, n: int = 4, slope: float = 10.0, families: Sequence[Sequence[int]] = ((2,),),
                 tol: float = VIOLATION_TOL):
        self.n = n
        self.slope = slope
        self.families = families
        self.tol = tol

    def fit(self, X=None, y=None):
        self.intercepts_ = [sdp_intercept(self.n, self.slope, f).intercept for f in self.families]
        self.bound_ = max(self.intercepts_)
        self.classes_ = np.array([0, 1])
        return self

    def _scores(self, X):
        j2 = np.einsum("si,ij,sj->s", X.conj(), j_squared_operator(self.n), X).real
        b2 = np.einsum("si,ij,sj->s", X.conj(), b_squared_operator(self.n), X).real
        return self.bound_ + self.slope * j2 - b2
