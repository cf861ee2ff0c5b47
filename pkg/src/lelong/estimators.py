"""Scikit-learn style facade over the flat-limit pipeline."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import DimensionMismatch
from .families import MetricFamily
from .filtration import DEFAULT_CLUSTER_TOL, build_filtration
from .flow import flat_limit
from .tailfit import FitConfig


def _as_direction_matrix(U, n: int) -> np.ndarray:
    arr = np.asarray(U, dtype=complex)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise DimensionMismatch(f"expected rows of length {n}, got shape {arr.shape}")
    return arr


class JumpingNumberEstimator(BaseEstimator):
    """Fit the flat limit of a metric family; predict growth exponents.

    Parameters follow the sklearn convention: constructor stores them
    verbatim, ``fit`` computes ``alphas_``, ``flat_`` and
    ``filtration_``.
    """

    def __init__(self, cluster_tol: float = DEFAULT_CLUSTER_TOL, fit_tol: float = 1e-3, window_frac: float = 0.5):
        self.cluster_tol = cluster_tol
        self.fit_tol = fit_tol
        self.window_frac = window_frac

    def fit(self, X: MetricFamily, y=None):
        if not isinstance(X, MetricFamily):
            raise TypeError("X must be a MetricFamily")
        cfg = FitConfig(window_frac=self.window_frac, tol=self.fit_tol)
        self.flat_ = flat_limit(X, cfg)
        self.filtration_ = build_filtration(self.flat_, self.cluster_tol)
        self.alphas_ = self.filtration_.jumps
        self.n_features_in_ = X.n
        return self

    def _check_fitted(self):
        if not hasattr(self, "flat_"):
            raise NotFittedError("call fit before transform/predict")

    def transform(self, U) -> np.ndarray:
        """Coefficients of each row in the flat h(0)-orthonormal basis."""
        self._check_fitted()
        arr = _as_direction_matrix(U, self.n_features_in_)
        h0 = self.flat_.base_form.matrix
        return arr @ (h0 @ self.flat_.basis).conj()

    def predict(self, U) -> np.ndarray:
        """alpha(u) for each row: the largest exponent with a nonzero coefficient."""
        self._check_fitted()
        coeffs = self.transform(U)
        exps = self.flat_.exponents
        scale = np.linalg.norm(coeffs, axis=1, keepdims=True)
        active = np.abs(coeffs) > 1e-10 * np.maximum(scale, 1e-300)
        out = np.empty(coeffs.shape[0])
        for i, row in enumerate(active):
            idx = np.nonzero(row)[0]
            out[i] = exps[idx[-1]] if idx.size else exps[0]
        return out
