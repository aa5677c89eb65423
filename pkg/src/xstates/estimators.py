"""scikit-learn style wrappers over the row form ``(n, 8)`` of X-states.

Columns are ``d1, d2, d3, d4, c14re, c14im, c23re, c23im``. Nothing is learned:
``fit`` only records the input width, so the wrappers can sit inside a
:class:`sklearn.pipeline.Pipeline` next to ordinary feature steps.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._tolerances import DEFAULT_TOLERANCES, Tolerances
from .orbits import KIND_BY_CODE, classify_rows, diagonalize_rows
from .separability import (
    elementwise_slacks_rows,
    pt_min_eigenvalue_rows,
    spectrum_angle_slacks,
)
from .state import validate_rows

__all__ = ["XStateDiagonalizer", "OrbitTypeClassifier", "PPTSeparabilityClassifier"]

_N_FEATURES = 8
_LABELS = np.array([k.value for k in KIND_BY_CODE], dtype=object)


def _tolerances(structural, band) -> Tolerances:
    return DEFAULT_TOLERANCES.with_overrides(structural=structural, band=band)


class _XStateRows(BaseEstimator):
    """Shared validation: finite ``(n, 8)`` rows that are valid density matrices."""

    def __init__(self, tol_structural=None, tol_band=None):
        self.tol_structural = tol_structural
        self.tol_band = tol_band

    def _check_rows(self, X, reset: bool):
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        if X.shape[1] != _N_FEATURES:
            raise ValueError(f"expected {_N_FEATURES} columns (X-state row form), got {X.shape[1]}")
        if reset:
            self.n_features_in_ = _N_FEATURES
        else:
            check_is_fitted(self, "n_features_in_")
        bad = np.flatnonzero(~validate_rows(X, self._tol()))
        if bad.size:
            raise ValueError(f"rows {bad[:10].tolist()} are not valid X-state density matrices")
        return X

    def _tol(self) -> Tolerances:
        return _tolerances(self.tol_structural, self.tol_band)

    def fit(self, X, y=None):
        self._check_rows(X, reset=True)
        return self


class XStateDiagonalizer(TransformerMixin, _XStateRows):
    """Map rows to ``r1, r2, r3, r4, phi1, psi1, phi2, psi2``."""

    def transform(self, X):
        X = self._check_rows(X, reset=False)
        spectra, angles = diagonalize_rows(X)
        return np.column_stack([spectra, angles])

    def get_feature_names_out(self, input_features=None):
        return np.array(["r1", "r2", "r3", "r4", "phi1", "psi1", "phi2", "psi2"], dtype=object)


class OrbitTypeClassifier(ClassifierMixin, _XStateRows):
    """Predict the orbit kind label (``"Generic4D"`` etc.) of each row.

    ``route="mu"`` uses the Gram invariants, ``route="spectrum"`` the block
    eigenvalue gaps.
    """

    def __init__(self, route="mu", tol_structural=None, tol_band=None):
        super().__init__(tol_structural, tol_band)
        self.route = route

    def predict(self, X):
        X = self._check_rows(X, reset=False)
        if self.route not in ("mu", "spectrum"):
            raise ValueError(f"route must be 'mu' or 'spectrum', got {self.route!r}")
        codes, _ = classify_rows(X, self._tol(), route=self.route)
        return _LABELS[codes]

    def predict_marginal(self, X):
        """Boolean mask of rows whose degeneracy verdict sits inside the band."""
        X = self._check_rows(X, reset=False)
        if self.route not in ("mu", "spectrum"):
            raise ValueError(f"route must be 'mu' or 'spectrum', got {self.route!r}")
        return classify_rows(X, self._tol(), route=self.route)[1]


class PPTSeparabilityClassifier(ClassifierMixin, _XStateRows):
    """Predict PPT separability (1 separable, 0 entangled).

    ``method`` picks the route: ``"elementwise"`` (entry products),
    ``"oracle"`` (dense partial transpose) or ``"inequalities"`` (spectrum
    and chart angles). ``decision_function`` returns the smallest slack, or
    the smallest partial-transpose eigenvalue for the oracle; it is
    non-negative exactly for separable rows, up to the band.
    """

    _METHODS = ("elementwise", "oracle", "inequalities")

    def __init__(self, method="elementwise", tol_structural=None, tol_band=None):
        super().__init__(tol_structural, tol_band)
        self.method = method

    def decision_function(self, X):
        X = self._check_rows(X, reset=False)
        if self.method == "elementwise":
            return elementwise_slacks_rows(X).min(axis=1)
        if self.method == "oracle":
            return pt_min_eigenvalue_rows(X)
        if self.method == "inequalities":
            spectra, angles = diagonalize_rows(X)
            return spectrum_angle_slacks(spectra, angles[:, 0], angles[:, 2]).min(axis=1)
        raise ValueError(f"method must be one of {self._METHODS}, got {self.method!r}")

    def predict(self, X):
        return (self.decision_function(X) >= -self._tol().band).astype(int)
