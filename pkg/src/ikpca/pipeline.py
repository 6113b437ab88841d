"""Invertible kernel PCA.

Compression runs three steps on each sample ``x``::

    a = W x + b          # random Fourier pre-activation
    beta = sigma(a)      # feature vector
    z = P beta           # PCA code

and reconstruction undoes them one at a time: ``beta_hat = P.T z``, then the
activation is inverted on its injective subdomain using the bypass term
carried with the code, then ``x_hat`` solves the ridge problem
``min ||W x + b - a_hat||^2 + alpha ||x||^2`` through a single SVD of ``W``.

The bypass is computed from each encoded sample, so an encoded batch holds
``r`` extra values per row besides its ``d``-dimensional code.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    as_matrix,
    check_nonnegative_real,
    check_positive_int,
    check_positive_real,
)
from .features import (
    BYPASS_MODES,
    _check_activation,
    _resolve_seed,
    activate,
    bypass,
    invert_activation,
    pre_activation,
    sample_feature_map,
)
from .spectral import SOLVERS, fit_projection, project, reconstruct_features

SVD_RANK_TOL = 1e-12


@dataclass(frozen=True)
class EncodedBatch:
    """Latent codes ``Z`` (n, d) and per-sample bypass terms ``A_bar`` (n, r)."""

    Z: np.ndarray
    A_bar: np.ndarray

    def __post_init__(self):
        if self.Z.shape[0] != self.A_bar.shape[0]:
            raise ValueError("Z and A_bar must have the same number of rows")

    def __len__(self):
        return self.Z.shape[0]


@dataclass(frozen=True)
class RidgeInverter:
    """Thin SVD ``W = U diag(S) V.T`` plus the offset ``b`` and ridge strength."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    b: np.ndarray
    alpha: float

    @classmethod
    def from_weights(cls, W, b, alpha):
        alpha = check_nonnegative_real(alpha, "alpha")
        U, S, Vt = np.linalg.svd(np.asarray(W, dtype=np.float64),
                                 full_matrices=False)
        return cls(U, S, Vt.T, np.asarray(b, dtype=np.float64), alpha)

    @property
    def r(self):
        return self.U.shape[0]

    @property
    def p(self):
        return self.V.shape[0]

    def filter_factors(self):
        """``s / (s^2 + alpha)``, with tiny singular values zeroed when alpha is 0."""
        S = self.S
        if self.alpha > 0:
            return S / (S**2 + self.alpha)
        out = np.zeros_like(S)
        if S.size and S[0] > 0:
            ok = S >= SVD_RANK_TOL * S[0]
            out[ok] = 1.0 / S[ok]
        return out


def ridge_invert(inv, A_hat):
    """Solve ``min_x ||W x + b - a||^2 + alpha ||x||^2`` for every row ``a``.

    With ``alpha = 0`` this is the minimum-norm pseudo-inverse solution
    ``pinv(W) @ (a - b)``.
    """
    A_hat = as_matrix(A_hat, name="A_hat", n_cols=inv.r, allow_empty=True)
    return ((A_hat - inv.b) @ inv.U) * inv.filter_factors() @ inv.V.T


class InvertibleKernelPCA(TransformerMixin, BaseEstimator):
    """Kernel PCA with random Fourier features and an explicit inverse map.

    Parameters
    ----------
    n_components : int, default=2
        Number of principal components ``d``.
    n_features : int, default=500
        Number of random features ``r``.
    gamma : float, default=0.5
        Width of the Gaussian kernel ``exp(-gamma ||x - y||^2)`` being
        approximated.
    alpha : float, default=1.0
        Ridge strength of the final inversion step; 0 gives the pseudo-inverse.
    activation : {"sin", "relu"}, default="sin"
    centered : bool, default=False
        Subtract the feature mean before PCA.
    solver : {"auto", "primal", "dual"}, default="auto"
        Covariance or Gram eigendecomposition; "auto" uses the dual when
        ``n_features > n_samples``.
    bypass : {"branch", "residual"}, default="branch"
        How the non-invertible part of the sine activation is carried, see
        :func:`ikpca.features.bypass`.
    random_state : int, Generator or None
        Seed of the feature map.

    Attributes
    ----------
    feature_map_ : FeatureMap
    projection_ : Projection
    inverter_ : RidgeInverter
    solver_ : str
        The eigendecomposition path actually used.
    """

    def __init__(self, n_components=2, n_features=500, gamma=0.5, alpha=1.0,
                 activation="sin", centered=False, solver="auto",
                 bypass="branch", random_state=None):
        self.n_components = n_components
        self.n_features = n_features
        self.gamma = gamma
        self.alpha = alpha
        self.activation = activation
        self.centered = centered
        self.solver = solver
        self.bypass = bypass
        self.random_state = random_state

    def _validate_params(self):
        d = check_positive_int(self.n_components, "n_components")
        r = check_positive_int(self.n_features, "n_features")
        check_positive_real(self.gamma, "gamma")
        check_nonnegative_real(self.alpha, "alpha")
        _check_activation(self.activation)
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")
        if self.bypass not in BYPASS_MODES:
            raise ValueError(f"bypass must be one of {BYPASS_MODES}")
        if d > r:
            raise ValueError(f"n_components={d} exceeds n_features={r}")

    def fit(self, X, y=None):
        self._validate_params()
        X = as_matrix(X)
        n, p = X.shape
        if self.n_components > min(n, self.n_features):
            raise ValueError(
                f"n_components={self.n_components} exceeds "
                f"min(n_samples, n_features)={min(n, self.n_features)}"
            )
        self.seed_ = _resolve_seed(self.random_state)
        fm = sample_feature_map(p, self.n_features, self.gamma,
                                self.activation, self.seed_)
        B = activate(fm, pre_activation(fm, X))
        self.projection_ = fit_projection(B, self.n_components, self.centered,
                                          self.solver)
        self.feature_map_ = fm
        self.inverter_ = RidgeInverter.from_weights(fm.W, fm.b, self.alpha)
        self.solver_ = self.projection_.solver
        self.n_features_in_ = p
        return self

    def encode(self, X):
        """Codes and bypass terms for ``X``."""
        check_is_fitted(self, "projection_")
        A = pre_activation(self.feature_map_, X)
        parts = bypass(self.feature_map_, A, self.bypass)
        Z = project(self.projection_, activate(self.feature_map_, A))
        return EncodedBatch(Z, parts.bypass)

    def transform(self, X):
        return self.encode(X).Z

    def decode(self, encoded, return_report=False):
        """Reconstruct inputs from an :class:`EncodedBatch`.

        With ``return_report=True`` also returns the
        :class:`~ikpca.features.ClampReport` of the activation inversion.
        """
        check_is_fitted(self, "projection_")
        B_hat = reconstruct_features(self.projection_, encoded.Z)
        A_hat, report = invert_activation(self.feature_map_, B_hat,
                                          encoded.A_bar, self.bypass,
                                          return_report=True)
        X_hat = ridge_invert(self.inverter_, A_hat)
        return (X_hat, report) if return_report else X_hat

    def inverse_transform(self, Z, A_bar=None):
        """Reconstruct from codes alone, with a zero bypass unless one is given."""
        check_is_fitted(self, "projection_")
        Z = as_matrix(Z, name="Z", n_cols=self.projection_.d, allow_empty=True)
        if A_bar is None:
            A_bar = np.zeros((Z.shape[0], self.projection_.r))
        return self.decode(EncodedBatch(Z, as_matrix(A_bar, "A_bar",
                                                     allow_empty=True)))

    def denoise(self, X, return_report=False):
        """``decode(encode(X))``."""
        return self.decode(self.encode(X), return_report=return_report)
