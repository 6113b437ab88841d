"""Reference denoisers: linear PCA and kernel PCA with a learned pre-image map.

``KernelPCASL`` follows the common recipe also found in scikit-learn's
``KernelPCA(fit_inverse_transform=True)``: exact Gaussian-kernel PCA, then a
kernel ridge regression from the training codes back to the training inputs,
using the same kernel width on the latent space.
"""

import numpy as np
from scipy import linalg
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.metrics.pairwise import rbf_kernel
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    as_matrix,
    check_nonnegative_real,
    check_positive_int,
    check_positive_real,
)
from .exceptions import RankDeficiencyError
from .spectral import RANK_TOL, _fix_signs, _top_eigh, fit_projection_primal


class PCADenoiser(TransformerMixin, BaseEstimator):
    """Mean-centred linear PCA; ``denoise`` projects onto the top components.

    Attributes
    ----------
    mean_ : ndarray of shape (p,)
    components_ : ndarray of shape (d, p)
        Orthonormal rows, sign-fixed so the largest-magnitude entry is positive.
    eigenvalues_ : ndarray of shape (d,)
        Covariance eigenvalues (normalised by ``n``), descending.
    """

    def __init__(self, n_components=2):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = as_matrix(X)
        d = check_positive_int(self.n_components, "n_components")
        if d > min(X.shape):
            raise ValueError(f"n_components={d} exceeds min(n, p)={min(X.shape)}")
        proj = fit_projection_primal(X, d, centered=True)
        self.mean_ = proj.mean
        self.components_ = proj.P
        self.eigenvalues_ = proj.eigenvalues
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = as_matrix(X, n_cols=self.n_features_in_, allow_empty=True)
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z):
        check_is_fitted(self, "components_")
        Z = as_matrix(Z, name="Z", n_cols=self.components_.shape[0],
                      allow_empty=True)
        return Z @ self.components_ + self.mean_

    def denoise(self, X):
        return self.inverse_transform(self.transform(X))


class KernelPCASL(TransformerMixin, BaseEstimator):
    """Gaussian kernel PCA with a kernel-ridge pre-image regressor.

    Parameters
    ----------
    n_components : int, default=2
    gamma : float, default=1.0
        Width of ``exp(-gamma ||x - y||^2)``, used both for the input kernel
        and for the regression kernel on the codes.
    alpha : float, default=1.0
        Ridge strength of the pre-image regression.
    centered : bool, default=True
        Double-centre the Gram matrix.

    Attributes
    ----------
    X_fit_ : ndarray of shape (n, p)
        Training inputs, kept for the kernel evaluations (``O(n p)`` memory).
    alphas_ : ndarray of shape (n, d)
        Gram eigenvectors divided by the square root of their eigenvalues.
    eigenvalues_ : ndarray of shape (d,)
        Gram eigenvalues, descending.
    Z_fit_ : ndarray of shape (n, d)
        Training codes.
    dual_coef_ : ndarray of shape (n, p)
        Pre-image regression weights.
    """

    def __init__(self, n_components=2, gamma=1.0, alpha=1.0, centered=True):
        self.n_components = n_components
        self.gamma = gamma
        self.alpha = alpha
        self.centered = centered

    def _center(self, K):
        if not self.centered:
            return K
        return (K - self.K_fit_rows_ - K.mean(axis=1, keepdims=True)
                + self.K_fit_all_)

    def fit(self, X, y=None):
        X = as_matrix(X)
        d = check_positive_int(self.n_components, "n_components")
        gamma = check_positive_real(self.gamma, "gamma")
        alpha = check_nonnegative_real(self.alpha, "alpha")
        n = X.shape[0]
        if d > n:
            raise ValueError(f"n_components={d} exceeds n_samples={n}")
        K = rbf_kernel(X, X, gamma=gamma)
        self.K_fit_rows_ = K.mean(axis=0)
        self.K_fit_all_ = K.mean()
        Kc = self._center(K)
        mu, U = _top_eigh(Kc, d)
        top = mu[0]
        keep = mu > RANK_TOL * top if top > 0 else np.zeros(d, dtype=bool)
        if not keep.all():
            raise RankDeficiencyError(d, int(keep.sum()))
        U = _fix_signs(U.T).T
        self.X_fit_ = X
        self.eigenvalues_ = mu
        self.alphas_ = U / np.sqrt(mu)
        self.Z_fit_ = Kc @ self.alphas_
        Kz = rbf_kernel(self.Z_fit_, self.Z_fit_, gamma=gamma)
        Kz.flat[:: n + 1] += alpha
        try:
            self.dual_coef_ = linalg.solve(Kz, X, assume_a="pos")
        except linalg.LinAlgError:
            self.dual_coef_ = linalg.lstsq(Kz, X)[0]
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "alphas_")
        X = as_matrix(X, n_cols=self.n_features_in_, allow_empty=True)
        if X.shape[0] == 0:
            return np.empty((0, self.alphas_.shape[1]))
        K = rbf_kernel(X, self.X_fit_, gamma=self.gamma)
        return self._center(K) @ self.alphas_

    def inverse_transform(self, Z):
        check_is_fitted(self, "alphas_")
        Z = as_matrix(Z, name="Z", n_cols=self.alphas_.shape[1],
                      allow_empty=True)
        if Z.shape[0] == 0:
            return np.empty((0, self.n_features_in_))
        return rbf_kernel(Z, self.Z_fit_, gamma=self.gamma) @ self.dual_coef_

    def denoise(self, X):
        return self.inverse_transform(self.transform(X))


def pca_fit(X, d):
    return PCADenoiser(n_components=d).fit(X)


def pca_denoise(model, X):
    return model.denoise(X)


def kpca_sl_fit(X, d, gamma, lambda_sl, centered=True):
    return KernelPCASL(n_components=d, gamma=gamma, alpha=lambda_sl,
                       centered=centered).fit(X)


def kpca_sl_denoise(model, X):
    return model.denoise(X)
