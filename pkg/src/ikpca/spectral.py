"""PCA of feature-space data through the covariance (primal) or Gram (dual) matrix.

The covariance is ``B.T @ B / n`` with no mean removed unless ``centered`` is
set. The primal path costs ``O(r^2 n + r^3)`` and the dual path
``O(r n^2 + n^3)``, so ``"auto"`` picks the dual path when ``r > n``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ._validation import as_matrix, check_positive_int
from .exceptions import RankDeficiencyError

RANK_TOL = 1e-12
SOLVERS = ("auto", "primal", "dual")


@dataclass(frozen=True)
class Projection:
    """Top-``d`` eigenvectors (rows of ``P``) and eigenvalues of the covariance."""

    P: np.ndarray
    eigenvalues: np.ndarray
    mean: np.ndarray
    centered: bool
    solver: str = "primal"

    @property
    def d(self):
        return self.P.shape[0]

    @property
    def r(self):
        return self.P.shape[1]


def _fix_signs(vectors):
    """Flip each row so that its largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=1)
    signs = np.sign(vectors[np.arange(vectors.shape[0]), idx])
    signs[signs == 0] = 1.0
    return vectors * signs[:, None]


def _top_eigh(M, d):
    """Largest ``d`` eigenpairs of a symmetric matrix, in descending order."""
    m = M.shape[0]
    vals, vecs = linalg.eigh(M, subset_by_index=[m - d, m - 1])
    return vals[::-1], vecs[:, ::-1]


def _prepare(B, d, centered):
    B = as_matrix(B, name="B")
    d = check_positive_int(d, "d")
    n, r = B.shape
    if d > min(n, r):
        raise ValueError(f"d={d} exceeds min(n, r)={min(n, r)}")
    mean = B.mean(axis=0) if centered else np.zeros(r)
    return B - mean, d, mean


def fit_projection_primal(B, d, centered=False):
    """Eigendecompose the ``r x r`` feature covariance and keep ``d`` components."""
    Bc, d, mean = _prepare(B, d, centered)
    n = Bc.shape[0]
    vals, vecs = _top_eigh(Bc.T @ Bc / n, d)
    return Projection(_fix_signs(vecs.T), vals, mean, bool(centered), "primal")


def fit_projection_dual(B, d, centered=False):
    """Eigendecompose the ``n x n`` Gram matrix and lift its eigenvectors.

    An eigenvector ``u`` of ``K = B @ B.T`` with eigenvalue ``mu`` maps to the
    unit covariance eigenvector ``B.T @ u / sqrt(mu)`` with eigenvalue
    ``mu / n``. Raises :class:`RankDeficiencyError` when a requested
    component has ``mu`` below ``1e-12`` times the largest one.
    """
    Bc, d, mean = _prepare(B, d, centered)
    n = Bc.shape[0]
    mu, U = _top_eigh(Bc @ Bc.T, d)
    top = mu[0]
    keep = mu > RANK_TOL * top if top > 0 else np.zeros(d, dtype=bool)
    if not keep.all():
        raise RankDeficiencyError(d, int(keep.sum()))
    V = (Bc.T @ U) / np.sqrt(mu)
    return Projection(_fix_signs(V.T), mu / n, mean, bool(centered), "dual")


def fit_projection(B, d, centered=False, solver="auto"):
    """Fit a :class:`Projection`, choosing the cheaper path when ``solver="auto"``."""
    if solver not in SOLVERS:
        raise ValueError(f"solver must be one of {SOLVERS}, got {solver!r}")
    if solver == "auto":
        n, r = np.shape(B)
        solver = "dual" if r > n else "primal"
    if solver == "dual":
        return fit_projection_dual(B, d, centered)
    return fit_projection_primal(B, d, centered)


def project(proj, B):
    """Latent codes ``(B - mean) @ P.T``."""
    B = as_matrix(B, name="B", n_cols=proj.r, allow_empty=True)
    return (B - proj.mean) @ proj.P.T


def reconstruct_features(proj, Z):
    """Map codes back to feature space: ``Z @ P + mean``."""
    Z = as_matrix(Z, name="Z", n_cols=proj.d, allow_empty=True)
    return Z @ proj.P + proj.mean
