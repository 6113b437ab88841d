"""Small input-checking helpers shared by the estimators and functions."""

from numbers import Integral, Real

import numpy as np


def as_matrix(X, name="X", n_cols=None, allow_empty=False):
    """Return ``X`` as a finite float64 2-D array, checking its column count."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    if X.shape[0] == 0 and not allow_empty:
        raise ValueError(f"{name} has no rows")
    if n_cols is not None and X.shape[1] != n_cols:
        raise ValueError(
            f"{name} has {X.shape[1]} columns, expected {n_cols}"
        )
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return X


def as_vector(x, name="x"):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return x


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_positive_real(value, name):
    if isinstance(value, bool) or not isinstance(value, Real) or not value > 0:
        raise ValueError(f"{name} must be a positive real, got {value!r}")
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return float(value)


def check_nonnegative_real(value, name):
    if isinstance(value, bool) or not isinstance(value, Real) or not value >= 0:
        raise ValueError(f"{name} must be a non-negative real, got {value!r}")
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return float(value)


def check_seed(seed, name="seed"):
    if isinstance(seed, bool) or not isinstance(seed, Integral):
        raise ValueError(f"{name} must be an integer, got {seed!r}")
    if not 0 <= seed < 2**64:
        raise ValueError(f"{name} must fit in an unsigned 64-bit integer")
    return int(seed)
