"""Random Fourier feature maps and subdomain inversion of their activation.

Samples are rows throughout: a batch ``X`` has shape ``(n, p)`` and the
pre-activations ``A = X @ W.T + b`` have shape ``(n, r)``.

For the Gaussian kernel ``k(x, y) = exp(-gamma * ||x - y||^2)`` the frequency
matrix ``W`` has i.i.d. ``N(0, 2 * gamma)`` entries and the phases ``b`` are
uniform on ``(-pi, pi]``, so that ``mean(2 * sin(W x + b) * sin(W y + b))``
is an unbiased estimate of ``k(x, y)``.
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    as_matrix,
    as_vector,
    check_positive_int,
    check_positive_real,
    check_seed,
)

ACTIVATIONS = ("sin", "relu")
BYPASS_MODES = ("branch", "residual")

SQRT2 = np.sqrt(2.0)


def _check_activation(activation):
    if activation not in ACTIVATIONS:
        raise ValueError(
            f"activation must be one of {ACTIVATIONS}, got {activation!r}"
        )
    return activation


def _check_mode(mode):
    if mode not in BYPASS_MODES:
        raise ValueError(f"mode must be one of {BYPASS_MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """Seeded random feature map ``x -> activation(W x + b)``.

    ``W`` and ``b`` are regenerated from ``(p, r, gamma, seed)``; two maps
    built from the same parameters are bit-identical. The arrays are
    read-only so a map can be shared freely.
    """

    p: int
    r: int
    gamma: float
    activation: str = "sin"
    seed: int = 0
    W: np.ndarray = field(init=False, repr=False)
    b: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = check_positive_int(self.p, "p")
        r = check_positive_int(self.r, "r")
        gamma = check_positive_real(self.gamma, "gamma")
        _check_activation(self.activation)
        seed = check_seed(self.seed)
        rng = np.random.default_rng(seed)
        W = rng.normal(0.0, np.sqrt(2.0 * gamma), size=(r, p))
        # uniform on [0, 2pi) mapped to (-pi, pi]
        b = np.pi - rng.uniform(0.0, 2.0 * np.pi, size=r)
        W.flags.writeable = False
        b.flags.writeable = False
        for name, value in (("p", p), ("r", r), ("gamma", gamma),
                            ("seed", seed), ("W", W), ("b", b)):
            object.__setattr__(self, name, value)

    def params(self):
        """The parameters that fully determine this map."""
        return {"p": self.p, "r": self.r, "gamma": self.gamma,
                "activation": self.activation, "seed": self.seed}

    def __eq__(self, other):
        if not isinstance(other, FeatureMap):
            return NotImplemented
        return self.params() == other.params()

    def __hash__(self):
        return hash(tuple(self.params().values()))


@dataclass(frozen=True)
class ActivationDecomposition:
    """Split of pre-activations into an invertible part and a bypass term.

    ``invertible_part + bypass`` reproduces the pre-activations.
    """

    invertible_part: np.ndarray
    bypass: np.ndarray


@dataclass(frozen=True)
class ClampReport:
    """How often activation inversion had to clamp out-of-range values."""

    n_clamped: int
    n_entries: int
    max_overshoot: float

    @property
    def rate(self):
        return self.n_clamped / self.n_entries if self.n_entries else 0.0


def sample_feature_map(p, r, gamma, activation="sin", seed=0):
    """Draw a :class:`FeatureMap`; raises ``ValueError`` on bad parameters."""
    return FeatureMap(p=p, r=r, gamma=gamma, activation=activation, seed=seed)


def pre_activation(fm, X):
    """Return ``X @ W.T + b``."""
    X = as_matrix(X, n_cols=fm.p, allow_empty=True)
    return X @ fm.W.T + fm.b


def activate(fm, A):
    """Apply the map's activation element-wise.

    The sine path carries the ``sqrt(2)`` factor of the Fourier feature
    construction; ReLU is the plain ``max(A, 0)``.
    """
    A = as_matrix(A, name="A", allow_empty=True)
    if fm.activation == "sin":
        return SQRT2 * np.sin(A)
    return np.maximum(A, 0.0)


def _sin_branch(A):
    # k such that A - k*pi lies in (-pi/2, pi/2]
    return np.ceil(A / np.pi - 0.5)


def bypass(fm, A, mode="branch"):
    """Decompose pre-activations into an invertible part and a bypass.

    For ReLU both modes give ``invertible_part = max(A, 0)`` and
    ``bypass = min(A, 0)``.

    For sine, ``mode="residual"`` uses ``invertible_part = arcsin(sin(A))``
    and ``bypass = A - arcsin(sin(A))``. On odd branches that bypass equals
    ``2*A - k*pi`` and carries the input itself, so reconstruction cannot
    remove noise from those coordinates.

    ``mode="branch"`` (the default) writes ``A = k*pi + u`` with
    ``u in (-pi/2, pi/2]`` and bypasses only the branch offset ``k*pi``. The
    sign ``(-1)**k`` relating ``sin(A)`` to ``sin(u)`` is recovered from the
    bypass during inversion, so the bypass holds no continuous information
    about the sample.
    """
    A = as_matrix(A, name="A", allow_empty=True)
    _check_mode(mode)
    if fm.activation == "relu":
        return ActivationDecomposition(np.maximum(A, 0.0), np.minimum(A, 0.0))
    if mode == "residual":
        inv = np.arcsin(np.sin(A))
        return ActivationDecomposition(inv, A - inv)
    offset = _sin_branch(A) * np.pi
    return ActivationDecomposition(A - offset, offset)


def invert_activation(fm, B_hat, A_bar, mode="branch", return_report=False):
    """Map (possibly approximate) activations back to pre-activations.

    Values outside the activation's range are clamped first (``|B/sqrt2| > 1``
    for sine, negative values for ReLU); the number of clamped entries and the
    largest overshoot are returned in a :class:`ClampReport` when
    ``return_report`` is true.
    """
    B_hat = as_matrix(B_hat, name="B_hat", allow_empty=True)
    A_bar = as_matrix(A_bar, name="A_bar", allow_empty=True)
    if B_hat.shape != A_bar.shape:
        raise ValueError(
            f"B_hat shape {B_hat.shape} differs from A_bar shape {A_bar.shape}"
        )
    _check_mode(mode)
    if fm.activation == "sin":
        s = B_hat / SQRT2
        overshoot = np.abs(s) - 1.0
        u = np.arcsin(np.clip(s, -1.0, 1.0))
        if mode == "branch":
            parity = np.rint(A_bar / np.pi) % 2
            u = np.where(parity == 1, -u, u)
        out = u + A_bar
    else:
        overshoot = -B_hat
        out = np.maximum(B_hat, 0.0) + A_bar
    if not return_report:
        return out
    clamped = overshoot > 0
    report = ClampReport(
        n_clamped=int(clamped.sum()),
        n_entries=int(clamped.size),
        max_overshoot=float(overshoot[clamped].max()) if clamped.any() else 0.0,
    )
    return out, report


def kernel_exact(x, y, gamma):
    """Gaussian kernel ``exp(-gamma * ||x - y||^2)``."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.shape != y.shape:
        raise ValueError(f"x has length {x.size} but y has length {y.size}")
    gamma = check_positive_real(gamma, "gamma")
    diff = x - y
    return float(np.exp(-gamma * diff @ diff))


def kernel_approx(fm, x, y):
    """Random-feature estimate ``<Phi(x), Phi(y)> / r`` of the Gaussian kernel."""
    if fm.activation != "sin":
        raise ValueError("kernel_approx is only defined for the sine feature map")
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.shape != y.shape:
        raise ValueError(f"x has length {x.size} but y has length {y.size}")
    phi = activate(fm, pre_activation(fm, np.vstack([x, y])))
    return float(phi[0] @ phi[1] / fm.r)


class RandomFourierFeatures(TransformerMixin, BaseEstimator):
    """Transformer wrapper around :class:`FeatureMap`.

    ``transform`` returns ``activation(X @ W.T + b)`` without the ``1/sqrt(r)``
    normalisation, matching the features the invertible pipeline works with.
    """

    def __init__(self, n_components=100, gamma=1.0, activation="sin",
                 random_state=None):
        self.n_components = n_components
        self.gamma = gamma
        self.activation = activation
        self.random_state = random_state

    def fit(self, X, y=None):
        X = as_matrix(X)
        seed = _resolve_seed(self.random_state)
        self.feature_map_ = sample_feature_map(
            X.shape[1], self.n_components, self.gamma, self.activation, seed
        )
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "feature_map_")
        fm = self.feature_map_
        return activate(fm, pre_activation(fm, X))


def _resolve_seed(random_state):
    """Turn an sklearn-style ``random_state`` into a concrete uint64 seed."""
    if random_state is None:
        return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    if isinstance(random_state, np.random.Generator):
        return int(random_state.integers(0, 2**63))
    return check_seed(random_state, "random_state")
