"""Dataset generators, loaders and seeded noise/split helpers.

USPS text format: one image per line, the digit label first and then 256
pixel values in row-major order, separated by commas or whitespace. Pixels
are rescaled to ``[0, 1]`` on load (``[-1, 1]`` and ``0..255`` sources are
recognised). The common ``usps.h5``/``usps.bz2`` distributions convert with
one ``np.savetxt`` call, see :func:`save_usps`.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import as_matrix, check_nonnegative_real, check_positive_int, check_seed
from .exceptions import FormatError

USPS_SIDE = 16
USPS_PIXELS = USPS_SIDE * USPS_SIDE


@dataclass
class LabeledDataset:
    X: np.ndarray
    labels: np.ndarray = field(default_factory=lambda: np.empty(0))
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = as_matrix(self.X, allow_empty=True)
        self.labels = np.asarray(self.labels)
        if self.labels.size and self.labels.shape[0] != self.X.shape[0]:
            raise ValueError("labels must be empty or have one entry per row")

    def __len__(self):
        return self.X.shape[0]

    def subset(self, idx, name=None):
        labels = self.labels[idx] if self.labels.size else self.labels
        return LabeledDataset(self.X[idx], labels, name or self.name,
                              dict(self.meta))


def gen_scurve(n, sigma=0.0, seed=0):
    """Sample the 3-D s-curve and a noisy copy; labels hold the curve parameter t.

    Returns ``(clean, noisy)``.
    """
    n = check_positive_int(n, "n")
    sigma = check_nonnegative_real(sigma, "sigma")
    rng = np.random.default_rng(check_seed(seed))
    t = rng.uniform(-1.5 * np.pi, 1.5 * np.pi, size=n)
    x2 = rng.uniform(0.0, 2.0, size=n)
    sign = np.where(t >= 0, 1.0, -1.0)
    X = np.column_stack([np.sin(t), x2, sign * (np.cos(t) - 1.0)])
    noise = rng.normal(0.0, 1.0, size=X.shape)
    meta = {"seed": seed, "sigma": sigma}
    clean = LabeledDataset(X, t, "scurve", dict(meta, sigma=0.0))
    noisy = LabeledDataset(X + sigma * noise, t, "scurve-noisy", meta)
    return clean, noisy


def add_gaussian_noise(X, sigma, seed=0):
    """``X + N(0, sigma^2)`` element-wise, without clipping."""
    X = np.asarray(X, dtype=np.float64)
    sigma = check_nonnegative_real(sigma, "sigma")
    rng = np.random.default_rng(check_seed(seed))
    return X + sigma * rng.standard_normal(X.shape)


def train_test_split(ds, n_train, n_test, seed=0):
    """Disjoint random subsets of ``n_train`` and ``n_test`` rows."""
    n_train = check_positive_int(n_train, "n_train")
    n_test = check_positive_int(n_test, "n_test")
    if n_train + n_test > len(ds):
        raise ValueError(
            f"cannot draw {n_train} + {n_test} rows from a dataset of {len(ds)}"
        )
    perm = np.random.default_rng(check_seed(seed)).permutation(len(ds))
    return (ds.subset(perm[:n_train], ds.name + "-train"),
            ds.subset(perm[n_train:n_train + n_test], ds.name + "-test"))


_SPLIT = re.compile(r"[,\s]+")


def _rescale_pixels(X):
    if X.size == 0:
        return X
    if X.max() > 1.0:
        return X / 255.0
    if X.min() < 0.0:
        return (X + 1.0) / 2.0
    return X


def load_usps(path):
    """Read a USPS text file into a :class:`LabeledDataset` with pixels in [0, 1]."""
    path = Path(path)
    labels, rows = [], []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = _SPLIT.split(line)
            if len(fields) != USPS_PIXELS + 1:
                raise FormatError(
                    f"{path}:{lineno}: expected {USPS_PIXELS + 1} fields "
                    f"(label + pixels), got {len(fields)}"
                )
            try:
                values = [float(v) for v in fields]
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
            labels.append(int(round(values[0])))
            rows.append(values[1:])
    X = np.array(rows, dtype=np.float64).reshape(-1, USPS_PIXELS)
    if not np.all(np.isfinite(X)):
        raise FormatError(f"{path}: non-finite pixel values")
    return LabeledDataset(_rescale_pixels(X), np.array(labels, dtype=int),
                          "usps", {"source": str(path)})


def save_usps(ds, path):
    """Write ``ds`` in the USPS text format (label, then pixels; comma-separated)."""
    labels = ds.labels if ds.labels.size else np.zeros(len(ds))
    table = np.column_stack([labels, ds.X])
    fmt = ["%d"] + ["%.17g"] * ds.X.shape[1]
    np.savetxt(path, table, fmt=fmt, delimiter=",")


def _arc(cx, cy, rx, ry, t0, t1, n=40):
    t = np.radians(np.linspace(t0, t1, n))
    return np.column_stack([cx + rx * np.cos(t), cy + ry * np.sin(t)])


def _line(*pts, n=20):
    pts = np.asarray(pts, dtype=float)
    segs = [np.linspace(a, b, n) for a, b in zip(pts[:-1], pts[1:])]
    return np.vstack(segs)


# stroke skeletons in [-1, 1]^2 with y pointing down
_DIGITS = {
    0: [_arc(0, 0, 0.55, 0.85, 0, 360)],
    1: [_line((0, -0.85), (0, 0.85)), _line((-0.3, -0.55), (0, -0.85))],
    2: [_arc(0, -0.4, 0.48, 0.45, 190, 380),
        _line((0.42, -0.2), (-0.5, 0.85), (0.55, 0.85))],
    3: [_arc(0, -0.42, 0.45, 0.42, -160, 90),
        _arc(0, 0.42, 0.5, 0.43, -90, 160)],
    4: [_line((0.2, -0.85), (-0.55, 0.3), (0.6, 0.3)),
        _line((0.25, -0.3), (0.25, 0.85))],
    5: [_line((0.5, -0.85), (-0.4, -0.85), (-0.45, -0.1)),
        _arc(0, 0.35, 0.5, 0.5, -130, 150)],
    6: [_line((0.35, -0.85), (-0.3, -0.25), (-0.48, 0.35)),
        _arc(0, 0.4, 0.47, 0.45, 0, 360)],
    7: [_line((-0.55, -0.85), (0.55, -0.85), (-0.1, 0.85))],
    8: [_arc(0, -0.45, 0.4, 0.4, 0, 360), _arc(0, 0.42, 0.48, 0.43, 0, 360)],
    9: [_arc(0, -0.4, 0.45, 0.42, 0, 360), _line((0.45, -0.4), (0.3, 0.85))],
}


def _render(points, width):
    grid = (np.arange(USPS_SIDE) + 0.5) / USPS_SIDE * 2.0 - 1.0
    gx, gy = np.meshgrid(grid, grid)
    d2 = ((gx.ravel()[:, None] - points[:, 0]) ** 2
          + (gy.ravel()[:, None] - points[:, 1]) ** 2)
    return np.exp(-d2.min(axis=1) / (2.0 * width**2))


def make_usps_surrogate(n, seed=0):
    """Synthetic 16x16 handwritten-digit-like images with pixels in [0, 1].

    Each image is a digit stroke skeleton under a random affine jitter
    (rotation, scale, shear, shift) and stroke width, rendered with a Gaussian
    pen. Used by the USPS experiments when no USPS file is supplied.
    """
    n = check_positive_int(n, "n")
    rng = np.random.default_rng(check_seed(seed))
    labels = rng.integers(0, 10, size=n)
    X = np.empty((n, USPS_PIXELS))
    for i, label in enumerate(labels):
        pts = np.vstack(_DIGITS[int(label)])
        angle = rng.uniform(-0.25, 0.25)
        scale = rng.uniform(0.6, 0.78, size=2)
        shear = rng.uniform(-0.25, 0.25)
        rot = np.array([[np.cos(angle), -np.sin(angle)],
                        [np.sin(angle), np.cos(angle)]])
        A = rot @ np.array([[1.0, shear], [0.0, 1.0]]) @ np.diag(scale)
        pts = pts @ A.T + rng.uniform(-0.08, 0.08, size=2)
        X[i] = _render(pts, width=rng.uniform(0.07, 0.13))
    return LabeledDataset(X, labels, "usps-surrogate", {"seed": seed})
