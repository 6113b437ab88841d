"""Seeded denoising experiments and their result tables.

Every seed redraws the noise, the feature map and (for USPS and ECG) the
train/test split; within a seed all methods and all sweep values see the
same data. Results are aggregated as mean and standard deviation (``ddof=0``)
of the per-seed test MSE.

CSV schema (version 1), one row per (sweep value, method), columns in
:data:`COLUMNS` order with reals written to 17 significant digits. The
``wall_time_s`` column is appended only when timing output is requested,
because it would otherwise break byte-for-byte reproducibility. The JSON
format holds the same rows under ``{"schema_version", "columns", "rows"}``.
"""

import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from joblib import Parallel, delayed

from .baselines import KernelPCASL, PCADenoiser
from .datasets import (
    LabeledDataset,
    add_gaussian_noise,
    gen_scurve,
    load_usps,
    make_usps_surrogate,
    train_test_split,
)
from .ecg import (
    detect_rpeaks,
    extract_beats,
    highpass_baseline,
    load_ecg,
    mean_beat,
    synthetic_ecg,
)
from .pipeline import InvertibleKernelPCA

SCHEMA_VERSION = 1
EXPERIMENTS = ("scurve", "usps", "ecg")
METHODS = ("pca", "kpca-sl", "ikpca")
SWEEPABLE = {
    "components": int,
    "gamma": float,
    "lambda": float,
    "features": int,
    "noise-sigma": float,
    "train-size": int,
    "test-size": int,
    "kpca-gamma": float,
    "kpca-lambda": float,
}
COLUMNS = (
    "experiment", "method", "sweep_param", "sweep_value", "components",
    "gamma", "lambda", "features", "noise_sigma", "train_size", "test_size",
    "n_seeds", "n_failed", "mse_mean", "mse_std", "noisy_mse_mean",
    "clamp_rate", "error",
)
TIMING_COLUMN = "wall_time_s"

# default settings for each experiment; the ECG noise level only applies to the
# synthetic record used when no data file is given
PRESETS = {
    "scurve": dict(components=2, gamma=0.5, lam=1.0, features=500,
                   noise_sigma=0.25, train_size=2000, test_size=2000,
                   kpca_gamma=1.0, kpca_lambda=1.0),
    "usps": dict(components=8, gamma=1e-4, lam=1.0, features=5000,
                 noise_sigma=0.5, train_size=1000, test_size=400,
                 kpca_gamma=5e-3, kpca_lambda=1e-2),
    "ecg": dict(components=1, gamma=5e-5, lam=10.0, features=512,
                noise_sigma=0.02, train_size=49, test_size=21,
                kpca_gamma=10.0, kpca_lambda=15.0),
}

# synthetic stand-in for a CPSC lead: 75 s at 60 bpm gives 72 interior beats
SYNTHETIC_ECG = dict(duration_s=75.0, fs=500.0, heart_rate=60.0,
                     rr_jitter=0.03, amplitude_jitter=0.05, wander=0.2)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    methods: tuple = METHODS
    components: int = 2
    gamma: float = 0.5
    lam: float = 1.0
    features: int = 500
    noise_sigma: float = 0.25
    train_size: int = 2000
    test_size: int = 2000
    seeds: tuple = tuple(range(20))
    kpca_gamma: float = None
    kpca_lambda: float = None
    centered: bool = False
    data: str = None
    data_seed: int = 0
    sweep: tuple = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")
        methods = tuple(self.methods)
        bad = [m for m in methods if m not in METHODS]
        if bad or not methods:
            raise ValueError(f"methods must be a non-empty subset of {METHODS}")
        object.__setattr__(self, "methods", methods)
        seeds = tuple(int(s) for s in self.seeds)
        if not seeds:
            raise ValueError("at least one seed is required")
        object.__setattr__(self, "seeds", seeds)
        if self.sweep is not None:
            name, values = self.sweep
            if name not in SWEEPABLE:
                raise ValueError(
                    f"cannot sweep {name!r}; choose from {sorted(SWEEPABLE)}"
                )
            values = tuple(SWEEPABLE[name](v) for v in values)
            if not values:
                raise ValueError("sweep needs at least one value")
            object.__setattr__(self, "sweep", (name, values))

    @classmethod
    def preset(cls, experiment, **overrides):
        """Config with the preset settings for ``experiment``, then overrides."""
        if experiment not in PRESETS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")
        values = dict(PRESETS[experiment])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(experiment=experiment, **values)

    def with_value(self, name, value):
        return replace(self, **{_FIELD[name]: value})


_FIELD = {name: name.replace("-", "_") for name in SWEEPABLE}
_FIELD["lambda"] = "lam"


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return [row[name] for row in self.rows]

    def select(self, **criteria):
        return [row for row in self.rows
                if all(row[k] == v for k, v in criteria.items())]


def mse(X_hat, X_ref):
    """Mean squared error over all entries."""
    X_hat = np.asarray(X_hat, dtype=np.float64)
    X_ref = np.asarray(X_ref, dtype=np.float64)
    if X_hat.shape != X_ref.shape:
        raise ValueError(f"shape mismatch: {X_hat.shape} vs {X_ref.shape}")
    if X_hat.size == 0:
        raise ValueError("mse of an empty matrix is undefined")
    return float(np.mean((X_hat - X_ref) ** 2))


def _child_seeds(seed, n):
    seq = np.random.SeedSequence(seed)
    return [int(s) for s in seq.generate_state(n, dtype=np.uint64)]


@lru_cache(maxsize=8)
def _usps_pool(path, n, data_seed):
    if path:
        return load_usps(path)
    return make_usps_surrogate(n, seed=data_seed)


@lru_cache(maxsize=8)
def _ecg_beats(path, noise_sigma, data_seed):
    if path:
        rec = load_ecg(path)
    else:
        rec, _ = synthetic_ecg(noise_sigma=noise_sigma, seed=data_seed,
                               **SYNTHETIC_ECG)
    rec = highpass_baseline(rec)
    return extract_beats(rec, detect_rpeaks(rec)).beats


def make_trial(cfg, seed):
    """Noisy train set, noisy test set and clean test reference for one seed."""
    s_split, s_train, s_test = _child_seeds(seed, 3)
    if cfg.experiment == "scurve":
        _, train = gen_scurve(cfg.train_size, cfg.noise_sigma, s_train)
        clean, test = gen_scurve(cfg.test_size, cfg.noise_sigma, s_test)
        return train.X, test.X, clean.X
    if cfg.experiment == "usps":
        pool = _usps_pool(cfg.data, cfg.train_size + cfg.test_size,
                          cfg.data_seed)
        train, test = train_test_split(pool, cfg.train_size, cfg.test_size,
                                       s_split)
        return (add_gaussian_noise(train.X, cfg.noise_sigma, s_train),
                add_gaussian_noise(test.X, cfg.noise_sigma, s_test), test.X)
    beats = _ecg_beats(cfg.data, cfg.noise_sigma, cfg.data_seed)
    train, test = train_test_split(LabeledDataset(beats), cfg.train_size,
                                   cfg.test_size, s_split)
    reference = np.broadcast_to(mean_beat(train.X), test.X.shape)
    return train.X, test.X, reference


def build_method(cfg, method, seed):
    if method == "pca":
        return PCADenoiser(cfg.components)
    if method == "kpca-sl":
        return KernelPCASL(
            cfg.components,
            gamma=cfg.gamma if cfg.kpca_gamma is None else cfg.kpca_gamma,
            alpha=cfg.lam if cfg.kpca_lambda is None else cfg.kpca_lambda,
        )
    return InvertibleKernelPCA(cfg.components, cfg.features, cfg.gamma,
                               cfg.lam, centered=cfg.centered,
                               random_state=_child_seeds(seed, 4)[3])


def _run_seed(cfgs, seed):
    """Score every (config, method) pair on one seed's data."""
    out = []
    trial_cache = {}
    for cfg in cfgs:
        key = (cfg.train_size, cfg.test_size, cfg.noise_sigma)
        if key not in trial_cache:
            trial_cache[key] = make_trial(cfg, seed)
        train, test, reference = trial_cache[key]
        noisy = mse(test, reference)
        for method in cfg.methods:
            start = time.perf_counter()
            try:
                model = build_method(cfg, method, seed).fit(train)
                if method == "ikpca":
                    X_hat, report = model.denoise(test, return_report=True)
                    clamp = report.rate
                else:
                    X_hat, clamp = model.denoise(test), math.nan
                result = (mse(X_hat, reference), clamp, None)
            except (ValueError, np.linalg.LinAlgError) as exc:
                result = (math.nan, math.nan, f"seed {seed}: {exc}")
            out.append(result + (noisy, time.perf_counter() - start))
    return out


def _config_columns(cfg, method):
    if method == "kpca-sl":
        gamma = cfg.gamma if cfg.kpca_gamma is None else cfg.kpca_gamma
        lam = cfg.lam if cfg.kpca_lambda is None else cfg.kpca_lambda
    else:
        gamma, lam = cfg.gamma, cfg.lam
    return {
        "experiment": cfg.experiment,
        "method": method,
        "components": cfg.components,
        "gamma": gamma if method != "pca" else math.nan,
        "lambda": lam if method != "pca" else math.nan,
        "features": cfg.features if method == "ikpca" else None,
        "noise_sigma": cfg.noise_sigma,
        "train_size": cfg.train_size,
        "test_size": cfg.test_size,
    }


def run_experiment(cfg, n_jobs=1):
    """Run every seed of ``cfg`` (and every sweep value) and aggregate the MSEs."""
    if cfg.sweep is None:
        sweep_name, cfgs, values = None, [cfg], [None]
    else:
        sweep_name, values = cfg.sweep
        cfgs = [cfg.with_value(sweep_name, v) for v in values]
    per_seed = Parallel(n_jobs=n_jobs)(
        delayed(_run_seed)(cfgs, seed) for seed in cfg.seeds
    )
    table = ResultTable()
    k = 0
    for sub, value in zip(cfgs, values):
        for method in sub.methods:
            results = [seed_results[k] for seed_results in per_seed]
            k += 1
            errs = np.array([r[0] for r in results])
            ok = ~np.isnan(errs)
            clamps = np.array([r[1] for r in results])
            failures = [r[2] for r in results if r[2]]
            row = _config_columns(sub, method)
            row.update({
                "sweep_param": sweep_name,
                "sweep_value": value,
                "n_seeds": len(results),
                "n_failed": int((~ok).sum()),
                "mse_mean": float(errs[ok].mean()) if ok.any() else math.nan,
                "mse_std": float(errs[ok].std()) if ok.any() else math.nan,
                "noisy_mse_mean": float(np.mean([r[3] for r in results])),
                "clamp_rate": (float(np.nanmean(clamps))
                               if method == "ikpca" and ok.any() else math.nan),
                "error": failures[0] if failures else None,
                TIMING_COLUMN: float(sum(r[4] for r in results)),
            })
            table.rows.append(row)
    return table


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.17g}"
    return str(value)


def _json_cell(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def format_results(table, fmt="csv", include_timing=False):
    columns = COLUMNS + ((TIMING_COLUMN,) if include_timing else ())
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in table.rows:
            writer.writerow([_csv_cell(row[c]) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "columns": list(columns),
            "rows": [{c: _json_cell(row[c]) for c in columns}
                     for row in table.rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def emit_results(table, path, fmt="csv", include_timing=False):
    """Write ``table`` to ``path`` (``"-"`` for stdout)."""
    text = format_results(table, fmt, include_timing)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
