"""Invertible kernel PCA with random Fourier features, plus PCA and
kernel-PCA baselines and the s-curve, digit and ECG denoising experiments."""

from .baselines import KernelPCASL, PCADenoiser, kpca_sl_denoise, kpca_sl_fit, pca_denoise, pca_fit
from .datasets import (
    LabeledDataset,
    add_gaussian_noise,
    gen_scurve,
    load_usps,
    make_usps_surrogate,
    save_usps,
    train_test_split,
)
from .ecg import (
    BeatMatrix,
    EcgRecord,
    detect_rpeaks,
    extract_beats,
    highpass_baseline,
    load_ecg,
    mean_beat,
    save_ecg,
    synthetic_ecg,
)
from .exceptions import FormatError, InsufficientPeaksError, RankDeficiencyError
from .experiments import ExperimentConfig, ResultTable, format_results, mse, run_experiment
from .features import (
    ActivationDecomposition,
    ClampReport,
    FeatureMap,
    RandomFourierFeatures,
    activate,
    bypass,
    invert_activation,
    kernel_approx,
    kernel_exact,
    pre_activation,
    sample_feature_map,
)
from .persistence import load, save
from .pipeline import EncodedBatch, InvertibleKernelPCA, RidgeInverter, ridge_invert
from .spectral import (
    Projection,
    fit_projection,
    fit_projection_dual,
    fit_projection_primal,
    project,
    reconstruct_features,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationDecomposition",
    "BeatMatrix",
    "ClampReport",
    "EcgRecord",
    "EncodedBatch",
    "ExperimentConfig",
    "FeatureMap",
    "FormatError",
    "InsufficientPeaksError",
    "InvertibleKernelPCA",
    "KernelPCASL",
    "LabeledDataset",
    "PCADenoiser",
    "Projection",
    "RandomFourierFeatures",
    "RankDeficiencyError",
    "ResultTable",
    "RidgeInverter",
    "activate",
    "add_gaussian_noise",
    "bypass",
    "detect_rpeaks",
    "extract_beats",
    "fit_projection",
    "fit_projection_dual",
    "fit_projection_primal",
    "format_results",
    "gen_scurve",
    "highpass_baseline",
    "invert_activation",
    "kernel_approx",
    "kernel_exact",
    "kpca_sl_denoise",
    "kpca_sl_fit",
    "load",
    "load_ecg",
    "load_usps",
    "make_usps_surrogate",
    "mean_beat",
    "mse",
    "pca_denoise",
    "pca_fit",
    "pre_activation",
    "project",
    "reconstruct_features",
    "ridge_invert",
    "run_experiment",
    "sample_feature_map",
    "save",
    "save_ecg",
    "save_usps",
    "synthetic_ecg",
    "train_test_split",
]
