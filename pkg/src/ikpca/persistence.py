"""Versioned ``.npz`` container for feature maps, projections and fitted models.

Every file holds a JSON header under the key ``header`` with the format name,
version and object kind, plus plain numeric arrays. Feature maps are stored by
their parameters only and regenerated from the seed on load; an invertible
kernel PCA model re-derives its ridge inverter from the regenerated ``W`` and
checks the SVD against it.
"""

import json

import numpy as np

from .baselines import KernelPCASL, PCADenoiser
from .exceptions import FormatError
from .features import FeatureMap
from .pipeline import InvertibleKernelPCA, RidgeInverter
from .spectral import Projection

FORMAT = "ikpca-container"
VERSION = 1
SVD_CHECK_TOL = 1e-8


def _projection_arrays(proj):
    return {"P": proj.P, "eigenvalues": proj.eigenvalues, "mean": proj.mean}


def _projection_from(arrays, meta):
    return Projection(arrays["P"], arrays["eigenvalues"], arrays["mean"],
                      bool(meta["centered"]), meta["solver"])


def _dump(obj):
    if isinstance(obj, FeatureMap):
        return "feature_map", obj.params(), {}
    if isinstance(obj, Projection):
        return ("projection", {"centered": obj.centered, "solver": obj.solver},
                _projection_arrays(obj))
    if isinstance(obj, InvertibleKernelPCA):
        meta = {"params": obj.get_params(), "seed": obj.seed_,
                "p": obj.n_features_in_, "centered": obj.projection_.centered,
                "solver": obj.projection_.solver}
        meta["params"]["random_state"] = obj.seed_
        return "ikpca", meta, _projection_arrays(obj.projection_)
    if isinstance(obj, PCADenoiser):
        return ("pca", {"params": obj.get_params()},
                {"mean": obj.mean_, "components": obj.components_,
                 "eigenvalues": obj.eigenvalues_})
    if isinstance(obj, KernelPCASL):
        return ("kpca_sl", {"params": obj.get_params(),
                            "K_fit_all": obj.K_fit_all_},
                {"X_fit": obj.X_fit_, "alphas": obj.alphas_,
                 "eigenvalues": obj.eigenvalues_, "Z_fit": obj.Z_fit_,
                 "dual_coef": obj.dual_coef_, "K_fit_rows": obj.K_fit_rows_})
    raise TypeError(f"cannot save objects of type {type(obj).__name__}")


def save(obj, path):
    """Write ``obj`` to ``path``; fitted estimators must be fitted."""
    kind, meta, arrays = _dump(obj)
    header = json.dumps({"format": FORMAT, "version": VERSION, "kind": kind,
                         "meta": meta}, sort_keys=True)
    with open(path, "wb") as fh:
        np.savez(fh, header=np.array(header), **arrays)


def load(path):
    """Read back an object written by :func:`save`."""
    try:
        with np.load(path, allow_pickle=False) as data:
            header = json.loads(str(data["header"]))
            arrays = {k: data[k] for k in data.files if k != "header"}
    except (OSError, ValueError, KeyError) as exc:
        raise FormatError(f"{path}: not an ikpca container ({exc})") from None
    if header.get("format") != FORMAT:
        raise FormatError(f"{path}: unknown container format {header.get('format')!r}")
    if header.get("version") != VERSION:
        raise FormatError(f"{path}: unsupported container version {header.get('version')!r}")
    kind, meta = header["kind"], header["meta"]

    if kind == "feature_map":
        return FeatureMap(**meta)
    if kind == "projection":
        return _projection_from(arrays, meta)
    if kind == "ikpca":
        model = InvertibleKernelPCA(**meta["params"])
        fm = FeatureMap(meta["p"], model.n_features, model.gamma,
                        model.activation, meta["seed"])
        inverter = RidgeInverter.from_weights(fm.W, fm.b, model.alpha)
        rebuilt = (inverter.U * inverter.S) @ inverter.V.T
        err = np.max(np.abs(rebuilt - fm.W)) / max(np.max(np.abs(fm.W)), 1e-300)
        if err > SVD_CHECK_TOL:
            raise FormatError(f"{path}: SVD of the regenerated W is off by {err:.3g}")
        model.seed_ = meta["seed"]
        model.feature_map_ = fm
        model.projection_ = _projection_from(arrays, meta)
        model.inverter_ = inverter
        model.solver_ = meta["solver"]
        model.n_features_in_ = meta["p"]
        return model
    if kind == "pca":
        model = PCADenoiser(**meta["params"])
        model.mean_ = arrays["mean"]
        model.components_ = arrays["components"]
        model.eigenvalues_ = arrays["eigenvalues"]
        model.n_features_in_ = model.mean_.size
        return model
    if kind == "kpca_sl":
        model = KernelPCASL(**meta["params"])
        model.X_fit_ = arrays["X_fit"]
        model.alphas_ = arrays["alphas"]
        model.eigenvalues_ = arrays["eigenvalues"]
        model.Z_fit_ = arrays["Z_fit"]
        model.dual_coef_ = arrays["dual_coef"]
        model.K_fit_rows_ = arrays["K_fit_rows"]
        model.K_fit_all_ = float(meta["K_fit_all"])
        model.n_features_in_ = model.X_fit_.shape[1]
        return model
    raise FormatError(f"{path}: unknown object kind {kind!r}")
