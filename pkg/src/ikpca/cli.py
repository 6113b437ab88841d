"""Command-line entry point: ``ikpca {scurve,usps,ecg} [options]``.

Options left unset fall back to the ``--config`` file (a JSON object whose
keys are the long option names, e.g. ``{"noise-sigma": 0.5}``) and then to the
experiment's preset.
"""

import argparse
import json
import logging
import sys

from .ecg import save_beats
from .experiments import (
    METHODS,
    SWEEPABLE,
    ExperimentConfig,
    _ecg_beats,
    emit_results,
    run_experiment,
)
from .ecg import BeatMatrix

log = logging.getLogger("ikpca")

# option name -> (ExperimentConfig field, parser)
_OPTIONS = {
    "method": ("methods", None),
    "components": ("components", int),
    "gamma": ("gamma", float),
    "lambda": ("lam", float),
    "features": ("features", int),
    "noise-sigma": ("noise_sigma", float),
    "train-size": ("train_size", int),
    "test-size": ("test_size", int),
    "kpca-gamma": ("kpca_gamma", float),
    "kpca-lambda": ("kpca_lambda", float),
    "seeds": ("seeds", None),
    "sweep": ("sweep", None),
    "data": ("data", str),
    "data-seed": ("data_seed", int),
    "centered": ("centered", bool),
}


def parse_seeds(text):
    """``"0-19"``, ``"1,5,9"`` or a mix such as ``"0-4,10"``."""
    if isinstance(text, int):
        return (text,)
    if isinstance(text, (list, tuple)):
        return tuple(int(s) for s in text)
    seeds = []
    for part in str(text).split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise ValueError(f"no seeds in {text!r}")
    return tuple(seeds)


def parse_sweep(text):
    """``"lambda=1e-8,1e-4,1"`` -> ``("lambda", (1e-8, 1e-4, 1.0))``."""
    if isinstance(text, dict):
        (name, values), = text.items()
        return name, tuple(values)
    name, sep, values = str(text).partition("=")
    if not sep:
        raise ValueError(f"sweep must look like name=v1,v2,..., got {text!r}")
    name = name.strip()
    if name not in SWEEPABLE:
        raise ValueError(f"cannot sweep {name!r}; choose from {sorted(SWEEPABLE)}")
    return name, tuple(SWEEPABLE[name](v) for v in values.split(",") if v.strip())


def parse_methods(text):
    if isinstance(text, (list, tuple)):
        return tuple(text)
    if text == "all":
        return METHODS
    return tuple(m.strip() for m in text.split(",") if m.strip())


_CONVERT = {"method": parse_methods, "seeds": parse_seeds, "sweep": parse_sweep}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ikpca",
        description="Denoising experiments with invertible kernel PCA, "
                    "kernel PCA with a learned pre-image, and linear PCA.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, help_text in (
        ("scurve", "synthetic 3-D s-curve"),
        ("usps", "16x16 digit images (USPS file or synthetic surrogate)"),
        ("ecg", "single-lead ECG beats (text record or synthetic ECG)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--method", help="comma list of pca,kpca-sl,ikpca or 'all'")
        p.add_argument("--components", type=int, help="latent dimension d")
        p.add_argument("--gamma", type=float, help="Gaussian kernel width")
        p.add_argument("--lambda", type=float, dest="lambda_",
                       help="ridge strength of the reconstruction")
        p.add_argument("--features", type=int, help="random features r")
        p.add_argument("--noise-sigma", type=float, help="noise standard deviation")
        p.add_argument("--train-size", type=int)
        p.add_argument("--test-size", type=int)
        p.add_argument("--kpca-gamma", type=float,
                       help="kernel width for kPCA+SL (defaults to --gamma)")
        p.add_argument("--kpca-lambda", type=float,
                       help="pre-image ridge strength for kPCA+SL "
                            "(defaults to --lambda)")
        p.add_argument("--centered", action="store_true", default=None,
                       help="centre features before ikPCA's PCA step")
        p.add_argument("--seeds", help="e.g. 0-19 or 1,2,3")
        p.add_argument("--sweep", help="name=v1,v2,... over one option")
        p.add_argument("--data", help="data file (USPS text or ECG record)")
        p.add_argument("--data-seed", type=int,
                       help="seed of the synthetic surrogate data")
        p.add_argument("--out", default="-", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--jobs", type=int, default=1, help="parallel seeds")
        p.add_argument("--timing", action="store_true",
                       help="append per-row wall time (output no longer "
                            "byte-reproducible)")
        if name == "ecg":
            p.add_argument("--export-beats", metavar="PATH",
                           help="also write the extracted beat matrix")
    return parser


def config_from_args(args):
    values = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
        for key, value in raw.items():
            key = key.replace("_", "-")
            if key not in _OPTIONS:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = value
    cli = vars(args)
    for key in _OPTIONS:
        attr = "lambda_" if key == "lambda" else key.replace("-", "_")
        if cli.get(attr) is not None:
            values[key] = cli[attr]
    overrides = {}
    for key, value in values.items():
        field, conv = _OPTIONS[key]
        conv = _CONVERT.get(key, conv)
        overrides[field] = conv(value) if conv else value
    return ExperimentConfig.preset(args.experiment, **overrides)


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    if getattr(args, "export_beats", None):
        beats = _ecg_beats(cfg.data, cfg.noise_sigma, cfg.data_seed)
        save_beats(BeatMatrix(beats), args.export_beats)
        log.info("wrote %d beats to %s", len(beats), args.export_beats)
    table = run_experiment(cfg, n_jobs=args.jobs)
    emit_results(table, args.out, args.format, include_timing=args.timing)
    failed = sum(row["n_failed"] for row in table.rows)
    if failed:
        log.warning("%d seed runs failed; see the error column", failed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
