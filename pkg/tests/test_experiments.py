import json
import math

import numpy as np
import pytest

from ikpca.baselines import PCADenoiser
from ikpca.experiments import (
    COLUMNS,
    TIMING_COLUMN,
    ExperimentConfig,
    ResultTable,
    emit_results,
    format_results,
    make_trial,
    mse,
    run_experiment,
)


def small(experiment="scurve", **kw):
    base = dict(seeds=(0, 1), train_size=80, test_size=40, features=60)
    base.update(kw)
    return ExperimentConfig.preset(experiment, **base)


class TestMse:
    def test_equal(self):
        X = np.random.default_rng(0).standard_normal((3, 4))
        assert mse(X, X) == 0.0

    def test_all_ones(self):
        assert mse(np.ones((2, 5)), np.zeros((2, 5))) == 1.0

    def test_hand_example(self):
        assert mse([[1.0], [-3.0]], [[0.0], [0.0]]) == 5.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            mse(np.zeros((2, 2)), np.zeros((2, 3)))


class TestConfig:
    def test_preset_values(self):
        cfg = ExperimentConfig.preset("usps")
        assert (cfg.components, cfg.gamma, cfg.features) == (8, 1e-4, 5000)
        assert (cfg.train_size, cfg.test_size, cfg.noise_sigma) == (1000, 400, 0.5)

    def test_override(self):
        assert ExperimentConfig.preset("scurve", gamma=2.0).gamma == 2.0

    @pytest.mark.parametrize("kw", [
        dict(methods=("svd",)), dict(methods=()), dict(seeds=()),
        dict(sweep=("colour", (1, 2))), dict(sweep=("gamma", ())),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ExperimentConfig.preset("scurve", **kw)

    def test_unknown_experiment(self):
        with pytest.raises(ValueError):
            ExperimentConfig.preset("mnist")

    def test_with_value(self):
        cfg = small().with_value("lambda", 3.0)
        assert cfg.lam == 3.0


class TestTrials:
    def test_scurve_trial(self):
        train, test, ref = make_trial(small(), 0)
        assert train.shape == (80, 3) and test.shape == ref.shape == (40, 3)

    def test_usps_trial_uses_clean_reference(self):
        cfg = small("usps", train_size=30, test_size=10)
        train, test, ref = make_trial(cfg, 0)
        assert ref.min() >= 0 and ref.max() <= 1
        assert abs(np.std(test - ref) - 0.5) < 0.05

    def test_ecg_reference_is_train_mean(self):
        cfg = ExperimentConfig.preset("ecg", seeds=(0,))
        train, test, ref = make_trial(cfg, 3)
        assert np.allclose(ref, train.mean(axis=0))
        assert train.shape == (49, 512) and test.shape == (21, 512)

    def test_seed_changes_data(self):
        a, b = make_trial(small(), 0)[0], make_trial(small(), 1)[0]
        assert not np.array_equal(a, b)


class TestRun:
    def test_rows_and_columns(self):
        table = run_experiment(small(sweep=("components", (1, 2))))
        assert len(table) == 6
        assert set(COLUMNS) <= set(table.rows[0])
        assert table.column("sweep_value") == [1, 1, 1, 2, 2, 2]
        assert all(row["n_failed"] == 0 for row in table.rows)

    def test_ikpca_beats_noise_on_scurve(self):
        table = run_experiment(ExperimentConfig.preset(
            "scurve", methods=("ikpca",), seeds=(0,)))
        row = table.rows[0]
        assert row["mse_mean"] < row["noisy_mse_mean"]
        assert 0 <= row["clamp_rate"] <= 1

    def test_failures_are_recorded(self):
        table = run_experiment(small(methods=("pca", "ikpca"), components=5,
                                     features=4))
        pca, ik = table.rows
        assert pca["n_failed"] == 2 and "seed 0" in pca["error"]
        assert ik["n_failed"] == 2 and math.isnan(ik["mse_mean"])

    def test_parallel_matches_serial(self):
        cfg = small(methods=("ikpca",))
        assert (format_results(run_experiment(cfg, n_jobs=2))
                == format_results(run_experiment(cfg, n_jobs=1)))

    def test_std_uses_population_formula(self):
        cfg = small(methods=("pca",), seeds=(0, 1, 2))
        row = run_experiment(cfg).rows[0]
        errs = [mse(PCADenoiser(2).fit(tr).denoise(te), ref)
                for tr, te, ref in (make_trial(cfg, s) for s in cfg.seeds)]
        assert np.isclose(row["mse_std"], np.std(errs))
        assert np.isclose(row["mse_mean"], np.mean(errs))


class TestOutput:
    def test_csv_deterministic(self):
        cfg = small()
        assert format_results(run_experiment(cfg)) == format_results(run_experiment(cfg))

    def test_empty_table_is_header_only(self):
        assert format_results(ResultTable()) == ",".join(COLUMNS) + "\n"

    def test_timing_column_opt_in(self):
        table = run_experiment(small(methods=("pca",)))
        assert TIMING_COLUMN not in format_results(table)
        assert format_results(table, include_timing=True).splitlines()[0].endswith(TIMING_COLUMN)

    def test_csv_full_precision(self):
        table = run_experiment(small(methods=("pca",)))
        cell = format_results(table).splitlines()[1].split(",")[COLUMNS.index("mse_mean")]
        assert float(cell) == table.rows[0]["mse_mean"]

    def test_json(self):
        table = run_experiment(small(methods=("pca",)))
        doc = json.loads(format_results(table, "json"))
        assert doc["schema_version"] == 1
        assert doc["columns"] == list(COLUMNS)
        assert doc["rows"][0]["gamma"] is None
        assert doc["rows"][0]["mse_mean"] == table.rows[0]["mse_mean"]

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            format_results(ResultTable(), "xml")

    def test_emit_to_file(self, tmp_path):
        emit_results(ResultTable(), tmp_path / "out.csv")
        assert (tmp_path / "out.csv").read_text().startswith("experiment,")

    def test_emit_unwritable(self, tmp_path):
        with pytest.raises(OSError, match="cannot write"):
            emit_results(ResultTable(), tmp_path / "missing" / "out.csv")
