import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ikpca.features import (
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


def fixed_map(W, b, activation="sin"):
    """A FeatureMap whose W and b are overwritten with given values."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    fm = sample_feature_map(W.shape[1], W.shape[0], 1.0, activation, seed=0)
    object.__setattr__(fm, "W", W)
    object.__setattr__(fm, "b", np.asarray(b, dtype=float))
    return fm


finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


class TestSampling:
    def test_shapes_and_phase_range(self):
        fm = sample_feature_map(3, 50, 0.5, "sin", seed=7)
        assert fm.W.shape == (50, 3)
        assert fm.b.shape == (50,)
        assert np.all(fm.b > -np.pi) and np.all(fm.b <= np.pi)

    def test_same_seed_is_bit_identical(self):
        a = sample_feature_map(3, 50, 0.5, "sin", seed=7)
        b = sample_feature_map(3, 50, 0.5, "sin", seed=7)
        assert np.array_equal(a.W, b.W) and np.array_equal(a.b, b.b)
        assert a == b and hash(a) == hash(b)

    def test_different_seed_differs(self):
        a = sample_feature_map(3, 50, 0.5, seed=7)
        b = sample_feature_map(3, 50, 0.5, seed=8)
        assert not np.array_equal(a.W, b.W)
        assert a != b

    def test_weight_variance_is_two_gamma(self):
        fm = sample_feature_map(2, 100_000, 1.0, "sin", seed=1)
        assert abs(fm.W.var() / 2.0 - 1.0) < 0.05

    def test_arrays_are_read_only(self):
        fm = sample_feature_map(2, 4, 1.0)
        with pytest.raises(ValueError):
            fm.W[0, 0] = 1.0

    @pytest.mark.parametrize("kwargs", [
        dict(p=0, r=5, gamma=1.0), dict(p=2, r=0, gamma=1.0),
        dict(p=2, r=5, gamma=0.0), dict(p=2, r=5, gamma=-1.0),
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValueError):
            sample_feature_map(**kwargs)

    def test_rejects_unknown_activation(self):
        with pytest.raises(ValueError, match="activation"):
            sample_feature_map(2, 5, 1.0, activation="tanh")

    def test_params_round_trip(self):
        fm = sample_feature_map(4, 9, 0.25, "relu", seed=3)
        assert FeatureMap(**fm.params()) == fm


class TestPreActivationAndActivate:
    def test_identity_map(self):
        fm = fixed_map(np.eye(2), [0.0, 0.0])
        assert np.array_equal(pre_activation(fm, [[3.0, -1.0]]), [[3.0, -1.0]])

    def test_hand_arithmetic(self):
        fm = fixed_map([[1.0, 1.0]], [0.5])
        assert np.allclose(pre_activation(fm, [[2.0, 3.0]]), [[5.5]])

    def test_shape(self):
        fm = sample_feature_map(3, 11, 1.0)
        assert pre_activation(fm, np.zeros((4, 3))).shape == (4, 11)

    def test_dimension_mismatch(self):
        fm = sample_feature_map(3, 11, 1.0)
        with pytest.raises(ValueError):
            pre_activation(fm, np.zeros((4, 2)))

    def test_non_finite_rejected(self):
        fm = sample_feature_map(1, 1, 1.0)
        with pytest.raises(ValueError):
            activate(fm, [[np.nan]])

    def test_sin_values(self):
        fm = sample_feature_map(1, 1, 1.0)
        assert activate(fm, [[0.0]])[0, 0] == 0.0
        assert np.isclose(activate(fm, [[np.pi / 2]])[0, 0], np.sqrt(2))

    def test_relu_values(self):
        fm = sample_feature_map(1, 2, 1.0, "relu")
        assert np.array_equal(activate(fm, [[-2.0, 3.0]]), [[0.0, 3.0]])


class TestBypass:
    sin = sample_feature_map(1, 1, 1.0, "sin")
    relu = sample_feature_map(1, 1, 1.0, "relu")

    @pytest.mark.parametrize("mode", ["branch", "residual"])
    def test_in_subdomain_has_zero_bypass(self, mode):
        parts = bypass(self.sin, [[0.3]], mode)
        assert parts.bypass[0, 0] == 0.0
        assert parts.invertible_part[0, 0] == 0.3

    @pytest.mark.parametrize("mode", ["branch", "residual"])
    def test_pi(self, mode):
        parts = bypass(self.sin, [[np.pi]], mode)
        assert np.isclose(parts.bypass[0, 0], np.pi)
        assert abs(parts.invertible_part[0, 0]) < 1e-15

    @pytest.mark.parametrize("mode", ["branch", "residual"])
    def test_relu(self, mode):
        parts = bypass(self.relu, [[-1.5, 2.0]], mode)
        assert np.array_equal(parts.bypass, [[-1.5, 0.0]])
        assert np.array_equal(parts.invertible_part, [[0.0, 2.0]])

    @given(arrays(np.float64, (3, 4), elements=finite))
    def test_branch_decomposition(self, A):
        parts = bypass(self.sin, A)
        assert np.allclose(parts.invertible_part + parts.bypass, A, atol=1e-12)
        k = parts.bypass / np.pi
        assert np.allclose(k, np.rint(k))
        assert np.all(parts.invertible_part > -np.pi / 2 - 1e-12)
        assert np.all(parts.invertible_part <= np.pi / 2 + 1e-12)

    @given(arrays(np.float64, (3, 4), elements=finite))
    def test_residual_decomposition(self, A):
        parts = bypass(self.sin, A, "residual")
        assert np.allclose(parts.invertible_part, np.arcsin(np.sin(A)))
        assert np.allclose(parts.invertible_part + parts.bypass, A)

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match="mode"):
            bypass(self.sin, [[0.0]], "other")


class TestInvertActivation:
    sin = sample_feature_map(1, 1, 1.0, "sin")

    def test_residual_round_trip_example(self):
        a = 2.5
        out = invert_activation(self.sin, [[np.sqrt(2) * np.sin(a)]],
                                [[a - np.arcsin(np.sin(a))]], mode="residual")
        assert np.isclose(out[0, 0], a, atol=1e-12)

    def test_branch_round_trip_example(self):
        a = 2.5
        out = invert_activation(self.sin, [[np.sqrt(2) * np.sin(a)]], [[np.pi]])
        assert np.isclose(out[0, 0], a, atol=1e-12)

    def test_zero(self):
        assert invert_activation(self.sin, [[0.0]], [[0.0]])[0, 0] == 0.0

    def test_clamp_report(self):
        out, rep = invert_activation(self.sin, [[1.5, 0.2]], [[0.0, 0.0]],
                                     return_report=True)
        assert np.isclose(out[0, 0], np.pi / 2)
        assert rep.n_clamped == 1 and rep.n_entries == 2
        assert np.isclose(rep.max_overshoot, 1.5 / np.sqrt(2) - 1)
        assert rep.rate == 0.5

    def test_relu_clamps_negatives(self):
        relu = sample_feature_map(1, 1, 1.0, "relu")
        out, rep = invert_activation(relu, [[-0.2, 0.7]], [[0.0, -1.0]],
                                     return_report=True)
        assert np.allclose(out, [[0.0, 0.7 - 1.0]])
        assert rep.n_clamped == 1

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            invert_activation(self.sin, np.zeros((2, 2)), np.zeros((2, 3)))

    @settings(max_examples=200)
    @given(arrays(np.float64, (5, 6), elements=finite),
           st.sampled_from(["branch", "residual"]))
    def test_exact_inverse(self, A, mode):
        parts = bypass(self.sin, A, mode)
        back = invert_activation(self.sin, activate(self.sin, A), parts.bypass, mode)
        # arcsin loses about sqrt(eps) of precision at the turning points
        tol = 1e-12 + np.minimum(1e-15 / np.maximum(np.abs(np.cos(A)), 1e-300), 1e-7)
        assert np.all(np.abs(back - A) <= tol + 1e-12 * np.abs(A))

    @given(arrays(np.float64, (4, 3), elements=finite))
    def test_relu_inverse(self, A):
        relu = sample_feature_map(1, 1, 1.0, "relu")
        parts = bypass(relu, A)
        assert np.array_equal(invert_activation(relu, activate(relu, A), parts.bypass), A)


class TestKernels:
    def test_exact_self_is_one(self):
        x = np.array([0.3, -2.0, 1.0])
        assert kernel_exact(x, x, 0.7) == 1.0

    def test_exact_value(self):
        assert np.isclose(kernel_exact([1.0, 0.0], [0.0, 1.0], 0.5), np.exp(-1))

    def test_exact_decreases_with_gamma(self):
        vals = [kernel_exact([0.0], [1.0], g) for g in (0.1, 1.0, 10.0, 100.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-40

    def test_exact_dimension_mismatch(self):
        with pytest.raises(ValueError):
            kernel_exact([1.0], [1.0, 2.0], 1.0)

    def test_approx_self_mean_is_one(self):
        x = np.array([0.4, -0.1])
        vals = [kernel_approx(sample_feature_map(2, 64, 0.5, seed=s), x, x)
                for s in range(200)]
        assert all(0.0 <= v <= 2.0 for v in vals)
        assert abs(np.mean(vals) - 1.0) < 0.02

    def test_approx_accuracy_across_seeds(self):
        x, y = np.array([0.2, -0.5, 0.1]), np.array([-0.3, 0.4, 0.6])
        exact = kernel_exact(x, y, 0.5)
        hits = [abs(kernel_approx(sample_feature_map(3, 10_000, 0.5, seed=s), x, y)
                    - exact) < 0.05 for s in range(40)]
        assert np.mean(hits) >= 0.95

    def test_approx_error_halves_with_four_times_r(self):
        rng = np.random.default_rng(0)
        pairs = rng.uniform(-1, 1, (100, 2, 3))
        exact = np.array([kernel_exact(x, y, 0.5) for x, y in pairs])

        def rms(r):
            errs = [np.mean((np.array([kernel_approx(sample_feature_map(
                3, r, 0.5, seed=100 * s + r), x, y) for x, y in pairs]) - exact) ** 2)
                for s in range(8)]
            return np.sqrt(np.mean(errs))

        ratio = rms(256) / rms(1024)
        assert 1.5 < ratio < 2.7

    def test_approx_rejects_relu(self):
        fm = sample_feature_map(1, 4, 1.0, "relu")
        with pytest.raises(ValueError, match="sine"):
            kernel_approx(fm, [0.0], [1.0])


class TestTransformer:
    def test_matches_functional_path(self):
        X = np.random.default_rng(0).standard_normal((5, 3))
        rff = RandomFourierFeatures(20, gamma=0.5, random_state=4).fit(X)
        fm = sample_feature_map(3, 20, 0.5, seed=4)
        assert np.array_equal(rff.transform(X), activate(fm, pre_activation(fm, X)))

    def test_get_params(self):
        params = RandomFourierFeatures(7, gamma=2.0).get_params()
        assert params["n_components"] == 7 and params["gamma"] == 2.0
