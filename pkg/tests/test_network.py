"""Generator forward pass, active-weight masking, and linearization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genprior import (
    GeneratorNetwork,
    Rng,
    activation_pattern,
    active_weights,
    forward,
    lambda_matrix,
    layer_active_weights,
    loss,
    random_network,
    spectral_norm,
)


def _relu_chain_oracle(weights, x):
    """Straight-line per-row recomputation, independent of the library path."""
    h = [float(v) for v in x]
    for W in weights:
        h = [max(0.0, sum(W[r][c] * h[c] for c in range(len(h)))) for r in range(W.shape[0])]
    return np.array(h)


@pytest.fixture(scope="module")
def small_net():
    return random_network(Rng(21).child(0), (4, 30, 80))


class TestForward:
    def test_zero_input_gives_zero_output(self, small_net):
        assert np.array_equal(forward(small_net, np.zeros(4)), np.zeros(80))

    def test_single_layer_relu(self):
        net = GeneratorNetwork(weights=(np.array([[1.0], [-1.0]]),), widths=(1, 2))
        np.testing.assert_array_equal(forward(net, np.array([3.0])), [3.0, 0.0])

    def test_matches_bruteforce_oracle(self):
        net = random_network(Rng(22).child(0), (3, 12, 25))
        x = Rng(22).child(1).standard_normal(3)
        oracle = _relu_chain_oracle(net.weights, x)
        np.testing.assert_allclose(forward(net, x), oracle, rtol=1e-12, atol=1e-14)

    def test_dimension_mismatch(self, small_net):
        with pytest.raises(ValueError):
            forward(small_net, np.ones(5))

    @given(c=st.floats(min_value=1e-3, max_value=1e3))
    @settings(max_examples=25, deadline=None)
    def test_positive_homogeneity(self, c):
        """Bias-free ReLU chains satisfy G(c x) = c G(x) for c > 0."""
        net = random_network(Rng(23).child(0), (3, 20, 50))
        x = Rng(23).child(1).standard_normal(3)
        lhs = forward(net, c * x)
        rhs = c * forward(net, x)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-12)


class TestActiveWeights:
    def test_zero_dot_product_row_is_inactive(self):
        """Rows at exactly zero pre-activation are zeroed (strict > 0)."""
        W = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        v = np.array([1.0, 0.0])
        expected = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
        np.testing.assert_array_equal(active_weights(W, v), expected)

    def test_zero_vector_masks_everything(self):
        W = Rng(1).standard_normal((6, 3))
        np.testing.assert_array_equal(active_weights(W, np.zeros(3)), np.zeros((6, 3)))

    def test_matches_rowwise_sign_oracle(self):
        rng = Rng(2)
        W = rng.child(0).standard_normal((50, 10))
        v = rng.child(1).standard_normal(10)
        got = active_weights(W, v)
        for r in range(50):
            if float(W[r] @ v) > 0:
                np.testing.assert_array_equal(got[r], W[r])
            else:
                np.testing.assert_array_equal(got[r], np.zeros(10))

    @given(seed=st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=30, deadline=None)
    def test_masking_idempotent(self, seed):
        rng = Rng(seed)
        W = rng.child(0).standard_normal((12, 4))
        v = rng.child(1).standard_normal(4)
        once = active_weights(W, v)
        np.testing.assert_array_equal(active_weights(once, v), once)


class TestLayerActiveWeights:
    def test_all_positive_preactivations_unmasked(self):
        # One positive column weight and a positive input keep every row active.
        W1 = np.abs(Rng(3).standard_normal((5, 1))) + 0.1
        W2 = np.abs(Rng(4).standard_normal((9, 5))) + 0.1
        net = GeneratorNetwork(weights=(W1, W2), widths=(1, 5, 9))
        masked = layer_active_weights(net, np.array([2.0]))
        np.testing.assert_array_equal(masked[0], W1)
        np.testing.assert_array_equal(masked[1], W2)

    def test_zero_input_fully_masked(self, small_net):
        masked = layer_active_weights(small_net, np.zeros(4))
        for Wm in masked:
            assert not Wm.any()

    def test_chain_apply_equals_forward(self, small_net):
        """Applying the masked chain linearly reproduces the ReLU forward."""
        x = Rng(25).standard_normal(4)
        h = x
        for Wm in layer_active_weights(small_net, x):
            h = Wm @ h
        out = forward(small_net, x)
        assert np.allclose(h, out, rtol=1e-12, atol=0.0)
        # Same dot products row by row: expect bitwise equality up to +-0.
        assert (h == out).all()


class TestLambdaMatrix:
    def test_depth_one_equals_active_weights(self):
        W = Rng(5).standard_normal((7, 2))
        net = GeneratorNetwork(weights=(W,), widths=(2, 7))
        x = np.array([0.3, -1.2])
        np.testing.assert_array_equal(lambda_matrix(net, x), active_weights(W, x))

    def test_lambda_times_x_is_forward(self):
        net = random_network(Rng(26).child(0), (5, 40, 90))
        rng = Rng(27)
        for i in range(100):
            x = rng.child(i).standard_normal(5)
            out = forward(net, x)
            scale = max(np.linalg.norm(out), 1e-300)
            assert np.linalg.norm(lambda_matrix(net, x) @ x - out) <= 1e-10 * scale

    def test_piecewise_linearity(self):
        """forward(x + delta) = forward(x) + Lambda_x delta while the
        activation pattern is unchanged."""
        net = random_network(Rng(28).child(0), (4, 50, 120))
        rng = Rng(29)
        checked = 0
        for i in range(200):
            x = rng.child(2 * i).standard_normal(4)
            delta = 1e-7 * rng.child(2 * i + 1).standard_normal(4)
            if activation_pattern(net, x + delta) != activation_pattern(net, x):
                continue
            lhs = forward(net, x + delta)
            rhs = forward(net, x) + lambda_matrix(net, x) @ delta
            np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-15)
            checked += 1
            if checked == 100:
                break
        assert checked == 100

    @pytest.mark.slow
    def test_spectral_norm_bound_rescaled_model(self):
        """sigma(Lambda_x)^2 <= (13/12) 2^{-d} for wide 1/n_i-variance nets."""
        cases = [((4, 20000), (0, 1, 2)), ((1, 6000, 18000), (0, 1))]
        for widths, seeds in cases:
            d = len(widths) - 1
            bound = (13.0 / 12.0) * 2.0 ** (-d)
            for seed in seeds:
                rng = Rng(1000 + seed)
                net = random_network(rng.child(0), widths, scale="one_over_fanout")
                x = rng.child(1).standard_normal(widths[0])
                value = spectral_norm(lambda_matrix(net, x)) ** 2
                assert value <= bound, (widths, seed, value, bound)


class TestLoss:
    def test_zero_at_planted_code(self, small_net):
        x = Rng(30).standard_normal(4)
        assert loss(small_net, forward(small_net, x), x) == 0.0

    def test_at_origin_is_half_energy(self, small_net):
        y = Rng(31).standard_normal(80)
        assert loss(small_net, y, np.zeros(4)) == pytest.approx(0.5 * float(y @ y), rel=1e-12)

    def test_generic_matches_direct_recomputation(self, small_net):
        rng = Rng(32)
        y = rng.child(0).standard_normal(80)
        x = rng.child(1).standard_normal(4)
        direct = 0.5 * float(np.sum((forward(small_net, x) - y) ** 2))
        assert loss(small_net, y, x) == pytest.approx(direct, rel=1e-12)


class TestNetworkValidation:
    def test_shape_chain_enforced(self):
        with pytest.raises(ValueError):
            GeneratorNetwork(weights=(np.ones((3, 2)), np.ones((4, 5))), widths=(2, 3, 4))

    def test_random_network_requires_expansive_widths(self):
        with pytest.raises(ValueError):
            random_network(Rng(0), (5, 5, 10))

    def test_expansive_flag(self):
        net = random_network(Rng(1).child(0), (2, 6, 11))
        assert net.expansive
        loaded = GeneratorNetwork(weights=(np.ones((2, 3)),), widths=(3, 2))
        assert not loaded.expansive
