"""Network stack: init, forward, exact backprop, Adam, checkpoints."""

import numpy as np
import pytest

from fieldgan import InputError
from fieldgan.nets import (
    AdamState,
    Mlp,
    adam_update,
    backward,
    forward,
    forward_cached,
    init_adam,
    init_mlp,
    load_checkpoint,
    save_checkpoint,
)

ALL_ACTIVATIONS = ["elu", "tanh", "linear"]


def random_net(rng):
    depth = int(rng.integers(1, 5))
    widths = [int(rng.integers(1, 33)) for _ in range(depth + 1)]
    acts = [str(rng.choice(ALL_ACTIVATIONS)) for _ in range(depth)]
    return init_mlp(widths, acts, rng)


def loss_and_grads(net, x, probe):
    """Scalar loss sum(net(x) * probe) and its exact gradients."""
    out, cache = forward_cached(net, x)
    loss = float(np.sum(out * probe))
    return loss, backward(net, cache, probe)


def fd_param_grad(net, x, probe, arrays, layer, index, h):
    """Central difference of the probe loss along one parameter entry."""
    original = arrays[layer][index]
    arrays[layer][index] = original + h
    up = float(np.sum(forward(net, x) * probe))
    arrays[layer][index] = original - h
    down = float(np.sum(forward(net, x) * probe))
    arrays[layer][index] = original
    return (up - down) / (2.0 * h)


class TestInitMlp:
    def test_glorot_bounds_and_zero_biases(self):
        rng = np.random.default_rng(0)
        net = init_mlp([4, 16, 8, 2], ["elu", "tanh", "linear"], rng)
        for w, b in zip(net.weights, net.biases):
            fan_out, fan_in = w.shape
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            assert np.all(np.abs(w) <= limit)
            np.testing.assert_array_equal(b, np.zeros(fan_out))

    def test_shapes(self):
        net = init_mlp([3, 5, 2], ["elu", "linear"], np.random.default_rng(1))
        assert [w.shape for w in net.weights] == [(5, 3), (2, 5)]
        assert net.layer_widths == [3, 5, 2]
        assert net.input_dim == 3 and net.output_dim == 2

    def test_seed_determinism(self):
        a = init_mlp([3, 7, 1], ["tanh", "linear"], np.random.default_rng(42))
        b = init_mlp([3, 7, 1], ["tanh", "linear"], np.random.default_rng(42))
        for wa, wb in zip(a.weights, b.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_rejects_bad_configs(self):
        rng = np.random.default_rng(2)
        with pytest.raises(InputError):
            init_mlp([4], ["linear"], rng)
        with pytest.raises(InputError):
            init_mlp([4, 2], ["elu", "linear"], rng)
        with pytest.raises(InputError):
            init_mlp([4, 2], ["softplus"], rng)


class TestForward:
    def test_zero_parameters_give_zero_output(self):
        net = init_mlp([3, 4, 2], ["elu", "linear"], np.random.default_rng(3))
        for w in net.weights:
            w[:] = 0.0
        np.testing.assert_array_equal(forward(net, np.ones(3)), np.zeros(2))

    def test_identity_layer(self):
        net = Mlp(weights=[np.eye(4)], biases=[np.zeros(4)], activations=["linear"])
        x = np.random.default_rng(4).standard_normal(4)
        np.testing.assert_array_equal(forward(net, x), x)

    def test_elu_at_minus_one(self):
        """ELU(-1) = e^(-1) - 1, evaluated independently."""
        net = Mlp(weights=[np.eye(1)], biases=[np.zeros(1)], activations=["elu"])
        np.testing.assert_allclose(
            forward(net, np.array([-1.0]))[0], -0.6321205588285577, rtol=1e-12
        )

    def test_elu_continuity_at_zero(self):
        """Value and slope agree across 0 to first order (probed at +-1e-9)."""
        net = Mlp(weights=[np.eye(1)], biases=[np.zeros(1)], activations=["elu"])
        lo = forward(net, np.array([-1e-9]))[0]
        hi = forward(net, np.array([1e-9]))[0]
        assert abs(hi - lo) < 3e-9
        # derivative: exp(z) -> 1 from the left, constant 1 from the right
        _, cache_lo = forward_cached(net, np.array([-1e-9]))
        _, cache_hi = forward_cached(net, np.array([1e-9]))
        g_lo = backward(net, cache_lo, np.array([1.0])).d_input[0, 0]
        g_hi = backward(net, cache_hi, np.array([1.0])).d_input[0, 0]
        assert abs(g_hi - g_lo) < 3e-9

    def test_batch_matches_single(self):
        rng = np.random.default_rng(5)
        net = random_net(rng)
        xs = rng.standard_normal((6, net.input_dim))
        batched = forward(net, xs)
        for i in range(6):
            # matrix-matrix and matrix-vector kernels may round differently,
            # so this is near-exact rather than bitwise
            np.testing.assert_allclose(batched[i], forward(net, xs[i]),
                                       rtol=1e-12, atol=1e-14)

    def test_shape_mismatch(self):
        net = init_mlp([3, 2], ["linear"], np.random.default_rng(6))
        with pytest.raises(InputError):
            forward(net, np.zeros(4))


class TestBackward:
    def test_zero_grad_out_gives_zero_gradients(self):
        rng = np.random.default_rng(7)
        net = random_net(rng)
        x = rng.standard_normal((3, net.input_dim))
        _, cache = forward_cached(net, x)
        grads = backward(net, cache, np.zeros((3, net.output_dim)))
        for g in grads.d_weights + grads.d_biases + [grads.d_input]:
            np.testing.assert_array_equal(g, np.zeros_like(g))

    def test_linearity_in_grad_out(self):
        rng = np.random.default_rng(8)
        net = random_net(rng)
        x = rng.standard_normal((4, net.input_dim))
        probe = rng.standard_normal((4, net.output_dim))
        _, cache = forward_cached(net, x)
        one = backward(net, cache, probe)
        two = backward(net, cache, 2.0 * probe)
        for a, b in zip(one.d_weights + one.d_biases, two.d_weights + two.d_biases):
            np.testing.assert_array_equal(2.0 * a, b)
        np.testing.assert_array_equal(2.0 * one.d_input, two.d_input)

    def test_small_elu_net_matches_finite_differences(self):
        """2-16-16-1 ELU stack against a central-difference oracle."""
        rng = np.random.default_rng(9)
        net = init_mlp([2, 16, 16, 1], ["elu", "elu", "linear"], rng)
        x = rng.standard_normal((5, 2))
        probe = rng.standard_normal((5, 1))
        _, grads = loss_and_grads(net, x, probe)
        h = 1e-4
        for layer in range(3):
            w = net.weights[layer]
            for index in [(0, 0), (w.shape[0] - 1, w.shape[1] - 1)]:
                fd = fd_param_grad(net, x, probe, net.weights, layer, index, h)
                analytic = grads.d_weights[layer][index]
                assert abs(analytic - fd) <= 1e-5 * max(1.0, abs(fd))

    def test_many_random_nets_match_finite_differences(self):
        """Every activation kind, mixed depths and widths; subsampled
        parameter entries against central differences."""
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(50):
            net = random_net(rng)
            x = rng.standard_normal((3, net.input_dim))
            probe = rng.standard_normal((3, net.output_dim))
            _, grads = loss_and_grads(net, x, probe)
            h = 1e-4
            for layer in range(len(net.weights)):
                w = net.weights[layer]
                flat = rng.integers(0, w.size, size=min(4, w.size))
                for f in flat:
                    index = np.unravel_index(int(f), w.shape)
                    fd = fd_param_grad(net, x, probe, net.weights, layer, index, h)
                    analytic = grads.d_weights[layer][index]
                    rel = abs(analytic - fd) / max(1.0, abs(fd))
                    worst = max(worst, rel)
                bidx = int(rng.integers(0, net.biases[layer].size))
                fd = fd_param_grad(net, x, probe, net.biases, layer, (bidx,), h)
                rel = abs(grads.d_biases[layer][bidx] - fd) / max(1.0, abs(fd))
                worst = max(worst, rel)
        assert worst < 1e-5

    def test_input_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(10)
        net = init_mlp([3, 8, 2], ["tanh", "linear"], rng)
        x = rng.standard_normal((2, 3))
        probe = rng.standard_normal((2, 2))
        _, grads = loss_and_grads(net, x, probe)
        h = 1e-6
        for i in (0, 1):
            for j in range(3):
                xp, xm = x.copy(), x.copy()
                xp[i, j] += h
                xm[i, j] -= h
                fd = (np.sum(forward(net, xp) * probe) - np.sum(forward(net, xm) * probe)) / (2 * h)
                np.testing.assert_allclose(grads.d_input[i, j], fd, rtol=1e-5, atol=1e-8)

    def test_grad_out_shape_mismatch(self):
        net = init_mlp([2, 3], ["linear"], np.random.default_rng(11))
        _, cache = forward_cached(net, np.zeros((4, 2)))
        with pytest.raises(InputError):
            backward(net, cache, np.zeros((4, 2)))


class TestAdam:
    def _toy(self, seed=12):
        rng = np.random.default_rng(seed)
        net = init_mlp([2, 3, 1], ["elu", "linear"], rng)
        return net, rng

    def _grads_like(self, net, fill=None, rng=None):
        mk = (lambda a: np.full_like(a, fill)) if fill is not None else (
            lambda a: rng.standard_normal(a.shape))
        from fieldgan.nets import Gradients
        return Gradients(
            d_weights=[mk(w) for w in net.weights],
            d_biases=[mk(b) for b in net.biases],
            d_input=np.zeros((1, net.input_dim)),
        )

    def test_zero_gradient_leaves_parameters_unchanged(self):
        net, _ = self._toy()
        before = [w.copy() for w in net.weights]
        state = init_adam(net, learning_rate=0.5)
        adam_update(net, self._grads_like(net, fill=0.0), state)
        for w, b in zip(net.weights, before):
            np.testing.assert_array_equal(w, b)
        assert state.step == 1

    def test_first_step_is_signed_learning_rate(self):
        """With fresh moments the bias-corrected update collapses to
        -lr * g/(|g| + eps), i.e. a signed step of size ~lr."""
        net, rng = self._toy()
        before = [w.copy() for w in net.weights]
        grads = self._grads_like(net, rng=rng)
        state = init_adam(net, learning_rate=1e-3)
        adam_update(net, grads, state)
        for w, b, g in zip(net.weights, before, grads.d_weights):
            np.testing.assert_allclose(w - b, -1e-3 * np.sign(g), rtol=1e-4)

    def test_weight_decay_shifts_weight_gradient_exactly(self):
        """decay d on weights w must act exactly like handing the optimizer
        gradient g + d*w; verified bitwise against a manual shift."""
        net_a, rng = self._toy(13)
        net_b = Mlp(weights=[w.copy() for w in net_a.weights],
                    biases=[b.copy() for b in net_a.biases],
                    activations=list(net_a.activations))
        grads_a = self._grads_like(net_a, rng=np.random.default_rng(14))
        from fieldgan.nets import Gradients
        grads_b = Gradients(
            d_weights=[g + 1e-7 * w for g, w in zip(grads_a.d_weights, net_b.weights)],
            d_biases=[g.copy() for g in grads_a.d_biases],
            d_input=grads_a.d_input.copy(),
        )
        state_a = init_adam(net_a, learning_rate=0.01, weight_decay=1e-7)
        state_b = init_adam(net_b, learning_rate=0.01, weight_decay=0.0)
        adam_update(net_a, grads_a, state_a)
        adam_update(net_b, grads_b, state_b)
        for wa, wb in zip(net_a.weights, net_b.weights):
            np.testing.assert_array_equal(wa, wb)
        for ba, bb in zip(net_a.biases, net_b.biases):
            np.testing.assert_array_equal(ba, bb)

    def test_learning_rate_is_mutable_for_schedules(self):
        net, rng = self._toy(15)
        state = init_adam(net, learning_rate=0.1)
        state.learning_rate *= 0.5
        assert state.learning_rate == 0.05

    def test_rejects_nonpositive_learning_rate(self):
        net, _ = self._toy(16)
        with pytest.raises(InputError):
            init_adam(net, learning_rate=0.0)

    def test_descends_a_quadratic(self):
        """Sanity: repeated updates on f(w) = ||w||^2/2 shrink the loss."""
        net = Mlp(weights=[np.array([[3.0, -2.0]])], biases=[np.zeros(1)],
                  activations=["linear"])
        state = init_adam(net, learning_rate=0.05)
        from fieldgan.nets import Gradients
        start = float(np.sum(net.weights[0] ** 2))
        for _ in range(200):
            grads = Gradients(d_weights=[net.weights[0].copy()],
                              d_biases=[np.zeros(1)], d_input=np.zeros((1, 2)))
            adam_update(net, grads, state)
        assert float(np.sum(net.weights[0] ** 2)) < 0.01 * start


class TestCheckpoints:
    def test_round_trip_reproduces_forward_bitwise(self, tmp_path):
        rng = np.random.default_rng(17)
        net = random_net(rng)
        x = rng.standard_normal((8, net.input_dim))
        path = tmp_path / "net.json"
        save_checkpoint(net, path)
        loaded, adam = load_checkpoint(path)
        assert adam is None
        np.testing.assert_array_equal(forward(loaded, x), forward(net, x))
        assert loaded.activations == net.activations

    def test_round_trip_with_optimizer_state(self, tmp_path):
        rng = np.random.default_rng(18)
        net = init_mlp([2, 4, 1], ["elu", "linear"], rng)
        state = init_adam(net, learning_rate=0.01, weight_decay=1e-7)
        from fieldgan.nets import Gradients
        grads = Gradients(d_weights=[rng.standard_normal(w.shape) for w in net.weights],
                          d_biases=[rng.standard_normal(b.shape) for b in net.biases],
                          d_input=np.zeros((1, 2)))
        adam_update(net, grads, state)
        path = tmp_path / "net.json"
        save_checkpoint(net, path, adam=state)
        loaded_net, loaded_state = load_checkpoint(path)
        assert loaded_state.step == 1
        assert loaded_state.learning_rate == state.learning_rate
        assert loaded_state.weight_decay == 1e-7
        for a, b in zip(loaded_state.m_weights, state.m_weights):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(loaded_state.v_weights, state.v_weights):
            np.testing.assert_array_equal(a, b)
        # continuing to train from the reload matches exactly
        adam_update(net, grads, state)
        adam_update(loaded_net, grads, loaded_state)
        for wa, wb in zip(net.weights, loaded_net.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_rejects_unknown_format_version(self, tmp_path):
        import json
        rng = np.random.default_rng(19)
        net = init_mlp([2, 2], ["linear"], rng)
        path = tmp_path / "net.json"
        save_checkpoint(net, path)
        payload = json.loads(path.read_text())
        payload["format_version"] = 999
        path.write_text(json.dumps(payload))
        with pytest.raises(InputError):
            load_checkpoint(path)
