import numpy as np
import pytest

from src.layers.activations import relu_backward, relu_forward, softmax_backward, softmax_forward
from src.layers.batch_norm import batchnorm_backward, batchnorm_forward
from src.layers.checkpoint import decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from src.layers.conv import conv_backward, conv_forward
from src.layers.dense import dense_backward, dense_forward
from src.layers.network import (
    BatchNormSpec,
    ConvSpec,
    DenseSpec,
    NetworkSpec,
    ReluSpec,
    SoftmaxSpec,
    classifier_spec,
)
from src.maths.losses import LossBatch, batch_proposed_grad, batch_proposed_loss
from src.utils.errors import CheckpointError, RunningStatsError, ShapeError
from src.utils.modes import NormMode


def numeric_grad(loss, array, step):
    """Central differences of loss() with respect to every entry of array."""
    grad = np.zeros_like(array)
    for index in np.ndindex(array.shape):
        original = array[index]
        array[index] = original + step
        upper = loss()
        array[index] = original - step
        lower = loss()
        array[index] = original
        grad[index] = (upper - lower) / (2.0 * step)
    return grad


def relative_error(analytic, numeric, floor=1e-6):
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.max(np.abs(analytic - numeric) / scale)


def fresh_stats(channels):
    return np.zeros(channels), np.ones(channels), np.zeros(1)


def test_conv_is_cross_correlation():
    x = np.arange(9.0).reshape(1, 1, 3, 3)
    weights = np.zeros((1, 1, 2, 2))
    weights[0, 0, 0, 0] = 1.0
    out, _ = conv_forward(x, weights, np.array([0.5]))
    np.testing.assert_array_equal(out[0, 0], x[0, 0, :2, :2] + 0.5)


def test_conv_sums_channels():
    x = np.ones((2, 3, 4, 4))
    out, _ = conv_forward(x, np.ones((5, 3, 2, 2)), np.zeros(5))
    assert out.shape == (2, 5, 3, 3)
    np.testing.assert_array_equal(out, 12.0)


def test_conv_shape_errors():
    with pytest.raises(ShapeError):
        conv_forward(np.ones((1, 2, 4, 4)), np.ones((1, 3, 2, 2)), np.zeros(1))
    with pytest.raises(ShapeError):
        conv_forward(np.ones((1, 1, 2, 2)), np.ones((1, 1, 3, 3)), np.zeros(1))


def test_conv_gradients(rng):
    x = rng.normal(size=(2, 2, 6, 6))
    weights = rng.normal(size=(3, 2, 3, 3))
    biases = rng.normal(size=3)
    out, cache = conv_forward(x, weights, biases)
    upstream = rng.normal(size=out.shape)
    grad_input, grad_weights, grad_biases = conv_backward(upstream, cache)

    def loss():
        return float(np.sum(conv_forward(x, weights, biases)[0] * upstream))

    assert relative_error(grad_input, numeric_grad(loss, x, 1e-3)) < 1e-5
    assert relative_error(grad_weights, numeric_grad(loss, weights, 1e-3)) < 1e-5
    assert relative_error(grad_biases, numeric_grad(loss, biases, 1e-3)) < 1e-5


def naive_conv(x, weights, biases):
    n, c, h, w = x.shape
    o, _, kh, kw = weights.shape
    out = np.zeros((n, o, h - kh + 1, w - kw + 1))
    for sample in range(n):
        for channel in range(o):
            for row in range(h - kh + 1):
                for col in range(w - kw + 1):
                    total = biases[channel]
                    for depth in range(c):
                        for p in range(kh):
                            for q in range(kw):
                                total += x[sample, depth, row + p, col + q] * weights[channel, depth, p, q]
                    out[sample, channel, row, col] = total
    return out


def test_conv_matches_loops(rng):
    x = rng.normal(size=(2, 3, 7, 6))
    weights = rng.normal(size=(4, 3, 3, 2))
    biases = rng.normal(size=4)
    out, _ = conv_forward(x, weights, biases)
    np.testing.assert_allclose(out, naive_conv(x, weights, biases), rtol=0, atol=1e-12)


def test_conv_of_filter_with_itself(rng):
    weights = rng.normal(size=(1, 2, 5, 5))
    out, _ = conv_forward(weights.copy(), weights, np.array([0.25]))
    assert out.shape == (1, 1, 1, 1)
    assert out[0, 0, 0, 0] == pytest.approx(np.sum(weights**2) + 0.25, abs=1e-12)


def test_batchnorm_normalizes_per_channel(rng):
    x = rng.normal(loc=3.0, scale=2.0, size=(8, 2, 4, 4))
    out, _ = batchnorm_forward(x, np.ones(2), np.zeros(2), NormMode.TRAIN, *fresh_stats(2))
    np.testing.assert_allclose(out.mean(axis=(0, 2, 3)), 0.0, atol=1e-12)
    np.testing.assert_allclose(out.var(axis=(0, 2, 3)), 1.0, rtol=1e-4)


def test_batchnorm_running_statistics(rng):
    x = rng.normal(loc=2.0, size=(4, 3, 2, 2))
    running_mean, running_var, steps = fresh_stats(3)
    batchnorm_forward(x, np.ones(3), np.zeros(3), NormMode.TRAIN, running_mean, running_var, steps)
    count = 4 * 2 * 2
    np.testing.assert_allclose(running_mean, 0.1 * x.mean(axis=(0, 2, 3)))
    np.testing.assert_allclose(running_var, 0.9 + 0.1 * x.var(axis=(0, 2, 3)) * count / (count - 1))
    assert steps[0] == 1


def test_batchnorm_inference_needs_training():
    with pytest.raises(RunningStatsError):
        batchnorm_forward(np.ones((2, 1, 2, 2)), np.ones(1), np.zeros(1), NormMode.INFER, *fresh_stats(1))


def test_batchnorm_inference_uses_running_statistics():
    running_mean, running_var, steps = np.array([1.0]), np.array([4.0]), np.array([3.0])
    x = np.full((2, 1, 2, 2), 5.0)
    out, _ = batchnorm_forward(x, np.ones(1), np.zeros(1), NormMode.INFER, running_mean, running_var, steps, eps=0.0)
    np.testing.assert_allclose(out, 2.0)
    assert steps[0] == 3


@pytest.mark.parametrize("mode", [NormMode.TRAIN, NormMode.INFER])
def test_batchnorm_gradients(rng, mode):
    x = rng.normal(loc=0.5, scale=2.0, size=(3, 2, 3, 3))
    gamma = rng.uniform(0.5, 1.5, size=2)
    beta = rng.normal(size=2)
    trained = (rng.normal(size=2), rng.uniform(0.5, 2.0, size=2), np.ones(1))

    def forward():
        stats = fresh_stats(2) if mode is NormMode.TRAIN else tuple(value.copy() for value in trained)
        return batchnorm_forward(x, gamma, beta, mode, *stats)

    out, cache = forward()
    upstream = rng.normal(size=out.shape)
    grad_input, grad_gamma, grad_beta = batchnorm_backward(upstream, cache)

    def loss():
        return float(np.sum(forward()[0] * upstream))

    assert relative_error(grad_input, numeric_grad(loss, x, 1e-5)) < 1e-5
    assert relative_error(grad_gamma, numeric_grad(loss, gamma, 1e-3)) < 1e-5
    assert relative_error(grad_beta, numeric_grad(loss, beta, 1e-3)) < 1e-5


def test_batchnorm_constant_channel_gives_beta():
    x = np.full((4, 2, 3, 3), 7.5)
    x[:, 1] = -2.0
    beta = np.array([0.3, -1.1])
    out, _ = batchnorm_forward(x, np.array([2.0, 0.5]), beta, NormMode.TRAIN, *fresh_stats(2))
    np.testing.assert_allclose(out[:, 0], 0.3, atol=1e-12)
    np.testing.assert_allclose(out[:, 1], -1.1, atol=1e-12)


def test_relu():
    x = np.array([[-1.0, 0.0, 2.0]])
    out, cache = relu_forward(x)
    np.testing.assert_array_equal(out, [[0.0, 0.0, 2.0]])
    np.testing.assert_array_equal(relu_backward(np.ones_like(x), cache), [[0.0, 0.0, 1.0]])


def test_softmax_rows_sum_to_one():
    probs, _ = softmax_forward(np.array([[1000.0, 1000.0], [0.0, np.log(3.0)]]))
    np.testing.assert_allclose(probs, [[0.5, 0.5], [0.25, 0.75]])
    with pytest.raises(ShapeError):
        softmax_forward(np.ones(3))


def test_softmax_gradients(rng):
    x = rng.normal(size=(4, 10))
    upstream = rng.normal(size=x.shape)
    analytic = softmax_backward(upstream, softmax_forward(x)[1])
    numeric = numeric_grad(lambda: float(np.sum(softmax_forward(x)[0] * upstream)), x, 1e-5)
    assert relative_error(analytic, numeric) < 1e-5


def test_dense_flattens_and_differentiates(rng):
    x = rng.normal(size=(3, 2, 2, 2))
    weights = rng.normal(size=(4, 8))
    biases = rng.normal(size=4)
    out, cache = dense_forward(x, weights, biases)
    np.testing.assert_allclose(out, x.reshape(3, 8) @ weights.T + biases)

    upstream = rng.normal(size=out.shape)
    grad_input, grad_weights, grad_biases = dense_backward(upstream, cache)
    assert grad_input.shape == x.shape

    def loss():
        return float(np.sum(dense_forward(x, weights, biases)[0] * upstream))

    assert relative_error(grad_input, numeric_grad(loss, x, 1e-3)) < 1e-5
    assert relative_error(grad_weights, numeric_grad(loss, weights, 1e-3)) < 1e-5
    assert relative_error(grad_biases, numeric_grad(loss, biases, 1e-3)) < 1e-5


def test_classifier_shapes():
    assert classifier_spec().shapes() == [
        (1, 28, 28),
        (20, 24, 24),
        (20, 24, 24),
        (20, 24, 24),
        (10,),
        (10,),
    ]


def test_spec_rejects_mismatched_layers():
    with pytest.raises(ShapeError):
        NetworkSpec((1, 28, 28), (ConvSpec(20, 5), BatchNormSpec(3), SoftmaxSpec()))
    with pytest.raises(ShapeError):
        NetworkSpec((1, 4, 4), (ConvSpec(2, 5), ReluSpec(), DenseSpec(10), SoftmaxSpec()))


def test_network_forward_probabilities(tiny_network, rng):
    params = tiny_network.init_params(rng)
    probs, caches = tiny_network.forward(params, rng.uniform(size=(5, 6, 6)), NormMode.TRAIN)
    assert probs.shape == (5, 3)
    assert len(caches) == len(tiny_network.layers)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0)


@pytest.mark.parametrize("shape", [(5, 7, 7), (5, 36), (5, 1, 7, 7), (5, 2, 6, 6), (36,)])
def test_network_rejects_wrong_input(tiny_network, rng, shape):
    params = tiny_network.init_params(rng)
    with pytest.raises(ShapeError):
        tiny_network.forward(params, rng.uniform(size=shape), NormMode.TRAIN)


def test_network_gradients_end_to_end(tiny_network, rng):
    params = tiny_network.init_params(rng)
    images = rng.uniform(size=(4, 6, 6))
    targets = np.eye(3)[[0, 1, 2, 1]]
    probs, caches = tiny_network.forward(params, images, NormMode.TRAIN)
    grads = tiny_network.backward(params, caches, batch_proposed_grad(LossBatch(probs, targets)))
    assert sorted(grads) == sorted(tiny_network.trainable_keys())

    def loss():
        return batch_proposed_loss(LossBatch(tiny_network.forward(params, images, NormMode.TRAIN)[0], targets))

    for key in ("conv.weight", "batchnorm.gamma", "dense.weight", "dense.bias"):
        assert relative_error(grads[key], numeric_grad(loss, params[key], 1e-6), 1e-4) < 1e-4


def test_tiny_network_layer_order(tiny_network):
    assert [layer.name for layer in tiny_network.layers] == ["conv", "batchnorm", "relu", "dense", "softmax"]


def test_zero_weights_predict_uniform(tiny_network, rng):
    params = tiny_network.init_params(rng)
    for key in ("conv.weight", "conv.bias", "dense.weight", "dense.bias"):
        params[key][...] = 0.0
    probs, _ = tiny_network.forward(params, rng.uniform(size=(4, 6, 6)), NormMode.TRAIN)
    np.testing.assert_allclose(probs, 1.0 / 3.0, atol=1e-12)


def test_forward_backward_is_deterministic(tiny_network, rng):
    params = tiny_network.init_params(rng)
    images = rng.uniform(size=(6, 6, 6))
    targets = np.eye(3)[[0, 1, 2, 0, 1, 2]]

    def step():
        copy = {key: value.copy() for key, value in params.items()}
        probs, caches = tiny_network.forward(copy, images, NormMode.TRAIN)
        grads = tiny_network.backward(copy, caches, batch_proposed_grad(LossBatch(probs, targets)))
        return probs, grads, copy

    first_probs, first_grads, first_params = step()
    second_probs, second_grads, second_params = step()
    np.testing.assert_array_equal(first_probs, second_probs)
    for key in first_grads:
        np.testing.assert_array_equal(first_grads[key], second_grads[key])
    for key in first_params:
        np.testing.assert_array_equal(first_params[key], second_params[key])


def test_predict_uses_running_statistics(tiny_network, rng):
    params = tiny_network.init_params(rng)
    images = rng.uniform(size=(7, 6, 6))
    with pytest.raises(RunningStatsError):
        tiny_network.predict(params, images)
    tiny_network.forward(params, images, NormMode.TRAIN)
    probs = tiny_network.predict(params, images, batch_size=3)
    assert probs.shape == (7, 3)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0)


def test_checkpoint_round_trip(tiny_network, rng, tmp_path):
    params = tiny_network.init_params(rng)
    path = tmp_path / "net.glnn"
    save_checkpoint(path, params)
    loaded = load_checkpoint(path)
    assert list(loaded) == list(params)
    for key in params:
        np.testing.assert_array_equal(loaded[key], params[key])


def test_checkpoint_errors(tiny_network, rng):
    data = encode_checkpoint(tiny_network.init_params(rng))
    with pytest.raises(CheckpointError):
        decode_checkpoint(b"NOPE" + data[4:])
    with pytest.raises(CheckpointError):
        decode_checkpoint(data[:-5])
    with pytest.raises(CheckpointError):
        decode_checkpoint(data[:4] + (99).to_bytes(4, "little") + data[8:])
