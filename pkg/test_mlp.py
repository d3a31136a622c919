#!/usr/bin/env python3
"""測試多層感知器、Adam 與檢查點"""

import numpy as np
import pytest

from engine.mlp import (
    CheckpointError,
    MlpParameters,
    ShapeMismatch,
    adam_init,
    adam_step,
    backward,
    forward,
    init_mlp,
    load_checkpoint,
    mse_loss_and_grad,
    network_dims,
    save_checkpoint,
    soft_update,
)


def _linear(weight, bias, output_activation="linear"):
    return MlpParameters([np.asarray(weight, dtype=float)], [np.asarray(bias, dtype=float)], "relu", output_activation)


def test_network_dims():
    assert network_dims(6, 3) == [6, 64, 64, 64, 64, 3]
    assert network_dims(6, 3, hidden_size=8, n_layers=2) == [6, 8, 3]


def test_identity_layer():
    y, _ = forward(_linear(np.eye(3), np.zeros(3)), np.array([1.0, -2.0, 3.0]))
    assert np.allclose(y, [1.0, -2.0, 3.0])


def test_zero_weights_output_bias_through_tanh():
    y, _ = forward(_linear(np.zeros((2, 2)), [0.3, -0.7], "tanh"), np.array([5.0, 5.0]))
    assert np.allclose(y, np.tanh([0.3, -0.7]))


def test_output_ranges(rng):
    x = rng.standard_normal((50, 4))
    for name, low, high in (("tanh", -1.0, 1.0), ("sigmoid", 0.0, 1.0)):
        y, _ = forward(init_mlp([4, 16, 3], rng, output_activation=name), x)
        assert np.all(y > low) and np.all(y < high)


@pytest.mark.parametrize("z", [20.0, 40.0, 800.0, -20.0, -40.0, -800.0])
def test_saturated_heads_stay_open(z):
    """極大輸入也不會輸出邊界值"""
    tanh_out, _ = forward(_linear([[1.0]], [0.0], "tanh"), np.array([z]))
    sigmoid_out, _ = forward(_linear([[1.0]], [0.0], "sigmoid"), np.array([z]))
    assert -1.0 < tanh_out[0] < 1.0
    assert 0.0 < sigmoid_out[0] < 1.0


def test_forward_is_deterministic(rng):
    params = init_mlp([4, 8, 2], rng)
    x = rng.standard_normal(4)
    assert np.array_equal(forward(params, x)[0], forward(params, x)[0])


def test_forward_shape_mismatch(rng):
    with pytest.raises(ShapeMismatch):
        forward(init_mlp([4, 2], rng), np.ones(3))


def test_batch_matches_single_rows(rng):
    params = init_mlp([3, 8, 2], rng, output_activation="tanh")
    x = rng.standard_normal((5, 3))
    batched, _ = forward(params, x)
    for k in range(5):
        assert np.allclose(batched[k], forward(params, x[k])[0])


def test_input_gradient_of_linear_layer(rng):
    w = rng.standard_normal((3, 2))
    params = _linear(w, np.zeros(2))
    _, cache = forward(params, rng.standard_normal(3))
    g = np.array([0.5, -1.5])
    _, grad_in = backward(params, cache, g)
    assert np.allclose(grad_in, w @ g)


def test_zero_output_gradient(rng):
    params = init_mlp([3, 8, 2], rng)
    _, cache = forward(params, rng.standard_normal(3))
    grads, grad_in = backward(params, cache, np.zeros(2))
    assert all(np.all(w == 0) for w in grads.weights)
    assert np.all(grad_in == 0)


def test_finite_difference_gradients():
    """五層 64 寬度網路的參數與輸入梯度"""
    rng = np.random.default_rng(99)
    params = init_mlp(network_dims(6, 3), rng, output_activation="tanh")
    x = rng.standard_normal(6)
    c = rng.standard_normal(3)
    step = 1e-6

    def objective(p, inp):
        return float(c @ forward(p, inp)[0])

    _, cache = forward(params, x)
    grads, grad_in = backward(params, cache, c)

    for _ in range(100):
        k = int(rng.integers(len(params.weights)))
        if rng.uniform() < 0.5:
            idx = tuple(int(rng.integers(n)) for n in params.weights[k].shape)
            plus, minus = params.copy(), params.copy()
            plus.weights[k][idx] += step
            minus.weights[k][idx] -= step
            analytic = grads.weights[k][idx]
        else:
            idx = int(rng.integers(params.biases[k].shape[0]))
            plus, minus = params.copy(), params.copy()
            plus.biases[k][idx] += step
            minus.biases[k][idx] -= step
            analytic = grads.biases[k][idx]
        numeric = (objective(plus, x) - objective(minus, x)) / (2 * step)
        assert abs(numeric - analytic) <= 1e-4 * max(abs(numeric), abs(analytic)) + 1e-7

    for d in range(6):
        e = np.zeros(6)
        e[d] = step
        numeric = (objective(params, x + e) - objective(params, x - e)) / (2 * step)
        assert abs(numeric - grad_in[d]) <= 1e-4 * max(abs(numeric), abs(grad_in[d])) + 1e-7


def test_batch_gradients_are_summed(rng):
    params = init_mlp([3, 4, 1], rng)
    x = rng.standard_normal((4, 3))
    _, cache = forward(params, x)
    total, _ = backward(params, cache, np.ones((4, 1)))
    expected = params.zeros_like()
    for row in x:
        _, single = forward(params, row)
        grads, _ = backward(params, single, np.ones(1))
        expected.weights = [a + b for a, b in zip(expected.weights, grads.weights)]
    for a, b in zip(total.weights, expected.weights):
        assert np.allclose(a, b)


def test_adam_zero_gradient_keeps_params(rng):
    params = init_mlp([3, 4, 2], rng)
    state = adam_init(params, learning_rate=1e-3)
    new_params, new_state = adam_step(params, params.zeros_like(), state)
    assert new_state.step == 1
    for a, b in zip(params.weights, new_params.weights):
        assert np.array_equal(a, b)


def test_adam_first_step_is_signed_learning_rate(rng):
    params = init_mlp([3, 2], rng)
    grads = params.zeros_like()
    grads.weights[0] = rng.standard_normal((3, 2))
    grads.biases[0] = rng.standard_normal(2)
    state = adam_init(params, learning_rate=1e-3)
    new_params, _ = adam_step(params, grads, state)
    g = grads.weights[0]
    expected = params.weights[0] - 1e-3 * g / (np.abs(g) + 1e-8)
    assert np.allclose(new_params.weights[0], expected, rtol=0, atol=1e-15)


def test_adam_does_not_mutate_input(rng):
    params = init_mlp([3, 2], rng)
    before = params.copy()
    grads = init_mlp([3, 2], rng)
    adam_step(params, grads, adam_init(params))
    assert np.array_equal(params.weights[0], before.weights[0])


def test_mse_examples():
    loss, grad = mse_loss_and_grad([1.0], [1.0])
    assert loss == 0.0
    assert np.all(grad == 0)
    loss, grad = mse_loss_and_grad([1.0, 3.0], [0.0, 1.0])
    assert loss == pytest.approx(2.5)
    assert np.allclose(grad, [1.0, 2.0])


def test_mse_length_mismatch():
    with pytest.raises(ShapeMismatch):
        mse_loss_and_grad([1.0, 2.0], [1.0])


def test_soft_update_examples():
    target = _linear([[0.0]], [0.0])
    online = _linear([[1.0]], [2.0])
    assert soft_update(target, online, 0.5).weights[0][0, 0] == pytest.approx(0.5)
    assert np.array_equal(soft_update(target, online, 1.0).weights[0], online.weights[0])
    assert np.array_equal(soft_update(target, online, 0.0).weights[0], target.weights[0])


def test_soft_update_contracts_geometrically():
    target = _linear([[1.0]], [1.0])
    online = _linear([[0.0]], [0.0])
    tau = 0.01
    for _ in range(100):
        target = soft_update(target, online, tau)
    assert target.weights[0][0, 0] == pytest.approx((1 - tau) ** 100, rel=1e-12)


def test_soft_update_rejects_bad_tau():
    p = _linear([[1.0]], [0.0])
    with pytest.raises(ValueError):
        soft_update(p, p, 1.5)


def test_checkpoint_round_trip(tmp_path, rng):
    params = init_mlp([4, 8, 8, 2], rng, output_activation="sigmoid")
    path = tmp_path / "net.ckpt"
    save_checkpoint(params, str(path))
    loaded = load_checkpoint(str(path), [4, 8, 8, 2])
    assert loaded.output_activation == "sigmoid"
    for a, b in zip(params.weights + params.biases, loaded.weights + loaded.biases):
        assert np.array_equal(a, b)
    x = rng.standard_normal(4)
    assert np.array_equal(forward(params, x)[0], forward(loaded, x)[0])


def test_checkpoint_dims_mismatch(tmp_path, rng):
    path = tmp_path / "net.ckpt"
    save_checkpoint(init_mlp([4, 8, 2], rng), str(path))
    with pytest.raises(ShapeMismatch):
        load_checkpoint(str(path), [4, 16, 2])


def test_checkpoint_bad_magic(tmp_path):
    path = tmp_path / "net.ckpt"
    path.write_bytes(b"NOTACKPT" + b"\x00" * 32)
    with pytest.raises(CheckpointError):
        load_checkpoint(str(path))


def test_checkpoint_truncated(tmp_path, rng):
    path = tmp_path / "net.ckpt"
    save_checkpoint(init_mlp([4, 8, 2], rng), str(path))
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(CheckpointError):
        load_checkpoint(str(path))


def test_checkpoint_missing_file(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(str(tmp_path / "absent.ckpt"))
