#!/usr/bin/env python3
"""Small multilayer perceptron with reverse-mode gradients, Adam and checkpoints."""

import os
import struct
from dataclasses import dataclass, field

import numpy as np

HIDDEN_ACTIVATIONS = ("relu", "linear")
OUTPUT_ACTIVATIONS = ("linear", "tanh", "sigmoid")
SATURATION_EPS = np.finfo(float).eps

CHECKPOINT_MAGIC = b"RSMAICKP"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<8sII")


class ShapeMismatch(ValueError):
    """輸入或參數維度不符"""


class CheckpointError(Exception):
    """檢查點檔案無法讀取或格式錯誤"""


@dataclass
class MlpParameters:
    """權重 (in, out) 與偏差的有序串列"""

    weights: list
    biases: list
    hidden_activation: str = "relu"
    output_activation: str = "linear"

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeMismatch("權重與偏差層數不符")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ShapeMismatch(f"第 {k} 層形狀錯誤: W {w.shape}, b {b.shape}")
            if k > 0 and self.weights[k - 1].shape[1] != w.shape[0]:
                raise ShapeMismatch(f"第 {k} 層輸入 {w.shape[0]} 與前一層輸出不符")
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(f"未知的隱藏層激活函數: {self.hidden_activation}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"未知的輸出激活函數: {self.output_activation}")

    @property
    def dims(self):
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def input_size(self):
        return self.weights[0].shape[0]

    @property
    def output_size(self):
        return self.weights[-1].shape[1]

    def copy(self):
        return MlpParameters(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.hidden_activation,
            self.output_activation,
        )

    def zeros_like(self):
        return MlpParameters(
            [np.zeros_like(w) for w in self.weights],
            [np.zeros_like(b) for b in self.biases],
            self.hidden_activation,
            self.output_activation,
        )

    def is_finite(self):
        return all(np.all(np.isfinite(a)) for a in self.weights + self.biases)


@dataclass
class ForwardCache:
    inputs: list = field(default_factory=list)
    pre_activations: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    batched: bool = True


@dataclass
class AdamState:
    m: MlpParameters
    v: MlpParameters
    step: int = 0
    learning_rate: float = 5e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def init_mlp(dims, rng, output_activation="linear", hidden_activation="relu"):
    """每層權重與偏差取 U(−1/√fan_in, 1/√fan_in)"""
    if len(dims) < 2:
        raise ShapeMismatch(f"至少需要輸入與輸出維度，收到 {dims}")
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpParameters(weights, biases, hidden_activation, output_activation)


def network_dims(input_size, output_size, hidden_size=64, n_layers=5):
    """n_layers 個權重層：input → hidden × (n_layers−1) → output"""
    if n_layers < 1:
        raise ValueError(f"層數至少為 1，收到 {n_layers}")
    return [input_size] + [hidden_size] * (n_layers - 1) + [output_size]


def activate(name, z):
    """輸出頭保持在開區間：tanh ∈ (−1, 1)、sigmoid ∈ (0, 1)"""
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.clip(np.tanh(z), -1.0 + SATURATION_EPS, 1.0 - SATURATION_EPS)
    if name == "sigmoid":
        return np.clip(0.5 * (1.0 + np.tanh(0.5 * z)), SATURATION_EPS, 1.0 - SATURATION_EPS)
    return z


def _activation_grad(name, z, y):
    if name == "relu":
        return (z > 0).astype(float)
    if name == "tanh":
        return 1.0 - y * y
    if name == "sigmoid":
        return y * (1.0 - y)
    return np.ones_like(z)


def forward(params, x):
    """前向傳遞；x 為向量或 (batch, input) 矩陣

    Returns:
        (輸出, ForwardCache)
    """
    x = np.asarray(x, dtype=float)
    batched = x.ndim == 2
    h = x if batched else x.reshape(1, -1)
    if h.ndim != 2 or h.shape[1] != params.input_size:
        raise ShapeMismatch(f"輸入維度 {x.shape} 與網路輸入 {params.input_size} 不符")

    cache = ForwardCache(batched=batched)
    last = len(params.weights) - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        cache.inputs.append(h)
        z = h @ w + b
        name = params.output_activation if k == last else params.hidden_activation
        h = activate(name, z)
        cache.pre_activations.append(z)
        cache.outputs.append(h)
    return (h if batched else h[0]), cache


def backward(params, cache, grad_out):
    """反向傳遞；參數梯度對批次加總

    Returns:
        (參數梯度 MlpParameters, 輸入梯度)
    """
    g = np.asarray(grad_out, dtype=float)
    if not cache.batched:
        g = g.reshape(1, -1)
    if g.shape != cache.outputs[-1].shape:
        raise ShapeMismatch(f"輸出梯度 {g.shape} 與前向輸出 {cache.outputs[-1].shape} 不符")

    grads = params.zeros_like()
    last = len(params.weights) - 1
    for k in range(last, -1, -1):
        name = params.output_activation if k == last else params.hidden_activation
        delta = g * _activation_grad(name, cache.pre_activations[k], cache.outputs[k])
        grads.weights[k] = cache.inputs[k].T @ delta
        grads.biases[k] = delta.sum(axis=0)
        g = delta @ params.weights[k].T
    return grads, (g if cache.batched else g[0])


def grad_norm(grads):
    return float(np.sqrt(sum(np.sum(a * a) for a in grads.weights + grads.biases)))


def adam_init(params, learning_rate=5e-5, beta1=0.9, beta2=0.999, eps=1e-8):
    return AdamState(params.zeros_like(), params.zeros_like(), 0, learning_rate, beta1, beta2, eps)


def adam_step(params, grads, state):
    """偏差修正的 Adam 更新（梯度下降方向）

    Returns:
        (新參數, 新狀態)
    """
    if params.dims != grads.dims:
        raise ShapeMismatch(f"梯度維度 {grads.dims} 與參數 {params.dims} 不符")
    step = state.step + 1
    b1, b2 = state.beta1, state.beta2
    new_params = params.copy()
    new_m = state.m.copy()
    new_v = state.v.copy()
    correction1 = 1.0 - b1**step
    correction2 = 1.0 - b2**step

    for group in ("weights", "biases"):
        p_list = getattr(new_params, group)
        m_list = getattr(new_m, group)
        v_list = getattr(new_v, group)
        for k, g in enumerate(getattr(grads, group)):
            m_list[k] = b1 * m_list[k] + (1.0 - b1) * g
            v_list[k] = b2 * v_list[k] + (1.0 - b2) * g * g
            m_hat = m_list[k] / correction1
            v_hat = v_list[k] / correction2
            p_list[k] = p_list[k] - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)

    new_state = AdamState(new_m, new_v, step, state.learning_rate, b1, b2, state.eps)
    return new_params, new_state


def mse_loss_and_grad(pred, target):
    """(1/B)·Σ(pred − target)² 與其梯度"""
    pred = np.asarray(pred, dtype=float).ravel()
    target = np.asarray(target, dtype=float).ravel()
    if pred.shape != target.shape:
        raise ShapeMismatch(f"預測 {pred.shape} 與目標 {target.shape} 長度不符")
    diff = pred - target
    n = diff.size
    return float(np.sum(diff * diff) / n), 2.0 * diff / n


def soft_update(target, online, tau):
    """target ← τ·online + (1−τ)·target"""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau 必須在 [0, 1]，收到 {tau}")
    if target.dims != online.dims:
        raise ShapeMismatch(f"目標網路 {target.dims} 與線上網路 {online.dims} 不符")
    return MlpParameters(
        [tau * w + (1.0 - tau) * tw for tw, w in zip(target.weights, online.weights)],
        [tau * b + (1.0 - tau) * tb for tb, b in zip(target.biases, online.biases)],
        target.hidden_activation,
        target.output_activation,
    )


def _pack_tag(tag):
    raw = tag.encode("ascii")
    return struct.pack("<I", len(raw)) + raw


def save_checkpoint(params, path):
    """寫入檢查點：標頭（magic、版本、層維度、激活函數）後接 little-endian float64"""
    dims = params.dims
    parts = [
        _HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(params.weights)),
        struct.pack(f"<{len(dims)}I", *dims),
        _pack_tag(params.hidden_activation),
        _pack_tag(params.output_activation),
    ]
    for w, b in zip(params.weights, params.biases):
        parts.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(b, dtype="<f8").tobytes())

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    try:
        with open(path, "wb") as f:
            f.write(b"".join(parts))
    except OSError as e:
        raise CheckpointError(f"無法寫入檢查點 {path}: {e}") from e


def _read_tag(data, offset):
    (length,) = struct.unpack_from("<I", data, offset)
    offset += 4
    return data[offset:offset + length].decode("ascii"), offset + length


def load_checkpoint(path, expected_dims=None):
    """讀取檢查點，expected_dims 不符時拋出 ShapeMismatch"""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise CheckpointError(f"無法讀取檢查點 {path}: {e}") from e

    try:
        magic, version, n_layers = _HEADER.unpack_from(data, 0)
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointError(f"{path} 不是檢查點檔案")
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(f"不支援的檢查點版本 {version}")
        offset = _HEADER.size
        dims = list(struct.unpack_from(f"<{n_layers + 1}I", data, offset))
        offset += 4 * (n_layers + 1)
        hidden, offset = _read_tag(data, offset)
        output, offset = _read_tag(data, offset)
    except (struct.error, UnicodeDecodeError) as e:
        raise CheckpointError(f"檢查點標頭損壞: {path}") from e

    if expected_dims is not None and list(expected_dims) != dims:
        raise ShapeMismatch(f"檢查點維度 {dims} 與預期 {list(expected_dims)} 不符")

    expected_bytes = 8 * sum(a * b + b for a, b in zip(dims[:-1], dims[1:]))
    if len(data) - offset != expected_bytes:
        raise CheckpointError(f"檢查點資料長度錯誤: {len(data) - offset} != {expected_bytes}")

    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        w = np.frombuffer(data, dtype="<f8", count=fan_in * fan_out, offset=offset)
        offset += 8 * fan_in * fan_out
        b = np.frombuffer(data, dtype="<f8", count=fan_out, offset=offset)
        offset += 8 * fan_out
        weights.append(w.reshape(fan_in, fan_out).astype(float))
        biases.append(b.astype(float))
    try:
        return MlpParameters(weights, biases, hidden, output)
    except ValueError as e:
        raise CheckpointError(f"檢查點內容無效: {e}") from e
