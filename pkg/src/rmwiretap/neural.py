"""Small fully connected ReLU network with hand-written backprop and Adam.

Everything is float64. Weights are stored ``(fan_in, fan_out)`` so a batch
``x`` of shape ``(l, fan_in)`` maps through ``x @ W + b``.

Checkpoint layout (``.npz``, uncompressed): ``format`` (int, currently 1),
``layer_sizes`` (int64 vector), ``params`` (float64 vector: for each layer
the row-major weight matrix followed by the bias), and optionally
``adam_m``, ``adam_v`` (same layout as ``params``) and ``adam_t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .binmat import ShapeError

CHECKPOINT_FORMAT = 1
INIT_STD = 0.02


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("Adam betas must lie in (0, 1)")


@dataclass
class MlpNet:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    adam_m: list[np.ndarray] = field(default_factory=list)
    adam_v: list[np.ndarray] = field(default_factory=list)
    adam_t: int = 0

    def __post_init__(self):
        if not self.adam_m:
            self.adam_m = [np.zeros_like(p) for p in self.parameters()]
            self.adam_v = [np.zeros_like(p) for p in self.parameters()]

    @property
    def input_width(self) -> int:
        return self.layer_sizes[0]

    def parameters(self) -> list[np.ndarray]:
        """Weights and biases interleaved: ``[W0, b0, W1, b1, ...]``."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def flat_parameters(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.parameters()])

    def copy(self) -> "MlpNet":
        return MlpNet(
            self.layer_sizes,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            [a.copy() for a in self.adam_m],
            [a.copy() for a in self.adam_v],
            self.adam_t,
        )


def _check_sizes(layer_sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 3:
        raise ValueError("need an input layer, at least one hidden layer and an output")
    if any(s <= 0 for s in sizes):
        raise ValueError(f"layer widths must be positive: {sizes}")
    if sizes[-1] != 1:
        raise ValueError("output layer must have width 1")
    return sizes


def mlp_new(layer_sizes: Sequence[int], seed: int, init_std: float = INIT_STD) -> MlpNet:
    sizes = _check_sizes(layer_sizes)
    rng = np.random.default_rng(seed)
    weights = [rng.normal(0.0, init_std, size=(a, b)) for a, b in zip(sizes[:-1], sizes[1:])]
    biases = [np.zeros(b) for b in sizes[1:]]
    return MlpNet(sizes, weights, biases)


def _activations(net: MlpNet, x: np.ndarray) -> list[np.ndarray]:
    acts = [x]
    h = x
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w + b
        if i < last:
            np.maximum(h, 0.0, out=h)
        acts.append(h)
    return acts


def _as_batch(net: MlpNet, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x2 = x.reshape(1, -1) if single else x
    if x2.ndim != 2 or x2.shape[1] != net.input_width:
        raise ShapeError(f"input width {x2.shape[-1]} does not match network input {net.input_width}")
    return x2, single


def forward(net: MlpNet, x):
    """Scalar output for one input vector, or a vector for a batch."""
    x2, single = _as_batch(net, x)
    out = _activations(net, x2)[-1][:, 0]
    return float(out[0]) if single else out


def backward(net: MlpNet, x, upstream, cache: list[np.ndarray] | None = None) -> list[np.ndarray]:
    """Gradients of ``sum_i upstream[i] * forward(net, x[i])``.

    Returned in the order of :meth:`MlpNet.parameters`. ``cache`` may hold
    the activations from a previous forward pass on the same ``x``.
    """
    x2, _ = _as_batch(net, x)
    g = np.asarray(upstream, dtype=np.float64).reshape(-1, 1)
    if g.shape[0] != x2.shape[0]:
        raise ShapeError(f"{g.shape[0]} upstream gradients for {x2.shape[0]} inputs")
    acts = cache if cache is not None else _activations(net, x2)
    grads: list[np.ndarray] = [None] * (2 * len(net.weights))
    for i in range(len(net.weights) - 1, -1, -1):
        grads[2 * i] = acts[i].T @ g
        grads[2 * i + 1] = g.sum(axis=0)
        if i > 0:
            g = (g @ net.weights[i].T) * (acts[i] > 0)
    return grads


def adam_step(net: MlpNet, grads: Sequence[np.ndarray], cfg: AdamConfig) -> MlpNet:
    """One Adam descent step on ``grads``, applied in place."""
    params = net.parameters()
    if len(grads) != len(params):
        raise ShapeError(f"expected {len(params)} gradient arrays, got {len(grads)}")
    net.adam_t += 1
    t = net.adam_t
    c1 = 1.0 - cfg.beta1**t
    c2 = 1.0 - cfg.beta2**t
    for p, g, m, v in zip(params, grads, net.adam_m, net.adam_v):
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape {g.shape} does not match parameter {p.shape}")
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.epsilon)
    return net


def _unflatten(sizes: tuple[int, ...], flat: np.ndarray) -> list[np.ndarray]:
    out, pos = [], 0
    for a, b in zip(sizes[:-1], sizes[1:]):
        out.append(flat[pos : pos + a * b].reshape(a, b).copy())
        pos += a * b
        out.append(flat[pos : pos + b].copy())
        pos += b
    if pos != flat.size:
        raise ValueError(f"parameter vector has {flat.size} entries, layout needs {pos}")
    return out


def save_checkpoint(net: MlpNet, path: str | Path, with_optimizer: bool = True) -> None:
    payload = {
        "format": np.int64(CHECKPOINT_FORMAT),
        "layer_sizes": np.asarray(net.layer_sizes, dtype=np.int64),
        "params": net.flat_parameters(),
    }
    if with_optimizer:
        payload["adam_m"] = np.concatenate([a.ravel() for a in net.adam_m])
        payload["adam_v"] = np.concatenate([a.ravel() for a in net.adam_v])
        payload["adam_t"] = np.int64(net.adam_t)
    with open(path, "wb") as fh:
        np.savez(fh, **payload)


def load_checkpoint(path: str | Path) -> MlpNet:
    with np.load(path) as data:
        if int(data["format"]) != CHECKPOINT_FORMAT:
            raise ValueError(f"unsupported checkpoint format {int(data['format'])}")
        sizes = _check_sizes(data["layer_sizes"].tolist())
        params = _unflatten(sizes, data["params"])
        net = MlpNet(sizes, params[0::2], params[1::2])
        if "adam_m" in data:
            m = _unflatten(sizes, data["adam_m"])
            v = _unflatten(sizes, data["adam_v"])
            net.adam_m, net.adam_v, net.adam_t = m, v, int(data["adam_t"])
    return net
