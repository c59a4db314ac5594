"""Dense feedforward network with hand-written backprop and an Adam optimizer.

Everything is float64 numpy. Networks map a scalar coordinate to a scalar
output; a batch of inputs is a 1-D array and the forward pass treats it as a
column of shape ``(N, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

ACTIVATIONS = ("sigmoid", "identity", "relu")


def _activate(tag: str, z: np.ndarray) -> np.ndarray:
    if tag == "sigmoid":
        return expit(z)
    if tag == "identity":
        return z
    if tag == "relu":
        return np.maximum(z, 0.0)
    raise ValueError(f"unknown activation {tag!r}")


def _activate_grad(tag: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Derivative of the activation, given pre-activation ``z`` and output ``a``."""
    if tag == "sigmoid":
        return a * (1.0 - a)
    if tag == "identity":
        return np.ones_like(z)
    if tag == "relu":
        return (z > 0).astype(np.float64)
    raise ValueError(f"unknown activation {tag!r}")


@dataclass
class DenseNetwork:
    """Weights ``weights[k]`` have shape ``(layer_dims[k+1], layer_dims[k])``."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "sigmoid"
    output_activation: str = "identity"

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("need one bias vector per weight matrix")
        for tag in (self.hidden_activation, self.output_activation):
            if tag not in ACTIVATIONS:
                raise ValueError(f"unknown activation {tag!r}")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValueError(f"layer {k}: weight {w.shape} / bias {b.shape} mismatch")
            if k and w.shape[1] != self.weights[k - 1].shape[0]:
                raise ValueError(f"layer {k}: input width does not match layer {k - 1}")

    @property
    def layer_dims(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def copy(self) -> DenseNetwork:
        return replace(
            self,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )

    def flat(self) -> np.ndarray:
        """All parameters as one vector, layer by layer (weights then bias)."""
        return _flatten(self.weights, self.biases)

    def with_flat(self, theta: np.ndarray) -> DenseNetwork:
        ws, bs = _unflatten(theta, self.weights, self.biases)
        return replace(self, weights=ws, biases=bs)

    def __call__(self, xs) -> np.ndarray:
        return forward(self, xs)


@dataclass
class ParamGradient:
    """Gradient of a scalar loss with respect to every network parameter."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def flat(self) -> np.ndarray:
        return _flatten(self.weights, self.biases)

    def __mul__(self, c: float) -> ParamGradient:
        return ParamGradient([c * w for w in self.weights], [c * b for b in self.biases])

    __rmul__ = __mul__

    def __add__(self, other: ParamGradient) -> ParamGradient:
        return ParamGradient(
            [a + b for a, b in zip(self.weights, other.weights)],
            [a + b for a, b in zip(self.biases, other.biases)],
        )


def _flatten(ws, bs) -> np.ndarray:
    parts = []
    for w, b in zip(ws, bs):
        parts.append(w.ravel())
        parts.append(b.ravel())
    return np.concatenate(parts)


def _unflatten(theta, ws_like, bs_like):
    theta = np.asarray(theta, dtype=np.float64)
    ws, bs, i = [], [], 0
    for w, b in zip(ws_like, bs_like):
        ws.append(theta[i:i + w.size].reshape(w.shape).copy())
        i += w.size
        bs.append(theta[i:i + b.size].copy())
        i += b.size
    if i != theta.size:
        raise ValueError(f"expected {i} parameters, got {theta.size}")
    return ws, bs


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_network(
    layer_dims=(1, 128, 128, 1),
    seed: int = 42,
    hidden_activation: str = "sigmoid",
    output_activation: str = "identity",
) -> DenseNetwork:
    """Glorot-uniform weights, zero biases, drawn from ``numpy.random.default_rng(seed)``."""
    dims = list(layer_dims)
    if len(dims) < 2:
        raise ValueError("layer_dims needs at least an input and an output width")
    if any(int(d) != d or d < 1 for d in dims):
        raise ValueError(f"layer widths must be positive integers, got {dims}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = glorot_bound(fan_in, fan_out)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return DenseNetwork(weights, biases, hidden_activation, output_activation)


def forward_cache(net: DenseNetwork, xs):
    """Pre- and post-activations of every layer, for reuse by :func:`backward`."""
    xs = np.asarray(xs, dtype=np.float64)
    a = xs.reshape(-1, net.weights[0].shape[1])
    pre, post = [], [a]
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w.T + b
        a = _activate(net.output_activation if k == last else net.hidden_activation, z)
        pre.append(z)
        post.append(a)
    return pre, post


def forward(net: DenseNetwork, xs) -> np.ndarray:
    """Evaluate the network at every entry of ``xs``; returns an array of the same length."""
    _, post = forward_cache(net, xs)
    out = post[-1]
    assert np.all(np.isfinite(out)), "non-finite network output"
    return out[:, 0] if out.shape[1] == 1 else out


def backward(net: DenseNetwork, xs, upstream, cache=None) -> ParamGradient:
    """Return ``sum_i upstream[i] * dF(xs[i])/dtheta`` for every parameter theta.

    ``cache`` is the result of ``forward_cache(net, xs)`` if the caller already has it.
    """
    xs = np.asarray(xs, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    if xs.shape[0] != upstream.shape[0]:
        raise ValueError(f"{xs.shape[0]} inputs but {upstream.shape[0]} upstream values")
    pre, post = cache if cache is not None else forward_cache(net, xs)
    delta = upstream.reshape(post[-1].shape)
    last = len(net.weights) - 1
    gw: list[np.ndarray] = [None] * len(net.weights)
    gb: list[np.ndarray] = [None] * len(net.weights)
    for k in range(last, -1, -1):
        tag = net.output_activation if k == last else net.hidden_activation
        delta = delta * _activate_grad(tag, pre[k], post[k + 1])
        gw[k] = delta.T @ post[k]
        gb[k] = delta.sum(axis=0)
        if k:
            delta = delta @ net.weights[k]
    return ParamGradient(gw, gb)


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: np.ndarray | None = field(default=None, repr=False)
    v: np.ndarray | None = field(default=None, repr=False)


def adam_step(net: DenseNetwork, grad: ParamGradient, state: AdamState):
    """One bias-corrected Adam update. Returns ``(new_net, new_state)``; inputs are not modified."""
    g = grad.flat()
    theta = net.flat()
    if g.shape != theta.shape or any(
        gw.shape != w.shape for gw, w in zip(grad.weights, net.weights)
    ):
        raise ValueError("gradient shapes do not match the network")
    m = np.zeros_like(theta) if state.m is None else state.m
    v = np.zeros_like(theta) if state.v is None else state.v
    if m.shape != theta.shape or v.shape != theta.shape:
        raise ValueError("optimizer moments do not match the network")
    t = state.t + 1
    m = state.beta1 * m + (1.0 - state.beta1) * g
    v = state.beta2 * v + (1.0 - state.beta2) * g * g
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    theta = theta - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return net.with_flat(theta), replace(state, t=t, m=m, v=v)
