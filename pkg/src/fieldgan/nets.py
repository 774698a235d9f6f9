"""Minimal fully-connected networks with hand-rolled reverse mode.

Everything the two-network trainer needs and nothing more: dense layers,
three activations, exact batched gradients, Adam, and a JSON checkpoint
format whose floats survive a save/load round trip bit for bit (json uses
repr, the shortest exact representation of a double).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import InputError

CHECKPOINT_FORMAT_VERSION = 1


def _elu(z):
    # alpha = 1; expm1 keeps the negative branch accurate near zero.
    # np.where evaluates both branches, so clamp the exp argument to
    # keep large positive preactivations from overflowing.
    return np.where(z > 0.0, z, np.expm1(np.minimum(z, 0.0)))


def _elu_prime(z):
    return np.where(z > 0.0, 1.0, np.exp(np.minimum(z, 0.0)))


ACTIVATIONS = {
    "elu": (_elu, _elu_prime),
    "tanh": (np.tanh, lambda z: 1.0 - np.tanh(z) ** 2),
    "linear": (lambda z: z, lambda z: np.ones_like(z)),
}


@dataclass
class Mlp:
    """Dense stack: h_k = act_k(h_{k-1} @ W_k^T + b_k), h_0 = input.

    weights[k] has shape (widths[k+1], widths[k]), one row per output unit.
    """

    weights: list
    biases: list
    activations: list

    @property
    def layer_widths(self) -> list:
        """[input_dim, hidden..., output_dim]"""
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[0]


def init_mlp(layer_widths, activations, rng: np.random.Generator) -> Mlp:
    """Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases."""
    if len(layer_widths) < 2:
        raise InputError("need at least input and output widths")
    if len(activations) != len(layer_widths) - 1:
        raise InputError(
            f"{len(layer_widths) - 1} layers need {len(layer_widths) - 1} "
            f"activations, got {len(activations)}"
        )
    for name in activations:
        if name not in ACTIVATIONS:
            raise InputError(f"unknown activation {name!r}; available: {sorted(ACTIVATIONS)}")
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_widths[:-1], layer_widths[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(weights=weights, biases=biases, activations=list(activations))


def forward(net: Mlp, x) -> np.ndarray:
    """net(x): a single point (m,) -> (d_out,), or a batch (n, m) -> (n, d_out)."""
    y, _ = forward_cached(net, x)
    return y


def forward_cached(net: Mlp, x):
    """Forward pass keeping pre-activations and layer inputs for backward."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise InputError(f"expected input of shape (n, {net.input_dim}), got {x.shape}")
    inputs, pre_acts = [], []
    h = x
    for w, b, name in zip(net.weights, net.biases, net.activations):
        inputs.append(h)
        z = h @ w.T + b
        pre_acts.append(z)
        h = ACTIVATIONS[name][0](z)
    if single:
        h = h[0]
    return h, (inputs, pre_acts)


@dataclass
class Gradients:
    d_weights: list
    d_biases: list
    d_input: np.ndarray


def backward(net: Mlp, cache, grad_out) -> Gradients:
    """Reverse mode through the cached forward pass.

    ``grad_out`` is dL/d(output), shape (n, d_out), with any 1/n batch
    factor already applied; parameter gradients come back summed over the
    batch, matching that convention.  A 1-D grad_out pairs with a 1-D
    forward input.
    """
    inputs, pre_acts = cache
    delta = np.asarray(grad_out, dtype=np.float64)
    if delta.ndim == 1:
        delta = delta[None, :]
    if delta.shape != (inputs[0].shape[0], net.output_dim):
        raise InputError(
            f"grad_out shape {np.shape(grad_out)} does not match cached "
            f"forward of {inputs[0].shape[0]} points, output dim {net.output_dim}"
        )
    d_weights = [None] * len(net.weights)
    d_biases = [None] * len(net.biases)
    for k in range(len(net.weights) - 1, -1, -1):
        delta = delta * ACTIVATIONS[net.activations[k]][1](pre_acts[k])
        d_weights[k] = delta.T @ inputs[k]
        d_biases[k] = delta.sum(axis=0)
        delta = delta @ net.weights[k]
    return Gradients(d_weights=d_weights, d_biases=d_biases, d_input=delta)


@dataclass
class AdamState:
    """Adam moments plus the hyperparameters that travel with them.

    ``learning_rate`` is mutable on purpose: schedules decay it in place
    between steps.  ``weight_decay`` adds wd * w to each weight gradient
    before the moment update (plain L2 seen through the adaptive scaling;
    biases are not decayed).
    """

    learning_rate: float
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    m_weights: list = None
    v_weights: list = None
    m_biases: list = None
    v_biases: list = None


def init_adam(net: Mlp, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8, weight_decay: float = 0.0) -> AdamState:
    if not learning_rate > 0:
        raise InputError(f"learning_rate must be > 0, got {learning_rate}")
    return AdamState(
        learning_rate=learning_rate,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
        weight_decay=weight_decay,
        m_weights=[np.zeros_like(w) for w in net.weights],
        v_weights=[np.zeros_like(w) for w in net.weights],
        m_biases=[np.zeros_like(b) for b in net.biases],
        v_biases=[np.zeros_like(b) for b in net.biases],
    )


def adam_update(net: Mlp, grads: Gradients, state: AdamState) -> None:
    """One Adam step with bias-corrected moments, updating net in place."""
    state.step += 1
    correct1 = 1.0 - state.beta1 ** state.step
    correct2 = 1.0 - state.beta2 ** state.step

    def update(param, grad, m, v):
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad ** 2
        param -= state.learning_rate * (m / correct1) / (np.sqrt(v / correct2) + state.eps)

    for k in range(len(net.weights)):
        g_w = grads.d_weights[k]
        if state.weight_decay:
            g_w = g_w + state.weight_decay * net.weights[k]
        update(net.weights[k], g_w, state.m_weights[k], state.v_weights[k])
        update(net.biases[k], grads.d_biases[k], state.m_biases[k], state.v_biases[k])


def save_checkpoint(net: Mlp, path, adam: AdamState | None = None) -> None:
    """Write the network (and optionally optimizer state) as JSON.

    The write is atomic: a temp file in the same directory is renamed over
    the target, so a crash never leaves a half-written checkpoint.
    """
    payload = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "layer_widths": net.layer_widths,
        "activations": list(net.activations),
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "adam_state": None if adam is None else {
            "learning_rate": adam.learning_rate,
            "step": adam.step,
            "beta1": adam.beta1,
            "beta2": adam.beta2,
            "eps": adam.eps,
            "weight_decay": adam.weight_decay,
            "m_weights": [m.tolist() for m in adam.m_weights],
            "v_weights": [v.tolist() for v in adam.v_weights],
            "m_biases": [m.tolist() for m in adam.m_biases],
            "v_biases": [v.tolist() for v in adam.v_biases],
        },
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        json.dump(payload, f)
    os.replace(tmp, path)


def load_checkpoint(path):
    """Read a checkpoint back; returns (net, adam_state_or_None)."""
    with open(path) as f:
        payload = json.load(f)
    version = payload.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise InputError(f"unsupported checkpoint format_version: {version!r}")
    net = Mlp(
        weights=[np.array(w, dtype=np.float64) for w in payload["weights"]],
        biases=[np.array(b, dtype=np.float64) for b in payload["biases"]],
        activations=list(payload["activations"]),
    )
    if net.layer_widths != list(payload["layer_widths"]):
        raise InputError("checkpoint layer_widths disagree with stored arrays")
    raw = payload["adam_state"]
    adam = None
    if raw is not None:
        adam = AdamState(
            learning_rate=raw["learning_rate"],
            step=raw["step"],
            beta1=raw["beta1"],
            beta2=raw["beta2"],
            eps=raw["eps"],
            weight_decay=raw["weight_decay"],
            m_weights=[np.array(m, dtype=np.float64) for m in raw["m_weights"]],
            v_weights=[np.array(v, dtype=np.float64) for v in raw["v_weights"]],
            m_biases=[np.array(m, dtype=np.float64) for m in raw["m_biases"]],
            v_biases=[np.array(v, dtype=np.float64) for v in raw["v_biases"]],
        )
    return net, adam
