"""Expansive ReLU generator networks and their masked linearizations.

A generator is a bias-free chain ``x -> relu(W_d ... relu(W_1 x))``
mapping a k-dimensional latent code to an n-dimensional signal.  On the
linear region containing ``x`` the network acts as the matrix product of
its active-weight (row-masked) layers, which is what the analysis and the
descent direction are built from.

The tie rule is fixed once and for all: a row whose pre-activation is
exactly zero counts as inactive (strict ``> 0``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import Rng, gaussian_matrix
from .validation import check_matrix, check_vector

WEIGHT_SCALES = ("two_over_fanout", "one_over_fanout", "external")


@dataclass(frozen=True)
class GeneratorNetwork:
    """Ordered weight matrices ``W_1..W_d`` with widths ``k=n_0 < ... < n_d = n``.

    ``weights[i]`` has shape ``(widths[i+1], widths[i])``.  ``scale`` records
    how the weights were drawn (or ``"external"`` for loaded ones).
    Instances are immutable; all operations on them are pure.
    """

    weights: tuple
    widths: tuple
    scale: str = "external"

    def __post_init__(self):
        weights = tuple(check_matrix(W, name=f"W{i + 1}") for i, W in enumerate(self.weights))
        object.__setattr__(self, "weights", weights)
        if len(weights) < 1:
            raise ValueError("network needs at least one layer")
        widths = tuple(int(w) for w in self.widths)
        if len(widths) != len(weights) + 1:
            raise ValueError(f"widths {widths} do not match {len(weights)} layers")
        if any(w < 1 for w in widths):
            raise ValueError(f"widths must be positive, got {widths}")
        for i, W in enumerate(weights):
            if W.shape != (widths[i + 1], widths[i]):
                raise ValueError(
                    f"layer {i + 1} has shape {W.shape}, expected {(widths[i + 1], widths[i])}"
                )
        object.__setattr__(self, "widths", widths)
        if self.scale not in WEIGHT_SCALES:
            raise ValueError(f"unknown scale {self.scale!r}")

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def latent_dim(self) -> int:
        return self.widths[0]

    @property
    def output_dim(self) -> int:
        return self.widths[-1]

    @property
    def expansive(self) -> bool:
        return all(a < b for a, b in zip(self.widths, self.widths[1:]))


@dataclass(frozen=True, eq=False)
class ActivationPattern:
    """Per-layer boolean activity masks at one latent input.

    ``masks[i][r]`` is True iff the pre-activation of row ``r`` in layer
    ``i+1`` is strictly positive.
    """

    masks: tuple

    def __eq__(self, other):
        if not isinstance(other, ActivationPattern):
            return NotImplemented
        return len(self.masks) == len(other.masks) and all(
            np.array_equal(a, b) for a, b in zip(self.masks, other.masks)
        )


def random_network(rng: Rng, widths, scale="two_over_fanout") -> GeneratorNetwork:
    """Draw a fresh Gaussian network with the given expansive widths.

    ``scale`` selects the per-layer entry variance: ``two_over_fanout``
    gives ``2/n_i`` and ``one_over_fanout`` gives ``1/n_i`` (the rescaled
    model whose layers halve energy).
    """
    widths = tuple(int(w) for w in widths)
    if len(widths) < 2:
        raise ValueError("widths must list the latent dimension and at least one layer")
    if any(a >= b for a, b in zip(widths, widths[1:])):
        raise ValueError(f"random networks must be expansive, got widths {widths}")
    if scale == "two_over_fanout":
        variances = [2.0 / n for n in widths[1:]]
    elif scale == "one_over_fanout":
        variances = [1.0 / n for n in widths[1:]]
    else:
        raise ValueError(f"unknown scale {scale!r}")
    weights = tuple(
        gaussian_matrix(rng.child(i), widths[i + 1], widths[i], variances[i])
        for i in range(len(widths) - 1)
    )
    return GeneratorNetwork(weights=weights, widths=widths, scale=scale)


def _forward_trace(network: GeneratorNetwork, x):
    """Forward pass returning the output and every pre-activation vector."""
    h = x
    preacts = []
    for W in network.weights:
        z = W @ h
        preacts.append(z)
        h = np.maximum(z, 0.0)
    return h, preacts


def forward(network: GeneratorNetwork, x) -> np.ndarray:
    """Evaluate the generator at latent code ``x``."""
    x = check_vector(x, dim=network.latent_dim, name="x")
    out, _ = _forward_trace(network, x)
    return out


def activation_pattern(network: GeneratorNetwork, x) -> ActivationPattern:
    x = check_vector(x, dim=network.latent_dim, name="x")
    _, preacts = _forward_trace(network, x)
    return ActivationPattern(masks=tuple(z > 0 for z in preacts))


def active_weights(W, v) -> np.ndarray:
    """Zero out the rows of ``W`` whose dot product with ``v`` is not positive."""
    W = check_matrix(W, name="W")
    v = check_vector(v, dim=W.shape[1], name="v")
    mask = (W @ v) > 0
    return W * mask[:, None]


def layer_active_weights(network: GeneratorNetwork, x) -> list:
    """Active-weight matrices of every layer at latent input ``x``.

    Applying the returned matrices to ``x`` as a plain linear chain
    reproduces the ReLU forward pass exactly.
    """
    x = check_vector(x, dim=network.latent_dim, name="x")
    _, preacts = _forward_trace(network, x)
    return [W * (z > 0)[:, None] for W, z in zip(network.weights, preacts)]


def lambda_matrix(network: GeneratorNetwork, x) -> np.ndarray:
    """End-to-end linearization: the n-by-k product of active-weight layers."""
    masked = layer_active_weights(network, x)
    L = masked[0]
    for Wm in masked[1:]:
        L = Wm @ L
    return L


def loss(network: GeneratorNetwork, y, x) -> float:
    """Least-squares objective ``0.5 * ||G(x) - y||^2``."""
    y = check_vector(y, dim=network.output_dim, name="y")
    out = forward(network, x)
    diff = out - y
    return 0.5 * float(diff @ diff)
