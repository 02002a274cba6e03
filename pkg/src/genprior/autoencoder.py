"""Encoder-generator pipelines and the subspace denoising baseline.

An hourglass network ``H(y) = G(relu(W' y))`` is piecewise linear: around
any input it acts as an n-by-n matrix ``U`` of rank at most k, built from
the active rows of the encoder and of every decoder layer.  Passing pure
noise through ``H`` therefore retains only the energy caught by one of
finitely many k-dimensional subspaces, which is the mechanism behind the
``5 (k/n) log(2 n_1 ... n_d)`` attenuation bound measured here.  The
classical k-dimensional-subspace projector is included as the baseline
with the same ``k/n`` rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import project_onto_span, spectral_norm
from .network import GeneratorNetwork, forward, layer_active_weights, random_network
from .rng import Rng, gaussian_matrix
from .validation import check_matrix, check_positive, check_positive_int, check_vector

ENCODER_SCALES = ("one_over_fanin", "two_over_fanin", "two_over_fanout")


@dataclass(frozen=True)
class Autoencoder:
    """One-layer ReLU encoder ``R^n -> R^k`` followed by a generator decoder."""

    encoder_weights: np.ndarray
    decoder: GeneratorNetwork

    def __post_init__(self):
        W = check_matrix(self.encoder_weights, name="encoder_weights")
        if W.shape != (self.decoder.latent_dim, self.decoder.output_dim):
            raise ValueError(
                f"encoder shape {W.shape} does not match decoder "
                f"({self.decoder.latent_dim} -> {self.decoder.output_dim})"
            )
        object.__setattr__(self, "encoder_weights", W)

    @property
    def latent_dim(self) -> int:
        return self.decoder.latent_dim

    @property
    def signal_dim(self) -> int:
        return self.decoder.output_dim


def random_autoencoder(rng: Rng, widths, encoder_scale="one_over_fanin") -> Autoencoder:
    """Random Gaussian autoencoder over decoder widths ``(k, n_1, ..., n_d)``.

    The attenuation statement makes no assumption on the weights but is
    conditional on the local gain ``||U||^2 <= 2``.  The default encoder
    variance ``1/n`` keeps that gain near one, so the hypothesis actually
    holds for most noise draws at the sizes tested here; the fan-out
    variants (``2/n`` and especially ``2/k``) inflate ``||U||^2`` far past
    2 and leave the conditional statement empty.
    """
    widths = tuple(int(w) for w in widths)
    decoder = random_network(rng.child(0), widths, scale="two_over_fanout")
    k, n = widths[0], widths[-1]
    if encoder_scale == "one_over_fanin":
        variance = 1.0 / n
    elif encoder_scale == "two_over_fanin":
        variance = 2.0 / n
    elif encoder_scale == "two_over_fanout":
        variance = 2.0 / k
    else:
        raise ValueError(f"encoder_scale must be one of {ENCODER_SCALES}")
    W_enc = gaussian_matrix(rng.child(1), k, n, variance)
    return Autoencoder(encoder_weights=W_enc, decoder=decoder)


def encode(autoencoder: Autoencoder, y) -> np.ndarray:
    y = check_vector(y, dim=autoencoder.signal_dim, name="y")
    return np.maximum(autoencoder.encoder_weights @ y, 0.0)


def apply(autoencoder: Autoencoder, y) -> np.ndarray:
    """Full pipeline ``G(relu(W' y))``; maps 0 to 0."""
    return forward(autoencoder.decoder, encode(autoencoder, y))


def local_linearization(autoencoder: Autoencoder, y) -> np.ndarray:
    """The n-by-n matrix ``U`` with ``H(y) = U y`` on the region of ``y``.

    Product of the decoder's active-weight chain at the code of ``y`` with
    the row-masked encoder; its rank is at most k.
    """
    y = check_vector(y, dim=autoencoder.signal_dim, name="y")
    pre_code = autoencoder.encoder_weights @ y
    enc_masked = autoencoder.encoder_weights * (pre_code > 0)[:, None]
    code = np.maximum(pre_code, 0.0)
    chain = layer_active_weights(autoencoder.decoder, code)
    L = chain[0]
    for Wm in chain[1:]:
        L = Wm @ L
    return L @ enc_masked


def attenuation_bound(autoencoder: Autoencoder) -> float:
    """``5 (k/n) log(2 n_1 ... n_d)`` for this architecture."""
    widths = autoencoder.decoder.widths
    k, n = widths[0], widths[-1]
    return 5.0 * (k / n) * (np.log(2.0) + float(np.sum(np.log(widths[1:]))))


@dataclass(frozen=True)
class AttenuationRecord:
    """One noise-attenuation measurement.

    ``ratio = ||H(eta)||^2 / ||eta||^2`` against the architecture bound;
    ``local_spec_norm`` is ``||U||^2`` on the region of the drawn noise,
    reported so trials violating the no-amplification hypothesis can be
    set aside.
    """

    ratio: float
    bound: float
    local_spec_norm: float


def attenuation_trial(autoencoder: Autoencoder, rng: Rng, sigma2) -> AttenuationRecord:
    """Pass one draw ``eta ~ N(0, sigma2/n I)`` through the autoencoder."""
    sigma2 = check_positive(sigma2, "sigma2")
    n = autoencoder.signal_dim
    eta = rng.gaussian(n, sigma2 / n)
    out = apply(autoencoder, eta)
    energy = float(eta @ eta)
    ratio = float(out @ out) / energy
    U = local_linearization(autoencoder, eta)
    spec = spectral_norm(U) if U.any() else 0.0
    return AttenuationRecord(
        ratio=ratio, bound=attenuation_bound(autoencoder), local_spec_norm=spec**2
    )


def count_region_bound(widths, k) -> float:
    """Log of the linear-region subspace count bound: ``k log 2 + k sum_i log n_i``."""
    k = int(k)
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    widths = [check_positive_int(n, "width") for n in widths]
    return k * (np.log(2.0) + float(np.sum(np.log(widths))))


def subspace_denoise(basis, y) -> np.ndarray:
    """Closest point to ``y`` in the span of the basis columns."""
    return project_onto_span(basis, y)
