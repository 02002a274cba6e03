"""Scikit-learn estimator facade over the descent denoiser.

The solver itself is stateless given a generator, so the estimator is a
transformer in the mold of ``SparseCoder``: ``fit`` validates, and
``transform`` runs the latent recovery independently on every row.  This
makes the denoiser usable inside pipelines and grid searches.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .denoiser import DenoiseProblem, DescentConfig, run
from .network import GeneratorNetwork
from .rng import derive
from .validation import check_matrix

_NEGATION_ALIASES = {
    "every_iteration": "every_iteration",
    "on_convergence": "on_convergence",
    "disabled": "disabled",
}


class GenerativePriorDenoiser(TransformerMixin, BaseEstimator):
    """Denoise observations by latent recovery over a fixed generator.

    Parameters
    ----------
    network : GeneratorNetwork
        The frozen generative prior.
    measurement_matrix : ndarray of shape (m, n), optional
        When given, rows of ``X`` are compressed measurements and
        ``transform`` reconstructs full n-dimensional signals.
    alpha, max_iters, tol, negation_mode, init_norm
        Descent parameters, passed through unchanged.
    random_state : int
        Seeds the per-row initializers; row ``i`` always uses the stream
        derived from ``(random_state, i)``, so results are reproducible
        and independent of batching.
    """

    def __init__(
        self,
        network=None,
        measurement_matrix=None,
        alpha=0.1,
        max_iters=10000,
        tol=1e-9,
        negation_mode="every_iteration",
        init_norm=1.0,
        random_state=0,
    ):
        self.network = network
        self.measurement_matrix = measurement_matrix
        self.alpha = alpha
        self.max_iters = max_iters
        self.tol = tol
        self.negation_mode = negation_mode
        self.init_norm = init_norm
        self.random_state = random_state

    def _observation_dim(self) -> int:
        if self.measurement_matrix is not None:
            return np.asarray(self.measurement_matrix).shape[0]
        return self.network.output_dim

    def fit(self, X=None, y=None):
        """Validate the configuration; nothing is learned from ``X``."""
        if not isinstance(self.network, GeneratorNetwork):
            raise ValueError("network must be a GeneratorNetwork")
        if self.measurement_matrix is not None:
            A = check_matrix(self.measurement_matrix, name="measurement_matrix")
            if A.shape[1] != self.network.output_dim:
                raise ValueError(
                    f"measurement_matrix has {A.shape[1]} columns, "
                    f"expected {self.network.output_dim}"
                )
        if self.negation_mode not in _NEGATION_ALIASES:
            raise ValueError(f"unknown negation_mode {self.negation_mode!r}")
        # Instantiating the config validates the numeric parameters.
        self._descent_config()
        if X is not None:
            X = check_matrix(X, name="X")
            if X.shape[1] != self._observation_dim():
                raise ValueError(
                    f"X has {X.shape[1]} features, expected {self._observation_dim()}"
                )
        self.n_features_in_ = self._observation_dim()
        self.latent_dim_ = self.network.latent_dim
        return self

    def _descent_config(self) -> DescentConfig:
        return DescentConfig(
            alpha=self.alpha,
            max_iters=self.max_iters,
            rel_step_tol=self.tol,
            negation_mode=self.negation_mode,
            init_norm=self.init_norm,
        )

    def _check_fitted(self):
        if not hasattr(self, "n_features_in_"):
            raise NotFittedError("call fit before transform")

    def _solve_rows(self, X):
        self._check_fitted()
        X = check_matrix(X, name="X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        config = self._descent_config()
        traces = []
        for i, row in enumerate(X):
            if self.measurement_matrix is not None:
                problem = DenoiseProblem(
                    network=self.network,
                    measurement_matrix=self.measurement_matrix,
                    z=row,
                )
            else:
                problem = DenoiseProblem(network=self.network, y=row)
            traces.append(run(problem, config, derive(self.random_state, i)))
        return traces

    def transform(self, X) -> np.ndarray:
        """Denoised (or reconstructed) signals, one per row of ``X``."""
        return np.array([t.y_hat for t in self._solve_rows(X)])

    def encode(self, X) -> np.ndarray:
        """Recovered latent codes, one per row of ``X``."""
        return np.array([t.x_hat for t in self._solve_rows(X)])

    def denoise_with_traces(self, X):
        """Full per-row descent traces for inspection."""
        return self._solve_rows(X)
