"""Subgradient descent with the negation tweak, plain and compressed.

The objective is ``f(x) = 0.5 ||G(x) - y||^2`` (or
``0.5 ||A G(x) - z||^2`` when measurements were taken through ``A``).
Each iteration first replaces the iterate by its negation whenever that
lowers ``f`` -- the tweak that escapes the basin around the spurious
point opposite the planted code -- then steps against the masked-chain
direction ``Lambda_x^T (G(x) - y)``, which equals the gradient wherever
the piecewise-quadratic objective is differentiable.  At kinks the same
formula is applied verbatim with the strict-positivity masks; under
random data those points have measure zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import GeneratorNetwork, _forward_trace, forward
from .rng import Rng
from .validation import (
    check_matrix,
    check_nonnegative,
    check_positive,
    check_positive_int,
    check_vector,
)

NEGATION_MODES = ("every_iteration", "on_convergence", "disabled")

# Iterates are stored densely up to this index, every 10th afterwards.
_DENSE_TRACE_LIMIT = 1000


@dataclass(frozen=True)
class DenoiseProblem:
    """A noisy observation tied to a fixed generator.

    Plain denoising supplies ``y`` (length n); compressed sensing supplies
    ``z`` (length m) together with the m-by-n ``measurement_matrix``.  The
    optional ground truth fields are for synthetic evaluation only and are
    never read by the solver.
    """

    network: GeneratorNetwork
    y: np.ndarray | None = None
    measurement_matrix: np.ndarray | None = None
    z: np.ndarray | None = None
    x_star: np.ndarray | None = None
    y_star: np.ndarray | None = None
    sigma2: float | None = None

    def __post_init__(self):
        n = self.network.output_dim
        if self.measurement_matrix is None and self.z is None:
            if self.y is None:
                raise ValueError("plain denoising needs an observation y")
            object.__setattr__(self, "y", check_vector(self.y, dim=n, name="y"))
        else:
            if self.measurement_matrix is None or self.z is None:
                raise ValueError("compressed sensing needs both z and measurement_matrix")
            if self.y is not None:
                raise ValueError("give either y or (z, measurement_matrix), not both")
            A = check_matrix(self.measurement_matrix, name="measurement_matrix")
            if A.shape[1] != n:
                raise ValueError(f"measurement_matrix has {A.shape[1]} columns, expected {n}")
            object.__setattr__(self, "measurement_matrix", A)
            object.__setattr__(self, "z", check_vector(self.z, dim=A.shape[0], name="z"))
        if self.x_star is not None:
            object.__setattr__(
                self,
                "x_star",
                check_vector(self.x_star, dim=self.network.latent_dim, name="x_star"),
            )
        if self.y_star is not None:
            object.__setattr__(self, "y_star", check_vector(self.y_star, dim=n, name="y_star"))

    @property
    def compressed(self) -> bool:
        return self.measurement_matrix is not None


@dataclass(frozen=True)
class DescentConfig:
    """Step size, stopping rule, negation mode and initialization."""

    alpha: float = 0.1
    max_iters: int = 10000
    rel_step_tol: float = 1e-9
    negation_mode: str = "every_iteration"
    init: np.ndarray | None = None
    init_norm: float = 1.0

    def __post_init__(self):
        check_positive(self.alpha, "alpha")
        check_positive_int(self.max_iters, "max_iters")
        check_positive(self.rel_step_tol, "rel_step_tol")
        if self.negation_mode not in NEGATION_MODES:
            raise ValueError(
                f"negation_mode must be one of {NEGATION_MODES}, got {self.negation_mode!r}"
            )
        check_positive(self.init_norm, "init_norm")


@dataclass
class DescentTrace:
    """Per-iteration record of one descent run.

    ``losses[i]`` and ``step_norms[i]`` refer to the point actually
    stepped from at iteration ``i`` (after the negation decision).
    ``iterates`` holds the iterate sequence ``x_0, x_1, ...`` thinned to
    every 10th entry beyond iteration 1000; ``iterate_indices`` gives the
    iteration number of each stored row.  ``negation_events`` lists the
    iterations whose negation check fired.
    """

    iterate_indices: np.ndarray
    iterates: np.ndarray
    losses: np.ndarray
    step_norms: np.ndarray
    negation_events: list
    termination: str
    x_hat: np.ndarray
    y_hat: np.ndarray
    n_iters: int = field(init=False)

    def __post_init__(self):
        self.n_iters = int(self.losses.shape[0])

    @property
    def final_loss(self) -> float:
        return float(self.losses[-1])


class DivergenceError(RuntimeError):
    """Raised when the loss turns non-finite; carries the partial trace."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def _objective(problem: DenoiseProblem, x):
    """Loss, generator output and pre-activations at ``x``."""
    out, preacts = _forward_trace(problem.network, x)
    if problem.compressed:
        residual = problem.measurement_matrix @ out - problem.z
    else:
        residual = out - problem.y
    return 0.5 * float(residual @ residual), residual, preacts


def _backward(problem: DenoiseProblem, residual, preacts):
    """Masked-chain transpose applied to the residual."""
    if problem.compressed:
        v = problem.measurement_matrix.T @ residual
    else:
        v = residual
    for W, z in zip(reversed(problem.network.weights), reversed(preacts)):
        v = W.T @ ((z > 0) * v)
    return v


def step_direction(problem: DenoiseProblem, x) -> np.ndarray:
    """Descent direction ``Lambda_x^T (G(x) - y)`` (with ``A`` folded in
    for compressed problems); the gradient of ``f`` wherever ``f`` is
    differentiable."""
    x = check_vector(x, dim=problem.network.latent_dim, name="x")
    _, residual, preacts = _objective(problem, x)
    return _backward(problem, residual, preacts)


class _TraceBuilder:
    def __init__(self, x0):
        self.indices = [0]
        self.iterates = [np.array(x0)]
        self.losses = []
        self.step_norms = []
        self.negation_events = []

    def record_iterate(self, index, x):
        if index <= _DENSE_TRACE_LIMIT or index % 10 == 0:
            self.indices.append(index)
            self.iterates.append(np.array(x))

    def finish(self, termination, network, x_hat, final_index):
        if self.indices[-1] != final_index:
            self.indices.append(final_index)
            self.iterates.append(np.array(x_hat))
        return DescentTrace(
            iterate_indices=np.array(self.indices, dtype=np.int64),
            iterates=np.array(self.iterates),
            losses=np.array(self.losses),
            step_norms=np.array(self.step_norms),
            negation_events=self.negation_events,
            termination=termination,
            x_hat=np.array(x_hat),
            y_hat=forward(network, x_hat),
        )


def run(problem: DenoiseProblem, config: DescentConfig, rng: Rng) -> DescentTrace:
    """Run the tweaked descent until the relative step drops below tolerance.

    With ``negation_mode="every_iteration"`` the sign check precedes each
    step; with ``"on_convergence"`` it runs only once the stopping rule
    fires, resuming descent whenever the negation lowers the objective;
    ``"disabled"`` never negates.  Deterministic given
    ``(problem, config, rng)``.
    """
    k = problem.network.latent_dim
    if config.init is not None:
        x = check_vector(config.init, dim=k, name="init", allow_zero=False)
    else:
        x = rng.unit_vector(k) * config.init_norm

    builder = _TraceBuilder(x)
    termination = "max_iters"
    iteration = 0
    while iteration < config.max_iters:
        fx, residual, preacts = _objective(problem, x)
        if not np.isfinite(fx):
            trace = builder.finish("diverged", problem.network, np.zeros(k), iteration)
            raise DivergenceError(f"non-finite loss at iteration {iteration}", trace)
        if config.negation_mode == "every_iteration":
            fneg, residual_neg, preacts_neg = _objective(problem, -x)
            if fneg < fx:
                x = -x
                fx, residual, preacts = fneg, residual_neg, preacts_neg
                builder.negation_events.append(iteration)
        builder.losses.append(fx)
        direction = _backward(problem, residual, preacts)
        builder.step_norms.append(float(np.linalg.norm(direction)))
        x_next = x - config.alpha * direction
        iteration += 1
        builder.record_iterate(iteration, x_next)
        rel_step = np.linalg.norm(x_next - x) / max(np.linalg.norm(x), 1e-300)
        x = x_next
        if rel_step < config.rel_step_tol:
            if config.negation_mode == "on_convergence" and np.any(x):
                f_now, _, _ = _objective(problem, x)
                f_neg, _, _ = _objective(problem, -x)
                if f_neg < f_now:
                    x = -x
                    builder.negation_events.append(iteration)
                    continue
            termination = "converged"
            break

    if not np.all(np.isfinite(x)):
        trace = builder.finish("diverged", problem.network, np.zeros(k), iteration)
        raise DivergenceError(f"non-finite iterate at iteration {iteration}", trace)
    return builder.finish(termination, problem.network, x, iteration)


@dataclass(frozen=True)
class DenoiseMetrics:
    """Squared-error summary of a finished run against the ground truth."""

    mse_latent: float
    mse_image: float
    mse_latent_normalized: float
    mse_image_normalized: float
    noise_energy: float


def evaluate(problem: DenoiseProblem, trace: DescentTrace) -> DenoiseMetrics:
    """Squared errors of the recovered code and image, plus noise energy."""
    if problem.x_star is None:
        raise ValueError("problem carries no ground truth")
    x_star = problem.x_star
    y_star = problem.y_star
    if y_star is None:
        y_star = forward(problem.network, x_star)
    mse_latent = float(np.sum((trace.x_hat - x_star) ** 2))
    mse_image = float(np.sum((trace.y_hat - y_star) ** 2))
    norm_x2 = float(x_star @ x_star)
    norm_y2 = float(y_star @ y_star)
    if problem.compressed:
        noise = problem.z - problem.measurement_matrix @ y_star
    else:
        noise = problem.y - y_star
    return DenoiseMetrics(
        mse_latent=mse_latent,
        mse_image=mse_image,
        mse_latent_normalized=mse_latent / norm_x2 if norm_x2 > 0 else float("inf"),
        mse_image_normalized=mse_image / norm_y2 if norm_y2 > 0 else float("inf"),
        noise_energy=float(noise @ noise),
    )


def noise_scale_omega(sigma2, k, widths, variant="main") -> float:
    """Effective noise scale ``sqrt(coeff sigma^2 (k/n) log(n_1^d ... n_d))``.

    ``variant`` picks the coefficient: 18 for the main-theorem form, 16
    for the noise-event form.  The log of the width product is accumulated
    as a sum of logs so deep networks cannot overflow.
    """
    sigma2 = check_nonnegative(sigma2, "sigma2")
    k = check_positive_int(k, "k")
    coeffs = {"main": 18.0, "lemma": 16.0}
    if variant not in coeffs:
        raise ValueError(f"variant must be one of {sorted(coeffs)}, got {variant!r}")
    widths = [check_positive_int(n, "width") for n in widths]
    if not widths:
        raise ValueError("widths must be non-empty")
    d = len(widths)
    n = widths[-1]
    log_term = sum((d - i) * np.log(w) for i, w in enumerate(widths))
    return float(np.sqrt(coeffs[variant] * sigma2 * (k / n) * log_term))
