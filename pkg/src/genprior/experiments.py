"""Seeded sweep harness, least-squares fits, and CSV emission.

A sweep point is a swept value (latent dimension or noise variance) with
``trials`` independent problem instances.  Every trial derives its own
random stream from ``(base_seed, point * 10**6 + trial)`` and from that a
fresh network, planted code, noise, measurement matrix and initializer,
so trials can run in any order (or concurrently) and the emitted CSV is
byte-identical across repeats.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .denoiser import (
    DenoiseProblem,
    DescentConfig,
    DivergenceError,
    evaluate,
    run,
)
from .landscape import h_of_x, make_context
from .network import forward, loss, random_network
from .rng import derive, gaussian_matrix
from .validation import check_nonnegative, check_positive_int, check_vector

SWEEP_MODES = ("sweep_k", "sweep_sigma", "cs_sweep")

CSV_HEADER = "point,trial,seed,k,n,m,sigma2,mse_latent,mse_image,noise_energy,iters,negations,status"


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: mode, fixed parameters, swept values, trial count, seed."""

    mode: str
    values: tuple
    widths: tuple
    k: int | None = None
    sigma2: float | None = None
    m: int | None = None
    trials: int = 20
    base_seed: int = 0
    descent: DescentConfig = field(default_factory=DescentConfig)

    def __post_init__(self):
        if self.mode not in SWEEP_MODES:
            raise ValueError(f"mode must be one of {SWEEP_MODES}, got {self.mode!r}")
        values = tuple(self.values)
        if not values:
            raise ValueError("swept values list must be nonempty")
        object.__setattr__(self, "values", values)
        widths = tuple(check_positive_int(w, "width") for w in self.widths)
        if not widths:
            raise ValueError("widths must list at least one hidden layer")
        object.__setattr__(self, "widths", widths)
        check_positive_int(self.trials, "trials")
        if self.mode == "sweep_k":
            if self.sigma2 is None:
                raise ValueError("sweep_k needs a fixed sigma2")
            check_nonnegative(self.sigma2, "sigma2")
            for v in values:
                check_positive_int(v, "swept k")
        else:
            if self.k is None:
                raise ValueError(f"{self.mode} needs a fixed k")
            check_positive_int(self.k, "k")
            for v in values:
                check_nonnegative(v, "swept sigma2")
        if self.mode == "cs_sweep":
            if self.m is None:
                raise ValueError("cs_sweep needs the number of measurements m")
            check_positive_int(self.m, "m")


@dataclass(frozen=True)
class SweepRow:
    point: int
    trial: int
    seed: int
    k: int
    n: int
    m: int
    sigma2: float
    mse_latent: float
    mse_image: float
    noise_energy: float
    iters: float
    negations: float
    status: str


def _point_params(config: SweepConfig, value):
    if config.mode == "sweep_k":
        return int(value), float(config.sigma2), 0
    if config.mode == "sweep_sigma":
        return int(config.k), float(value), 0
    return int(config.k), float(value), int(config.m)


def _run_trial(config: SweepConfig, point: int, value, trial: int) -> SweepRow:
    k, sigma2, m = _point_params(config, value)
    seed_index = point * 10**6 + trial
    stream = derive(config.base_seed, seed_index)

    network = random_network(stream.child(0), (k,) + config.widths, "two_over_fanout")
    n = network.output_dim
    x_star = stream.child(1).standard_normal(k)
    y_star = forward(network, x_star)
    noise_rng = stream.child(2)
    if config.mode == "cs_sweep":
        A = gaussian_matrix(stream.child(3), m, n, 1.0 / m)
        z = A @ y_star + noise_rng.gaussian(m, sigma2 / n)
        problem = DenoiseProblem(
            network=network, measurement_matrix=A, z=z,
            x_star=x_star, y_star=y_star, sigma2=sigma2,
        )
    else:
        y = y_star + noise_rng.gaussian(n, sigma2 / n)
        problem = DenoiseProblem(
            network=network, y=y, x_star=x_star, y_star=y_star, sigma2=sigma2
        )

    init_norm = float(np.linalg.norm(x_star))
    descent = replace(config.descent, init_norm=init_norm if init_norm > 0 else 1.0)
    try:
        trace = run(problem, descent, stream.child(4))
        metrics = evaluate(problem, trace)
        return SweepRow(
            point=point, trial=trial, seed=seed_index, k=k, n=n, m=m, sigma2=sigma2,
            mse_latent=metrics.mse_latent, mse_image=metrics.mse_image,
            noise_energy=metrics.noise_energy, iters=trace.n_iters,
            negations=len(trace.negation_events), status=trace.termination,
        )
    except DivergenceError as exc:
        return SweepRow(
            point=point, trial=trial, seed=seed_index, k=k, n=n, m=m, sigma2=sigma2,
            mse_latent=float("nan"), mse_image=float("nan"),
            noise_energy=float("nan"), iters=exc.trace.n_iters,
            negations=len(exc.trace.negation_events), status="diverged",
        )


def _mean_row(point_rows) -> SweepRow:
    first = point_rows[0]
    good = [r for r in point_rows if r.status != "diverged"]

    def mean(attr):
        if not good:
            return float("nan")
        return float(np.mean([getattr(r, attr) for r in good]))

    return SweepRow(
        point=first.point, trial=-1, seed=-1, k=first.k, n=first.n, m=first.m,
        sigma2=first.sigma2, mse_latent=mean("mse_latent"), mse_image=mean("mse_image"),
        noise_energy=mean("noise_energy"), iters=mean("iters"),
        negations=mean("negations"), status="mean",
    )


def run_sweep(config: SweepConfig, threads: int = 1):
    """Run every (point, trial) pair; returns trial rows plus per-point means.

    Rows are aggregated by (point, trial) index, so the result does not
    depend on execution order or on ``threads``.  A diverged trial is
    recorded in its row and does not abort the sweep.
    """
    tasks = [
        (point, value, trial)
        for point, value in enumerate(config.values)
        for trial in range(config.trials)
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda t: _run_trial(config, t[0], t[1], t[2]), tasks)
            )
    else:
        results = [_run_trial(config, point, value, trial) for point, value, trial in tasks]
    results.sort(key=lambda r: (r.point, r.trial))

    rows = []
    for point in range(len(config.values)):
        point_rows = [r for r in results if r.point == point]
        rows.extend(point_rows)
        rows.append(_mean_row(point_rows))
    return rows


def mean_rows(rows):
    return [r for r in rows if r.status == "mean"]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def sweep_csv_lines(config: SweepConfig, rows) -> list:
    """Render a sweep as CSV lines with config metadata in '#' comments."""
    meta = {
        "mode": config.mode,
        "values": list(config.values),
        "widths": list(config.widths),
        "k": config.k,
        "sigma2": config.sigma2,
        "m": config.m,
        "trials": config.trials,
        "base_seed": config.base_seed,
        "alpha": config.descent.alpha,
        "max_iters": config.descent.max_iters,
        "rel_step_tol": config.descent.rel_step_tol,
        "negation_mode": config.descent.negation_mode,
    }
    lines = [f"# {json.dumps(meta, sort_keys=True)}", CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.point, r.trial, r.seed, r.k, r.n, r.m, r.sigma2,
                    r.mse_latent, r.mse_image, r.noise_energy,
                    r.iters, r.negations, r.status,
                )
            )
        )
    return lines


def write_sweep_csv(config: SweepConfig, rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(sweep_csv_lines(config, rows)) + "\n")


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float


def fit_line(xs, ys) -> FitResult:
    """Ordinary least squares line through ``(xs, ys)``.

    Degenerate abscissae (fewer than two distinct values) raise; constant
    ordinates give ``r_squared = 0`` by convention.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("need two equal-length 1-D samples of size >= 2")
    xbar = float(np.mean(x))
    ybar = float(np.mean(y))
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0.0:
        raise ValueError("xs are degenerate (all equal)")
    slope = float(np.sum((x - xbar) * (y - ybar))) / sxx
    intercept = ybar - slope * xbar
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - ybar) ** 2))
    r_squared = 0.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(slope=slope, intercept=intercept, r_squared=r_squared)


def h_slice_rows(depth: int, num_angles: int = 181, radii=None, norm_star: float = 1.0):
    """``(theta0, radius, ||h_x||)`` rows over polar slices of the plane.

    Evaluated in k = 2 with the planted code on the first axis; the
    default radii include 1 and the spurious radius ``rho_d`` so both
    zeros of ``h`` show up on the grid.
    """
    ctx = make_context(np.array([norm_star, 0.0]), depth)
    if radii is None:
        radii = [0.5 * norm_star, ctx.rho_d * norm_star, norm_star, 2.0 * norm_star]
    radii = [r for r in radii if r > 0]
    thetas = np.linspace(0.0, np.pi, num_angles)
    rows = []
    for r in radii:
        for theta in thetas:
            x = np.array([r * np.cos(theta), r * np.sin(theta)])
            rows.append((float(theta), float(r), h_of_x(ctx, x).norm))
    return rows


def loss_surface_rows(network, x_star, extent: float = 2.0, grid: int = 41):
    """``(x1, x2, f)`` rows of the noiseless loss over a square latent grid."""
    if network.latent_dim != 2:
        raise ValueError("loss surface requires a k = 2 network")
    x_star = check_vector(x_star, dim=2, name="x_star")
    y = forward(network, x_star)
    axis = np.linspace(-extent, extent, grid)
    rows = []
    for x1 in axis:
        for x2 in axis:
            rows.append((float(x1), float(x2), loss(network, y, np.array([x1, x2]))))
    return rows


def save_observation(path, vector) -> None:
    """Write a raw little-endian float64 vector with a one-line JSON sidecar."""
    v = check_vector(vector, name="observation")
    v.astype("<f8").tofile(path)
    with open(str(path) + ".json", "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dim": int(v.shape[0])}) + "\n")


def load_observation(path) -> np.ndarray:
    sidecar = str(path) + ".json"
    try:
        with open(sidecar, "r", encoding="utf-8") as fh:
            meta = json.loads(fh.read())
        dim = int(meta["dim"])
    except (OSError, ValueError, KeyError) as exc:
        raise ValueError(f"cannot read observation sidecar {sidecar}: {exc}") from exc
    raw = np.fromfile(path, dtype="<f8")
    if raw.size != dim:
        raise ValueError(f"{path} holds {raw.size} values, sidecar says {dim}")
    return raw.astype(np.float64)
