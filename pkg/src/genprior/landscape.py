"""Closed-form geometry of the least-squares landscape.

For a depth-d random ReLU generator the descent direction concentrates
around a deterministic field ``h_x`` that depends only on ``x``, the
planted code ``x_star`` and the depth.  Everything needed to evaluate and
probe that field lives here: the one-layer angle-contraction map ``g``,
the worst-case angle recursion started at pi and its tail sum ``rho_d``
(which locates the spurious point ``-rho_d * x_star``), the decomposition
of ``h_x`` itself, the ideal masked second-moment matrices ``Q_{x,y}``
with their empirical deviation estimator, and the small-``h`` region
``S_beta`` together with its two-ball coverage check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import spectral_norm
from .rng import Rng
from .validation import (
    check_matrix,
    check_nonnegative,
    check_positive_int,
    check_vector,
)

_ACOS_GUARD = 1e-12
_PARALLEL_TOL = 1e-8


def _clamped_arccos(t: float) -> float:
    if t > 1.0 + _ACOS_GUARD or t < -1.0 - _ACOS_GUARD:
        raise ValueError(f"arccos argument {t} outside [-1, 1] beyond rounding guard")
    return float(np.arccos(min(1.0, max(-1.0, t))))


def angle_between(x, y) -> float:
    """Angle in [0, pi] between nonzero vectors.

    Uses ``2 * atan2(||xh - yh||, ||xh + yh||)`` on the normalized
    vectors, which stays fully accurate near 0 and pi where the plain
    arccos of the inner product loses all digits, and returns exactly 0
    (resp. pi) for bitwise equal (resp. opposite) directions.
    """
    x = check_vector(x, name="x", allow_zero=False)
    y = check_vector(y, dim=x.shape[0], name="y", allow_zero=False)
    xh = x / np.linalg.norm(x)
    yh = y / np.linalg.norm(y)
    return 2.0 * float(np.arctan2(np.linalg.norm(xh - yh), np.linalg.norm(xh + yh)))


def g_theta(theta: float) -> float:
    """One-layer angle contraction ``g``.

    ``g(theta) = arccos(((pi - theta) cos(theta) + sin(theta)) / pi)``,
    defined on [0, pi]; monotone, below the identity, with g(0) = 0.
    """
    t = float(theta)
    if not 0.0 <= t <= np.pi:
        raise ValueError(f"theta={theta} outside [0, pi]")
    arg = ((np.pi - t) * np.cos(t) + np.sin(t)) / np.pi
    return _clamped_arccos(arg)


def theta_check_sequence(depth: int) -> np.ndarray:
    """Worst-case angles ``[pi, g(pi), g(g(pi)), ...]`` of length ``depth``."""
    depth = check_positive_int(depth, "depth")
    seq = np.empty(depth)
    seq[0] = np.pi
    for i in range(1, depth):
        seq[i] = g_theta(seq[i - 1])
    return seq


def _tail_weighted_sum(theta: np.ndarray) -> float:
    """``sum_i sin(theta_i)/pi * prod_{j>i} (pi - theta_j)/pi``."""
    d = theta.shape[0]
    factors = (np.pi - theta) / np.pi
    total = 0.0
    suffix = 1.0
    for i in range(d - 1, -1, -1):
        total += np.sin(theta[i]) / np.pi * suffix
        suffix *= factors[i]
    return float(total)


def rho(depth: int) -> float:
    """Location coefficient of the spurious point ``-rho_d * x_star``.

    Strictly increasing in d with ``rho_1 = 0`` and ``rho_d -> 1``; for
    d >= 2 it satisfies ``0 < 1 - rho_d <= 250/(d + 1)``.
    """
    return _tail_weighted_sum(theta_check_sequence(depth))


@dataclass(frozen=True)
class LandscapeContext:
    """Precomputed geometry for one ``(x_star, depth)`` pair."""

    x_star: np.ndarray
    depth: int
    theta_check: np.ndarray
    rho_d: float

    @property
    def spurious_point(self) -> np.ndarray:
        return -self.rho_d * self.x_star


def make_context(x_star, depth: int) -> LandscapeContext:
    x_star = check_vector(x_star, name="x_star", allow_zero=False)
    depth = check_positive_int(depth, "depth")
    seq = theta_check_sequence(depth)
    return LandscapeContext(
        x_star=x_star, depth=depth, theta_check=seq, rho_d=_tail_weighted_sum(seq)
    )


@dataclass(frozen=True)
class HDecomposition:
    """Value of ``h_x`` with the scalars of its closed form.

    ``xi`` is the product ``prod_i (pi - theta_i)/pi`` and ``zeta`` the
    tail-weighted sine sum over the angle recursion ``theta_bar`` seeded
    at ``angle(x, x_star)``.
    """

    h: np.ndarray
    xi: float
    zeta: float
    theta_bar: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.h))


def h_of_x(ctx: LandscapeContext, x) -> HDecomposition:
    """Deterministic concentration target of the descent direction at ``x``.

    ``h_x = 2^{-d} ( -xi * x_star + x - zeta * (||x_star||/||x||) * x )``.
    Zero exactly at ``x = x_star`` and (numerically) at
    ``x = -rho_d * x_star``.
    """
    x = check_vector(x, dim=ctx.x_star.shape[0], name="x", allow_zero=False)
    d = ctx.depth
    theta = np.empty(d)
    theta[0] = angle_between(x, ctx.x_star)
    for i in range(1, d):
        theta[i] = g_theta(theta[i - 1])
    xi = float(np.prod((np.pi - theta) / np.pi))
    zeta = _tail_weighted_sum(theta)
    scale = 2.0 ** (-d)
    ratio = np.linalg.norm(ctx.x_star) / np.linalg.norm(x)
    h = scale * (-xi * ctx.x_star + x - (zeta * ratio) * x)
    return HDecomposition(h=h, xi=xi, zeta=zeta, theta_bar=theta)


def direction_swap_matrix(x, y):
    """Symmetric matrix exchanging the directions of ``x`` and ``y``.

    Maps ``xh -> yh``, ``yh -> xh`` and annihilates span{x, y}^perp.
    Returns ``(M, cos_t, sin_t, theta)`` where ``(cos_t, sin_t)`` are the
    consistent cosine/sine used to build ``M`` (``sin_t`` is set to exactly
    0 in the parallel/antiparallel cases decided at threshold 1e-8).
    """
    x = check_vector(x, name="x", allow_zero=False)
    y = check_vector(y, dim=x.shape[0], name="y", allow_zero=False)
    xh = x / np.linalg.norm(x)
    yh = y / np.linalg.norm(y)
    c = float(np.clip(xh @ yh, -1.0, 1.0))
    w = yh - c * xh
    s = float(np.linalg.norm(w))
    if s <= _PARALLEL_TOL:
        if c >= 0.0:
            return np.outer(xh, xh), 1.0, 0.0, 0.0
        return -np.outer(xh, xh), -1.0, 0.0, float(np.pi)
    # Orthonormalize {xh, yh}; any completion of the basis is annihilated
    # by the zero block of the swap, so only these two vectors are needed.
    u2 = w / s
    theta = float(np.arctan2(s, c))
    M = c * (np.outer(xh, xh) - np.outer(u2, u2)) + s * (np.outer(xh, u2) + np.outer(u2, xh))
    return M, c, s, theta


def wdc_q_matrix(x, y) -> np.ndarray:
    """Expected doubly-masked second moment ``Q_{x,y}`` for unit-variance rows.

    For rows ``w ~ N(0, I_k / n)`` the sum over rows active for both ``x``
    and ``y`` of ``w w^T`` has expectation
    ``(pi - theta)/(2 pi) * I + sin(theta)/(2 pi) * M`` with ``M`` the
    direction swap.  ``Q_{x,x}`` is exactly ``I / 2``; antiparallel
    directions give the zero matrix.
    """
    x = check_vector(x, name="x", allow_zero=False)
    if x.shape[0] < 2:
        raise ValueError("Q_{x,y} needs ambient dimension k >= 2")
    M, _, s, theta = direction_swap_matrix(x, y)
    k = x.shape[0]
    return ((np.pi - theta) / (2.0 * np.pi)) * np.eye(k) + (s / (2.0 * np.pi)) * M


def masked_gram(W, x, y) -> np.ndarray:
    """``sum_i 1{w_i . x > 0} 1{w_i . y > 0} w_i w_i^T`` over the rows of W."""
    W = check_matrix(W, name="W")
    x = check_vector(x, dim=W.shape[1], name="x")
    y = check_vector(y, dim=W.shape[1], name="y")
    mask = ((W @ x) > 0) & ((W @ y) > 0)
    Wm = W[mask]
    if Wm.shape[0] == 0:
        return np.zeros((W.shape[1], W.shape[1]))
    return Wm.T @ Wm


def wdc_deviation(W, rng: Rng, num_pairs: int) -> float:
    """Sampled lower bound on the weight-distribution deviation of ``W``.

    Maximizes ``||masked_gram(W, x, y) - Q_{x,y}||`` (spectral norm) over
    ``num_pairs`` direction pairs drawn uniformly on the sphere, plus the
    forced pairs ``(x, x)`` and ``(x, -x)``.  The true condition is a
    supremum over all nonzero pairs, so the returned value can only
    underestimate it; trends across network widths are the meaningful
    output.
    """
    W = check_matrix(W, name="W")
    k = W.shape[1]
    if k < 2:
        raise ValueError("the deviation estimator needs k >= 2 columns")
    num_pairs = check_positive_int(num_pairs, "num_pairs")

    pairs = []
    first = rng.unit_vector(k)
    pairs.append((first, rng.unit_vector(k)))
    for _ in range(num_pairs - 1):
        pairs.append((rng.unit_vector(k), rng.unit_vector(k)))
    pairs.append((first, first))
    pairs.append((first, -first))

    worst = 0.0
    for x, y in pairs:
        dev = spectral_norm(masked_gram(W, x, y) - wdc_q_matrix(x, y))
        worst = max(worst, dev)
    return worst


def s_beta_member(ctx: LandscapeContext, x, beta) -> bool:
    """Whether ``||h_x|| <= 2^{-d} * beta * max(||x||, ||x_star||)``."""
    beta = check_nonnegative(beta, "beta")
    dec = h_of_x(ctx, x)
    bound = 2.0 ** (-ctx.depth) * beta * max(
        float(np.linalg.norm(np.asarray(x, dtype=float))), float(np.linalg.norm(ctx.x_star))
    )
    return dec.norm <= bound


@dataclass(frozen=True)
class CoverReport:
    """Outcome of a sampled two-ball coverage check of ``S_beta``."""

    status: str  # "ok" or "not-applicable"
    num_samples: int
    num_members: int
    num_violations: int
    radius_plus: float
    radius_minus: float
    counterexample: np.ndarray | None


def s_beta_ball_cover_check(
    ctx: LandscapeContext, beta, num_samples: int, rng: Rng
) -> CoverReport:
    """Sample points and verify every ``S_beta`` member lies in the two balls.

    The coverage statement requires ``64 d^6 sqrt(beta) <= 1``; outside
    that regime the report carries status ``"not-applicable"``.  Members
    must fall in ``B(x_star, 5000 d^6 beta ||x_star||)`` or in
    ``B(-rho_d x_star, 500 d^11 sqrt(beta) ||x_star||)``.  Samples mix the
    two centers, log-spaced Gaussian shells around them, and global draws
    from the ball of radius ``4d ||x_star||`` that contains ``S_beta``.
    """
    beta = check_nonnegative(beta, "beta")
    num_samples = check_positive_int(num_samples, "num_samples")
    d = ctx.depth
    if 64.0 * d**6 * np.sqrt(beta) > 1.0:
        return CoverReport(
            status="not-applicable",
            num_samples=0,
            num_members=0,
            num_violations=0,
            radius_plus=float("nan"),
            radius_minus=float("nan"),
            counterexample=None,
        )

    norm_star = float(np.linalg.norm(ctx.x_star))
    r_plus = 5000.0 * d**6 * beta * norm_star
    r_minus = 500.0 * d**11 * np.sqrt(beta) * norm_star
    centers = (ctx.x_star, ctx.spurious_point)
    k = ctx.x_star.shape[0]

    samples = [ctx.x_star.copy()]
    if ctx.rho_d > 0:
        samples.append(ctx.spurious_point.copy())
    shell_scales = np.logspace(-9, 0, 10) * norm_star
    i = 0
    while len(samples) < num_samples:
        stream = rng.child(i)
        if i % 2 == 0:
            center = centers[(i // 2) % 2]
            scale = shell_scales[(i // 4) % shell_scales.shape[0]]
            point = center + scale * stream.standard_normal(k)
        else:
            point = stream.unit_vector(k) * stream.uniform(0.0, 4.0 * d * norm_star)
        if np.any(point):
            samples.append(point)
        i += 1

    members = 0
    violations = 0
    counterexample = None
    for point in samples:
        if not s_beta_member(ctx, point, beta):
            continue
        members += 1
        in_plus = np.linalg.norm(point - ctx.x_star) <= r_plus
        in_minus = np.linalg.norm(point - ctx.spurious_point) <= r_minus
        if not (in_plus or in_minus):
            violations += 1
            if counterexample is None:
                counterexample = point
    return CoverReport(
        status="ok",
        num_samples=len(samples),
        num_members=members,
        num_violations=violations,
        radius_plus=r_plus,
        radius_minus=r_minus,
        counterexample=counterexample,
    )
