"""Dense spectral-norm estimation and orthogonal projection.

Only the two primitives the rest of the package needs: the largest
singular value via power iteration, and projection onto the column span
of a (possibly rank-deficient) matrix.  Anything fancier lives in the
test suite's oracles, not here.
"""

from __future__ import annotations

import numpy as np

from .validation import check_matrix, check_positive, check_positive_int, check_vector


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge; carries the best estimate seen."""

    def __init__(self, message, estimate, iterations):
        super().__init__(message)
        self.estimate = float(estimate)
        self.iterations = int(iterations)


def _ramp(n):
    # Fixed non-uniform direction used for deterministic perturbations.
    r = np.arange(1.0, n + 1.0)
    return r / np.linalg.norm(r)


def spectral_norm(M, tol=1e-12, max_iters=10000) -> float:
    """Largest singular value of ``M`` within relative tolerance ``tol``.

    Power iteration on ``M^T M`` from the normalized all-ones vector, so
    repeated calls are bit-reproducible.  Once the estimate stalls, the
    iterate is nudged along a fixed ramp direction and iteration resumes;
    this dislodges a start vector that happened to be orthogonal to the
    top singular space.  Raises :class:`PowerIterationError` after
    ``max_iters`` sweeps without convergence.
    """
    M = check_matrix(M)
    tol = check_positive(tol, "tol")
    max_iters = check_positive_int(max_iters, "max_iters")
    if not M.any():
        return 0.0

    n = M.shape[1]
    v = np.full(n, 1.0 / np.sqrt(n))
    sigma = 0.0
    nudged = False
    restarts = 0
    for iteration in range(1, max_iters + 1):
        u = M @ v
        estimate = np.linalg.norm(u)
        if estimate == 0.0:
            # v is exactly in the null space; restart from a basis vector.
            v = np.zeros(n)
            v[restarts % n] = 1.0
            restarts += 1
            continue
        w = M.T @ u
        converged = abs(estimate - sigma) <= tol * estimate
        sigma = estimate
        if converged:
            if nudged:
                return float(sigma)
            # Verify the fixed point survives a deterministic perturbation.
            v = v + 1e-6 * _ramp(n)
            v /= np.linalg.norm(v)
            nudged = True
            continue
        v = w / np.linalg.norm(w)
    raise PowerIterationError(
        f"power iteration did not converge in {max_iters} iterations",
        estimate=sigma,
        iterations=max_iters,
    )


def orthonormal_columns(B, rank_tol=1e-12) -> np.ndarray:
    """Orthonormal basis of span(B) via pivoted modified Gram-Schmidt.

    Columns whose residual norm falls below ``rank_tol`` times the largest
    initial column norm are treated as dependent and dropped, which makes
    the factorization rank-revealing.  Each accepted column is
    re-orthogonalized once against the basis built so far.
    """
    B = check_matrix(B)
    R = B.copy()
    m, ncols = R.shape
    scale = np.max(np.linalg.norm(R, axis=0))
    if scale == 0.0:
        return np.zeros((m, 0))
    threshold = rank_tol * scale

    basis = []
    remaining = list(range(ncols))
    while remaining and len(basis) < m:
        norms = np.linalg.norm(R[:, remaining], axis=0)
        best = int(np.argmax(norms))
        if norms[best] <= threshold:
            break
        j = remaining.pop(best)
        q = R[:, j] / norms[best]
        if basis:
            Q = np.column_stack(basis)
            q = q - Q @ (Q.T @ q)
            nq = np.linalg.norm(q)
            if nq <= rank_tol:
                continue
            q /= nq
        basis.append(q)
        for jj in remaining:
            R[:, jj] -= q * (q @ R[:, jj])
    if not basis:
        return np.zeros((m, 0))
    return np.column_stack(basis)


def project_onto_span(B, v) -> np.ndarray:
    """Orthogonal projection of ``v`` onto the column span of ``B``."""
    B = check_matrix(B)
    v = check_vector(v, dim=B.shape[0], name="v")
    Q = orthonormal_columns(B)
    if Q.shape[1] == 0:
        return np.zeros_like(v)
    return Q @ (Q.T @ v)
