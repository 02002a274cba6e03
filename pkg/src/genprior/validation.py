"""Input validation helpers shared across the package.

All public entry points normalize their array arguments through these
checks so that downstream code can assume float64, correct dimensionality
and finite entries, in the spirit of scikit-learn's ``check_array``.
"""

from __future__ import annotations

import numpy as np


def check_vector(x, dim=None, name="x", allow_zero=True) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float64 array, optionally of length ``dim``."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got ndim={v.ndim}")
    if v.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"{name} has dimension {v.shape[0]}, expected {dim}")
    if not allow_zero and not np.any(v):
        raise ValueError(f"{name} must be nonzero")
    return v


def check_matrix(M, shape=None, name="M") -> np.ndarray:
    """Coerce ``M`` to a finite 2-D float64 array, optionally of given ``shape``."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={A.ndim}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    if shape is not None and A.shape != tuple(shape):
        raise ValueError(f"{name} has shape {A.shape}, expected {tuple(shape)}")
    return A


def check_positive(value, name="value") -> float:
    v = float(value)
    if not v > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return v


def check_nonnegative(value, name="value") -> float:
    v = float(value)
    if not v >= 0:
        raise ValueError(f"{name} must be nonnegative, got {value}")
    return v


def check_positive_int(value, name="value") -> int:
    v = int(value)
    if v != value or v < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return v
