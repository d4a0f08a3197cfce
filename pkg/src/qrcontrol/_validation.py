"""Input validation helpers used by the estimators."""

import numpy as np

from .exceptions import InvalidInputError


def check_vector(values, name, n=None, dtype=float):
    """Coerce to a finite 1-d float array, optionally of fixed length."""
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    if n is not None and arr.shape[0] != n:
        raise InvalidInputError(f"{name} has length {arr.shape[0]}, expected {n}")
    return arr


def check_matrix(values, name):
    """Coerce to a finite 2-d float array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def check_level(level, name="level"):
    """Validate a quantile level strictly inside (0, 1)."""
    level = float(level)
    if not np.isfinite(level) or not 0.0 < level < 1.0:
        raise InvalidInputError(f"{name} must lie strictly inside (0, 1), got {level}")
    return level


def check_epsilon(epsilon):
    """Validate a trimming constant in (0, 0.5)."""
    epsilon = float(epsilon)
    if not np.isfinite(epsilon) or not 0.0 < epsilon < 0.5:
        raise InvalidInputError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    return epsilon


def check_binary(values, name):
    """Validate a {0, 1}-valued vector."""
    arr = check_vector(values, name)
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise InvalidInputError(f"{name} must take values in {{0, 1}}")
    return arr


def check_weights(weights, n):
    """Validate nonnegative weights and rescale them to unit mean.

    Rescaling does not move the minimizer of a weighted check-loss problem,
    so problems may be stated with weights of any positive total mass.
    """
    arr = check_vector(weights, "weights", n=n)
    if np.any(arr < 0.0):
        raise InvalidInputError("weights must be nonnegative")
    mean = arr.mean()
    if mean <= 0.0:
        raise InvalidInputError("weights must have positive mean")
    return arr / mean


def trimmed_grid(epsilon, size):
    """The mesh {epsilon = u_1 < ... < u_T = 1 - epsilon} of quantile levels."""
    size = int(size)
    if size < 1:
        raise InvalidInputError(f"grid size must be >= 1, got {size}")
    epsilon = check_epsilon(epsilon)
    if size == 1:
        return np.array([0.5])
    return np.linspace(epsilon, 1.0 - epsilon, size)
