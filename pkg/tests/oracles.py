"""Independent brute-force references used to validate the estimators.

Everything here deliberately avoids the library's own solution paths:
the LP oracle enumerates basic solutions, quantiles come from order
statistics, and integrals are evaluated by direct summation.
"""

import itertools

import numpy as np


def check_loss_value(level, residuals, weights=None):
    losses = (level - (np.asarray(residuals) < 0.0)) * residuals
    if weights is not None:
        losses = losses * weights
    return float(np.sum(losses))


def lp_oracle_objective(design, responses, level, weights=None):
    """Global check-loss minimum by exhaustive basic-solution enumeration.

    A minimizer of the quantile-regression LP is attained at a coefficient
    vector interpolating k observations (a vertex), so scanning all k-row
    subsets with invertible sub-designs covers the optimum.  Only viable
    for small n and k.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(responses, dtype=float)
    n, k = X.shape
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        w = w / w.mean()
    else:
        w = None
    best = np.inf
    best_coef = None
    for rows in itertools.combinations(range(n), k):
        sub = X[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        coef = np.linalg.solve(sub, y[list(rows)])
        value = check_loss_value(level, y - X @ coef, w)
        if value < best:
            best = value
            best_coef = coef
    return best, best_coef


def sample_quantile_type1(values, level):
    """Right-continuous empirical quantile: x_(ceil(n*level)) with Q(0)=min."""
    values = np.sort(np.asarray(values, dtype=float))
    n = values.shape[0]
    if level <= 0.0:
        return values[0]
    idx = int(np.ceil(n * level))
    return values[min(idx, n) - 1]


def quantile_minimizers(values, level):
    """All order statistics attaining the minimal univariate check loss."""
    values = np.asarray(values, dtype=float)
    losses = [check_loss_value(level, values - c) for c in values]
    best = min(losses)
    return {float(c) for c, l in zip(values, losses) if l <= best + 1e-12}, best


def generalized_inverse(y_grid, g_values, p):
    """inf{y in grid : G(y) >= p} by direct scan."""
    for y, g in zip(y_grid, g_values):
        if g >= p:
            return float(y)
    return float(y_grid[-1])
