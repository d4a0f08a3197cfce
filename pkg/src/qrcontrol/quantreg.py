"""Check-loss minimization for single quantile levels and whole processes.

The solver follows the primal-dual interior-point scheme customary for
quantile regression: the bounded dual

    max  y'a   subject to  X'a = (1 - level) X'1,   0 <= a <= 1

is driven to optimality with Mehrotra predictor-corrector steps, each of
which costs one k x k normal-equations solve.  Model coefficients are the
multipliers of the equality constraint.  Because the problem is a linear
program, a converged interior iterate is polished onto an exact vertex
(a coefficient vector interpolating k observations) whenever that does not
increase the objective; this makes degenerate cases such as constant-only
designs return sample order statistics exactly.

A HiGHS linear-programming fallback anchors correctness when the iteration
stalls.  Weighted problems are reduced to unweighted ones by scaling rows
(the check function is positively homogeneous).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.optimize import linprog

from ._validation import check_level, check_matrix, check_vector, check_weights
from .exceptions import ConvergenceError, InvalidInputError, RankDeficiencyError

__all__ = [
    "CheckLossProblem",
    "QuantileFit",
    "QuantileProcess",
    "SolverConfig",
    "check_loss",
    "fit",
    "fit_process",
]

# Fraction of the step to the boundary taken by the interior-point update.
_STEP_SHRINK = 0.9995


def check_loss(level, residual):
    """Asymmetric absolute loss whose minimizer is the ``level``-quantile.

    Evaluates ``(level - 1{residual < 0}) * residual`` elementwise; the
    result is nonnegative and zero only at zero residual.
    """
    level = check_level(level)
    residual = np.asarray(residual, dtype=float)
    if not np.all(np.isfinite(residual)):
        raise InvalidInputError("residual contains non-finite entries")
    out = (level - (residual < 0.0)) * residual
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CheckLossProblem:
    """A weighted quantile-regression instance.

    Weights are rescaled to unit mean on construction (rescaling does not
    move the minimizer); ``None`` means equal unit weights.
    """

    responses: np.ndarray
    design: np.ndarray
    level: float
    weights: np.ndarray | None = None

    def __post_init__(self):
        design = check_matrix(self.design, "design")
        responses = check_vector(self.responses, "responses", n=design.shape[0])
        level = check_level(self.level)
        n, k = design.shape
        if not n >= k >= 1:
            raise InvalidInputError(f"need n >= k >= 1, got n={n}, k={k}")
        weights = self.weights
        if weights is not None:
            weights = check_weights(weights, n)
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "responses", responses)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self):
        return self.design.shape[0]

    @property
    def k(self):
        return self.design.shape[1]

    def objective(self, coefficients):
        """Weighted sum of check losses at the given coefficients."""
        coefficients = check_vector(coefficients, "coefficients", n=self.k)
        resid = self.responses - self.design @ coefficients
        losses = check_loss(self.level, resid)
        if self.weights is not None:
            losses = losses * self.weights
        return float(losses.sum())


@dataclass(frozen=True)
class QuantileFit:
    """Solution of one check-loss problem."""

    coefficients: np.ndarray
    objective: float
    level: float
    converged: bool


@dataclass(frozen=True)
class QuantileProcess:
    """Coefficient curve {(u_t, beta(u_t))} over an increasing level grid."""

    levels: np.ndarray
    coefficients: np.ndarray  # (T, k)
    objectives: np.ndarray
    converged: np.ndarray

    def __post_init__(self):
        levels = check_vector(self.levels, "levels")
        if np.any(np.diff(levels) <= 0):
            raise InvalidInputError("levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)

    @property
    def size(self):
        return self.levels.shape[0]

    def predict(self, design):
        """Predicted quantiles ``design @ coefficients.T`` with shape (m, T)."""
        design = np.atleast_2d(np.asarray(design, dtype=float))
        return design @ self.coefficients.T

    def __getitem__(self, t):
        return QuantileFit(
            coefficients=self.coefficients[t],
            objective=float(self.objectives[t]),
            level=float(self.levels[t]),
            converged=bool(self.converged[t]),
        )


@dataclass(frozen=True)
class SolverConfig:
    """Interior-point and fallback settings.

    ``tolerance`` bounds the relative duality gap at exit; it sits well
    below the 1e-8 accuracy the contracts test.  ``method`` is "auto"
    (interior point, LP on stall), "ip" or "lp".
    """

    tolerance: float = 1e-9
    max_iterations: int = 200
    method: str = "auto"
    rank_tolerance: float = 1e-10
    column_names: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.method not in ("auto", "ip", "lp"):
            raise InvalidInputError(f"unknown solver method {self.method!r}")


def _check_rank(design, config):
    """Raise RankDeficiencyError naming dependent columns, else return."""
    n, k = design.shape
    if k == 1:
        if np.all(design == 0.0):
            raise RankDeficiencyError(
                "design column is identically zero",
                columns=_column_labels((0,), config),
            )
        return
    _, r, pivots = scipy.linalg.qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    scale = diag[0] if diag[0] > 0 else 1.0
    rank = int(np.sum(diag > config.rank_tolerance * max(scale, 1.0) * max(n, k)))
    if rank < k:
        offending = tuple(sorted(int(j) for j in pivots[rank:]))
        raise RankDeficiencyError(
            "design is rank deficient; dependent columns: "
            + ", ".join(_column_labels(offending, config)),
            columns=_column_labels(offending, config),
        )


def _column_labels(indices, config):
    names = config.column_names
    return tuple(names[j] if j < len(names) else f"column {j}" for j in indices)


def _scaled_instance(problem):
    """Fold weights into (X, y); rows with zero weight drop out."""
    X, y = problem.design, problem.responses
    if problem.weights is None:
        return X, y
    w = problem.weights
    active = w > 0.0
    return X[active] * w[active, None], y[active] * w[active]


def _interior_point(X, y, tau, config, warm_coefficients=None):
    """Mehrotra predictor-corrector on the bounded dual; returns (beta, converged)."""
    n, k = X.shape
    ones_mass = (1.0 - tau) * y.sum()
    b = (1.0 - tau) * X.sum(axis=0)

    if warm_coefficients is not None:
        beta = np.asarray(warm_coefficients, dtype=float).copy()
    else:
        beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    a = np.full(n, 1.0 - tau)
    s = 1.0 - a
    r = y - X @ beta
    spread = max(np.abs(r).max(), 1.0) * 1e-2
    u = np.maximum(-r, 0.0) + spread
    v = u + r  # keeps v - u = r exactly

    converged = False
    for _ in range(config.max_iterations):
        resid = y - X @ beta
        primal = float(((tau - (resid < 0.0)) * resid).sum())
        dual = float(y @ a - ones_mass)
        if primal - dual <= config.tolerance * (1.0 + abs(primal)):
            converged = True
            break

        rb = b - X.T @ a
        rs = 1.0 - a - s
        rd = resid - (v - u)
        ua, vs = u / a, v / s
        d = 1.0 / (ua + vs)
        dX = X * d[:, None]
        m = X.T @ dX
        try:
            factor = scipy.linalg.cho_factor(m, check_finite=False)
        except scipy.linalg.LinAlgError:
            break

        def solve_step(cu, cv):
            rhs0 = rd - cv / s + vs * rs + cu / a
            dx = d * rhs0
            dbeta = scipy.linalg.cho_solve(factor, X.T @ dx - rb, check_finite=False)
            da = dx - dX @ dbeta
            ds = rs - da
            du = cu / a - ua * da
            dv = cv / s - vs * ds
            return da, ds, dbeta, du, dv

        def step_length(x, dx):
            neg = dx < 0.0
            if not np.any(neg):
                return 1.0
            return min(1.0, _STEP_SHRINK * np.min(-x[neg] / dx[neg]))

        # Affine scaling (predictor) direction.
        da, ds, dbeta, du, dv = solve_step(-a * u, -s * v)
        alpha_p = min(step_length(a, da), step_length(s, ds))
        alpha_d = min(step_length(u, du), step_length(v, dv))

        gap = a @ u + s @ v
        gap_aff = (a + alpha_p * da) @ (u + alpha_d * du) + (
            s + alpha_p * ds
        ) @ (v + alpha_d * dv)
        sigma = (max(gap_aff, 0.0) / gap) ** 3 if gap > 0 else 0.0
        mu = sigma * gap / (2.0 * n)

        # Corrected direction.
        da, ds, dbeta, du, dv = solve_step(
            mu - a * u - da * du, mu - s * v - ds * dv
        )
        alpha_p = min(step_length(a, da), step_length(s, ds))
        alpha_d = min(step_length(u, du), step_length(v, dv))

        a = a + alpha_p * da
        s = s + alpha_p * ds
        beta = beta + alpha_d * dbeta
        u = u + alpha_d * du
        v = v + alpha_d * dv

    return beta, converged


def _purify(X, y, tau, beta, objective):
    """Snap to the vertex interpolating the k observations nearest the fit.

    Keeps the interior-point iterate whenever the candidate vertex is not
    at least as good, so this step can only improve the objective.
    """
    n, k = X.shape
    resid = y - X @ beta
    basis = np.argsort(np.abs(resid), kind="stable")[:k]
    Xb, yb = X[basis], y[basis]
    if k == 1:
        if Xb[0, 0] == 0.0:
            return beta, objective
        candidate = yb / Xb[:, 0]
    else:
        try:
            candidate = np.linalg.solve(Xb, yb)
        except np.linalg.LinAlgError:
            return beta, objective
        if not np.all(np.isfinite(candidate)):
            return beta, objective
    resid_c = y - X @ candidate
    obj_c = float(((tau - (resid_c < 0.0)) * resid_c).sum())
    if obj_c <= objective + 1e-12 * (1.0 + abs(objective)):
        return candidate, obj_c
    return beta, objective


def _linprog_fallback(X, y, tau):
    """Exact LP solve of the primal formulation via HiGHS."""
    n, k = X.shape
    c = np.concatenate([np.zeros(k), np.full(n, tau), np.full(n, 1.0 - tau)])
    eye = scipy.sparse.identity(n, format="csc")
    a_eq = scipy.sparse.hstack([scipy.sparse.csc_matrix(X), eye, -eye], format="csc")
    bounds = [(None, None)] * k + [(0.0, None)] * (2 * n)
    res = linprog(c, A_eq=a_eq, b_eq=y, bounds=bounds, method="highs")
    if not res.success:
        return None
    return res.x[:k]


def fit(problem, config=None):
    """Minimize the weighted check loss of ``problem``.

    Any global minimizer is acceptable; the reported objective is the
    evaluated loss at the returned coefficients.  Raises
    RankDeficiencyError for singular designs and ConvergenceError (carrying
    the best iterate) if neither the interior point nor the LP fallback
    reaches tolerance.
    """
    if config is None:
        config = SolverConfig()
    X, y = _scaled_instance(problem)
    if X.shape[0] < X.shape[1]:
        raise InvalidInputError(
            "fewer positively weighted observations than coefficients"
        )
    _check_rank(X, config)
    return _fit_prechecked(problem, X, y, config, None)


def fit_process(problem_template, grid, config=None):
    """Fit one quantile regression per level of an increasing grid.

    Each level warm-starts from its neighbour; results are deterministic
    for a fixed configuration.  Errors propagate with the failing level
    attached to the message.
    """
    if config is None:
        config = SolverConfig()
    grid = check_vector(grid, "grid")
    if grid.size < 1:
        raise InvalidInputError("grid must contain at least one level")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("grid levels must be strictly increasing")
    for level in (grid[0], grid[-1]):
        check_level(level, "grid level")

    X, y = _scaled_instance(problem_template)
    if X.shape[0] < X.shape[1]:
        raise InvalidInputError(
            "fewer positively weighted observations than coefficients"
        )
    _check_rank(X, config)

    T, k = grid.size, problem_template.k
    coefficients = np.empty((T, k))
    objectives = np.empty(T)
    flags = np.empty(T, dtype=bool)
    warm = None
    for t, tau in enumerate(grid):
        problem = CheckLossProblem(
            responses=problem_template.responses,
            design=problem_template.design,
            level=float(tau),
            weights=problem_template.weights,
        )
        try:
            result = _fit_prechecked(problem, X, y, config, warm)
        except ConvergenceError as err:
            raise ConvergenceError(
                f"level {tau:.6g}: {err}", best=err.best
            ) from err
        coefficients[t] = result.coefficients
        objectives[t] = result.objective
        flags[t] = result.converged
        warm = result.coefficients
    return QuantileProcess(grid, coefficients, objectives, flags)


def _fit_prechecked(problem, X, y, config, warm):
    """fit() body without repeating rank checks; used by fit_process."""
    tau = problem.level
    if config.method == "lp":
        beta = _linprog_fallback(X, y, tau)
        if beta is None:
            raise ConvergenceError("LP solver failed")
        converged = True
    else:
        beta, converged = _interior_point(X, y, tau, config, warm_coefficients=warm)
        if not converged and config.method == "auto":
            candidate = _linprog_fallback(X, y, tau)
            if candidate is not None:
                resid = y - X @ beta
                obj = float(((tau - (resid < 0.0)) * resid).sum())
                resid_c = y - X @ candidate
                obj_c = float(((tau - (resid_c < 0.0)) * resid_c).sum())
                if obj_c <= obj:
                    beta, converged = candidate, True
    resid = y - X @ beta
    obj = float(((tau - (resid < 0.0)) * resid).sum())
    beta, obj = _purify(X, y, tau, beta, obj)
    if not converged:
        best = QuantileFit(beta, problem.objective(beta), tau, False)
        raise ConvergenceError(
            f"no convergence after {config.max_iterations} iterations "
            f"at level {tau:.6g}",
            best=best,
        )
    return QuantileFit(beta, problem.objective(beta), tau, True)
