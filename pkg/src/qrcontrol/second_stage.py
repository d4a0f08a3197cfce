"""Second estimation stage: the outcome's control regression.

Fits a quantile-regression process of the outcome on the kronecker
regressors built from treatment, covariate and estimated control values,
then inverts the fitted process into a conditional distribution function
by the same indicator-counting construction as the first stage.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_epsilon, check_vector, check_weights, trimmed_grid
from .design.basis import BasisSpec
from .exceptions import IdentificationError, RankDeficiencyError
from .quantreg import CheckLossProblem, SolverConfig, fit_process

_CHUNK_ELEMENTS = 8_000_000


class QuantileCRF(BaseEstimator):
    """Conditional distribution, quantile and trimmed-mean regression of the
    outcome given (treatment, covariate, control value).

    The distribution estimate is epsilon plus the scaled count of grid
    levels whose predicted quantile lies at or below the outcome value, so
    it is a proper nondecreasing CDF on [epsilon, 1 - epsilon] even when
    the fitted quantile curves cross.
    """

    def __init__(self, p_terms=("1", "x"), q_terms=("1", "probit"),
                 r_terms=("1",), epsilon=0.01, grid_size=599, solver="auto"):
        self.p_terms = p_terms
        self.q_terms = q_terms
        self.r_terms = r_terms
        self.epsilon = epsilon
        self.grid_size = grid_size
        self.solver = solver

    def _design(self, x, z1, v):
        return self.basis_.outcome_design(
            np.asarray(x, dtype=float),
            np.asarray(z1, dtype=float),
            np.asarray(v, dtype=float),
        )

    def fit(self, y, x, z1, v, sample_weight=None):
        """Fit the quantile process of y on p(x) (x) r(z1) (x) q(v)."""
        y = check_vector(y, "y")
        n = y.shape[0]
        x = check_vector(x, "x", n=n)
        z1 = np.zeros(n) if z1 is None else check_vector(z1, "z1", n=n)
        v = check_vector(v, "v", n=n)
        if sample_weight is not None:
            sample_weight = check_weights(sample_weight, n)
        epsilon = check_epsilon(self.epsilon)
        self.basis_ = BasisSpec(
            p_terms=self.p_terms, q_terms=self.q_terms, r_terms=self.r_terms
        )
        design = self._design(x, z1, v)
        grid = trimmed_grid(epsilon, self.grid_size)
        config = SolverConfig(
            method=self.solver, column_names=self.basis_.outcome_column_names()
        )
        template = CheckLossProblem(y, design, 0.5, weights=sample_weight)
        try:
            self.process_ = fit_process(template, grid, config)
        except RankDeficiencyError as err:
            from .diagnostics import moment_matrix_from_design

            report = moment_matrix_from_design(
                design, self.basis_.outcome_column_names()
            )
            raise IdentificationError(
                f"outcome design is rank deficient ({err}); smallest moment "
                f"eigenvalue {report.min_eigenvalue:.3e}",
                report=report,
            ) from err
        self.grid_ = grid
        self.epsilon_ = epsilon
        return self

    def _require_fitted(self):
        if not hasattr(self, "process_"):
            raise NotFittedError("this QuantileCRF instance is not fitted yet")

    def predicted_quantiles(self, x, z1, v):
        """The fitted quantile curve at one point, over the whole grid."""
        self._require_fitted()
        row = self._design(
            np.atleast_1d(float(x)), np.atleast_1d(float(z1)), np.atleast_1d(float(v))
        )
        return self.process_.predict(row)[0]

    def cdf(self, y, x, z1, v):
        """Trimmed conditional CDF of the outcome; broadcasts elementwise."""
        self._require_fitted()
        y_a, x_a, z1_a, v_a = np.broadcast_arrays(
            np.asarray(y, dtype=float),
            np.asarray(x, dtype=float),
            np.asarray(z1, dtype=float),
            np.asarray(v, dtype=float),
        )
        scalar = y_a.ndim == 0
        y_f = np.atleast_1d(y_a).ravel()
        x_f = np.atleast_1d(x_a).ravel()
        z1_f = np.atleast_1d(z1_a).ravel()
        v_f = np.atleast_1d(v_a).ravel()
        check_vector(y_f, "y")
        out = np.empty_like(y_f)
        t_count = self.process_.size
        step = max(1, _CHUNK_ELEMENTS // max(t_count, 1))
        scale = (1.0 - 2.0 * self.epsilon_) / t_count
        for start in range(0, y_f.shape[0], step):
            stop = start + step
            rows = self._design(x_f[start:stop], z1_f[start:stop], v_f[start:stop])
            predicted = self.process_.predict(rows)
            counts = (predicted <= y_f[start:stop, None]).sum(axis=1)
            out[start:stop] = self.epsilon_ + scale * counts
        if scalar:
            return float(out[0])
        return out.reshape(y_a.shape)

    def mean(self, x, z1, v):
        """Trimmed-mean regression estimate at (x, z1, v).

        Trapezoidal integral of the fitted quantile curve over the trimmed
        grid, normalised by the trimmed mass; the tail mass 2*epsilon is
        excluded by construction.
        """
        self._require_fitted()
        x_a, z1_a, v_a = np.broadcast_arrays(
            np.asarray(x, dtype=float),
            np.asarray(z1, dtype=float),
            np.asarray(v, dtype=float),
        )
        scalar = x_a.ndim == 0
        rows = self._design(
            np.atleast_1d(x_a).ravel(),
            np.atleast_1d(z1_a).ravel(),
            np.atleast_1d(v_a).ravel(),
        )
        predicted = self.process_.predict(rows)
        grid = self.process_.levels
        if grid.size == 1:
            out = predicted[:, 0]
        else:
            steps = np.diff(grid)
            integral = 0.5 * (predicted[:, 1:] + predicted[:, :-1]) @ steps
            out = integral / (grid[-1] - grid[0])
        if scalar:
            return float(out[0])
        return out.reshape(x_a.shape)
