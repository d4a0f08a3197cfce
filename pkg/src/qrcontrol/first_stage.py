"""First estimation stage: the control function.

Fits a quantile-regression process of the treatment on instrument
transformations over a trimmed level grid, then turns the fitted process
into a conditional CDF by counting how many predicted quantiles fall at
or below a treatment value.  Evaluated at the observed sample this yields
the control values used by the second stage.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_epsilon, check_vector, check_weights, trimmed_grid
from .design.basis import BasisSpec
from .design.data import Dataset
from .exceptions import IdentificationError, RankDeficiencyError
from .quantreg import CheckLossProblem, SolverConfig, fit_process

_CHUNK_ELEMENTS = 8_000_000


class ControlFunction(BaseEstimator):
    """Conditional CDF of the treatment given instruments.

    Parameters
    ----------
    s_terms, r_terms : sequences of term names
        Instrument and binary-covariate bases; the regressors are their
        kronecker product.
    epsilon : float
        Trimming constant; the level grid spans [epsilon, 1 - epsilon]
        and all outputs live in that interval.
    grid_size : int
        Number of grid levels (the process resolution).
    solver : str
        "auto", "ip" or "lp"; passed to the check-loss solver.
    """

    def __init__(self, s_terms=("1", "x"), r_terms=("1",), epsilon=0.01,
                 grid_size=599, solver="auto"):
        self.s_terms = s_terms
        self.r_terms = r_terms
        self.epsilon = epsilon
        self.grid_size = grid_size
        self.solver = solver

    def _design(self, z, z1):
        return self.basis_.treatment_design(
            np.asarray(z, dtype=float), np.asarray(z1, dtype=float)
        )

    def fit(self, x, z, z1=None, sample_weight=None):
        """Fit the quantile process of x on s(z) (x) r(z1)."""
        x = check_vector(x, "x")
        n = x.shape[0]
        z = check_vector(z, "z", n=n)
        z1 = np.zeros(n) if z1 is None else check_vector(z1, "z1", n=n)
        if sample_weight is not None:
            sample_weight = check_weights(sample_weight, n)
        epsilon = check_epsilon(self.epsilon)
        self.basis_ = BasisSpec(s_terms=self.s_terms, r_terms=self.r_terms)
        design = self._design(z, z1)
        grid = trimmed_grid(epsilon, self.grid_size)
        config = SolverConfig(
            method=self.solver, column_names=self.basis_.treatment_column_names()
        )
        template = CheckLossProblem(x, design, 0.5, weights=sample_weight)
        try:
            self.process_ = fit_process(template, grid, config)
        except RankDeficiencyError as err:
            raise IdentificationError(
                f"first-stage design is rank deficient ({err}); the instrument "
                "carries no usable variation -- see the identification "
                "diagnostics (`qrcontrol diagnose`)"
            ) from err
        self.grid_ = grid
        self.epsilon_ = epsilon
        return self

    def _require_fitted(self):
        if not hasattr(self, "process_"):
            raise NotFittedError("this ControlFunction instance is not fitted yet")

    def cdf(self, x, z, z1=0.0):
        """Trimmed conditional CDF estimate F(x | z, z1), in [eps, 1-eps].

        Arguments broadcast elementwise; the value is epsilon plus the
        fraction of grid levels whose predicted quantile is at or below x,
        scaled by the trimmed mass.  Nondecreasing in x by construction.
        """
        self._require_fitted()
        x_arr, z_arr, z1_arr = np.broadcast_arrays(
            np.asarray(x, dtype=float),
            np.asarray(z, dtype=float),
            np.asarray(z1, dtype=float),
        )
        scalar = x_arr.ndim == 0
        x_flat = np.atleast_1d(x_arr).ravel()
        z_flat = np.atleast_1d(z_arr).ravel()
        z1_flat = np.atleast_1d(z1_arr).ravel()
        check_vector(x_flat, "x")
        check_vector(z_flat, "z")
        out = np.empty_like(x_flat)
        t_count = self.process_.size
        step = max(1, _CHUNK_ELEMENTS // max(t_count, 1))
        scale = (1.0 - 2.0 * self.epsilon_) / t_count
        for start in range(0, x_flat.shape[0], step):
            stop = start + step
            rows = self._design(z_flat[start:stop], z1_flat[start:stop])
            predicted = self.process_.predict(rows)
            counts = (predicted <= x_flat[start:stop, None]).sum(axis=1)
            out[start:stop] = self.epsilon_ + scale * counts
        if scalar:
            return float(out[0])
        return out.reshape(x_arr.shape)

    def transform(self, x, z=None, z1=None):
        """Control values for a sample; accepts a Dataset or columns."""
        if isinstance(x, Dataset):
            data = x
            return self.cdf(data.x, data.z, data.z1)
        return self.cdf(x, z, 0.0 if z1 is None else z1)

    def fit_transform(self, x, z=None, z1=None, sample_weight=None):
        if isinstance(x, Dataset):
            data = x
            self.fit(data.x, data.z, data.z1, sample_weight=sample_weight)
            return self.transform(data)
        self.fit(x, z, z1, sample_weight=sample_weight)
        return self.transform(x, z, z1)
