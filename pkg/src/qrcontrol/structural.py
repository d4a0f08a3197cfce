"""Third estimation stage: structural functions.

The distribution structural function averages the fitted conditional CDF
over the empirical distribution of (covariate, control value); quantile
and average structural functions are discrete integral transforms of that
table over an equidistant outcome mesh.
"""

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_vector
from .design.data import Dataset
from .exceptions import InvalidInputError, OutOfIdentifiedRangeError
from .first_stage import ControlFunction
from .second_stage import QuantileCRF

_KINDS = ("dsf", "qsf", "asf")


def empirical_quantile(values, t):
    """Right-continuous sample quantile x_(ceil(n t)); the convention used
    for bins, evaluation grids and mesh ranges throughout."""
    ordered = np.sort(np.asarray(values, dtype=float))
    n = ordered.shape[0]
    idx = np.clip(np.ceil(n * np.asarray(t, dtype=float)).astype(int), 1, n)
    return ordered[idx - 1]


@dataclass(frozen=True)
class EvaluationMesh:
    """Outcome mesh and treatment grid on which tables are evaluated."""

    y_mesh: np.ndarray
    x_grid: np.ndarray
    measure: str = "continuous"

    def __post_init__(self):
        y_mesh = check_vector(self.y_mesh, "y_mesh")
        x_grid = check_vector(self.x_grid, "x_grid")
        if y_mesh.shape[0] < 2:
            raise InvalidInputError("y_mesh needs at least two points")
        widths = np.diff(y_mesh)
        if np.any(widths <= 0):
            raise InvalidInputError("y_mesh must be strictly increasing")
        if not np.allclose(widths, widths[0], rtol=1e-8, atol=0.0):
            raise InvalidInputError("y_mesh must be equidistant")
        if x_grid.shape[0] < 1:
            raise InvalidInputError("x_grid must be nonempty")
        if self.measure not in ("continuous", "counting"):
            raise InvalidInputError(
                f"measure must be 'continuous' or 'counting', got {self.measure!r}"
            )
        object.__setattr__(self, "y_mesh", y_mesh)
        object.__setattr__(self, "x_grid", x_grid)

    @property
    def delta(self):
        return float(self.y_mesh[1] - self.y_mesh[0])

    @classmethod
    def from_sample(cls, y, x, mesh_size=599, x_quantiles=(0.1, 0.3, 0.5, 0.7, 0.9),
                    measure="continuous"):
        """Mesh spanning the sample outcome range; x grid at sample quantiles."""
        y = check_vector(y, "y")
        x = check_vector(x, "x")
        if int(mesh_size) < 2:
            raise InvalidInputError("mesh_size must be >= 2")
        lo, hi = float(y.min()), float(y.max())
        if hi <= lo:
            raise InvalidInputError("outcome column is constant; mesh is degenerate")
        y_mesh = np.linspace(lo, hi, int(mesh_size))
        x_grid = empirical_quantile(x, np.asarray(x_quantiles, dtype=float))
        return cls(y_mesh=y_mesh, x_grid=x_grid, measure=measure)


@dataclass(frozen=True)
class StructuralFunctionEstimate:
    """One tabulated structural function, optionally with uniform bands.

    ``values`` has shape (len(index_grid), len(x_grid)) for distribution
    and quantile kinds and (len(x_grid),) for the average kind, whose
    index grid is empty.
    """

    kind: str
    x_grid: np.ndarray
    index_grid: np.ndarray
    values: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    band_level: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.lower is not None:
            if not (np.all(self.lower <= self.values + 1e-12)
                    and np.all(self.values <= self.upper + 1e-12)):
                raise InvalidInputError("bands must bracket the point estimate")

    def at_x(self, x):
        """Monotone piecewise-linear interpolation across the x grid."""
        x = np.asarray(x, dtype=float)
        if self.values.ndim == 1:
            return np.interp(x, self.x_grid, self.values)
        return np.vstack(
            [np.interp(x, self.x_grid, row) for row in self.values]
        )

    def rows(self):
        """Long-format (x, index, value, lo, hi, kind) records."""
        out = []
        values = np.atleast_2d(self.values)
        lower = None if self.lower is None else np.atleast_2d(self.lower)
        upper = None if self.upper is None else np.atleast_2d(self.upper)
        index = self.index_grid if self.index_grid.size else np.array([np.nan])
        for i, idx in enumerate(index):
            for j, x in enumerate(self.x_grid):
                lo = lower[i, j] if lower is not None else None
                hi = upper[i, j] if upper is not None else None
                out.append((float(x), None if np.isnan(idx) else float(idx),
                            float(values[i, j]), lo, hi, self.kind))
        return out


@dataclass(frozen=True)
class RegionEstimate:
    """The three structural-function tables over one evaluation region."""

    dsf: StructuralFunctionEstimate
    qsf: StructuralFunctionEstimate
    asf: StructuralFunctionEstimate
    epsilon: float
    mesh: EvaluationMesh

    def tables(self):
        return {"dsf": self.dsf, "qsf": self.qsf, "asf": self.asf}

    def with_bands(self, bands):
        """Return a copy whose tables carry the given (lower, upper, level)."""
        updated = {}
        for kind, table in self.tables().items():
            lower, upper, level = bands[kind]
            updated[kind] = replace(
                table, lower=lower, upper=upper, band_level=level
            )
        return RegionEstimate(
            dsf=updated["dsf"], qsf=updated["qsf"], asf=updated["asf"],
            epsilon=self.epsilon, mesh=self.mesh,
        )


def tabulated_qsf(y_mesh, g_values, p):
    """Discrete quantile transform of a tabulated distribution column:
    delta * sum_s [1(y_s >= 0) - 1{G(y_s) >= p}]."""
    y_mesh = np.asarray(y_mesh, dtype=float)
    g_values = np.asarray(g_values, dtype=float)
    delta = y_mesh[1] - y_mesh[0]
    return float(delta * ((y_mesh >= 0.0).sum() - (g_values >= p).sum()))


def tabulated_asf(y_mesh, g_values):
    """Discrete average transform: delta * sum_s [1(y_s >= 0) - G(y_s)]."""
    y_mesh = np.asarray(y_mesh, dtype=float)
    g_values = np.asarray(g_values, dtype=float)
    delta = y_mesh[1] - y_mesh[0]
    return float(delta * ((y_mesh >= 0.0) - g_values).sum())


class StructuralFunctionEstimator(BaseEstimator):
    """Full three-stage pipeline: control function, outcome control
    regression, and structural-function tabulation.

    Parameters mirror the stage estimators; ``mesh_size`` is the outcome
    mesh resolution, ``x_quantiles`` the sample quantiles defining the
    default treatment grid and ``p_levels`` the default quantile levels.
    """

    def __init__(self, p_terms=("1", "x"), q_terms=("1", "probit"),
                 r_terms=("1",), s_terms=("1", "x"), epsilon=0.01,
                 grid_size=599, mesh_size=599, measure="continuous",
                 x_quantiles=(0.1, 0.3, 0.5, 0.7, 0.9),
                 p_levels=(0.25, 0.5, 0.75), solver="auto"):
        self.p_terms = p_terms
        self.q_terms = q_terms
        self.r_terms = r_terms
        self.s_terms = s_terms
        self.epsilon = epsilon
        self.grid_size = grid_size
        self.mesh_size = mesh_size
        self.measure = measure
        self.x_quantiles = x_quantiles
        self.p_levels = p_levels
        self.solver = solver

    def fit(self, y, x=None, z=None, z1=None, sample_weight=None):
        """Fit both stages; accepts a Dataset or column arrays."""
        if isinstance(y, Dataset):
            data = y
            y, x, z, z1 = data.y, data.x, data.z, data.z1
        y = check_vector(y, "y")
        n = y.shape[0]
        x = check_vector(x, "x", n=n)
        z = check_vector(z, "z", n=n)
        z1 = np.zeros(n) if z1 is None else check_vector(z1, "z1", n=n)

        self.first_stage_ = ControlFunction(
            s_terms=self.s_terms, r_terms=self.r_terms,
            epsilon=self.epsilon, grid_size=self.grid_size, solver=self.solver,
        ).fit(x, z, z1, sample_weight=sample_weight)
        self.control_values_ = self.first_stage_.transform(x, z, z1)
        self.crf_ = QuantileCRF(
            p_terms=self.p_terms, q_terms=self.q_terms, r_terms=self.r_terms,
            epsilon=self.epsilon, grid_size=self.grid_size, solver=self.solver,
        ).fit(y, x, z1, self.control_values_, sample_weight=sample_weight)
        self.mesh_ = EvaluationMesh.from_sample(
            y, x, mesh_size=self.mesh_size, x_quantiles=self.x_quantiles,
            measure=self.measure,
        )
        self.epsilon_ = self.crf_.epsilon_
        self._z1 = z1
        self._y_support = np.unique(y)
        return self

    def _require_fitted(self):
        if not hasattr(self, "crf_"):
            raise NotFittedError(
                "this StructuralFunctionEstimator instance is not fitted yet"
            )

    def _pooled_quantiles(self, x):
        """Sorted predicted outcome quantiles over all (z1_i, vhat_i, u_t)."""
        rows = self.crf_._design(
            np.full_like(self._z1, float(x)), self._z1, self.control_values_
        )
        return np.sort(self.crf_.process_.predict(rows), axis=None)

    def dsf_curve(self, x, y_values, pooled=None):
        """The distribution structural function at one treatment value.

        Averages the fitted conditional CDF over the sample covariates and
        control values; equals epsilon plus the scaled fraction of pooled
        predicted quantiles at or below each outcome value.
        """
        self._require_fitted()
        y_values = np.atleast_1d(np.asarray(y_values, dtype=float))
        if pooled is None:
            pooled = self._pooled_quantiles(x)
        t_count = self.crf_.process_.size
        n = self._z1.shape[0]
        counts = np.searchsorted(pooled, y_values, side="right")
        scale = (1.0 - 2.0 * self.epsilon_) / (t_count * n)
        return self.epsilon_ + scale * counts

    def dsf(self, y, x):
        """G(y, x); y may be a scalar or a vector for a fixed x."""
        out = self.dsf_curve(x, y)
        return float(out[0]) if np.ndim(y) == 0 else out

    def _check_p(self, p):
        p = float(p)
        if not self.epsilon_ <= p <= 1.0 - self.epsilon_:
            raise OutOfIdentifiedRangeError(
                f"quantile level {p} lies outside the identified range "
                f"[{self.epsilon_}, {1 - self.epsilon_}] implied by trimming"
            )
        return p

    def qsf(self, p, x):
        """Quantile structural function via the mesh transform of the DSF."""
        self._require_fitted()
        p = self._check_p(p)
        g = self.dsf_curve(x, self.mesh_.y_mesh)
        return tabulated_qsf(self.mesh_.y_mesh, g, p)

    def asf(self, x, measure=None):
        """Average structural function under the continuous or counting measure."""
        self._require_fitted()
        measure = self.mesh_.measure if measure is None else measure
        if measure == "continuous":
            g = self.dsf_curve(x, self.mesh_.y_mesh)
            return tabulated_asf(self.mesh_.y_mesh, g)
        if measure != "counting":
            raise InvalidInputError(f"unknown measure {measure!r}")
        support = self._y_support
        g = self.dsf_curve(x, support)
        positive = support >= 0.0
        return float((1.0 - g[positive]).sum() - g[~positive].sum())

    def evaluate_region(self, x_grid=None, p_levels=None, mesh=None):
        """Tabulate DSF, QSF and ASF over an evaluation region.

        Defaults reproduce the fitted mesh: five treatment points at the
        0.1..0.9 sample quantiles and quantile levels {0.25, 0.5, 0.75}.
        """
        self._require_fitted()
        mesh = self.mesh_ if mesh is None else mesh
        x_grid = mesh.x_grid if x_grid is None else check_vector(x_grid, "x_grid")
        if x_grid.size == 0:
            raise InvalidInputError("evaluation region is empty")
        if x_grid is not mesh.x_grid:
            mesh = EvaluationMesh(mesh.y_mesh, x_grid, mesh.measure)
        p_levels = np.asarray(
            self.p_levels if p_levels is None else p_levels, dtype=float
        )
        if p_levels.size == 0:
            raise InvalidInputError("p_levels must be nonempty")
        for p in p_levels:
            self._check_p(p)

        S = mesh.y_mesh.shape[0]
        dsf_values = np.empty((S, x_grid.shape[0]))
        qsf_values = np.empty((p_levels.shape[0], x_grid.shape[0]))
        asf_values = np.empty(x_grid.shape[0])
        for j, x in enumerate(x_grid):
            pooled = self._pooled_quantiles(x)
            g = self.dsf_curve(x, mesh.y_mesh, pooled=pooled)
            dsf_values[:, j] = g
            for i, p in enumerate(p_levels):
                qsf_values[i, j] = tabulated_qsf(mesh.y_mesh, g, p)
            if mesh.measure == "continuous":
                asf_values[j] = tabulated_asf(mesh.y_mesh, g)
            else:
                asf_values[j] = self.asf(x, measure="counting")

        return RegionEstimate(
            dsf=StructuralFunctionEstimate(
                "dsf", x_grid, mesh.y_mesh, dsf_values
            ),
            qsf=StructuralFunctionEstimate(
                "qsf", x_grid, p_levels, qsf_values
            ),
            asf=StructuralFunctionEstimate(
                "asf", x_grid, np.array([]), asf_values
            ),
            epsilon=self.epsilon_,
            mesh=mesh,
        )
