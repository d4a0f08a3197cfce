"""Numeric identification diagnostics.

Positive definiteness of the regressor second-moment matrix is what makes
the control regressions (and hence the structural functions) estimable.
This module estimates that matrix, profiles the smallest eigenvalue of the
conditional second-moment matrices cell by cell, checks the binary
treatment propensity condition, and reproduces both profiles from the
fitted first stage alone.  Diagnostics report; they never abort anything
themselves.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_binary, check_vector
from .design.basis import parse_term
from .exceptions import InvalidInputError
from .structural import empirical_quantile

DEFAULT_THRESHOLD = 1e-3
DEFAULT_BINS = 10


@dataclass(frozen=True)
class MomentReport:
    """Sample second-moment matrix of the full regressor vector."""

    matrix: np.ndarray
    min_eigenvalue: float
    condition_number: float
    rank_ok: bool
    column_names: tuple = ()


@dataclass(frozen=True)
class EigenCell:
    """Smallest-eigenvalue summary of one conditioning cell."""

    label: str
    value: float            # conditioning value, or bin midpoint
    probability: float
    count: int
    usable: bool
    min_eigenvalue: float
    max_eigenvalue: float
    second_moment_variance: float | None  # Var of the non-constant term, 2x2 cells
    distinct: int


@dataclass(frozen=True)
class ConditionalEigenProfile:
    """Per-cell smallest eigenvalues with the threshold-based set estimates.

    ``strong_set`` holds labels of usable cells whose smallest eigenvalue
    clears the threshold; ``support_set`` holds labels of usable cells with
    at least two distinct conditioning-complement values (the weaker,
    support-based condition, populated for two-term bases).
    """

    conditioning: str
    cells: tuple
    threshold: float
    strong_set: tuple
    support_set: tuple

    def passes(self):
        """True when the strong set has positive empirical probability."""
        labels = set(self.strong_set)
        return any(c.probability > 0 for c in self.cells if c.label in labels)


@dataclass(frozen=True)
class PropensityCell:
    label: str
    probability: float
    propensity: float
    variance: float
    count: int
    ok: bool


@dataclass(frozen=True)
class PropensityReport:
    """Binary-treatment identification check: Var(X|V) = P(1-P) > 0 on a
    positive-probability set of control cells."""

    cells: tuple
    tolerance: float
    passes: bool


@dataclass(frozen=True)
class BoundCheck:
    label: str
    min_eigenvalue: float
    bound: float
    margin: float
    ok: bool
    applicable: bool = True


def _term_matrix(terms, values):
    terms = tuple(parse_term(t) for t in terms)
    values = np.asarray(values, dtype=float)
    return np.column_stack([t(values) for t in terms]), terms


def moment_matrix_from_design(design, column_names=()):
    """Eigenvalue report for a prebuilt regressor matrix."""
    design = np.asarray(design, dtype=float)
    n, k = design.shape
    matrix = design.T @ design / n
    matrix = 0.5 * (matrix + matrix.T)
    eigenvalues = np.linalg.eigvalsh(matrix)
    min_eig = float(eigenvalues[0])
    max_eig = float(eigenvalues[-1])
    threshold = 1e-8 * np.trace(matrix) / k
    cond = float(max_eig / min_eig) if min_eig > 0 else float("inf")
    return MomentReport(
        matrix=matrix,
        min_eigenvalue=min_eig,
        condition_number=cond,
        rank_ok=bool(min_eig >= threshold),
        column_names=tuple(column_names),
    )


def moment_matrix(data, basis, v):
    """Second-moment report of the outcome regressors at the sample."""
    v = check_vector(v, "v", n=data.n)
    design = basis.outcome_design(data.x, data.z1, v)
    return moment_matrix_from_design(design, basis.outcome_column_names())


def _bin_cells(values, n_bins):
    """Group by distinct value when few, else by sample-quantile bins.

    Returns (labels, assignments, cell_values) where assignments maps each
    observation to a cell index.
    """
    values = np.asarray(values, dtype=float)
    distinct = np.unique(values)
    if distinct.shape[0] <= n_bins:
        assign = np.searchsorted(distinct, values)
        labels = [f"={d:.6g}" for d in distinct]
        return labels, assign, distinct
    edges = empirical_quantile(values, np.arange(1, n_bins) / n_bins)
    edges = np.unique(edges)
    assign = np.searchsorted(edges, values, side="left")
    cells = assign.max() + 1
    mids = np.array(
        [values[assign == c].mean() if np.any(assign == c) else np.nan
         for c in range(cells)]
    )
    labels = [f"bin{c}" for c in range(cells)]
    return labels, assign, mids


def _profile(conditioning_name, condition_values, complement_values, terms,
             n_bins, threshold, min_count):
    cols, terms = _term_matrix(terms, complement_values)
    dim = cols.shape[1]
    floor = 5 * dim if min_count is None else int(min_count)
    labels, assign, cell_values = _bin_cells(condition_values, n_bins)
    n = cols.shape[0]
    two_term = dim == 2 and terms[0].name == "1"

    cells = []
    for c, label in enumerate(labels):
        mask = assign == c
        count = int(mask.sum())
        if count == 0:
            continue
        usable = count >= max(floor, dim)
        block = cols[mask]
        if count >= dim:
            m = block.T @ block / count
            m = 0.5 * (m + m.T)
            eigenvalues = np.linalg.eigvalsh(m)
            min_eig, max_eig = float(eigenvalues[0]), float(eigenvalues[-1])
        else:
            min_eig, max_eig = float("nan"), float("nan")
        variance = float(np.var(block[:, 1])) if two_term and count >= 1 else None
        distinct = int(np.unique(block[:, -1]).shape[0]) if dim >= 2 else 1
        cells.append(
            EigenCell(
                label=label,
                value=float(cell_values[c]),
                probability=count / n,
                count=count,
                usable=usable,
                min_eigenvalue=min_eig,
                max_eigenvalue=max_eig,
                second_moment_variance=variance,
                distinct=distinct,
            )
        )
    strong = tuple(
        c.label for c in cells
        if c.usable and np.isfinite(c.min_eigenvalue) and c.min_eigenvalue >= threshold
    )
    support = tuple(c.label for c in cells if c.usable and c.distinct >= 2)
    return ConditionalEigenProfile(
        conditioning=conditioning_name,
        cells=tuple(cells),
        threshold=threshold,
        strong_set=strong,
        support_set=support,
    )


def conditional_profile_x(data, q_terms, v, n_bins=DEFAULT_BINS,
                          threshold=DEFAULT_THRESHOLD, min_count=None):
    """Smallest eigenvalue of the control second-moment matrix within each
    treatment cell; the strong set estimates where it clears the threshold."""
    v = check_vector(v, "v", n=data.n)
    if data.n == 0:
        raise InvalidInputError("empty dataset")
    return _profile("x", data.x, v, q_terms, n_bins, threshold, min_count)


def conditional_profile_v(data, p_terms, v, n_bins=DEFAULT_BINS,
                          threshold=DEFAULT_THRESHOLD, min_count=None):
    """Mirror image: treatment second-moment matrix within control cells."""
    v = check_vector(v, "v", n=data.n)
    if data.n == 0:
        raise InvalidInputError("empty dataset")
    return _profile("v", v, data.x, p_terms, n_bins, threshold, min_count)


def propensity_check(data, v, n_bins=DEFAULT_BINS, tolerance=0.05):
    """Per-control-cell propensity of a binary treatment.

    A cell passes when its propensity is at least ``tolerance`` away from
    both 0 and 1; the overall check passes when the passing cells carry
    positive probability, which is weaker than requiring overlap
    everywhere.
    """
    x = check_binary(data.x, "x")
    v = check_vector(v, "v", n=data.n)
    labels, assign, _ = _bin_cells(v, n_bins)
    n = x.shape[0]
    cells = []
    for c, label in enumerate(labels):
        mask = assign == c
        count = int(mask.sum())
        if count == 0:
            continue
        propensity = float(x[mask].mean())
        cells.append(
            PropensityCell(
                label=label,
                probability=count / n,
                propensity=propensity,
                variance=propensity * (1.0 - propensity),
                count=count,
                ok=bool(tolerance <= propensity <= 1.0 - tolerance),
            )
        )
    passes = any(c.ok and c.probability > 0 for c in cells)
    return PropensityReport(cells=tuple(cells), tolerance=tolerance, passes=passes)


def lambda_bound_check(profile):
    """Verify min-eigenvalue >= Var / max-eigenvalue on each 2x2 cell.

    The determinant identity makes the bound an equality for second-moment
    matrices of (1, t)'; the margin reported here is a numerical
    consistency check.  Cells of other shapes yield a not-applicable report.
    """
    checks = []
    for cell in profile.cells:
        if cell.second_moment_variance is None or not np.isfinite(
            cell.min_eigenvalue
        ):
            checks.append(
                BoundCheck(
                    cell.label, float("nan"), float("nan"), float("nan"),
                    ok=False, applicable=False,
                )
            )
            continue
        if cell.max_eigenvalue > 0:
            bound = cell.second_moment_variance / cell.max_eigenvalue
        else:
            bound = 0.0
        margin = cell.min_eigenvalue - bound
        checks.append(
            BoundCheck(
                label=cell.label,
                min_eigenvalue=cell.min_eigenvalue,
                bound=bound,
                margin=margin,
                ok=bool(margin >= -1e-10),
            )
        )
    return tuple(checks)


@dataclass(frozen=True)
class TriangularProfiles:
    """Both eigenvalue profiles written in terms of the fitted first stage."""

    by_x: ConditionalEigenProfile
    by_v: ConditionalEigenProfile

    def passes(self):
        return self.by_x.passes() or self.by_v.passes()


def triangular_profiles(first_stage, data, p_terms, q_terms,
                        n_bins=DEFAULT_BINS, threshold=DEFAULT_THRESHOLD,
                        v_grid=None, min_count=None):
    """Identification profiles computed from the first stage alone.

    The x-profile substitutes fitted control values into the control basis
    and conditions on the treatment.  The v-profile evaluates the treatment
    basis at the predicted treatment quantiles across the sample
    instruments, one second-moment matrix per grid level; each level in
    (0,1) carries equal mass because the control rank is uniform.
    """
    vhat = first_stage.transform(data)
    by_x = _profile("x", data.x, vhat, q_terms, n_bins, threshold, min_count)

    if v_grid is None:
        v_grid = (np.arange(n_bins) + 0.5) / n_bins
    v_grid = check_vector(v_grid, "v_grid")
    eps = first_stage.epsilon_
    v_grid = v_grid[(v_grid >= eps) & (v_grid <= 1.0 - eps)]
    if v_grid.size == 0:
        raise InvalidInputError("v_grid is empty after trimming")

    design = first_stage._design(data.z, data.z1)
    # Predicted treatment quantiles at the grid levels closest to v_grid.
    levels = first_stage.process_.levels
    idx = np.searchsorted(levels, v_grid)
    idx = np.clip(idx, 0, levels.size - 1)
    p_terms_parsed = tuple(parse_term(t) for t in p_terms)
    dim = len(p_terms_parsed)
    cells = []
    for grid_value, t in zip(v_grid, idx):
        predicted = design @ first_stage.process_.coefficients[t]
        cols = np.column_stack([term(predicted) for term in p_terms_parsed])
        m = cols.T @ cols / cols.shape[0]
        m = 0.5 * (m + m.T)
        eigenvalues = np.linalg.eigvalsh(m)
        variance = float(np.var(cols[:, 1])) if dim == 2 else None
        cells.append(
            EigenCell(
                label=f"v={grid_value:.3g}",
                value=float(grid_value),
                probability=1.0 / v_grid.size,
                count=cols.shape[0],
                usable=True,
                min_eigenvalue=float(eigenvalues[0]),
                max_eigenvalue=float(eigenvalues[-1]),
                second_moment_variance=variance,
                distinct=int(np.unique(np.round(predicted, 12)).shape[0]),
            )
        )
    strong = tuple(c.label for c in cells if c.min_eigenvalue >= threshold)
    support = tuple(c.label for c in cells if c.distinct >= 2)
    by_v = ConditionalEigenProfile(
        conditioning="v",
        cells=tuple(cells),
        threshold=threshold,
        strong_set=strong,
        support_set=support,
    )
    return TriangularProfiles(by_x=by_x, by_v=by_v)
