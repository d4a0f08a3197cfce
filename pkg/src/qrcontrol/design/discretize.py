"""Instrument coarsening schemes.

Both schemes map each observation to the midpoint of its bin and send the
sample maximum to the midpoint of the top bin.  Design 1 bins at sample
quantiles so the coarsened instrument is roughly uniform over its values;
Design 2 bins on an equispaced grid so cell masses follow the shape of
the original distribution.
"""

import numpy as np

from .._validation import check_vector
from ..exceptions import DegenerateBinsError, DegenerateRangeError, InvalidInputError


def _empirical_quantile(sorted_values, t):
    """Right-continuous sample quantile: x_(ceil(n t)) for t in (0,1], min at 0."""
    n = sorted_values.shape[0]
    t = np.asarray(t, dtype=float)
    idx = np.ceil(n * t).astype(int)
    idx = np.clip(idx, 1, n)
    return sorted_values[idx - 1]


def _midpoint_assign(values, edges):
    """Map values to midpoints of the half-open bins [edge_m, edge_{m+1})."""
    mids = edges[:-1] + 0.5 * np.diff(edges)
    bins = np.searchsorted(edges, values, side="right") - 1
    bins = np.clip(bins, 0, mids.shape[0] - 1)
    out = mids[bins]
    out[values == edges[-1]] = mids[-1]  # the maximum joins the top bin
    return out


def discretize_design1(z_star, num_bins):
    """Quantile-bin coarsening with bin probabilities m/num_bins.

    The documented sample-quantile convention is the right-continuous
    empirical quantile x_(ceil(n t)).
    """
    values = check_vector(z_star, "z_star")
    num_bins = int(num_bins)
    if num_bins < 1:
        raise InvalidInputError(f"num_bins must be >= 1, got {num_bins}")
    if values.shape[0] < num_bins:
        raise InvalidInputError("need at least num_bins observations")
    if np.unique(values).shape[0] < num_bins:
        raise DegenerateBinsError(
            f"num_bins={num_bins} exceeds the {np.unique(values).shape[0]} "
            "distinct instrument values"
        )
    ordered = np.sort(values)
    t = np.arange(num_bins + 1) / num_bins
    edges = _empirical_quantile(ordered, t)
    edges[0] = ordered[0]
    return _midpoint_assign(values, edges)


def discretize_design2(z_star, num_bins):
    """Equispaced-grid coarsening between the sample minimum and maximum."""
    values = check_vector(z_star, "z_star")
    num_bins = int(num_bins)
    if num_bins < 1:
        raise InvalidInputError(f"num_bins must be >= 1, got {num_bins}")
    lo, hi = values.min(), values.max()
    if hi <= lo:
        raise DegenerateRangeError("instrument column is constant")
    edges = np.linspace(lo, hi, num_bins + 1)
    return _midpoint_assign(values, edges)
