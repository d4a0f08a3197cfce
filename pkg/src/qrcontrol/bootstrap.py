"""Weighted-bootstrap uniform confidence bands for structural functions.

Each replication draws i.i.d. standard exponential weights (nonnegative,
unit mean), refits both estimation stages under the weighted check loss
and re-tabulates the structural functions on the evaluation region.
Bands are symmetric max-t bands: a robust per-point scale comes from the
bootstrap interquartile range, and the critical value is the empirical
level-quantile of the replication-wise maximum studentised deviation, so
the nominal fraction of replications falls inside the band uniformly over
the region grid.
"""

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import clone

from .exceptions import BootstrapError, InvalidInputError, QrControlError

_IQR_TO_SD = 1.349  # normal-consistent interquartile-range scale


@dataclass(frozen=True)
class BootstrapConfig:
    """Replication count, band level, weight law and seed."""

    replications: int = 250
    level: float = 0.90
    weight_law: str = "exponential"
    seed: int | None = None

    def __post_init__(self):
        if int(self.replications) < 2:
            raise InvalidInputError("replications must be >= 2")
        if not 0.0 < float(self.level) < 1.0:
            raise InvalidInputError("level must lie in (0, 1)")
        if self.weight_law not in ("exponential", "ones"):
            raise InvalidInputError(
                f"unknown weight law {self.weight_law!r}; "
                "expected 'exponential' or 'ones'"
            )


@dataclass(frozen=True)
class BootstrapResult:
    """Band-augmented region tables plus enough state to re-level bands."""

    region: "RegionEstimate"
    config: BootstrapConfig
    failed: tuple
    scales: dict          # kind -> per-point robust scale
    t_statistics: dict    # kind -> (replications,) max-t draws

    def bands_at(self, level):
        """Re-derive bands at another confidence level from the same run."""
        if not 0.0 < float(level) < 1.0:
            raise InvalidInputError("level must lie in (0, 1)")
        bands = {}
        for kind, table in self.region.tables().items():
            critical = _critical_value(self.t_statistics[kind], level)
            half = critical * self.scales[kind]
            bands[kind] = (table.values - half, table.values + half, float(level))
        return self.region.with_bands(bands)


def _draw_weights(rng, law, shape):
    if law == "ones":
        return np.ones(shape)
    return rng.exponential(size=shape)


def _critical_value(t_stats, level):
    # Smallest order statistic covering at least the nominal fraction.
    return float(np.quantile(t_stats, level, method="inverted_cdf"))


def run_bootstrap(estimator, data, config=None, x_grid=None, p_levels=None,
                  sample_weight_refit=None):
    """Augment the estimator's region tables with uniform confidence bands.

    ``estimator`` must already be fitted; the point estimate is tabulated
    from it, replications refit clones on the same data under random
    weights.  Replications that fail (e.g. rank deficiency under a weight
    draw) are recorded; if more than 10% fail the run errors.
    """
    if config is None:
        config = BootstrapConfig()
    point = estimator.evaluate_region(x_grid=x_grid, p_levels=p_levels)
    mesh = point.mesh

    n = data.n
    rng = np.random.default_rng(config.seed)
    all_weights = _draw_weights(rng, config.weight_law, (config.replications, n))

    tables = {kind: [] for kind in ("dsf", "qsf", "asf")}
    failed = []
    for b in range(config.replications):
        try:
            rep = clone(estimator).fit(data, sample_weight=all_weights[b])
            region = rep.evaluate_region(
                x_grid=point.qsf.x_grid,
                p_levels=point.qsf.index_grid,
                mesh=mesh,
            )
        except QrControlError:
            failed.append(b)
            continue
        for kind, table in region.tables().items():
            tables[kind].append(table.values)
    if len(failed) > 0.10 * config.replications:
        raise BootstrapError(
            f"{len(failed)} of {config.replications} replications failed"
        )
    if len(tables["qsf"]) < 2:
        raise BootstrapError("fewer than two successful replications")

    scales = {}
    t_statistics = {}
    bands = {}
    for kind, table in point.tables().items():
        draws = np.stack(tables[kind])  # (B_ok, ...)
        q75, q25 = np.percentile(draws, [75.0, 25.0], axis=0)
        scale = (q75 - q25) / _IQR_TO_SD
        deviation = np.abs(draws - table.values[None, ...])
        with np.errstate(divide="ignore", invalid="ignore"):
            studentised = np.where(scale[None, ...] > 0.0,
                                   deviation / scale[None, ...], 0.0)
        t_stats = studentised.reshape(draws.shape[0], -1).max(axis=1)
        critical = _critical_value(t_stats, config.level)
        half = critical * scale
        scales[kind] = scale
        t_statistics[kind] = t_stats
        bands[kind] = (table.values - half, table.values + half, config.level)

    return BootstrapResult(
        region=point.with_bands(bands),
        config=config,
        failed=tuple(failed),
        scales=scales,
        t_statistics=t_statistics,
    )
