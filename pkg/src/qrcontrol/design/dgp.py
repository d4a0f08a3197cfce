"""Synthetic triangular data with evaluable ground truth.

The generating process is a heterogeneous-coefficients model: the outcome
is a sum of treatment loadings times disturbance terms, each disturbance
being a known-basis function of the control with coefficients driven by a
single uniform rank variable.  Because every ingredient is known, the true
average, distribution and quantile structural functions can be computed by
quadrature and monotone inversion, which is what the estimator tests rely
on.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .._validation import check_vector
from ..exceptions import InvalidDgpError, InvalidInputError
from .basis import parse_term
from .data import Dataset

__all__ = ["DgpSpec", "TrueStructure", "simulate", "make_preset", "available_presets"]


@dataclass(frozen=True)
class DgpSpec:
    """A heterogeneous-coefficients generating process.

    ``coefficients`` maps an array of rank levels u (shape (m,)) to the
    stacked coefficient matrix of shape (m, J*K): row u holds
    [beta_1(u)', ..., beta_J(u)'] over the K control-basis terms, matching
    the row-major kronecker order of the regressors.  ``first_stage`` maps
    (v, z) to the treatment and must be nondecreasing in v;
    ``instrument`` maps (rng, n) to instrument draws.
    """

    p_terms: tuple
    q_terms: tuple
    coefficients: object = field(compare=False)
    first_stage: object = field(compare=False)
    instrument: object = field(compare=False)
    z1_probability: float = 0.0
    seed: int = 0
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(
            self, "p_terms", tuple(parse_term(t) for t in self.p_terms)
        )
        object.__setattr__(
            self, "q_terms", tuple(parse_term(t) for t in self.q_terms)
        )
        if not 0.0 <= float(self.z1_probability) <= 1.0:
            raise InvalidInputError("z1_probability must lie in [0, 1]")

    @property
    def n_loadings(self):
        return len(self.p_terms)

    @property
    def n_control_terms(self):
        return len(self.q_terms)

    def conditional_quantile(self, u, x, v):
        """Q_{Y|XV}(u | x, v); u, x, v broadcastable arrays."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        u, x, v = np.broadcast_arrays(u, x, v)
        beta = np.asarray(self.coefficients(u.ravel()), dtype=float)
        J, K = self.n_loadings, self.n_control_terms
        if beta.shape != (u.size, J * K):
            raise InvalidDgpError(
                f"coefficients must return shape (m, {J * K}), got {beta.shape}"
            )
        p_cols = np.column_stack([t(x.ravel()) for t in self.p_terms])
        q_cols = np.column_stack([t(v.ravel()) for t in self.q_terms])
        w = (p_cols[:, :, None] * q_cols[:, None, :]).reshape(u.size, J * K)
        return (beta * w).sum(axis=1).reshape(u.shape)


def _check_monotone_in_u(spec, x_sample, v_sample):
    u_grid = np.linspace(0.005, 0.995, 41)
    for x, v in zip(x_sample, v_sample):
        curve = spec.conditional_quantile(u_grid, x, v)
        if np.any(np.diff(curve) < -1e-10):
            raise InvalidDgpError(
                f"conditional quantile decreases in u at (x={x:.4g}, v={v:.4g})"
            )


def _check_monotone_first_stage(spec, z_sample):
    v_grid = np.linspace(0.005, 0.995, 41)
    for z in z_sample:
        curve = np.asarray(
            spec.first_stage(v_grid, np.full_like(v_grid, z)), dtype=float
        )
        if np.any(np.diff(curve) < -1e-10):
            raise InvalidDgpError(
                f"first-stage map decreases in v at z={z:.4g}"
            )


def simulate(spec, n, seed=None):
    """Draw a sample of size n and return (Dataset, TrueStructure).

    The control rank V and the outcome rank U are independent uniforms,
    V independent of the instrument; the treatment comes from the
    first-stage quantile map.  Monotonicity of the model in u and of the
    first stage in v is verified on sampled support points.
    """
    n = int(n)
    if n < 1:
        raise InvalidInputError("n must be positive")
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    z = np.asarray(spec.instrument(rng, n), dtype=float)
    if z.shape != (n,):
        raise InvalidDgpError(f"instrument must return shape ({n},), got {z.shape}")
    v = rng.uniform(size=n)
    u = rng.uniform(size=n)
    x = np.asarray(spec.first_stage(v, z), dtype=float)
    if x.shape != (n,):
        raise InvalidDgpError("first_stage must return one treatment per draw")
    if spec.z1_probability > 0.0:
        z1 = (rng.uniform(size=n) < spec.z1_probability).astype(float)
    else:
        z1 = np.zeros(n)

    probe = slice(0, min(n, 200))
    _check_monotone_in_u(spec, x[probe], v[probe])
    _check_monotone_first_stage(spec, np.unique(z[probe])[:20])

    y = spec.conditional_quantile(u, x, v)
    data = Dataset(y=y, x=x, z=z, z1=z1)
    return data, TrueStructure(spec)


class TrueStructure:
    """Ground-truth structural functions of a DgpSpec.

    The average structural function uses the closed form (mean coefficient
    curve times the mean control basis); distribution and quantile
    structural functions integrate the known conditional distribution over
    the control on a midpoint grid and invert it by bisection.
    """

    def __init__(self, spec, v_cells=10001, u_cells=10001):
        self.spec = spec
        self._v_grid = (np.arange(v_cells) + 0.5) / v_cells
        u_grid = (np.arange(u_cells) + 0.5) / u_cells
        beta = np.asarray(spec.coefficients(u_grid), dtype=float)
        self._mean_beta = beta.mean(axis=0)  # integrates beta over u
        q_cols = np.column_stack([t(self._v_grid) for t in spec.q_terms])
        self._mean_q = q_cols.mean(axis=0)  # integrates q over v

    def first_stage_quantile(self, v, z):
        """The true Q_{X|Z}(v | z)."""
        v = np.asarray(v, dtype=float)
        z = np.asarray(z, dtype=float)
        v, z = np.broadcast_arrays(v, z)
        return np.asarray(self.spec.first_stage(v, z), dtype=float)

    def asf(self, x):
        """mu(x) = sum_j p_j(x) * mean_u beta_j(u)' mean_v q(v)."""
        x = np.asarray(x, dtype=float)
        J, K = self.spec.n_loadings, self.spec.n_control_terms
        loadings = self._mean_beta.reshape(J, K) @ self._mean_q
        p_cols = np.column_stack([t(np.atleast_1d(x)) for t in self.spec.p_terms])
        out = p_cols @ loadings
        return float(out[0]) if x.ndim == 0 else out

    def _rank_at(self, y, x, v_grid):
        """u*(y, x, v) = measure{u : Q_{Y|XV}(u|x,v) <= y}, vectorized over v."""
        lo = np.zeros_like(v_grid)
        hi = np.ones_like(v_grid)
        eps = 1e-9
        q_lo = self.spec.conditional_quantile(np.full_like(v_grid, eps), x, v_grid)
        q_hi = self.spec.conditional_quantile(np.full_like(v_grid, 1 - eps), x, v_grid)
        below = q_lo > y  # y under the whole curve: rank 0
        above = q_hi <= y  # y over the whole curve: rank 1
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            q_mid = self.spec.conditional_quantile(
                np.clip(mid, eps, 1 - eps), x, v_grid
            )
            take = q_mid <= y
            lo = np.where(take, mid, lo)
            hi = np.where(take, hi, mid)
        rank = 0.5 * (lo + hi)
        rank[below] = 0.0
        rank[above] = 1.0
        return rank

    def dsf(self, y, x):
        """G(y, x) = integral of the conditional rank over the control."""
        return float(self._rank_at(float(y), float(x), self._v_grid).mean())

    def qsf(self, p, x):
        """Q(p, x) = inf{y : G(y, x) >= p} by bisection."""
        p = float(p)
        if not 0.0 < p < 1.0:
            raise InvalidInputError("p must lie strictly inside (0, 1)")
        x = float(x)
        eps = 1e-9
        ends = []
        for u_end in (eps, 1 - eps):
            vals = self.spec.conditional_quantile(
                np.full_like(self._v_grid, u_end), x, self._v_grid
            )
            ends.extend([vals.min(), vals.max()])
        lo, hi = min(ends) - 1.0, max(ends) + 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if self.dsf(mid, x) >= p:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Presets


def _binary_instrument(prob=0.5):
    return lambda rng, n: (rng.uniform(size=n) < prob).astype(float)


def _normal_instrument(scale=1.0):
    return lambda rng, n: scale * rng.standard_normal(n)


def _linear_coefficients(a, b, c):
    """beta_j(u)'q(v) = a_j + b_j v + c_j u over q = (1, v)."""
    a, b, c = (np.asarray(arr, dtype=float) for arr in (a, b, c))

    def coefficients(u):
        u = np.asarray(u, dtype=float)
        cols = [np.column_stack([a_j + c_j * u, np.full_like(u, b_j)])
                for a_j, b_j, c_j in zip(a, b, c)]
        return np.hstack(cols)

    return coefficients


def _uniform_first_stage(shift=1.0, half_width=(1.0, 1.5)):
    """Q_{X|Z}(v|z) = shift*z + (w0 + z*(w1-w0))*(2v - 1); bounded support."""
    w0, w1 = half_width

    def first_stage(v, z):
        v = np.asarray(v, dtype=float)
        z = np.asarray(z, dtype=float)
        width = w0 + z * (w1 - w0)
        return shift * z + width * (2.0 * v - 1.0)

    return first_stage


def _gaussian_first_stage(slope=0.7, scale=0.8):
    from scipy.special import ndtri

    def first_stage(v, z):
        v = np.asarray(v, dtype=float)
        return slope * np.asarray(z, dtype=float) + scale * ndtri(
            np.clip(v, 1e-12, 1 - 1e-12)
        )

    return first_stage


def _preset_linear(seed=0, **overrides):
    """Linear heterogeneous-coefficients model with a relevant binary
    instrument and bounded treatment support."""
    params = dict(a=(1.0, 1.0), b=(1.0, 0.5), c=(1.0, 0.5))
    params.update(overrides)
    return DgpSpec(
        p_terms=("1", "x"),
        q_terms=("1", "x"),
        coefficients=_linear_coefficients(params["a"], params["b"], params["c"]),
        first_stage=_uniform_first_stage(),
        instrument=_binary_instrument(),
        seed=seed,
        name="linear",
    )


def _preset_continuous(seed=0, **overrides):
    """Continuous standard-normal instrument; treatment-slope heterogeneity
    loads on the control only, so the treatment support may be unbounded."""
    params = dict(a=(1.0, 1.0), b=(1.0, 0.6), c=(1.0, 0.0))
    params.update(overrides)
    return DgpSpec(
        p_terms=("1", "x"),
        q_terms=("1", "x"),
        coefficients=_linear_coefficients(params["a"], params["b"], params["c"]),
        first_stage=_gaussian_first_stage(),
        instrument=_normal_instrument(),
        seed=seed,
        name="continuous",
    )


def _preset_deterministic(seed=0, intercept=0.5, slope=1.0):
    """Outcome an exact linear function of the treatment."""
    return DgpSpec(
        p_terms=("1", "x"),
        q_terms=("1",),
        coefficients=lambda u: np.column_stack(
            [np.full_like(np.asarray(u, dtype=float), intercept),
             np.full_like(np.asarray(u, dtype=float), slope)]
        ),
        first_stage=_gaussian_first_stage(slope=1.0, scale=0.8),
        instrument=_binary_instrument(),
        seed=seed,
        name="deterministic",
    )


def _preset_irrelevant(seed=0):
    """First-stage map free of the instrument: nothing is identified."""
    base = _preset_linear(seed=seed)
    return replace(
        base,
        first_stage=_uniform_first_stage(shift=0.0, half_width=(1.0, 1.0)),
        name="irrelevant",
    )


_PRESETS = {
    "linear": _preset_linear,
    "continuous": _preset_continuous,
    "deterministic": _preset_deterministic,
    "irrelevant": _preset_irrelevant,
}


def available_presets():
    return sorted(_PRESETS)


def make_preset(name, seed=0, **overrides):
    """Instantiate a named generating process."""
    try:
        builder = _PRESETS[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown preset {name!r}; available: {', '.join(available_presets())}"
        ) from None
    return builder(seed=seed, **overrides)
