"""Named scalar transformations and kronecker-product regressors.

A basis is an ordered list of terms applied to one variable; the full
regressor vector is the row-major kronecker product of the treatment,
covariate and control bases.  Term names double as a small configuration
language ("1", "x", "x^2", "log", "probit") so the same specification can
come from code or from a config file.
"""

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .._validation import check_vector
from ..exceptions import InvalidInputError

_POWER = re.compile(r"^x\^(\d+)$")


@dataclass(frozen=True)
class Term:
    """One named scalar transformation."""

    name: str
    func: object = field(compare=False)

    def __call__(self, values):
        return self.func(np.asarray(values, dtype=float))


def _probit(values):
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0.0) or np.any(values >= 1.0):
        raise InvalidInputError(
            "probit term requires arguments strictly inside (0, 1)"
        )
    return ndtri(values)


def _log(values):
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0.0):
        raise InvalidInputError("log term requires positive arguments")
    return np.log(values)


_NAMED = {
    "1": lambda v: np.ones_like(np.asarray(v, dtype=float)),
    "x": lambda v: np.asarray(v, dtype=float),
    "log": _log,
    "probit": _probit,
}


def parse_term(spec):
    """Turn a term name or callable into a Term.

    Accepts "1", "x", "x^k" (k >= 2), "log", "probit", an existing Term,
    or any callable (named after the callable).
    """
    if isinstance(spec, Term):
        return spec
    if callable(spec):
        name = getattr(spec, "__name__", "custom")
        return Term(name, spec)
    name = str(spec).strip()
    if name in _NAMED:
        return Term(name, _NAMED[name])
    match = _POWER.match(name)
    if match:
        power = int(match.group(1))
        return Term(name, lambda v, p=power: np.asarray(v, dtype=float) ** p)
    raise InvalidInputError(
        f"unknown basis term {spec!r}; expected one of "
        f"{sorted(_NAMED)} or 'x^k'"
    )


def _parse_terms(specs, label):
    if isinstance(specs, (str, Term)) or callable(specs):
        specs = (specs,)
    terms = tuple(parse_term(s) for s in specs)
    if not terms:
        raise InvalidInputError(f"{label} terms must be nonempty")
    if terms[0].name != "1":
        raise InvalidInputError(
            f"the first {label} term must be the constant '1', got {terms[0].name!r}"
        )
    return terms


@dataclass(frozen=True)
class BasisSpec:
    """Transformation lists for treatment (p), control (q), covariate (r)
    and instrument (s), each starting with the constant term."""

    p_terms: tuple = ("1", "x")
    q_terms: tuple = ("1", "probit")
    r_terms: tuple = ("1",)
    s_terms: tuple = ("1", "x")

    def __post_init__(self):
        for label in ("p", "q", "r", "s"):
            terms = _parse_terms(getattr(self, f"{label}_terms"), label)
            object.__setattr__(self, f"{label}_terms", terms)

    def _columns(self, terms, values):
        values = np.asarray(values, dtype=float)
        scalar = values.ndim == 0
        values = np.atleast_1d(values)
        cols = np.column_stack([t(values) for t in terms])
        return cols, scalar

    def outcome_design(self, x, z1, v):
        """Rows p(x) (x) r(z1) (x) q(v), the second-stage regressors."""
        p, scalar = self._columns(self.p_terms, x)
        r, _ = self._columns(self.r_terms, z1)
        q, _ = self._columns(self.q_terms, v)
        if not (p.shape[0] == r.shape[0] == q.shape[0]):
            raise InvalidInputError("x, z1 and v must have equal lengths")
        w = np.einsum("ni,nj,nk->nijk", p, r, q).reshape(p.shape[0], -1)
        return w[0] if scalar else w

    def treatment_design(self, z, z1):
        """Rows s(z) (x) r(z1), the first-stage regressors."""
        s, scalar = self._columns(self.s_terms, z)
        r, _ = self._columns(self.r_terms, z1)
        if s.shape[0] != r.shape[0]:
            raise InvalidInputError("z and z1 must have equal lengths")
        w = np.einsum("ni,nj->nij", s, r).reshape(s.shape[0], -1)
        return w[0] if scalar else w

    @property
    def outcome_dim(self):
        return len(self.p_terms) * len(self.r_terms) * len(self.q_terms)

    @property
    def treatment_dim(self):
        return len(self.s_terms) * len(self.r_terms)

    def outcome_column_names(self):
        return tuple(
            f"p[{p.name}]*r[{r.name}]*q[{q.name}]"
            for p in self.p_terms
            for r in self.r_terms
            for q in self.q_terms
        )

    def treatment_column_names(self):
        return tuple(
            f"s[{s.name}]*r[{r.name}]"
            for s in self.s_terms
            for r in self.r_terms
        )


def build_w(spec, x, z1, v):
    """Kronecker regressor p(x) (x) r(z1) (x) q(v) for scalars or vectors."""
    v_arr = check_vector(v, "v")
    if any(t.name == "probit" for t in spec.q_terms):
        if np.any(v_arr <= 0.0) or np.any(v_arr >= 1.0):
            raise InvalidInputError(
                "v must lie strictly inside (0, 1) when q contains a probit term"
            )
    return spec.outcome_design(x, z1, v)
