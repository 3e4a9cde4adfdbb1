"""Approximate Dirichlet-process sampling and conjugate posterior updates.

A random measure draw truncates the decreasing-weight series at N atoms:
atoms come i.i.d. from the base measure, arrival times are cumulative
exponential(1) sums, and each raw weight is the gamma(a/N, 1) co-cdf
inverse of the normalized arrival time, kept in log scale until the final
stable softmax.  Posterior updating is conjugate: concentration a + n with
a base that mixes the prior base and the empirical data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import DistSpec
from .gammainc import gamma_cocdf_inverse

_WEIGHT_SUM_TOL = 1e-9
_RATIO_CLAMP = 1.0 - 1e-16


class DegenerateDrawError(RuntimeError):
    """All raw series weights vanished; cannot normalize a measure draw."""


@dataclass(frozen=True, eq=False)
class PosteriorMixture:
    """Base measure mixing an analytic part with observed data.

    With probability ``prior_weight`` a draw comes from ``spec``; otherwise
    a uniformly chosen data point is returned.
    """

    prior_weight: float
    spec: DistSpec
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=np.float64))
        if not 0.0 < self.prior_weight <= 1.0:
            raise ValueError(f"prior_weight must be in (0, 1], got {self.prior_weight}")
        if self.data.size == 0:
            raise ValueError("posterior mixture needs nonempty data")

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        take_analytic = rng.random(n) < self.prior_weight
        out = np.empty(n)
        k = int(take_analytic.sum())
        if k:
            out[take_analytic] = self.spec.sample_n(rng, k)
        if n - k:
            idx = rng.integers(0, self.data.size, n - k)
            out[~take_analytic] = self.data[idx]
        return out

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.sample_n(rng, 1)[0])


def sample_base(base, rng: np.random.Generator) -> float:
    """One draw from a base measure (analytic spec or posterior mixture)."""
    return base.sample(rng)


@dataclass(frozen=True, eq=False)
class DpPrior:
    """Concentration plus base measure of a Dirichlet process."""

    concentration: float
    base: object  # DistSpec or PosteriorMixture

    def __post_init__(self):
        if not self.concentration > 0:
            raise ValueError(f"concentration must be positive, got {self.concentration}")

    def posterior(self, data) -> "DpPrior":
        """Conjugate update: DP(a, H) + n observations -> DP(a+n, mix of H and data)."""
        arr = np.asarray(data, dtype=np.float64)
        if arr.size == 0:
            raise ValueError("posterior update needs nonempty data")
        if not isinstance(self.base, DistSpec):
            raise ValueError("posterior update requires an analytic base measure")
        a, n = self.concentration, arr.size
        return DpPrior(a + n, PosteriorMixture(a / (a + n), self.base, arr))


def posterior(prior: DpPrior, data) -> DpPrior:
    return prior.posterior(data)


@dataclass(eq=False)
class SeriesDraw:
    """One truncated series realization, kept in generation order."""

    gammas: np.ndarray           # N+1 cumulative exponential(1) arrivals
    atoms: np.ndarray            # N base draws
    log_raw_weights: np.ndarray  # ln of the co-cdf inverses, nonincreasing
    weights: np.ndarray          # normalized, nonincreasing

    def __post_init__(self):
        if not np.all(np.diff(self.gammas) > 0):
            raise ValueError("arrival times must be strictly increasing")
        if np.any(np.diff(self.log_raw_weights) > 0):
            raise ValueError("raw log weights must be nonincreasing")
        if abs(self.weights.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError("series weights must sum to one")


@dataclass(eq=False)
class DiscreteMeasure:
    """Atoms-plus-weights measure with a right-continuous step CDF."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.atoms = np.asarray(self.atoms, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.atoms.shape != self.weights.shape or self.atoms.ndim != 1:
            raise ValueError("atoms and weights must be matching 1-d arrays")
        if np.any(np.diff(self.atoms) < 0):
            raise ValueError("atoms must be sorted ascending")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError("weights must sum to one")
        self._cum = np.concatenate(([0.0], np.cumsum(self.weights)))

    @classmethod
    def from_sample(cls, values) -> "DiscreteMeasure":
        arr = np.sort(np.asarray(values, dtype=np.float64))
        if arr.size == 0:
            raise ValueError("empty sample")
        return cls(arr, np.full(arr.size, 1.0 / arr.size))

    def cdf_at(self, t):
        """P((-inf, t]); ties at t are all included."""
        idx = np.searchsorted(self.atoms, t, side="right")
        out = self._cum[idx]
        return float(out) if np.asarray(t).ndim == 0 else out


def _log_raw_weight_rows(concentration: float, n_atoms: int, gammas: np.ndarray) -> np.ndarray:
    ratios = gammas[:, :-1] / gammas[:, -1:]
    np.minimum(ratios, _RATIO_CLAMP, out=ratios)
    return gamma_cocdf_inverse(concentration / n_atoms, ratios)


def _normalize_rows(log_w: np.ndarray) -> np.ndarray:
    peak = log_w.max(axis=-1, keepdims=True)
    if not np.all(np.isfinite(peak)):
        raise DegenerateDrawError("all series weights underflowed")
    w = np.exp(log_w - peak)
    return w / w.sum(axis=-1, keepdims=True)


def _draw_row(base, n_atoms: int, rng: np.random.Generator):
    # atoms and arrivals come from spawned child streams so that draws at
    # different truncation levels share their common prefix (common random
    # numbers across n_atoms; the arrivals stay independent of the atoms)
    atom_rng, arrival_rng = rng.spawn(2)
    atoms = base.sample_n(atom_rng, n_atoms)
    gammas = np.cumsum(arrival_rng.standard_exponential(n_atoms + 1))
    return atoms, gammas


def sample_series(prior: DpPrior, n_atoms: int, rng: np.random.Generator) -> SeriesDraw:
    """One truncated-series draw, exposing the internal arrival/weight state."""
    if n_atoms < 1:
        raise ValueError("n_atoms must be at least 1")
    atoms, gammas = _draw_row(prior.base, n_atoms, rng)
    log_w = _log_raw_weight_rows(prior.concentration, n_atoms, gammas[None, :])[0]
    weights = _normalize_rows(log_w[None, :])[0]
    return SeriesDraw(gammas, atoms, log_w, weights)


def sample_dp(prior: DpPrior, n_atoms: int, rng: np.random.Generator) -> DiscreteMeasure:
    """One approximate DP(a, H) realization with atoms sorted ascending."""
    draw = sample_series(prior, n_atoms, rng)
    order = np.argsort(draw.atoms, kind="stable")
    return DiscreteMeasure(draw.atoms[order], draw.weights[order])


def sample_dp_rows(prior: DpPrior, n_atoms: int, rngs) -> tuple:
    """Batched draws, one per generator in ``rngs``.

    Returns (atoms, weights) as (len(rngs), n_atoms) arrays with each row
    sorted by atom.  Row i consumes rngs[i] exactly as sample_dp would, so
    batching never changes any seeded result.
    """
    m = len(rngs)
    atoms = np.empty((m, n_atoms))
    gammas = np.empty((m, n_atoms + 1))
    for i, rng in enumerate(rngs):
        atoms[i], gammas[i] = _draw_row(prior.base, n_atoms, rng)
    log_w = _log_raw_weight_rows(prior.concentration, n_atoms, gammas)
    weights = _normalize_rows(log_w)
    order = np.argsort(atoms, axis=-1, kind="stable")
    return np.take_along_axis(atoms, order, axis=-1), np.take_along_axis(weights, order, axis=-1)
