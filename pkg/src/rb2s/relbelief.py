"""Prior-quantile discretization, relative-belief ratios, and strength.

The prior distance sample fixes a grid of equal-prior-content bins; the
ratio estimate for a bin is n_bins times its posterior content, and the
ratio at distance zero is n_bins times the posterior mass below the first
retained prior quantile.  Strength accumulates the posterior content of
every region whose ratio does not exceed the zero-distance ratio; the zero
region itself always qualifies (its ratio is the comparison value), which
is what makes all-mass-near-zero runs report strength one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASS_TOL = 1e-9
_RANGE_TOL = 1e-12


@dataclass(eq=False)
class DistanceSamples:
    """Prior and posterior Monte Carlo draws of the distance."""

    prior: np.ndarray
    posterior: np.ndarray

    def __post_init__(self):
        self.prior = np.asarray(self.prior, dtype=np.float64)
        self.posterior = np.asarray(self.posterior, dtype=np.float64)
        for name, arr in (("prior", self.prior), ("posterior", self.posterior)):
            if arr.size == 0:
                raise ValueError(f"{name} distance sample is empty")
            if np.any(arr < 0.0) or np.any(arr > 1.0 + _RANGE_TOL):
                raise ValueError(f"{name} distances must lie in [0, 1]")


@dataclass(eq=False)
class QuantileGrid:
    """Equal-prior-content bin edges: 0, the i/n_bins prior quantiles, the max."""

    n_bins: int
    edges: np.ndarray

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.float64)
        if self.edges.shape != (self.n_bins + 1,):
            raise ValueError("grid needs n_bins + 1 edges")
        if self.edges[0] != 0.0:
            raise ValueError("grid must start at zero")
        if np.any(np.diff(self.edges) < 0):
            raise ValueError("grid edges must be nondecreasing")


@dataclass(eq=False)
class RbSummary:
    """Relative-belief summary of one prior/posterior distance comparison."""

    rb_zero: float
    strength: float
    bin_rb: tuple
    zero_bins: int
    n_bins: int
    r1: int
    r2: int
    edges: tuple

    def __post_init__(self):
        if not 0.0 <= self.rb_zero <= self.n_bins + _MASS_TOL:
            raise ValueError("rb_zero must lie in [0, n_bins]")
        if not 0.0 <= self.strength <= 1.0 + _MASS_TOL:
            raise ValueError("strength must lie in [0, 1]")
        if self.zero_bins == 1:
            total = (self.rb_zero + sum(self.bin_rb)) / self.n_bins
            if abs(total - 1.0) > _MASS_TOL:
                raise ValueError(f"bin masses sum to {total}, expected 1")


def quantile_grid(prior, n_bins: int) -> QuantileGrid:
    """Lower empirical quantiles of the prior sample at ranks ceil(i*r1/n_bins)."""
    if n_bins < 2:
        raise ValueError("n_bins must be at least 2")
    arr = np.asarray(prior, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("prior sample is empty")
    sorted_prior = np.sort(arr)
    r1 = arr.size
    edges = np.empty(n_bins + 1)
    edges[0] = 0.0
    idx = np.arange(1, n_bins)
    ranks = -(-idx * r1 // n_bins)  # ceil division
    edges[1:n_bins] = sorted_prior[ranks - 1]
    edges[n_bins] = sorted_prior[-1]
    return QuantileGrid(n_bins, edges)


def _posterior_cdf_at_edges(grid: QuantileGrid, posterior) -> np.ndarray:
    post = np.sort(np.asarray(posterior, dtype=np.float64))
    return np.searchsorted(post, grid.edges, side="right") / post.size


def _bin_contents(grid: QuantileGrid, cdf_at_edges: np.ndarray, zero_bins: int) -> np.ndarray:
    m = grid.n_bins
    contents = np.empty(m - zero_bins)
    contents[:-1] = np.diff(cdf_at_edges[zero_bins:m])
    contents[-1] = 1.0 - cdf_at_edges[m - 1]  # final bin extends to infinity
    return contents


def _check_zero_bins(n_bins: int, zero_bins: int):
    if not 1 <= zero_bins < n_bins:
        raise ValueError(f"zero_bins must be in [1, n_bins), got {zero_bins}")


def rb_bins(grid: QuantileGrid, posterior, zero_bins: int = 1) -> np.ndarray:
    """Per-bin ratio estimates: n_bins times each bin's posterior content.

    Bins of zero prior width (tied prior draws) get ratio 0 by convention.
    """
    _check_zero_bins(grid.n_bins, zero_bins)
    f = _posterior_cdf_at_edges(grid, posterior)
    rb = grid.n_bins * _bin_contents(grid, f, zero_bins)
    widths = np.diff(grid.edges[zero_bins:grid.n_bins])
    rb[:-1][widths == 0.0] = 0.0
    return rb


def rb_zero(grid: QuantileGrid, posterior, zero_bins: int = 1) -> float:
    """Ratio estimate at distance zero: n_bins times the posterior mass below
    the zero_bins/n_bins prior quantile."""
    _check_zero_bins(grid.n_bins, zero_bins)
    f = _posterior_cdf_at_edges(grid, posterior)
    return float(grid.n_bins * f[zero_bins])


def strength(grid: QuantileGrid, posterior, zero_bins: int, rb0: float) -> float:
    """Posterior probability of the regions whose ratio is at most rb0.

    The zero region's own mass always counts (its ratio equals rb0); bins of
    zero prior width are excluded from the comparison set.
    """
    _check_zero_bins(grid.n_bins, zero_bins)
    f = _posterior_cdf_at_edges(grid, posterior)
    contents = _bin_contents(grid, f, zero_bins)
    rb = grid.n_bins * contents
    qualifies = rb <= rb0
    widths = np.diff(grid.edges[zero_bins:grid.n_bins])
    qualifies[:-1] &= widths > 0.0
    return float(min(1.0, f[zero_bins] + contents[qualifies].sum()))


def summarize(samples: DistanceSamples, n_bins: int = 20, zero_bins: int = 1) -> RbSummary:
    """Full pipeline: grid from the prior, then ratio-at-zero, bins, strength."""
    grid = quantile_grid(samples.prior, n_bins)
    rb0 = rb_zero(grid, samples.posterior, zero_bins)
    bins = rb_bins(grid, samples.posterior, zero_bins)
    st = strength(grid, samples.posterior, zero_bins, rb0)
    return RbSummary(
        rb_zero=rb0,
        strength=st,
        bin_rb=tuple(float(v) for v in bins),
        zero_bins=zero_bins,
        n_bins=n_bins,
        r1=int(samples.prior.size),
        r2=int(samples.posterior.size),
        edges=tuple(float(v) for v in grid.edges),
    )
