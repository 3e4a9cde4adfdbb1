"""Sampling distributions: closed specs with samplers, CDFs, and a text form.

Each spec is a frozen dataclass validated at construction.  Samplers draw
from an explicit numpy Generator so that every caller owns its stream;
``sample_n`` is the vectorized path and ``sample`` the single-draw
convenience.  The canonical text form (``normal(0,1)``, ``exp(1)``,
``t(0.5)``, ``unif(10,20)``, ``lognormal(0,1)``,
``mix(0.5*normal(-2,1)+0.5*normal(2,1))``) is what config files and the
case catalog use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, stdtr

from .gammainc import gamma_cocdf_inverse, log_gamma_fn, reg_gamma_upper, reg_gamma_upper_log

__all__ = [
    "DistSpec", "Normal", "Exponential", "StudentT", "Uniform", "LogNormal",
    "Mixture", "parse_dist", "format_dist", "DistParseError",
    "gamma_cocdf_inverse", "log_gamma_fn", "reg_gamma_upper", "reg_gamma_upper_log",
]

_WEIGHT_TOL = 1e-12


class DistParseError(ValueError):
    """Raised when a distribution text form cannot be parsed."""


def _maybe_float(x, arr):
    return float(arr) if np.asarray(x).ndim == 0 else arr


@dataclass(frozen=True)
class DistSpec:
    """Base class for closed distribution descriptions."""

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.sample_n(rng, 1)[0])

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class Normal(DistSpec):
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError(f"normal sd must be positive, got {self.sd}")

    def sample_n(self, rng, n):
        return rng.normal(self.mean, self.sd, n)

    def cdf(self, x):
        arr = ndtr((np.asarray(x, dtype=np.float64) - self.mean) / self.sd)
        return _maybe_float(x, arr)


@dataclass(frozen=True)
class Exponential(DistSpec):
    """Exponential with the given mean (scale parameterization)."""

    mean: float

    def __post_init__(self):
        if not self.mean > 0:
            raise ValueError(f"exponential mean must be positive, got {self.mean}")

    def sample_n(self, rng, n):
        return rng.exponential(self.mean, n)

    def cdf(self, x):
        arr = np.asarray(x, dtype=np.float64)
        out = np.where(arr <= 0.0, 0.0, -np.expm1(-np.maximum(arr, 0.0) / self.mean))
        return _maybe_float(x, out)


@dataclass(frozen=True)
class StudentT(DistSpec):
    """Student-t with real-valued df; sampled as normal / sqrt(chi2(df)/df)."""

    df: float

    def __post_init__(self):
        if not self.df > 0:
            raise ValueError(f"t df must be positive, got {self.df}")

    def sample_n(self, rng, n):
        z = rng.standard_normal(n)
        chi2 = rng.gamma(self.df / 2.0, 2.0, n)
        return z / np.sqrt(chi2 / self.df)

    def cdf(self, x):
        arr = stdtr(self.df, np.asarray(x, dtype=np.float64))
        return _maybe_float(x, arr)


@dataclass(frozen=True)
class Uniform(DistSpec):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"uniform needs lo < hi, got [{self.lo}, {self.hi}]")

    def sample_n(self, rng, n):
        return rng.uniform(self.lo, self.hi, n)

    def cdf(self, x):
        arr = np.asarray(x, dtype=np.float64)
        out = np.clip((arr - self.lo) / (self.hi - self.lo), 0.0, 1.0)
        return _maybe_float(x, out)


@dataclass(frozen=True)
class LogNormal(DistSpec):
    """exp(N(mu, sigma)); mu and sigma are on the log scale."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"lognormal sigma must be positive, got {self.sigma}")

    def sample_n(self, rng, n):
        return rng.lognormal(self.mu, self.sigma, n)

    def cdf(self, x):
        arr = np.asarray(x, dtype=np.float64)
        with np.errstate(divide="ignore"):
            out = np.where(arr <= 0.0, 0.0,
                           ndtr((np.log(np.maximum(arr, 1e-300)) - self.mu) / self.sigma))
        return _maybe_float(x, out)


@dataclass(frozen=True)
class Mixture(DistSpec):
    """Finite mixture of (weight, spec) components; weights sum to one."""

    components: tuple

    def __post_init__(self):
        if not self.components:
            raise ValueError("mixture needs at least one component")
        for w, spec in self.components:
            if not w > 0:
                raise ValueError(f"mixture weight must be positive, got {w}")
            if not isinstance(spec, DistSpec):
                raise ValueError("mixture component is not a DistSpec")
        total = math.fsum(w for w, _ in self.components)
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"mixture weights sum to {total}, expected 1")

    def sample_n(self, rng, n):
        weights = np.array([w for w, _ in self.components])
        cumw = np.cumsum(weights)
        cumw[-1] = 1.0
        idx = np.searchsorted(cumw, rng.random(n), side="right")
        out = np.empty(n)
        for i, (_, spec) in enumerate(self.components):
            mask = idx == i
            count = int(mask.sum())
            if count:
                out[mask] = spec.sample_n(rng, count)
        return out

    def cdf(self, x):
        arr = np.asarray(x, dtype=np.float64)
        out = np.zeros(arr.shape)
        for w, spec in self.components:
            out = out + w * np.asarray(spec.cdf(arr))
        return _maybe_float(x, out)


# --- canonical text form -------------------------------------------------

def format_dist(spec: DistSpec) -> str:
    """Canonical text for a spec, e.g. ``mix(0.5*normal(-2,1)+0.5*normal(2,1))``."""
    if isinstance(spec, Normal):
        return f"normal({spec.mean:g},{spec.sd:g})"
    if isinstance(spec, Exponential):
        return f"exp({spec.mean:g})"
    if isinstance(spec, StudentT):
        return f"t({spec.df:g})"
    if isinstance(spec, Uniform):
        return f"unif({spec.lo:g},{spec.hi:g})"
    if isinstance(spec, LogNormal):
        return f"lognormal({spec.mu:g},{spec.sigma:g})"
    if isinstance(spec, Mixture):
        body = "+".join(f"{w:g}*{format_dist(s)}" for w, s in spec.components)
        return f"mix({body})"
    raise TypeError(f"unknown spec type {type(spec)!r}")


def _split_top_level(body: str, sep: str) -> list:
    parts = []
    depth = 0
    cur = []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise DistParseError(f"unbalanced parentheses in {body!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_dist(text: str) -> DistSpec:
    """Parse the canonical text form into a DistSpec."""
    s = text.strip().lower().replace(" ", "")
    if not s:
        raise DistParseError("empty distribution spec")
    if not s.endswith(")") or "(" not in s:
        raise DistParseError(f"cannot parse distribution spec {text!r}")
    name, body = s.split("(", 1)
    body = body[:-1]

    def _num(tok: str) -> float:
        try:
            return float(tok)
        except ValueError:
            raise DistParseError(f"bad number {tok!r} in {text!r}") from None

    if name == "mix":
        comps = []
        for part in _split_top_level(body, "+"):
            if "*" not in part:
                raise DistParseError(f"mixture component {part!r} needs weight*spec")
            wtok, stok = part.split("*", 1)
            comps.append((_num(wtok), parse_dist(stok)))
        try:
            return Mixture(tuple(comps))
        except ValueError as exc:
            raise DistParseError(str(exc)) from None

    args = [_num(tok) for tok in _split_top_level(body, ",")] if body else []
    makers = {
        "normal": (2, lambda a: Normal(a[0], a[1])),
        "exp": (1, lambda a: Exponential(a[0])),
        "t": (1, lambda a: StudentT(a[0])),
        "unif": (2, lambda a: Uniform(a[0], a[1])),
        "lognormal": (2, lambda a: LogNormal(a[0], a[1])),
    }
    if name not in makers:
        raise DistParseError(f"unknown distribution {name!r} in {text!r}")
    arity, make = makers[name]
    if len(args) != arity:
        raise DistParseError(f"{name} takes {arity} arguments, got {len(args)}")
    try:
        return make(args)
    except ValueError as exc:
        raise DistParseError(str(exc)) from None
