"""Experiment catalog: simulation cases and the embedded chick-weights data.

The three catalogs reproduce the study designs the engine is exercised on:
a nine-case distribution battery at n=50, a prior-data-conflict study with
deliberately mismatched base measures, and a sample-size grid for the two
headline cases.
"""
from __future__ import annotations

from dataclasses import dataclass

from .distributions import (DistSpec, Exponential, LogNormal, Mixture, Normal,
                            StudentT, Uniform, parse_dist)

# Chick weights (grams) by feed supplement, ordered as published.
CHICKWTS = {
    "soybean": (158.0, 171.0, 193.0, 199.0, 230.0, 243.0, 248.0, 248.0,
                250.0, 267.0, 271.0, 316.0, 327.0, 329.0),
    "linseed": (141.0, 148.0, 169.0, 181.0, 203.0, 213.0, 229.0, 244.0,
                257.0, 260.0, 271.0, 309.0),
    "sunflower": (226.0, 295.0, 297.0, 318.0, 320.0, 322.0, 334.0, 339.0,
                  340.0, 341.0, 392.0, 423.0),
}


@dataclass(frozen=True)
class CaseSpec:
    """One simulation case: two sampling distributions and sample sizes."""

    label: str
    dist_x: DistSpec
    dist_y: DistSpec
    n1: int
    n2: int
    base_x: DistSpec | None = None  # conflict-demo overrides only
    base_y: DistSpec | None = None

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("sample sizes must be positive")


_STD_NORMAL = Normal(0.0, 1.0)
_SHIFTED = Normal(1.0, 1.0)


def table1_cases() -> list:
    """Nine two-distribution comparisons, each with n1 = n2 = 50."""
    mix = Mixture(((0.5, Normal(-2.0, 1.0)), (0.5, Normal(2.0, 1.0))))
    pairs = [
        ("normal(0,1) vs normal(0,1)", _STD_NORMAL, _STD_NORMAL),
        ("normal(0,1) vs normal(1,1)", _STD_NORMAL, _SHIFTED),
        ("normal(0,1) vs normal(0,2)", _STD_NORMAL, Normal(0.0, 2.0)),
        ("normal(0,1) vs mix(0.5*normal(-2,1)+0.5*normal(2,1))", _STD_NORMAL, mix),
        ("normal(0,1) vs t(3)", _STD_NORMAL, StudentT(3.0)),
        ("normal(0,1) vs t(0.5)", _STD_NORMAL, StudentT(0.5)),
        ("lognormal(0,1) vs lognormal(1,1)", LogNormal(0.0, 1.0), LogNormal(1.0, 1.0)),
        ("exp(1) vs exp(2)", Exponential(1.0), Exponential(2.0)),
        ("exp(1) vs exp(1)", Exponential(1.0), Exponential(1.0)),
    ]
    return [CaseSpec(label, dx, dy, 50, 50) for label, dx, dy in pairs]


def table2_cases() -> list:
    """Base-measure conflict study on an N(0,1)-vs-N(1,1) pair, n = 50."""
    u = Uniform(10.0, 20.0)
    configs = [
        ("H1=normal(0,1), H2=normal(0,1)", _STD_NORMAL, _STD_NORMAL),
        ("H1=normal(-5,1), H2=normal(5,1)", Normal(-5.0, 1.0), Normal(5.0, 1.0)),
        ("H1=unif(10,20), H2=normal(0,1)", u, _STD_NORMAL),
        ("H1=unif(10,20), H2=unif(10,20)", u, u),
    ]
    return [CaseSpec(label, _STD_NORMAL, _SHIFTED, 50, 50, base_x=hx, base_y=hy)
            for label, hx, hy in configs]


def table3_cases() -> list:
    """Sample-size grid for the equal and shifted normal cases."""
    sizes = (5, 10, 15, 20, 30, 50, 100, 200)
    cases = []
    for n in sizes:
        cases.append(CaseSpec(f"normal(0,1) vs normal(0,1), n={n}",
                              _STD_NORMAL, _STD_NORMAL, n, n))
    for n in sizes:
        cases.append(CaseSpec(f"normal(0,1) vs normal(1,1), n={n}",
                              _STD_NORMAL, _SHIFTED, n, n))
    return cases


CATALOGS = {
    "table1": table1_cases,
    "table2": table2_cases,
    "table3": table3_cases,
}

# Concentration sweeps used when the caller does not override --a.
CATALOG_A_VALUES = {
    "table1": (1.0, 10.0, 20.0),
    "table2": (1.0,),
    "table3": (1.0,),
}


def parse_case(text: str) -> CaseSpec:
    """Parse ``"<dist>|<dist>|n1|n2"`` into a CaseSpec."""
    parts = text.split("|")
    if len(parts) != 4:
        raise ValueError(f"case spec needs dist|dist|n1|n2, got {text!r}")
    dx = parse_dist(parts[0])
    dy = parse_dist(parts[1])
    try:
        n1, n2 = int(parts[2]), int(parts[3])
    except ValueError:
        raise ValueError(f"bad sample sizes in case spec {text!r}") from None
    label = f"{parts[0].strip()} vs {parts[1].strip()}, n1={n1}, n2={n2}"
    return CaseSpec(label, dx, dy, n1, n2)
