"""Comparability regions for Gini means and a sampled ordering check.

Two classical regions decide when one Gini mean dominates another: the
all-arity region requires min/max ordering of the parameter pairs, while the
bivariate region is cut out by the parameter sum together with the auxiliary
functions m and mu. For monotone parameter pairs (r*s <= 0) the bivariate
region also characterizes the ordering of the iterative extensions, which
:func:`corollary_check` probes numerically: sampled ordering inside the
region, counterexample search outside it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .engine import IterationConfig, iterative_extension_batch
from .means import GiniMean, eval_rows
from .rng import stream

__all__ = [
    "GiniParams",
    "MonGFlags",
    "RegionReport",
    "VerdictReport",
    "m_func",
    "mu_func",
    "in_delta_inf",
    "in_delta_2",
    "in_mon_g",
    "region_report",
    "corollary_check",
]

#: Comparisons closer to a region boundary than this are flagged, not trusted.
BOUNDARY_TOL = 1e-12

#: Counterexample search: log-spaced grid points per coordinate plus random draws.
SEARCH_GRID = 64
SEARCH_RANDOM = 1000


@dataclass(frozen=True)
class GiniParams:
    r: float
    s: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and math.isfinite(self.s)):
            raise ValueError("Gini parameters must be finite")

    def swapped(self) -> "GiniParams":
        return GiniParams(self.s, self.r)


def m_func(p: float, q: float) -> float:
    """min for nonnegative pairs, max for nonpositive, 0 across signs."""
    if p >= 0 and q >= 0:
        return min(p, q)
    if p * q < 0:
        return 0.0
    return max(p, q)


def mu_func(p: float, q: float) -> float:
    """(|p| - |q|)/(p - q), extended by sign(p) on the diagonal (sign(0) = 0)."""
    if p != q:
        return (abs(p) - abs(q)) / (p - q)
    if p > 0:
        return 1.0
    if p < 0:
        return -1.0
    return 0.0


def in_delta_inf(a: GiniParams, b: GiniParams) -> bool:
    """Comparability at every arity: min and max both ordered."""
    return min(a.r, a.s) <= min(b.r, b.s) and max(a.r, a.s) <= max(b.r, b.s)


def in_delta_2(a: GiniParams, b: GiniParams) -> bool:
    """Bivariate comparability: sum, m, and mu all ordered."""
    return (
        a.r + a.s <= b.r + b.s
        and m_func(a.r, a.s) <= m_func(b.r, b.s)
        and mu_func(a.r, a.s) <= mu_func(b.r, b.s)
    )


def in_mon_g(p: GiniParams) -> bool:
    """Monotone Gini parameters: r*s <= 0."""
    return p.r * p.s <= 0.0


@dataclass(frozen=True)
class MonGFlags:
    first: bool
    second: bool


@dataclass(frozen=True)
class RegionReport:
    in_delta_inf: bool
    in_delta_2: bool
    in_mon_g: MonGFlags
    m_values: tuple[float, float]
    mu_values: tuple[float, float]
    boundary: bool

    def to_dict(self) -> dict:
        return {
            "in_delta_inf": self.in_delta_inf,
            "in_delta_2": self.in_delta_2,
            "in_mon_g": {"first": self.in_mon_g.first, "second": self.in_mon_g.second},
            "m_values": list(self.m_values),
            "mu_values": list(self.mu_values),
            "boundary": self.boundary,
        }


def region_report(a: GiniParams, b: GiniParams) -> RegionReport:
    comparisons = (
        min(b.r, b.s) - min(a.r, a.s),
        max(b.r, b.s) - max(a.r, a.s),
        (b.r + b.s) - (a.r + a.s),
        m_func(b.r, b.s) - m_func(a.r, a.s),
        mu_func(b.r, b.s) - mu_func(a.r, a.s),
    )
    return RegionReport(
        in_delta_inf=in_delta_inf(a, b),
        in_delta_2=in_delta_2(a, b),
        in_mon_g=MonGFlags(first=in_mon_g(a), second=in_mon_g(b)),
        m_values=(m_func(a.r, a.s), m_func(b.r, b.s)),
        mu_values=(mu_func(a.r, a.s), mu_func(b.r, b.s)),
        boundary=any(0.0 < abs(c) <= BOUNDARY_TOL for c in comparisons),
    )


@dataclass(frozen=True)
class VerdictReport:
    """Outcome of the sampled extension-ordering check.

    verdict is one of:
      * ``ordered`` — the pair lies in the bivariate region and every sampled
        extension comparison held;
      * ``ordering_violated`` — the pair lies in the region but a sampled
        comparison failed (this contradicts the expected behaviour);
      * ``counterexample_found`` — outside the region, a strict violation was
        located (the expected outcome);
      * ``inconclusive`` — outside the region, no violation surfaced within
        the search budget.
    """

    verdict: str
    region: RegionReport
    checked: int
    witness: dict | None

    @property
    def passed(self) -> bool:
        return self.verdict != "ordering_violated"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "region": self.region.to_dict(),
            "checked": self.checked,
            "witness": self.witness,
        }


def _extension_values(params: GiniParams, x: np.ndarray, cfg: IterationConfig) -> np.ndarray:
    mean = GiniMean(params.r, params.s)
    if x.shape[1] <= 2:
        return eval_rows(mean, x)
    return iterative_extension_batch(mean, x, cfg)


def corollary_check(
    a: GiniParams,
    b: GiniParams,
    trials: int = 50,
    seed: int = 0,
    cfg: IterationConfig | None = None,
    arities: tuple[int, ...] = (2, 3, 4),
) -> VerdictReport:
    """Probe whether the extension of Gini(a) stays below the extension of Gini(b).

    Inside the bivariate region every sampled comparison must hold (up to
    10*rel_tol*scale); outside it, a strict violation is searched on a
    log-spaced bivariate grid plus random points, then on arity-3 samples.
    The bivariate slice suffices in principle: extensions at arity 2 are the
    Gini means themselves, and homogeneity reduces pairs to (1, y).
    """
    cfg = cfg or IterationConfig()
    region = region_report(a, b)
    if not (in_mon_g(a) and in_mon_g(b)):
        warnings.warn(
            "corollary_check outside the monotone parameter region is exploratory; "
            "the ordering characterization is only established for r*s <= 0",
            stacklevel=2,
        )
    rng = stream(seed, "gini-corollary")
    slack = 10.0 * cfg.rel_tol

    if region.in_delta_2:
        checked = 0
        for arity in arities:
            x = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=(trials, arity)))
            va = _extension_values(a, x, cfg)
            vb = _extension_values(b, x, cfg)
            bad = va > vb + slack * np.maximum(1.0, np.abs(vb))
            checked += trials
            if bad.any():
                j = int(np.argmax(va - vb))
                return VerdictReport(
                    verdict="ordering_violated",
                    region=region,
                    checked=checked,
                    witness={"x": x[j].tolist(), "values": [float(va[j]), float(vb[j])]},
                )
        return VerdictReport(verdict="ordered", region=region, checked=checked, witness=None)

    # outside the region: hunt for a strict violation, bivariate first
    ys = np.concatenate(
        [
            np.geomspace(1e-6, 1e6, SEARCH_GRID),
            np.exp(rng.uniform(np.log(1e-8), np.log(1e8), size=SEARCH_RANDOM)),
        ]
    )
    pairs = np.column_stack([np.ones_like(ys), ys])
    va = eval_rows(GiniMean(a.r, a.s), pairs)
    vb = eval_rows(GiniMean(b.r, b.s), pairs)
    margin = 1e-9 * np.maximum(1.0, np.abs(vb))
    viol = va > vb + margin
    checked = len(ys)
    if viol.any():
        j = int(np.argmax((va - vb) / np.maximum(1.0, np.abs(vb))))
        return VerdictReport(
            verdict="counterexample_found",
            region=region,
            checked=checked,
            witness={"x": [1.0, float(ys[j])], "values": [float(va[j]), float(vb[j])]},
        )

    # arity-3 fallback through the engine
    x3 = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=(128, 3)))
    x3[:, 0] = 1.0
    va = _extension_values(a, x3, cfg)
    vb = _extension_values(b, x3, cfg)
    margin = 1e-9 * np.maximum(1.0, np.abs(vb))
    checked += len(x3)
    viol = va > vb + margin
    if viol.any():
        j = int(np.argmax((va - vb) / np.maximum(1.0, np.abs(vb))))
        return VerdictReport(
            verdict="counterexample_found",
            region=region,
            checked=checked,
            witness={"x": x3[j].tolist(), "values": [float(va[j]), float(vb[j])]},
        )
    return VerdictReport(verdict="inconclusive", region=region, checked=checked, witness=None)
