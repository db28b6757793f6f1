"""Quasiarithmetic envelope estimators over the power-generator family.

The lower (upper) envelope of a mean is the pointwise supremum (infimum) of
the quasiarithmetic means lying below (above) it, either per arity (local) or
across all arities at once (global). Exact envelopes over all generators are
not computable, so the search is restricted to power generators, where the
family is totally ordered in the exponent: membership below/above a mean is a
half-line in r, and its boundary can be bisected after a grid pass.

The restriction is conservative on the correct side — a restricted supremum
can only undershoot the true lower envelope and a restricted infimum can only
overshoot the upper one — and the evaluation point itself is always part of
the membership sample, so the reported estimates literally sandwich the mean
at that point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import as_floats
from .engine import IterationConfig, iterative_extension_eval
from .errors import DomainError
from .means import ExtendedMean, MeanDescriptor, PowerMean, eval_mean, eval_rows
from .rng import stream

__all__ = [
    "FamilyWindow",
    "EnvelopeEstimate",
    "OrderingReport",
    "TransferReport",
    "power_family_membership",
    "envelope_estimate",
    "envelope_ordering_check",
    "transfer_theorem_check",
]

KINDS = ("local_lower", "local_upper", "global_lower", "global_upper")

#: Tolerance slack so equality cases survive a change of evaluation path.
_MEMBER_SLACK = 4e-15


@dataclass(frozen=True)
class FamilyWindow:
    """Search window over power-generator exponents."""

    r_min: float = -20.0
    r_max: float = 20.0
    grid: int = 81
    refine_tol: float = 1e-6

    def __post_init__(self) -> None:
        if not self.r_min < self.r_max:
            raise ValueError("window requires r_min < r_max")
        if self.grid < 3:
            raise ValueError("grid must have at least 3 points")

    def grid_points(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.grid)


@dataclass(frozen=True)
class EnvelopeEstimate:
    kind: str
    value: float
    witness_r: float | None
    family_empty: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "witness_r": self.witness_r,
            "family_empty": self.family_empty,
        }


class _PowerMembership:
    """Shared sample set deciding which power exponents lie below/above a mean.

    One fixed sample per arity is reused for every exponent, which makes
    membership exactly monotone in r (power means increase pointwise in r),
    so the boundary is well defined and bisection is sound.
    """

    def __init__(
        self,
        mean: MeanDescriptor,
        arities: tuple[int, ...],
        samples: int,
        seed: int,
        cfg: IterationConfig,
        include: tuple[float, ...] | None = None,
    ):
        if not mean.domain.requires_positive:
            raise DomainError("power-family envelopes need a positive domain")
        rng = stream(seed, "envelope-membership")
        self.points: list[np.ndarray] = []
        self.mean_vals: list[np.ndarray] = []
        for arity in arities:
            x = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=(samples, arity)))
            if include is not None and len(include) == arity:
                x = np.vstack([np.asarray(include)[None, :], x])
            self.points.append(x)
            self.mean_vals.append(eval_rows(mean, x, cfg=cfg))

    def is_member(self, r: float, side: str) -> bool:
        for x, mv in zip(self.points, self.mean_vals):
            pv = eval_rows(PowerMean(r), x)
            slack = _MEMBER_SLACK * np.maximum(1.0, np.abs(mv))
            if side == "lower":
                if np.any(pv > mv + slack):
                    return False
            else:
                if np.any(pv < mv - slack):
                    return False
        return True


def power_family_membership(
    mean: MeanDescriptor,
    side: str,
    r: float,
    arities: int | tuple[int, ...],
    samples: int = 64,
    seed: int = 0,
    cfg: IterationConfig | None = None,
) -> bool:
    """Sampled check that the power mean of exponent r stays below (above) ``mean``."""
    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")
    if isinstance(arities, int):
        arities = (arities,)
    membership = _PowerMembership(mean, tuple(arities), samples, seed, cfg or IterationConfig())
    return membership.is_member(r, side)


def _boundary(membership: _PowerMembership, side: str, window: FamilyWindow) -> tuple[float | None, bool]:
    """(witness exponent, family_empty) for the given side.

    Lower members form a down-set in r and upper members an up-set, so the
    grid pass brackets the boundary and bisection refines it; a window
    endpoint that is itself a member is reported clamped.
    """
    grid = window.grid_points()
    flags = [membership.is_member(float(r), side) for r in grid]
    if side == "lower":
        if not flags[0]:
            return None, True
        if flags[-1]:
            return float(grid[-1]), False
        hi_idx = next(i for i, f in enumerate(flags) if not f)
        lo, hi = float(grid[hi_idx - 1]), float(grid[hi_idx])
        while hi - lo > window.refine_tol:
            mid = 0.5 * (lo + hi)
            if membership.is_member(mid, side):
                lo = mid
            else:
                hi = mid
        return lo, False
    if not flags[-1]:
        return None, True
    if flags[0]:
        return float(grid[0]), False
    lo_idx = next(i for i in range(len(flags) - 1, -1, -1) if not flags[i])
    lo, hi = float(grid[lo_idx]), float(grid[lo_idx + 1])
    while hi - lo > window.refine_tol:
        mid = 0.5 * (lo + hi)
        if membership.is_member(mid, side):
            hi = mid
        else:
            lo = mid
    return hi, False


def envelope_estimate(
    mean: MeanDescriptor,
    x,
    kind: str,
    window: FamilyWindow | None = None,
    cfg: IterationConfig | None = None,
    samples: int = 64,
    seed: int = 0,
    p_max: int = 4,
) -> EnvelopeEstimate:
    """Estimate an envelope of ``mean`` at x within the power family.

    Local kinds sample membership at the arity of x only; global kinds at
    every arity from 2 to p_max. x itself is always in the sample, so lower
    estimates never exceed mean(x) and upper estimates never fall below it.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    window = window or FamilyWindow()
    cfg = cfg or IterationConfig()
    vals = as_floats(x)
    side = "lower" if kind.endswith("lower") else "upper"
    if kind.startswith("local"):
        arities: tuple[int, ...] = (len(vals),)
    else:
        arities = tuple(range(2, p_max + 1))
        if len(vals) not in arities:
            arities = arities + (len(vals),)
    membership = _PowerMembership(mean, arities, samples, seed, cfg, include=vals)
    witness, empty = _boundary(membership, side, window)
    if empty:
        fallback = min(vals) if side == "lower" else max(vals)
        return EnvelopeEstimate(kind=kind, value=fallback, witness_r=None, family_empty=True)
    value = eval_mean(PowerMean(witness), vals)
    return EnvelopeEstimate(kind=kind, value=value, witness_r=witness, family_empty=False)


@dataclass(frozen=True)
class OrderingReport:
    """The five-way chain global_lower <= local_lower <= mean <= local_upper <= global_upper."""

    global_lower: float
    local_lower: float
    mean_value: float
    local_upper: float
    global_upper: float
    max_violation: float
    ok: bool

    def to_dict(self) -> dict:
        return {
            "global_lower": self.global_lower,
            "local_lower": self.local_lower,
            "mean_value": self.mean_value,
            "local_upper": self.local_upper,
            "global_upper": self.global_upper,
            "max_violation": self.max_violation,
            "ok": self.ok,
        }


def envelope_ordering_check(
    mean: MeanDescriptor,
    x,
    window: FamilyWindow | None = None,
    cfg: IterationConfig | None = None,
    samples: int = 64,
    seed: int = 0,
    p_max: int = 4,
) -> OrderingReport:
    """Check the local/global envelope chain around the extension of ``mean`` at x."""
    cfg = cfg or IterationConfig()
    vals = as_floats(x)
    ext = mean if isinstance(mean, ExtendedMean) else ExtendedMean(mean)
    center = eval_mean(ext, vals, cfg)
    estimates = {
        kind: envelope_estimate(ext, vals, kind, window, cfg, samples, seed, p_max).value
        for kind in KINDS
    }
    chain = (
        estimates["global_lower"],
        estimates["local_lower"],
        center,
        estimates["local_upper"],
        estimates["global_upper"],
    )
    slack = 10.0 * cfg.rel_tol * max(1.0, abs(center))
    max_violation = max(
        (chain[i] - chain[i + 1] for i in range(len(chain) - 1)), default=0.0
    )
    return OrderingReport(
        global_lower=chain[0],
        local_lower=chain[1],
        mean_value=chain[2],
        local_upper=chain[3],
        global_upper=chain[4],
        max_violation=max(0.0, max_violation),
        ok=max_violation <= slack,
    )


@dataclass(frozen=True)
class TransferReport:
    """How extending a bivariate mean transfers to its envelopes.

    ``membership_mismatches`` lists exponents where global membership for the
    extension disagreed with bivariate membership for the base; entries within
    one grid step of the empirical boundary are marked boundary (sampling
    noise, not asserted). ``arity2_residual_*`` compare the global envelope of
    the extension, restricted to pairs, against the local envelope of the
    base. ``chain_max_violation`` is the worst violation of
    global_lower <= extended(local_lower) <= extension over the sampled points.
    """

    membership_mismatches: tuple[dict, ...]
    arity2_residual_lower: float
    arity2_residual_upper: float
    chain_max_violation: float
    samples: int
    ok: bool

    def to_dict(self) -> dict:
        return {
            "membership_mismatches": list(self.membership_mismatches),
            "arity2_residual_lower": self.arity2_residual_lower,
            "arity2_residual_upper": self.arity2_residual_upper,
            "chain_max_violation": self.chain_max_violation,
            "samples": self.samples,
            "ok": self.ok,
        }


def transfer_theorem_check(
    mean: MeanDescriptor,
    window: FamilyWindow | None = None,
    samples: int = 32,
    seed: int = 0,
    cfg: IterationConfig | None = None,
    p_max: int = 4,
    value_tol: float = 1e-5,
) -> TransferReport:
    """Probe the envelope-transfer identities for a bivariate mean.

    Checks, within the power family: (a) an exponent is a global member for
    the extension exactly when it is a bivariate member for the base; (b) the
    global envelopes of the extension agree with the local envelopes of the
    base on pairs; (c) the chain global_lower <= extension of the local lower
    envelope <= the extension itself, at sampled points.
    """
    window = window or FamilyWindow()
    cfg = cfg or IterationConfig()
    ext = mean if isinstance(mean, ExtendedMean) else ExtendedMean(mean)
    base = ext.base
    arities = tuple(range(2, p_max + 1))
    local2 = _PowerMembership(base, (2,), samples, seed, cfg)
    global_ext = _PowerMembership(ext, arities, samples, seed, cfg)

    grid = window.grid_points()
    step = float(grid[1] - grid[0])
    mismatches: list[dict] = []
    for side in ("lower", "upper"):
        flags_local = [local2.is_member(float(r), side) for r in grid]
        flags_global = [global_ext.is_member(float(r), side) for r in grid]
        boundary_idx = _boundary_index(flags_local, side)
        for i, r in enumerate(grid):
            if flags_local[i] != flags_global[i]:
                near = boundary_idx is not None and abs(i - boundary_idx) <= 1
                mismatches.append({"r": float(r), "side": side, "boundary": near})

    # global envelopes of the extension restricted to pairs vs local envelopes of the base
    rng = stream(seed, "envelope-transfer")
    pairs = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=(8, 2)))
    res_lower = 0.0
    res_upper = 0.0
    for row in pairs:
        p = tuple(float(t) for t in row)
        for side in ("lower", "upper"):
            eg = envelope_estimate(ext, p, f"global_{side}", window, cfg, samples, seed, p_max)
            el = envelope_estimate(base, p, f"local_{side}", window, cfg, samples, seed, p_max)
            resid = abs(eg.value - el.value) / max(1.0, abs(el.value))
            if side == "lower":
                res_lower = max(res_lower, resid)
            else:
                res_upper = max(res_upper, resid)

    # chain at sampled points of each arity; the extension of the base's local
    # lower envelope is the power mean at the bivariate boundary exponent
    chain_violation = 0.0
    r_lower_base, base_empty = _boundary(local2, "lower", window)
    for arity in arities:
        pts = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=(4, arity)))
        for row in pts:
            p = tuple(float(t) for t in row)
            glob = envelope_estimate(ext, p, "global_lower", window, cfg, samples, seed, p_max)
            ext_val = eval_mean(ext, p, cfg)
            if base_empty or glob.family_empty:
                mid_val = min(p)
            else:
                mid_val = iterative_extension_eval(PowerMean(r_lower_base), p, cfg).value
            scale = max(1.0, abs(ext_val))
            chain_violation = max(
                chain_violation,
                (glob.value - mid_val) / scale,
                (mid_val - ext_val) / scale,
            )

    hard_mismatch = any(not m["boundary"] for m in mismatches)
    ok = (
        not hard_mismatch
        and res_lower <= value_tol
        and res_upper <= value_tol
        and chain_violation <= 10.0 * cfg.rel_tol + window.refine_tol
    )
    return TransferReport(
        membership_mismatches=tuple(mismatches),
        arity2_residual_lower=res_lower,
        arity2_residual_upper=res_upper,
        chain_max_violation=chain_violation,
        samples=samples,
        ok=ok,
    )


def _boundary_index(flags: list[bool], side: str) -> int | None:
    if side == "lower":
        for i, f in enumerate(flags):
            if not f:
                return i - 1 if i > 0 else None
        return len(flags) - 1
    for i in range(len(flags) - 1, -1, -1):
        if not flags[i]:
            return i + 1 if i + 1 < len(flags) else None
    return 0