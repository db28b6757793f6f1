"""Invariant means of mean-type mappings and iterative extensions.

The central construction: feed each component of a vector through a mean of
selected coordinates, iterate that self-mapping, and read off the common
limit. For a strict family whose incidence graph is ergodic the limit exists,
is unique, and defines a mean of the full vector.

Specializing the index family to leave-one-out selections gives the
barycentric operator, whose invariant mean extends a k-variable mean to k+1
variables; applying that step repeatedly extends a bivariate mean to any
arity. The recursion is evaluated in batches: every iteration at one arity
needs a full solve per leave-one-out subvector at the arity below, so
subvectors are stacked into numpy arrays, deduplicated up to coordinate order
and 14 significant digits (extensions of symmetric means are symmetric), and
solved together. Rows whose gap is already within tolerance freeze
immediately, which keeps late-stage inner solves nearly free.

Convergence is judged by the relative gap of the iterate: the limit always
lies between the current minimum and maximum, so the returned midpoint is
certified to half the final gap.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .domain import PointVector, as_floats
from .errors import (
    ArityError,
    FlagError,
    NotConverged,
    NotErgodic,
    NumericalError,
    ResourceLimit,
)
from .generators import GeneratorDescriptor, PowerGen
from .graphs import IndexFamily, is_ergodic, leave_one_out_family
from .means import (
    MeanDescriptor,
    PowerMean,
    QuasiArithmeticMean,
    _check_rows_domain,
    eval_mean,
    eval_rows,
    make_pair_fn,
)

__all__ = [
    "IterationConfig",
    "ExtensionResult",
    "AveragingMapping",
    "extended_eval",
    "apply_mapping",
    "barycentric_apply",
    "invariant_mean",
    "beta_extension_eval",
    "iterative_extension_eval",
    "iterative_extension_batch",
    "extension_conjugacy_check",
    "default_call_budget",
]

#: Environment override for the bivariate-call budget.
BUDGET_ENV_VAR = "MEANX_BUDGET"


def default_call_budget() -> int:
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is not None:
        try:
            return max(1, int(raw))
        except ValueError:
            warnings.warn(f"ignoring non-integer {BUDGET_ENV_VAR}={raw!r}")
    return 100_000_000


@dataclass(frozen=True)
class IterationConfig:
    """Stopping and resource controls for the fixed-point iteration.

    ``rel_tol`` applies to the gap of the iterate relative to
    max(1, |midpoint|); ``abs_tol`` is a hard floor for near-zero values.
    ``call_budget`` caps bivariate evaluations per extended vector and
    ``max_arity`` bounds the recursion width. ``analytic_shortcut`` lets
    quasiarithmetic bases skip the iteration (their extension is the same
    mean at every arity); the engine path stays the default.
    """

    rel_tol: float = 1e-13
    abs_tol: float = 1e-300
    max_iter: int = 10000
    max_arity: int = 8
    call_budget: int = field(default_factory=default_call_budget)
    analytic_shortcut: bool = False
    trace: Callable[[int, tuple[float, ...]], None] | None = None

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.max_arity < 2:
            raise ValueError("max_arity must be at least 2")


@dataclass(frozen=True)
class ExtensionResult:
    """Converged invariant value plus iteration diagnostics."""

    value: float
    iterations: int
    final_gap: float
    converged: bool


@dataclass(frozen=True)
class AveragingMapping:
    """p means of arities d_i, each reading coordinates selected by alpha[i]."""

    means: tuple[MeanDescriptor, ...]
    family: IndexFamily

    def __post_init__(self) -> None:
        if len(self.means) != self.family.p:
            raise ArityError("need exactly one mean per component")
        for i, (m, di) in enumerate(zip(self.means, self.family.d)):
            if m.arity is not None and m.arity != di:
                raise ArityError(f"mean {i} has arity {m.arity}, family expects {di}")
        dom = self.means[0].domain
        for m in self.means[1:]:
            if m.domain != dom:
                raise ValueError("all means of a mapping must share one interval")


def extended_eval(
    mean: MeanDescriptor,
    p: int,
    alpha_i: Sequence[int],
    x: Sequence[float] | PointVector,
) -> float:
    """Evaluate ``mean`` on the coordinates of x selected by alpha_i (1-based)."""
    vals = as_floats(x)
    if len(vals) != p:
        raise ArityError(f"expected a vector of length p = {p}, got {len(vals)}")
    if mean.arity is not None and mean.arity != len(alpha_i):
        raise ArityError(f"mean has arity {mean.arity}, index vector has length {len(alpha_i)}")
    picked = []
    for j in alpha_i:
        if not 1 <= j <= p:
            raise IndexError(f"index {j} outside 1..{p}")
        picked.append(vals[j - 1])
    return eval_mean(mean, picked)


def apply_mapping(mapping: AveragingMapping, x: Sequence[float] | PointVector) -> tuple[float, ...]:
    """One step of the mean-type mapping; stays inside [min(x), max(x)]."""
    vals = as_floats(x)
    fam = mapping.family
    if len(vals) != fam.p:
        raise ArityError(f"expected length {fam.p}, got {len(vals)}")
    return tuple(
        extended_eval(mapping.means[i], fam.p, fam.alpha[i], vals) for i in range(fam.p)
    )


def barycentric_apply(
    mean: MeanDescriptor, x: Sequence[float] | PointVector
) -> tuple[float, ...]:
    """Map x to the vector of mean values on each leave-one-out subvector."""
    vals = as_floats(x)
    k = len(vals) - 1
    if k < 1:
        raise ArityError("barycentric step needs a vector of length >= 2")
    if mean.arity is not None and mean.arity != k:
        raise ArityError(f"mean has arity {mean.arity}, leave-one-out subvectors have length {k}")
    return tuple(eval_mean(mean, vals[:j] + vals[j + 1 :]) for j in range(len(vals)))


def _gap_scale(vals) -> tuple[float, float, float]:
    mn = float(min(vals))
    mx = float(max(vals))
    mid = 0.5 * (mn + mx)
    return mx - mn, mid, max(1.0, abs(mid))


def invariant_mean(
    mapping: AveragingMapping,
    x: Sequence[float] | PointVector,
    cfg: IterationConfig | None = None,
) -> ExtensionResult:
    """Iterate the mapping to its unique invariant mean at x.

    Requires every component mean to be flagged strict and the family's
    incidence graph to be ergodic; both are checked up front.
    """
    cfg = cfg or IterationConfig()
    vals = as_floats(x)
    for i, m in enumerate(mapping.means):
        if not m.flags.strict:
            raise FlagError(f"component mean {i} is not flagged strict")
    report = is_ergodic(mapping.family)
    if not report.ergodic:
        raise NotErgodic(
            f"incidence graph not ergodic (irreducible={report.irreducible}, "
            f"period={report.period}); invariant mean may not be unique",
            report=report,
        )
    mapping.means[0].domain.check(vals)

    gap, mid, scale = _gap_scale(vals)
    for it in range(cfg.max_iter + 1):
        if gap <= max(cfg.abs_tol, cfg.rel_tol * scale):
            return ExtensionResult(value=mid, iterations=it, final_gap=gap, converged=True)
        vals = apply_mapping(mapping, vals)
        if cfg.trace is not None:
            cfg.trace(it + 1, vals)
        gap, mid, scale = _gap_scale(vals)
    partial = ExtensionResult(value=mid, iterations=cfg.max_iter, final_gap=gap, converged=False)
    raise NotConverged(
        f"gap {gap:.3e} above tolerance after {cfg.max_iter} iterations",
        bracket=(min(vals), max(vals)),
        level=mapping.family.p,
        result=partial,
    )


def beta_extension_eval(
    mean: MeanDescriptor,
    x: Sequence[float] | PointVector,
    cfg: IterationConfig | None = None,
) -> ExtensionResult:
    """Extend a p-variable mean by one arity: the invariant mean of its barycentric operator."""
    vals = as_floats(x)
    p = len(vals) - 1
    if p < 1:
        raise ArityError("extension input must have length >= 2")
    if mean.arity is not None and mean.arity != p:
        raise ArityError(f"mean has arity {mean.arity}, expected {p} for input length {p + 1}")
    _require_extension_flags(mean)
    fam = leave_one_out_family(p + 1)
    mapping = AveragingMapping(means=(mean,) * (p + 1), family=fam)
    return invariant_mean(mapping, vals, cfg)


def _require_extension_flags(mean: MeanDescriptor) -> None:
    if not mean.flags.strict:
        raise FlagError("extension requires a strict mean")
    if not mean.flags.symmetric:
        warnings.warn(
            "extending a non-symmetric mean: the limit exists but may depend on "
            "coordinate order; proceeding best-effort",
            stacklevel=3,
        )


# ---------------------------------------------------------------------------
# Batched iterative extension
# ---------------------------------------------------------------------------


class _Budget:
    __slots__ = ("calls", "limit")

    def __init__(self, limit: int):
        self.calls = 0
        self.limit = limit

    def charge(self, n: int) -> None:
        self.calls += n
        if self.calls > self.limit:
            raise ResourceLimit(
                f"bivariate-call budget of {self.limit} exhausted "
                f"(set {BUDGET_ENV_VAR} or IterationConfig.call_budget to raise it)"
            )


class _Ctx:
    """Per-public-call evaluation state shared down the recursion."""

    __slots__ = ("pair", "budget", "cfg", "symmetric")

    def __init__(self, mean: MeanDescriptor, lo: float, hi: float, cfg: IterationConfig, budget: _Budget):
        self.pair = make_pair_fn(mean, lo, hi)
        self.budget = budget
        self.cfg = cfg
        self.symmetric = mean.flags.symmetric


_LOO_IDX: dict[int, np.ndarray] = {}


def _loo_indices(k: int) -> np.ndarray:
    idx = _LOO_IDX.get(k)
    if idx is None:
        base = np.arange(k)
        idx = np.stack([np.delete(base, j) for j in range(k)])
        _LOO_IDX[k] = idx
    return idx


def _dedup(rows: np.ndarray, symmetric: bool) -> tuple[np.ndarray, np.ndarray]:
    """Collapse rows equal up to order (if symmetric) and ~14 significant digits.

    Duplicates are found by hashing the rounded rows column by column; a
    collision would merge distinct rows, so the grouping is verified against
    the actual values and falls back to an exact multi-column unique.
    """
    canon = np.sort(rows, axis=1) if symmetric else rows
    mant, expo = np.frexp(canon)
    key = (np.round(mant * 2.0**47).astype(np.int64) << 12) + (expo + 2048)
    with np.errstate(over="ignore"):
        h = key[:, 0].copy()
        for j in range(1, key.shape[1]):
            h *= np.int64(0x100000001B3)
            h ^= key[:, j]
    _, first, inverse = np.unique(h, return_index=True, return_inverse=True)
    if not np.array_equal(key[first][inverse], key):
        _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.ravel()
    return canon[first], inverse


def _solve3(ctx: _Ctx, x: np.ndarray, tol: float) -> np.ndarray:
    """Arity-3 extension on column arrays: the hot leaf of the recursion.

    The three components are direct bivariate evaluations, so the loop runs
    on column views with no leave-one-out copies; extrapolation logic matches
    :func:`_ext_batch`.
    """
    cfg = ctx.cfg
    c0 = x[:, 0].copy()
    c1 = x[:, 1].copy()
    c2 = x[:, 2].copy()
    mn = np.minimum(np.minimum(c0, c1), c2)
    mx = np.maximum(np.maximum(c0, c1), c2)
    mid = 0.5 * (mn + mx)
    gap = mx - mn
    out = mid.copy()
    thresh = np.maximum(cfg.abs_tol, tol * np.maximum(1.0, np.abs(mid)))
    active = gap > thresh
    if not active.any():
        return out

    c0, c1, c2 = c0[active], c1[active], c2[active]
    alive = np.flatnonzero(active)
    prev_gap = gap[active]
    ratio_ok = np.zeros(c0.shape[0], dtype=np.int8)
    pair = ctx.pair
    gate = tol**0.6

    for it in range(1, cfg.max_iter + 1):
        ctx.budget.charge(3 * c0.shape[0])
        n0 = pair(c1, c2)
        n1 = pair(c0, c2)
        n2 = pair(c0, c1)
        probe = n0 + n1 + n2
        if not np.isfinite(probe).all():
            raise NumericalError("non-finite iterate in extension engine")

        mn = np.minimum(np.minimum(n0, n1), n2)
        mx = np.maximum(np.maximum(n0, n1), n2)
        mid = 0.5 * (mn + mx)
        gap = mx - mn
        scale = np.maximum(1.0, np.abs(mid))
        thresh = np.maximum(cfg.abs_tol, tol * scale)
        done = gap <= thresh

        ratio = gap / np.maximum(prev_gap, 1e-300)
        ratio_ok = np.where(np.abs(ratio - 0.5) <= 0.075, ratio_ok + 1, 0).astype(np.int8)
        extrap = (~done) & (ratio_ok >= 2) & (gap <= gate * scale)
        if extrap.any():
            n0[extrap] = (2.0 * n0[extrap] + c0[extrap]) / 3.0
            n1[extrap] = (2.0 * n1[extrap] + c1[extrap]) / 3.0
            n2[extrap] = (2.0 * n2[extrap] + c2[extrap]) / 3.0
            mn2 = np.minimum(np.minimum(n0[extrap], n1[extrap]), n2[extrap])
            mx2 = np.maximum(np.maximum(n0[extrap], n1[extrap]), n2[extrap])
            mid[extrap] = 0.5 * (mn2 + mx2)
            gap[extrap] = mx2 - mn2
            ratio_ok[extrap] = 0
            prev_gap = gap.copy()
            prev_gap[extrap] = math.inf
            done = gap <= thresh
        else:
            prev_gap = gap

        c0, c1, c2 = n0, n1, n2
        if done.any():
            out[alive[done]] = mid[done]
            keep = ~done
            if not keep.any():
                return out
            c0, c1, c2 = c0[keep], c1[keep], c2[keep]
            alive = alive[keep]
            gap = gap[keep]
            prev_gap = prev_gap[keep]
            ratio_ok = ratio_ok[keep]

    j = int(np.argmax(gap))
    raise NotConverged(
        f"arity-3 extension: gap {gap[j]:.3e} above tolerance after {cfg.max_iter} iterations",
        bracket=(float(min(c0[j], c1[j], c2[j])), float(max(c0[j], c1[j], c2[j]))),
        level=3,
    )


def _ext_batch(ctx: _Ctx, x: np.ndarray, tol: float) -> np.ndarray:
    """Extension values of every row of a (batch, k) array, k >= 1.

    Iterates the barycentric operator on all rows at once; each iteration
    stacks the leave-one-out subvectors of the still-active rows and solves
    them with one recursive call. Once a row's measured contraction ratio
    settles at -1/(k-1) (the exact linearization of the operator at its fixed
    point for a smooth symmetric mean) and its gap is below sqrt(tol)*scale,
    one Richardson step ((k-1)*new + old)/k cancels the first-order error;
    plain iterations then finish to the gap criterion, so the stopping
    certificate is unchanged and the extrapolation bias is O(gap^2) ~ tol.
    """
    k = x.shape[1]
    if k == 1:
        return x[:, 0].copy()
    cfg = ctx.cfg
    if k == 2:
        ctx.budget.charge(x.shape[0])
        return ctx.pair(x[:, 0], x[:, 1])
    if k == 3:
        return _solve3(ctx, x, tol)

    mn = x.min(axis=1)
    mx = x.max(axis=1)
    mid = 0.5 * (mn + mx)
    gap = mx - mn
    out = mid.copy()
    thresh = np.maximum(cfg.abs_tol, tol * np.maximum(1.0, np.abs(mid)))
    active = gap > thresh
    if not active.any():
        return out

    v = x[active]
    alive = np.flatnonzero(active)
    idx = _loo_indices(k)
    child_tol = tol
    rho = 1.0 / (k - 1)
    prev_gap = gap[active]
    ratio_ok = np.zeros(v.shape[0], dtype=np.int8)
    prev_worst = math.inf
    stagnant = 0

    for it in range(1, cfg.max_iter + 1):
        a = v.shape[0]
        flat = v[:, idx].reshape(a * k, k - 1)
        if k - 1 >= 3:
            reps, inverse = _dedup(flat, ctx.symmetric)
            sub = _ext_batch(ctx, reps, child_tol)
            w = sub[inverse].reshape(a, k)
        else:
            w = _ext_batch(ctx, flat, child_tol).reshape(a, k)
        if not np.isfinite(w).all():
            raise NumericalError("non-finite iterate in extension engine")

        mn = w.min(axis=1)
        mx = w.max(axis=1)
        mid = 0.5 * (mn + mx)
        gap = mx - mn
        scale = np.maximum(1.0, np.abs(mid))
        thresh = np.maximum(cfg.abs_tol, tol * scale)
        done = gap <= thresh

        ratio = gap / np.maximum(prev_gap, 1e-300)
        ratio_ok = np.where(np.abs(ratio - rho) <= 0.15 * rho, ratio_ok + 1, 0).astype(np.int8)
        extrap = (~done) & (ratio_ok >= 2) & (gap <= tol**0.6 * scale)
        if extrap.any():
            w[extrap] = ((k - 1) * w[extrap] + v[extrap]) / k
            mn2 = w[extrap].min(axis=1)
            mx2 = w[extrap].max(axis=1)
            mid[extrap] = 0.5 * (mn2 + mx2)
            gap[extrap] = mx2 - mn2
            ratio_ok[extrap] = 0
            prev_gap = gap.copy()
            prev_gap[extrap] = math.inf
            done = gap <= thresh
        else:
            prev_gap = gap

        v = w
        if done.any():
            out[alive[done]] = mid[done]
            keep = ~done
            v = v[keep]
            alive = alive[keep]
            if v.shape[0] == 0:
                return out
            gap = gap[keep]
            thresh = thresh[keep]
            prev_gap = prev_gap[keep]
            ratio_ok = ratio_ok[keep]
            mn, mx = mn[keep], mx[keep]

        # Inner solves return bracket midpoints accurate to half their gap;
        # if those perturbations hold the outer gap just above tolerance,
        # tighten the inner tolerance instead of spinning to max_iter.
        worst = float((gap / thresh).max())
        if worst >= 0.98 * prev_worst:
            stagnant += 1
            if stagnant >= 6 and child_tol > 1e-16:
                child_tol *= 0.25
                stagnant = 0
        else:
            stagnant = 0
        prev_worst = worst

    j = int(np.argmax(gap / thresh))
    raise NotConverged(
        f"arity-{k} extension: gap {gap[j]:.3e} above tolerance after {cfg.max_iter} iterations",
        bracket=(float(mn[j]), float(mx[j])),
        level=k,
    )


def _analytic_extension(mean: MeanDescriptor) -> MeanDescriptor | None:
    """The closed-form extension when the bivariate base is quasiarithmetic."""
    if isinstance(mean, (PowerMean, QuasiArithmeticMean)):
        return mean
    return None


def _prepare_extension(
    mean: MeanDescriptor, n: int, cfg: IterationConfig
) -> None:
    if mean.arity not in (None, 2):
        raise ArityError(f"iterative extension needs a bivariate-capable mean, got arity {mean.arity}")
    if n > cfg.max_arity:
        raise ResourceLimit(
            f"arity {n} exceeds the configured cap of {cfg.max_arity} "
            "(raise IterationConfig.max_arity to allow it)"
        )
    if n >= 3:
        _require_extension_flags(mean)
        for level in range(3, n + 1):
            if not is_ergodic(leave_one_out_family(level)).ergodic:
                raise NotErgodic(f"leave-one-out family at arity {level} is not ergodic")


def iterative_extension_eval(
    mean: MeanDescriptor,
    x: Sequence[float] | PointVector,
    cfg: IterationConfig | None = None,
) -> ExtensionResult:
    """Value of the bivariate mean ``mean`` extended to len(x) arguments.

    Length 1 returns the point and length 2 evaluates the mean directly;
    higher arities iterate the barycentric operator whose components are the
    extension one arity below.
    """
    cfg = cfg or IterationConfig()
    vals = as_floats(x)
    n = len(vals)
    _prepare_extension(mean, n, cfg)

    if n == 1:
        return ExtensionResult(value=vals[0], iterations=0, final_gap=0.0, converged=True)
    if n == 2:
        return ExtensionResult(
            value=eval_mean(mean, vals), iterations=0, final_gap=0.0, converged=True
        )
    mean.domain.check(vals)

    shortcut = _analytic_extension(mean) if cfg.analytic_shortcut else None
    if shortcut is not None:
        return ExtensionResult(
            value=eval_mean(shortcut, vals), iterations=0, final_gap=0.0, converged=True
        )

    budget = _Budget(cfg.call_budget)
    ctx = _Ctx(mean, min(vals), max(vals), cfg, budget)
    v = np.asarray(vals, dtype=float)
    idx = _loo_indices(n)
    gap, mid, scale = _gap_scale(v)
    child_tol = cfg.rel_tol
    rho = 1.0 / (n - 1)
    ratio_ok = 0
    stagnant = 0
    for it in range(cfg.max_iter + 1):
        if gap <= max(cfg.abs_tol, cfg.rel_tol * scale):
            return ExtensionResult(value=mid, iterations=it, final_gap=gap, converged=True)
        w = _ext_batch(ctx, v[idx], child_tol)
        new_gap = float(w.max() - w.min())
        step_ratio = new_gap / gap if gap > 0 else 0.0
        ratio_ok = ratio_ok + 1 if abs(step_ratio - rho) <= 0.15 * rho else 0
        if ratio_ok >= 2 and new_gap <= cfg.rel_tol**0.6 * scale:
            w = ((n - 1) * w + v) / n
            ratio_ok = 0
        v = w
        if cfg.trace is not None:
            cfg.trace(it + 1, tuple(float(t) for t in v))
        prev_gap = gap
        gap, mid, scale = _gap_scale(v)
        if gap >= 0.98 * prev_gap:
            stagnant += 1
            if stagnant >= 6 and child_tol > 1e-16:
                child_tol *= 0.25
                stagnant = 0
        else:
            stagnant = 0
    partial = ExtensionResult(value=mid, iterations=cfg.max_iter, final_gap=gap, converged=False)
    raise NotConverged(
        f"arity-{n} extension: gap {gap:.3e} above tolerance after {cfg.max_iter} iterations",
        bracket=(float(v.min()), float(v.max())),
        level=n,
        result=partial,
    )


def iterative_extension_batch(
    mean: MeanDescriptor,
    x: np.ndarray,
    cfg: IterationConfig | None = None,
) -> np.ndarray:
    """Extension values for every row of a (batch, n) array.

    Bulk variant of :func:`iterative_extension_eval` used by the property and
    acceptance suites; the call budget scales with the batch size.
    """
    cfg = cfg or IterationConfig()
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ArityError(f"expected a (batch, arity) array, got shape {x.shape}")
    n = x.shape[1]
    _prepare_extension(mean, n, cfg)
    if n <= 2:
        return eval_rows(mean, x)
    _check_rows_domain(mean.domain, x)
    shortcut = _analytic_extension(mean) if cfg.analytic_shortcut else None
    if shortcut is not None:
        return eval_rows(shortcut, x)
    budget = _Budget(cfg.call_budget * max(1, x.shape[0]))
    ctx = _Ctx(mean, float(x.min()), float(x.max()), cfg, budget)
    return _ext_batch(ctx, x, cfg.rel_tol)


def extension_conjugacy_check(
    mean: MeanDescriptor,
    gen: GeneratorDescriptor,
    x: Sequence[float] | PointVector,
    cfg: IterationConfig | None = None,
) -> float:
    """|extension-then-conjugate minus conjugate-then-extension| at x."""
    from .means import ConjugateMean

    cfg = cfg or IterationConfig()
    vals = as_floats(x)
    gen.domain.check(vals)
    phi_x = [gen.forward(v) for v in vals]
    lhs = gen.inverse(iterative_extension_eval(mean, phi_x, cfg).value)
    rhs = iterative_extension_eval(ConjugateMean(mean, gen), vals, cfg).value
    return abs(lhs - rhs)
