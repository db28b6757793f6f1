"""Mean descriptors and their evaluation.

A descriptor is a closed, immutable description of a mean: a classical family
with parameters (power, quasiarithmetic, Gini), a conjugation of another mean
by a generator, an opaque user callable, or the engine-backed extension of a
bivariate mean to arbitrary arity.

Evaluation is vectorized: the scalar API funnels through :func:`eval_rows`,
which operates on a (batch, arity) array. Power and Gini means switch to
log-space accumulation when exponents are large or inputs span many orders of
magnitude, so r-th powers never have to cross the double-precision range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .domain import Interval, POSITIVE, PointVector, as_floats
from .errors import ArityError, DomainError, NumericalError
from .generators import CustomGen, ExpGen, GeneratorDescriptor, PowerGen

__all__ = [
    "MeanFlags",
    "MeanDescriptor",
    "PowerMean",
    "QuasiArithmeticMean",
    "GiniMean",
    "ConjugateMean",
    "CustomMean",
    "ExtendedMean",
    "eval_mean",
    "eval_quasiarithmetic",
    "conjugate_eval",
    "eval_rows",
]


@dataclass(frozen=True)
class MeanFlags:
    """Declared structural properties of a mean.

    Flags are metadata: the engine trusts them as preconditions, and
    :func:`meanx.flags.verify_flags` spot-checks them by sampling. For the
    built-in families they are computed from the parameters; only Custom
    means carry arbitrary declarations.
    """

    symmetric: bool = True
    strict: bool = True
    monotone: bool = True
    homogeneous: bool = False


class MeanDescriptor:
    """Base class for mean descriptors. Immutable and thread-safe."""

    #: None means variadic (any arity >= 1).
    arity: int | None
    domain: Interval
    flags: MeanFlags


@dataclass(frozen=True)
class PowerMean(MeanDescriptor):
    """r-th power mean on (0, inf); r = 0 is the geometric mean."""

    r: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.r):
            raise ValueError("power mean exponent must be finite")

    arity = None

    @property
    def domain(self) -> Interval:
        return POSITIVE

    @property
    def flags(self) -> MeanFlags:
        return MeanFlags(symmetric=True, strict=True, monotone=True, homogeneous=True)


@dataclass(frozen=True)
class QuasiArithmeticMean(MeanDescriptor):
    """gen-inverse of the arithmetic mean of gen-values."""

    gen: GeneratorDescriptor

    arity = None

    @property
    def domain(self) -> Interval:
        return self.gen.domain

    @property
    def flags(self) -> MeanFlags:
        # Homogeneity holds exactly for the power-generator family.
        return MeanFlags(
            symmetric=True,
            strict=True,
            monotone=True,
            homogeneous=isinstance(self.gen, PowerGen),
        )


@dataclass(frozen=True)
class GiniMean(MeanDescriptor):
    """Ratio-of-power-sums mean on (0, inf); monotone only when r*s <= 0."""

    r: float
    s: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and math.isfinite(self.s)):
            raise ValueError("Gini parameters must be finite")

    arity = None

    @property
    def domain(self) -> Interval:
        return POSITIVE

    @property
    def flags(self) -> MeanFlags:
        return MeanFlags(
            symmetric=True,
            strict=True,
            monotone=self.r * self.s <= 0.0,
            homogeneous=True,
        )


@dataclass(frozen=True)
class ConjugateMean(MeanDescriptor):
    """gen-inverse of base applied to gen-images, defined on gen's domain."""

    base: MeanDescriptor
    gen: GeneratorDescriptor

    @property
    def arity(self) -> int | None:
        return self.base.arity

    @property
    def domain(self) -> Interval:
        return self.gen.domain

    @property
    def flags(self) -> MeanFlags:
        # A strictly monotone generator preserves monotonicity in either
        # direction (decreasing generators flip twice). Homogeneity survives
        # only under nonzero power generators.
        b = self.base.flags
        return MeanFlags(
            symmetric=b.symmetric,
            strict=b.strict,
            monotone=b.monotone,
            homogeneous=b.homogeneous
            and isinstance(self.gen, PowerGen)
            and self.gen.r != 0.0,
        )


@dataclass(frozen=True)
class CustomMean(MeanDescriptor):
    """Opaque evaluator with declared arity, domain, and flags.

    The evaluator receives the input as a tuple of floats. Declared flags are
    trusted by the engine; run verification on anything you ship.
    """

    evaluator: Callable[[tuple[float, ...]], float]
    arity: int | None = None
    domain: Interval = field(default_factory=Interval)
    flags: MeanFlags = field(default_factory=MeanFlags)


@dataclass(frozen=True)
class ExtendedMean(MeanDescriptor):
    """The bivariate restriction of ``base`` extended to arbitrary arity.

    Arity 1 returns the point, arity 2 evaluates ``base`` directly, and
    higher arities run the invariant-mean engine on the barycentric operator.
    """

    base: MeanDescriptor

    def __post_init__(self) -> None:
        if self.base.arity not in (None, 2):
            raise ArityError("extension requires a mean defined at arity 2")

    arity = None

    @property
    def domain(self) -> Interval:
        return self.base.domain

    @property
    def flags(self) -> MeanFlags:
        # Extension preserves symmetry, strictness, monotonicity, homogeneity.
        return self.base.flags


# ---------------------------------------------------------------------------
# Vectorized evaluation
# ---------------------------------------------------------------------------

# Switch power/Gini accumulation to log-space beyond these thresholds.
_LOGSPACE_EXPONENT = 30.0
_LOGSPACE_SPREAD = 1e10
_EXP_OVERFLOW = 690.0
_EXP_UNDERFLOW = -740.0


def _needs_logspace(r: float, xmin: float, xmax: float) -> bool:
    if abs(r) > _LOGSPACE_EXPONENT:
        return True
    if xmax / xmin > _LOGSPACE_SPREAD:
        return True
    if r != 0.0:
        hi = max(r * math.log(xmax), r * math.log(xmin))
        lo = min(r * math.log(xmax), r * math.log(xmin))
        if hi > _EXP_OVERFLOW or lo < _EXP_UNDERFLOW:
            return True
    return False


def _power_rows(x: np.ndarray, r: float) -> np.ndarray:
    """Row-wise power mean of a strictly positive (B, k) array."""
    if r == 0.0:
        return np.exp(np.mean(np.log(x), axis=1))
    xmin, xmax = float(x.min()), float(x.max())
    if _needs_logspace(r, xmin, xmax):
        lx = r * np.log(x)
        m = lx.max(axis=1, keepdims=True)
        lse = m[:, 0] + np.log(np.mean(np.exp(lx - m), axis=1))
        return np.exp(lse / r)
    return np.mean(x**r, axis=1) ** (1.0 / r)


def _gini_weights(lx: np.ndarray, t: float) -> np.ndarray:
    w = t * lx
    w -= w.max(axis=1, keepdims=True)
    w = np.exp(w)
    w /= w.sum(axis=1, keepdims=True)
    return w


# Below this, the divided difference of log-power-sums cancels catastrophically
# and the exact expm1/log1p form takes over.
_GINI_SMALL_DELTA = 0.25


def _gini_rows(x: np.ndarray, r: float, s: float) -> np.ndarray:
    """Row-wise Gini mean; parameters are ordered so (r, s) and (s, r) agree exactly."""
    if r < s:
        r, s = s, r
    if r == s:
        # exp-weighted-log branch; softmax weights keep large exponents finite
        lx = np.log(x)
        return np.exp(np.sum(_gini_weights(lx, r) * lx, axis=1))
    delta = r - s
    xmin, xmax = float(x.min()), float(x.max())
    lmax = max(abs(math.log(xmin)), abs(math.log(xmax)))
    if delta * lmax <= _GINI_SMALL_DELTA:
        # log of the s-weighted average of exp(delta * ln x), kept exact for
        # small delta via expm1/log1p
        lx = np.log(x)
        w = _gini_weights(lx, s)
        return np.exp(np.log1p(np.sum(w * np.expm1(delta * lx), axis=1)) / delta)
    if _needs_logspace(r, xmin, xmax) or _needs_logspace(s, xmin, xmax):
        lx = np.log(x)

        def lse(t: float) -> np.ndarray:
            lt = t * lx
            m = lt.max(axis=1, keepdims=True)
            return m[:, 0] + np.log(np.sum(np.exp(lt - m), axis=1))

        return np.exp((lse(r) - lse(s)) / delta)
    return (np.sum(x**r, axis=1) / np.sum(x**s, axis=1)) ** (1.0 / delta)


def _quasiarithmetic_rows(x: np.ndarray, gen: GeneratorDescriptor) -> np.ndarray:
    if isinstance(gen, PowerGen):
        # coincides with the power mean of the same exponent
        return _power_rows(x, gen.r)
    if isinstance(gen, ExpGen):
        a = gen.a
        ax = a * x
        m = ax.max(axis=1, keepdims=True)
        lse = m[:, 0] + np.log(np.mean(np.exp(ax - m), axis=1))
        return lse / a
    fwd = gen.forward_rows(x)
    return gen.inverse_rows(np.mean(fwd, axis=1))


def _is_arithmetic(mean: MeanDescriptor) -> bool:
    """Descriptors that evaluate to the plain arithmetic mean."""
    if isinstance(mean, PowerMean):
        return mean.r == 1.0
    if isinstance(mean, QuasiArithmeticMean):
        return isinstance(mean.gen, PowerGen) and mean.gen.r == 1.0
    if isinstance(mean, GiniMean):
        return {mean.r, mean.s} == {1.0, 0.0}
    return False


def _custom_rows(x: np.ndarray, mean: CustomMean) -> np.ndarray:
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = float(mean.evaluator(tuple(float(v) for v in x[i])))
    return out


def eval_rows(
    mean: MeanDescriptor, x: np.ndarray, *, validate: bool = True, cfg=None
) -> np.ndarray:
    """Evaluate ``mean`` on every row of a (batch, arity) array.

    With ``validate`` the rows are checked against the mean's domain and
    arity; the invariant-mean engine disables validation on its interior
    iterates, which are confined to the initial range by construction.
    Results are clamped to each row's [min, max] so the mean bounds hold
    exactly in floating point. ``cfg`` only affects Extended descriptors.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] < 1:
        raise ArityError(f"expected a (batch, arity) array, got shape {x.shape}")
    k = x.shape[1]
    if validate:
        if mean.arity is not None and mean.arity != k:
            raise ArityError(f"mean has arity {mean.arity}, got vectors of length {k}")
        _check_rows_domain(mean.domain, x)

    mn = x.min(axis=1)
    mx = x.max(axis=1)
    if k == 1:
        return x[:, 0].copy()

    # constant rows bypass generator space entirely
    const = mn == mx
    if const.all():
        return x[:, 0].copy()

    if const.any():
        out = np.empty(x.shape[0])
        out[const] = x[const, 0]
        out[~const] = _dispatch_rows(mean, x[~const], cfg)
        vals = out
    else:
        vals = _dispatch_rows(mean, x, cfg)

    if not np.all(np.isfinite(vals)):
        raise NumericalError(f"non-finite value while evaluating {mean!r}")
    np.clip(vals, mn, mx, out=vals)
    return vals


def _dispatch_rows(mean: MeanDescriptor, x: np.ndarray, cfg=None) -> np.ndarray:
    if isinstance(mean, PowerMean):
        return _power_rows(x, mean.r)
    if isinstance(mean, GiniMean):
        return _gini_rows(x, mean.r, mean.s)
    if isinstance(mean, QuasiArithmeticMean):
        return _quasiarithmetic_rows(x, mean.gen)
    if isinstance(mean, ConjugateMean):
        if _is_arithmetic(mean.base):
            # conjugates of the arithmetic mean are quasiarithmetic means on
            # the generator's own domain; no image check applies
            return _quasiarithmetic_rows(x, mean.gen)
        y = mean.gen.forward_rows(x)
        if not np.all(np.isfinite(y)):
            raise NumericalError("generator image is not finite")
        _check_rows_domain(mean.base.domain, y, context="generator image")
        inner = eval_rows(mean.base, y, validate=False, cfg=cfg)
        return mean.gen.inverse_rows(inner)
    if isinstance(mean, ExtendedMean):
        if x.shape[1] <= 2:
            return eval_rows(mean.base, x, validate=False)
        from .engine import iterative_extension_batch

        return iterative_extension_batch(mean.base, x, cfg)
    if isinstance(mean, CustomMean):
        return _custom_rows(x, mean)
    raise TypeError(f"unknown mean descriptor {type(mean).__name__}")


def _check_rows_domain(domain: Interval, x: np.ndarray, context: str = "input") -> None:
    lo_ok = x > domain.lo if (domain.requires_positive and domain.lo == 0.0) else x >= domain.lo
    ok = lo_ok & (x <= domain.hi) & np.isfinite(x)
    if not ok.all():
        bad = x[~ok].ravel()
        raise DomainError(f"{context} entry {bad[0]!r} outside {domain}")


# ---------------------------------------------------------------------------
# Scalar API
# ---------------------------------------------------------------------------


def eval_mean(
    mean: MeanDescriptor,
    x: Sequence[float] | PointVector,
    cfg=None,
) -> float:
    """Evaluate a mean descriptor at a point.

    Extended descriptors delegate arities >= 3 to the invariant-mean engine;
    ``cfg`` (an :class:`meanx.engine.IterationConfig`) tunes that path and is
    ignored by closed-form families.
    """
    vals = as_floats(x)
    if isinstance(mean, ExtendedMean) and len(vals) > 2:
        from .engine import iterative_extension_eval

        return iterative_extension_eval(mean.base, vals, cfg).value
    return float(eval_rows(mean, np.asarray(vals)[None, :])[0])


def eval_quasiarithmetic(gen: GeneratorDescriptor, x: Sequence[float] | PointVector) -> float:
    """gen-inverse of the arithmetic mean of gen-values."""
    return eval_mean(QuasiArithmeticMean(gen), x)


def conjugate_eval(
    base: MeanDescriptor,
    gen: GeneratorDescriptor,
    x: Sequence[float] | PointVector,
) -> float:
    """Evaluate the conjugated mean gen^{-1}(base(gen(x)))."""
    return eval_mean(ConjugateMean(base, gen), x)


def bivariate(mean: MeanDescriptor) -> MeanDescriptor:
    """The descriptor itself if bivariate-capable; unwraps Extended."""
    if isinstance(mean, ExtendedMean):
        return mean.base
    if mean.arity not in (None, 2):
        raise ArityError(f"mean of arity {mean.arity} has no bivariate restriction")
    return mean


# ---------------------------------------------------------------------------
# Specialized bivariate kernels for the extension engine
# ---------------------------------------------------------------------------

_LN2 = math.log(2.0)


def make_pair_fn(mean: MeanDescriptor, lo: float, hi: float):
    """A vectorized (a, b) -> mean(a, b) kernel for the hot iteration path.

    ``lo``/``hi`` bound every value the kernel will ever see (iterates stay
    inside the initial range), so the log-space branch is chosen here once
    instead of per call. Falls back to the generic row evaluator for opaque
    means.
    """
    if isinstance(mean, ExtendedMean):
        return make_pair_fn(mean.base, lo, hi)
    if isinstance(mean, PowerMean):
        return _power_pair_fn(mean.r, lo, hi)
    if isinstance(mean, QuasiArithmeticMean):
        gen = mean.gen
        if isinstance(gen, PowerGen):
            return _power_pair_fn(gen.r, lo, hi)
        if isinstance(gen, ExpGen):
            a = gen.a

            def exp_pair(u, v):
                au = a * u
                av = a * v
                m = np.maximum(au, av)
                return (m + np.log1p(np.exp(-np.abs(au - av))) - _LN2) / a

            return exp_pair
    if isinstance(mean, GiniMean):
        return _gini_pair_fn(mean.r, mean.s, lo, hi)
    if isinstance(mean, ConjugateMean):
        gen = mean.gen
        if _is_arithmetic(mean.base):
            return make_pair_fn(QuasiArithmeticMean(gen), lo, hi)
        if isinstance(gen, (PowerGen, ExpGen)):
            flo, fhi = sorted((gen.forward(lo), gen.forward(hi)))
            inner = make_pair_fn(mean.base, flo, fhi)
            return lambda u, v: gen.inverse_rows(inner(gen.forward_rows(u), gen.forward_rows(v)))

    def generic(u, v):
        return eval_rows(mean, np.stack((u, v), axis=1), validate=False)

    return generic


def _power_pair_fn(r: float, lo: float, hi: float):
    if r == 0.0:
        if 1e-150 < lo and hi < 1e150:
            return lambda u, v: np.sqrt(u * v)
        return lambda u, v: np.exp(0.5 * (np.log(u) + np.log(v)))
    if not _needs_logspace(r, lo, hi):
        inv = 1.0 / r
        return lambda u, v: (0.5 * (u**r + v**r)) ** inv

    def logspace_pair(u, v):
        lu = r * np.log(u)
        lv = r * np.log(v)
        m = np.maximum(lu, lv)
        return np.exp((m + np.log1p(np.exp(-np.abs(lu - lv))) - _LN2) / r)

    return logspace_pair


def _gini_pair_fn(r: float, s: float, lo: float, hi: float):
    if r < s:
        r, s = s, r
    if r == s:
        def weighted_pair(u, v):
            lu = np.log(u)
            lv = np.log(v)
            wu = r * lu
            wv = r * lv
            m = np.maximum(wu, wv)
            eu = np.exp(wu - m)
            ev = np.exp(wv - m)
            return np.exp((eu * lu + ev * lv) / (eu + ev))

        return weighted_pair
    delta = r - s
    lmax = max(abs(math.log(lo)), abs(math.log(hi)))
    if delta * lmax <= _GINI_SMALL_DELTA:
        def small_delta_pair(u, v):
            lu = np.log(u)
            lv = np.log(v)
            wu = s * lu
            wv = s * lv
            m = np.maximum(wu, wv)
            eu = np.exp(wu - m)
            ev = np.exp(wv - m)
            mix = (eu * np.expm1(delta * lu) + ev * np.expm1(delta * lv)) / (eu + ev)
            return np.exp(np.log1p(mix) / delta)

        return small_delta_pair
    if not (_needs_logspace(r, lo, hi) or _needs_logspace(s, lo, hi)):
        inv = 1.0 / (r - s)
        if s == 0.0:
            # denominator sums to the constant 2
            return lambda u, v: (0.5 * (u**r + v**r)) ** inv
        return lambda u, v: ((u**r + v**r) / (u**s + v**s)) ** inv

    def logspace_pair(u, v):
        lu = np.log(u)
        lv = np.log(v)

        def lse2(t):
            a1 = t * lu
            a2 = t * lv
            m = np.maximum(a1, a2)
            return m + np.log1p(np.exp(-np.abs(a1 - a2)))

        return np.exp((lse2(r) - lse2(s)) / (r - s))

    return logspace_pair
