"""Named property suites behind the CLI verify command.

Each suite runs a set of randomized checks against one descriptor and
reports, per property: sample count, worst residual, pass/fail. Residual
tolerances default to 10 * rel_tol relative to max(1, |value|).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import (
    IterationConfig,
    barycentric_apply,
    extension_conjugacy_check,
    iterative_extension_batch,
    iterative_extension_eval,
)
from .envelopes import FamilyWindow, envelope_estimate
from .errors import MeanxError
from .flags import verify_flags
from .generators import GeneratorDescriptor, PowerGen
from .means import (
    ExtendedMean,
    MeanDescriptor,
    PowerMean,
    QuasiArithmeticMean,
    bivariate,
    eval_mean,
    eval_rows,
)
from .rng import stream

__all__ = ["PropertyResult", "SuiteReport", "verify_suite", "SUITES"]

SUITES = ("flags", "extension", "conjugacy", "envelope")


@dataclass(frozen=True)
class PropertyResult:
    name: str
    samples: int
    max_residual: float
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    mean: str
    seed: int
    properties: tuple[PropertyResult, ...]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "mean": self.mean,
            "seed": self.seed,
            "passed": self.passed,
            "properties": [p.to_dict() for p in self.properties],
        }


def _positive_samples(rng: np.random.Generator, shape: tuple[int, ...], lo=0.1, hi=10.0) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=shape))


def _sample_box(mean: MeanDescriptor, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    lo, hi = mean.domain.probe_range()
    if mean.domain.requires_positive:
        return np.exp(rng.uniform(np.log(max(lo, 0.1)), np.log(min(hi, 10.0)), size=shape))
    return rng.uniform(max(lo, -10.0), min(hi, 10.0), size=shape)


def _extension_suite(
    mean: MeanDescriptor, seed: int, cfg: IterationConfig, samples: int
) -> list[PropertyResult]:
    base = bivariate(mean)
    rng = stream(seed, "suite-extension")
    tol = 10.0 * cfg.rel_tol
    results = []
    arities = (3, 4)

    sym_res = 0.0
    bound_bad = 0
    mono_res = 0.0
    hom_res = 0.0
    inv_res = 0.0
    n_checks = 0
    for arity in arities:
        x = _sample_box(base, rng, (samples, arity))
        vals = iterative_extension_batch(base, x, cfg)
        n_checks += samples

        perm = np.argsort(rng.uniform(size=(samples, arity)), axis=1)
        xp = np.take_along_axis(x, perm, axis=1)
        vp = iterative_extension_batch(base, xp, cfg)
        sym_res = max(sym_res, float(np.max(np.abs(vals - vp) / np.maximum(1.0, np.abs(vals)))))

        mn = x.min(axis=1)
        mx = x.max(axis=1)
        spread = (mx - mn) > 1e-9 * np.maximum(1.0, np.abs(mn))
        strict_ok = (vals > mn) & (vals < mx)
        bound_bad += int(np.sum(spread & ~strict_ok))

        if base.flags.monotone:
            bump = np.zeros_like(x)
            j = rng.integers(arity, size=samples)
            bump[np.arange(samples), j] = np.abs(x[np.arange(samples), j]) * 0.2 + 1e-6
            vy = iterative_extension_batch(base, x + bump, cfg)
            mono_res = max(
                mono_res, float(np.max((vals - vy) / np.maximum(1.0, np.abs(vals))))
            )

        if base.flags.homogeneous and base.domain.requires_positive:
            lam = np.exp(rng.uniform(np.log(0.2), np.log(5.0), size=(samples, 1)))
            vl = iterative_extension_batch(base, lam * x, cfg)
            hom_res = max(
                hom_res,
                float(
                    np.max(np.abs(vl - lam[:, 0] * vals) / (lam[:, 0] * np.maximum(1.0, np.abs(vals))))
                ),
            )

    # invariance of the extension under one barycentric step, arity 3
    x3 = _sample_box(base, rng, (min(samples, 50), 3))
    for row in x3:
        v1 = iterative_extension_eval(base, tuple(row), cfg).value
        stepped = barycentric_apply(base, tuple(row))
        v2 = iterative_extension_eval(base, stepped, cfg).value
        inv_res = max(inv_res, abs(v1 - v2) / max(1.0, abs(v1)))

    results.append(PropertyResult("symmetry", n_checks, sym_res, sym_res <= tol))
    results.append(
        PropertyResult(
            "strict_bounds", n_checks, float(bound_bad), bound_bad == 0,
            note="count of interiority violations",
        )
    )
    if base.flags.monotone:
        results.append(PropertyResult("monotonicity", n_checks, mono_res, mono_res <= tol))
    if base.flags.homogeneous and base.domain.requires_positive:
        results.append(PropertyResult("homogeneity", n_checks, hom_res, hom_res <= tol))
    results.append(PropertyResult("invariance", len(x3), inv_res, inv_res <= tol))
    return results


def _conjugacy_suite(
    mean: MeanDescriptor,
    gen: GeneratorDescriptor,
    seed: int,
    cfg: IterationConfig,
    samples: int,
) -> list[PropertyResult]:
    base = bivariate(mean)
    rng = stream(seed, "suite-conjugacy")
    worst = 0.0
    count = 0
    for arity in (3, 4):
        lo, hi = gen.domain.probe_range()
        if gen.domain.requires_positive:
            pts = np.exp(rng.uniform(np.log(max(lo, 0.1)), np.log(min(hi, 10.0)), size=(samples, arity)))
        else:
            pts = rng.uniform(max(lo, -3.0), min(hi, 3.0), size=(samples, arity))
        for row in pts:
            resid = extension_conjugacy_check(base, gen, tuple(row), cfg)
            scale = max(1.0, abs(eval_mean(base, (float(row[0]), float(row[1])))))
            worst = max(worst, resid / scale)
            count += 1
    tol = 10.0 * cfg.rel_tol
    return [PropertyResult("conjugacy_commutes", count, worst, worst <= tol)]


def _envelope_suite(
    mean: MeanDescriptor, seed: int, cfg: IterationConfig, samples: int
) -> list[PropertyResult]:
    rng = stream(seed, "suite-envelope")
    window = FamilyWindow()
    results = []
    sandwich_bad = 0.0
    count = 0
    for arity in (2, 3):
        pts = _positive_samples(rng, (min(samples, 16), arity))
        for row in pts:
            p = tuple(float(t) for t in row)
            v = eval_mean(mean, p, cfg)
            lo = envelope_estimate(mean, p, "local_lower", window, cfg, samples=24, seed=seed)
            hi = envelope_estimate(mean, p, "local_upper", window, cfg, samples=24, seed=seed)
            scale = max(1.0, abs(v))
            sandwich_bad = max(sandwich_bad, (lo.value - v) / scale, (v - hi.value) / scale)
            count += 1
    results.append(
        PropertyResult("envelope_sandwich", count, max(0.0, sandwich_bad), sandwich_bad <= 1e-12)
    )

    is_power_like = isinstance(mean, PowerMean) or (
        isinstance(mean, QuasiArithmeticMean) and isinstance(mean.gen, PowerGen)
    )
    if is_power_like:
        r = mean.r if isinstance(mean, PowerMean) else mean.gen.r
        tight = FamilyWindow(refine_tol=1e-12)
        worst = 0.0
        x = (1.0, 2.0, 5.0)
        v = eval_mean(mean, x)
        for kind in ("local_lower", "local_upper", "global_lower", "global_upper"):
            est = envelope_estimate(mean, x, kind, tight, cfg, samples=32, seed=seed)
            worst = max(worst, abs(est.value - v) / max(1.0, abs(v)))
        results.append(PropertyResult("quasiarithmetic_fixed_point", 4, worst, worst <= 1e-9))
    return results


def verify_suite(
    mean: MeanDescriptor,
    suite: str,
    seed: int = 0,
    cfg: IterationConfig | None = None,
    samples: int = 50,
    gen: GeneratorDescriptor | None = None,
) -> SuiteReport:
    """Run one named property suite against a descriptor."""
    cfg = cfg or IterationConfig()
    if suite not in SUITES:
        raise MeanxError(f"unknown suite {suite!r}; choose from {SUITES}")
    if suite == "flags":
        report = verify_flags(mean, samples=max(samples, 20), seed=seed)
        props = [
            PropertyResult(
                name=f"flag_{c.flag}",
                samples=c.samples,
                max_residual=0.0 if c.passed is not False else 1.0,
                passed=c.passed is not False,
                note="" if c.counterexample is None else f"counterexample: {c.counterexample}",
            )
            for c in report.checks
        ]
    elif suite == "extension":
        props = _extension_suite(mean, seed, cfg, samples)
    elif suite == "conjugacy":
        props = _conjugacy_suite(mean, gen or PowerGen(2.0), seed, cfg, max(10, samples // 2))
    else:
        props = _envelope_suite(mean, seed, cfg, samples)

    from .parser import format_descriptor

    try:
        name = format_descriptor(mean)
    except MeanxError:
        name = repr(mean)
    return SuiteReport(suite=suite, mean=name, seed=seed, properties=tuple(props))
