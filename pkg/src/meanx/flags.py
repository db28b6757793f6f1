"""Randomized verification of declared mean flags.

Flags are declarations, not proofs; this module probes each declared flag
with seeded random inputs and reports the first counterexample found. It is
report-only: refuting a flag never raises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .means import MeanDescriptor, eval_mean
from .rng import stream

__all__ = ["FlagCheck", "FlagReport", "verify_flags"]

_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class FlagCheck:
    flag: str
    declared: bool
    samples: int
    passed: bool | None  # None when the flag is not declared
    counterexample: dict | None


@dataclass(frozen=True)
class FlagReport:
    mean: str
    seed: int
    samples: int
    checks: tuple[FlagCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "seed": self.seed,
            "samples": self.samples,
            "ok": self.ok,
            "checks": [
                {
                    "flag": c.flag,
                    "declared": c.declared,
                    "samples": c.samples,
                    "passed": c.passed,
                    "counterexample": c.counterexample,
                }
                for c in self.checks
            ],
        }


def _sample_vector(mean: MeanDescriptor, rng: np.random.Generator, arity: int) -> list[float]:
    lo, hi = mean.domain.probe_range()
    if mean.domain.requires_positive:
        return list(np.exp(rng.uniform(np.log(lo), np.log(hi), size=arity)))
    return list(rng.uniform(lo, hi, size=arity))


def _arities(mean: MeanDescriptor, i: int) -> int:
    if mean.arity is not None:
        return mean.arity
    return 2 + i % 4


def verify_flags(mean: MeanDescriptor, samples: int = 100, seed: int = 0) -> FlagReport:
    """Spot-check each declared flag on `samples` random inputs.

    Symmetry and homogeneity are checked as residual identities to 1e-12
    relative; strictness demands strictly interior values on non-constant
    vectors; monotonicity bumps one random coordinate upward and requires
    the mean not to decrease beyond the residual tolerance.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = stream(seed, "verify-flags")
    flags = mean.flags
    checks: list[FlagCheck] = []

    def run(flag: str, declared: bool, probe) -> None:
        if not declared:
            checks.append(FlagCheck(flag, False, 0, None, None))
            return
        for i in range(samples):
            cex = probe(i)
            if cex is not None:
                checks.append(FlagCheck(flag, True, i + 1, False, cex))
                return
        checks.append(FlagCheck(flag, True, samples, True, None))

    def probe_symmetric(i: int):
        x = _sample_vector(mean, rng, _arities(mean, i))
        perm = rng.permutation(len(x))
        vx = eval_mean(mean, x)
        vp = eval_mean(mean, [x[j] for j in perm])
        if abs(vx - vp) > _RESIDUAL_TOL * max(1.0, abs(vx)):
            return {"x": x, "permutation": perm.tolist(), "values": [vx, vp]}
        return None

    def probe_strict(i: int):
        x = _sample_vector(mean, rng, max(2, _arities(mean, i)))
        if max(x) - min(x) < 1e-2 * max(1.0, abs(x[0])):
            x[0] *= 2.0  # guarantee a visibly non-constant vector
        v = eval_mean(mean, x)
        if not (min(x) < v < max(x)):
            return {"x": x, "value": v, "min": min(x), "max": max(x)}
        return None

    def probe_monotone(i: int):
        x = _sample_vector(mean, rng, _arities(mean, i))
        j = int(rng.integers(len(x)))
        y = list(x)
        bump = abs(y[j]) * rng.uniform(0.01, 0.3) + 1e-6
        y[j] = y[j] + bump
        if not mean.domain.contains(y[j]):
            return None
        vx = eval_mean(mean, x)
        vy = eval_mean(mean, y)
        if vy < vx - _RESIDUAL_TOL * max(1.0, abs(vx)):
            return {"x": x, "y": y, "coordinate": j, "values": [vx, vy]}
        return None

    def probe_homogeneous(i: int):
        if not mean.domain.requires_positive:
            return None  # positive scaling only meaningful on (0, inf)
        x = _sample_vector(mean, rng, _arities(mean, i))
        lam = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
        vx = eval_mean(mean, x)
        vl = eval_mean(mean, [lam * t for t in x])
        if abs(vl - lam * vx) > _RESIDUAL_TOL * lam * max(1.0, abs(vx)):
            return {"x": x, "lambda": lam, "values": [vl, lam * vx]}
        return None

    run("symmetric", flags.symmetric, probe_symmetric)
    run("strict", flags.strict, probe_strict)
    run("monotone", flags.monotone, probe_monotone)
    run("homogeneous", flags.homogeneous, probe_homogeneous)

    return FlagReport(mean=repr(mean), seed=seed, samples=samples, checks=tuple(checks))
