"""Batch command-line front end with machine-readable output.

Subcommands::

    extend        evaluate the iterative extension of a bivariate mean
    check-ergodic decide ergodicity of an index family given as JSON
    verify        run a named property suite against a descriptor
    gini-region   region membership + sampled ordering check for two Gini means
    gini-sweep    CSV grid of region membership against a fixed first pair
    envelope      envelope estimate of a mean at a point

Results go to stdout as canonical JSON (17 significant digits, sorted keys);
diagnostics and traces go to stderr. Exit codes: 0 success, 1 a verification
or ordering assertion failed, 2 usage error, 3 non-convergence or resource
limit.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import jsonio
from .engine import (
    IterationConfig,
    ExtensionResult,
    iterative_extension_eval,
)
from .envelopes import KINDS, FamilyWindow, envelope_estimate
from .errors import (
    MeanxError,
    NotConverged,
    NotErgodic,
    ParseError,
    ResourceLimit,
)
from .gini import GiniParams, corollary_check, in_delta_2, in_delta_inf, in_mon_g, region_report
from .graphs import IndexFamily, is_ergodic
from .means import bivariate
from .parser import parse_descriptor, parse_generator
from .suites import SUITES, verify_suite

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _emit(payload, out=None) -> None:
    text = jsonio.dumps(payload)
    (out or sys.stdout).write(text + "\n")


def _result_dict(res: ExtensionResult) -> dict:
    return {
        "value": res.value,
        "iterations": res.iterations,
        "final_gap": res.final_gap,
        "converged": res.converged,
    }


def _parse_vector(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad vector {text!r}: {exc}") from None
    if not vals:
        raise ParseError("empty vector")
    return vals


def _parse_params(text: str) -> GiniParams:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(f"expected R,S got {text!r}")
    return GiniParams(float(parts[0]), float(parts[1]))


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ParseError("config file must contain a JSON object")
    return data


def _merged(args: argparse.Namespace, key: str, config: dict, default):
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _iteration_config(args, config) -> IterationConfig:
    kwargs = {}
    tol = _merged(args, "tol", config, None)
    if tol is not None:
        kwargs["rel_tol"] = float(tol)
    abs_tol = _merged(args, "abs-tol", config, None)
    if abs_tol is not None:
        kwargs["abs_tol"] = float(abs_tol)
    max_iter = _merged(args, "max-iter", config, None)
    if max_iter is not None:
        kwargs["max_iter"] = int(max_iter)
    budget = _merged(args, "budget", config, None)
    if budget is not None:
        kwargs["call_budget"] = int(budget)
    if getattr(args, "analytic_shortcut", False):
        kwargs["analytic_shortcut"] = True
    if getattr(args, "trace", False):
        def trace(iteration: int, vec: tuple[float, ...]) -> None:
            sys.stderr.write(jsonio.dumps({"iteration": iteration, "x": list(vec)}) + "\n")

        kwargs["trace"] = trace
    return IterationConfig(**kwargs)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="meanx", description=__doc__.split("\n\n")[0])
    ap.add_argument("--config", help="JSON file with default option values")
    sub = ap.add_subparsers(dest="command", required=True)

    ext = sub.add_parser("extend", help="iteratively extend a bivariate mean")
    ext.add_argument("--mean", required=True, help="mean descriptor, e.g. power:1 or gini:1,-1")
    ext.add_argument("--x", required=True, help="comma-separated input vector")
    ext.add_argument("--tol", type=float)
    ext.add_argument("--abs-tol", type=float, dest="abs_tol")
    ext.add_argument("--max-iter", type=int, dest="max_iter")
    ext.add_argument("--budget", type=int)
    ext.add_argument("--analytic-shortcut", action="store_true")
    ext.add_argument("--trace", action="store_true", help="stream iterate vectors to stderr")

    erg = sub.add_parser("check-ergodic", help="ergodicity report for an index family")
    group = erg.add_mutually_exclusive_group(required=True)
    group.add_argument("--family", help='inline JSON, e.g. {"p":2,"alpha":[[2],[1]]}')
    group.add_argument("--family-file", help="path to a JSON file with the family")

    ver = sub.add_parser("verify", help="run a property suite")
    ver.add_argument("--mean", required=True)
    ver.add_argument("--suite", required=True, choices=SUITES)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--samples", type=int)
    ver.add_argument("--gen", help="generator for the conjugacy suite, e.g. power:2")
    ver.add_argument("--tol", type=float)
    ver.add_argument("--max-iter", type=int, dest="max_iter")
    ver.add_argument("--budget", type=int)

    reg = sub.add_parser("gini-region", help="Gini comparability regions + sampled check")
    reg.add_argument("--a", required=True, help="first parameter pair R,S")
    reg.add_argument("--b", required=True, help="second parameter pair R,S")
    reg.add_argument("--trials", type=int)
    reg.add_argument("--seed", type=int)
    reg.add_argument("--tol", type=float)
    reg.add_argument("--skip-samples", action="store_true", help="report regions only")

    sweep = sub.add_parser("gini-sweep", help="CSV of region membership over a parameter grid")
    sweep.add_argument("--a", required=True, help="fixed first pair R,S")
    sweep.add_argument("--rmin", type=float, default=-3.0)
    sweep.add_argument("--rmax", type=float, default=3.0)
    sweep.add_argument("--smin", type=float, default=-3.0)
    sweep.add_argument("--smax", type=float, default=3.0)
    sweep.add_argument("--steps", type=int, default=13)

    env = sub.add_parser("envelope", help="envelope estimate at a point")
    env.add_argument("--mean", required=True)
    env.add_argument("--x", required=True)
    env.add_argument("--kind", required=True, choices=KINDS)
    env.add_argument("--rmin", type=float, default=None)
    env.add_argument("--rmax", type=float, default=None)
    env.add_argument("--grid", type=int, default=None)
    env.add_argument("--refine-tol", type=float, dest="refine_tol")
    env.add_argument("--pmax", type=int, default=4)
    env.add_argument("--samples", type=int, default=64)
    env.add_argument("--seed", type=int)
    env.add_argument("--tol", type=float)
    return ap


def _cmd_extend(args, config) -> int:
    mean = bivariate(parse_descriptor(args.mean))
    x = _parse_vector(args.x)
    cfg = _iteration_config(args, config)
    try:
        res = iterative_extension_eval(mean, x, cfg)
    except NotConverged as exc:
        if exc.result is not None:
            _emit(_result_dict(exc.result))
        sys.stderr.write(f"not converged: {exc}\n")
        return EXIT_RESOURCE
    _emit(_result_dict(res))
    return EXIT_OK


def _cmd_check_ergodic(args, config) -> int:
    if args.family:
        data = json.loads(args.family)
    else:
        with open(args.family_file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    fam = IndexFamily.from_json_dict(data)
    report = is_ergodic(fam)
    _emit(
        {
            "irreducible": report.irreducible,
            "period": report.period,
            "ergodic": report.ergodic,
        }
    )
    return EXIT_OK


def _cmd_verify(args, config) -> int:
    mean = parse_descriptor(args.mean)
    cfg = _iteration_config(args, config)
    seed = int(_merged(args, "seed", config, 0))
    samples = int(_merged(args, "samples", config, 50))
    gen = parse_generator(args.gen) if args.gen else None
    report = verify_suite(mean, args.suite, seed=seed, cfg=cfg, samples=samples, gen=gen)
    _emit(report)
    return EXIT_OK if report.passed else EXIT_ASSERTION


def _cmd_gini_region(args, config) -> int:
    a = _parse_params(args.a)
    b = _parse_params(args.b)
    cfg = _iteration_config(args, config)
    seed = int(_merged(args, "seed", config, 0))
    trials = int(_merged(args, "trials", config, 50))
    if args.skip_samples:
        _emit({"region": region_report(a, b).to_dict(), "verdict": None})
        return EXIT_OK
    verdict = corollary_check(a, b, trials=trials, seed=seed, cfg=cfg)
    _emit({"region": verdict.region.to_dict(), "verdict": verdict.to_dict()})
    return EXIT_OK if verdict.passed else EXIT_ASSERTION


def _cmd_gini_sweep(args, config) -> int:
    a = _parse_params(args.a)
    rs = np.linspace(args.rmin, args.rmax, args.steps)
    ss = np.linspace(args.smin, args.smax, args.steps)
    lines = ["r,s,in_delta_inf,in_delta_2,in_mon_g"]
    for r in rs:
        for s in ss:
            b = GiniParams(float(r), float(s))
            lines.append(
                f"{r:.17g},{s:.17g},{int(in_delta_inf(a, b))},"
                f"{int(in_delta_2(a, b))},{int(in_mon_g(b))}"
            )
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_envelope(args, config) -> int:
    mean = parse_descriptor(args.mean)
    x = _parse_vector(args.x)
    cfg = _iteration_config(args, config)
    seed = int(_merged(args, "seed", config, 0))
    window_kwargs = {}
    if args.rmin is not None:
        window_kwargs["r_min"] = args.rmin
    if args.rmax is not None:
        window_kwargs["r_max"] = args.rmax
    if args.grid is not None:
        window_kwargs["grid"] = args.grid
    if args.refine_tol is not None:
        window_kwargs["refine_tol"] = args.refine_tol
    window = FamilyWindow(**window_kwargs)
    est = envelope_estimate(
        mean, x, args.kind, window, cfg, samples=args.samples, seed=seed, p_max=args.pmax
    )
    _emit(est)
    return EXIT_OK


_COMMANDS = {
    "extend": _cmd_extend,
    "check-ergodic": _cmd_check_ergodic,
    "verify": _cmd_verify,
    "gini-region": _cmd_gini_region,
    "gini-sweep": _cmd_gini_sweep,
    "envelope": _cmd_envelope,
}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        config = _load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except (NotConverged, ResourceLimit) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_RESOURCE
    except NotErgodic as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_RESOURCE
    except (MeanxError, OSError, json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
