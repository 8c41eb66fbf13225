"""Command-line interface: run experiments, evaluate derivatives, print
reference constants, and self-test the core invariants.

Exit codes: 0 success, 2 validation error, 3 oracle failure, 4 selftest
threshold breach.
"""

import argparse
import json
import sys

import numpy as np

from .dists import Normal, Uniform
from .experiments import ConfigError, ExperimentConfig, run
from .functionals import difference_quotient, directional_derivative, evaluate
from .grid import FunctionalKind, GridDomain, GridFunction
from .references import available_references, named_reference
from .rng import substream
from .samplers import BridgeSampler1D

_KINDS = {k.value: k for k in FunctionalKind}


def _load_function_csv(path) -> GridFunction:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 2:
        raise ValueError(f"{path}: need columns x,value[,left]")
    dom = GridDomain.line(data[:, 0])
    left = data[:, 2] if data.shape[1] > 2 else None
    return GridFunction(dom, data[:, 1], left_limits=left)


def _cmd_run(args) -> int:
    try:
        config = ExperimentConfig.from_json(args.config)
        if args.output_dir:
            config.output_dir = args.output_dir
    except (ConfigError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        result = run(config)
    except ValueError as exc:
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 3
    print(result.report.to_json())
    return 0


def _cmd_derivative(args) -> int:
    try:
        f = _load_function_csv(args.f)
        g = _load_function_csv(args.g)
        kind = _KINDS[args.kind]
        value = directional_derivative(kind, f, g, args.epsilon)
    except (ValueError, KeyError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    print(f"{value:.12g}")
    if args.check_quotient:
        q = difference_quotient(kind, f, g, args.check_quotient)
        print(f"quotient(t={args.check_quotient:g}) = {q:.12g}")
    return 0


def _cmd_oracle(args) -> int:
    try:
        ref = named_reference(args.name)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return 3
    print(json.dumps(
        {"name": ref.name, "value": ref.value, "provenance": ref.provenance, "detail": ref.detail}
    ))
    return 0


def _selftest_checks():
    rng = np.random.default_rng(20260810)
    x = np.linspace(0.0, 1.0, 257)
    dom = GridDomain.line(x)

    def rand_fn():
        kx = np.sort(np.concatenate([[0.0, 1.0], rng.uniform(0, 1, 10)]))
        return GridFunction(dom, np.interp(x, kx, rng.uniform(-1, 1, kx.size)))

    failures = []
    for trial in range(50):
        f, g = rand_fn(), rand_fn()
        for kind in FunctionalKind:
            d = directional_derivative(kind, f, g, 0.0)
            q = difference_quotient(kind, f, g, 1e-4)
            if abs(d - q) > 1e-3 * (1.0 + np.abs(g.values).max()):
                failures.append(f"derivative-oracle {kind.value} trial {trial}")
        # duality and positive homogeneity
        di = directional_derivative(FunctionalKind.INF, f, g, 0.0)
        ds = directional_derivative(FunctionalKind.SUP, -f, -g, 0.0)
        if abs(di + ds) > 1e-12:
            failures.append(f"duality trial {trial}")
        lam = 2.5
        if (
            abs(
                directional_derivative(FunctionalKind.SUP, f, g * lam, 0.0)
                - lam * directional_derivative(FunctionalKind.SUP, f, g, 0.0)
            )
            > 1e-12
        ):
            failures.append(f"homogeneity trial {trial}")

    # bridge pinning and reproducibility
    grid = GridDomain.compactified_line(Normal().ppf((np.arange(30) + 0.5) / 30))
    sampler = BridgeSampler1D(Normal(), grid, seed=7)
    p1, p2 = sampler.sample_path(3), sampler.sample_path(3)
    if not np.array_equal(p1, p2):
        failures.append("bridge determinism")
    if p1[0] != 0.0 or p1[-1] != 0.0:
        failures.append("bridge pinning")

    # seeded stream independence
    a = substream(1, 0, 0).standard_normal(4)
    b = substream(1, 0, 1).standard_normal(4)
    if np.allclose(a, b):
        failures.append("substream independence")
    return failures


def _cmd_selftest(_args) -> int:
    failures = _selftest_checks()
    if failures:
        for f in failures:
            print(f"FAIL {f}", file=sys.stderr)
        return 4
    print("selftest: all invariant checks passed")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="supdelta",
        description="sup-functional derivatives and limit-law experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--output-dir", default=None)
    p_run.set_defaults(fn=_cmd_run)

    p_d = sub.add_parser("derivative", help="directional derivative from two CSVs")
    p_d.add_argument("f", help="CSV with header and columns x,value[,left]")
    p_d.add_argument("g", help="CSV with header and columns x,value[,left]")
    p_d.add_argument("--kind", choices=sorted(_KINDS), default="sup")
    p_d.add_argument("--epsilon", type=float, default=0.0)
    p_d.add_argument("--check-quotient", type=float, default=None, metavar="T")
    p_d.set_defaults(fn=_cmd_derivative)

    p_o = sub.add_parser("oracle", help="print a named reference constant")
    p_o.add_argument("name", help=f"one of {', '.join(available_references())}")
    p_o.set_defaults(fn=_cmd_oracle)

    p_s = sub.add_parser("selftest", help="run the invariant self-checks")
    p_s.set_defaults(fn=_cmd_selftest)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
