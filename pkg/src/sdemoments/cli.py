"""Command-line driver.

    sdemoments estimate MODEL.json --method implicit2 --steps 30 --horizon 0.1 --alpha 1,1
    sdemoments sweep    MODEL.json --method implicit1,implicit2 --steps 10,20,30 \\
                        --horizon 0.1 --alpha 1,1 --extrapolate auto --oracle ode --out sweep.csv
    sdemoments oracle   MODEL.json --kind ode --horizon 0.1 --alpha 1,1 --cutoff 15 --dt 1e-6
    sdemoments table    MODEL.json
    sdemoments export-config vdp [--params '{"epsilon": 2}']

Exit status: 0 on success, 1 for usage or config errors, 2 for numerical
failures (singular step, divergence, failed oracle).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from .config import ConfigError, ModelConfig, config_from_dict, config_to_dict, load_config
from .extrapolation import EstimatePair, extrapolate
from .generator import compile_generator
from .oracle import McOracleConfig, OdeOracleConfig, mc_oracle, ode_oracle, ou_closed_form
from .propagator import Method, NumericalError, RunPlan, StepScheme, run

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2

ODE_DT = 1e-6
MC_DT = 1e-3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _alpha(text: str) -> tuple[int, ...]:
    values = _int_list(text)
    if min(values) < 0:
        raise argparse.ArgumentTypeError("alpha entries must be non-negative")
    return tuple(values)


def _methods(text: str) -> list[Method]:
    try:
        return [Method(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"methods must be among {[m.value for m in Method]}, got {text!r}"
        )


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _load(path: str, alpha: Sequence[int] | None = None) -> ModelConfig:
    cfg = load_config(path)
    if alpha is not None and len(alpha) != cfg.model.dimension:
        raise UsageError(
            f"--alpha has {len(alpha)} entries but the model has dimension {cfg.model.dimension}"
        )
    return cfg


def _scheme(method: Method, two_hop: bool) -> StepScheme:
    return StepScheme(method, two_hop and method is Method.IMPLICIT2)


def _oracle_value(cfg: ModelConfig, kind: str, T: float, alpha, args) -> tuple[float, float | None]:
    """``(value, std_error)``; std_error is None except for Monte Carlo."""
    if kind.startswith("value:"):
        try:
            return float(kind.split(":", 1)[1]), None
        except ValueError:
            raise UsageError(f"bad oracle value in {kind!r}")
    if kind == "closed_form":
        if cfg.preset != "ou":
            raise UsageError("closed_form oracle is only available for the ou preset")
        if len(alpha) != 1 or alpha[0] not in (1, 2):
            raise UsageError("closed_form oracle covers alpha=1 and alpha=2")
        p = cfg.params
        return ou_closed_form(p.gamma, p.sigma, p.x_ini, T, alpha[0]), None
    if kind == "ode":
        g = compile_generator(cfg.model, cfg.origin)
        ode_cfg = OdeOracleConfig(T=T, cutoff=args.cutoff, dt=args.dt or ODE_DT)
        return ode_oracle(g, alpha, ode_cfg), None
    if kind == "mc":
        mc_cfg = McOracleConfig(paths=args.paths, dt=args.dt or MC_DT, seed=args.seed)
        return mc_oracle(cfg.model, cfg.origin, alpha, T, mc_cfg)
    raise UsageError(f"unknown oracle {kind!r}; use closed_form, ode, mc or value:<x>")


# -- subcommands ---------------------------------------------------------------


def cmd_estimate(args) -> int:
    cfg = _load(args.config, args.alpha)
    g = compile_generator(cfg.model, cfg.origin)
    method = args.method[0]
    plan = RunPlan(args.horizon, args.steps[0], args.alpha, _scheme(method, args.two_hop_denominator))
    value = run(g, plan)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow([method.value, plan.M, repr(plan.T), ",".join(map(str, plan.alpha)), _fmt(value)])
    return EXIT_OK


SWEEP_HEADER = ["method", "M", "estimate", "extrapolated", "oracle", "abs_error", "abs_error_extrapolated"]


def sweep_rows(cfg: ModelConfig, args) -> tuple[list[list[str]], int]:
    """CSV rows of a convergence sweep and the exit status they imply."""
    g = compile_generator(cfg.model, cfg.origin)
    status = EXIT_OK
    oracle = None
    if args.oracle:
        try:
            oracle = _oracle_value(cfg, args.oracle, args.horizon, args.alpha, args)[0]
        except NumericalError:
            status = EXIT_NUMERICAL
        except ValueError as exc:
            print(f"oracle failed: {exc}", file=sys.stderr)
            status = EXIT_NUMERICAL

    cache: dict[tuple[Method, int], float | None] = {}

    def estimate(method: Method, M: int) -> float | None:
        if (method, M) not in cache:
            plan = RunPlan(args.horizon, M, args.alpha, _scheme(method, args.two_hop_denominator))
            try:
                cache[method, M] = run(g, plan)
            except NumericalError as exc:
                print(f"{method.value} M={M}: {exc}", file=sys.stderr)
                cache[method, M] = None
        return cache[method, M]

    rows = []
    for method in sorted(set(args.method), key=lambda m: m.value):
        for M in sorted(set(args.steps)):
            value = estimate(method, M)
            if value is None:
                status = EXIT_NUMERICAL
            extrap = None
            if args.extrapolate != "none" and value is not None and M - args.pair_gap >= 1:
                order = method.order if args.extrapolate == "auto" else int(args.extrapolate[-1])
                low = estimate(method, M - args.pair_gap)
                if low is None:
                    status = EXIT_NUMERICAL
                else:
                    extrap = extrapolate(EstimatePair(low, value, M - args.pair_gap, M), order)
            rows.append([
                method.value,
                str(M),
                "" if value is None else _fmt(value),
                "" if extrap is None else _fmt(extrap),
                "" if oracle is None else _fmt(oracle),
                "" if oracle is None or value is None else _fmt(abs(value - oracle)),
                "" if oracle is None or extrap is None else _fmt(abs(extrap - oracle)),
            ])
    return rows, status


def cmd_sweep(args) -> int:
    cfg = _load(args.config, args.alpha)
    rows, status = sweep_rows(cfg, args)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    writer.writerows(rows)
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return status


def cmd_oracle(args) -> int:
    cfg = _load(args.config, args.alpha)
    value, stderr = _oracle_value(cfg, args.kind, args.horizon, args.alpha, args)
    if stderr is None:
        print(_fmt(value))
    else:
        print(f"{_fmt(value)},{_fmt(stderr)}")
    return EXIT_OK


def cmd_table(args) -> int:
    cfg = _load(args.config)
    print(compile_generator(cfg.model, cfg.origin).format_table())
    return EXIT_OK


def cmd_export_config(args) -> int:
    try:
        params = json.loads(args.params) if args.params else {}
    except json.JSONDecodeError as exc:
        raise UsageError(f"--params is not valid JSON: {exc}")
    cfg = config_from_dict({"preset": args.preset, "params": params})
    print(json.dumps(config_to_dict(cfg, explicit=not args.keep_preset), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sdemoments", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, alpha_required=True):
        p.add_argument("config", help="model config (JSON)")
        p.add_argument("--horizon", "-T", type=_positive_float, required=True, help="time horizon T")
        p.add_argument("--alpha", type=_alpha, required=alpha_required, help="moment order, e.g. 1,1")

    def oracle_opts(p):
        p.add_argument("--cutoff", type=int, default=15, help="ODE oracle box size (default 15)")
        p.add_argument("--dt", type=_positive_float, help=f"oracle step (ode {ODE_DT:g}, mc {MC_DT:g})")
        p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
        p.add_argument("--paths", type=int, default=10**6, help="Monte Carlo paths")

    p = sub.add_parser("estimate", help="single moment estimate")
    common(p)
    p.add_argument("--method", type=_methods, required=True)
    p.add_argument("--steps", "-M", type=_int_list, required=True)
    p.add_argument("--two-hop-denominator", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="convergence sweep over methods and step counts, as CSV")
    common(p)
    p.add_argument("--method", type=_methods, default=list(Method))
    p.add_argument("--steps", "-M", type=_int_list, required=True)
    p.add_argument("--extrapolate", choices=["none", "order1", "order2", "auto"], default="none",
                   help="auto uses each method's own order")
    p.add_argument("--pair-gap", type=int, default=1,
                   help="extrapolate from M - gap and M (default 1)")
    p.add_argument("--oracle", help="closed_form, ode, mc or value:<x>")
    p.add_argument("--two-hop-denominator", action="store_true")
    p.add_argument("--out", "-o", default="-", help="CSV path (default stdout)")
    oracle_opts(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="reference value")
    common(p)
    p.add_argument("--kind", required=True, choices=["closed_form", "ode", "mc"])
    oracle_opts(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("table", help="print the event table")
    p.add_argument("config")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("export-config", help="write a preset as a model config")
    p.add_argument("preset", choices=["ou", "vdp"])
    p.add_argument("--params", help="JSON object of preset parameters")
    p.add_argument("--keep-preset", action="store_true", help="emit the preset form instead")
    p.set_defaults(func=cmd_export_config)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help and bad arguments; report its status instead
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "steps", None) and min(args.steps) < 1:
        print("sdemoments: error: --steps must be positive", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "method", None) is not None and args.command == "estimate":
        if len(args.method) != 1 or len(args.steps) != 1:
            print("sdemoments: error: estimate takes a single --method and --steps", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"sdemoments: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"sdemoments: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"sdemoments: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
