"""Command line entry point: ``hamgate <subcommand> ...``."""
import argparse
import dataclasses
import json
import sys

from .cost import COST_KINDS, CostMode
from .exceptions import ConfigError, ValidationError
from .experiment import (
    evaluate,
    load_config,
    reproduction_config,
    run_gradcheck,
    sweep_trotter,
    synthesize,
)
from .optimize import Init
from .pauli import PRESETS, published_theta, standard_specs
from .targets import BUILTINS, builtin, convention_audit


def _int_list(text):
    return [int(x) for x in text.replace(",", " ").split()]


def _float_list(text):
    return [float(x) for x in text.replace(",", " ").split()]


def _add_run_flags(p):
    p.add_argument("--cost-mode", choices=COST_KINDS)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, help="seed for the initial draw and for sampled costs")
    p.add_argument("--restarts", type=int)
    p.add_argument("--out", help="output directory (overrides the config)")


def _apply_overrides(cfg, args):
    if args.cost_mode or args.shots is not None or args.seed is not None:
        cm = cfg.cost_mode
        kind = args.cost_mode or cm.kind
        shots = args.shots if args.shots is not None else cm.shots
        seed = args.seed if args.seed is not None else cm.seed
        cfg.cost_mode = CostMode(kind, shots if kind == "hst-sampled" else None, seed)
    opt = cfg.optimizer
    if args.seed is not None:
        opt = dataclasses.replace(opt, init=dataclasses.replace(opt.init, seed=args.seed))
    if args.restarts is not None:
        opt = dataclasses.replace(opt, restarts=args.restarts)
    cfg.optimizer = opt
    if args.out:
        cfg.output_dir = args.out
    return cfg


def _summary(rec):
    return {
        "trotterized_fidelity": rec.trotterized_fidelity,
        "exact_fidelity": rec.exact_fidelity,
        "final_cost": rec.final_cost,
        "termination_reason": rec.termination_reason,
        "two_qubit_gate_count": rec.two_qubit_gate_count,
        "conditions": rec.conditions,
        "trace_path": rec.trace_path,
        "wall_time": round(rec.wall_time, 3),
    }


def cmd_synthesize(args):
    cfg = _apply_overrides(load_config(args.config), args)
    rec = synthesize(cfg)
    print(json.dumps(_summary(rec), indent=2))
    return 0


def cmd_reproduce(args):
    cfg = _apply_overrides(reproduction_config(args.which), args)
    if args.print_config:
        print(json.dumps(cfg.to_json(), indent=2))
        return 0
    rec = synthesize(cfg)
    print(json.dumps(_summary(rec), indent=2))
    return 0


def cmd_evaluate(args):
    if args.published:
        if args.spec not in ("fig4a", "fig4b"):
            raise ValidationError("--published needs --spec fig4a or fig4b")
        theta = published_theta(args.spec)
    elif args.theta:
        theta = _float_list(args.theta)
    else:
        raise ValidationError("give --theta or --published")
    rec = evaluate(args.target, args.spec, theta, args.steps, args.mode, args.out)
    print(json.dumps(_summary(rec), indent=2))
    return 0


def cmd_sweep(args):
    cfg = _apply_overrides(load_config(args.config), args)
    m_values = _int_list(args.m)
    records = sweep_trotter(cfg, m_values, reoptimize=not args.no_reoptimize)
    print("m,exact_fidelity,trotterized_fidelity")
    for m, r in zip(m_values, records):
        print(f"{m},{r.exact_fidelity:.6f},{r.trotterized_fidelity:.6f}")
    return 0


def cmd_gradcheck(args):
    report = run_gradcheck(args.spec, args.target, args.steps, args.seed)
    print(report.format())
    return 0 if report.passed else 1


def cmd_audit(args):
    spec = standard_specs(args.spec)
    rows = convention_audit(spec, published_theta(args.spec), builtin(args.target), args.steps)
    rows.sort(key=lambda r: -r[1])
    print(f"{'convention':60s} {'exact':>8s} {'trotter':>8s}")
    for label, fe, ft in rows:
        print(f"{label:60s} {fe:8.4f} {ft:8.4f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="hamgate", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="optimize couplings for a config")
    p.add_argument("--config", required=True)
    _add_run_flags(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("evaluate", help="evaluate fixed couplings")
    p.add_argument("--target", default="toffoli", help=f"one of {BUILTINS} or a matrix file")
    p.add_argument("--spec", default="fig4a", help=f"one of {PRESETS}")
    p.add_argument("--theta", help="comma-separated coefficients in spec order")
    p.add_argument("--published", action="store_true", help="use the preset's published values")
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--mode", choices=("primitive", "decomposed"), default="primitive")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep-trotter", help="fidelity versus Trotter depth")
    p.add_argument("--config", required=True)
    p.add_argument("--m", required=True, help="comma-separated Trotter depths")
    p.add_argument("--no-reoptimize", action="store_true")
    _add_run_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gradcheck", help="parameter-shift vs finite differences")
    p.add_argument("--spec", default="fig4a")
    p.add_argument("--target", default="toffoli")
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("reproduce", help="run a pinned reproduction recipe")
    p.add_argument("which", choices=("toffoli", "parity"))
    p.add_argument("--print-config", action="store_true")
    _add_run_flags(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("audit", help="published parameters under alternative conventions")
    p.add_argument("--spec", default="fig4a", choices=("fig4a", "fig4b"))
    p.add_argument("--target", default="toffoli")
    p.add_argument("--steps", type=int, default=6)
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
