"""Command-line harness: run experiments, verify invariants, generate loss files.

Exit codes: 0 on success / all checks passing, 1 when any check fails,
2 on configuration errors (including unknown flags).
"""

import argparse
import os
import sys

from . import harness
from .adversaries import (
    GaussianAdversary,
    LowerBoundAdversary,
    ReplayAdversary,
    SpikyAdversary,
    generate,
)
from .harness import ConfigError, ExperimentConfig, run_verify_suite

import numpy as np


def _color(text: str, code: str) -> str:
    if os.environ.get("NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _print_result_line(name: str, passed: bool, detail: str = "") -> None:
    status = _color("pass", "32") if passed else _color("FAIL", "31")
    suffix = f" ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scalefree",
        description="Scale-free online linear optimization harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment and emit a trace CSV")
    p_run.add_argument("--config", required=True, help="path to a key=value config file")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--scale", type=float, default=None, help="override the loss scale factor")
    p_run.add_argument("--out", default=None, help="override the trace output path")

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument(
        "--suite",
        required=True,
        choices=sorted(harness.VERIFY_SUITES),
        help="which invariant family to check",
    )
    p_verify.add_argument("--trials", type=int, default=None, help="suite-specific effort knob")
    p_verify.add_argument("--seed", type=int, default=0)

    p_gen = sub.add_parser("generate", help="generate a loss file from an adversary spec")
    p_gen.add_argument(
        "--adversary",
        required=True,
        help=(
            "comma-separated key=value spec, e.g. "
            "'kind=gaussian,dim=3,rounds=20,sigma=2.0,seed=7' or "
            "'kind=lower_bound,set=simplex,dim=2,rounds=8,norm=1'"
        ),
    )
    p_gen.add_argument("--out", required=True, help="loss CSV output path")
    p_gen.add_argument("--seed", type=int, default=0, help="seed when the spec omits one")
    return parser


def _parse_adversary_spec(raw: str):
    spec = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"adversary spec: expected key=value, got {part!r}")
        key, _, value = part.partition("=")
        spec[key.strip()] = value.strip()

    def need_int(key, default=None):
        if key not in spec and default is not None:
            return default
        if key not in spec:
            raise ConfigError(f"adversary spec: missing {key!r}")
        try:
            return int(spec[key])
        except ValueError:
            raise ConfigError(f"adversary spec: {key!r} must be an integer")

    def need_float(key, default=None):
        if key not in spec and default is not None:
            return default
        if key not in spec:
            raise ConfigError(f"adversary spec: missing {key!r}")
        try:
            return float(spec[key])
        except ValueError:
            raise ConfigError(f"adversary spec: {key!r} must be a number")

    kind = spec.get("kind")
    seed = need_int("seed", 0)
    try:
        if kind == "replay":
            if "path" not in spec:
                raise ConfigError("adversary spec: replay needs path=")
            return ReplayAdversary(harness.read_loss_csv(spec["path"])), seed
        if kind == "gaussian":
            return (
                GaussianAdversary(need_int("dim"), need_float("sigma", 1.0), need_int("rounds")),
                seed,
            )
        if kind == "spiky":
            rounds = need_int("rounds")
            return (
                SpikyAdversary(
                    need_int("dim"),
                    rounds,
                    need_float("spike_magnitude", 1e6),
                    need_int("spike_round", max(1, rounds // 2)),
                ),
                seed,
            )
        if kind == "lower_bound":
            rounds = need_int("rounds")
            norms = np.full(rounds, need_float("norm", 1.0))
            set_kind = spec.get("set", "simplex")
            dim = need_int("dim", 2)
            if set_kind == "simplex":
                K = harness.Simplex(dim)
            elif set_kind == "l2_ball":
                K = harness.L2Ball(np.zeros(dim), need_float("radius", 1.0))
            elif set_kind == "box":
                K = harness.Box(-np.ones(dim), np.ones(dim))
            else:
                raise ConfigError(f"adversary spec: unknown set {set_kind!r}")
            return LowerBoundAdversary(K, norms), seed
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"adversary spec: {exc}") from exc
    raise ConfigError(f"adversary spec: unknown kind {kind!r}")


def _cmd_run(args) -> int:
    cfg_dict = harness.load_config(args.config)
    if args.seed is not None:
        cfg_dict["seed"] = str(args.seed)
    if args.scale is not None:
        cfg_dict["scale_factor"] = repr(args.scale)
    if args.out is not None:
        cfg_dict["output_path"] = args.out
    cfg = ExperimentConfig.from_dict(cfg_dict)
    traces, reports = harness.run_experiment(cfg)
    final_regret = traces[-1].regret_to_date if traces else 0.0
    print(
        f"algorithm={cfg.algorithm} rounds={len(traces)} seed={cfg.seed} "
        f"scale_factor={cfg.scale_factor:g} final_regret={final_regret:.6g}"
    )
    if cfg.output_path:
        print(f"trace written to {cfg.output_path}")
    for rep in reports:
        _print_result_line(rep.name, rep.passed, f"observed={rep.observed:.6g} bound={rep.bound:.6g}")
    return 0 if all(r.passed for r in reports) else 1


def _cmd_verify(args) -> int:
    results = run_verify_suite(args.suite, args.trials, args.seed)
    for res in results:
        _print_result_line(res.name, res.passed, res.detail)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def _cmd_generate(args) -> int:
    adversary, spec_seed = _parse_adversary_spec(args.adversary)
    seed = spec_seed if spec_seed != 0 else args.seed
    losses = generate(adversary, seed=seed)
    harness.write_loss_csv(args.out, losses)
    print(f"wrote {losses.shape[0]} rounds of dimension {losses.shape[1] if losses.ndim == 2 else 0} to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse prints usage to stderr; normalize the failure exit code
        return 0 if exc.code in (0, None) else 2
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "generate":
            return _cmd_generate(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    parser.print_usage(sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
