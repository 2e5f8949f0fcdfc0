"""Command-line front end: single runs, experiment sweeps, config inspection."""
import argparse
import sys
from dataclasses import replace

from .config import STRATEGIES, config_lines, load_config
from .errors import ConfigurationError, SimulationError
from .metrics import render_catalog_csv, render_jobs_csv, render_summary_csv, render_trace
from .runner import run_once

DEFAULT_JOB_COUNTS = "100,200,300,400,500,600,700,800,900,1000"
DEFAULT_WAN_SWEEP = "10,50,100,500,1000"


def _parse_int_list(spec: str, what: str) -> list[int]:
    """Comma-separated integers, with `a..b` inclusive ranges allowed."""
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo_s, hi_s = part.split("..", 1)
                lo, hi = int(lo_s, 10), int(hi_s, 10)
                if hi < lo:
                    raise ConfigurationError(f"{what}: empty range {part!r}")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part, 10))
        except ValueError:
            raise ConfigurationError(f"{what}: cannot parse {part!r}") from None
    if not out:
        raise ConfigurationError(f"{what}: no values given")
    if any(v < 0 for v in out):
        raise ConfigurationError(f"{what}: values must be >= 0")
    return out


def _parse_strategies(spec: str) -> list[str]:
    out = [part.strip() for part in spec.split(",") if part.strip()]
    if not out:
        raise ConfigurationError("strategies: no values given")
    for name in out:
        if name not in STRATEGIES:
            raise ConfigurationError(
                f"strategies: must be one of {', '.join(STRATEGIES)}, got {name!r}")
    return out


def _load(args):
    overrides = list(args.set or [])
    if getattr(args, "strategy", None):
        overrides.append(f"strategy={args.strategy}")
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    return load_config(args.config, overrides)


def _write(path: str, text: str) -> None:
    if path in ("", "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_run(args) -> int:
    cfg = _load(args)
    sim, result, summary = run_once(cfg, keep_trace=args.trace is not None)
    _write(args.out if args.out is not None else cfg.out, render_summary_csv([summary]))
    if args.dump_jobs is not None:
        _write(args.dump_jobs, render_jobs_csv(result.records))
    if args.dump_catalog is not None:
        _write(args.dump_catalog, render_catalog_csv(sim.catalog))
    if args.trace is not None:
        _write(args.trace, render_trace(result.trace))
    return 0


def cmd_sweep_jobs(args) -> int:
    cfg = _load(args)
    job_counts = _parse_int_list(args.jobs, "jobs")
    strategies = _parse_strategies(args.strategies)
    seeds = [cfg.seed] if args.seeds is None else _parse_int_list(args.seeds, "seeds")
    summaries = []
    for strategy in strategies:
        for n_jobs in job_counts:
            for seed in seeds:
                run_cfg = replace(cfg, strategy=strategy, n_jobs=n_jobs, seed=seed)
                summaries.append(run_once(run_cfg)[2])
    _write(args.out if args.out is not None else cfg.out, render_summary_csv(summaries))
    return 0


def cmd_sweep_wan(args) -> int:
    cfg = _load(args)
    wan_values = _parse_int_list(args.wan, "wan")
    for wan in wan_values:
        if wan < 1:
            raise ConfigurationError(f"wan: bandwidth must be >= 1 Mbps, got {wan}")
        if wan > cfg.lan_mbps:
            raise ConfigurationError(
                f"wan: {wan} Mbps exceeds topology.lan_mbps ({cfg.lan_mbps})")
    strategies = _parse_strategies(args.strategies)
    seeds = [cfg.seed] if args.seeds is None else _parse_int_list(args.seeds, "seeds")
    summaries = []
    for strategy in strategies:
        for wan in wan_values:
            for seed in seeds:
                run_cfg = replace(cfg, strategy=strategy, wan_mbps=wan, seed=seed)
                summaries.append(run_once(run_cfg)[2])
    _write(args.out if args.out is not None else cfg.out, render_summary_csv(summaries))
    return 0


def cmd_print_config(args) -> int:
    cfg = _load(args)
    print("\n".join(config_lines(cfg)))
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="config file of key = value lines")
    parser.add_argument("--set", metavar="KEY=VALUE", action="append",
                        help="override one config key (repeatable)")
    parser.add_argument("--strategy", choices=STRATEGIES,
                        help="replication strategy for this invocation")
    parser.add_argument("--seed", type=int, help="base PRNG seed")
    parser.add_argument("--out", metavar="PATH",
                        help="summary CSV destination ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="datagridsim",
        description="Deterministic data grid simulator: data-aware scheduling "
                    "with hierarchical replication strategies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation")
    _add_common(p_run)
    p_run.add_argument("--dump-jobs", metavar="PATH", help="write per-job CSV")
    p_run.add_argument("--dump-catalog", metavar="PATH",
                       help="write end-of-run replica catalog CSV")
    p_run.add_argument("--trace", metavar="PATH",
                       help="write the full event trace ('-' for stdout)")
    p_run.set_defaults(func=cmd_run)

    p_jobs = sub.add_parser("sweep-jobs", help="vary the number of jobs")
    _add_common(p_jobs)
    p_jobs.add_argument("--jobs", default=DEFAULT_JOB_COUNTS, metavar="LIST",
                        help=f"job counts to sweep (default {DEFAULT_JOB_COUNTS})")
    p_jobs.add_argument("--strategies", default=",".join(STRATEGIES), metavar="LIST",
                        help="strategies to sweep (default all)")
    p_jobs.add_argument("--seeds", metavar="SPEC",
                        help="seeds, e.g. 0..9 or 1,4,7 (default: the config seed)")
    p_jobs.set_defaults(func=cmd_sweep_jobs)

    p_wan = sub.add_parser("sweep-wan", help="vary the cross-region bandwidth")
    _add_common(p_wan)
    p_wan.add_argument("--wan", default=DEFAULT_WAN_SWEEP, metavar="LIST",
                       help=f"WAN Mbps values to sweep (default {DEFAULT_WAN_SWEEP})")
    p_wan.add_argument("--strategies", default=",".join(STRATEGIES), metavar="LIST",
                       help="strategies to sweep (default all)")
    p_wan.add_argument("--seeds", metavar="SPEC",
                       help="seeds, e.g. 0..9 or 1,4,7 (default: the config seed)")
    p_wan.set_defaults(func=cmd_sweep_wan)

    p_cfg = sub.add_parser("print-config", help="print the effective configuration")
    _add_common(p_cfg)
    p_cfg.set_defaults(func=cmd_print_config)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
