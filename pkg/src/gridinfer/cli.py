"""Command-line entry point.

    gridinfer generate-data --config cfg [--out DIR] [--seed N]
    gridinfer run           --config cfg [--out DIR] [--seed N] [--desk-scale] [--chains N]
    gridinfer summarize     --config cfg [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 runtime or solver error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from pathlib import Path

from .core import ContractViolation
from .harness import (
    ConfigError,
    DESK_ITERATIONS,
    ScenarioConfig,
    generate_data_only,
    parse_config_file,
    run_scenario,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridinfer",
        description="Joint MCMC over model inputs and forward-solver discretizations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("generate-data", "run", "summarize"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--seed", type=int, default=None, help="chain seed override")
        if name == "run":
            p.add_argument("--desk-scale", action="store_true",
                           help="use the reduced iteration counts meant for CI")
            p.add_argument("--chains", type=int, default=1,
                           help="independent chains run concurrently, seeds chain_seed+i")
    return parser


def _load_config(args) -> ScenarioConfig:
    config = parse_config_file(args.config)
    if args.out is not None:
        config.output_dir = args.out
    if args.seed is not None:
        config.chain_seed = args.seed
    if getattr(args, "desk_scale", False):
        config.n_iterations = DESK_ITERATIONS[config.scenario]
    return config


def _run_chain(config: ScenarioConfig) -> dict:
    return run_scenario(config)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "generate-data":
            generate_data_only(config)
            print(f"data written to {config.output_dir}")
        elif args.command == "run":
            n_chains = args.chains
            if n_chains <= 1:
                summary = run_scenario(config)
                _print_summary(summary)
            else:
                configs = [replace_chain(config, i) for i in range(n_chains)]
                with ProcessPoolExecutor(max_workers=min(n_chains, 4)) as pool:
                    summaries = list(pool.map(_run_chain, configs))
                merged = merge_summaries(summaries)
                _write_merged(merged, Path(config.output_dir))
                _print_summary(merged)
        elif args.command == "summarize":
            from .summarize import summarize_directory
            summary = summarize_directory(config, Path(config.output_dir))
            _print_summary(summary)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ContractViolation, ValueError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


def replace_chain(config: ScenarioConfig, index: int) -> ScenarioConfig:
    import copy

    chain_config = copy.deepcopy(config)
    chain_config.chain_seed = config.chain_seed + index
    chain_config.output_dir = str(Path(config.output_dir) / f"chain_{index:02d}")
    return chain_config


def merge_summaries(summaries: list[dict]) -> dict:
    keys = [k for k in summaries[0] if isinstance(summaries[0][k], (int, float))]
    merged = {f"mean_{k}": sum(s[k] for s in summaries) / len(summaries) for k in keys}
    merged["n_chains"] = len(summaries)
    return merged


def _write_merged(merged: dict, out: Path) -> None:
    from .harness import write_csv

    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "summary.csv", ["key", "value"], sorted(merged.items()))


def _print_summary(summary: dict) -> None:
    for key in sorted(summary):
        print(f"{key} = {summary[key]}")


if __name__ == "__main__":
    sys.exit(main())
