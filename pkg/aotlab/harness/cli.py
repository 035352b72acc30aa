#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Command-line entry point.

    aotlab train --map SingleTurn --episodes 50 --seed 0 --method csaot --out runs/single
    aotlab eval --checkpoint runs/single/checkpoint.json --map all --seeds 0,1,2 --out runs/eval
    aotlab replay --trace runs/eval/traces/Complex_csaot_seed0.jsonl --out complex.html
    aotlab maps list
    aotlab compare --map Complex --seeds 0,1,2,3,4 --out runs/compare
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional

import pandas as pd

from aotlab.agents.system import Method, build_system
from aotlab.harness.checkpoint import (
    CheckpointError,
    CheckpointMismatchError,
    load_checkpoint,
    restore_system,
    save_checkpoint,
)
from aotlab.harness.records import (
    EpisodeRecord,
    TraceError,
    format_summary,
    summarize,
    write_metrics,
    write_traces,
)
from aotlab.learn.training import evaluate, train
from aotlab.rewards.components import RewardWeights
from aotlab.simworld.maps import MapError, list_maps, load_map, map_table
from aotlab.simworld.world import WorldParams
from aotlab.utilities.config import get_config, load_config, save_config
from aotlab.utilities.results import (
    UnsupportedFormatError,
    plot_training_curve,
    render_episode,
)

NAME = "aotlab"

_log = logging.getLogger(__name__)

COMPARISON_COLUMNS = ["map", "method", "seeds", "el_mean", "el_std", "cr_mean", "cr_std"]
HIERARCHY_WARNING = "HIERARCHY_WARNING.txt"


class ExitCode:
    success: int = 0
    bad_arguments: int = 2
    io_failure: int = 3
    checkpoint_mismatch: int = 4


class CommandError(RuntimeError):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message

    def __str__(self):
        return self.message


def notify_exit(code: int, log: Callable[[str], None] = _log.info):
    log(f"{NAME} will now exit with code: {code}")
    return code


def parse_seeds(text: str) -> List[int]:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers: {text!r}")
    if not seeds:
        raise argparse.ArgumentTypeError("at least one seed is required")
    return seeds


def _config(path):
    if path is None:
        return get_config()
    try:
        return load_config(path)
    except OSError as err:
        raise CommandError(ExitCode.io_failure, f"cannot read configuration: {err}")
    except ValueError as err:
        raise CommandError(ExitCode.bad_arguments, f"invalid configuration {path}: {err}")


def _map(name):
    try:
        return load_map(name)
    except MapError as err:
        raise CommandError(ExitCode.bad_arguments, str(err))
    except OSError as err:
        raise CommandError(ExitCode.io_failure, f"cannot read map {name}: {err}")


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise CommandError(ExitCode.io_failure, f"cannot create output directory {out}: {err}")
    return out


def _set_episodes(config, episodes: Optional[int]):
    if episodes is None:
        return
    if episodes < 0:
        message = f"--episodes must be nonnegative, got {episodes}"
        raise CommandError(ExitCode.bad_arguments, message)
    config.train.episodes = episodes


def train_command(args) -> int:
    config = _config(args.config)
    world_map = _map(args.map)
    _set_episodes(config, args.episodes)
    out = _out_dir(args.out)

    method = Method[args.method]
    system = build_system(method, config, seed=args.seed)
    _log.info(
        f"training {method.name} ({system.num_parameters()} parameters) on {world_map.name} "
        f"for {config.train.episodes} episodes, seed {args.seed}"
    )
    result = train(system, world_map, config, seed=args.seed)
    try:
        result.log.to_csv(out / "training_log.csv", index=False)
        save_checkpoint(out / "checkpoint.json", system, result.optimizers, result.epsilon, config)
        save_config(config, out / "config.json")
        if args.plot:
            plot_training_curve(result.log, out / "training_curve.html")
    except OSError as err:
        raise CommandError(ExitCode.io_failure, f"cannot write results to {out}: {err}")
    _log.info(f"training results written to {out}")
    return ExitCode.success


def eval_command(args) -> int:
    try:
        checkpoint = load_checkpoint(args.checkpoint)
    except OSError as err:
        raise CommandError(ExitCode.io_failure, f"cannot read checkpoint: {err}")
    except CheckpointError as err:
        raise CommandError(ExitCode.io_failure, str(err))
    config = _config(args.config) if args.config is not None else None
    method = Method[args.method] if args.method is not None else None
    try:
        system, _, config = restore_system(checkpoint, config, method)
    except CheckpointMismatchError as err:
        raise CommandError(ExitCode.checkpoint_mismatch, str(err))
    except CheckpointError as err:
        raise CommandError(ExitCode.io_failure, str(err))

    maps = list_maps() if args.map.lower() == "all" else [_map(args.map)]
    seeds = args.seeds if args.seeds is not None else list(range(args.episodes))
    if not seeds:
        raise CommandError(ExitCode.bad_arguments, "no evaluation episodes requested")
    out = _out_dir(args.out)
    params = WorldParams.from_config(config)
    weights = RewardWeights.from_config(config)

    summaries = []
    try:
        for world_map in maps:
            batches = evaluate(system, world_map, seeds, params, weights)
            records = [EpisodeRecord.from_batch(b) for b in batches]
            write_traces(records, world_map, out / "traces", system.sensors.camera)
            summary = summarize(records, world_map.name, system.method.name)
            _log.info(format_summary(summary))
            summaries.append(summary)
        write_metrics(summaries, out / "metrics.csv")
    except OSError as err:
        raise CommandError(ExitCode.io_failure, f"cannot write results to {out}: {err}")
    return ExitCode.success


def replay_command(args) -> int:
    try:
        written = render_episode(args.trace, args.out)
    except UnsupportedFormatError as err:
        raise CommandError(ExitCode.bad_arguments, str(err))
    except (OSError, TraceError) as err:
        raise CommandError(ExitCode.io_failure, f"cannot render {args.trace}: {err}")
    _log.info(f"rendered {len(written)} file(s) from {args.trace}")
    return ExitCode.success


def maps_command(args) -> int:
    print(map_table().to_string(index=False))
    return ExitCode.success


def compare_command(args) -> int:
    """Train and evaluate both methods with identical budgets on every seed."""
    config = _config(args.config)
    world_map = _map(args.map)
    _set_episodes(config, args.episodes)
    if args.eval_episodes < 1:
        raise CommandError(ExitCode.bad_arguments, "--eval-episodes must be at least 1")
    out = _out_dir(args.out)
    params = WorldParams.from_config(config)
    weights = RewardWeights.from_config(config)

    rows = []
    for method in Method:
        records = []
        for seed in args.seeds:
            system = build_system(method, config, seed=seed)
            train(system, world_map, config, seed=seed)
            batches = evaluate(
                system, world_map, range(args.eval_episodes), params, weights, record_steps=False
            )
            records += [EpisodeRecord.from_batch(b) for b in batches]
        summary = summarize(records, world_map.name, method.name)
        _log.info(format_summary(summary))
        rows.append({**summary.to_dict(), "seeds": len(args.seeds)})
    table = pd.DataFrame(rows, columns=COMPARISON_COLUMNS)

    el = dict(zip(table["method"], table["el_mean"]))
    try:
        table.to_csv(out / "comparison.csv", index=False)
        if el[Method.csaot.name] < el[Method.single.name]:
            message = (
                f"On {world_map.name} the two-layer system reached a mean EL of "
                f"{el[Method.csaot.name]:.2f}, below the single agent's "
                f"{el[Method.single.name]:.2f}.\n"
            )
            (out / HIERARCHY_WARNING).write_text(message)
            _log.warning(message.strip())
    except OSError as err:
        raise CommandError(ExitCode.io_failure, f"cannot write results to {out}: {err}")
    return ExitCode.success


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=NAME, description="Hierarchical active object tracking: train, evaluate, replay."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)
    methods = [m.name for m in Method]

    p = commands.add_parser("train", help="train a tracking system on one map")
    p.add_argument("--map", required=True, help="built-in map name or map JSON file")
    p.add_argument("--episodes", type=int, default=None, help="defaults to train.episodes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=methods, default=Method.csaot.name)
    p.add_argument("--config", default=None, help="JSON configuration document")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--plot", action="store_true", help="also write training_curve.html")
    p.set_defaults(handler=train_command)

    p = commands.add_parser("eval", help="evaluate a checkpoint with deterministic actions")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--map", required=True, help="map name, map JSON file, or 'all'")
    p.add_argument("--episodes", type=int, default=10, help="seeds 0..N-1 unless --seeds")
    p.add_argument("--seeds", type=parse_seeds, default=None, help="comma-separated seeds")
    p.add_argument("--method", choices=methods, default=None, help="expected method")
    p.add_argument("--config", default=None, help="configuration to rebuild the system with")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=eval_command)

    p = commands.add_parser("replay", help="render an episode trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--out", required=True, help="html file, or svg/png/... path prefix")
    p.set_defaults(handler=replay_command)

    p = commands.add_parser("maps", help="list the built-in maps")
    p.add_argument("action", choices=["list"])
    p.set_defaults(handler=maps_command)

    p = commands.add_parser("compare", help="train and evaluate both methods")
    p.add_argument("--map", required=True)
    p.add_argument("--seeds", type=parse_seeds, default=[0, 1, 2, 3, 4])
    p.add_argument("--episodes", type=int, default=None, help="training episodes per seed")
    p.add_argument("--eval-episodes", type=int, default=10)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=compare_command)
    return parser


def main(args: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        parsed = parser.parse_args(args)
    except SystemExit as err:
        return ExitCode.success if err.code == 0 else ExitCode.bad_arguments

    logging.basicConfig(level=logging.DEBUG if parsed.verbose else logging.INFO)
    _log.debug(f"args={parsed}")
    try:
        code = parsed.handler(parsed)
    except CommandError as err:
        _log.error(err.message)
        return notify_exit(err.code, _log.error)
    return notify_exit(code)


if __name__ == "__main__":
    sys.exit(main())
