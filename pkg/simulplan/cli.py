"""Command-line entry point.

Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or
configuration error.
"""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from .config import RunConfig, listify
from .exceptions import ConfigError, SimulplanError, UnknownAgentSpec
from .follower import (
    FollowerPolicy,
    ReplayBuffer,
    behavioral_clone,
    dagger_train,
    parameter_hash,
    save_checkpoint,
)
from .harness import (
    mean_smoothed_ratio,
    run_matrix_check,
    run_metadata,
    run_pair,
    run_revisits,
    run_tournament,
    write_csv,
    write_summary,
)
from .matrix import load_matrix_game
from .planners import PlannerConfig

logger = logging.getLogger(__name__)

# flag destination -> (config section, key)
FLAGS = {
    "seed": ("run", "seed"),
    "workers": ("run", "workers"),
    "output_dir": ("run", "output_dir"),
    "interval": ("run", "interval"),
    "env": ("env", "name"),
    "profile": ("env", "profile"),
    "step_limit": ("env", "step_limit"),
    "matrix_game": ("env", "matrix_game"),
    "iterations": ("planner", "iterations"),
    "depth": ("planner", "depth"),
    "c": ("planner", "c"),
    "alpha": ("planner", "alpha"),
    "beta": ("planner", "beta"),
    "seat0": ("tournament", "seat0"),
    "opponents": ("tournament", "opponents"),
    "a": ("pair", "a"),
    "b": ("pair", "b"),
    "episodes": ("follower", "episodes"),
    "mode": ("follower", "mode"),
    "grad_steps": ("follower", "grad_steps"),
    "batch_size": ("follower", "batch_size"),
    "learning_rate": ("follower", "learning_rate"),
    "hidden": ("follower", "hidden"),
    "oracle": ("follower", "oracle"),
    "checkpoint": ("follower", "checkpoint"),
    "export_buffer": ("follower", "export_buffer"),
    "eval_games": ("follower", "eval_games"),
    "planners": ("revisits", "planners"),
    "revisit_opponents": ("revisits", "opponents"),
    "matrix": ("matrix", "game"),
    "planner": ("matrix", "planner"),
    "trial_iterations": ("matrix", "iterations"),
    "trials": ("matrix", "trials"),
}

# the --games flag feeds the section of the running command
GAMES_SECTION = {
    "tournament": "tournament",
    "pair": "pair",
    "revisits": "revisits",
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int)
    common.add_argument(
        "--env", help="gridarena, gridarena2p or matrix environment"
    )
    common.add_argument("--matrix-game", help="bundled game or JSON file")
    common.add_argument("--profile", help="arena profile: full or fast")
    common.add_argument("--step-limit", type=int)
    common.add_argument("--iterations", type=int, help="simulations/step")
    common.add_argument("--depth", type=int, help="planning depth k")
    common.add_argument("--c", type=float, help="UCB1 exploration")
    common.add_argument("--alpha", type=float, help="Beta prior alpha")
    common.add_argument("--beta", type=float, help="Beta prior beta")
    common.add_argument("--workers", type=int)
    common.add_argument("--output-dir")
    common.add_argument("--interval", help="normal or wilson")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="simulplan",
        description="Planning for simultaneous-move games.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    tournament = commands.add_parser(
        "tournament", parents=[common], help="one agent against opponents"
    )
    tournament.add_argument("--seat0", help="evaluated agent")
    tournament.add_argument("--opponents", nargs="+")
    tournament.add_argument("--games", type=int)

    pair = commands.add_parser(
        "pair", parents=[common], help="head-to-head on a 2-player game"
    )
    pair.add_argument("--a")
    pair.add_argument("--b")
    pair.add_argument("--games", type=int)

    dagger = commands.add_parser(
        "dagger", parents=[common], help="train and evaluate a follower"
    )
    dagger.add_argument("--episodes", type=int)
    dagger.add_argument("--mode", help="dagger or bc")
    dagger.add_argument("--grad-steps", type=int)
    dagger.add_argument("--batch-size", type=int)
    dagger.add_argument("--learning-rate", type=float)
    dagger.add_argument("--hidden", type=int)
    dagger.add_argument("--oracle", help="oracle planner specification")
    dagger.add_argument("--checkpoint", help="checkpoint file name")
    dagger.add_argument("--export-buffer", help="replay buffer dump")
    dagger.add_argument("--eval-games", type=int)

    revisits = commands.add_parser(
        "revisits", parents=[common], help="revisit ratios of planners"
    )
    revisits.add_argument("--planners", nargs="+")
    revisits.add_argument("--opponents", dest="revisit_opponents")
    revisits.add_argument("--games", type=int)

    matrix = commands.add_parser(
        "matrix", parents=[common], help="planner vs exact matrix values"
    )
    matrix.add_argument("--game", dest="matrix")
    matrix.add_argument("--planner")
    matrix.add_argument("--trial-iterations", type=int)
    matrix.add_argument("--trials", type=int)
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    """Flag values by configuration section."""
    overrides: Dict[str, Dict[str, Any]] = {}
    for dest, (section, key) in FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides.setdefault(section, {})[key] = value
    games = getattr(args, "games", None)
    if games is not None:
        overrides.setdefault(GAMES_SECTION[args.command], {})["games"] = games
    return overrides


def _write_outputs(
    config: RunConfig,
    name: str,
    frame: Optional[pd.DataFrame],
    results: Any,
    wall_clock: float,
) -> None:
    out = config.output_dir
    if frame is not None:
        write_csv(frame, out / f"{name}.csv")
    metadata = run_metadata(
        command=name,
        seed=config.seed,
        wall_clock_seconds=round(wall_clock, 3),
        config=config.as_dict(),
    )
    write_summary(out / "summary.json", results, metadata)


def _planner_config(config: RunConfig, spec: str, **kwargs) -> PlannerConfig:
    """Parse a planner specification of the configuration.

    Raises
    ------
    UnknownAgentSpec
        Naming the configuration file when `spec` is no planner.
    """
    try:
        return PlannerConfig.from_spec(
            spec, **config.planner_overrides(), **kwargs
        )
    except UnknownAgentSpec:
        raise UnknownAgentSpec(spec=spec, path=config.path)


def cmd_tournament(config: RunConfig) -> int:
    """Focal agent against opponents; writes matches.csv and
    summary.json."""
    section = config["tournament"]
    env = config.environment()
    opponents = listify(section["opponents"])
    config.check_agents([section["seat0"]] + opponents, env.grid)
    result = run_tournament(
        section["seat0"],
        opponents,
        section["games"],
        config.seed,
        env,
        config.workers,
        config.planner_overrides(),
        config.interval,
    )
    _write_outputs(
        config,
        "matches",
        result.frame(),
        result.aggregate.summary(),
        result.wall_clock,
    )
    print(result.table())
    return 0


def cmd_pair(config: RunConfig) -> int:
    """Head-to-head between two agents with alternating sides."""
    section = config["pair"]
    name = config["env"]["name"]
    if name == "gridarena":
        logger.info("pairwise matches use the 2-player arena")
        name = "gridarena2p"
    env = config.environment(name)
    config.check_agents([section["a"], section["b"]], env.grid)
    result = run_pair(
        section["a"],
        section["b"],
        section["games"],
        config.seed,
        env,
        config.workers,
        config.planner_overrides(),
        config.interval,
    )
    results = result.aggregate.summary()
    results["opponent"] = section["b"]
    _write_outputs(
        config, "matches", result.frame(), results, result.wall_clock
    )
    print(f"{section['a']} against {section['b']}")
    print(result.table())
    return 0


def cmd_dagger(config: RunConfig) -> int:
    """Train a follower with DAgger or behavioral cloning, save it and
    evaluate it against the opponents of the follower section."""
    section = config["follower"]
    env = config.environment()
    if env.arena is None:
        raise ConfigError(
            path=config.path, reason="followers only play the grid arena"
        )
    opponents = listify(section["opponents"])
    config.check_agents(opponents)
    oracle = _planner_config(config, section["oracle"], seed=config.seed)
    settings = config.training_config()
    follower = FollowerPolicy.for_arena(
        env.arena, settings.hidden, config.seed
    )
    buffer = ReplayBuffer(settings.capacity)
    train = dagger_train if section["mode"] == "dagger" else behavioral_clone
    train(
        oracle,
        follower,
        section["episodes"],
        np.random.default_rng(config.seed),
        settings,
        env.arena,
        buffer,
    )
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    checkpoint = out / section["checkpoint"]
    save_checkpoint(follower, checkpoint)
    if section["export_buffer"]:
        buffer.export(out / section["export_buffer"])

    results: Dict[str, Any] = {
        "mode": section["mode"],
        "episodes": section["episodes"],
        "samples": len(buffer),
        "checkpoint": str(checkpoint),
        "parameter_hash": parameter_hash(follower),
    }
    frame = None
    wall_clock = 0.0
    if section["eval_games"] > 0:
        result = run_tournament(
            f"follower:{checkpoint}",
            opponents,
            section["eval_games"],
            config.seed,
            env,
            config.workers,
            config.planner_overrides(),
            config.interval,
        )
        results["evaluation"] = result.aggregate.summary()
        frame = result.frame()
        wall_clock = result.wall_clock
        print(result.table())
    _write_outputs(config, "matches", frame, results, wall_clock)
    print(f"checkpoint {checkpoint} ({results['parameter_hash'][:12]})")
    return 0


def cmd_revisits(config: RunConfig) -> int:
    """Instrumented games of every planner; writes revisits.csv."""
    section = config["revisits"]
    env = config.environment()
    planners = listify(section["planners"])
    for spec in planners:
        _planner_config(config, spec)
    config.check_agents([section["opponents"]], env.grid)
    frame = run_revisits(
        planners,
        section["games"],
        config.seed,
        env,
        section["opponents"],
        config.workers,
        config.planner_overrides(),
    )
    results = {}
    for depth in section["depths"]:
        means = mean_smoothed_ratio(frame, depth)
        results[str(depth)] = {k: round(v, 6) for k, v in means.items()}
    _write_outputs(config, "revisits", frame, results, 0.0)
    print(pd.DataFrame(results).to_string())
    return 0


def cmd_matrix(config: RunConfig) -> int:
    """Planner estimates against exact action values of a matrix game."""
    section = config["matrix"]
    _planner_config(config, section["planner"])
    game = load_matrix_game(section["game"])
    frame = run_matrix_check(
        game,
        section["planner"],
        section["iterations"],
        section["trials"],
        config.seed,
        config.workers,
    )
    results = {
        "game": game.name,
        "planner": section["planner"],
        "agreement": float(frame["agree"].mean()),
        "max_error": float(frame["max_error"].max()),
    }
    _write_outputs(config, "matrix", frame, results, 0.0)
    print(
        f"{section['planner']} on {game.name}: best response found in "
        f"{100 * results['agreement']:.1f}% of the runs, largest value "
        f"error {results['max_error']:.4f}"
    )
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "tournament": cmd_tournament,
    "pair": cmd_pair,
    "dagger": cmd_dagger,
    "revisits": cmd_revisits,
    "matrix": cmd_matrix,
}


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.INFO
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(message)s", force=True)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        config = RunConfig.load(args.config, overrides_from_args(args))
        return COMMANDS[args.command](config)
    except ConfigError as e:
        logger.error(e.msg)
        return 2
    except (SimulplanError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
