"""Tournaments between agents, win-rate statistics and the revisit-ratio
instrumentation of the planners.

Games are independent and seeded: the board of game ``g`` and the seed of
the agent in seat ``s`` only depend on the run seed, on ``g // N`` and on
``s``. The focal agent rotates over the ``N`` seats of every board, so two
runs with the same seed reproduce the same games whatever the number of
workers, and a pairwise run with both sides swapped replays the same games
mirrored.
"""

import json
import logging
import math
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import (
    Any,
    Dict,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .agents import PlannerAgent, check_specs, play, seat_agents
from .exceptions import ConfigError
from .game import GameState
from .gridarena import ArenaConfig, generate_board
from .matrix import (
    MatrixGame,
    brute_force_q,
    load_matrix_game,
    uniform_policy,
)
from .planners import Planner, PlannerConfig

logger = logging.getLogger(__name__)

Z_95 = 1.96
OUTCOMES = ("win", "draw", "loss")
OUTCOME_OF = {1: "win", 0: "draw", -1: "loss"}
ENVIRONMENTS = ("gridarena", "gridarena2p", "matrix")
SMOOTHING_DECAY = 0.9


def derive_seed(*entropy: int) -> int:
    """32-bit seed derived from a tuple of non-negative integers."""
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


@dataclass(frozen=True)
class Environment:
    """Game played in a run: the 4-player arena, the 2-player arena or a
    matrix game."""

    name: str
    arena: Optional[ArenaConfig] = None
    matrix: Optional[MatrixGame] = None

    @classmethod
    def make(
        cls,
        name: str,
        profile: str = "fast",
        step_limit: Optional[int] = None,
        matrix_game: str = "rps",
    ) -> "Environment":
        """Build an environment from its name.

        Raises
        ------
        ConfigError
            When the name, the profile or the matrix game is unknown.
        """
        if name in ("gridarena", "gridarena2p"):
            players = 4 if name == "gridarena" else 2
            arena = ArenaConfig.profile(profile, num_players=players)
            if step_limit is not None:
                arena = replace(arena, step_limit=step_limit)
            return cls(name, arena=arena)
        if name == "matrix":
            return cls(name, matrix=load_matrix_game(matrix_game))
        raise ConfigError(
            reason=f"unknown environment {name!r}; use one of "
            f"{', '.join(ENVIRONMENTS)}"
        )

    @property
    def grid(self) -> bool:
        return self.arena is not None

    @property
    def num_players(self) -> int:
        if self.arena is not None:
            return self.arena.num_players
        assert self.matrix is not None
        return self.matrix.num_players

    def initial_state(self, seed: int) -> GameState:
        if self.arena is not None:
            return generate_board(seed, self.arena)
        assert self.matrix is not None
        return self.matrix.initial_state()


@dataclass(frozen=True)
class MatchRecord:
    """Outcome of one game.

    `focal` is the seat of the agent whose results are aggregated.
    `wall_clock` is kept out of the CSV rows so that seeded runs write
    identical files.
    """

    game: int
    env: str
    agents: Tuple[str, ...]
    seed: int
    rewards: Tuple[int, ...]
    steps: int
    focal: int = 0
    wall_clock: float = 0.0

    @property
    def outcomes(self) -> Tuple[str, ...]:
        return tuple(OUTCOME_OF[r] for r in self.rewards)

    def outcome(self, seat: Optional[int] = None) -> str:
        return self.outcomes[self.focal if seat is None else seat]

    def row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {
            "game": self.game,
            "env": self.env,
            "seed": self.seed,
            "steps": self.steps,
            "focal": self.focal,
        }
        for seat, (agent, outcome) in enumerate(
            zip(self.agents, self.outcomes)
        ):
            row[f"agent_{seat}"] = agent
            row[f"outcome_{seat}"] = outcome
        return row


class Interval(NamedTuple):
    estimate: float
    low: float
    high: float

    @property
    def half_width(self) -> float:
        return (self.high - self.low) / 2


def normal_interval(successes: float, n: int, z: float = Z_95) -> Interval:
    """Normal-approximation interval ``p +/- z * sqrt(p (1 - p) / n)``.

    Examples
    --------
    >>> round(normal_interval(200, 400).half_width, 4)
    0.049
    """
    if n < 1:
        raise ValueError("An interval needs at least one game.")
    p = successes / n
    h = z * math.sqrt(p * (1 - p) / n)
    return Interval(p, p - h, p + h)


def wilson_interval(successes: float, n: int, z: float = Z_95) -> Interval:
    """Wilson score interval; the estimate stays the observed rate."""
    if n < 1:
        raise ValueError("An interval needs at least one game.")
    p = successes / n
    denom = 1 + z**2 / n
    center = (p + z**2 / (2 * n)) / denom
    h = z * math.sqrt(p * (1 - p) / n + z**2 / (4 * n**2)) / denom
    return Interval(p, center - h, center + h)


INTERVALS = {"normal": normal_interval, "wilson": wilson_interval}


@dataclass(frozen=True)
class Aggregate:
    """Win, draw and loss counts of the focal agent over a set of games."""

    agent: str
    wins: int = 0
    draws: int = 0
    losses: int = 0
    method: str = "normal"

    @property
    def games(self) -> int:
        return self.wins + self.draws + self.losses

    @property
    def score(self) -> float:
        """Wins plus half the draws, per game."""
        return (self.wins + self.draws / 2) / self.games

    def rate(self, outcome: str) -> Interval:
        count = {"win": self.wins, "draw": self.draws, "loss": self.losses}
        return INTERVALS[self.method](count[outcome], self.games)

    def summary(self) -> Dict[str, Any]:
        results: Dict[str, Any] = {"agent": self.agent, "games": self.games}
        for outcome in OUTCOMES:
            interval = self.rate(outcome)
            results[outcome] = {
                "percent": round(100 * interval.estimate, 2),
                "ci": round(100 * interval.half_width, 2),
                "low": round(100 * interval.low, 2),
                "high": round(100 * interval.high, 2),
            }
        results["score"] = round(self.score, 4)
        score = INTERVALS[self.method](self.wins + self.draws / 2, self.games)
        results["score_ci"] = round(score.half_width, 4)
        return results


def aggregate(
    records: Iterable[MatchRecord], agent: str = "", method: str = "normal"
) -> Aggregate:
    """Reduce match records to the counts of their focal seats."""
    if method not in INTERVALS:
        raise ConfigError(
            reason=f"unknown interval {method!r}; use normal or wilson"
        )
    counts = {outcome: 0 for outcome in OUTCOMES}
    for record in records:
        counts[record.outcome()] += 1
        agent = agent or record.agents[record.focal]
    return Aggregate(
        agent, counts["win"], counts["draw"], counts["loss"], method
    )


@dataclass
class TournamentResult:
    records: List[MatchRecord]
    aggregate: Aggregate
    wall_clock: float = 0.0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.row() for r in self.records])

    def table(self) -> str:
        """Printable summary of the win, draw and loss rates."""
        rows = []
        for outcome in OUTCOMES:
            interval = self.aggregate.rate(outcome)
            rows.append(
                {
                    "outcome": outcome,
                    "percent": f"{100 * interval.estimate:.1f}",
                    "ci": f"+/- {100 * interval.half_width:.1f}",
                }
            )
        frame = pd.DataFrame(rows).set_index("outcome")
        return (
            f"{self.aggregate.agent} over {self.aggregate.games} games "
            f"(score {self.aggregate.score:.3f})\n{frame.to_string()}"
        )


def play_game(
    env: Environment,
    specs: Sequence[str],
    board_seed: int,
    agent_seeds: Sequence[int],
    game: int = 0,
    focal: int = 0,
    planner_overrides: Optional[Dict[str, Any]] = None,
    instrument: Optional[int] = None,
) -> Tuple[MatchRecord, List[Tuple[int, int, int, int]]]:
    """Play one game.

    Returns
    -------
    tuple
        The record of the game and the planning visit events
        ``(step, depth, visits, revisits)`` of the planner seated at
        `instrument`, if any.
    """
    start = time.perf_counter()
    agents = seat_agents(list(specs), list(agent_seeds), planner_overrides)
    state, steps = play(env.initial_state(board_seed), agents)
    events: List[Tuple[int, int, int, int]] = []
    if instrument is not None:
        agent = agents[instrument]
        if isinstance(agent, PlannerAgent):
            events = list(agent.visit_log.events())
    record = MatchRecord(
        game,
        env.name,
        tuple(specs),
        board_seed,
        tuple(state.rewards()),
        steps,
        focal,
        time.perf_counter() - start,
    )
    logger.debug(
        f"game {game}: {record.outcomes} after {steps} steps "
        f"({record.wall_clock:.2f}s)"
    )
    return record, events


def _opponent_list(
    opponents: Union[str, Sequence[str]], num_players: int
) -> List[str]:
    if isinstance(opponents, str):
        return [opponents] * (num_players - 1)
    if len(opponents) == 1:
        return list(opponents) * (num_players - 1)
    if len(opponents) != num_players - 1:
        raise ConfigError(
            reason=f"{len(opponents)} opponents for "
            f"{num_players - 1} seats"
        )
    return list(opponents)


def _check_games(games: int) -> None:
    if games < 1:
        raise ConfigError(reason="games must be at least 1")


def _check_workers(workers: int) -> None:
    if workers < 1:
        raise ConfigError(reason="workers must be at least 1")


def run_tournament(
    focal: str,
    opponents: Union[str, Sequence[str]],
    games: int,
    seed: int = 0,
    env: Optional[Environment] = None,
    workers: int = 1,
    planner_overrides: Optional[Dict[str, Any]] = None,
    method: str = "normal",
) -> TournamentResult:
    """Play `games` seeded games of a focal agent against opponents.

    Parameters
    ----------
    focal : str
        Specification of the evaluated agent.
    opponents : str or sequence of str
        One specification for every other seat, or a single one copied.
    games : int
        Number of games, at least 1.
    seed : int, optional
        Run seed, by default 0.
    env : Environment, optional
        Game played, by default the 4-player arena (fast profile).
    workers : int, optional
        Games played in parallel, by default 1.
    planner_overrides : dict, optional
        `PlannerConfig` fields applied to every planner agent.
    method : str, optional
        'normal' or 'wilson' confidence intervals.

    Returns
    -------
    TournamentResult
        Records in game order and the aggregate of the focal agent.

    Raises
    ------
    ConfigError
        When a parameter is out of range or an agent cannot be built.
    """
    _check_games(games)
    _check_workers(workers)
    env = env or Environment.make("gridarena")
    n = env.num_players
    others = _opponent_list(opponents, n)
    check_specs([focal] + others, env.grid, planner_overrides)

    tasks = []
    for g in range(games):
        board = g // n
        seat = g % n
        specs = list(others)
        specs.insert(seat, focal)
        tasks.append(
            delayed(play_game)(
                env,
                specs,
                derive_seed(seed, board),
                [derive_seed(seed, board, s) for s in range(n)],
                g,
                seat,
                planner_overrides,
            )
        )
    logger.info(
        f"{games} games of {focal} against {', '.join(others)} "
        f"on {env.name} with {workers} worker(s)"
    )
    start = time.perf_counter()
    outputs = Parallel(n_jobs=workers)(tasks)
    records = [record for record, _ in outputs]
    result = TournamentResult(
        records,
        aggregate(records, focal, method),
        time.perf_counter() - start,
    )
    logger.info(
        f"{focal}: {result.aggregate.wins} wins, {result.aggregate.draws} "
        f"draws, {result.aggregate.losses} losses"
    )
    return result


def run_pair(
    a: str,
    b: str,
    games: int,
    seed: int = 0,
    env: Optional[Environment] = None,
    workers: int = 1,
    planner_overrides: Optional[Dict[str, Any]] = None,
    method: str = "normal",
) -> TournamentResult:
    """Head-to-head games of `a` against `b` on a 2-player game, sides
    alternating between games."""
    env = env or Environment.make("gridarena2p")
    if env.num_players != 2:
        raise ConfigError(
            reason=f"pairwise matches need a 2-player game, {env.name} "
            f"has {env.num_players} seats"
        )
    return run_tournament(
        a, [b], games, seed, env, workers, planner_overrides, method
    )


RevisitEvents = Union[pd.DataFrame, Iterable[Tuple[int, int, int, int]]]


def revisit_ratio(
    events: RevisitEvents, decay: float = SMOOTHING_DECAY
) -> pd.DataFrame:
    """Share of the planning visits at every (step, depth) that reach a
    state already in the tree, with its exponentially smoothed series over
    the game steps of every depth.

    Parameters
    ----------
    events : DataFrame or iterable of tuple
        ``(step, depth, visits, revisits)`` events, optionally with
        ``planner`` and ``game`` columns.
    decay : float, optional
        Weight of the past in the smoothing, by default 0.9.

    Returns
    -------
    pandas.DataFrame
        The events with ``ratio`` and ``smoothed`` columns.
    """
    if isinstance(events, pd.DataFrame):
        frame = events.copy()
    else:
        frame = pd.DataFrame(
            list(events), columns=["step", "depth", "visits", "revisits"]
        )
    keys = [c for c in ("planner", "game") if c in frame.columns]
    frame = frame.sort_values(keys + ["depth", "step"])
    frame["ratio"] = frame["revisits"] / frame["visits"]
    frame["smoothed"] = frame.groupby(keys + ["depth"])["ratio"].transform(
        lambda s: s.ewm(alpha=1 - decay, adjust=False).mean()
    )
    return frame.sort_values(keys + ["step", "depth"]).reset_index(drop=True)


def mean_smoothed_ratio(frame: pd.DataFrame, depth: int) -> pd.Series:
    """Mean smoothed ratio of every planner at one depth."""
    at_depth = frame[frame["depth"] == depth]
    return at_depth.groupby("planner")["smoothed"].mean()


def run_revisits(
    planners: Sequence[str],
    games: int,
    seed: int = 0,
    env: Optional[Environment] = None,
    opponents: str = "rule",
    workers: int = 1,
    planner_overrides: Optional[Dict[str, Any]] = None,
) -> pd.DataFrame:
    """Play instrumented games with every planner in seat 0 and return
    their revisit ratios (see `revisit_ratio`)."""
    _check_games(games)
    _check_workers(workers)
    env = env or Environment.make("gridarena")
    n = env.num_players
    others = _opponent_list(opponents, n)
    check_specs(list(planners) + others, env.grid, planner_overrides)

    tasks = []
    labels = []
    for planner in planners:
        for g in range(games):
            labels.append((planner, g))
            tasks.append(
                delayed(play_game)(
                    env,
                    [planner] + others,
                    derive_seed(seed, g),
                    [derive_seed(seed, g, s) for s in range(n)],
                    g,
                    0,
                    planner_overrides,
                    0,
                )
            )
    outputs = Parallel(n_jobs=workers)(tasks)
    rows = [
        (planner, g) + event
        for (planner, g), (_, events) in zip(labels, outputs)
        for event in events
    ]
    frame = pd.DataFrame(
        rows,
        columns=["planner", "game", "step", "depth", "visits", "revisits"],
    )
    return revisit_ratio(frame)


def run_metadata(**extra: Any) -> Dict[str, Any]:
    """Metadata block of a JSON summary; the only place holding
    timestamps."""
    metadata = {
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "smoothing": f"ewma({SMOOTHING_DECAY})",
        "interval_z": Z_95,
    }
    metadata.update(extra)
    return metadata


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    logger.info(f"{len(frame)} rows written to {path}")


def write_summary(
    path: Union[str, Path], results: Any, metadata: Dict[str, Any]
) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(
            {"metadata": metadata, "results": results},
            f,
            indent=2,
            sort_keys=True,
        )
        f.write("\n")
    logger.info(f"summary written to {path}")


def run_matrix_check(
    game: MatrixGame,
    planner: str = "mcs-random",
    iterations: int = 10000,
    trials: int = 10,
    seed: int = 0,
    workers: int = 1,
) -> pd.DataFrame:
    """Compare seeded planning runs on a matrix game with the exact action
    values against uniformly random opponents.

    Returns
    -------
    pandas.DataFrame
        One row per (trial, player) with the planned action, the exact best
        response, whether they agree and the largest error of the root
        value estimates.
    """
    if trials < 1:
        raise ConfigError(reason="trials must be at least 1")
    config = PlannerConfig.from_spec(
        planner, iterations=iterations, depth=game.horizon
    )
    tasks = [
        delayed(_matrix_trial)(game, config.with_seed(derive_seed(seed, t)))
        for t in range(trials)
    ]
    outputs = Parallel(n_jobs=workers)(tasks)
    rows = []
    for t, (joint, means) in enumerate(outputs):
        for player in range(game.num_players):
            exact = brute_force_q(
                game,
                player,
                {
                    j: uniform_policy(game, j)
                    for j in range(game.num_players)
                    if j != player
                },
            )
            rows.append(
                {
                    "trial": t,
                    "player": player,
                    "action": joint[player],
                    "best_response": int(np.argmax(exact)),
                    "agree": joint[player] == int(np.argmax(exact)),
                    "max_error": float(np.abs(means[player] - exact).max()),
                }
            )
    return pd.DataFrame(rows)


def _matrix_trial(
    game: MatrixGame, config: PlannerConfig
) -> Tuple[Tuple[int, ...], List[np.ndarray]]:
    planner = Planner(config, game.num_players)
    joint = planner.plan(game.initial_state())
    root = planner.tree.root
    means = [root.bandits[p].means.copy() for p in range(game.num_players)]
    return joint, means
