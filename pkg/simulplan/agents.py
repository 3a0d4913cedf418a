"""Agents seated in tournaments, built from short specification strings.

Specifications are ``rule``, ``random``, ``follower:<checkpoint>`` and
planner names such as ``fdts-ts``, ``mcts-ucb`` or ``mcts-ts-norollout``.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .exceptions import ConfigError, UnknownAgentSpec
from .follower import FollowerPolicy, follower_act, load_checkpoint
from .game import Action, GameState, PlayerId
from .gridarena import GridState, featurize
from .planners import Planner, PlannerConfig, VisitLog
from .rules import rule_based_agent

logger = logging.getLogger(__name__)


class Agent:
    """An agent playing one seat of a game."""

    name = "agent"
    needs_grid = False

    def __init__(self):
        self.seat: PlayerId = 0
        self.seed = 0

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"

    def reset(self, seat: PlayerId, seed: int, num_players: int) -> None:
        """Prepare for a new game."""
        self.seat = seat
        self.seed = seed

    def act(self, state: GameState) -> Action:
        raise NotImplementedError

    def observe(self, state: GameState) -> None:
        """See the state actually reached after a step."""


class RandomAgent(Agent):
    """Uniformly random legal action."""

    name = "random"

    def reset(self, seat: PlayerId, seed: int, num_players: int) -> None:
        super().reset(seat, seed, num_players)
        self.rng = np.random.default_rng(seed)

    def act(self, state: GameState) -> Action:
        actions = state.legal_actions(self.seat)
        return actions[int(self.rng.integers(len(actions)))]


class RuleBasedAgent(Agent):
    name = "rule"
    needs_grid = True

    def act(self, state: GameState) -> Action:
        return rule_based_agent(state, self.seat, self.seed)  # type: ignore


class PlannerAgent(Agent):
    """Plans the joint action of every seat and plays its own."""

    needs_grid = False

    def __init__(self, config: PlannerConfig):
        super().__init__()
        self.config = config
        self.name = config.name
        self.planner: Optional[Planner] = None

    def reset(self, seat: PlayerId, seed: int, num_players: int) -> None:
        super().reset(seat, seed, num_players)
        self.planner = Planner(self.config.with_seed(seed), num_players)

    def act(self, state: GameState) -> Action:
        assert self.planner is not None
        return self.planner.plan(state)[self.seat]

    def observe(self, state: GameState) -> None:
        assert self.planner is not None
        self.planner.advance(state)

    @property
    def visit_log(self) -> VisitLog:
        assert self.planner is not None
        return self.planner.visit_log


class FollowerAgent(Agent):
    """Acts from its partial observation with a trained follower."""

    needs_grid = True

    def __init__(self, policy: FollowerPolicy, name: str = "follower"):
        super().__init__()
        self.policy = policy
        self.name = name

    def act(self, state: GameState) -> Action:
        grid: GridState = state  # type: ignore[assignment]
        return follower_act(
            self.policy,
            featurize(grid, self.seat),
            grid.masked_actions(self.seat),
        )


def make_agent(
    spec: str, planner_overrides: Optional[Dict[str, Any]] = None
) -> Agent:
    """Build an agent from its specification.

    Parameters
    ----------
    spec : str
        Agent specification.
    planner_overrides : dict, optional
        `PlannerConfig` fields (iterations, depth, c, ...) applied to
        planner agents.

    Raises
    ------
    UnknownAgentSpec
        When the specification names no agent.
    CheckpointError
        When a follower checkpoint cannot be read.
    """
    spec = spec.strip()
    if spec == "rule":
        return RuleBasedAgent()
    if spec == "random":
        return RandomAgent()
    if spec.startswith("follower:"):
        path = Path(spec.split(":", 1)[1])
        return FollowerAgent(load_checkpoint(path), spec)
    return PlannerAgent(
        PlannerConfig.from_spec(spec, **(planner_overrides or {}))
    )


def check_specs(
    specs: List[str],
    grid: bool,
    planner_overrides: Optional[Dict[str, Any]] = None,
    path: str = "",
) -> None:
    """Validate specifications before any game is played.

    `path` names the configuration file the specifications come from in
    error messages.

    Raises
    ------
    UnknownAgentSpec
        When a specification names no agent.
    ConfigError
        When an agent cannot play the environment.
    """
    for spec in specs:
        if spec.startswith("follower:"):
            checkpoint = spec.split(":", 1)[1]
            if not Path(checkpoint).is_file():
                raise ConfigError(
                    path=path,
                    reason=f"checkpoint {checkpoint} not found",
                )
            needs_grid = True
        else:
            try:
                needs_grid = make_agent(spec, planner_overrides).needs_grid
            except UnknownAgentSpec as e:
                raise UnknownAgentSpec(spec=e.spec, path=path)
        if needs_grid and not grid:
            raise ConfigError(
                path=path, reason=f"agent {spec!r} only plays the grid arena"
            )


def seat_agents(
    specs: List[str],
    seeds: List[int],
    planner_overrides: Optional[Dict[str, Any]] = None,
) -> List[Agent]:
    agents = []
    for seat, (spec, seed) in enumerate(zip(specs, seeds)):
        agent = make_agent(spec, planner_overrides)
        agent.reset(seat, seed, len(specs))
        agents.append(agent)
    return agents


def play(state: GameState, agents: List[Agent]) -> Tuple[GameState, int]:
    """Play a game to the end; return the terminal state and its length."""
    steps = 0
    while not state.is_terminal:
        joint = [0] * state.num_players
        for seat in state.players_to_act():
            joint[seat] = agents[seat].act(state)
        state = state.step(joint)
        steps += 1
        for agent in agents:
            if not state.is_terminal:
                agent.observe(state)
    return state, steps
