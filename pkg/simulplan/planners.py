"""Self-play planners over a state-keyed search tree.

Every node holds one independent bandit per acting player. The tree is a
dictionary from canonical state key to node, so transpositions share
statistics and the tree survives from one game step to the next.

- Monte Carlo search (MCS) keeps bandits at the root only and rolls out
  uniformly random joint actions below it.
- MCTS descends with the bandits until it reaches a state absent from the
  tree, inserts it, then rolls out to the planning depth.
- Fixed-depth tree search (FDTS) descends with the bandits for exactly
  `depth` steps and inserts every new state it meets.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from .bandits import BANDITS, BanditInstance, make_bandit
from .exceptions import (
    ConfigError,
    TerminalStateError,
    UnknownAgentSpec,
    UnknownValueFunctionError,
)
from .game import (
    NO_OP,
    GameState,
    JointAction,
    KeyAudit,
    PlayerId,
    debug_enabled,
    random_joint_action,
)

logger = logging.getLogger(__name__)

ALGORITHMS = ("mcs", "mcts", "fdts")


def _reward_value(state: GameState) -> np.ndarray:
    if state.is_terminal:
        return np.asarray(state.rewards(), dtype=float)
    return np.asarray(state.heuristic_value(), dtype=float)


VALUE_FUNCTIONS: Dict[str, Callable[[GameState], np.ndarray]] = {
    "reward": _reward_value,
}


def evaluate_state(state: GameState, value_fn: str = "reward") -> np.ndarray:
    """Per-player value of a state.

    Terminal states are worth their rewards. Non-terminal states are worth
    the reward function of the game applied as it stands, e.g. +1 for the
    sole survivor and -1 for an eliminated player of the grid arena.

    Raises
    ------
    UnknownValueFunctionError
        When `value_fn` is not registered.
    """
    try:
        fn = VALUE_FUNCTIONS[value_fn]
    except KeyError:
        raise UnknownValueFunctionError(
            value_fn=value_fn, known=sorted(VALUE_FUNCTIONS)
        )
    return fn(state)


@dataclass(frozen=True)
class PlannerConfig:
    """Parameters of a planner.

    Parameters
    ----------
    algorithm : str
        'mcs', 'mcts' or 'fdts'.
    bandit : str
        'ts', 'ucb' or 'random'.
    c : float
        Exploration constant of UCB1.
    alpha, beta : float
        Beta prior of Thompson sampling.
    iterations : int
        Simulations per game step, at least 1.
    depth : int
        Planning depth k, at least 1.
    value_fn : str
        Value function evaluating the reached states.
    rollouts : bool
        Whether MCTS rolls out below the new node; when False it evaluates
        the new state directly.
    stochastic_final : bool
        Sample the played action instead of taking the best one.
    seed : int
        Seed of the planner random streams.
    """

    algorithm: str = "fdts"
    bandit: str = "ts"
    c: float = 2.0
    alpha: float = 1.0
    beta: float = 1.0
    iterations: int = 100
    depth: int = 20
    value_fn: str = "reward"
    rollouts: bool = True
    stochastic_final: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(
                reason=f"algorithm {self.algorithm!r} is not one of "
                f"{', '.join(ALGORITHMS)}"
            )
        if self.bandit not in BANDITS:
            raise ConfigError(
                reason=f"bandit {self.bandit!r} is not one of "
                f"{', '.join(BANDITS)}"
            )
        if self.iterations < 1:
            raise ConfigError(reason="iterations must be at least 1")
        if self.depth < 1:
            raise ConfigError(reason="depth must be at least 1")
        if self.c < 0 or self.alpha <= 0 or self.beta <= 0:
            raise ConfigError(
                reason="c must be non-negative, alpha and beta positive"
            )
        if self.value_fn not in VALUE_FUNCTIONS:
            raise ConfigError(
                reason=f"value function {self.value_fn!r} is not one of "
                f"{', '.join(sorted(VALUE_FUNCTIONS))}"
            )

    @property
    def name(self) -> str:
        """Short agent specification, e.g. 'fdts-ts'."""
        name = f"{self.algorithm}-{self.bandit}"
        if not self.rollouts:
            name += "-norollout"
        return name

    @classmethod
    def from_spec(cls, spec: str, **kwargs) -> "PlannerConfig":
        """Parse a specification such as 'mcts-ucb' or 'mcts-ts-norollout'.

        Raises
        ------
        UnknownAgentSpec
            When the specification does not name a planner.
        """
        parts = spec.lower().split("-")
        rollouts = True
        if len(parts) == 3 and parts[2] == "norollout":
            rollouts = False
            parts = parts[:2]
        if (
            len(parts) != 2
            or parts[0] not in ALGORITHMS
            or parts[1] not in BANDITS
        ):
            raise UnknownAgentSpec(spec=spec)
        return cls(
            algorithm=parts[0], bandit=parts[1], rollouts=rollouts, **kwargs
        )

    def with_seed(self, seed: int) -> "PlannerConfig":
        return replace(self, seed=seed)


class DecoupledNode:
    """Independent bandits of the acting players of one state.

    Parameters
    ----------
    state : GameState
        State of the node.
    config : PlannerConfig
        Bandit parameters.
    depth : int
        Depth below the root at which the node was inserted.
    """

    __slots__ = ("num_players", "bandits", "depth", "arrivals")

    def __init__(self, state: GameState, config: PlannerConfig, depth: int):
        self.num_players = state.num_players
        self.bandits: Dict[PlayerId, BanditInstance] = {}
        if not state.is_terminal:
            for player in state.players_to_act():
                self.bandits[player] = make_bandit(
                    config.bandit,
                    state.legal_actions(player),
                    config.c,
                    config.alpha,
                    config.beta,
                )
        self.depth = depth
        self.arrivals = 0

    def __repr__(self):
        return (
            f"DecoupledNode(depth={self.depth}, arrivals={self.arrivals}, "
            f"players={sorted(self.bandits)})"
        )

    def select(self, rngs: List[np.random.Generator]) -> JointAction:
        """Joint action drawn by the bandits, each player with its own
        random stream; non-acting players get the no-op slot."""
        joint = [NO_OP] * self.num_players
        for player, bandit in self.bandits.items():
            joint[player] = bandit.select(rngs[player])
        return tuple(joint)

    def update(self, joint: JointAction, value: np.ndarray) -> None:
        for player, bandit in self.bandits.items():
            bandit.update(joint[player], float(value[player]))

    def visits(self, player: PlayerId) -> int:
        return self.bandits[player].total

    def best_joint_action(
        self,
        stochastic: bool = False,
        rngs: Optional[List[np.random.Generator]] = None,
    ) -> JointAction:
        joint = [NO_OP] * self.num_players
        for player, bandit in self.bandits.items():
            rng = rngs[player] if rngs else None
            joint[player] = bandit.best_action(stochastic, rng)
        return tuple(joint)


class VisitLog:
    """Visits of the planner per (game step, depth below the root), split
    between states already in the tree and new ones."""

    def __init__(self):
        self._counts: Dict[Tuple[int, int], List[int]] = defaultdict(
            lambda: [0, 0]
        )

    def __len__(self):
        return len(self._counts)

    def record(self, step: int, depth: int, revisit: bool) -> None:
        counts = self._counts[(step, depth)]
        counts[0] += 1
        counts[1] += int(revisit)

    def events(self) -> Iterator[Tuple[int, int, int, int]]:
        """``(step, depth, visits, revisits)`` tuples, sorted."""
        for (step, depth), (visits, revisits) in sorted(self._counts.items()):
            yield step, depth, visits, revisits

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            list(self.events()),
            columns=["step", "depth", "visits", "revisits"],
        )


class SearchTree:
    """Map from canonical state key to `DecoupledNode`, with the random
    streams of the planner that owns it.

    Parameters
    ----------
    config : PlannerConfig
        Planner parameters; `config.seed` seeds one stream per player plus
        one for rollouts.
    num_players : int
        Number of seats of the game.
    audit : bool, optional
        Check every key against the full state serialization; by default
        enabled when the SIMULPLAN_DEBUG environment variable is set.
    """

    def __init__(
        self,
        config: PlannerConfig,
        num_players: int,
        audit: Optional[bool] = None,
    ):
        self.config = config
        self.num_players = num_players
        seeds = np.random.SeedSequence(config.seed).spawn(num_players + 1)
        self.player_rngs = [np.random.default_rng(s) for s in seeds[:-1]]
        self.rollout_rng = np.random.default_rng(seeds[-1])
        if audit is None:
            audit = debug_enabled()
        self.audit = KeyAudit() if audit else None
        self.nodes: Dict[int, DecoupledNode] = {}
        self.root_key: Optional[int] = None
        self.step = 0
        self.iterations = 0
        self.rollouts = 0
        self.simulated_steps = 0
        self.visit_log = VisitLog()

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, key: int):
        return key in self.nodes

    def key(self, state: GameState) -> int:
        if self.audit is not None:
            return self.audit.check(state)
        return state.canonical_key

    @property
    def root(self) -> DecoupledNode:
        if self.root_key is None:
            raise KeyError("The tree has no root yet.")
        return self.nodes[self.root_key]

    def insert(self, state: GameState, depth: int) -> DecoupledNode:
        key = self.key(state)
        node = self.nodes.get(key)
        if node is None:
            node = DecoupledNode(state, self.config, depth)
            self.nodes[key] = node
        return node

    def reset(self, root_state: GameState) -> None:
        """Forget every node and restart from `root_state`."""
        self.nodes.clear()
        self.root_key = None
        advance_root(self, root_state)

    def max_revisited_depth(self, min_arrivals: int = 2) -> int:
        """Deepest insertion depth of a node reached at least
        `min_arrivals` times."""
        depths = [
            n.depth for n in self.nodes.values() if n.arrivals >= min_arrivals
        ]
        return max(depths, default=0)

    def _transition(self, state: GameState, joint: JointAction) -> GameState:
        self.simulated_steps += 1
        return state.step(joint)

    def _rollout(self, state: GameState, depth: int) -> GameState:
        """Uniformly random play until the planning depth or a terminal
        state; every reached state is logged."""
        self.rollouts += 1
        while depth < self.config.depth and not state.is_terminal:
            joint = random_joint_action(state, self.rollout_rng)
            state = self._transition(state, joint)
            depth += 1
            self.visit_log.record(self.step, depth, self.key(state) in self)
        return state

    def _backup(
        self, path: List[Tuple[DecoupledNode, JointAction]], value: np.ndarray
    ) -> None:
        for node, joint in path:
            node.update(joint, value)
        self.iterations += 1

    def _final(self) -> JointAction:
        return self.root.best_joint_action(
            self.config.stochastic_final, self.player_rngs
        )


def _check_root(state: GameState) -> None:
    if state.is_terminal:
        raise TerminalStateError(operation="planning")


def advance_root(tree: SearchTree, new_state: GameState) -> None:
    """Move the root of the tree to the state actually reached in the game.

    Statistics gathered for that state while planning stay in place; a new
    node is inserted when the state was never visited.
    """
    node = tree.insert(new_state, 0)
    tree.root_key = tree.key(new_state)
    logger.debug(
        f"root moved to {tree.root_key:#018x} "
        f"({node.arrivals} earlier arrivals, {len(tree)} nodes)"
    )


def plan_mcs(
    tree: SearchTree, root_state: GameState, config: PlannerConfig
) -> JointAction:
    """Monte Carlo search from `root_state`.

    The root bandits choose the first joint action, uniformly random
    rollouts play the next ``depth - 1`` steps, and only the root bandits
    are updated. Root statistics are reset at every call.

    Raises
    ------
    TerminalStateError
        When `root_state` is terminal.
    """
    _check_root(root_state)
    tree.reset(root_state)
    root = tree.root
    for _ in range(config.iterations):
        root.arrivals += 1
        joint = root.select(tree.player_rngs)
        state = tree._transition(root_state, joint)
        tree.visit_log.record(tree.step, 1, tree.key(state) in tree)
        state = tree._rollout(state, 1)
        tree._backup([(root, joint)], evaluate_state(state, config.value_fn))
    logger.debug(f"mcs step {tree.step}: {config.iterations} iterations")
    tree.step += 1
    return tree._final()


def plan_mcts(
    tree: SearchTree, root_state: GameState, config: PlannerConfig
) -> JointAction:
    """MCTS from `root_state`.

    Each iteration descends with the bandits until a state absent from the
    tree, inserts that single state, and evaluates it after a uniformly
    random rollout to the planning depth. With rollouts, the new node picks
    the first rollout action with its bandits so it is updated as well.

    Raises
    ------
    TerminalStateError
        When `root_state` is terminal.
    """
    _check_root(root_state)
    if tree.root_key != tree.key(root_state):
        advance_root(tree, root_state)
    for _ in range(config.iterations):
        node = tree.root
        node.arrivals += 1
        state = root_state
        depth = 0
        path: List[Tuple[DecoupledNode, JointAction]] = []
        while True:
            joint = node.select(tree.player_rngs)
            path.append((node, joint))
            state = tree._transition(state, joint)
            depth += 1
            key = tree.key(state)
            known = key in tree
            tree.visit_log.record(tree.step, depth, known)
            if not known:
                node = tree.insert(state, depth)
                node.arrivals += 1
                if config.rollouts and not state.is_terminal:
                    if depth < config.depth:
                        joint = node.select(tree.player_rngs)
                        path.append((node, joint))
                        state = tree._transition(state, joint)
                        depth += 1
                        tree.visit_log.record(
                            tree.step, depth, tree.key(state) in tree
                        )
                    state = tree._rollout(state, depth)
                break
            node = tree.nodes[key]
            node.arrivals += 1
            if state.is_terminal or depth >= config.depth:
                break
        tree._backup(path, evaluate_state(state, config.value_fn))
    logger.debug(
        f"mcts step {tree.step}: {config.iterations} iterations, "
        f"{len(tree)} nodes"
    )
    tree.step += 1
    return tree._final()


def plan_fdts(
    tree: SearchTree, root_state: GameState, config: PlannerConfig
) -> JointAction:
    """Fixed-depth tree search from `root_state`.

    Each iteration applies the bandits exactly `depth` times, inserting
    every new state on the way, and stops early only at a terminal state.
    The reached state is evaluated and its value backed up into every node
    that selected an action on the path.

    Raises
    ------
    TerminalStateError
        When `root_state` is terminal.
    """
    _check_root(root_state)
    if tree.root_key != tree.key(root_state):
        advance_root(tree, root_state)
    for _ in range(config.iterations):
        node = tree.root
        node.arrivals += 1
        state = root_state
        path: List[Tuple[DecoupledNode, JointAction]] = []
        for depth in range(1, config.depth + 1):
            joint = node.select(tree.player_rngs)
            path.append((node, joint))
            state = tree._transition(state, joint)
            key = tree.key(state)
            tree.visit_log.record(tree.step, depth, key in tree)
            node = tree.insert(state, depth)
            node.arrivals += 1
            if state.is_terminal:
                break
        tree._backup(path, evaluate_state(state, config.value_fn))
    logger.debug(
        f"fdts step {tree.step}: {config.iterations} iterations, "
        f"{len(tree)} nodes"
    )
    tree.step += 1
    return tree._final()


PLANNERS = {"mcs": plan_mcs, "mcts": plan_mcts, "fdts": plan_fdts}


class Planner:
    """A planner playing one seat, or every seat, of an episode.

    The search tree persists between calls to `plan`, so statistics
    gathered at one step are reused at the next one (except for MCS, which
    plans from scratch).

    Parameters
    ----------
    config : PlannerConfig
        Planner parameters.
    num_players : int
        Number of seats of the game.
    audit : bool, optional
        Audit canonical keys for collisions.

    Examples
    --------
    >>> from simulplan.matrix import load_matrix_game
    >>> game = load_matrix_game("rps")
    >>> planner = Planner(PlannerConfig("mcs", "ts", iterations=50), 2)
    >>> len(planner.plan(game.initial_state()))
    2
    """

    def __init__(
        self,
        config: PlannerConfig,
        num_players: int,
        audit: Optional[bool] = None,
    ):
        self.config = config
        self.tree = SearchTree(config, num_players, audit)

    def __repr__(self):
        return f"Planner({self.config.name}, nodes={len(self.tree)})"

    def plan(self, state: GameState) -> JointAction:
        """Best joint action in `state` after the configured number of
        iterations."""
        return PLANNERS[self.config.algorithm](self.tree, state, self.config)

    def advance(self, new_state: GameState) -> None:
        if not new_state.is_terminal:
            advance_root(self.tree, new_state)

    @property
    def visit_log(self) -> VisitLog:
        return self.tree.visit_log
