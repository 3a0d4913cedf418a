"""Simultaneous matrix games with exact action values.

Repeated games score the sign of the cumulative payoff, so every outcome
stays in {-1, 0, 1}.
"""

import itertools
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .datafile import load_file, read_json
from .exceptions import ConfigError, InvalidDistributionError
from .game import Action, GameState, JointAction, PlayerId

logger = logging.getLogger(__name__)

OpponentPolicy = Union[Sequence[float], Mapping[int, Sequence[float]]]


@dataclass(frozen=True, eq=False)
class MatrixGame:
    """Payoff tensor of a simultaneous game.

    Parameters
    ----------
    name : str
        Identifier of the game, part of the canonical key of its states.
    payoffs : numpy.ndarray
        Integer tensor of shape ``(|A_0|, ..., |A_{N-1}|, N)`` holding the
        reward of every player for every joint action.
    action_names : tuple of tuple of str
        Names of the actions of every player.
    horizon : int, optional
        Number of rounds, by default 1.

    Raises
    ------
    ValueError
        When the tensor is malformed, holds rewards outside of {-1, 0, 1}
        or is not zero-sum for two players.
    """

    name: str
    payoffs: np.ndarray
    action_names: Tuple[Tuple[str, ...], ...]
    horizon: int = 1

    def __post_init__(self):
        payoffs = np.asarray(self.payoffs, dtype=np.int64)
        num_players = payoffs.shape[-1]
        if payoffs.ndim != num_players + 1 or num_players < 2:
            raise ValueError(
                f"Payoff tensor of shape {payoffs.shape} does not hold one "
                "reward per player for every joint action."
            )
        if not np.isin(payoffs, (-1, 0, 1)).all():
            raise ValueError("Payoffs must be in {-1, 0, 1}.")
        if num_players == 2 and (payoffs[..., 0] != -payoffs[..., 1]).any():
            raise ValueError("Two-player games must be zero-sum.")
        if self.horizon < 1:
            raise ValueError(f"Horizon must be positive, got {self.horizon}.")
        for player, names in enumerate(self.action_names):
            if len(names) != payoffs.shape[player]:
                raise ValueError(
                    f"Player {player} has {payoffs.shape[player]} actions "
                    f"but {len(names)} names."
                )
        payoffs.flags.writeable = False
        object.__setattr__(self, "payoffs", payoffs)

    @property
    def num_players(self) -> int:
        return self.payoffs.shape[-1]

    @property
    def num_actions(self) -> Tuple[int, ...]:
        return self.payoffs.shape[:-1]

    def initial_state(self) -> "MatrixState":
        return MatrixState(self, 0, (0,) * self.num_players)

    @classmethod
    def from_dict(cls, name: str, data: Dict[str, Any]) -> "MatrixGame":
        """Build a game from its JSON description.

        Two-player zero-sum games give the row player's matrix under
        ``"payoff"``; other games give the full tensor under ``"payoffs"``.
        """
        horizon = int(data.get("horizon", 1))
        if "payoff" in data:
            row = np.asarray(data["payoff"], dtype=np.int64)
            payoffs = np.stack((row, -row), axis=-1)
            row_names = tuple(data["actions"])
            col_names = tuple(data.get("column_actions", row_names))
            names: Tuple[Tuple[str, ...], ...] = (row_names, col_names)
        else:
            payoffs = np.asarray(data["payoffs"], dtype=np.int64)
            actions = data["actions"]
            if actions and isinstance(actions[0], str):
                actions = [actions] * payoffs.shape[-1]
            names = tuple(tuple(a) for a in actions)
        return cls(name, payoffs, names, horizon)


def catalogue() -> List[str]:
    """Names of the bundled matrix games."""
    return sorted(load_file("matrix_games"))


def load_matrix_game(name_or_path: Union[str, Path]) -> MatrixGame:
    """Load a bundled matrix game by name, or a game from a JSON file.

    Parameters
    ----------
    name_or_path : str or Path
        Name of a bundled game (see `catalogue`) or path of a JSON file
        holding one game description, optionally under a ``"name"`` key.

    Raises
    ------
    ConfigError
        When the name is unknown or the file cannot be parsed.
    """
    path = Path(name_or_path)
    if path.suffix == ".json" or path.is_file():
        data = read_json(path)
        if not isinstance(data, dict):
            raise ConfigError(path=path, reason="expected a JSON object")
        try:
            return MatrixGame.from_dict(data.get("name", path.stem), data)
        except (KeyError, ValueError) as e:
            raise ConfigError(path=path, reason=str(e))

    games = load_file("matrix_games")
    if str(name_or_path) not in games:
        raise ConfigError(
            reason=(
                f"{repr(str(name_or_path))} is not a bundled matrix game. "
                f"Known games are {', '.join(sorted(games))}."
            )
        )
    return MatrixGame.from_dict(str(name_or_path), games[str(name_or_path)])


class MatrixState(GameState):
    """Round and cumulative scores of a (repeated) matrix game."""

    def __init__(
        self, game: MatrixGame, round_: int, scores: Tuple[int, ...]
    ):
        self.game = game
        self.round = round_
        self.scores = tuple(scores)
        self.num_players = game.num_players

    def __repr__(self):
        return (
            f"MatrixState(game={self.game.name!r}, round={self.round}, "
            f"scores={self.scores})"
        )

    @property
    def is_terminal(self) -> bool:
        return self.round >= self.game.horizon

    def players_to_act(self) -> Tuple[PlayerId, ...]:
        if self.is_terminal:
            return ()
        return tuple(range(self.num_players))

    def _legal_actions(self, player: PlayerId) -> List[Action]:
        return list(range(self.game.num_actions[player]))

    def _apply(self, joint: JointAction) -> "MatrixState":
        payoff = self.game.payoffs[joint]
        scores = tuple(int(s + p) for s, p in zip(self.scores, payoff))
        return MatrixState(self.game, self.round + 1, scores)

    def _rewards(self) -> Tuple[int, ...]:
        return tuple(int(np.sign(s)) for s in self.scores)

    def heuristic_value(self) -> np.ndarray:
        return np.sign(np.asarray(self.scores, dtype=float))

    def serialize(self) -> bytes:
        header = self.game.name.encode("utf-8")
        body = struct.pack(
            f"<q{self.num_players}q", self.round, *self.scores
        )
        return header + b"\x00" + body

    def observation(self, player: PlayerId) -> Tuple[int, Tuple[int, ...]]:
        return self.round, self.scores


def uniform_policy(game: MatrixGame, player: PlayerId) -> np.ndarray:
    """Uniform distribution over the actions of a player."""
    n = game.num_actions[player]
    return np.full(n, 1.0 / n)


def _check_policies(
    game: MatrixGame, player: PlayerId, opponent_policy: OpponentPolicy
) -> Dict[int, np.ndarray]:
    opponents = [j for j in range(game.num_players) if j != player]
    if isinstance(opponent_policy, Mapping):
        raw = dict(opponent_policy)
    elif len(opponents) == 1:
        raw = {opponents[0]: opponent_policy}
    else:
        raise InvalidDistributionError(
            player=opponents,
            reason="one distribution per opponent is required",
        )

    policies = {}
    for j in opponents:
        if j not in raw:
            raise InvalidDistributionError(player=j, reason="missing")
        p = np.asarray(raw[j], dtype=float)
        if p.shape != (game.num_actions[j],):
            raise InvalidDistributionError(
                player=j,
                reason=(
                    f"expected {game.num_actions[j]} probabilities, "
                    f"got shape {p.shape}"
                ),
            )
        if (p < 0).any() or not np.isfinite(p).all():
            raise InvalidDistributionError(
                player=j, reason="probabilities must be non-negative"
            )
        if abs(p.sum() - 1.0) > 1e-9:
            raise InvalidDistributionError(
                player=j, reason=f"probabilities sum to {p.sum()}"
            )
        policies[j] = p
    return policies


def brute_force_q(
    game: MatrixGame,
    player: PlayerId,
    opponent_policy: OpponentPolicy,
) -> np.ndarray:
    """Exact value of every action of a player against a fixed opponent
    policy.

    The first round enumerates every joint action weighted by the opponent
    distribution. Later rounds of a repeated game are played uniformly at
    random by everyone, which is what a Monte Carlo search with uniform
    rollouts estimates.

    Parameters
    ----------
    game : MatrixGame
        The game.
    player : int
        Seat whose action values are computed.
    opponent_policy : sequence of float or mapping of int to sequence
        Distribution of the single opponent of a two-player game, or one
        distribution per opponent seat.

    Returns
    -------
    numpy.ndarray
        One value in [-1, 1] per action of `player`.

    Raises
    ------
    InvalidDistributionError
        When a distribution is missing, has the wrong length, holds negative
        entries or does not sum to 1.

    Examples
    --------
    >>> rps = load_matrix_game("rps")
    >>> brute_force_q(rps, 0, [1.0, 0.0, 0.0])
    array([ 0.,  1., -1.])
    """
    if not 0 <= player < game.num_players:
        raise ValueError(f"{player} is not a seat of {game.name}.")
    policies = _check_policies(game, player, opponent_policy)
    memo: Dict[Tuple[int, Tuple[int, ...]], np.ndarray] = {}

    def continuation(round_: int, scores: Tuple[int, ...]) -> np.ndarray:
        if round_ >= game.horizon:
            return np.sign(np.asarray(scores, dtype=float))
        cached = memo.get((round_, scores))
        if cached is not None:
            return cached
        total = np.zeros(game.num_players)
        joints = list(np.ndindex(*game.num_actions))
        for joint in joints:
            payoff = game.payoffs[joint]
            nxt = tuple(int(s + p) for s, p in zip(scores, payoff))
            total += continuation(round_ + 1, nxt)
        memo[(round_, scores)] = total / len(joints)
        return memo[(round_, scores)]

    q = np.zeros(game.num_actions[player])
    ranges = [range(n) for n in game.num_actions]
    for joint in itertools.product(*ranges):
        weight = 1.0
        for j, p in policies.items():
            weight *= p[joint[j]]
        if weight == 0.0:
            continue
        scores = tuple(int(s) for s in game.payoffs[joint])
        q[joint[player]] += weight * continuation(1, scores)[player]
    return q


def best_response(
    game: MatrixGame,
    player: PlayerId,
    opponent_policy: Optional[OpponentPolicy] = None,
) -> Action:
    """Lowest action id maximising `brute_force_q`; the opponents play
    uniformly when no policy is given.
    """
    if opponent_policy is None:
        opponent_policy = {
            j: uniform_policy(game, j)
            for j in range(game.num_players)
            if j != player
        }
    q = brute_force_q(game, player, opponent_policy)
    return int(np.argmax(q))
