"""Contract of the simultaneous-move games consumed by the planners.

A game state is an immutable value: `step` returns a new state and never
touches its input, so planners can branch from any state freely.
"""

import hashlib
import logging
import os
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from .exceptions import (
    IllegalActionError,
    KeyCollisionError,
    TerminalStateError,
)

logger = logging.getLogger(__name__)

PlayerId = int
Action = int
JointAction = Tuple[Action, ...]

# action slot of a player that does not act in a state
NO_OP: Action = 0

REWARDS = (-1, 0, 1)


def key_of(data: bytes) -> int:
    """64-bit key of a canonical byte serialization."""
    digest = hashlib.blake2b(data, digest_size=8).digest()
    return int.from_bytes(digest, "little")


class GameState(ABC):
    """State of a simultaneous-move game played by `num_players` players.

    Subclasses implement the game rules through the underscored hooks;
    the public methods check the preconditions of the game contract.

    Attributes
    ----------
    num_players : int
        Number of seats of the game, at least 2.
    """

    num_players: int

    @property
    @abstractmethod
    def is_terminal(self) -> bool:
        """Whether the game is over."""

    @abstractmethod
    def players_to_act(self) -> Tuple[PlayerId, ...]:
        """Players who choose an action in this state, in seat order."""

    @abstractmethod
    def _legal_actions(self, player: PlayerId) -> List[Action]: ...

    @abstractmethod
    def _apply(self, joint: JointAction) -> "GameState": ...

    @abstractmethod
    def _rewards(self) -> Tuple[int, ...]: ...

    @abstractmethod
    def serialize(self) -> bytes:
        """Canonical byte serialization of everything that influences the
        legal actions and the transitions of the state.
        """

    @abstractmethod
    def observation(self, player: PlayerId) -> Any:
        """What `player` perceives of the state."""

    def heuristic_value(self) -> np.ndarray:
        """Per-player value of a non-terminal state, in [-1, 1]."""
        return np.zeros(self.num_players)

    @property
    def canonical_key(self) -> int:
        """64-bit hash of the canonical serialization."""
        key = self.__dict__.get("_key")
        if key is None:
            key = key_of(self.serialize())
            self.__dict__["_key"] = key
        return key

    def legal_actions(self, player: PlayerId) -> List[Action]:
        """Get the actions available to a player.

        Parameters
        ----------
        player : int
            Seat of the player.

        Returns
        -------
        list of int
            Non-empty list of action ids, sorted.

        Raises
        ------
        TerminalStateError
            When the state is terminal.
        """
        if self.is_terminal:
            raise TerminalStateError(operation="legal_actions")
        return self._legal_actions(player)

    def step(self, joint: Sequence[Action]) -> "GameState":
        """Apply a joint action and get the successor state.

        Parameters
        ----------
        joint : sequence of int
            One action per seat. Slots of players that do not act are
            ignored.

        Returns
        -------
        GameState
            The successor; `self` is left unchanged.

        Raises
        ------
        TerminalStateError
            When the state is terminal.
        IllegalActionError
            When an acting player plays an action outside of its legal set.
        """
        if self.is_terminal:
            raise TerminalStateError(operation="step")
        if len(joint) != self.num_players:
            raise ValueError(
                f"Expected {self.num_players} actions, got {len(joint)}."
            )
        for player in self.players_to_act():
            legal = self._legal_actions(player)
            if joint[player] not in legal:
                raise IllegalActionError(
                    player=player, action=joint[player], legal=legal
                )
        return self._apply(tuple(int(a) for a in joint))

    def terminal_reward(self, player: PlayerId) -> int:
        """Get the outcome of a finished game for a player.

        Returns
        -------
        int
            1 for a win, 0 for a draw and -1 for a loss.

        Raises
        ------
        TerminalStateError
            When the state is not terminal.
        """
        return self.rewards()[player]

    def rewards(self) -> Tuple[int, ...]:
        """Outcome of a finished game for every player."""
        if not self.is_terminal:
            raise TerminalStateError(
                operation="terminal_reward", terminal=False
            )
        return self._rewards()

    def __eq__(self, other):
        return (
            isinstance(other, GameState)
            and self.serialize() == other.serialize()
        )

    def __hash__(self):
        return self.canonical_key


def legal_actions(state: GameState, player: PlayerId) -> List[Action]:
    """Legal actions of `player` in `state`."""
    return state.legal_actions(player)


def step(state: GameState, joint: Sequence[Action]) -> GameState:
    """Successor of `state` under `joint`."""
    return state.step(joint)


def terminal_reward(state: GameState, player: PlayerId) -> int:
    """Reward of `player` in the terminal `state`."""
    return state.terminal_reward(player)


def random_joint_action(
    state: GameState, rng: np.random.Generator
) -> JointAction:
    """Uniformly random legal action for every acting player."""
    joint = [NO_OP] * state.num_players
    for player in state.players_to_act():
        actions = state.legal_actions(player)
        joint[player] = actions[int(rng.integers(len(actions)))]
    return tuple(joint)


def debug_enabled() -> bool:
    return os.environ.get("SIMULPLAN_DEBUG", "") not in ("", "0")


class KeyAudit:
    """Collision audit of canonical keys.

    Keeps the full serialization behind every key it has seen and checks
    that a key is never shared by two different serializations.
    """

    def __init__(self):
        self._seen: Dict[int, bytes] = {}

    def __len__(self):
        return len(self._seen)

    def check(self, state: GameState) -> int:
        """Record the serialization of a state and return its key.

        Raises
        ------
        KeyCollisionError
            When another serialization already holds the same key.
        """
        data = state.serialize()
        key = state.canonical_key
        known = self._seen.setdefault(key, data)
        if known != data:
            logger.error(f"key collision on {key:#018x}")
            raise KeyCollisionError(key=key)
        return key
