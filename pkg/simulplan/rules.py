"""Rule-based baseline agent of the grid arena.

The agent follows a fixed priority list: flee bomb blasts, pick up an
adjacent power-up, lay a bomb when it hits a wooden wall or an enemy and a
retreat exists, walk toward the nearest wooden wall or enemy, else stop.
"""

import logging
from collections import deque
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DeadPlayerError
from .game import Action, PlayerId
from .gridarena import (
    BOMB,
    MOVES,
    NO_ITEM,
    PASSAGE,
    STOP,
    WOOD,
    Bomb,
    GridState,
    Position,
    blast_reach,
)

logger = logging.getLogger(__name__)

# tile -> (distance, first action of the path)
Paths = Dict[Position, Tuple[int, Optional[Action]]]


def threat_map(state: GridState) -> np.ndarray:
    """Tiles covered by a flame or by the blast of any bomb in play,
    whatever its fuse.
    """
    threat = state.flames > 0
    for bomb in state.bombs:
        for tile in blast_reach(state.tiles, bomb):
            threat[tile] = True
    return threat


def _neighbours(
    state: GridState, tile: Position, order: Sequence[Action]
) -> List[Tuple[Action, Position]]:
    n = state.size
    found = []
    for action in order:
        dr, dc = MOVES[action]
        r, c = tile[0] + dr, tile[1] + dc
        if 0 <= r < n and 0 <= c < n:
            found.append((action, (r, c)))
    return found


def _paths(
    state: GridState,
    start: Position,
    order: Sequence[Action],
    blocked: Callable[[Position], bool],
    max_distance: Optional[int] = None,
) -> Paths:
    """Breadth-first search over walkable tiles; insertion order of the
    result is the visiting order."""
    paths: Paths = {start: (0, None)}
    queue = deque([start])
    while queue:
        tile = queue.popleft()
        dist, first = paths[tile]
        if max_distance is not None and dist >= max_distance:
            continue
        for action, nxt in _neighbours(state, tile, order):
            if nxt in paths or blocked(nxt):
                continue
            paths[nxt] = (dist + 1, action if first is None else first)
            queue.append(nxt)
    return paths


def _walkable(state: GridState) -> Callable[[Position], bool]:
    bombs = state.bomb_positions
    danger = state.danger_map()

    def blocked(tile: Position) -> bool:
        return (
            state.tiles[tile] != PASSAGE
            or tile in bombs
            or bool(danger[tile])
        )

    return blocked


def _near_target(
    state: GridState, player: PlayerId, tile: Position
) -> bool:
    enemies = {
        a.position
        for i, a in enumerate(state.agents)
        if a.alive and i != player
    }
    for _, nxt in _neighbours(state, tile, tuple(MOVES)):
        if state.tiles[nxt] == WOOD or nxt in enemies:
            return True
    return False


def _bomb_is_useful(state: GridState, player: PlayerId) -> bool:
    agent = state.agents[player]
    blast = blast_reach(
        state.tiles,
        Bomb(agent.row, agent.col, player, 0, agent.strength),
    )
    enemies = {
        a.position
        for i, a in enumerate(state.agents)
        if a.alive and i != player
    }
    return _near_target(state, player, agent.position) or any(
        tile in enemies for tile in blast
    )


def _has_retreat(
    state: GridState, player: PlayerId, order: Sequence[Action]
) -> bool:
    """Whether a tile out of the reach of every bomb, the new one included,
    can be walked to before the new bomb goes off."""
    agent = state.agents[player]
    threat = threat_map(state)
    for tile in blast_reach(
        state.tiles, Bomb(agent.row, agent.col, player, 0, agent.strength)
    ):
        threat[tile] = True
    paths = _paths(
        state,
        agent.position,
        order,
        _walkable(state),
        max_distance=state.config.bomb_fuse - 1,
    )
    return any(not threat[tile] for tile in paths)


def rule_based_agent(
    state: GridState, player: PlayerId, seed: int = 0
) -> Action:
    """Action of the rule-based agent.

    Parameters
    ----------
    state : GridState
        Current state of the arena.
    player : int
        Seat of the agent.
    seed : int, optional
        Seed of the tie-breaking order between directions, by default 0.
        The same (state, seed) always gives the same action.

    Returns
    -------
    int
        One of the masked actions of `player`.

    Raises
    ------
    DeadPlayerError
        When the player has been eliminated.
    """
    agent = state.agents[player]
    if not agent.alive:
        raise DeadPlayerError(player=player)
    legal = state.masked_actions(player)
    rng = np.random.default_rng([seed, state.step_count, player])
    order = [int(a) for a in rng.permutation(list(MOVES))]
    position = agent.position
    threat = threat_map(state)
    blocked = _walkable(state)

    if threat[position]:
        paths = _paths(state, position, order, blocked)
        for tile, (_, first) in paths.items():
            if not threat[tile] and first in legal:
                return first
        for action in order:
            if action in legal:
                return action
        return legal[0]

    for action, tile in _neighbours(state, position, order):
        if (
            action in legal
            and state.tiles[tile] == PASSAGE
            and state.items[tile] != NO_ITEM
            and not threat[tile]
        ):
            return action

    if (
        BOMB in legal
        and _bomb_is_useful(state, player)
        and _has_retreat(state, player, order)
    ):
        return BOMB

    paths = _paths(
        state, position, order, lambda t: blocked(t) or bool(threat[t])
    )
    for tile, (_, first) in paths.items():
        if tile != position and _near_target(state, player, tile):
            if first in legal:
                return first
            break
    return STOP
