"""Free-for-all bomb arena on a square grid.

Agents start in the corners, lay bombs that explode after a fuse and
destroy wooden walls, some of which hide power-ups. The last agent alive
wins; agents still alive at the step limit draw.

Resolution order of one tick: fuses burn down, bombs at fuse 0 explode
(chain reactions included), flames spawn, agents move simultaneously,
bombs are laid, agents standing in flames die, power-ups are collected,
flames burn down, and the step counter increases.
"""

import json
import logging
import struct
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from typing import (
    Dict,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import numpy as np

from .exceptions import ConfigError, DeadPlayerError
from .game import Action, GameState, JointAction, PlayerId

logger = logging.getLogger(__name__)

PASSAGE, RIGID, WOOD = 0, 1, 2
NO_ITEM, EXTRA_BOMB, INCR_RANGE = 0, 1, 2

STOP, UP, DOWN, LEFT, RIGHT, BOMB = range(6)
ACTIONS = (STOP, UP, DOWN, LEFT, RIGHT, BOMB)
ACTION_NAMES = ("Stop", "Up", "Down", "Left", "Right", "Bomb")
MOVES = {UP: (-1, 0), DOWN: (1, 0), LEFT: (0, -1), RIGHT: (0, 1)}

# feature planes of `featurize`
PLANE_RIGID = 0
PLANE_WOOD = 1
PLANE_BOMB = 2
PLANE_FLAME = 3
PLANE_EXTRA_BOMB = 4
PLANE_INCR_RANGE = 5
PLANE_SELF = 6
PLANE_ENEMIES = (7, 8, 9)
PLANE_BLAST = 10
PLANE_LIFETIME = 11
PLANE_AMMO = 12
PLANE_RANGE = 13
NUM_PLANES = 14

Position = Tuple[int, int]


class Bomb(NamedTuple):
    row: int
    col: int
    owner: int
    fuse: int
    strength: int


class Agent(NamedTuple):
    row: int
    col: int
    alive: bool
    capacity: int
    strength: int
    death_step: int = -1

    @property
    def position(self) -> Position:
        return self.row, self.col


@dataclass(frozen=True)
class ArenaConfig:
    """Parameters of the arena.

    Parameters
    ----------
    size : int, optional
        Side of the square board, by default 11.
    num_players : int, optional
        2 (diagonal corners) or 4, by default 4.
    step_limit : int, optional
        Number of ticks after which the game is a draw, by default 800.
    bomb_fuse : int, optional
        Ticks between laying a bomb and its explosion, by default 9.
    flame_life : int, optional
        Ticks a flame stays on its tile, by default 2.
    blast_strength : int, optional
        Initial blast strength of the agents, by default 2. A blast covers
        ``strength - 1`` tiles in every direction.
    bomb_capacity : int, optional
        Initial number of bombs an agent can have in play, by default 1.
    rigid_ratio, wood_ratio : float, optional
        Probabilities that a random tile is a rigid or a wooden wall.
    powerup_ratio : float, optional
        Fraction of wooden walls hiding a power-up, by default 0.5.
    max_powerups : int, optional
        Number of collected power-ups of one kind that saturates the
        corresponding feature plane, by default 10.
    """

    size: int = 11
    num_players: int = 4
    step_limit: int = 800
    bomb_fuse: int = 9
    flame_life: int = 2
    blast_strength: int = 2
    bomb_capacity: int = 1
    rigid_ratio: float = 0.3
    wood_ratio: float = 0.35
    powerup_ratio: float = 0.5
    max_powerups: int = 10

    PROFILES = {"full": 800, "fast": 200}

    def __post_init__(self):
        checks = {
            "size": self.size >= 5,
            "num_players": self.num_players in (2, 4),
            "step_limit": self.step_limit >= 1,
            "bomb_fuse": self.bomb_fuse >= 1,
            "flame_life": self.flame_life >= 1,
            "blast_strength": self.blast_strength >= 1,
            "bomb_capacity": self.bomb_capacity >= 1,
            "rigid_ratio": 0 <= self.rigid_ratio <= 1,
            "wood_ratio": 0 <= self.wood_ratio <= 1 - self.rigid_ratio,
            "powerup_ratio": 0 <= self.powerup_ratio <= 1,
            "max_powerups": self.max_powerups >= 1,
        }
        for name, ok in checks.items():
            if not ok:
                raise ConfigError(
                    reason=f"arena {name}={getattr(self, name)!r} is out of "
                    "range"
                )

    @classmethod
    def profile(cls, name: str, **kwargs) -> "ArenaConfig":
        """Arena with the step limit of a named profile ('full' or
        'fast')."""
        if name not in cls.PROFILES:
            raise ConfigError(
                reason=f"unknown arena profile {name!r}; use "
                f"{' or '.join(cls.PROFILES)}"
            )
        return cls(step_limit=cls.PROFILES[name], **kwargs)


def spawn_points(size: int, num_players: int) -> List[Position]:
    lo, hi = 1, size - 2
    if num_players == 2:
        return [(lo, lo), (hi, hi)]
    return [(lo, lo), (hi, lo), (hi, hi), (lo, hi)]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def blast_reach(tiles: np.ndarray, bomb: Bomb) -> List[Position]:
    """Tiles covered by the blast of one bomb. Rigid walls stop the blast;
    wooden walls are covered and stop it."""
    n = tiles.shape[0]
    covered = [(bomb.row, bomb.col)]
    for dr, dc in MOVES.values():
        for dist in range(1, bomb.strength):
            r, c = bomb.row + dr * dist, bomb.col + dc * dist
            if not (0 <= r < n and 0 <= c < n) or tiles[r, c] == RIGID:
                break
            covered.append((r, c))
            if tiles[r, c] == WOOD:
                break
    return covered


def _explode(
    tiles: np.ndarray, bombs: Sequence[Bomb]
) -> Tuple[Set[Position], Set[int], Set[Position]]:
    """Explosions of the bombs whose fuse is out, with chain reactions.

    Returns the flame tiles, the indices of the exploded bombs and the
    wooden walls destroyed.
    """
    at = {(b.row, b.col): i for i, b in enumerate(bombs)}
    queue = [i for i, b in enumerate(bombs) if b.fuse <= 0]
    exploded = set(queue)
    flames: Set[Position] = set()
    burnt: Set[Position] = set()
    while queue:
        bomb = bombs[queue.pop()]
        for tile in blast_reach(tiles, bomb):
            flames.add(tile)
            if tiles[tile] == WOOD:
                burnt.add(tile)
            j = at.get(tile)
            if j is not None and j not in exploded:
                exploded.add(j)
                queue.append(j)
    return flames, exploded, burnt


class GridState(GameState):
    """Immutable state of the arena.

    Parameters
    ----------
    config : ArenaConfig
        Rules of the game.
    tiles : numpy.ndarray
        Tile kinds (PASSAGE, RIGID or WOOD).
    items : numpy.ndarray
        Power-ups; under a wooden wall they are hidden.
    flames : numpy.ndarray
        Remaining ticks of the flame on every tile, 0 when none.
    bombs : iterable of Bomb
        Bombs in play.
    agents : sequence of Agent
        One agent per seat.
    step_count : int
        Ticks played so far.
    """

    def __init__(
        self,
        config: ArenaConfig,
        tiles: np.ndarray,
        items: np.ndarray,
        flames: np.ndarray,
        bombs: Iterable[Bomb],
        agents: Sequence[Agent],
        step_count: int,
    ):
        self.config = config
        self.num_players = config.num_players
        self.tiles = _readonly(np.asarray(tiles, dtype=np.int8))
        self.items = _readonly(np.asarray(items, dtype=np.int8))
        self.flames = _readonly(np.asarray(flames, dtype=np.int8))
        self.bombs = tuple(sorted(Bomb(*b) for b in bombs))
        self.agents = tuple(Agent(*a) for a in agents)
        self.step_count = step_count
        self._masks: Dict[int, List[Action]] = {}
        if len(self.agents) != self.num_players:
            raise ValueError(
                f"{len(self.agents)} agents for {self.num_players} seats."
            )

    def __repr__(self):
        alive = [i for i in range(self.num_players) if self.is_alive(i)]
        return (
            f"GridState(step={self.step_count}, alive={alive}, "
            f"bombs={len(self.bombs)})"
        )

    @property
    def size(self) -> int:
        return self.config.size

    @property
    def bomb_positions(self) -> Set[Position]:
        return {(b.row, b.col) for b in self.bombs}

    def is_alive(self, player: PlayerId) -> bool:
        return bool(self.agents[player].alive)

    def alive_players(self) -> Tuple[PlayerId, ...]:
        return tuple(i for i, a in enumerate(self.agents) if a.alive)

    def bombs_in_play(self, player: PlayerId) -> int:
        return sum(1 for b in self.bombs if b.owner == player)

    @property
    def is_terminal(self) -> bool:
        return (
            len(self.alive_players()) <= 1
            or self.step_count >= self.config.step_limit
        )

    def players_to_act(self) -> Tuple[PlayerId, ...]:
        if self.is_terminal:
            return ()
        return self.alive_players()

    def _legal_actions(self, player: PlayerId) -> List[Action]:
        return self.masked_actions(player)

    def danger_map(self) -> np.ndarray:
        """Tiles that will hold a flame when deaths are checked on the next
        tick: current flames plus the blasts of the bombs about to go off.
        """
        danger = self.__dict__.get("_danger")
        if danger is None:
            burning = [b._replace(fuse=b.fuse - 1) for b in self.bombs]
            flame_tiles, _, _ = _explode(self.tiles, burning)
            danger = self.flames > 0
            for tile in flame_tiles:
                danger[tile] = True
            self.__dict__["_danger"] = _readonly(danger)
        return danger

    def masked_actions(self, player: PlayerId) -> List[Action]:
        """Actions of a player that do not lead to an immediate death.

        Moves into walls, bombs and tiles holding a flame on the next tick
        are removed, as is Bomb when every bomb of the agent is in play or
        a bomb already lies on its tile. Stop is removed only when staying
        is lethal and a move is safe.

        Raises
        ------
        DeadPlayerError
            When the player has been eliminated.
        """
        if player in self._masks:
            return list(self._masks[player])
        agent = self.agents[player]
        if not agent.alive:
            raise DeadPlayerError(player=player)
        danger = self.danger_map()
        bombs = self.bomb_positions
        n = self.size

        safe_moves = []
        for action, (dr, dc) in MOVES.items():
            r, c = agent.row + dr, agent.col + dc
            if not (0 <= r < n and 0 <= c < n):
                continue
            if self.tiles[r, c] != PASSAGE or (r, c) in bombs:
                continue
            if danger[r, c]:
                continue
            safe_moves.append(action)

        stay_lethal = bool(danger[agent.position])
        actions = []
        if not stay_lethal or not safe_moves:
            actions.append(STOP)
        actions.extend(safe_moves)
        if (
            not stay_lethal
            and self.bombs_in_play(player) < agent.capacity
            and agent.position not in bombs
        ):
            actions.append(BOMB)
        self._masks[player] = sorted(actions)
        return list(self._masks[player])

    def _apply(self, joint: JointAction) -> "GridState":
        cfg = self.config
        n = self.size
        burning = [b._replace(fuse=b.fuse - 1) for b in self.bombs]
        flame_tiles, exploded, burnt = _explode(self.tiles, burning)

        tiles = self.tiles.copy()
        items = self.items.copy()
        flames = self.flames.copy()
        for tile in flame_tiles:
            if tile in burnt:
                tiles[tile] = PASSAGE
            elif tiles[tile] == PASSAGE:
                items[tile] = NO_ITEM
            flames[tile] = cfg.flame_life
        bombs = [b for i, b in enumerate(burning) if i not in exploded]

        # moves are checked against the board the players observed
        blocking = self.bomb_positions
        origin: Dict[int, Position] = {}
        target: Dict[int, Position] = {}
        for i in self.alive_players():
            agent = self.agents[i]
            origin[i] = target[i] = agent.position
            if joint[i] in MOVES:
                dr, dc = MOVES[joint[i]]
                r, c = agent.row + dr, agent.col + dc
                if (
                    0 <= r < n
                    and 0 <= c < n
                    and self.tiles[r, c] == PASSAGE
                    and (r, c) not in blocking
                ):
                    target[i] = (r, c)

        while True:
            counts = Counter(target.values())
            bounced = {
                i
                for i in target
                if target[i] != origin[i] and counts[target[i]] > 1
            }
            for i in target:
                for j in target:
                    if (
                        i < j
                        and target[i] == origin[j]
                        and target[j] == origin[i]
                        and target[i] != origin[i]
                    ):
                        bounced.update((i, j))
            if not bounced:
                break
            for i in bounced:
                target[i] = origin[i]

        agents = list(self.agents)
        for i, (r, c) in target.items():
            agents[i] = agents[i]._replace(row=r, col=c)

        occupied = {(b.row, b.col) for b in bombs}
        for i in sorted(target):
            agent = agents[i]
            in_play = sum(1 for b in bombs if b.owner == i)
            if (
                joint[i] == BOMB
                and in_play < agent.capacity
                and agent.position not in occupied
            ):
                bomb = Bomb(
                    agent.row, agent.col, i, cfg.bomb_fuse, agent.strength
                )
                bombs.append(bomb)
                occupied.add(agent.position)

        step_count = self.step_count + 1
        for i in target:
            if flames[agents[i].position] > 0:
                agents[i] = agents[i]._replace(
                    alive=False, death_step=step_count
                )

        for i in target:
            agent = agents[i]
            item = items[agent.position]
            if not agent.alive or item == NO_ITEM:
                continue
            if item == EXTRA_BOMB:
                agents[i] = agent._replace(capacity=agent.capacity + 1)
            else:
                agents[i] = agent._replace(strength=agent.strength + 1)
            items[agent.position] = NO_ITEM

        np.subtract(flames, 1, out=flames, where=flames > 0)
        return GridState(cfg, tiles, items, flames, bombs, agents, step_count)

    def _rewards(self) -> Tuple[int, ...]:
        alive = self.alive_players()
        if len(alive) == 1:
            return tuple(
                1 if i == alive[0] else -1 for i in range(self.num_players)
            )
        if not alive:
            # agents wiped out on the same final tick draw
            return tuple(
                0 if a.death_step == self.step_count else -1
                for a in self.agents
            )
        return tuple(0 if a.alive else -1 for a in self.agents)

    def heuristic_value(self) -> np.ndarray:
        alive = np.array([a.alive for a in self.agents])
        value = np.where(alive, 0.0, -1.0)
        if alive.sum() == 1:
            value[alive] = 1.0
        return value

    def serialize(self) -> bytes:
        cfg = self.config
        header = struct.pack(
            "<7i",
            cfg.size,
            cfg.num_players,
            cfg.step_limit,
            cfg.bomb_fuse,
            cfg.flame_life,
            self.step_count,
            len(self.bombs),
        )
        bombs = b"".join(struct.pack("<5i", *b) for b in self.bombs)
        agents = b"".join(
            struct.pack(
                "<2i?3i",
                a.row,
                a.col,
                a.alive,
                a.capacity,
                a.strength,
                a.death_step,
            )
            for a in self.agents
        )
        return b"".join(
            (
                header,
                self.tiles.tobytes(),
                self.items.tobytes(),
                self.flames.tobytes(),
                bombs,
                agents,
            )
        )

    def observation(self, player: PlayerId) -> np.ndarray:
        return featurize(self, player)

    def with_items(self, items: np.ndarray) -> "GridState":
        """Copy of the state with other power-ups."""
        return GridState(
            self.config,
            self.tiles,
            items,
            self.flames,
            self.bombs,
            self.agents,
            self.step_count,
        )

    @classmethod
    def from_ascii(
        cls,
        layout: Sequence[str],
        config: Optional[ArenaConfig] = None,
        bombs: Iterable[Tuple[int, int, int, int, int]] = (),
        flames: Optional[Mapping[Position, int]] = None,
        capacity: Optional[Mapping[int, int]] = None,
        strength: Optional[Mapping[int, int]] = None,
        step_count: int = 0,
    ) -> "GridState":
        """Build a state from a text drawing of the board.

        Symbols are ``.`` passage, ``#`` rigid wall, ``+`` wooden wall,
        ``E`` / ``R`` wooden wall hiding an extra-bomb / range power-up,
        ``e`` / ``r`` visible power-up, and a digit for the agent of that
        seat. Seats absent from the drawing are eliminated.

        Parameters
        ----------
        layout : sequence of str
            One string per row, all of the board size.
        config : ArenaConfig, optional
            Rules; by default a 4-player arena of the drawing size.
        bombs : iterable of tuple
            ``(row, col, owner, fuse, strength)`` of the bombs in play.
        flames : mapping of position to int, optional
            Remaining ticks of the flames.
        capacity, strength : mapping of int to int, optional
            Bomb capacity and blast strength overrides per seat.
        step_count : int, optional
            Ticks already played, by default 0.
        """
        n = len(layout)
        config = config or ArenaConfig(size=n)
        if config.size != n or any(len(row) != n for row in layout):
            raise ValueError(f"Layout must be {config.size}x{config.size}.")
        symbols = {
            ".": (PASSAGE, NO_ITEM),
            "#": (RIGID, NO_ITEM),
            "+": (WOOD, NO_ITEM),
            "E": (WOOD, EXTRA_BOMB),
            "R": (WOOD, INCR_RANGE),
            "e": (PASSAGE, EXTRA_BOMB),
            "r": (PASSAGE, INCR_RANGE),
        }
        tiles = np.zeros((n, n), dtype=np.int8)
        items = np.zeros((n, n), dtype=np.int8)
        found: Dict[int, Position] = {}
        for r, row in enumerate(layout):
            for c, symbol in enumerate(row):
                if symbol.isdigit():
                    found[int(symbol)] = (r, c)
                    continue
                tiles[r, c], items[r, c] = symbols[symbol]

        capacity = capacity or {}
        strength = strength or {}
        spawns = spawn_points(n, config.num_players)
        agents = []
        for i in range(config.num_players):
            row, col = found.get(i, spawns[i])
            agents.append(
                Agent(
                    row,
                    col,
                    i in found,
                    capacity.get(i, config.bomb_capacity),
                    strength.get(i, config.blast_strength),
                    -1 if i in found else 0,
                )
            )
        flame_map = np.zeros((n, n), dtype=np.int8)
        for tile, ticks in (flames or {}).items():
            flame_map[tile] = ticks
        return cls(
            config,
            tiles,
            items,
            flame_map,
            [Bomb(*b) for b in bombs],
            agents,
            step_count,
        )


def _orbit_representative(r: int, c: int, n: int) -> Position:
    m = n - 1
    return min(
        (r, c),
        (c, r),
        (m - r, c),
        (r, m - c),
        (m - r, m - c),
        (c, m - r),
        (m - c, r),
        (m - c, m - r),
    )


def generate_board(
    seed: int, config: Optional[ArenaConfig] = None
) -> GridState:
    """Generate the initial state of a game.

    Walls are drawn once per symmetry orbit of the square so the board looks
    the same from every corner. The ring one tile inside the border never
    holds rigid walls, which keeps every spawn corner reachable from the
    others through passages and wooden walls.

    Parameters
    ----------
    seed : int
        Seed of the board; the same seed always gives the same board.
    config : ArenaConfig, optional
        Rules and generation ratios, by default `ArenaConfig()`.

    Returns
    -------
    GridState
        Board at step 0 with every agent alive in its corner.
    """
    config = config or ArenaConfig()
    n = config.size
    rng = np.random.default_rng(seed)

    kinds: Dict[Position, int] = {}
    tiles = np.zeros((n, n), dtype=np.int8)
    for r in range(n):
        for c in range(n):
            rep = _orbit_representative(r, c, n)
            if rep not in kinds:
                u = rng.random()
                if u < config.rigid_ratio:
                    kinds[rep] = RIGID
                elif u < config.rigid_ratio + config.wood_ratio:
                    kinds[rep] = WOOD
                else:
                    kinds[rep] = PASSAGE
            tiles[r, c] = kinds[rep]

    lo, hi = 1, n - 2
    corners = [(lo, lo), (lo, hi), (hi, lo), (hi, hi)]
    for r in range(lo, hi + 1):
        for c in range(lo, hi + 1):
            if r not in (lo, hi) and c not in (lo, hi):
                continue
            near = min(abs(r - cr) + abs(c - cc) for cr, cc in corners)
            tiles[r, c] = PASSAGE if near <= 2 else WOOD

    items = np.zeros((n, n), dtype=np.int8)
    wood = np.argwhere(tiles == WOOD)
    hidden = int(round(config.powerup_ratio * len(wood)))
    if hidden:
        chosen = rng.choice(len(wood), size=hidden, replace=False)
        kinds_drawn = rng.integers(EXTRA_BOMB, INCR_RANGE + 1, size=hidden)
        items[wood[chosen, 0], wood[chosen, 1]] = kinds_drawn

    agents = [
        Agent(r, c, True, config.bomb_capacity, config.blast_strength)
        for r, c in spawn_points(n, config.num_players)
    ]
    state = GridState(
        config, tiles, items, np.zeros((n, n), dtype=np.int8), (), agents, 0
    )
    logger.debug(
        f"board {seed}: {int((tiles == RIGID).sum())} rigid, "
        f"{len(wood)} wooden, {hidden} power-ups"
    )
    return state


def masked_actions(state: GridState, player: PlayerId) -> List[Action]:
    """Actions of `player` that are not immediate suicide."""
    return state.masked_actions(player)


def resolve_step(state: GridState, joint: Sequence[Action]) -> GridState:
    """Resolve one tick of the arena."""
    return state.step(joint)  # type: ignore[return-value]


def featurize(state: GridState, player: PlayerId) -> np.ndarray:
    """Partial observation of a player as 14 planes over the board.

    Planes hold rigid walls, wooden walls, bombs, flames, the two kinds of
    visible power-ups, the player, up to three opponents in seat order after
    the player, blast strength and remaining fuse of the bombs, and the
    power-ups the player has collected. Power-ups hidden in wooden walls and
    what the opponents have collected are not observed.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(14, size, size)`` with values in [0, 1].
    """
    cfg = state.config
    n = state.size
    planes = np.zeros((NUM_PLANES, n, n))
    planes[PLANE_RIGID] = state.tiles == RIGID
    planes[PLANE_WOOD] = state.tiles == WOOD
    visible = state.tiles == PASSAGE
    planes[PLANE_EXTRA_BOMB] = visible & (state.items == EXTRA_BOMB)
    planes[PLANE_INCR_RANGE] = visible & (state.items == INCR_RANGE)
    planes[PLANE_FLAME] = state.flames / cfg.flame_life

    max_strength = cfg.blast_strength + cfg.max_powerups
    for bomb in state.bombs:
        planes[PLANE_BOMB, bomb.row, bomb.col] = 1.0
        planes[PLANE_BLAST, bomb.row, bomb.col] = min(
            bomb.strength / max_strength, 1.0
        )
        planes[PLANE_LIFETIME, bomb.row, bomb.col] = min(
            bomb.fuse / cfg.bomb_fuse, 1.0
        )

    me = state.agents[player]
    if me.alive:
        planes[PLANE_SELF, me.row, me.col] = 1.0
    for k in range(1, state.num_players):
        other = state.agents[(player + k) % state.num_players]
        if other.alive:
            planes[PLANE_ENEMIES[k - 1], other.row, other.col] = 1.0

    planes[PLANE_AMMO] = min(
        (me.capacity - cfg.bomb_capacity) / cfg.max_powerups, 1.0
    )
    planes[PLANE_RANGE] = min(
        (me.strength - cfg.blast_strength) / cfg.max_powerups, 1.0
    )
    return np.clip(planes, 0.0, 1.0)


@dataclass
class Replay:
    """Seed and joint actions of a game, enough to replay it exactly."""

    seed: int
    config: ArenaConfig = field(default_factory=ArenaConfig)
    actions: List[JointAction] = field(default_factory=list)

    HEADER = "# simulplan replay v1"

    def dumps(self) -> str:
        """Line-delimited text form."""
        lines = [
            self.HEADER,
            f"seed {self.seed}",
            f"config {json.dumps(asdict(self.config), sort_keys=True)}",
        ]
        lines += [" ".join(str(a) for a in joint) for joint in self.actions]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Replay":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines or lines[0] != cls.HEADER:
            raise ValueError("Not a simulplan replay.")
        seed = int(lines[1].split(" ", 1)[1])
        fields = json.loads(lines[2].split(" ", 1)[1])
        config = replace(ArenaConfig(), **fields)
        actions = [tuple(int(a) for a in line.split()) for line in lines[3:]]
        return cls(seed, config, actions)

    def states(self) -> List[GridState]:
        """Every state of the game, initial state first."""
        state = generate_board(self.seed, self.config)
        states = [state]
        for joint in self.actions:
            state = resolve_step(state, joint)
            states.append(state)
        return states
