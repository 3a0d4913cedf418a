from collections import deque

import numpy as np
import pytest

from simulplan import ArenaConfig, GridState, generate_board
from simulplan.exceptions import (
    ConfigError,
    DeadPlayerError,
    TerminalStateError,
)
from simulplan.gridarena import (
    BOMB,
    DOWN,
    EXTRA_BOMB,
    LEFT,
    MOVES,
    NO_ITEM,
    PASSAGE,
    PLANE_EXTRA_BOMB,
    PLANE_INCR_RANGE,
    PLANE_LIFETIME,
    PLANE_SELF,
    RIGHT,
    RIGID,
    STOP,
    UP,
    WOOD,
    Replay,
    featurize,
    masked_actions,
    resolve_step,
    spawn_points,
)

TWO_PLAYERS = ArenaConfig(size=7, num_players=2)

OPEN = [
    "#######",
    "#1....#",
    "#.....#",
    "#..0..#",
    "#.....#",
    "#.....#",
    "#######",
]

BOXED = [
    "#######",
    "#1....#",
    "#.###.#",
    "#.#0#.#",
    "#.###.#",
    "#.....#",
    "#######",
]


def open_board(size, agents):
    """Board of passages inside a rigid border, agents by position."""
    rows = []
    for r in range(size):
        row = ""
        for c in range(size):
            if r in (0, size - 1) or c in (0, size - 1):
                row += "#"
            else:
                row += "."
        rows.append(row)
    for seat, (r, c) in agents.items():
        rows[r] = rows[r][:c] + str(seat) + rows[r][c + 1 :]
    return rows


def reachable(tiles, start):
    seen = {start}
    queue = deque([start])
    n = len(tiles)
    while queue:
        r, c = queue.popleft()
        for dr, dc in MOVES.values():
            nxt = (r + dr, c + dc)
            if (
                0 <= nxt[0] < n
                and 0 <= nxt[1] < n
                and tiles[nxt] != RIGID
                and nxt not in seen
            ):
                seen.add(nxt)
                queue.append(nxt)
    return seen


class TestArenaConfig:

    def test_defaults(self):
        config = ArenaConfig()
        assert config.size == 11
        assert config.num_players == 4
        assert config.bomb_fuse == 9
        assert config.flame_life == 2

    def test_profiles(self):
        assert ArenaConfig.profile("full").step_limit == 800
        assert ArenaConfig.profile("fast", num_players=2).step_limit == 200

    def test_unknown_profile(self):
        with pytest.raises(ConfigError):
            ArenaConfig.profile("slow")

    def test_three_players(self):
        with pytest.raises(ConfigError):
            ArenaConfig(num_players=3)


class TestGenerateBoard:

    def test_deterministic(self):
        a = generate_board(42)
        b = generate_board(42)
        assert a.canonical_key == b.canonical_key
        assert np.array_equal(a.items, b.items)

    def test_seeds_differ(self):
        a = generate_board(1)
        assert a.canonical_key != generate_board(2).canonical_key

    def test_symmetric_walls(self):
        for seed in range(20):
            tiles = generate_board(seed).tiles
            assert np.array_equal(tiles, tiles.T)
            assert np.array_equal(tiles, tiles[::-1, :])
            assert np.array_equal(tiles, tiles[:, ::-1])

    def test_spawns(self):
        state = generate_board(0)
        spawns = spawn_points(11, 4)
        assert spawns == [(1, 1), (9, 1), (9, 9), (1, 9)]
        for agent, spawn in zip(state.agents, spawns):
            assert agent.alive
            assert agent.position == spawn
            assert state.tiles[spawn] == PASSAGE
        assert state.step_count == 0
        assert not state.bombs

    def test_two_player_spawns(self):
        state = generate_board(0, ArenaConfig(num_players=2))
        assert [a.position for a in state.agents] == [(1, 1), (9, 9)]

    def test_corners_reachable(self):
        for seed in range(50):
            state = generate_board(seed)
            seen = reachable(state.tiles, (1, 1))
            for spawn in spawn_points(11, 4):
                assert spawn in seen

    def test_powerup_ratio(self):
        for seed in range(20):
            state = generate_board(seed)
            wood = int((state.tiles == WOOD).sum())
            hidden = int(((state.tiles == WOOD) & (state.items > 0)).sum())
            assert abs(hidden - 0.5 * wood) <= 1
            assert not ((state.tiles != WOOD) & (state.items > 0)).any()

    def test_no_walls(self):
        config = ArenaConfig(rigid_ratio=0.0, wood_ratio=0.0)
        state = generate_board(0, config)
        inner = state.tiles[2:-2, 2:-2]
        assert (inner == PASSAGE).all()


class TestMaskedActions:

    def test_open_board(self):
        state = GridState.from_ascii(OPEN, TWO_PLAYERS)
        assert masked_actions(state, 0) == [0, 1, 2, 3, 4, 5]

    def test_flame_neighbour(self):
        state = GridState.from_ascii(OPEN, TWO_PLAYERS, flames={(3, 4): 2})
        assert masked_actions(state, 0) == [STOP, UP, DOWN, LEFT, BOMB]

    def test_capacity_used(self):
        state = GridState.from_ascii(
            OPEN, TWO_PLAYERS, bombs=[(5, 5, 0, 5, 2)]
        )
        assert masked_actions(state, 0) == [STOP, UP, DOWN, LEFT, RIGHT]

    def test_boxed_in(self):
        state = GridState.from_ascii(
            BOXED, TWO_PLAYERS, bombs=[(5, 5, 0, 8, 2)]
        )
        assert masked_actions(state, 0) == [STOP]

    def test_stop_removed_when_staying_is_lethal(self):
        state = GridState.from_ascii(
            OPEN, TWO_PLAYERS, bombs=[(3, 3, 1, 1, 1)]
        )
        assert masked_actions(state, 0) == [UP, DOWN, LEFT, RIGHT]

    def test_no_escape_keeps_stop(self):
        state = GridState.from_ascii(
            BOXED, TWO_PLAYERS, bombs=[(3, 3, 0, 1, 2)]
        )
        assert masked_actions(state, 0) == [STOP]

    def test_bomb_blocks_move(self):
        state = GridState.from_ascii(
            OPEN, TWO_PLAYERS, bombs=[(2, 3, 1, 5, 2)]
        )
        assert UP not in masked_actions(state, 0)

    def test_dead_player(self):
        state = GridState.from_ascii(OPEN)
        with pytest.raises(DeadPlayerError):
            masked_actions(state, 2)

    def test_mask_is_legal_set(self):
        state = GridState.from_ascii(OPEN, TWO_PLAYERS, flames={(3, 4): 2})
        assert state.legal_actions(0) == masked_actions(state, 0)


class TestResolveStep:

    def test_all_stop(self):
        state = GridState.from_ascii(OPEN, TWO_PLAYERS)
        nxt = resolve_step(state, (STOP, STOP))
        assert np.array_equal(nxt.tiles, state.tiles)
        assert np.array_equal(nxt.items, state.items)
        assert nxt.agents == state.agents
        assert nxt.step_count == state.step_count + 1

    def test_move(self):
        state = GridState.from_ascii(OPEN, TWO_PLAYERS)
        nxt = resolve_step(state, (UP, RIGHT))
        assert nxt.agents[0].position == (2, 3)
        assert nxt.agents[1].position == (1, 2)

    def test_blast_cross(self):
        layout = open_board(11, {0: (1, 1), 1: (9, 9)})
        config = ArenaConfig(num_players=2)
        state = GridState.from_ascii(layout, config, bombs=[(5, 5, 0, 1, 2)])
        nxt = resolve_step(state, (STOP, STOP))
        flames = {tuple(t) for t in np.argwhere(nxt.flames > 0)}
        assert flames == {(5, 5), (4, 5), (6, 5), (5, 4), (5, 6)}
        assert not nxt.bombs

    def test_blast_stops_at_walls(self):
        layout = [
            "#######",
            "#1....#",
            "#..#..#",
            "#.+...#",
            "#.....#",
            "#....0#",
            "#######",
        ]
        state = GridState.from_ascii(
            layout, TWO_PLAYERS, bombs=[(3, 3, 0, 1, 3)]
        )
        nxt = resolve_step(state, (STOP, STOP))
        assert nxt.flames[2, 3] == 0
        assert nxt.tiles[2, 3] == RIGID
        # the wooden wall burns, the tile behind it does not
        assert nxt.flames[3, 2] > 0
        assert nxt.tiles[3, 2] == PASSAGE
        assert nxt.flames[3, 1] == 0
        assert nxt.flames[3, 5] > 0

    def test_swap_bounces(self):
        layout = open_board(7, {0: (3, 3), 1: (3, 4)})
        state = GridState.from_ascii(layout, TWO_PLAYERS)
        nxt = resolve_step(state, (RIGHT, LEFT))
        assert nxt.agents[0].position == (3, 3)
        assert nxt.agents[1].position == (3, 4)

    def test_same_target_bounces(self):
        layout = open_board(7, {0: (3, 2), 1: (3, 4)})
        state = GridState.from_ascii(layout, TWO_PLAYERS)
        nxt = resolve_step(state, (RIGHT, LEFT))
        assert nxt.agents[0].position == (3, 2)
        assert nxt.agents[1].position == (3, 4)

    def test_chain_reaction(self):
        layout = open_board(11, {0: (1, 1), 1: (9, 1)})
        config = ArenaConfig(num_players=2)
        bombs = [(3, 3, 0, 1, 3), (3, 5, 1, 5, 2)]
        state = GridState.from_ascii(layout, config, bombs=bombs)
        nxt = resolve_step(state, (STOP, STOP))
        assert not nxt.bombs
        assert nxt.flames[3, 6] > 0
        assert nxt.flames[3, 1] > 0

    def test_bomb_laid(self):
        state = GridState.from_ascii(OPEN, TWO_PLAYERS)
        nxt = resolve_step(state, (BOMB, STOP))
        assert len(nxt.bombs) == 1
        bomb = nxt.bombs[0]
        assert (bomb.row, bomb.col, bomb.owner) == (3, 3, 0)
        assert bomb.fuse == 9
        assert bomb.strength == 2
        assert nxt.bombs_in_play(0) == 1

    def test_fuse_ticks(self):
        state = GridState.from_ascii(
            OPEN, TWO_PLAYERS, bombs=[(5, 5, 0, 5, 2)]
        )
        nxt = resolve_step(state, (STOP, STOP))
        assert nxt.bombs[0].fuse == 4

    def test_flames_fade(self):
        state = GridState.from_ascii(OPEN, TWO_PLAYERS, flames={(5, 5): 2})
        nxt = resolve_step(state, (STOP, STOP))
        assert nxt.flames[5, 5] == 1
        assert resolve_step(nxt, (STOP, STOP)).flames[5, 5] == 0

    def test_collect_powerup(self):
        layout = list(OPEN)
        layout[2] = "#..e..#"
        state = GridState.from_ascii(layout, TWO_PLAYERS)
        nxt = resolve_step(state, (UP, STOP))
        assert nxt.agents[0].capacity == 2
        assert nxt.items[2, 3] == NO_ITEM

    def test_burnt_wall_reveals_item(self):
        layout = list(OPEN)
        layout[3] = "#..0E.#"
        state = GridState.from_ascii(
            layout, TWO_PLAYERS, bombs=[(5, 4, 1, 1, 3)]
        )
        nxt = resolve_step(state, (STOP, STOP))
        assert nxt.tiles[3, 4] == PASSAGE
        assert nxt.items[3, 4] == EXTRA_BOMB

    def test_agent_dies_in_flames(self):
        state = GridState.from_ascii(
            BOXED, TWO_PLAYERS, bombs=[(3, 3, 0, 1, 2)]
        )
        nxt = resolve_step(state, (STOP, STOP))
        assert not nxt.is_alive(0)
        assert nxt.agents[0].death_step == 1
        assert nxt.is_terminal
        assert nxt.rewards() == (-1, 1)

    def test_original_untouched(self):
        state = GridState.from_ascii(OPEN, TWO_PLAYERS)
        key = state.canonical_key
        resolve_step(state, (BOMB, UP))
        assert state.canonical_key == key
        assert not state.bombs


class TestTermination:

    def test_single_survivor(self):
        layout = [row.replace("1", ".") for row in OPEN]
        state = GridState.from_ascii(layout)
        assert state.is_terminal
        assert state.rewards() == (1, -1, -1, -1)
        with pytest.raises(TerminalStateError):
            resolve_step(state, (0, 0, 0, 0))

    def test_step_limit_draw(self):
        config = ArenaConfig(size=7, num_players=2, step_limit=1)
        state = GridState.from_ascii(OPEN, config)
        nxt = resolve_step(state, (STOP, STOP))
        assert nxt.is_terminal
        assert nxt.rewards() == (0, 0)

    def test_simultaneous_death_draw(self):
        layout = [
            "#######",
            "#######",
            "#######",
            "##0.1##",
            "#######",
            "#######",
            "#######",
        ]
        state = GridState.from_ascii(layout, bombs=[(3, 3, 0, 1, 2)])
        assert not state.is_terminal
        assert masked_actions(state, 0) == [STOP]
        nxt = resolve_step(state, (STOP, STOP, STOP, STOP))
        assert nxt.alive_players() == ()
        assert nxt.rewards() == (0, 0, -1, -1)

    def test_heuristic_value(self):
        state = GridState.from_ascii(open_board(7, {0: (1, 1), 1: (5, 5)}))
        assert not state.is_terminal
        assert list(state.heuristic_value()) == [0.0, 0.0, -1.0, -1.0]


class TestFeaturize:

    def test_shape_and_range(self):
        state = generate_board(9)
        for player in range(4):
            planes = featurize(state, player)
            assert planes.shape == (14, 11, 11)
            assert planes.min() >= 0.0
            assert planes.max() <= 1.0

    def test_bomb_lifetime(self):
        state = GridState.from_ascii(
            OPEN, TWO_PLAYERS, bombs=[(5, 5, 1, 7, 2)]
        )
        planes = featurize(state, 0)
        assert planes[PLANE_LIFETIME, 5, 5] == pytest.approx(7 / 9)

    def test_hidden_items_not_observed(self):
        layout = list(OPEN)
        layout[4] = "#.E.R.#"
        state = GridState.from_ascii(layout, TWO_PLAYERS)
        planes = featurize(state, 0)
        assert planes[PLANE_EXTRA_BOMB].sum() == 0
        assert planes[PLANE_INCR_RANGE].sum() == 0
        swapped = state.with_items(np.zeros_like(state.items))
        assert np.array_equal(featurize(swapped, 0), planes)

    def test_empty_board(self):
        layout = ["." * 7 for _ in range(7)]
        layout[1] = ".0....."
        layout[5] = ".....1."
        state = GridState.from_ascii(layout, TWO_PLAYERS)
        planes = featurize(state, 0)
        assert planes[:6].sum() == 0
        assert planes[PLANE_SELF].sum() == 1
        assert planes[PLANE_SELF, 1, 1] == 1
        assert planes[7, 5, 5] == 1
        assert planes[10:].sum() == 0

    def test_seat_order_of_enemies(self):
        state = generate_board(0)
        planes = featurize(state, 2)
        assert planes[PLANE_SELF, 9, 9] == 1
        assert planes[7, 1, 9] == 1
        assert planes[8, 1, 1] == 1
        assert planes[9, 9, 1] == 1


class TestReplay:

    def test_dumps_loads(self):
        config = ArenaConfig(num_players=2, step_limit=50)
        state = generate_board(4, config)
        rng = np.random.default_rng(4)
        replay = Replay(4, config)
        keys = [state.canonical_key]
        while not state.is_terminal and len(replay.actions) < 25:
            joint = tuple(
                int(rng.choice(state.legal_actions(p)))
                if state.is_alive(p)
                else 0
                for p in range(2)
            )
            replay.actions.append(joint)
            state = resolve_step(state, joint)
            keys.append(state.canonical_key)

        loaded = Replay.loads(replay.dumps())
        assert loaded.seed == 4
        assert loaded.config == config
        assert [s.canonical_key for s in loaded.states()] == keys

    def test_not_a_replay(self):
        with pytest.raises(ValueError):
            Replay.loads("seed 3\n")


def test_masking_soundness():
    # a masked move never ends in flames unless it bounced or had no escape
    for seed in range(5):
        config = ArenaConfig(num_players=2, step_limit=80)
        state = generate_board(seed, config)
        rng = np.random.default_rng(seed)
        while not state.is_terminal:
            joint = [STOP, STOP]
            targets = {}
            for p in state.players_to_act():
                mask = state.legal_actions(p)
                joint[p] = int(rng.choice(mask))
                r, c = state.agents[p].position
                dr, dc = MOVES.get(joint[p], (0, 0))
                targets[p] = ((r + dr, c + dc), mask)
            nxt = resolve_step(state, joint)
            for p, (target, mask) in targets.items():
                if nxt.is_alive(p):
                    continue
                bounced = nxt.agents[p].position != target
                cornered = mask == [STOP]
                assert bounced or cornered
            state = nxt
