import pytest

from simulplan import ArenaConfig, GridState, generate_board
from simulplan.exceptions import DeadPlayerError
from simulplan.gridarena import BOMB, RIGHT, STOP
from simulplan.rules import rule_based_agent, threat_map

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


def with_tile(layout, row, col, symbol):
    rows = list(layout)
    rows[row] = rows[row][:col] + symbol + rows[row][col + 1 :]
    return rows


class TestThreatMap:

    def test_long_fuse_counts(self):
        state = GridState.from_ascii(
            OPEN, TWO_PLAYERS, bombs=[(5, 5, 1, 9, 2)]
        )
        threat = threat_map(state)
        assert threat[5, 5] and threat[4, 5] and threat[5, 4]
        assert not threat[3, 3]
        # the danger of the next tick only holds bombs about to explode
        assert not state.danger_map().any()

    def test_flames(self):
        state = GridState.from_ascii(OPEN, TWO_PLAYERS, flames={(2, 2): 1})
        assert threat_map(state)[2, 2]


class TestRuleBasedAgent:

    def test_safe_and_idle(self):
        layout = [
            "#######",
            "#1....#",
            "#.###.#",
            "#.#0#.#",
            "#.###.#",
            "#.....#",
            "#######",
        ]
        state = GridState.from_ascii(layout, TWO_PLAYERS)
        assert rule_based_agent(state, 0) == STOP

    def test_flees_own_bomb(self):
        layout = [
            "#######",
            "#######",
            "#######",
            "##.0..#",
            "#####.#",
            "#1....#",
            "#######",
        ]
        state = GridState.from_ascii(
            layout, TWO_PLAYERS, bombs=[(3, 3, 0, 9, 2)]
        )
        for seed in range(5):
            assert rule_based_agent(state, 0, seed) == RIGHT

    def test_picks_up_powerup(self):
        state = GridState.from_ascii(
            with_tile(OPEN, 3, 4, "r"), TWO_PLAYERS
        )
        assert rule_based_agent(state, 0) == RIGHT

    def test_bombs_wood(self):
        state = GridState.from_ascii(
            with_tile(OPEN, 3, 4, "+"), TWO_PLAYERS
        )
        assert rule_based_agent(state, 0) == BOMB

    def test_no_bomb_without_capacity(self):
        state = GridState.from_ascii(
            with_tile(OPEN, 3, 4, "+"), TWO_PLAYERS, bombs=[(5, 1, 0, 9, 2)]
        )
        assert rule_based_agent(state, 0) != BOMB

    def test_dead_player(self):
        state = GridState.from_ascii(OPEN)
        with pytest.raises(DeadPlayerError):
            rule_based_agent(state, 3)

    def test_self_play(self):
        def keys():
            state = generate_board(6, ArenaConfig(step_limit=120))
            out = []
            while not state.is_terminal:
                joint = [STOP] * 4
                for p in state.players_to_act():
                    joint[p] = rule_based_agent(state, p, seed=p)
                    assert joint[p] in state.masked_actions(p)
                state = state.step(joint)
                out.append(state.canonical_key)
            return out

        assert keys() == keys()
