import numpy as np
import pytest

from simulplan import generate_board, load_matrix_game
from simulplan.follower import (
    FollowerPolicy,
    TrainingConfig,
    behavioral_clone,
    dagger_train,
    save_checkpoint,
)
from simulplan.gridarena import spawn_points
from simulplan.harness import (
    Environment,
    mean_smoothed_ratio,
    run_matrix_check,
    run_pair,
    run_revisits,
    run_tournament,
)
from simulplan.planners import PlannerConfig

from .utils import (
    BOARD_SEEDS,
    SMOKE_GAMES,
    SMOKE_OVERRIDES,
    get_dominance_rows,
    get_one_shot_rows,
    get_ordering_rows,
    reachable_tiles,
)

_win_rates = {}


def smoke_win_rate(spec):
    if spec not in _win_rates:
        result = run_tournament(
            spec,
            "rule",
            SMOKE_GAMES,
            0,
            Environment.make("gridarena"),
            workers=2,
            planner_overrides=SMOKE_OVERRIDES,
        )
        _win_rates[spec] = result.aggregate.rate("win").estimate
    return _win_rates[spec]


class TestMatrixGames:

    @pytest.mark.parametrize("name, iterations", get_one_shot_rows())
    def test_random_planner_values(self, name, iterations):
        game = load_matrix_game(name)
        frame = run_matrix_check(game, "mcs-random", iterations, 20, seed=0)
        assert (frame["max_error"] <= 0.05).all()

    @pytest.mark.parametrize("name, planner", get_dominance_rows())
    def test_best_response(self, name, planner):
        game = load_matrix_game(name)
        frame = run_matrix_check(game, planner, 10000, 100, workers=2)
        assert frame["agree"].mean() >= 0.99


class TestBoards:

    @pytest.mark.parametrize("seed", BOARD_SEEDS)
    def test_corners_connected(self, seed):
        state = generate_board(seed)
        corners = spawn_points(state.config.size, 4)
        seen = reachable_tiles(state.tiles, corners[0])
        assert all(corner in seen for corner in corners)


class TestArena:

    def test_rule_self_play(self):
        env = Environment.make("gridarena")
        result = run_tournament("rule", "rule", 40, 0, env, workers=2)
        summary = result.aggregate.summary()
        total = sum(summary[k]["percent"] for k in ("win", "draw", "loss"))
        assert total == pytest.approx(100.0)

    @pytest.mark.parametrize("stronger, weaker", get_ordering_rows())
    def test_planner_ordering(self, stronger, weaker):
        assert smoke_win_rate(stronger) > smoke_win_rate(weaker)

    def test_thompson_beats_ucb(self):
        result = run_pair(
            "mcs-ts",
            "mcs-ucb",
            200,
            0,
            Environment.make("gridarena2p"),
            workers=2,
            planner_overrides=dict(SMOKE_OVERRIDES, c=2.0),
        )
        aggregate = result.aggregate
        assert aggregate.wins > aggregate.losses
        assert aggregate.score > 0.5

    def test_fixed_depth_revisits_deeper(self):
        frame = run_revisits(
            ["fdts-ts", "fdts-ucb", "mcts-ts"],
            10,
            0,
            Environment.make("gridarena"),
            "rule",
            workers=2,
            planner_overrides=SMOKE_OVERRIDES,
        )
        means = mean_smoothed_ratio(frame, 10)
        assert means["fdts-ts"] >= means["fdts-ucb"] >= means["mcts-ts"]


class TestFollower:

    def test_dagger_not_worse_than_cloning(self, tmp_path):
        env = Environment.make("gridarena")
        oracle = PlannerConfig.from_spec("fdts-ts", **SMOKE_OVERRIDES)
        settings = TrainingConfig(workers=2)
        scores = {}
        for train_fn in (dagger_train, behavioral_clone):
            follower = FollowerPolicy.for_arena(env.arena, seed=0)
            rng = np.random.default_rng(0)
            train_fn(oracle, follower, 100, rng, settings, env.arena)
            path = tmp_path / f"{train_fn.__name__}.bin"
            save_checkpoint(follower, path)
            result = run_tournament(
                f"follower:{path}", "rule", SMOKE_GAMES, 0, env, workers=2
            )
            scores[train_fn] = result.aggregate.score
        assert scores[dagger_train] >= scores[behavioral_clone]
