import json

import numpy as np
import pytest

from simulplan import MatrixGame, brute_force_q, load_matrix_game
from simulplan.exceptions import ConfigError, InvalidDistributionError
from simulplan.matrix import best_response, catalogue, uniform_policy


class TestBruteForceQ:

    def test_rps_uniform(self):
        rps = load_matrix_game("rps")
        q = brute_force_q(rps, 0, uniform_policy(rps, 1))
        assert np.allclose(q, [0.0, 0.0, 0.0])

    def test_rps_against_rock(self):
        q = brute_force_q(load_matrix_game("rps"), 0, [1.0, 0.0, 0.0])
        assert np.allclose(q, [0.0, 1.0, -1.0])

    def test_column_player(self):
        q = brute_force_q(load_matrix_game("rps"), 1, [0.0, 1.0, 0.0])
        assert np.allclose(q, [-1.0, 0.0, 1.0])

    def test_matching_pennies_uniform(self):
        q = brute_force_q(load_matrix_game("matching_pennies"), 0, [0.5, 0.5])
        assert np.allclose(q, [0.0, 0.0])

    def test_mixed_opponent(self):
        q = brute_force_q(load_matrix_game("rps"), 0, [0.5, 0.5, 0.0])
        assert np.allclose(q, [-0.5, 0.5, 0.0])

    def test_repeated_game_continues_uniformly(self):
        q = brute_force_q(load_matrix_game("rps_repeated"), 0, [1, 0, 0])
        assert np.allclose(q, [0.0, 5 / 9, -5 / 9])

    def test_not_normalised(self):
        with pytest.raises(InvalidDistributionError) as e:
            brute_force_q(load_matrix_game("rps"), 0, [0.5, 0.0, 0.0])
        assert e.value.player == 1

    def test_negative_probability(self):
        with pytest.raises(InvalidDistributionError):
            brute_force_q(load_matrix_game("rps"), 0, [1.5, -0.5, 0.0])

    def test_wrong_length(self):
        with pytest.raises(InvalidDistributionError):
            brute_force_q(load_matrix_game("rps"), 0, [0.5, 0.5])

    def test_unknown_seat(self):
        with pytest.raises(ValueError):
            brute_force_q(load_matrix_game("rps"), 2, [1.0, 0.0, 0.0])


class TestBestResponse:

    def test_dominance(self):
        game = load_matrix_game("dominance")
        assert best_response(game, 0) == 0
        assert best_response(game, 1) == 1

    def test_against_fixed_policy(self):
        game = load_matrix_game("rps")
        assert best_response(game, 0, [0.0, 0.0, 1.0]) == 0

    def test_ties_go_to_lowest_action(self):
        assert best_response(load_matrix_game("rps"), 0) == 0


class TestMatrixGame:

    def test_catalogue(self):
        names = catalogue()
        for name in ("rps", "matching_pennies", "dominance", "forced_chain"):
            assert name in names

    def test_shapes(self):
        game = load_matrix_game("rpsls")
        assert game.num_players == 2
        assert game.num_actions == (5, 5)
        assert game.horizon == 1

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            load_matrix_game("chess")

    def test_from_file(self, tmp_path):
        path = tmp_path / "coin.json"
        path.write_text(
            json.dumps({"actions": ["A", "B"], "payoff": [[0, 1], [-1, 0]]})
        )
        game = load_matrix_game(str(path))
        assert game.name == "coin"
        assert game.num_actions == (2, 2)

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "actions": ["A",\n}\n')
        with pytest.raises(ConfigError) as e:
            load_matrix_game(str(path))
        assert e.value.line == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_matrix_game(str(tmp_path / "nothing.json"))

    def test_rewards_out_of_range(self):
        payoffs = np.zeros((2, 2, 2), dtype=int)
        payoffs[0, 0] = (2, -2)
        with pytest.raises(ValueError):
            MatrixGame("big", payoffs, (("a", "b"), ("a", "b")))

    def test_not_zero_sum(self):
        payoffs = np.zeros((2, 2, 2), dtype=int)
        payoffs[0, 0] = (1, 1)
        with pytest.raises(ValueError):
            MatrixGame("coop", payoffs, (("a", "b"), ("a", "b")))

    def test_horizon(self):
        state = load_matrix_game("rps_repeated").initial_state()
        for _ in range(3):
            assert not state.is_terminal
            state = state.step((1, 0))
        assert state.is_terminal
        assert state.rewards() == (1, -1)
