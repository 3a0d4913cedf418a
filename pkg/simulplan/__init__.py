from .bandits import RandomBandit, ThompsonBandit, UCB1Bandit, make_bandit
from .game import GameState, legal_actions, step, terminal_reward
from .gridarena import ArenaConfig, GridState, generate_board
from .harness import run_pair, run_tournament
from .matrix import MatrixGame, brute_force_q, load_matrix_game
from .planners import Planner, PlannerConfig, evaluate_state

__all__ = [
    "ArenaConfig",
    "GameState",
    "GridState",
    "MatrixGame",
    "Planner",
    "PlannerConfig",
    "RandomBandit",
    "ThompsonBandit",
    "UCB1Bandit",
    "brute_force_q",
    "evaluate_state",
    "generate_board",
    "legal_actions",
    "load_matrix_game",
    "make_bandit",
    "run_pair",
    "run_tournament",
    "step",
    "terminal_reward"
]
