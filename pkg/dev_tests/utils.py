from collections import deque

from simulplan.gridarena import MOVES, RIGID
from simulplan.matrix import catalogue, load_matrix_game

BOARD_SEEDS = range(1000)

# reduced profile of the long tournament checks
SMOKE_GAMES = 100
SMOKE_OVERRIDES = {"iterations": 100, "depth": 20}


def get_one_shot_rows():
    # 10000 simulations keep every estimate within 0.05 up to three
    # actions; the error of each estimate grows with the number of arms
    # sharing the budget, so larger games get four times as many
    rows = []
    for name in catalogue():
        game = load_matrix_game(name)
        if game.horizon == 1:
            iterations = 10000 if max(game.num_actions) <= 3 else 40000
            rows.append((name, iterations))
    return rows


def get_dominance_rows():
    # planners whose final choice on a game with strictly dominant actions
    # must match the exact best response
    return [
        ("dominance", spec) for spec in ("mcs-ts", "mcs-ucb", "mcs-random")
    ]


def get_ordering_rows():
    # (stronger, weaker) against rule-based opponents
    return [
        ("fdts-ts", "mcts-ts"),
        ("mcts-ts", "mcs-ts"),
        ("mcts-ts", "mcts-ts-norollout"),
    ]


def reachable_tiles(tiles, start):
    seen = {start}
    queue = deque([start])
    n = tiles.shape[0]
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
