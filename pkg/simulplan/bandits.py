"""Multi-armed bandits used for decoupled action selection at tree nodes.

Values are per-player estimates in [-1, 1]. Thompson sampling maps them to
a fractional Bernoulli outcome ``(value + 1) / 2``, which is exact for wins
and losses and splits a draw evenly between both counts.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .exceptions import PlanningNotRunError, UnknownActionError
from .game import Action

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArmStats:
    """Statistics of one arm."""

    action: Action
    count: int
    mean: float
    successes: float
    failures: float

    @property
    def visited(self) -> bool:
        return self.count > 0


def _argmax_random_tie(values: np.ndarray, rng: np.random.Generator) -> int:
    best = np.flatnonzero(values == values.max())
    if len(best) == 1:
        return int(best[0])
    return int(rng.choice(best))


class BanditInstance:
    """Bandit over a fixed set of arms, one per legal action.

    Parameters
    ----------
    arms : sequence of int
        Actions of the player in the node state, sorted.

    Raises
    ------
    ValueError
        When no arm is given.
    """

    algorithm = "base"

    # rows of `table`
    COUNTS, MEANS, SUCCESSES, FAILURES = range(4)

    def __init__(self, arms: Sequence[Action]):
        self.arms = tuple(int(a) for a in arms)
        if not self.arms:
            raise ValueError("A bandit needs at least one arm.")
        self.table = np.zeros((4, len(self.arms)))

    def __repr__(self):
        return (
            f"{type(self).__name__}(arms={list(self.arms)}, "
            f"total={self.total})"
        )

    def __len__(self):
        return len(self.arms)

    @property
    def counts(self) -> np.ndarray:
        return self.table[self.COUNTS]

    @counts.setter
    def counts(self, values) -> None:
        self.table[self.COUNTS] = values

    @property
    def means(self) -> np.ndarray:
        return self.table[self.MEANS]

    @means.setter
    def means(self, values) -> None:
        self.table[self.MEANS] = values

    @property
    def successes(self) -> np.ndarray:
        return self.table[self.SUCCESSES]

    @successes.setter
    def successes(self, values) -> None:
        self.table[self.SUCCESSES] = values

    @property
    def failures(self) -> np.ndarray:
        return self.table[self.FAILURES]

    @failures.setter
    def failures(self, values) -> None:
        self.table[self.FAILURES] = values

    @property
    def total(self) -> int:
        """Number of pulls N over all arms."""
        return int(self.table[self.COUNTS].sum())

    def index(self, action: Action) -> int:
        try:
            return self.arms.index(action)
        except ValueError:
            raise UnknownActionError(action=action, arms=self.arms)

    def arm(self, action: Action) -> ArmStats:
        i = self.index(action)
        return ArmStats(
            self.arms[i],
            int(self.counts[i]),
            float(self.means[i]),
            float(self.successes[i]),
            float(self.failures[i]),
        )

    def stats(self) -> List[ArmStats]:
        return [self.arm(a) for a in self.arms]

    def update(self, action: Action, value: float) -> None:
        """Record the value obtained after pulling an arm.

        Raises
        ------
        UnknownActionError
            When `action` is not an arm.
        ValueError
            When `value` is outside of [-1, 1].
        """
        i = self.index(action)
        if not -1.0 <= value <= 1.0:
            raise ValueError(f"Value {value} is outside of [-1, 1].")
        t = self.table
        t[self.COUNTS, i] += 1
        t[self.MEANS, i] += (value - t[self.MEANS, i]) / t[self.COUNTS, i]
        win = (value + 1.0) / 2.0
        t[self.SUCCESSES, i] += win
        t[self.FAILURES, i] += 1.0 - win

    def select(self, rng: np.random.Generator) -> Action:
        """Arm to pull next."""
        raise NotImplementedError

    def _final_scores(self) -> np.ndarray:
        raise NotImplementedError

    def _final_sample(self, rng: np.random.Generator) -> Action:
        p = self.counts / self.counts.sum()
        return self.arms[int(rng.choice(len(self.arms), p=p))]

    def best_action(
        self,
        stochastic: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> Action:
        """Action recommended once planning is over.

        Parameters
        ----------
        stochastic : bool, optional
            Sample the action instead of taking the best one, by default
            False.
        rng : numpy.random.Generator, optional
            Source of randomness of the stochastic choice.

        Raises
        ------
        PlanningNotRunError
            When no arm has been pulled.
        """
        if self.total == 0:
            raise PlanningNotRunError(arms=self.arms)
        if stochastic:
            return self._final_sample(rng or np.random.default_rng())
        scores = self._final_scores()
        candidates = np.flatnonzero(scores == scores.max())
        return min(self.arms[i] for i in candidates)


class UCB1Bandit(BanditInstance):
    """UCB1 with exploration constant `c`; unvisited arms come first."""

    algorithm = "ucb"

    def __init__(self, arms: Sequence[Action], c: float = 2.0):
        super().__init__(arms)
        self.c = c

    def scores(self) -> np.ndarray:
        total = self.total
        with np.errstate(divide="ignore", invalid="ignore"):
            bonus = self.c * np.sqrt(math.log(max(total, 1)) / self.counts)
        return np.where(self.counts > 0, self.means + bonus, np.inf)

    def select(self, rng: np.random.Generator) -> Action:
        return self.arms[_argmax_random_tie(self.scores(), rng)]

    def _final_scores(self) -> np.ndarray:
        return self.counts.astype(float)


class ThompsonBandit(BanditInstance):
    """Beta-Bernoulli Thompson sampling with prior Beta(alpha, beta)."""

    algorithm = "ts"

    def __init__(
        self, arms: Sequence[Action], alpha: float = 1.0, beta: float = 1.0
    ):
        super().__init__(arms)
        self.alpha = alpha
        self.beta = beta

    def posterior_means(self) -> np.ndarray:
        return (self.successes + self.alpha) / (
            self.successes + self.failures + self.alpha + self.beta
        )

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.beta(self.successes + self.alpha, self.failures + self.beta)

    def select(self, rng: np.random.Generator) -> Action:
        return self.arms[_argmax_random_tie(self.sample(rng), rng)]

    def _final_scores(self) -> np.ndarray:
        return self.posterior_means()

    def _final_sample(self, rng: np.random.Generator) -> Action:
        return self.select(rng)


class RandomBandit(BanditInstance):
    """Uniform selection; the final choice is the arm of highest mean
    among the pulled ones."""

    algorithm = "random"

    def select(self, rng: np.random.Generator) -> Action:
        return self.arms[int(rng.integers(len(self.arms)))]

    def _final_scores(self) -> np.ndarray:
        return np.where(self.counts > 0, self.means, -np.inf)


BANDITS = {
    "ucb": UCB1Bandit,
    "ts": ThompsonBandit,
    "random": RandomBandit,
}


def make_bandit(
    kind: str,
    arms: Sequence[Action],
    c: float = 2.0,
    alpha: float = 1.0,
    beta: float = 1.0,
) -> BanditInstance:
    """Build a bandit from its short name ('ucb', 'ts' or 'random')."""
    if kind == "ucb":
        return UCB1Bandit(arms, c)
    if kind == "ts":
        return ThompsonBandit(arms, alpha, beta)
    if kind == "random":
        return RandomBandit(arms)
    raise ValueError(
        f"{kind!r} is not a bandit. Use one of {', '.join(BANDITS)}."
    )


def ucb_score(arm: ArmStats, total: int, c: float) -> float:
    """UCB1 score ``Q + c * sqrt(ln N / n)`` of an arm; infinite when the
    arm has never been pulled.

    Examples
    --------
    >>> round(ucb_score(ArmStats(0, 1, 0.5, 0.75, 0.25), 4, 2.0), 4)
    2.8548
    """
    if total < 1:
        raise ValueError(f"Total pull count must be positive, got {total}.")
    if arm.count == 0:
        return math.inf
    return arm.mean + c * math.sqrt(math.log(total) / arm.count)


def ts_select(instance: ThompsonBandit, rng: np.random.Generator) -> Action:
    """Draw one posterior sample per arm and return the best arm."""
    return instance.select(rng)


def update(instance: BanditInstance, action: Action, value: float) -> None:
    instance.update(action, value)


def best_action(
    instance: BanditInstance,
    stochastic: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> Action:
    return instance.best_action(stochastic, rng)
