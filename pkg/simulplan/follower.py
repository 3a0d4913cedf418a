"""Follower policy imitating a full-state oracle planner.

The follower sees only the feature planes of its own observation. It is
trained on (observation, oracle action) pairs, either collected while the
follower itself plays (DAgger) or while the oracle plays (behavioral
cloning).
"""

import hashlib
import logging
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import (
    Deque,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Tuple,
    Union,
)

import numpy as np
from joblib import Parallel, delayed

from .exceptions import (
    CheckpointError,
    ConfigError,
    EmptyMaskError,
    TerminalStateError,
)
from .game import NO_OP, Action, JointAction
from .gridarena import (
    ACTIONS,
    NUM_PLANES,
    ArenaConfig,
    GridState,
    featurize,
    generate_board,
)
from .planners import Planner, PlannerConfig

logger = logging.getLogger(__name__)

CHECKPOINT_HEADER = "SIMULPLAN-FOLLOWER v1"
MODES = ("dagger", "bc")


@dataclass(frozen=True)
class TrainingConfig:
    """Hyperparameters of follower training.

    Parameters
    ----------
    grad_steps : int
        Gradient steps run after every episode, by default 200.
    batch_size : int
        Samples per gradient step, by default 32.
    learning_rate : float
        Adam step size, by default 1e-3.
    hidden : int
        Width of the tanh hidden layer; 0 for an affine scorer.
    capacity : int, optional
        Maximum size of the replay buffer; unbounded by default.
    workers : int
        Parallel episodes during behavioral-cloning data collection.
    """

    grad_steps: int = 200
    batch_size: int = 32
    learning_rate: float = 1e-3
    hidden: int = 0
    capacity: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        checks = {
            "grad_steps": self.grad_steps >= 0,
            "batch_size": self.batch_size >= 1,
            "learning_rate": self.learning_rate > 0,
            "hidden": self.hidden >= 0,
            "capacity": self.capacity is None or self.capacity >= 1,
            "workers": self.workers >= 1,
        }
        for name, ok in checks.items():
            if not ok:
                raise ConfigError(
                    reason=f"follower {name}={getattr(self, name)!r} is out "
                    "of range"
                )


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


class FollowerPolicy:
    """Scorer mapping flat features to one score per action, with an
    optional tanh hidden layer. Parameters live in one flat vector.

    Parameters
    ----------
    num_features : int
        Length of the flat feature vector.
    num_actions : int, optional
        Number of actions, by default the 6 actions of the arena.
    hidden : int, optional
        Width of the hidden layer; 0 for an affine map.
    seed : int, optional
        Seed of the initial parameters.
    scale : float, optional
        Standard deviation of the initial weights, by default 0.01.
    """

    def __init__(
        self,
        num_features: int,
        num_actions: int = len(ACTIONS),
        hidden: int = 0,
        seed: int = 0,
        scale: float = 0.01,
    ):
        self.num_features = num_features
        self.num_actions = num_actions
        self.hidden = hidden
        self.seed = seed
        self.episodes = 0
        rng = np.random.default_rng(seed)
        self.params = np.concatenate(
            [
                rng.normal(0.0, scale, size=int(np.prod(shape)))
                if len(shape) == 2
                else np.zeros(int(np.prod(shape)))
                for shape in self.shapes
            ]
        )

    def __repr__(self):
        return (
            f"FollowerPolicy(features={self.num_features}, "
            f"actions={self.num_actions}, hidden={self.hidden})"
        )

    @classmethod
    def for_arena(
        cls, config: ArenaConfig, hidden: int = 0, seed: int = 0
    ) -> "FollowerPolicy":
        return cls(NUM_PLANES * config.size**2, len(ACTIONS), hidden, seed)

    @property
    def shapes(self) -> List[Tuple[int, ...]]:
        f, a, h = self.num_features, self.num_actions, self.hidden
        if h:
            return [(f, h), (h,), (h, a), (a,)]
        return [(f, a), (a,)]

    def _unpack(self, params: np.ndarray) -> List[np.ndarray]:
        arrays = []
        offset = 0
        for shape in self.shapes:
            size = int(np.prod(shape))
            arrays.append(params[offset : offset + size].reshape(shape))
            offset += size
        return arrays

    def _forward(
        self, features: np.ndarray, params: np.ndarray
    ) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        x = np.atleast_2d(features)
        if self.hidden:
            w1, b1, w2, b2 = self._unpack(params)
            h = np.tanh(x @ w1 + b1)
            return h @ w2 + b2, h
        w, b = self._unpack(params)
        return x @ w + b, None

    def scores(self, features: np.ndarray) -> np.ndarray:
        """Scores of shape ``(batch, num_actions)``."""
        return self._forward(features, self.params)[0]

    def probabilities(self, features: np.ndarray) -> np.ndarray:
        return softmax(self.scores(features))

    def loss_and_grad(
        self,
        features: np.ndarray,
        labels: np.ndarray,
        params: Optional[np.ndarray] = None,
    ) -> Tuple[float, np.ndarray]:
        """Mean cross-entropy of the labels and its gradient with respect to
        the flat parameter vector."""
        params = self.params if params is None else params
        x = np.atleast_2d(features)
        labels = np.asarray(labels, dtype=np.int64)
        n = len(labels)
        scores, h = self._forward(x, params)
        p = softmax(scores)
        loss = -np.log(p[np.arange(n), labels] + 1e-300).mean()
        ds = p
        ds[np.arange(n), labels] -= 1.0
        ds /= n
        if self.hidden:
            _, _, w2, _ = self._unpack(params)
            dz = (ds @ w2.T) * (1.0 - h**2)
            grads = [x.T @ dz, dz.sum(axis=0), h.T @ ds, ds.sum(axis=0)]
        else:
            grads = [x.T @ ds, ds.sum(axis=0)]
        return float(loss), np.concatenate([g.ravel() for g in grads])

    def act(self, observation: np.ndarray, mask: Iterable[Action]) -> Action:
        return follower_act(self, observation, mask)


def follower_act(
    policy: FollowerPolicy, observation: np.ndarray, mask: Iterable[Action]
) -> Action:
    """Highest-scoring action among the masked-legal ones, lowest id first
    on ties.

    Raises
    ------
    EmptyMaskError
        When `mask` is empty.
    """
    legal = sorted(set(int(a) for a in mask))
    if not legal:
        raise EmptyMaskError()
    scores = policy.scores(np.ravel(observation))[0]
    return legal[int(np.argmax(scores[legal]))]


def parameter_hash(policy: FollowerPolicy) -> str:
    """SHA-256 of the parameters."""
    return hashlib.sha256(policy.params.astype("<f8").tobytes()).hexdigest()


class Adam:
    """Adam optimiser over a flat parameter vector."""

    def __init__(
        self,
        size: int,
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        """Update `params` in place."""
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad**2
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        params -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


class DaggerSample(NamedTuple):
    features: np.ndarray
    label: Action
    player: int
    episode: int
    step: int


class ReplayBuffer:
    """Training samples, oldest dropped first once `capacity` is reached."""

    def __init__(self, capacity: Optional[int] = None):
        self.capacity = capacity
        self.samples: Deque[DaggerSample] = deque(maxlen=capacity)

    def __len__(self):
        return len(self.samples)

    def add(self, sample: DaggerSample) -> None:
        self.samples.append(sample)

    def extend(self, samples: Iterable[DaggerSample]) -> None:
        self.samples.extend(samples)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        x = np.stack([s.features for s in self.samples])
        y = np.array([s.label for s in self.samples], dtype=np.int64)
        return x, y

    def sample_batch(
        self, rng: np.random.Generator, size: int
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Uniform draw with replacement."""
        idx = rng.integers(len(self.samples), size=size)
        x = np.stack([self.samples[i].features for i in idx])
        y = np.array([self.samples[i].label for i in idx], dtype=np.int64)
        return x, y

    def export(self, path: Union[str, Path]) -> None:
        """Write one line per sample: label, player, episode, step, then
        the features as fixed-width decimals."""
        with open(path, "w", encoding="utf-8") as f:
            for s in self.samples:
                values = " ".join(f"{v:.6f}" for v in s.features)
                meta = f"{s.label} {s.player} {s.episode} {s.step}"
                f.write(f"{meta} {values}\n")

    @classmethod
    def load(
        cls, path: Union[str, Path], capacity: Optional[int] = None
    ) -> "ReplayBuffer":
        buffer = cls(capacity)
        with open(path, encoding="utf-8") as f:
            for line in f:
                fields = line.split()
                if not fields:
                    continue
                label, player, episode, step = (int(v) for v in fields[:4])
                features = np.array([float(v) for v in fields[4:]])
                buffer.add(
                    DaggerSample(features, label, player, episode, step)
                )
        return buffer


def save_checkpoint(policy: FollowerPolicy, path: Union[str, Path]) -> None:
    """Write the parameters as little-endian doubles after a plain-text
    header."""
    header = "\n".join(
        [
            CHECKPOINT_HEADER,
            f"features {policy.num_features}",
            f"actions {policy.num_actions}",
            f"hidden {policy.hidden}",
            f"seed {policy.seed}",
            f"episodes {policy.episodes}",
            "",
            "",
        ]
    )
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(policy.params.astype("<f8").tobytes())
    logger.info(f"checkpoint written to {path}")


def load_checkpoint(path: Union[str, Path]) -> FollowerPolicy:
    """Read a checkpoint written by `save_checkpoint`.

    Raises
    ------
    CheckpointError
        When the file is missing, has another format or is truncated.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(path=path, reason=e.strerror or str(e))
    head, sep, body = data.partition(b"\n\n")
    lines = head.decode("ascii", errors="replace").splitlines()
    if not sep or not lines or lines[0] != CHECKPOINT_HEADER:
        raise CheckpointError(path=path, reason="unknown format")
    try:
        meta = {k: int(v) for k, v in (line.split() for line in lines[1:])}
        policy = FollowerPolicy(
            meta["features"], meta["actions"], meta["hidden"], meta["seed"]
        )
    except (KeyError, ValueError) as e:
        raise CheckpointError(path=path, reason=f"bad header ({e})")
    policy.episodes = meta.get("episodes", 0)
    params = np.frombuffer(body, dtype="<f8")
    if params.shape != policy.params.shape:
        raise CheckpointError(
            path=path,
            reason=f"{params.size} parameters, expected {policy.params.size}",
        )
    policy.params = params.astype(float)
    return policy


def train(
    policy: FollowerPolicy,
    buffer: ReplayBuffer,
    steps: int,
    batch_size: int,
    optimizer: Adam,
    rng: np.random.Generator,
) -> Optional[float]:
    """Run gradient steps on minibatches of the buffer; return the last
    loss."""
    loss = None
    if not len(buffer):
        return loss
    for _ in range(steps):
        x, y = buffer.sample_batch(rng, batch_size)
        loss, grad = policy.loss_and_grad(x, y)
        optimizer.step(policy.params, grad)
    return loss


def _oracle_labels(
    oracle: Planner, state: GridState, episode: int
) -> Optional[JointAction]:
    try:
        return oracle.plan(state)
    except TerminalStateError as e:
        logger.warning(
            f"episode {episode}, step {state.step_count}: oracle step "
            f"skipped, {e}"
        )
        return None


def play_episode(
    oracle_config: PlannerConfig,
    arena: ArenaConfig,
    board_seed: int,
    episode: int,
    follower: Optional[FollowerPolicy] = None,
) -> List[DaggerSample]:
    """Play one self-play episode and label every visited state with the
    oracle joint action.

    The follower drives every seat when given (DAgger); otherwise the
    oracle plays its own labels (behavioral cloning). A step the oracle
    fails to plan yields no sample; the game goes on with the follower
    moves, or with the first safe action of every seat.
    """
    state = generate_board(board_seed, arena)
    oracle = Planner(oracle_config, arena.num_players)
    samples: List[DaggerSample] = []
    while not state.is_terminal:
        observations = {
            p: featurize(state, p).ravel() for p in state.players_to_act()
        }
        labels = _oracle_labels(oracle, state, episode)
        if labels is not None:
            for p, obs in observations.items():
                samples.append(
                    DaggerSample(obs, labels[p], p, episode, state.step_count)
                )
        if follower is None and labels is not None:
            joint: JointAction = labels
        else:
            moves = [NO_OP] * state.num_players
            for p, obs in observations.items():
                mask = state.masked_actions(p)
                if follower is None:
                    moves[p] = mask[0]
                else:
                    moves[p] = follower.act(obs, mask)
            joint = tuple(moves)
        state = state.step(joint)  # type: ignore[assignment]
        oracle.advance(state)
    return samples


def _episode_seeds(
    rng: np.random.Generator, episodes: int
) -> List[Tuple[int, int]]:
    draws = rng.integers(2**31 - 1, size=(episodes, 2))
    return [(int(b), int(o)) for b, o in draws]


def _check_episodes(episodes: int) -> None:
    if episodes < 1:
        raise ConfigError(reason="episodes must be at least 1")


def dagger_train(
    oracle_config: PlannerConfig,
    follower: FollowerPolicy,
    episodes: int,
    rng: np.random.Generator,
    settings: Optional[TrainingConfig] = None,
    arena: Optional[ArenaConfig] = None,
    buffer: Optional[ReplayBuffer] = None,
) -> FollowerPolicy:
    """Train a follower with DAgger.

    In every episode the follower plays all the seats from its partial
    observations while the oracle planner, which sees the full state,
    labels each visited state. The samples are added to the replay buffer
    and a fixed number of gradient steps follows the episode.

    Parameters
    ----------
    oracle_config : PlannerConfig
        Oracle planner; its seed is redrawn for every episode from `rng`.
    follower : FollowerPolicy
        Policy trained in place and returned.
    episodes : int
        Number of self-play episodes, at least 1.
    rng : numpy.random.Generator
        Source of the board seeds, oracle seeds and minibatches.
    settings : TrainingConfig, optional
        Training hyperparameters.
    arena : ArenaConfig, optional
        Arena rules, by default the fast profile.
    buffer : ReplayBuffer, optional
        Replay buffer to fill; a new one by default.

    Returns
    -------
    FollowerPolicy
        The trained `follower`.
    """
    return _train_loop(
        "dagger",
        oracle_config,
        follower,
        episodes,
        rng,
        settings,
        arena,
        buffer,
    )


def behavioral_clone(
    oracle_config: PlannerConfig,
    follower: FollowerPolicy,
    episodes: int,
    rng: np.random.Generator,
    settings: Optional[TrainingConfig] = None,
    arena: Optional[ArenaConfig] = None,
    buffer: Optional[ReplayBuffer] = None,
) -> FollowerPolicy:
    """Train a follower on trajectories played by the oracle itself.

    Same parameters as `dagger_train`. Since the follower does not act,
    episodes are collected in parallel when `settings.workers` > 1.
    """
    return _train_loop(
        "bc", oracle_config, follower, episodes, rng, settings, arena, buffer
    )


def _train_loop(
    mode: str,
    oracle_config: PlannerConfig,
    follower: FollowerPolicy,
    episodes: int,
    rng: np.random.Generator,
    settings: Optional[TrainingConfig],
    arena: Optional[ArenaConfig],
    buffer: Optional[ReplayBuffer],
) -> FollowerPolicy:
    _check_episodes(episodes)
    settings = settings or TrainingConfig()
    arena = arena or ArenaConfig.profile("fast")
    buffer = ReplayBuffer(settings.capacity) if buffer is None else buffer
    optimizer = Adam(follower.params.size, settings.learning_rate)
    seeds = _episode_seeds(rng, episodes)

    collected: Optional[List[List[DaggerSample]]] = None
    if mode == "bc" and settings.workers > 1:
        collected = Parallel(n_jobs=settings.workers)(
            delayed(play_episode)(
                oracle_config.with_seed(oracle_seed), arena, board_seed, e
            )
            for e, (board_seed, oracle_seed) in enumerate(seeds)
        )

    for e, (board_seed, oracle_seed) in enumerate(seeds):
        if collected is not None:
            samples = collected[e]
        else:
            samples = play_episode(
                oracle_config.with_seed(oracle_seed),
                arena,
                board_seed,
                e,
                follower if mode == "dagger" else None,
            )
        buffer.extend(samples)
        loss = train(
            follower,
            buffer,
            settings.grad_steps,
            settings.batch_size,
            optimizer,
            rng,
        )
        follower.episodes += 1
        logger.info(
            f"{mode} episode {e + 1}/{episodes}: {len(samples)} samples, "
            f"buffer {len(buffer)}, loss {loss}"
        )
    return follower
