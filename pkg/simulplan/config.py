"""Run configuration: bundled defaults, a user JSON file, then flags.

Later layers win. The worker count may also come from the SIMULPLAN_WORKERS
environment variable, which a ``--workers`` flag still overrides.
"""

import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from .agents import check_specs
from .datafile import load_file, read_json
from .exceptions import ConfigError
from .follower import MODES, TrainingConfig
from .gridarena import ArenaConfig
from .harness import ENVIRONMENTS, INTERVALS, Environment

logger = logging.getLogger(__name__)

WORKERS_VARIABLE = "SIMULPLAN_WORKERS"

PLANNER_KEYS = (
    "iterations",
    "depth",
    "c",
    "alpha",
    "beta",
    "value_fn",
    "stochastic_final",
)

# range checks: (section, key) -> (predicate, requirement)
RANGES = {
    ("run", "workers"): (lambda v: v >= 1, "at least 1"),
    ("run", "interval"): (lambda v: v in INTERVALS, "normal or wilson"),
    ("env", "name"): (lambda v: v in ENVIRONMENTS, " or ".join(ENVIRONMENTS)),
    ("env", "profile"): (
        lambda v: v in ArenaConfig.PROFILES,
        " or ".join(ArenaConfig.PROFILES),
    ),
    ("env", "step_limit"): (lambda v: v is None or v >= 1, "at least 1"),
    ("planner", "iterations"): (lambda v: v >= 1, "at least 1"),
    ("planner", "depth"): (lambda v: v >= 1, "at least 1"),
    ("planner", "c"): (lambda v: v >= 0, "non-negative"),
    ("planner", "alpha"): (lambda v: v > 0, "positive"),
    ("planner", "beta"): (lambda v: v > 0, "positive"),
    ("tournament", "games"): (lambda v: v >= 1, "at least 1"),
    ("pair", "games"): (lambda v: v >= 1, "at least 1"),
    ("follower", "mode"): (lambda v: v in MODES, " or ".join(MODES)),
    ("follower", "episodes"): (lambda v: v >= 1, "at least 1"),
    ("follower", "grad_steps"): (lambda v: v >= 0, "at least 0"),
    ("follower", "batch_size"): (lambda v: v >= 1, "at least 1"),
    ("follower", "learning_rate"): (lambda v: v > 0, "positive"),
    ("follower", "hidden"): (lambda v: v >= 0, "at least 0"),
    ("follower", "eval_games"): (lambda v: v >= 0, "at least 0"),
    ("revisits", "games"): (lambda v: v >= 1, "at least 1"),
    ("matrix", "iterations"): (lambda v: v >= 1, "at least 1"),
    ("matrix", "trials"): (lambda v: v >= 1, "at least 1"),
}


def deep_merge(
    base: Mapping[str, Any], override: Mapping[str, Any]
) -> Dict[str, Any]:
    """Copy of `base` updated with `override`, merging nested mappings."""
    merged = copy.deepcopy(dict(base))
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse a user configuration file.

    Raises
    ------
    ConfigError
        When the file is missing, is not valid JSON (with line and column),
        or holds unknown sections or keys.
    """
    data = read_json(path)
    if not isinstance(data, dict):
        raise ConfigError(path=path, reason="top level must be an object")
    defaults = load_file("defaults")
    for section, values in data.items():
        if section not in defaults:
            raise ConfigError(path=path, reason=f"unknown section {section!r}")
        if not isinstance(values, dict):
            raise ConfigError(
                path=path, reason=f"section {section!r} must be an object"
            )
        for key in values:
            if key not in defaults[section]:
                raise ConfigError(
                    path=path, reason=f"unknown key {section}.{key}"
                )
    return data


class RunConfig:
    """Merged configuration of one command-line run.

    Parameters
    ----------
    data : dict
        Sections ``run``, ``env``, ``planner``, ``tournament``, ``pair``,
        ``follower``, ``revisits`` and ``matrix``.
    path : str, optional
        File the user layer was read from, used in error messages.
    """

    def __init__(self, data: Dict[str, Any], path: Optional[str] = None):
        self.data = data
        self.path = path or ""
        self.validate()

    def __getitem__(self, section: str) -> Dict[str, Any]:
        return self.data[section]

    @classmethod
    def load(
        cls,
        path: Optional[Union[str, Path]] = None,
        overrides: Optional[Mapping[str, Mapping[str, Any]]] = None,
        environ: Optional[Mapping[str, str]] = None,
    ) -> "RunConfig":
        """Merge the bundled defaults, the file at `path` and `overrides`.

        `overrides` holds the values given on the command line, by section;
        ``None`` values are ignored.
        """
        data = load_file("defaults")
        if path is not None:
            data = deep_merge(data, read_config_file(path))
        environ = os.environ if environ is None else environ
        flags = {
            section: {k: v for k, v in values.items() if v is not None}
            for section, values in (overrides or {}).items()
        }
        raw_workers = environ.get(WORKERS_VARIABLE)
        if raw_workers and "workers" not in flags.get("run", {}):
            try:
                data["run"]["workers"] = int(raw_workers)
            except ValueError:
                raise ConfigError(
                    path=WORKERS_VARIABLE,
                    reason=f"{raw_workers!r} is not an integer",
                )
        data = deep_merge(data, flags)
        return cls(data, None if path is None else str(path))

    def validate(self) -> None:
        """Check every documented range.

        Raises
        ------
        ConfigError
            Naming the first offending key.
        """
        for (section, key), (check, requirement) in RANGES.items():
            value = self.data[section].get(key)
            try:
                ok = check(value)
            except TypeError:
                ok = False
            if not ok:
                raise ConfigError(
                    path=self.path,
                    reason=f"{section}.{key}={value!r} must be {requirement}",
                )

    @property
    def seed(self) -> int:
        return int(self.data["run"]["seed"])

    @property
    def workers(self) -> int:
        return int(self.data["run"]["workers"])

    @property
    def output_dir(self) -> Path:
        return Path(self.data["run"]["output_dir"])

    @property
    def interval(self) -> str:
        return self.data["run"]["interval"]

    def environment(self, name: Optional[str] = None) -> Environment:
        env = self.data["env"]
        return Environment.make(
            name or env["name"],
            env["profile"],
            env["step_limit"],
            env["matrix_game"],
        )

    def planner_overrides(self) -> Dict[str, Any]:
        """`PlannerConfig` fields shared by every planner of the run."""
        return {key: self.data["planner"][key] for key in PLANNER_KEYS}

    def check_agents(self, specs: List[str], grid: bool = True) -> None:
        """Validate agent specifications; errors name this configuration
        file."""
        check_specs(specs, grid, self.planner_overrides(), self.path)

    def training_config(self) -> TrainingConfig:
        follower = self.data["follower"]
        return TrainingConfig(
            grad_steps=follower["grad_steps"],
            batch_size=follower["batch_size"],
            learning_rate=follower["learning_rate"],
            hidden=follower["hidden"],
            capacity=follower["capacity"],
            workers=self.workers,
        )

    def as_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.data)


def listify(value: Union[str, List[str]]) -> List[str]:
    if isinstance(value, str):
        return [value]
    return list(value)
