import json

import pytest

from simulplan.config import RunConfig, deep_merge, listify, read_config_file
from simulplan.exceptions import ConfigError, UnknownAgentSpec


def write_config(tmp_path, data):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data))
    return path


class TestRunConfig:

    def test_defaults(self):
        config = RunConfig.load(environ={})
        assert config.seed == 0
        assert config.workers == 1
        assert config.interval == "normal"
        assert config["tournament"]["games"] == 400
        assert config.environment().num_players == 4

    def test_file_layer(self, tmp_path):
        path = write_config(tmp_path, {"run": {"seed": 9}})
        config = RunConfig.load(path, environ={})
        assert config.seed == 9
        assert config.workers == 1

    def test_flags_win(self, tmp_path):
        path = write_config(tmp_path, {"run": {"seed": 9}})
        overrides = {"run": {"seed": 4}, "planner": {"depth": None}}
        config = RunConfig.load(path, overrides, environ={})
        assert config.seed == 4
        assert config["planner"]["depth"] == 20

    def test_workers_variable(self):
        config = RunConfig.load(environ={"SIMULPLAN_WORKERS": "3"})
        assert config.workers == 3
        config = RunConfig.load(
            overrides={"run": {"workers": 2}},
            environ={"SIMULPLAN_WORKERS": "3"},
        )
        assert config.workers == 2

    def test_bad_workers_variable(self):
        with pytest.raises(ConfigError):
            RunConfig.load(environ={"SIMULPLAN_WORKERS": "many"})

    def test_out_of_range(self):
        with pytest.raises(ConfigError) as e:
            RunConfig.load(overrides={"tournament": {"games": 0}}, environ={})
        assert "tournament.games" in e.value.msg

    def test_unknown_environment(self):
        with pytest.raises(ConfigError):
            RunConfig.load(overrides={"env": {"name": "go"}}, environ={})

    def test_planner_overrides(self):
        config = RunConfig.load(
            overrides={"planner": {"iterations": 12}}, environ={}
        )
        overrides = config.planner_overrides()
        assert overrides["iterations"] == 12
        assert overrides["depth"] == 20
        assert "seed" not in overrides

    def test_training_config(self):
        config = RunConfig.load(
            overrides={"run": {"workers": 2}, "follower": {"hidden": 8}},
            environ={},
        )
        settings = config.training_config()
        assert settings.hidden == 8
        assert settings.workers == 2

    def test_step_limit(self):
        config = RunConfig.load(
            overrides={"env": {"name": "gridarena2p", "step_limit": 30}},
            environ={},
        )
        assert config.environment().arena.step_limit == 30

    def test_check_agents_names_file(self, tmp_path):
        path = write_config(tmp_path, {"tournament": {"seat0": "mcs-x"}})
        config = RunConfig.load(path, environ={})
        with pytest.raises(UnknownAgentSpec) as e:
            config.check_agents([config["tournament"]["seat0"], "rule"])
        assert e.value.spec == "mcs-x"
        assert e.value.msg.startswith(f"{path}: ")

    def test_check_agents_grid_only(self, tmp_path):
        config = RunConfig.load(environ={})
        config.check_agents(["mcts-ts", "random"], grid=False)
        with pytest.raises(ConfigError) as e:
            config.check_agents(["rule"], grid=False)
        assert "grid arena" in e.value.msg


class TestReadConfigFile:

    def test_syntax_error(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text('{\n  "run": {"seed": 1,}\n}\n')
        with pytest.raises(ConfigError) as e:
            read_config_file(path)
        assert e.value.line == 2
        assert e.value.column is not None
        assert e.value.msg.startswith(f"{path}:2:")

    def test_unknown_section(self, tmp_path):
        path = write_config(tmp_path, {"server": {}})
        with pytest.raises(ConfigError):
            read_config_file(path)

    def test_unknown_key(self, tmp_path):
        path = write_config(tmp_path, {"run": {"threads": 4}})
        with pytest.raises(ConfigError) as e:
            read_config_file(path)
        assert "run.threads" in e.value.msg

    def test_missing(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(tmp_path / "nothing.json")


def test_deep_merge():
    base = {"a": {"x": 1, "y": 2}, "b": [1]}
    merged = deep_merge(base, {"a": {"y": 3}, "b": [2]})
    assert merged == {"a": {"x": 1, "y": 3}, "b": [2]}
    assert base["a"]["y"] == 2


def test_listify():
    assert listify("rule") == ["rule"]
    assert listify(("rule", "random")) == ["rule", "random"]
