"""Tests for experiment configuration and the command-line runner."""

import json
import math

import pytest

import polariton
from src.config import Config, ExperimentConfig
from src.core.errors import ConfigurationError


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(Config, 'OUTPUT_DIR', tmp_path / 'default')
    return tmp_path / 'out'


class TestExperimentConfig:

    def test_defaults(self):
        config = ExperimentConfig.from_sources()
        assert config.r == 0.74
        assert config.platforms == ['qubit', 'qudit', 'qumode']
        assert config.n_b_max == Config.NB_MAX

    def test_file_then_flags(self, tmp_path):
        path = tmp_path / 'experiment.env'
        path.write_text("# H2 scan\nLAMBDA=0.1\nLAYERS=3\nPLATFORMS=qudit,qumode\nLAMBDAS=0.0;0.1\n")
        config = ExperimentConfig.from_sources(str(path), {'layers': 4, 'r': None})
        assert config.coupling == 0.1
        assert config.layers == 4
        assert config.r == 0.74
        assert config.platforms == ['qudit', 'qumode']
        assert config.couplings == [0.0, 0.1]

    def test_unknown_key(self, tmp_path):
        path = tmp_path / 'experiment.env'
        path.write_text("LAMBDA=0.1\nCOLOUR=blue\n")
        with pytest.raises(ConfigurationError, match='COLOUR'):
            ExperimentConfig.from_sources(str(path))

    def test_bad_value(self, tmp_path):
        path = tmp_path / 'experiment.env'
        path.write_text("LAYERS=three\n")
        with pytest.raises(ConfigurationError, match='LAYERS'):
            ExperimentConfig.from_sources(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_sources(str(tmp_path / 'absent.env'))

    @pytest.mark.parametrize('overrides', [
        {'r': 0.0},
        {'coupling': -0.1},
        {'platforms': ['qubit', 'trapped-ion']},
        {'r_min': 1.0, 'r_max': 0.5},
        {'layer_list': [2, 1]},
        {'cutoffs': []},
        {'jobs': 0},
        {'dipole': 'h2.DIPOLE'},
    ])
    def test_validation(self, overrides):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_sources(None, overrides)

    def test_grids(self):
        config = ExperimentConfig(r_min=0.4, r_max=1.0, r_steps=31, theta_steps=1, theta_min=0.5)
        grid = config.r_grid()
        assert len(grid) == 31
        assert grid[0] == pytest.approx(0.4)
        assert grid[-1] == pytest.approx(1.0)
        assert grid[1] - grid[0] == pytest.approx(0.02)
        assert config.theta_grid() == [0.5]
        assert ExperimentConfig(theta_steps=3).theta_grid()[-1] == pytest.approx(math.pi)

    def test_dict_round_trip(self):
        config = ExperimentConfig(coupling=0.2, platforms=['qumode'])
        assert ExperimentConfig(**config.to_dict()) == config

    def test_output_dir(self, output_dir):
        assert ExperimentConfig().output_dir == Config.OUTPUT_DIR
        assert ExperimentConfig(out=str(output_dir)).output_dir == output_dir


class TestRunner:

    def test_resources_command(self, output_dir):
        code = polariton.main(['resources', '--platform', 'qudit', '--layers', '2', '--out', str(output_dir)])
        assert code == polariton.EXIT_OK
        with open(output_dir / 'resources.json') as f:
            saved = json.load(f)
        assert saved['command'] == 'resources'
        assert saved['result']['platforms']['qudit']['entangling_gates'] == 24

    def test_configuration_error(self, output_dir):
        code = polariton.main(['qedfci', '--lambda', '-0.1', '--out', str(output_dir)])
        assert code == polariton.EXIT_CONFIG

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as info:
            polariton.main(['dance'])
        assert info.value.code == 2

    def test_numeric_failure(self, output_dir, tmp_path):
        code = polariton.main(['qedfci', '--fcidump', str(tmp_path / 'absent.FCIDUMP'),
                               '--out', str(output_dir)])
        assert code == polariton.EXIT_NUMERIC

    def test_list_flags(self):
        args = polariton.build_parser().parse_args(
            ['truncation', '--lambdas', '0,0.1', '--cutoffs', '3,7', '--platform', 'qubit', '--platform', 'qumode'])
        assert args.couplings == [0.0, 0.1]
        assert args.cutoffs == [3, 7]
        assert args.platforms == ['qubit', 'qumode']

    def test_runner_rejects_unknown_command(self, output_dir):
        runner = polariton.ExperimentRunner(ExperimentConfig(out=str(output_dir)))
        with pytest.raises(ConfigurationError):
            runner.run('dance')
