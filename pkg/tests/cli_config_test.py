"""Test the set-config commands."""
import os
import json
import shutil

from click.testing import CliRunner
from bsdelattice.cli.setconfig import set_config
from bsdelattice.config import settings


def _with_temp_config(tmpdir):
    original = settings.config_file
    temp_file = os.path.join(str(tmpdir), 'config.json')
    shutil.copyfile(original, temp_file)
    settings.config_file = temp_file
    return temp_file


def test_set_tolerance(tmpdir):
    temp_file = _with_temp_config(tmpdir)
    try:
        runner = CliRunner()
        result = runner.invoke(set_config, ['tolerance', '1e-10'])
        assert result.exit_code == 0
        assert 'tolerance successfully set to' in result.output
        assert settings.tolerance == 1e-10
        with open(temp_file) as inf:
            assert json.load(inf)['tolerance'] == 1e-10

        result = runner.invoke(set_config, ['tolerance'])
        assert result.exit_code == 0
        assert 'reset to default' in result.output
        assert settings.tolerance == 1e-12
    finally:
        settings.config_file = None


def test_set_max_iterations(tmpdir):
    _with_temp_config(tmpdir)
    try:
        runner = CliRunner()
        result = runner.invoke(set_config, ['max-iterations', '50'])
        assert result.exit_code == 0
        assert settings.max_iterations == 50
        result = runner.invoke(set_config, ['max-iterations', '0'])
        assert result.exit_code != 0
    finally:
        settings.config_file = None
    assert settings.max_iterations == 200


def test_set_damping(tmpdir):
    _with_temp_config(tmpdir)
    try:
        runner = CliRunner()
        result = runner.invoke(set_config, ['damping', '0.5'])
        assert result.exit_code == 0
        assert settings.damping == 0.5
        result = runner.invoke(set_config, ['damping', '0'])
        assert result.exit_code == 1
        assert settings.damping == 0.5
    finally:
        settings.config_file = None


def test_set_default_output_folder(tmpdir):
    _with_temp_config(tmpdir)
    folder = str(tmpdir.mkdir('runs'))
    try:
        runner = CliRunner()
        result = runner.invoke(set_config, ['default-output-folder', folder])
        assert result.exit_code == 0
        assert os.path.normcase(settings.default_output_folder) == \
            os.path.normcase(os.path.realpath(folder))
    finally:
        settings.config_file = None
