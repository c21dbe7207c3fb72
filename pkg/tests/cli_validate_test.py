"""Test basic CLI commands and the validate group"""
import json

from click.testing import CliRunner
from bsdelattice.cli import config
from bsdelattice.cli.validate import validate_config_cli


def test_config():
    runner = CliRunner()
    result = runner.invoke(config)
    assert result.exit_code == 0
    config_dict = json.loads(result.output)
    assert len(config_dict) >= 5
    assert 'tolerance' in config_dict


def test_validate_config():
    runner = CliRunner()
    result = runner.invoke(validate_config_cli,
                           ['./bsdelattice/samples/vanilla_call.json'])
    assert result.exit_code == 0
    assert 'Valid run configuration' in result.output


def test_validate_config_json():
    runner = CliRunner()
    result = runner.invoke(validate_config_cli,
                           ['./bsdelattice/samples/vanilla_call.json', '--json'])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report['valid']
    assert report['local']
    assert len(report['config_hash']) == 64


def test_validate_syntax_error():
    runner = CliRunner()
    result = runner.invoke(validate_config_cli,
                           ['./tests/json/config_syntax_error.json', '--json'])
    assert result.exit_code == 2
    report = json.loads(result.output)
    assert not report['valid']
    assert ':6:5:' in report['error']


def test_validate_broken_invariant():
    runner = CliRunner()
    result = runner.invoke(validate_config_cli,
                           ['./bsdelattice/samples/bad_collateral.json'])
    assert result.exit_code == 3
    assert 'Invalid run configuration' in result.output
    assert 'C_T = 0' in result.output


def test_validate_global_problem():
    runner = CliRunner()
    result = runner.invoke(validate_config_cli,
                           ['./bsdelattice/samples/global_rate.json', '--json'])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report['valid']
    assert not report['local']
