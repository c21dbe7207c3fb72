"""Test the counterexample commands."""
import json

from click.testing import CliRunner
from bsdelattice.cli.counterexample import counterexample

import pytest


def test_no_borrowing():
    runner = CliRunner()
    result = runner.invoke(counterexample, ['no-borrowing'])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report['command'] == 'counterexample no-borrowing'
    assert report['result']['reproduced']
    assert report['result']['mismatches'] == []


def test_no_borrowing_short_gap():
    runner = CliRunner()
    result = runner.invoke(counterexample, ['no-borrowing', '--t', '0.9'])
    assert result.exit_code == 0
    assert json.loads(result.output)['result']['reproduced']


def test_rate_threshold():
    runner = CliRunner()
    result = runner.invoke(counterexample, ['rate-threshold'])
    assert result.exit_code == 0
    data = json.loads(result.output)['result']
    assert data['reproduced']
    assert data['details']['rate_threshold'] == pytest.approx(0.988, abs=1e-3)


def test_rate_threshold_below():
    runner = CliRunner()
    result = runner.invoke(counterexample, ['rate-threshold', '--rb', '0.5'])
    assert result.exit_code == 0
    assert json.loads(result.output)['result']['reproduced']
