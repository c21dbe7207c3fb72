# coding=utf-8
from bsdelattice.runconfig import RunConfig, parse_config, parse_config_text, \
    load_run_config
from bsdelattice.pricing import solve_contract
from bsdelattice.config import settings
from bsdelattice.errors import ConfigSyntaxError, InvariantError, \
    GlobalProblemError, exit_code_for

import json
import pytest


def test_parse_config():
    """Test reading a run configuration with every section."""
    config = parse_config('./tests/json/config_dividend_put.json')
    assert config.identifier == 'dividend_put'
    assert config.n_steps == 8
    assert config.x == 5
    assert config.task_value('t') == 4
    assert config.task_value('seed', 7) == 7
    assert config.mirror_adjustments() == []
    assert config.asset.dividends
    assert len(config.contract.adjustments) == 1
    market = config.market
    assert market is config.market
    assert market.node_count == 45
    assert len(config.config_hash) == 64


def test_config_round_trip():
    """Test that a configuration survives its JSON form unchanged."""
    config = parse_config('./bsdelattice/samples/bergman_short_call.json')
    new_config = parse_config_text(config.to_json())
    assert new_config.to_dict() == config.to_dict()
    assert new_config.config_hash == config.config_hash


def test_syntax_error():
    """Test that malformed JSON reports its line and column."""
    path = './tests/json/config_syntax_error.json'
    with pytest.raises(ConfigSyntaxError) as err:
        parse_config(path)
    assert err.value.line == 6
    assert err.value.column == 5
    assert str(err.value).startswith('{}:6:5:'.format(path))
    assert exit_code_for(err.value) == 2


def test_invariant_errors():
    """Test that semantic problems name the broken invariant."""
    with pytest.raises(InvariantError) as err:
        parse_config('./tests/json/config_unknown_section.json')
    assert 'known config sections' in str(err.value)
    with pytest.raises(InvariantError) as err:
        parse_config('./bsdelattice/samples/bad_collateral.json')
    assert 'C_T = 0' in str(err.value)
    assert exit_code_for(err.value) == 3

    with open('./bsdelattice/samples/vanilla_call.json') as inf:
        data = json.load(inf)
    data['task']['x'] = -1
    with pytest.raises(InvariantError):
        RunConfig.from_dict(data)
    data['task'] = {'x': 0, 'greeks': True}
    with pytest.raises(InvariantError):
        RunConfig.from_dict(data)
    data['task'] = {'x': 0}
    data['market']['n_steps'] = 50
    with pytest.raises(InvariantError) as err:
        RunConfig.from_dict(data)
    assert 'flows within [0, T]' in str(err.value)
    del data['market']['asset']
    with pytest.raises(InvariantError):
        RunConfig.from_dict(data)


def test_global_config():
    """Test that a global problem parses but cannot be priced."""
    config = parse_config('./bsdelattice/samples/global_rate.json')
    assert not config.contract.is_local
    with pytest.raises(GlobalProblemError) as err:
        solve_contract(config.market, config.contract, config.x)
    assert exit_code_for(err.value) == 6


def test_with_steps():
    """Test moving a configuration to a finer lattice."""
    config = parse_config('./tests/json/config_dividend_put.json')
    finer = config.with_steps(16)
    assert finer.n_steps == 16
    assert finer.dt == pytest.approx(0.0625)
    assert finer.task_value('t') == 8
    assert finer.asset.dividends[0]['step'] == 8
    assert finer.contract.stream.maturity_step == 16
    assert config.with_steps(8) is config
    with pytest.raises(InvariantError):
        config.with_steps(5)


def test_load_run_config():
    """Test that loading a configuration applies its solver settings."""
    tolerance, iterations = settings.tolerance, settings.max_iterations
    try:
        config = load_run_config('./tests/json/config_dividend_put.json', 16)
        assert config.n_steps == 16
        assert settings.max_iterations == 100
    finally:
        settings.tolerance = tolerance
        settings.max_iterations = iterations
