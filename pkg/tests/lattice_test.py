# coding=utf-8
from bsdelattice.account import AccountSet
from bsdelattice.lattice import LatticeAsset, DeterministicAsset, LatticeMarket, \
    build_lattice, discounted_cum_dividend_price, ALIVE, CLOSED
from bsdelattice.errors import DomainError, InvariantError

import math
import pytest


def _market(n_steps=4, dt=0.25, lend=0.02, borrow=0.02, **kwargs):
    accounts = AccountSet.flat(lend, borrow, n_steps * dt)
    return build_lattice(100, 0.2, dt, n_steps, accounts, **kwargs)


def test_lattice_asset():
    """Test the LatticeAsset and its CRR parameterization."""
    asset = LatticeAsset.from_volatility('S1', 100, 0.2, 0.25)
    assert asset.up == pytest.approx(math.exp(0.1))
    assert asset.down == pytest.approx(math.exp(-0.1))
    assert asset.probability == 0.5
    assert asset.price(2, 1) == pytest.approx(100)
    assert asset.price(2, 2) == pytest.approx(100 * math.exp(0.2))

    with pytest.raises(AssertionError):
        LatticeAsset('S1', 100, 0.9, 1.1)
    with pytest.raises(InvariantError):
        LatticeAsset.from_volatility('S1', 100, -0.2, 0.25)
    with pytest.raises(InvariantError):
        LatticeAsset('S1', 100, 1.1, 0.9, dividends=[{'step': 0, 'amount': 1}])
    with pytest.raises(InvariantError):
        LatticeAsset('S1', 100, 1.1, 0.9, dividends=[{'step': 2}])


def test_lattice_asset_dict():
    """Test the to/from dict methods of LatticeAsset."""
    asset = LatticeAsset('S1', 100, 1.1, 0.9, 0.6, [{'step': 2, 'yield': 0.01}])
    new_asset = LatticeAsset.from_dict(asset.to_dict())
    assert new_asset.to_dict() == asset.to_dict()
    from_sigma = LatticeAsset.from_dict(
        {'type': 'LatticeAsset', 'identifier': 'S1', 'spot': 100, 'sigma': 0.2},
        0.25)
    assert from_sigma.up == pytest.approx(math.exp(0.1))


def test_dividends():
    """Test cash and proportional dividends."""
    asset = LatticeAsset('S1', 100, 1.1, 0.9,
                         dividends=[{'step': 1, 'amount': 2}, {'step': 1, 'yield': 0.01}])
    assert asset.dividend(1, 110) == pytest.approx(2 + 1.1)
    assert asset.dividend(2, 110) == 0


def test_market_nodes():
    """Test the nodes, spots and probabilities of a plain lattice."""
    market = _market()
    assert market.n_steps == 4
    assert market.horizon == pytest.approx(1.0)
    assert market.node_count == 15
    assert len(market.nodes(3)) == 4
    assert len(market.terminal_nodes()) == 5
    root = market.root
    assert root.key == (0, 0)
    assert market.spot(root) == 100
    top = market.node(2, 2)
    assert market.spot(top) == pytest.approx(100 * math.exp(0.2))
    assert [n.key for n in market.path_to(top)] == [(0, 0), (1, 1), (2, 2)]
    with pytest.raises(DomainError):
        market.nodes(5)
    with pytest.raises(DomainError):
        market.node(2, 3)

    probs = market.node_probabilities()
    assert sum(probs[4]) == pytest.approx(1.0)
    assert probs[4][2] == pytest.approx(6 / 16.0)


def test_risk_neutral_measure():
    """Test the one-step probability making the discounted asset a martingale."""
    market = _market(lend=0.02, borrow=0.05)
    node = market.node(1, 0)
    q = market.risk_neutral_up(node)
    s_up, s_down = market.cum_prices(node)
    g = market.growth(market.accounts.cash_lend, 1)
    assert q * s_up + (1 - q) * s_down == pytest.approx(g * market.spot(node))

    accounts = AccountSet.flat(0.9, 0.9, 1.0)
    fast = build_lattice(100, 0.05, 0.25, 4, accounts)
    with pytest.raises(InvariantError):
        fast.risk_neutral_up(fast.root)


def test_market_invariants():
    """Test the invariants checked when a market is built."""
    accounts = AccountSet.flat(0.02, 0.02, 0.5)
    with pytest.raises(InvariantError):
        build_lattice(100, 0.2, 0.25, 4, accounts)
    ramp = DeterministicAsset('S2', 100, 0.3)
    with pytest.raises(InvariantError):
        _market(deterministic_assets=[ramp])


def test_deterministic_asset():
    """Test the gated ramp asset."""
    ramp = DeterministicAsset('S2', 100, 0.5, slope=2)
    assert ramp.price(0.25, None) == 1.0
    assert ramp.price(0.5, 8.0) == 1.0
    assert ramp.price(1.5, 8.0) == pytest.approx(1 + 2 * 100 * 1.0 / 8.0)
    assert ramp.price(1.5, 0.0) == 1.0
    gated = DeterministicAsset('S2', 100, 1.0, event_factor=2)
    assert gated.on_event(60)
    assert not gated.on_event(40)
    assert DeterministicAsset.from_dict(gated.to_dict()).to_dict() == gated.to_dict()

    market = _market(deterministic_assets=[DeterministicAsset('S2', 100, 0.5)])
    assert market.gate_step() == 2
    assert market.gate_value(market.root) is None
    node = market.node(2, 0)
    assert market.gate_value(node) > 0
    assert market.deterministic_price(node, 0) == 1.0


def test_default_extension():
    """Test the default-extended lattice and its statuses."""
    market = _market().with_defaults(0.01, 0.02)
    assert market.has_defaults
    statuses = {n.status for n in market.nodes(1)}
    assert ALIVE in statuses and len(statuses) == 4
    assert CLOSED in {n.status for n in market.nodes(2)}
    for node in market.nodes(2):
        weights = sum(tr.weight for tr in node.transitions)
        assert weights == pytest.approx(2.0)
    probs = market.node_probabilities()
    assert sum(probs[4]) == pytest.approx(1.0)


def test_discounted_cum_dividend_price():
    """Test that the discounted cum-dividend price is a martingale."""
    accounts = AccountSet.flat(0.03, 0.03, 1.0)
    market = build_lattice(100, 0.2, 0.25, 4, accounts,
                           dividends=[{'step': 2, 'amount': 1.5}])
    node = market.node(1, 1)
    q = market.risk_neutral_up(node)
    now = discounted_cum_dividend_price(market, 0, 0, node)
    up = discounted_cum_dividend_price(market, 0, 0, market.node(2, 2))
    down = discounted_cum_dividend_price(market, 0, 0, market.node(2, 1))
    assert q * up + (1 - q) * down == pytest.approx(now, rel=1e-12)
