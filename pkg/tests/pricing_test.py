# coding=utf-8
from bsdelattice.account import AccountSet
from bsdelattice.lattice import build_lattice
from bsdelattice.payoff import payoffs
from bsdelattice.cashflow import CashFlowStream
from bsdelattice.adjustment import mirror_adjustments
from bsdelattice.contract import Contract
from bsdelattice.creditrisk import DefaultSpec
from bsdelattice.oracle import black_scholes
from bsdelattice.pricing import solve_contract, gained_value, ex_dividend_price, \
    marked_to_market, offsetting_price, ccr_price_split, price_contract, \
    node_table_to_dict
from bsdelattice.runconfig import parse_config
from bsdelattice.errors import DomainError, InvariantError

import pytest


def _market(lend, borrow, n_steps=20, dt=0.05):
    accounts = AccountSet.flat(lend, borrow, n_steps * dt)
    return build_lattice(100, 0.2, dt, n_steps, accounts)


def _call(quantity, n_steps=20, **kwargs):
    stream = CashFlowStream([(n_steps, payoffs.call(100, quantity))])
    return Contract(stream, identifier='call', **kwargs)


def test_gained_and_mtm_values():
    """Test the gained value and the marked-to-market value."""
    market = _market(0.01, 0.05)
    contract = _call(-1)
    p_hat = gained_value(market, contract, 0.0)
    assert len(p_hat) == market.node_count
    solution = solve_contract(market, contract, 0.0)
    assert p_hat[(0, 0)] == pytest.approx(solution.price)
    for key, value in p_hat.items():
        if key[0] == market.n_steps:
            assert value == pytest.approx(0.0, abs=1e-12)
    p_m = marked_to_market(p_hat)
    assert p_m[(0, 0)] == -p_hat[(0, 0)]
    assert node_table_to_dict({(1, 0): 2.0})['1,0'] == 2.0


def test_ex_dividend_price_equals_gained_value():
    """Test that the ex-dividend price equals the gained value of a local contract."""
    config = parse_config('./bsdelattice/samples/collateralized_call.json')
    market, contract = config.market, config.contract
    assert contract.collateral.rule == 'mtm'
    solution = solve_contract(market, contract, 0.0)
    for t in (0, 10, 25, 49):
        p_e = ex_dividend_price(market, contract, 0.0, t)
        assert len(p_e) == t + 1
        for node in market.nodes(t):
            assert p_e[node.key] == pytest.approx(solution.gained_value(node), abs=1e-9)
    with pytest.raises(DomainError):
        ex_dividend_price(market, contract, 0.0, 51)


def test_ex_dividend_price_drops_past_flows():
    """Test that flows at or before t do not enter the ex-dividend price."""
    market = _market(0.02, 0.02)
    stream = CashFlowStream([(5, payoffs.constant(-3)), (20, payoffs.call(100, -1))])
    with_coupon = ex_dividend_price(market, Contract(stream), 0.0, 10)
    without = ex_dividend_price(market, _call(-1), 0.0, 10)
    for key, value in with_coupon.items():
        assert value == pytest.approx(without[key], abs=1e-10)


def test_offsetting_price():
    """Test that the mirror contract offsets an equal-rate contract."""
    market = _market(0.02, 0.02)
    contract = _call(-1)
    prices, gaps = offsetting_price(market, contract, [], 0.0, 8)
    assert len(prices) == 9
    for key in prices:
        assert abs(gaps[key]) < 1e-9


def test_offsetting_price_with_adjustments():
    """Test the offset with frozen adjustments and sign-flipped mirrors."""
    config = parse_config('./bsdelattice/samples/collateralized_call.json')
    market, contract = config.market, config.contract
    solution = solve_contract(market, contract, 0.0)
    mirror = mirror_adjustments(solution.generator.adjustments, solution)
    prices, gaps = offsetting_price(market, contract, mirror, 0.0, 10,
                                    solution=solution)
    assert set(prices) == set(n.key for n in market.nodes(10))
    for key in prices:
        assert abs(gaps[key]) < 1e-9


def test_ccr_split_equal_rates():
    """Test that the CCR split is additive when the driver is linear."""
    market = _market(0.02, 0.02)
    contract = _call(1, defaults=DefaultSpec(0.005, 0.01, 0.4, 0.6))
    split = ccr_price_split(market, contract, 0.0, 0.0, 0.0)
    assert abs(split.gap) < 1e-10
    assert split.decomposition_residual < 1e-12
    assert split.ccr_price != 0
    data = split.to_dict()
    assert data['type'] == 'CcrSplit'
    assert data['gap'] == split.gap


def test_ccr_split_with_spread():
    """Test that a borrowing spread breaks the additivity of the CCR split."""
    config = parse_config('./bsdelattice/samples/ccr_call.json')
    split = ccr_price_split(config.market, config.contract, 0.0, 0.0, 0.0)
    assert abs(split.gap) > 1e-10
    other = ccr_price_split(config.market, config.contract, 0.0, 0.0, 0.0,
                            'ccr_with_adjustments')
    assert other.clean_price == pytest.approx(split.clean_price, abs=1e-10)


def test_ccr_split_rejections():
    """Test the inputs the CCR split refuses."""
    market = _market(0.02, 0.02)
    with pytest.raises(InvariantError):
        ccr_price_split(market, _call(1), 0.0)
    contract = _call(1, defaults=DefaultSpec(0.005, 0.01))
    with pytest.raises(InvariantError):
        ccr_price_split(market, contract, 1.0, 0.5, 0.2)
    with pytest.raises(InvariantError):
        ccr_price_split(market, contract, 0.0, decomposition='netted')


def test_price_contract():
    """Test the pricing report and the replay of the recovered strategy."""
    market = _market(0.02, 0.02, 100, 0.01)
    report, strategy = price_contract(market, _call(-1, 100), 0.0)
    assert report.oracle_price == pytest.approx(report.price, abs=1e-10)
    assert report.price == pytest.approx(
        black_scholes('call', 100, 100, 0.02, 0.2, 1.0), abs=0.05)
    ok, worst, node = report.self_financing
    assert ok
    assert strategy.p == pytest.approx(report.price)
    data = report.to_dict(include_paths=False)
    assert data['type'] == 'PricingReport'
    assert 'p_hat' not in data
    assert data['self_financing']['ok']


def test_price_contract_with_spread():
    """Test that the spread run has no oracle price and still self-finances."""
    market = _market(0.0, 0.05)
    report, _ = price_contract(market, _call(-1), 10.0)
    assert report.oracle_price is None
    assert report.self_financing[0]
    data = report.to_dict()
    assert data['p_hat']['0,0'] == pytest.approx(report.price)
    assert data['p_m']['0,0'] == pytest.approx(-report.price)
