# coding=utf-8
from bsdelattice.account import AccountSet
from bsdelattice.lattice import build_lattice
from bsdelattice.payoff import payoffs
from bsdelattice.cashflow import CashFlowStream
from bsdelattice.contract import Contract
from bsdelattice.strategy import Holding
from bsdelattice.convention import TradingConvention, Cash, RepoSymmetric, \
    RepoCashDriven, RepoSecurityDriven, BrokerShortSale, mode_from_dict, \
    convention_to_constraints
from bsdelattice.rate import RateCurve
from bsdelattice.bsde import recover_strategy
from bsdelattice.pricing import solve_contract
from bsdelattice.wealth import is_self_financing
from bsdelattice.errors import InvariantError

import pytest


def _market(rate=0.02, funding_rates=None, n_steps=10, dt=0.1):
    accounts = AccountSet.flat(rate, rate, n_steps * dt, funding_rates)
    return build_lattice(100, 0.2, dt, n_steps, accounts)


def _call(quantity, n_steps=10):
    return Contract(CashFlowStream([(n_steps, payoffs.call(100, quantity))]))


def test_funding_positions():
    """Test the funding position of every mode."""
    assert Cash().funding_value(2, 100) == 0
    repo = RepoSymmetric(0.1)
    assert repo.funding_value(2, 100) == pytest.approx(-180)
    assert repo.funding_value(-2, 100) == pytest.approx(180)
    assert repo.funding_next(2, 100, 1.01, 1.05) == pytest.approx(-189)
    assert repo.funding_next(-2, 100, 1.01, 1.05) == pytest.approx(181.8)
    assert repo.funding_units(2, 100, 1.0, 2.0) == (0.0, pytest.approx(-90), 0.0)

    cash_driven = RepoCashDriven(0.1)
    assert cash_driven.funding_value(-2, 100) == 0
    assert cash_driven.funding_value(2, 100) == pytest.approx(-180)
    security_driven = RepoSecurityDriven(0.1)
    assert security_driven.funding_value(2, 100) == 0
    assert security_driven.funding_value(-2, 100) == pytest.approx(180)

    broker = BrokerShortSale(0.5)
    assert broker.funding_value(-2, 100) == pytest.approx(200)
    assert broker.funding_next(-2, 100, 1.01, 1.05) == pytest.approx(200)
    induced = broker.induced_adjustments()
    assert [a[0] for a in induced] == ['short_sale_margin', 'short_sale_extra_margin']
    assert induced[0][3](-2, 100) == pytest.approx(-300)
    assert induced[1][3](-2, 100) == pytest.approx(100)
    assert len(BrokerShortSale().induced_adjustments()) == 1


def test_mode_from_dict():
    """Test the creation of modes from dictionaries."""
    assert isinstance(mode_from_dict({'mode': 'cash'}), Cash)
    repo = mode_from_dict({'mode': 'repo-symmetric', 'haircut': 0.02})
    assert isinstance(repo, RepoSymmetric)
    assert repo.haircut == 0.02
    margin = RateCurve.flat(0.01, 1.0, 'margin')
    broker = mode_from_dict({'mode': 'broker_short_sale', 'delta': 0.1,
                             'margin_rate': margin.to_dict()})
    assert broker.delta == 0.1
    assert broker.extra_rate is None
    with pytest.raises(InvariantError):
        mode_from_dict({'mode': 'futures'})
    with pytest.raises(InvariantError):
        mode_from_dict({'mode': 'cash', 'haircut': 0.1})
    with pytest.raises(AssertionError):
        RepoSymmetric(1.0)


def test_trading_convention_dict():
    """Test the serialization of a convention."""
    convention = TradingConvention([RepoCashDriven(0.05)])
    data = convention.to_dict()
    assert data['modes'] == [{'mode': 'repo_cash_driven', 'haircut': 0.05}]
    new_convention = TradingConvention.from_dict(data)
    assert new_convention.mode().name == 'repo_cash_driven'
    assert TradingConvention().mode().name == 'cash'
    with pytest.raises(InvariantError):
        TradingConvention([Cash(), Cash()]).check_assets(1)


def test_convention_to_constraints():
    """Test the constraints the conventions impose on holdings."""
    constraints = convention_to_constraints(TradingConvention([RepoSymmetric(0.0)]))
    funded = Holding(xi=2.0, psi_fund_borrow=-200.0)
    assert constraints.check(funded, 100, 1.0, 1.0) == []
    unfunded = Holding(xi=2.0)
    failed = constraints.check(unfunded, 100, 1.0, 1.0)
    assert [name for name, _ in failed] == ['symmetric repo']

    constraints = convention_to_constraints(TradingConvention([BrokerShortSale()]))
    assert len(constraints.adjustments) == 1
    assert constraints.check(Holding(xi=-1.0, broker=100.0), 100, 1.0, 1.0) == []
    assert constraints.check(Holding(xi=-1.0), 100, 1.0, 1.0)

    cash = convention_to_constraints(TradingConvention.cash())
    assert len(cash) == 3
    assert cash.check(Holding(xi=5.0, psi_cash_lend=3.0), 100, 1.0, 1.0) == []


def test_conventions_agree_without_spreads():
    """Test that repo and broker conventions price like cash when no spread exists."""
    market = _market()
    for quantity in (-1, 1):
        contract = _call(quantity)
        base = solve_contract(market, contract, 0.0).price
        for mode in (RepoSymmetric(0.0), BrokerShortSale()):
            price = solve_contract(market, contract, 0.0,
                                   TradingConvention([mode])).price
            assert price == pytest.approx(base, abs=1e-9)


def test_repo_funding_spread():
    """Test that a costly repo borrowing rate raises the price of a short call."""
    market = _market(funding_rates=[(0.02, 0.06)])
    contract = _call(-1)
    cash_price = solve_contract(market, contract, 0.0).price
    convention = TradingConvention([RepoSymmetric(0.0)])
    solution = solve_contract(market, contract, 0.0, convention)
    assert solution.price > cash_price
    strategy = recover_strategy(solution)
    assert is_self_financing(strategy)[0]
