# coding=utf-8
from bsdelattice.account import AccountSet
from bsdelattice.lattice import build_lattice
from bsdelattice.payoff import payoffs
from bsdelattice.cashflow import CashFlowStream
from bsdelattice.contract import Contract
from bsdelattice.collateral import CollateralSpec
from bsdelattice.adjustment import mirror_adjustments
from bsdelattice.convention import TradingConvention, RepoSymmetric
from bsdelattice.rate import RateCurve
from bsdelattice.superhedge import SearchSpace
from bsdelattice.arbitrage import ArbitrageCertificate, search_primary_arbitrage, \
    desk_supermartingale_check
from bsdelattice.counterexample import reproduce_rate_threshold

import pytest


def _market(lend, borrow, n_steps=5, dt=0.2):
    accounts = AccountSet.flat(lend, borrow, n_steps * dt)
    return build_lattice(100, 0.2, dt, n_steps, accounts)


def _short_call(n_steps=5):
    return Contract(CashFlowStream([(n_steps, payoffs.call(100, -1))]),
                    identifier='short_call')


def _repo_market():
    accounts = AccountSet.flat(0.02, 0.02, 1.0, funding_rates=[0.04])
    return build_lattice(100, 0.2, 0.2, 5, accounts)


def _collateralized_call(remuneration=None):
    collateral = CollateralSpec('exogenous', 'rehypothecated', remuneration,
                                values=[5, 4, 3, 2, 1, 0])
    return Contract(CashFlowStream([(5, payoffs.call(100, -1))]),
                    collateral=collateral, identifier='collateralized_call')


def test_no_primary_arbitrage():
    """Test that a lattice with a borrowing spread has no null-contract arbitrage."""
    market = _market(0.0, 0.05, 3, 1 / 3.0)
    space = SearchSpace.from_step(0.1, -1, 1)
    for x in (0.0, 10.0):
        outcome = search_primary_arbitrage(market, x, space)
        assert not outcome.found
        assert outcome.search.cost == pytest.approx(x, abs=1e-9)
        data = outcome.to_dict()
        assert not data['found']
        assert 'search space' in data['scope']


def test_primary_arbitrage_certificate():
    """Test the certificate found below the rate threshold."""
    report = reproduce_rate_threshold(0.5)
    assert report.observed['primary_arbitrage_found']
    search = report.details['primary_search']
    assert search['found']
    certificate = search['certificate']
    assert certificate['kind'] == 'primary'
    assert certificate['gain_probability'] > 0
    assert certificate['min_terminal'] >= -1e-9


def test_certificate_kind():
    """Test that certificates only take the known kinds."""
    with pytest.raises(AssertionError):
        ArbitrageCertificate('free_lunch', None, 0.0, [])


def test_desk_martingale_with_equal_rates():
    """Test that the desk wealth is a martingale when every rate is equal."""
    market = _market(0.02, 0.02)
    report = desk_supermartingale_check(market, _short_call(), [], 0.0, 0.0,
                                        samples=50, seed=1)
    assert report.is_martingale
    assert report.is_supermartingale
    assert report.max_abs_increment < 1e-9
    assert report.to_dict()['samples'] == 50


def test_desk_supermartingale_with_spread():
    """Test that borrowing at a spread makes the desk wealth a supermartingale."""
    market = _market(0.0, 0.05)
    report = desk_supermartingale_check(market, _short_call(), [], 0.0, 0.0,
                                        samples=200, seed=2)
    assert report.is_supermartingale
    assert not report.is_martingale
    assert report.flagged == []
    assert report.max_increment <= 1e-9


def test_desk_martingale_with_repo_funding():
    """Test a zero desk increment with repo funding and matching remuneration."""
    market = _repo_market()
    convention = TradingConvention([RepoSymmetric(0.0)])
    contract = _collateralized_call()
    mirror = mirror_adjustments(contract.compiled_adjustments(market))
    report = desk_supermartingale_check(market, contract, mirror, 0.0, 0.0,
                                        convention)
    assert report.is_martingale
    assert report.is_supermartingale
    assert report.max_abs_increment < 1e-12


def test_desk_flags_mismatched_remuneration():
    """Test that collateral remunerated below the mirror's rate is flagged by node."""
    market = _repo_market()
    convention = TradingConvention([RepoSymmetric(0.0)])
    zero = RateCurve.flat(0.0, 1.0)
    contract = _collateralized_call((zero, zero))
    mirror = mirror_adjustments(_collateralized_call().compiled_adjustments(market))
    report = desk_supermartingale_check(market, contract, mirror, 0.0, 0.0,
                                        convention)
    assert not report.is_supermartingale
    assert report.max_increment > 1e-3
    assert len(report.flagged) > 0
    for key in report.flagged:
        assert market.node(*key).step < market.n_steps
    assert report.to_dict()['flagged'] == [list(k) for k in report.flagged]


def test_desk_pass_implies_primary_pass():
    """Test that a lattice passing the desk check has no null-contract arbitrage."""
    space = SearchSpace.from_step(0.1, -1, 1)
    cases = [
        (_repo_market(), TradingConvention([RepoSymmetric(0.0)]),
         _collateralized_call()),
        (_market(0.0, 0.05), None, _short_call())
    ]
    for market, convention, contract in cases:
        mirror = mirror_adjustments(contract.compiled_adjustments(market))
        report = desk_supermartingale_check(market, contract, mirror, 0.0, 0.0,
                                            convention, seed=3)
        assert report.is_supermartingale
        for x in (0.0, 5.0):
            outcome = search_primary_arbitrage(market, x, space, convention)
            assert not outcome.found
            assert outcome.search.ordering_ok
