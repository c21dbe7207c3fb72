# coding=utf-8
from bsdelattice.account import AccountSet
from bsdelattice.lattice import build_lattice
from bsdelattice.payoff import payoffs
from bsdelattice.cashflow import CashFlowStream
from bsdelattice.contract import Contract
from bsdelattice.pricing import solve_contract
from bsdelattice.superhedge import SearchSpace, SuperhedgeResult, \
    superhedge_bruteforce, regularity_verdict, REGULAR, UNDETERMINED, BOUND_KEYS
from bsdelattice.config import settings
from bsdelattice.errors import SearchResourceError

import pytest


def _market(lend=0.0, borrow=0.05, n_steps=3, dt=1 / 3.0, **kwargs):
    accounts = AccountSet.flat(lend, borrow, n_steps * dt)
    return build_lattice(100, 0.2, dt, n_steps, accounts, **kwargs)


def _contract(payoff, n_steps=3):
    return Contract(CashFlowStream([(n_steps, payoff)]), identifier='contract')


def test_search_space():
    """Test the SearchSpace grid and its description."""
    space = SearchSpace.from_step(0.25, -1, 1)
    assert len(space.xi_grid) == 9
    assert space.resolution == pytest.approx(0.25)
    assert space.candidate_count(0) == 10
    assert space.eta_candidates(0).shape == (1, 0)
    assert 'borrowing allowed' in space.label()
    space = SearchSpace([0.5], eta_grids=[[0, 1, 2]], allow_borrowing=False,
                        include_replicating=False)
    assert space.resolution == 0
    assert space.candidate_count(1) == 3
    assert space.eta_candidates(2).shape == (3, 2)
    assert 'no borrowing' in space.label()
    assert space.to_dict()['eta_grids'] == [[0.0, 1.0, 2.0]]
    with pytest.raises(AssertionError):
        SearchSpace([])


def test_search_matches_replication():
    """Test that the cheapest superhedge costs the replication cost."""
    market = _market()
    for payoff in (payoffs.call(100, -1), payoffs.put(100, -1)):
        contract = _contract(payoff)
        p_hat = solve_contract(market, contract, 0.0).price
        result = superhedge_bruteforce(market, contract, 0.0,
                                       SearchSpace.from_step(0.01, -1, 1))
        assert abs(result.price - p_hat) <= result.error_bar + 1e-9
        assert result.ordering_ok
        assert result.matches_search
        assert result.cells == market.node_count * 202
        assert result.strategy.is_superhedge(0.0)
        data = result.to_dict()
        assert data['type'] == 'SuperhedgeResult'
        assert set(data['bounds']) == {'strict_subhedging_sup', 'fair_sup',
                                       'superhedging_inf', 'strict_superhedging_inf'}


def test_search_without_replicating_ratio():
    """Test that a coarse grid stays within its error bar of the replication cost."""
    market = _market()
    contract = _contract(payoffs.call(100, -1))
    p_hat = solve_contract(market, contract, 0.0).price
    space = SearchSpace.from_step(0.05, 0, 1, include_replicating=False)
    result = superhedge_bruteforce(market, contract, 0.0, space)
    assert result.price >= p_hat - 1e-9
    assert result.price <= p_hat + result.error_bar + 1e-9


def test_cell_limit():
    """Test that a search above the cell limit is refused."""
    market = _market()
    contract = _contract(payoffs.call(100, -1))
    limit = settings.superhedge_cell_limit
    settings.superhedge_cell_limit = 100
    try:
        with pytest.raises(SearchResourceError) as err:
            superhedge_bruteforce(market, contract, 0.0,
                                  SearchSpace.from_step(0.01, -1, 1))
        assert err.value.exit_code == 5
    finally:
        settings.superhedge_cell_limit = limit


def test_regular_short_put():
    """Test that a short put on the borrowing-spread lattice is regular."""
    market = _market()
    verdict = regularity_verdict(market, _contract(payoffs.put(100, -1)), 0.0,
                                 SearchSpace.from_step(0.05, -1, 1))
    assert verdict.verdict == REGULAR
    assert verdict.search is not None
    assert verdict.to_dict()['verdict'] == REGULAR


def test_undetermined_verdicts():
    """Test the verdicts the search cannot settle."""
    market = _market()
    contract = _contract(payoffs.call(100, -1))
    space = SearchSpace.from_step(0.05, 0, 1, allow_borrowing=False)
    verdict = regularity_verdict(market, contract, 0.0, space)
    assert verdict.verdict == UNDETERMINED
    assert 'borrows' in verdict.reason

    ext = market.with_defaults(0.01, 0.01)
    verdict = regularity_verdict(ext, contract, 0.0, space)
    assert verdict.verdict == UNDETERMINED
    assert verdict.replication_cost is None
    assert verdict.search is not None
    assert verdict.search.ordering_ok


def test_null_contract_bounds():
    """Test that every bound of the null contract is zero."""
    market = _market()
    result = superhedge_bruteforce(market, Contract.null(), 0.0,
                                   SearchSpace.from_step(0.1, -1, 1))
    assert result.price == pytest.approx(0, abs=1e-9)
    assert not result.attained_strict
    for key in BOUND_KEYS:
        assert result.bounds[key] == pytest.approx(0, abs=1e-8)
    assert result.ordering_ok


def test_bounds_on_default_lattice():
    """Test that the four bounds are located by separate runs on a defaultable lattice.
    """
    market = _market().with_defaults(0.01, 0.01)
    contract = _contract(payoffs.call(100, -1))
    result = superhedge_bruteforce(market, contract, 0.0,
                                   SearchSpace.from_step(0.05, -1, 1))
    bounds = result.bounds
    width = result.price_tolerance
    assert width > 0
    assert bounds['strict_subhedging_sup'] < bounds['superhedging_inf']
    assert bounds['fair_sup'] < bounds['strict_superhedging_inf']
    assert bounds['superhedging_inf'] - bounds['strict_subhedging_sup'] <= width
    assert result.ordering_ok
    assert result.matches_search

    strategy = result.strategy
    assert strategy.hedge_flags(0.0, bounds['superhedging_inf'])[0]
    assert not strategy.hedge_flags(0.0, bounds['strict_subhedging_sup'])[0]
    assert strategy.hedge_flags(0.0, bounds['strict_superhedging_inf'])[1]
    assert not strategy.hedge_flags(0.0, bounds['fair_sup'])[1]
    assert result.to_dict()['bounds'] == bounds


def test_bound_ordering_check():
    """Test that bounds out of order are reported."""
    space = SearchSpace.from_step(0.5, -1, 1)
    bounds = dict(zip(BOUND_KEYS, (1.0, 1.0, 1.0, 1.0)))
    result = SuperhedgeResult(0.0, 1.0, False, 0.0, None, space, 0, bounds, 1e-9)
    assert result.ordering_ok
    assert result.matches_search

    bounds['strict_superhedging_inf'] = 0.5
    result = SuperhedgeResult(0.0, 1.0, False, 0.0, None, space, 0, bounds, 1e-9)
    assert not result.ordering_ok

    bounds = dict(zip(BOUND_KEYS, (1.0, 1.2, 1.0, 1.2)))
    result = SuperhedgeResult(0.0, 1.0, False, 0.0, None, space, 0, bounds, 1e-9)
    assert not result.ordering_ok
    with pytest.raises(AssertionError):
        SuperhedgeResult(0.0, 1.0, False, 0.0, None, space, 0, {'fair_sup': 1.0},
                         1e-9)
