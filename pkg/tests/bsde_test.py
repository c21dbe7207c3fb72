# coding=utf-8
from bsdelattice.account import AccountSet
from bsdelattice.lattice import build_lattice
from bsdelattice.payoff import payoffs
from bsdelattice.cashflow import CashFlowStream
from bsdelattice.adjustment import Adjustment, adjustment_from_rule
from bsdelattice.contract import Contract
from bsdelattice.convention import TradingConvention, RepoSymmetric
from bsdelattice.oracle import risk_neutral_price, risk_neutral_values, \
    lattice_delta, black_scholes
from bsdelattice.bsde import build_generator, solve_backward, check_comparison, \
    comparison_suite, recover_strategy
from bsdelattice.pricing import solve_contract
from bsdelattice.errors import InvariantError, GlobalProblemError, \
    UnsupportedCaseError, SolverError

import io
import numpy as np
import pytest


def _market(lend, borrow, n_steps=100, dt=0.01, sigma=0.2):
    accounts = AccountSet.flat(lend, borrow, n_steps * dt)
    return build_lattice(100, sigma, dt, n_steps, accounts)


def _short(payoff, n_steps):
    return Contract(CashFlowStream([(n_steps, payoff)]), identifier='short')


@pytest.mark.parametrize('rate', [0.0, 0.02, 0.05])
def test_linear_limit_matches_oracle(rate):
    """Test that the solver equals the risk-neutral oracle with equal rates."""
    market = _market(rate, rate)
    curve = market.accounts.cash_lend
    for kind in ('call', 'put', 'straddle'):
        payoff = payoffs.by_name(kind, 100)
        contract = _short(payoff.negate(), 100)
        solution = solve_contract(market, contract, 0.0)
        assert solution.generator.is_linear
        oracle = risk_neutral_price(market, payoff, curve)
        assert abs(solution.price - oracle) < 1e-10


def test_linear_limit_random_payoffs():
    """Test the oracle equivalence on random terminal values."""
    market = _market(0.03, 0.03, n_steps=20, dt=0.05)
    curve = market.accounts.cash_lend
    generator = build_generator(market, Contract.null(), 0.0)
    rng = np.random.default_rng(11)
    for _ in range(10):
        table = {n.key: v for n, v in zip(market.terminal_nodes(),
                                          rng.uniform(-50, 50, 21))}
        solution = solve_backward(market, generator, table)
        oracle = risk_neutral_values(market, lambda m, n: table[n.key], curve)
        b_t = market.account(curve)[-1]
        assert solution.root_value == pytest.approx(oracle[0][0] * b_t, abs=1e-9)


def test_lattice_price_converges_to_black_scholes():
    """Test that the 100-step lattice call is close to the closed form."""
    market = _market(0.02, 0.02)
    solution = solve_contract(market, _short(payoffs.call(100, -1), 100), 0.0)
    closed = black_scholes('call', 100, 100, 0.02, 0.2, 1.0)
    assert solution.price == pytest.approx(closed, abs=0.05)


def test_hedge_matches_lattice_delta():
    """Test that the recovered hedge is the classic two-point delta."""
    market = _market(0.02, 0.02, n_steps=10, dt=0.1)
    solution = solve_contract(market, _short(payoffs.call(100, -1), 10), 0.0)
    values = risk_neutral_values(market, payoffs.call(100), market.accounts.cash_lend)
    for node in market.nodes(3):
        delta = lattice_delta(market, values[4], node)
        assert solution.hedge(node) == pytest.approx(delta, abs=1e-10)


def test_bergman_bracketing():
    """Test that single-rate prices bracket the price with a borrowing spread."""
    market = _market(0.0, 0.05, n_steps=50, dt=0.02)
    contract = _short(payoffs.call(100, -1), 50)
    low = risk_neutral_price(_market(0.0, 0.0, 50, 0.02), payoffs.call(100),
                             AccountSet.flat(0.0, 0.0, 1.0).cash_lend)
    high_market = _market(0.05, 0.05, 50, 0.02)
    high = risk_neutral_price(high_market, payoffs.call(100),
                              high_market.accounts.cash_lend)

    price = solve_contract(market, contract, 50.0).price
    assert low < price < high

    short_price = solve_contract(market, contract, 0.0).price
    long_price = solve_contract(
        market, _short(payoffs.call(100, 1), 50), 0.0).price
    assert abs(short_price + long_price) > 1e-3


def test_bergman_cash_sign_structure():
    """Test that borrowing nodes hold no lending account and vice versa."""
    market = _market(0.0, 0.05, n_steps=20, dt=0.05)
    solution = solve_contract(market, _short(payoffs.call(100, -1), 20), 10.0)
    strategy = recover_strategy(solution)
    borrowed = lent = 0
    for node in market.iter_nodes():
        if node.step == market.n_steps:
            continue
        hold = strategy.holding(node)
        if solution.state(node).cash < 0:
            borrowed += 1
            assert hold.psi_cash_borrow < 0 and hold.psi_cash_lend == 0
        else:
            lent += 1
            assert hold.psi_cash_borrow == 0
    assert borrowed > 0 and lent > 0


def test_one_step_consistency():
    """Test that every node solves its one-step equation."""
    market = _market(0.01, 0.05, n_steps=20, dt=0.05)
    linear = adjustment_from_rule('margin', {'name': 'linear_gain', 'slope': 0.3},
                                  alpha=1)
    contract = Contract(CashFlowStream([(20, payoffs.put(100, -1))]), [linear])
    solution = solve_contract(market, contract, 1.0)
    assert solution.consistency_residual() < 1e-9
    assert solution.iteration_count >= market.node_count - 21


def test_generator_rejections():
    """Test the problems the generator refuses to build."""
    market = _market(0.01, 0.05, n_steps=5, dt=0.1)
    contract = _short(payoffs.call(100, -1), 5)
    with pytest.raises(UnsupportedCaseError) as err:
        build_generator(market, contract, -1.0)
    assert 'x >= 0' in str(err.value)

    path = adjustment_from_rule('path', {'name': 'path_funding_schedule'})
    with pytest.raises(GlobalProblemError):
        build_generator(market, Contract(contract.stream, [path]), 0.0)

    steep = adjustment_from_rule('steep', {'name': 'linear_gain', 'slope': 1e6})
    with pytest.raises(SolverError):
        build_generator(market, Contract(contract.stream, [steep]), 0.0)

    two = TradingConvention([RepoSymmetric(), RepoSymmetric()])
    with pytest.raises(InvariantError):
        build_generator(market, contract, 0.0, two)


def test_terminal_condition_checks():
    """Test terminal conditions given as tables, callables and numbers."""
    market = _market(0.02, 0.02, n_steps=4, dt=0.25)
    generator = build_generator(market, Contract.null(), 0.0)
    solution = solve_backward(market, generator, 2.0)
    assert solution.root_value == pytest.approx(2.0)
    solution = solve_backward(market, generator, lambda m, n: m.spot(n))
    b_t = market.account(market.accounts.cash_lend)[-1]
    assert solution.root_value == pytest.approx(100 * b_t, rel=1e-12)
    with pytest.raises(InvariantError):
        solve_backward(market, generator, {(4, 0): 1.0})


def test_comparison_check():
    """Test the comparison and strict comparison checks on the spread driver."""
    market = _market(0.0, 0.05, n_steps=6, dt=1 / 6.0)
    generator = build_generator(market, _short(payoffs.call(100, -1), 6), 0.0)
    xi1 = {n.key: 0.0 for n in market.terminal_nodes()}
    xi2 = dict(xi1)
    xi2[(6, 6)] = 1.0
    report = check_comparison(market, generator, xi1, xi2)
    assert report.comparison_holds and report.strict_holds
    y1, y2 = [s.root_value for s in report.solutions]
    assert y2 > y1
    assert report.to_dict()['comparison_holds']
    with pytest.raises(InvariantError):
        check_comparison(market, generator, xi2, xi1)


def test_comparison_suite():
    """Test that random ordered pairs never violate comparison."""
    market = _market(0.0, 0.05, n_steps=10, dt=0.1)
    generator = build_generator(market, _short(payoffs.call(100, -1), 10), 0.0)
    result = comparison_suite(market, generator, pairs=100, seed=3)
    assert result['pairs'] == 100
    assert result['comparison_violations'] == 0
    assert result['strict_violations'] == 0
    assert result['holds']


def test_solution_csv():
    """Test the CSV export of a solution."""
    market = _market(0.01, 0.05, n_steps=3, dt=1 / 3.0)
    solution = solve_contract(market, _short(payoffs.call(100, -1), 3), 0.0)
    buffer = io.StringIO()
    solution.to_csv(buffer)
    rows = buffer.getvalue().strip().splitlines()
    assert rows[0] == 'step,node_id,Y,Z_1,xi_1,psi_0l,psi_0b'
    assert len(rows) == 1 + market.node_count


def test_exogenous_adjustment_shifts_price():
    """Test that an adjustment remunerated at the cash rate leaves the price unchanged."""
    market = _market(0.02, 0.02, n_steps=10, dt=0.1)
    stream = CashFlowStream([(10, payoffs.call(100, -1))])
    base = solve_contract(market, Contract(stream), 0.0).price
    capital = Adjustment('capital', 1, market.accounts.cash_lend, values=5.0)
    same = solve_contract(market, Contract(stream, [capital]), 0.0).price
    assert same == pytest.approx(base, abs=1e-10)
