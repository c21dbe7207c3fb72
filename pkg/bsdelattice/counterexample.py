# coding=utf-8
"""Reproductions of two models where replication is not the cheapest superhedge.

* The no-borrowing model: zero rates, borrowing precluded, and a deterministic
  ramp asset S2 that starts growing at the gate time U. A contract paying the put
  value P_U(K) at U and receiving back the put at T costs nothing to replicate, yet
  investing P_U(K) in S2 at U yields P_U(K) + 2K(T - U) at T.
* The rate-threshold model: lending at 0, borrowing at r_b and a ramp asset that
  grows only on the event {2 P_U(K) > K}. Above the threshold ln(S2_T) borrowing
  to buy S2 never pays, so the null contract admits no arbitrage, yet the hedger
  of a short put can switch into S2 on the event and end strictly above zero.

Each report compares every expected outcome with the observed one.
"""
import logging
import math

from .account import AccountSet
from .lattice import DeterministicAsset, build_lattice
from .payoff import payoffs
from .cashflow import CashFlowStream
from .contract import Contract
from .convention import TradingConvention, RepoSymmetric
from .pricing import solve_contract
from .superhedge import SearchSpace, StepModel, FeedbackStrategy, \
    regularity_verdict, REGULAR, NOT_REGULAR
from .arbitrage import ArbitrageCertificate, search_primary_arbitrage
from .errors import InvariantError

_logger = logging.getLogger(__name__)

TOLERANCE = 1e-9


class CounterexampleReport(object):
    """Expected and observed outcomes of a counterexample run.

    Args:
        name: Name of the model.
        parameters: Dictionary of the model parameters.
        expected: Dictionary from check names to expected outcomes.
        observed: Dictionary from check names to observed outcomes.
        details: Dictionary of supporting numbers.

    Properties:
        * reproduced
        * mismatches
    """
    __slots__ = ('name', 'parameters', 'expected', 'observed', 'details')

    def __init__(self, name, parameters, expected, observed, details=None):
        self.name = name
        self.parameters = dict(parameters)
        self.expected = dict(expected)
        self.observed = dict(observed)
        self.details = dict(details or {})

    @property
    def mismatches(self):
        """Get the list of checks whose observed outcome differs from the expected."""
        return [k for k in self.expected if self.observed.get(k) != self.expected[k]]

    @property
    def reproduced(self):
        """Get a boolean noting whether every expected outcome was observed."""
        return not self.mismatches

    def to_dict(self):
        """Get the report as a dictionary."""
        return {
            'type': 'CounterexampleReport',
            'model': self.name,
            'parameters': self.parameters,
            'expected': self.expected,
            'observed': self.observed,
            'details': self.details,
            'mismatches': self.mismatches,
            'reproduced': self.reproduced
        }

    def to_text(self):
        """Get a human-readable summary of the report."""
        lines = ['{} model: {}'.format(
            self.name, 'reproduced' if self.reproduced else 'NOT reproduced')]
        for key in self.expected:
            mark = 'ok' if self.observed.get(key) == self.expected[key] else 'MISMATCH'
            lines.append('  {:<34} expected {!s:<12} observed {!s:<12} {}'.format(
                key, self.expected[key], self.observed.get(key), mark))
        return '\n'.join(lines)

    def __repr__(self):
        return 'CounterexampleReport: {} ({})'.format(
            self.name, 'reproduced' if self.reproduced else 'not reproduced')


def _on_event(market, node):
    gate = market.gate_value(node)
    return gate is not None and market.deterministic_assets[0].on_event(gate)


def _min_cash(solution):
    market = solution.market
    return min(solution.state(n).cash for n in market.iter_nodes()
               if n.step < market.n_steps)


def no_borrowing_model(spot=100.0, strike=100.0, sigma=0.2, gate_time=0.5,
                       maturity=1.5, dt=0.1, slope=2.0):
    """Build the zero-rate market with the ramp asset S2.

    Returns:
        A tuple (market, contract) where the contract receives P_U(K) at the gate
        step and pays the put at maturity.
    """
    n_steps = int(round(maturity / dt))
    accounts = AccountSet.flat(0.0, 0.0, maturity)
    ramp = DeterministicAsset('S2', strike, gate_time, slope)
    market = build_lattice(spot, sigma, dt, n_steps, accounts,
                           deterministic_assets=[ramp])
    stream = CashFlowStream([(market.gate_step(), payoffs.gate_value()),
                             (n_steps, payoffs.put(strike, -1))])
    return market, Contract(stream, identifier='gate_value_less_put')


def no_borrowing_witness(market, contract, start_wealth=0.0):
    """Get the strategy holding nothing until U and P_U(K) units of S2 afterwards."""
    gate_step = market.gate_step()
    decisions = {}
    for node in market.iter_nodes():
        if gate_step <= node.step < market.n_steps:
            decisions[node.key] = (0.0, (market.gate_value(node),))
    return FeedbackStrategy(StepModel(market, contract), decisions, start_wealth,
                            allow_borrowing=False, label='invest the gate value in S2')


def reproduce_no_borrowing(spot=100.0, strike=100.0, sigma=0.2, gate_time=0.5,
                           maturity=1.5, dt=0.1, grid=0.1):
    """Reproduce the no-borrowing counterexample.

    Args:
        spot: Spot price S0. (Default: 100).
        strike: Put strike K. (Default: 100).
        sigma: Volatility. (Default: 0.2).
        gate_time: Gate time U. (Default: 0.5).
        maturity: Maturity T. (Default: 1.5).
        dt: Lattice step. (Default: 0.1).
        grid: Hedge-ratio spacing of the base-model search. (Default: 0.1).

    Returns:
        A CounterexampleReport. The ramp covers any put liability when
        T - U >= 0.5. Below that the lowest lattice price decides; the witness
        checks and the verdict are expected only when the ramp dominates.
    """
    market, contract = no_borrowing_model(spot, strike, sigma, gate_time, maturity,
                                          dt)
    base = market.without_deterministic_assets()
    n = market.n_steps
    short_put = Contract(CashFlowStream([(n, payoffs.put(strike, -1))]),
                         identifier='short_put')

    base_solution = solve_contract(base, short_put, 0.0)
    base_min_cash = _min_cash(base_solution)
    solution = solve_contract(market, contract, 0.0)
    cost = solution.price

    witness = no_borrowing_witness(market, contract, 0.0)
    replay = witness.replay()
    terminal = witness.discounted_terminal(0.0)
    ramp_payoff = 2.0 * strike * (maturity - gate_time)
    covers = maturity - gate_time >= 0.5 - 1e-12
    predicted_liability = max(strike - base.asset.price(n, 0), 0.0)
    liability = max(-short_put.stream.increment(base, node)
                    for node in base.terminal_nodes())
    dominates = covers or ramp_payoff >= predicted_liability
    strictly_above = all(w > TOLERANCE for _, w, _ in terminal)

    space = SearchSpace.from_step(grid, -1.0, 0.0, allow_borrowing=False)
    verdict = regularity_verdict(market, contract, 0.0, space, witnesses=[witness])
    base_verdict = regularity_verdict(base, short_put, 0.0, space)

    expected = {
        'base_replicates_without_borrowing': True,
        'replication_cost_zero': True,
        'ramp_dominates_put': dominates,
        'base_verdict': REGULAR
    }
    if dominates:
        expected.update({
            'witness_wealth_nonnegative': True,
            'witness_never_borrows': True,
            'strict_comparison_fails': True,
            'verdict': NOT_REGULAR
        })
    observed = {
        'base_replicates_without_borrowing': base_min_cash >= -TOLERANCE,
        'replication_cost_zero': abs(cost) <= TOLERANCE,
        'witness_wealth_nonnegative': replay['min_wealth'] >= -TOLERANCE,
        'witness_never_borrows': not witness.borrows(TOLERANCE),
        'ramp_dominates_put': ramp_payoff >= liability - TOLERANCE * strike,
        'strict_comparison_fails': abs(cost) <= TOLERANCE and strictly_above,
        'verdict': verdict.verdict,
        'base_verdict': base_verdict.verdict
    }
    details = {
        'replication_cost': cost,
        'base_put_price': base_solution.price,
        'ramp_payoff': ramp_payoff,
        'min_terminal_wealth': min(w for _, w, _ in terminal),
        'max_put_liability': liability,
        'ramp_covers_strike': covers,
        'verdict_reason': verdict.reason,
        'base_verdict_reason': base_verdict.reason
    }
    params = {'spot': spot, 'strike': strike, 'sigma': sigma, 'gate_time': gate_time,
              'maturity': maturity, 'dt': dt, 'grid': grid}
    report = CounterexampleReport('no-borrowing', params, expected, observed, details)
    _logger.info('%s', report)
    return report


def rate_threshold_model(borrow_rate, spot=100.0, strike=100.0, sigma=0.9,
                         gate_time=1.0, maturity=2.0, dt=1.0):
    """Build the market with lending at 0, borrowing at r_b and the gated ramp S2.

    The lattice asset is funded in the repo market at 0 without haircut.

    Returns:
        A tuple (market, convention).
    """
    n_steps = int(round(maturity / dt))
    accounts = AccountSet.flat(0.0, borrow_rate, maturity, funding_rates=[0.0])
    ramp = DeterministicAsset('S2', strike, gate_time, 1.0, event_factor=2.0)
    market = build_lattice(spot, sigma, dt, n_steps, accounts,
                           deterministic_assets=[ramp])
    return market, TradingConvention([RepoSymmetric(0.0)])


def event_summary(market):
    """Get the probability of the gate event and the terminal S2 values on it.

    Raises:
        InvariantError when the event is empty on the lattice.
    """
    probs = market.node_probabilities()
    gate_step = market.gate_step()
    probability = sum(probs[gate_step][n.index] for n in market.nodes(gate_step)
                      if _on_event(market, n))
    if probability <= 0:
        raise InvariantError(
            'The gate event {2 P_U(K) > K} is empty on this lattice. Raise the '
            'volatility or lower the lending rate.', 'non-empty gate event')
    finals = [market.deterministic_price(n, 0) for n in market.terminal_nodes()
              if _on_event(market, n)]
    return probability, finals


def rate_threshold_pricing_strategy(market, convention, solution, contract):
    """Get the put hedge that switches into S2 on the gate event.

    The strategy replicates the short put until U. On the event it then holds
    P_U(K) units of S2 and nothing else; off the event it keeps replicating.
    """
    gate_step = market.gate_step()
    decisions = {}
    for node in market.iter_nodes():
        if node.step >= market.n_steps:
            continue
        if node.step >= gate_step and _on_event(market, node):
            decisions[node.key] = (0.0, (market.gate_value(node),))
        else:
            decisions[node.key] = (solution.hedge(node), (0.0,))
    return FeedbackStrategy(StepModel(market, contract, convention), decisions,
                            solution.wealth(market.root), label='switch into S2')


def reproduce_rate_threshold(borrow_rate=1.2, spot=100.0, strike=100.0, sigma=0.9,
                             gate_time=1.0, maturity=2.0, dt=1.0, grid=0.05,
                             eta_values=(0.0, 1.0)):
    """Reproduce the rate-threshold counterexample.

    Args:
        borrow_rate: The cash borrowing rate r_b. (Default: 1.2).
        spot: Spot price S0. (Default: 100).
        strike: Put strike K. (Default: 100).
        sigma: Volatility. (Default: 0.9).
        gate_time: Gate time U. (Default: 1).
        maturity: Maturity T with T - U = 1. (Default: 2).
        dt: Lattice step. (Default: 1).
        grid: Hedge-ratio spacing of the primary search. (Default: 0.05).
        eta_values: Candidate holdings of S2 in the primary search.
            (Default: (0, 1)).

    Returns:
        A CounterexampleReport. A null-contract arbitrage is expected exactly when
        r_b is below ln of the largest terminal S2 on the event.
    """
    market, convention = rate_threshold_model(borrow_rate, spot, strike, sigma,
                                              gate_time, maturity, dt)
    probability, finals = event_summary(market)
    threshold = math.log(max(finals))
    x = 0.0

    space = SearchSpace.from_step(grid, -1.0, 1.0, eta_values=[eta_values])
    outcome = search_primary_arbitrage(market, x, space, convention)

    n = market.n_steps
    short_put = Contract(CashFlowStream([(n, payoffs.put(strike, -1))]),
                         identifier='short_put')
    solution = solve_contract(market, short_put, x, convention)
    strategy = rate_threshold_pricing_strategy(market, convention, solution,
                                               short_put)
    terminal = strategy.discounted_terminal(x)
    on_event = [w for k, w, _ in terminal if _on_event(market, market.node(*k))]
    off_event = [w for k, w, _ in terminal if not _on_event(market, market.node(*k))]
    certificate = ArbitrageCertificate('pricing', strategy, x, terminal)
    gain_probability = certificate.gain_probability

    expected = {
        'event_has_positive_probability': True,
        'ramp_in_open_interval': True,
        'primary_arbitrage_found': borrow_rate < threshold,
        'wealth_nonnegative': True,
        'event_wealth_above_half_strike': True,
        'off_event_wealth_zero': True,
        'pricing_arbitrage': True,
        'strict_comparison_fails': True
    }
    observed = {
        'event_has_positive_probability': probability > 0,
        'ramp_in_open_interval': all(1.0 < s < 3.0 for s in finals),
        'primary_arbitrage_found': outcome.found,
        'wealth_nonnegative': all(w >= -TOLERANCE for _, w, _ in terminal),
        'event_wealth_above_half_strike': all(w > 0.5 * strike for w in on_event),
        'off_event_wealth_zero': all(abs(w) <= TOLERANCE * strike for w in off_event),
        'pricing_arbitrage': certificate.is_valid(TOLERANCE),
        'strict_comparison_fails': gain_probability > 0 and
        abs(strategy.start_wealth - solution.wealth(market.root)) <= TOLERANCE
    }
    details = {
        'event_probability': probability,
        'terminal_ramp_values': finals,
        'rate_threshold': threshold,
        'replication_cost': solution.price,
        'gain_probability': gain_probability,
        'min_event_wealth': min(on_event),
        'primary_search': outcome.to_dict()
    }
    params = {'borrow_rate': borrow_rate, 'spot': spot, 'strike': strike,
              'sigma': sigma, 'gate_time': gate_time, 'maturity': maturity, 'dt': dt,
              'grid': grid, 'eta_values': list(eta_values)}
    report = CounterexampleReport('rate-threshold', params, expected, observed,
                                  details)
    _logger.info('%s', report)
    return report
