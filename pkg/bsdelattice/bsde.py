# coding=utf-8
"""Pricing BSDE on a binomial lattice: generator, backward solver and hedges.

The solver works with wealth V = B^{0,l} Y. At a node the hedge ratio is read
from the two successor values, the cash position is recovered by inverting the
piecewise linear growth of cash (lending below zero is impossible, so the kink
is resolved exactly) and adjustment functionals of (t, Y, Z) are handled by a
damped fixed point.
"""
import csv
import logging
import time
from collections import namedtuple

import numpy as np

from .adjustment import LocalState
from .contract import Contract
from .convention import TradingConvention
from .strategy import Holding, Portfolio, TradingStrategy
from .wealth import adjustment_carry, required_cash
from .config import settings
from .errors import InvariantError, SolverError, UnsupportedCaseError

_logger = logging.getLogger(__name__)

StepGrowth = namedtuple('StepGrowth', ['lend', 'borrow', 'fund_lend', 'fund_borrow',
                                       'betas', 'induced_betas'])

NodeState = namedtuple('NodeState', ['y', 'z', 'xi', 'wealth', 'cash', 'values',
                                     'iterations'])
NodeState.__doc__ = """Solution of the backward step at one node.

Attributes:
    y: Wealth discounted by the cash lending account.
    z: Hedge loading xi * B^{i,l} / B^{0,l}.
    xi: Units of the lattice asset held over the next step.
    wealth: Wealth V = B^{0,l} Y.
    cash: Signed cash position W.
    values: Tuple of adjustment values X^k (contract adjustments first).
    iterations: Number of fixed-point iterations used.
"""


class Generator(object):
    """The one-step driver of the pricing BSDE for a market, contract and endowment.

    Use build_generator to create a Generator; it validates the problem first.

    Args:
        market: The LatticeMarket.
        contract: The Contract with collateral compiled into its adjustments.
        x: The initial endowment.
        convention: The TradingConvention of the lattice asset.

    Properties:
        * market
        * contract
        * x
        * convention
        * adjustments
        * contraction
        * is_linear
    """

    def __init__(self, market, contract, x, convention):
        self._market = market
        self._contract = contract
        self._x = float(x)
        self._convention = convention
        self._mode = convention.mode(0)
        self._adjustments = tuple(contract.adjustments)
        self._induced = tuple(self._mode.induced_adjustments())
        accounts = market.accounts
        fund_lend, fund_borrow = accounts.funding_pair(0)
        self._cash_lend = market.account(accounts.cash_lend)
        self._cash_borrow = market.account(accounts.cash_borrow)
        self._fund_lend = market.account(fund_lend)
        self._fund_borrow = market.account(fund_borrow)
        beta_curves = [adj.beta_curve(accounts) for adj in self._adjustments]
        induced_curves = [beta if beta is not None else accounts.cash_lend
                          for _, _, beta, _ in self._induced]
        growths = []
        for step in range(market.n_steps):
            growths.append(StepGrowth(
                market.growth(accounts.cash_lend, step),
                market.growth(accounts.cash_borrow, step),
                market.growth(fund_lend, step),
                market.growth(fund_borrow, step),
                tuple(market.growth(c, step) for c in beta_curves),
                tuple(market.growth(c, step) for c in induced_curves)))
        self._growths = tuple(growths)
        betas = [market.account(c) for c in beta_curves]
        self._beta_tilde = [np.diff(b / self._cash_lend) for b in betas]
        self._borrow_spread = np.diff(self._cash_borrow / self._cash_lend)
        self._contraction = self._contraction_factors()

    @property
    def market(self):
        """Get the LatticeMarket."""
        return self._market

    @property
    def contract(self):
        """Get the Contract with collateral compiled into its adjustments."""
        return self._contract

    @property
    def x(self):
        """Get the initial endowment."""
        return self._x

    @property
    def convention(self):
        """Get the TradingConvention."""
        return self._convention

    @property
    def adjustments(self):
        """Get the tuple of contract adjustments read by the driver."""
        return self._adjustments

    @property
    def contraction(self):
        """Get a numpy array of the per-step Lipschitz factor of the fixed point."""
        return self._contraction

    @property
    def is_linear(self):
        """Get a boolean noting whether the driver is linear in the wealth.

        This holds with equal cash rates, no adjustments and the cash convention.
        """
        return self._market.accounts.has_equal_cash_rates and not self._adjustments \
            and not self._induced and self._mode.name == 'cash'

    def growth(self, step):
        """Get the StepGrowth of every account over (step, step + 1]."""
        return self._growths[step]

    def driver_increments(self, step):
        """Get the increments entering the driver over (step, step + 1].

        Returns:
            A dictionary with the increment of B^{0,b} / B^{0,l} under
            "borrow_spread" and a list with the increment of beta^k / B^{0,l} of
            every adjustment under "beta_tilde".
        """
        return {'borrow_spread': float(self._borrow_spread[step]),
                'beta_tilde': [float(b[step]) for b in self._beta_tilde]}

    def cash_lend_value(self, step):
        """Get B^{0,l} at a step."""
        return float(self._cash_lend[step])

    def terminal_state(self, node, y):
        """Get the NodeState at a terminal node for a terminal value of Y."""
        b0l = self._cash_lend[node.step]
        wealth = y * b0l
        state = LocalState(node.step, node, self._market.time(node.step), y, 0.0,
                           self._x, b0l)
        values = tuple(adj.value(self._market, node, state)
                       for adj in self._adjustments)
        alpha_x = sum(adj.alpha * v for adj, v in zip(self._adjustments, values))
        return NodeState(float(y), 0.0, 0.0, wealth, wealth + alpha_x, values, 0)

    def hedge(self, node, child_wealth):
        """Get the hedge ratio and the part of the next wealth it does not explain.

        Args:
            node: A non-terminal node.
            child_wealth: Dictionary from child indices to the wealth at the child.

        Returns:
            A tuple (xi, base) where base = R_up - xi (S_up + D_up) - F'(xi) - induced
            carry with R the child wealth net of the child's cash flow. On
            default-extended lattices R is averaged over the statuses of each move.
        """
        market = self._market
        stream = self._contract.stream
        sums = {True: [0.0, 0.0], False: [0.0, 0.0]}
        for tr in node.transitions:
            child = market.node(node.step + 1, tr.child)
            r = child_wealth[tr.child] - stream.increment(market, child)
            sums[tr.up][0] += tr.weight * r
            sums[tr.up][1] += tr.weight
        r_up = sums[True][0] / sums[True][1]
        r_down = sums[False][0] / sums[False][1]
        p_up, p_down = market.cum_prices(node)
        xi = (r_up - r_down) / (p_up - p_down)
        g = self._growths[node.step]
        spot = market.spot(node)
        f_next = self._mode.funding_next(xi, spot, g.fund_lend, g.fund_borrow)
        induced = [func(xi, spot) for _, _, _, func in self._induced]
        induced_carry = adjustment_carry(induced, [a for _, a, _, _ in self._induced],
                                         g.induced_betas)
        return xi, r_up - xi * p_up - f_next - induced_carry

    def evaluate(self, node, xi, base, y):
        """Get (wealth, cash, values) at a node for a candidate value of Y.

        Adjustment functionals read the candidate Y; exogenous adjustments ignore it.
        """
        market = self._market
        step = node.step
        g = self._growths[step]
        b0l = self._cash_lend[step]
        z = xi * self._fund_lend[step] / b0l
        state = LocalState(step, node, market.time(step), y, z, self._x, b0l)
        values = tuple(adj.value(market, node, state) for adj in self._adjustments)
        carry = adjustment_carry(values, [a.alpha for a in self._adjustments], g.betas)
        alpha_x = sum(adj.alpha * v for adj, v in zip(self._adjustments, values))
        cash = required_cash(base - carry, g.lend, g.borrow)
        spot = market.spot(node)
        wealth = cash - alpha_x + xi * spot + self._mode.funding_value(xi, spot)
        return wealth, cash, values

    def solve_node(self, node, child_wealth):
        """Solve the implicit backward step at a non-terminal node.

        Returns:
            A NodeState.
        """
        xi, base = self.hedge(node, child_wealth)
        b0l = self._cash_lend[node.step]
        z = xi * self._fund_lend[node.step] / b0l
        if not any(adj.is_functional for adj in self._adjustments):
            wealth, cash, values = self.evaluate(node, xi, base, self._x)
            return NodeState(wealth / b0l, z, xi, wealth, cash, values, 1)
        tol, damping = settings.tolerance, settings.damping
        max_it = settings.max_iterations
        y = self._x
        for it in range(1, max_it + 1):
            wealth, cash, values = self.evaluate(node, xi, base, y)
            y_new = wealth / b0l
            if abs(y_new - y) <= tol * max(1.0, abs(y_new)):
                if it > max_it // 2:
                    _logger.warning('Fixed point at node %s needed %d of %d '
                                    'iterations.', node.key, it, max_it)
                return NodeState(y_new, z, xi, wealth, cash, values, it)
            y = y + damping * (y_new - y)
        raise SolverError(
            'The fixed point at node {} did not converge in {} iterations '
            '(last change {:.3g}). Use a smaller time step dt.'.format(
                node.key, max_it, abs(y_new - y)))

    def _contraction_factors(self):
        """Bound the slope of the fixed-point map of every step."""
        factors = np.zeros(self._market.n_steps)
        for step, g in enumerate(self._growths):
            total = 0.0
            for adj, g_beta in zip(self._adjustments, g.betas):
                if not adj.is_functional or adj.lipschitz is None:
                    continue
                coefs = [(-1 + adj.alpha + g_beta - adj.alpha * gc) / gc
                         for gc in (g.lend, g.borrow)]
                total += adj.lipschitz * max(abs(c) for c in coefs)
            factors[step] = total
        return factors

    def __repr__(self):
        return 'Generator: x={}, {} adjustments, {}'.format(
            self._x, len(self._adjustments), self._mode.name)


def build_generator(market, contract, x, convention=None, clean_values=None):
    """Build the pricing generator of a contract for an endowment.

    Args:
        market: The LatticeMarket.
        contract: The Contract.
        x: The initial endowment. Must be non-negative.
        convention: The TradingConvention of the lattice asset. (Default: cash).
        clean_values: Node values of the clean marked-to-market value, used by the
            clean_mtm collateral rule.

    Returns:
        A Generator.
    """
    if x < 0:
        raise UnsupportedCaseError(
            'Negative endowments are not supported (x = {}); the driver is derived '
            'for x >= 0.'.format(x), 'x >= 0')
    convention = convention if convention is not None else TradingConvention.cash()
    convention.check_assets(1)
    for adj in contract.adjustments:
        adj.check_local()
    adjs = contract.compiled_adjustments(market, clean_values)
    for adj in adjs:
        adj.check_local()
    compiled = Contract(contract.stream, adjs, None, contract.defaults,
                        contract.identifier)
    generator = Generator(market, compiled, x, convention)
    worst = float(generator.contraction.max()) if len(generator.contraction) else 0.0
    if worst >= 1:
        raise SolverError(
            'The adjustment functionals make the backward step expand by a factor '
            '{:.3g} >= 1. Use a smaller time step dt.'.format(worst))
    return generator


class BsdeSolution(object):
    """Node-indexed solution (Y, Z) of the pricing BSDE with the recovered hedge.

    Args:
        generator: The Generator that was solved.
        states: A dictionary from node keys to NodeState.
        terminal: A dictionary from terminal node keys to the terminal Y.
        start_step: The first step of the solution. (Default: 0).

    Properties:
        * generator
        * market
        * x
        * start_step
        * terminal
        * root_value
        * price
        * iteration_count
    """

    def __init__(self, generator, states, terminal, start_step=0):
        self._generator = generator
        self._states = states
        self._terminal = dict(terminal)
        self._start_step = start_step

    @property
    def generator(self):
        """Get the Generator."""
        return self._generator

    @property
    def market(self):
        """Get the LatticeMarket."""
        return self._generator.market

    @property
    def x(self):
        """Get the endowment."""
        return self._generator.x

    @property
    def start_step(self):
        """Get the first step covered by the solution."""
        return self._start_step

    @property
    def terminal(self):
        """Get the dictionary of terminal values of Y."""
        return self._terminal

    @property
    def root_value(self):
        """Get Y at the root (only for solutions started at step 0)."""
        return self.y(self.market.root)

    @property
    def price(self):
        """Get the replication cost p_0 = Y_0 - x."""
        return self.root_value - self.x

    @property
    def iteration_count(self):
        """Get the total number of fixed-point iterations."""
        return sum(s.iterations for s in self._states.values())

    def state(self, node):
        """Get the NodeState at a node."""
        try:
            return self._states[node.key]
        except KeyError:
            raise InvariantError('Node {} is outside the solved steps.'.format(
                node.key), 'solution domain')

    def y(self, node):
        """Get Y at a node."""
        return self.state(node).y

    def z(self, node):
        """Get Z at a node."""
        return self.state(node).z

    def hedge(self, node):
        """Get the hedge ratio xi at a node."""
        return self.state(node).xi

    def wealth(self, node):
        """Get the wealth V = B^{0,l} Y at a node."""
        return self.state(node).wealth

    def gained_value(self, node):
        """Get the gained value B^{0,l}(Y - x) at a node."""
        b0l = self._generator.cash_lend_value(node.step)
        return b0l * (self.y(node) - self.x)

    def iterations(self, node):
        """Get the number of fixed-point iterations used at a node."""
        return self.state(node).iterations

    def values(self, step):
        """Get a numpy array of Y over the nodes of a step."""
        return np.array([self.y(n) for n in self.market.nodes(step)])

    def adjustment_values(self, node):
        """Get the tuple of adjustment values at a node."""
        return self.state(node).values

    def adjustment_table(self, index):
        """Get a dictionary from node keys to the realized value of adjustment index."""
        return {key: s.values[index] for key, s in self._states.items()}

    def nodes(self):
        """Iterate over the solved nodes step by step."""
        market = self.market
        for step in range(self._start_step, market.n_steps + 1):
            for node in market.nodes(step):
                yield node

    def consistency_residual(self):
        """Get the largest one-step residual |Y - step(Y)| over non-terminal nodes."""
        gen = self._generator
        market = self.market
        worst = 0.0
        for node in self.nodes():
            if node.step == market.n_steps:
                continue
            child_wealth = {tr.child: self.wealth(market.node(node.step + 1, tr.child))
                            for tr in node.transitions}
            xi, base = gen.hedge(node, child_wealth)
            wealth, _, _ = gen.evaluate(node, xi, base, self.y(node))
            resid = abs(wealth / gen.cash_lend_value(node.step) - self.y(node))
            worst = max(worst, resid)
        return worst

    def to_csv(self, file_obj):
        """Write step, node_id, Y, Z_1, xi_1, psi_0l and psi_0b as CSV rows."""
        market = self.market
        lend = market.account(market.accounts.cash_lend)
        borrow = market.account(market.accounts.cash_borrow)
        writer = csv.writer(file_obj)
        writer.writerow(['step', 'node_id', 'Y', 'Z_1', 'xi_1', 'psi_0l', 'psi_0b'])
        for node in self.nodes():
            s = self.state(node)
            writer.writerow([node.step, node.index, s.y, s.z, s.xi,
                             max(s.cash, 0.0) / lend[node.step],
                             -max(-s.cash, 0.0) / borrow[node.step]])

    def __repr__(self):
        return 'BsdeSolution: {} nodes from step {}'.format(len(self._states),
                                                            self._start_step)


def _terminal_table(market, terminal, x):
    nodes = market.terminal_nodes()
    if terminal is None:
        return {n.key: x for n in nodes}
    if callable(terminal):
        return {n.key: float(terminal(market, n)) for n in nodes}
    if isinstance(terminal, dict):
        missing = [n.key for n in nodes if n.key not in terminal]
        if missing:
            raise InvariantError('The terminal condition misses nodes {}.'.format(
                missing[:5]), 'terminal condition on every terminal node')
        return {n.key: float(terminal[n.key]) for n in nodes}
    return {n.key: float(terminal) for n in nodes}


def solve_backward(market, generator, terminal=None, start_step=0):
    """Solve the pricing BSDE by backward induction.

    Args:
        market: The LatticeMarket of the generator.
        generator: A Generator from build_generator.
        terminal: Terminal condition for Y at maturity. None (Y_T = x), a number, a
            dictionary from terminal node keys to values or a callable
            (market, node) -> value. (Default: None).
        start_step: Step at which the backward induction stops. (Default: 0).

    Returns:
        A BsdeSolution.
    """
    assert market is generator.market, 'The generator was built on another market.'
    started = time.time()
    table = _terminal_table(market, terminal, generator.x)
    n = market.n_steps
    states = {}
    for node in market.terminal_nodes():
        states[node.key] = generator.terminal_state(node, table[node.key])
    for step in range(n - 1, start_step - 1, -1):
        iterations = 0
        for node in market.nodes(step):
            child_wealth = {
                tr.child: states[(step + 1, tr.child)].wealth for tr in node.transitions}
            state = generator.solve_node(node, child_wealth)
            states[node.key] = state
            iterations += state.iterations
        _logger.debug('Step %d solved with %d fixed-point iterations.', step, iterations)
    solution = BsdeSolution(generator, states, table, start_step)
    _logger.info('Solved %d steps for x = %s in %.3f s.', n - start_step,
                 generator.x, time.time() - started)
    return solution


class ComparisonReport(object):
    """Outcome of a comparison check between two terminal conditions.

    Args:
        comparison_holds: True when Y2 >= Y1 at every node.
        strict_holds: True when Y1 = Y2 at a node forces equal terminal values below.
        comparison_violations: List of node keys where Y2 < Y1.
        strict_violations: List of node keys where Y1 = Y2 but terminal values below
            the node differ.
        solutions: The pair of BsdeSolution.
    """
    __slots__ = ('comparison_holds', 'strict_holds', 'comparison_violations',
                 'strict_violations', 'solutions')

    def __init__(self, comparison_violations, strict_violations, solutions):
        self.comparison_violations = list(comparison_violations)
        self.strict_violations = list(strict_violations)
        self.comparison_holds = not self.comparison_violations
        self.strict_holds = not self.strict_violations
        self.solutions = solutions

    def to_dict(self):
        """Get the report as a dictionary."""
        return {
            'type': 'ComparisonReport',
            'comparison_holds': self.comparison_holds,
            'strict_holds': self.strict_holds,
            'comparison_violations': [list(k) for k in self.comparison_violations],
            'strict_violations': [list(k) for k in self.strict_violations],
            'y0': [s.root_value for s in self.solutions]
        }


def _terminal_descendants(market):
    """Get a dictionary from node keys to the set of terminal keys below the node."""
    below = {n.key: {n.key} for n in market.terminal_nodes()}
    for step in range(market.n_steps - 1, -1, -1):
        for node in market.nodes(step):
            keys = set()
            for tr in node.transitions:
                keys |= below[(step + 1, tr.child)]
            below[node.key] = keys
    return below


def check_comparison(market, generator, xi1, xi2, tolerance=1e-10):
    """Check the comparison and strict comparison properties for two terminal values.

    Events are the lattice atoms: at every node where Y1 and Y2 agree, the terminal
    conditions must agree on every terminal node below it.

    Args:
        market: The LatticeMarket.
        generator: The Generator.
        xi1: Terminal condition of the first solution (as accepted by solve_backward).
        xi2: Terminal condition of the second solution, with xi2 >= xi1.
        tolerance: Absolute tolerance for equality of Y values. (Default: 1e-10).

    Returns:
        A ComparisonReport.
    """
    t1 = _terminal_table(market, xi1, generator.x)
    t2 = _terminal_table(market, xi2, generator.x)
    below = [k for k in t1 if t2[k] < t1[k] - tolerance]
    if below:
        raise InvariantError(
            'The second terminal condition is below the first at nodes {}.'.format(
                below[:5]), 'xi2 >= xi1')
    sol1 = solve_backward(market, generator, t1)
    sol2 = solve_backward(market, generator, t2)
    descendants = _terminal_descendants(market)
    comp, strict = [], []
    for node in market.iter_nodes():
        y1, y2 = sol1.y(node), sol2.y(node)
        if y2 < y1 - tolerance:
            comp.append(node.key)
        elif abs(y2 - y1) <= tolerance and node.step < market.n_steps:
            if any(abs(t2[k] - t1[k]) > tolerance for k in descendants[node.key]):
                strict.append(node.key)
    return ComparisonReport(comp, strict, (sol1, sol2))


def comparison_suite(market, generator, pairs=100, seed=0, tolerance=1e-10):
    """Run check_comparison on random ordered pairs of terminal conditions.

    The first terminal value is uniform in +/- S_0 / B^{0,l}_T at every terminal
    node. The second adds a non-negative bump on a random half of the nodes, so
    that many pairs agree below some nodes and differ below others.

    Args:
        market: The LatticeMarket.
        generator: The Generator.
        pairs: Number of random pairs. (Default: 100).
        seed: Seed of the numpy random generator. (Default: 0).
        tolerance: Absolute tolerance for equality of Y values. (Default: 1e-10).

    Returns:
        A dictionary with the counts of pairs violating comparison and strict
        comparison and the first violating pair index of each kind.
    """
    rng = np.random.default_rng(seed)
    keys = [n.key for n in market.terminal_nodes()]
    scale = market.asset.spot / market.account(market.accounts.cash_lend)[-1]
    comp, strict = [], []
    for i in range(pairs):
        base = rng.uniform(-scale, scale, len(keys))
        bump = rng.uniform(0.0, scale, len(keys)) * (rng.random(len(keys)) < 0.5)
        xi1 = dict(zip(keys, base))
        xi2 = dict(zip(keys, base + bump))
        report = check_comparison(market, generator, xi1, xi2, tolerance)
        if not report.comparison_holds:
            comp.append(i)
        if not report.strict_holds:
            strict.append(i)
    _logger.info('Comparison suite of %d pairs: %d comparison and %d strict '
                 'violations.', pairs, len(comp), len(strict))
    return {
        'type': 'ComparisonSuite',
        'pairs': pairs,
        'seed': seed,
        'comparison_violations': len(comp),
        'strict_violations': len(strict),
        'first_comparison_violation': comp[0] if comp else None,
        'first_strict_violation': strict[0] if strict else None,
        'holds': not comp and not strict
    }


def recover_strategy(solution, node=None):
    """Recover the replicating TradingStrategy from a BsdeSolution.

    Cash is split over the lending and borrowing accounts by its sign, funding
    positions follow the trading convention and terminal holdings are all cash.
    On default-extended lattices the hedge averages over default statuses and the
    strategy is not self-financing across default events.

    Args:
        solution: A BsdeSolution.
        node: Start node of the strategy. Defaults to the root, or must be a node of
            the first solved step.

    Returns:
        A TradingStrategy whose endowment is x B^{0,l} at the start node and whose
        price is the gained value there.
    """
    gen = solution.generator
    market = solution.market
    start = node if node is not None else market.root
    if start.step != solution.start_step:
        raise InvariantError('The strategy must start at step {}.'.format(
            solution.start_step), 'solution domain')
    mode = gen.convention.mode(0)
    accounts = market.accounts
    fund_lend, fund_borrow = accounts.funding_pair(0)
    lend = market.account(accounts.cash_lend)
    borrow = market.account(accounts.cash_borrow)
    flend = market.account(fund_lend)
    fborrow = market.account(fund_borrow)
    holdings, values = {}, {}
    for nd in solution.nodes():
        s = solution.state(nd)
        step = nd.step
        spot = market.spot(nd)
        funding = mode.funding_units(s.xi, spot, flend[step], fborrow[step]) \
            if step < market.n_steps else (0.0, 0.0, 0.0)
        holdings[nd.key] = Holding.from_cash(s.cash, lend[step], borrow[step], s.xi,
                                             (), funding)
        values[nd.key] = s.values
    x_start = solution.x * lend[start.step]
    p_start = solution.wealth(start) - x_start
    return TradingStrategy(market, x_start, p_start, Portfolio(holdings), gen.contract,
                           gen.convention, values, start)
