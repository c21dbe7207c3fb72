# coding=utf-8
"""Self-financing calculus: portfolio value, gains, wealth and its discounting.

The one-step wealth map shared by the solver, the searches and the replays:
at a node with wealth V, hedge ratio xi, deterministic holdings eta and
adjustments X the cash position is

    W = V + sum(alpha X) - xi S - eta S_det - F(xi)

and the wealth one step later is

    g_l W+ - g_b W- + xi (S' + D') + eta S_det' + F'(xi)
    + sum(X (1 - alpha - g_beta)) + dA'

where the g are one-step growth factors of the accounts and F is the funding
position of the trading convention.
"""
import csv
import logging

from .config import settings

_logger = logging.getLogger(__name__)


def cash_position(wealth_value, xi, spot, funding_value, alpha_x=0.0, eta=(),
                  det_prices=()):
    """Get the signed cash W held at a node for a wealth level and risky holdings.
    """
    return wealth_value + alpha_x - xi * spot - funding_value - \
        sum(e * s for e, s in zip(eta, det_prices))


def grow_cash(cash, growth_lend, growth_borrow):
    """Get the value after one step of a signed cash position."""
    return growth_lend * max(cash, 0.0) - growth_borrow * max(-cash, 0.0)


def required_cash(target, growth_lend, growth_borrow):
    """Get the cash W whose one-step value grow_cash(W) equals a target.

    Ties at zero go to the lending side.
    """
    return target / growth_lend if target >= 0 else target / growth_borrow


def adjustment_carry(values, alphas, beta_growths):
    """Get sum(X (1 - alpha - g_beta)), the one-step effect of the adjustments."""
    return sum(x * (1 - a - g) for x, a, g in zip(values, alphas, beta_growths))


def next_wealth(cash, xi, cum_price, funding_next, growth_lend, growth_borrow,
                carry=0.0, flow=0.0, eta=(), det_next=()):
    """Get the wealth one step later from the holdings set at a node."""
    return grow_cash(cash, growth_lend, growth_borrow) + xi * cum_price + \
        funding_next + carry + flow + sum(e * s for e, s in zip(eta, det_next))


class _Accounts(object):
    """Account values of a market at one step."""
    __slots__ = ('cash_lend', 'cash_borrow', 'fund_lend', 'fund_borrow')

    def __init__(self, market, step):
        accounts = market.accounts
        fund_lend, fund_borrow = accounts.funding_pair(0)
        self.cash_lend = market.account(accounts.cash_lend)[step]
        self.cash_borrow = market.account(accounts.cash_borrow)[step]
        self.fund_lend = market.account(fund_lend)[step]
        self.fund_borrow = market.account(fund_borrow)[step]


def _holding_value(market, node, hold):
    acc = _Accounts(market, node.step)
    det = sum(e * market.deterministic_price(node, i) for i, e in enumerate(hold.eta))
    return hold.xi * market.spot(node) + det + hold.psi_cash_lend * acc.cash_lend + \
        hold.psi_cash_borrow * acc.cash_borrow + hold.psi_fund_lend * acc.fund_lend + \
        hold.psi_fund_borrow * acc.fund_borrow + hold.broker


def _carried_value(market, node, hold, child):
    """Value at a child node of the holdings set at its parent, dividends included."""
    acc = _Accounts(market, child.step)
    det = sum(e * market.deterministic_price(child, i) for i, e in enumerate(hold.eta))
    return hold.xi * (market.spot(child) + market.dividend(child)) + det + \
        hold.psi_cash_lend * acc.cash_lend + hold.psi_cash_borrow * acc.cash_borrow + \
        hold.psi_fund_lend * acc.fund_lend + hold.psi_fund_borrow * acc.fund_borrow + \
        hold.broker


def _alpha_x(strategy, node):
    values = strategy.adjustment_values(node)
    return sum(adj.alpha * v for adj, v in zip(strategy.adjustments, values))


def _adjustment_drain(strategy, node):
    """Get sum(X^k (g_beta - 1)) over the step after a node."""
    market = strategy.market
    values = strategy.adjustment_values(node)
    total = 0.0
    for adj, v in zip(strategy.adjustments, values):
        g = market.growth(adj.beta_curve(market.accounts), node.step)
        total += v * (g - 1)
    return total


def _path(strategy, node, path):
    """Get the path from the start node to a node."""
    market = strategy.market
    path = path if path is not None else market.path_to(node)
    start = strategy.start
    if start.step >= len(path) or path[start.step].key != start.key:
        from .errors import DomainError
        raise DomainError('Node {} is not reached from the start {} along the given '
                          'path.'.format(node.key, start.key))
    return path[start.step:]


def portfolio_value(strategy, node):
    """Get V^p, the value of the holdings set at a node."""
    return _holding_value(strategy.market, node, strategy.holding(node))


def gains_process(strategy, node, path=None):
    """Get the adjusted gains G from the start to a node.

    Args:
        strategy: A TradingStrategy.
        node: The node at time u.
        path: Optional list of nodes from the root to the node. Defaults to the
            canonical path of the node.
    """
    market = strategy.market
    nodes = _path(strategy, node, path)
    gains = 0.0
    for prev, cur in zip(nodes[:-1], nodes[1:]):
        hold = strategy.holding(prev)
        gains += _carried_value(market, prev, hold, cur) - \
            _holding_value(market, prev, hold)
        gains -= _adjustment_drain(strategy, prev)
        gains += strategy.contract.stream.increment(market, cur)
    return gains + _alpha_x(strategy, node)


def wealth(strategy, node):
    """Get the wealth V = V^p - sum(alpha X) at a node."""
    return portfolio_value(strategy, node) - _alpha_x(strategy, node)


def is_self_financing(strategy, tolerance=1e-10):
    """Check the self-financing identity V^p = x + p + G on every transition.

    The initial identity V^p_start = x + p + sum(alpha X) is checked at the start
    and every move from a node to a child must carry the value of the parent's
    holdings, plus dividends, flows and adjustment changes, into the value of the
    child's holdings. Along any path this is V^p_u = x + p + G_u.

    Returns:
        A tuple with a boolean, the maximum violation and the key of the node where
        it happens (None when there is no violation).
    """
    market = strategy.market
    start = strategy.start
    worst, worst_node = abs(portfolio_value(strategy, start) - strategy.x - strategy.p -
                            _alpha_x(strategy, start)), start.key
    for node in strategy.reachable_nodes():
        if node.step == market.n_steps:
            continue
        hold = strategy.holding(node)
        drain = _adjustment_drain(strategy, node)
        ax_node = _alpha_x(strategy, node)
        for child in market.children(node):
            carried = _carried_value(market, node, hold, child) - drain + \
                _alpha_x(strategy, child) - ax_node + \
                strategy.contract.stream.increment(market, child)
            gap = abs(carried - portfolio_value(strategy, child))
            if gap > worst:
                worst, worst_node = gap, child.key
    scale = max(1.0, abs(strategy.x) + abs(strategy.p))
    ok = worst <= tolerance * scale
    return ok, worst, (None if ok else worst_node)


def funding_adjustment(strategy, node, path=None):
    """Get the funding adjustment accumulated from the start to a node.

    Every account position earns its own rate minus the cash lending rate, and every
    adjustment is charged its remuneration rate minus the cash lending rate. The sum
    vanishes when all accounts and remuneration curves equal the cash account.
    """
    market = strategy.market
    accounts = market.accounts
    fund_lend, fund_borrow = accounts.funding_pair(0)
    total = 0.0
    for prev in _path(strategy, node, path)[:-1]:
        step = prev.step
        acc = _Accounts(market, step)
        g0 = market.growth(accounts.cash_lend, step)
        hold = strategy.holding(prev)
        total += hold.psi_cash_borrow * acc.cash_borrow * \
            (market.growth(accounts.cash_borrow, step) - g0)
        total += hold.psi_fund_lend * acc.fund_lend * \
            (market.growth(fund_lend, step) - g0)
        total += hold.psi_fund_borrow * acc.fund_borrow * \
            (market.growth(fund_borrow, step) - g0)
        total += hold.broker * (1 - g0)
        for adj, v in zip(strategy.adjustments, strategy.adjustment_values(prev)):
            g = market.growth(adj.beta_curve(accounts), step)
            total -= v * (g - g0)
    return total


def cash_adjustment(strategy, k, node, path=None):
    """Get the cash adjustment of adjustment k at a node.

    The value is alpha X_t minus the remuneration sum(X_u (g_beta - 1)) paid over
    the steps before t.
    """
    market = strategy.market
    adj = strategy.adjustments[k]
    curve = adj.beta_curve(market.accounts)
    nodes = _path(strategy, node, path)
    drain = sum(strategy.adjustment_values(prev)[k] *
                (market.growth(curve, prev.step) - 1) for prev in nodes[:-1])
    return adj.alpha * strategy.adjustment_values(node)[k] - drain


def cash_adjustment_by_parts(strategy, k, node, path=None):
    """Get the integration-by-parts form X_start + sum(beta d(X / beta)).

    It equals cash_adjustment when alpha = 1.
    """
    market = strategy.market
    curve = strategy.adjustments[k].beta_curve(market.accounts)
    beta = market.account(curve)
    nodes = _path(strategy, node, path)
    total = strategy.adjustment_values(nodes[0])[k]
    for prev, cur in zip(nodes[:-1], nodes[1:]):
        x_prev = strategy.adjustment_values(prev)[k] / beta[prev.step]
        x_cur = strategy.adjustment_values(cur)[k] / beta[cur.step]
        total += beta[cur.step] * (x_cur - x_prev)
    return total


def discounting_curve(strategy):
    """Get the cash curve discounting a strategy's wealth from its endowment."""
    return strategy.market.discount_basis(strategy.x)


def discounted_wealth(strategy, node):
    """Get the wealth discounted back to the start with the endowment's account."""
    values = strategy.market.account(discounting_curve(strategy))
    return wealth(strategy, node) * values[strategy.start.step] / values[node.step]


def combined_wealth(x1, x2, strategy_long, strategy_short, node):
    """Get the combined wealth of a desk holding a contract and its mirror.

    Args:
        x1: Endowment of the first leg.
        x2: Endowment of the second leg.
        strategy_long: Strategy for (A, X) with endowment x1 and price 0.
        strategy_short: Strategy for (-A, Y) with endowment x2 and price 0.
        node: The node.
    """
    assert strategy_long.p == 0 and strategy_short.p == 0, \
        'Combined wealth is defined for strategies priced at 0.'
    assert abs(strategy_long.x - x1) <= 1e-12 and abs(strategy_short.x - x2) <= 1e-12, \
        'Strategy endowments must match x1 and x2.'
    return wealth(strategy_long, node) + wealth(strategy_short, node)


def discounted_combined_wealth(x1, x2, strategy_long, strategy_short, node):
    """Get the combined wealth discounted with the account of x = x1 + x2."""
    market = strategy_long.market
    values = market.account(market.discount_basis(x1 + x2))
    return combined_wealth(x1, x2, strategy_long, strategy_short, node) * \
        values[0] / values[node.step]


def is_admissible(strategy, bound=None):
    """Check that the discounted wealth never falls below a bound.

    Args:
        strategy: A TradingStrategy.
        bound: The lower bound. Defaults to the admissibility_bound setting.

    Returns:
        A tuple with a boolean and the minimum discounted wealth over all nodes.
    """
    bound = settings.admissibility_bound if bound is None else bound
    minimum = min(discounted_wealth(strategy, node)
                  for node in strategy.reachable_nodes())
    return minimum >= bound, minimum


def terminal_discounted_wealth(strategy):
    """Get a dictionary of discounted wealth at every reachable terminal node."""
    n = strategy.market.n_steps
    return {node.key: discounted_wealth(strategy, node)
            for node in strategy.reachable_nodes() if node.step == n}


class WealthRow(object):
    """Wealth quantities at one node."""
    __slots__ = ('step', 'node_id', 'v_p', 'v', 'v_tilde', 'g', 'cash_adj',
                 'funding_adj')

    def __init__(self, step, node_id, v_p, v, v_tilde, g, cash_adj, funding_adj):
        self.step = step
        self.node_id = node_id
        self.v_p = v_p
        self.v = v
        self.v_tilde = v_tilde
        self.g = g
        self.cash_adj = cash_adj
        self.funding_adj = funding_adj

    def to_list(self):
        return [self.step, self.node_id, self.v_p, self.v, self.v_tilde, self.g,
                self.cash_adj, self.funding_adj]


class WealthPath(object):
    """Wealth quantities at every node reachable by a strategy.

    Gains, cash and funding adjustments are accumulated along canonical paths.

    Args:
        strategy: A TradingStrategy started at the root.
    """
    COLUMNS = ('step', 'node_id', 'V_p', 'V', 'V_tilde', 'G', 'cash_adj',
               'funding_adj')

    def __init__(self, strategy):
        self._strategy = strategy
        rows = []
        count = len(strategy.adjustments)
        for node in strategy.reachable_nodes():
            cash_adj = sum(cash_adjustment(strategy, k, node) for k in range(count))
            rows.append(WealthRow(
                node.step, node.index, portfolio_value(strategy, node),
                wealth(strategy, node), discounted_wealth(strategy, node),
                gains_process(strategy, node), cash_adj,
                funding_adjustment(strategy, node)))
        self._rows = rows

    @property
    def rows(self):
        """Get the list of WealthRow objects."""
        return self._rows

    def to_csv(self, file_obj):
        """Write the rows as CSV to an open file object."""
        writer = csv.writer(file_obj)
        writer.writerow(self.COLUMNS)
        for row in self._rows:
            writer.writerow(row.to_list())
        _logger.debug('Wrote %d wealth rows.', len(self._rows))

    def __len__(self):
        return len(self._rows)
