# coding=utf-8
"""Brute-force superhedging on small lattices and the regularity verdict.

The minimal superhedging cost is found by a dynamic program over a finite search
space of hedge ratios and deterministic-asset holdings. At every node the least
wealth that keeps every child above its own requirement is computed for each
candidate and the cheapest candidate is kept. Cash is continuous so the cash
position is solved exactly from the piecewise linear growth of cash.
"""
import itertools
import logging

import numpy as np

from .contract import Contract
from .convention import TradingConvention
from .wealth import grow_cash, adjustment_carry
from .config import settings
from .errors import SearchResourceError, UnsupportedCaseError

_logger = logging.getLogger(__name__)

REGULAR = 'REGULAR'
NOT_REGULAR = 'NOT_REGULAR'
UNDETERMINED = 'UNDETERMINED'
BOUND_KEYS = ('strict_subhedging_sup', 'fair_sup', 'superhedging_inf',
              'strict_superhedging_inf')


class SearchSpace(object):
    """A finite set of holdings searched at every node.

    Args:
        xi_grid: Candidate hedge ratios of the lattice asset.
        eta_grids: A list with the candidate holdings of each deterministic asset.
            Assets without a grid are held at 0. (Default: ()).
        allow_borrowing: Set to False to keep the cash position non-negative.
            (Default: True).
        include_replicating: Set to True to add the two-point replicating ratio of
            every node to the hedge-ratio candidates. (Default: True).

    Properties:
        * xi_grid
        * eta_grids
        * allow_borrowing
        * include_replicating
        * resolution
    """
    __slots__ = ('_xi_grid', '_eta_grids', '_allow_borrowing', '_include_replicating')

    def __init__(self, xi_grid, eta_grids=(), allow_borrowing=True,
                 include_replicating=True):
        xi_grid = np.unique(np.asarray(xi_grid, dtype=float))
        assert len(xi_grid) > 0, 'The hedge-ratio grid must not be empty.'
        self._xi_grid = xi_grid
        self._eta_grids = tuple(np.unique(np.asarray(g, dtype=float))
                                for g in eta_grids)
        self._allow_borrowing = bool(allow_borrowing)
        self._include_replicating = bool(include_replicating)

    @classmethod
    def from_step(cls, step, xi_min=-1.0, xi_max=1.0, eta_values=(),
                  allow_borrowing=True, include_replicating=True):
        """Create a search space from a hedge-ratio grid step.

        Args:
            step: Spacing of the hedge-ratio grid.
            xi_min: Smallest hedge ratio. (Default: -1).
            xi_max: Largest hedge ratio. (Default: 1).
            eta_values: A list with the candidate holdings of each deterministic
                asset. (Default: ()).
            allow_borrowing: Set to False to preclude borrowing. (Default: True).
            include_replicating: Add the two-point replicating ratio.
                (Default: True).
        """
        assert step > 0, 'Grid step must be positive. Got {}.'.format(step)
        count = int(round((xi_max - xi_min) / step)) + 1
        grid = np.linspace(xi_min, xi_min + (count - 1) * step, count)
        return cls(grid, eta_values, allow_borrowing, include_replicating)

    @property
    def xi_grid(self):
        """Get a numpy array of candidate hedge ratios."""
        return self._xi_grid

    @property
    def eta_grids(self):
        """Get a tuple of numpy arrays of deterministic-asset holdings."""
        return self._eta_grids

    @property
    def allow_borrowing(self):
        """Get a boolean noting whether the cash position may be negative."""
        return self._allow_borrowing

    @property
    def include_replicating(self):
        """Get a boolean noting whether the replicating ratio is a candidate."""
        return self._include_replicating

    @property
    def resolution(self):
        """Get the largest spacing of the hedge-ratio grid (0 for a single point)."""
        grid = self._xi_grid
        return float(np.max(np.diff(grid))) if len(grid) > 1 else 0.0

    def eta_candidates(self, asset_count):
        """Get an array with one row of deterministic holdings per candidate."""
        grids = list(self._eta_grids[:asset_count])
        grids += [np.zeros(1)] * (asset_count - len(grids))
        if not grids:
            return np.zeros((1, 0))
        return np.array(list(itertools.product(*grids)), dtype=float)

    def candidate_count(self, asset_count):
        """Get the number of holdings tried at a node."""
        extra = 1 if self._include_replicating else 0
        return (len(self._xi_grid) + extra) * len(self.eta_candidates(asset_count))

    def label(self):
        """Get a text description of the search space for reports."""
        grid = self._xi_grid
        return 'xi in [{:g}, {:g}] step {:g} ({} points){}; eta grids {}; {}'.format(
            grid[0], grid[-1], self.resolution, len(grid),
            ' + replicating ratio' if self._include_replicating else '',
            [list(map(float, g)) for g in self._eta_grids],
            'borrowing allowed' if self._allow_borrowing else 'no borrowing')

    def to_dict(self):
        """Get the search space as a dictionary."""
        return {
            'type': 'SearchSpace',
            'xi_grid': [float(v) for v in self._xi_grid],
            'eta_grids': [[float(v) for v in g] for g in self._eta_grids],
            'allow_borrowing': self._allow_borrowing,
            'include_replicating': self._include_replicating
        }

    def __repr__(self):
        return 'SearchSpace: {}'.format(self.label())


class StepModel(object):
    """The one-step wealth map of a market, contract and convention.

    Only exogenous adjustments are supported; functionals need the solver.

    Args:
        market: The LatticeMarket.
        contract: The Contract.
        convention: The TradingConvention. (Default: cash).

    Properties:
        * market
        * contract
        * convention
        * adjustments
    """

    def __init__(self, market, contract=None, convention=None):
        self._market = market
        self._contract = contract if contract is not None else Contract.null()
        self._convention = convention if convention is not None \
            else TradingConvention.cash()
        self._convention.check_assets(1)
        self._mode = self._convention.mode(0)
        adjs = self._contract.compiled_adjustments(market)
        for adj in adjs:
            adj.check_local()
            if adj.is_functional:
                raise UnsupportedCaseError(
                    'Adjustment "{}" is a functional of the solution; the '
                    'superhedging search handles exogenous adjustments only.'.format(
                        adj.identifier), 'exogenous adjustments')
        self._adjustments = tuple(adjs)
        self._induced = tuple(self._mode.induced_adjustments())
        accounts = market.accounts
        fund_lend, fund_borrow = accounts.funding_pair(0)
        self._curves = (accounts.cash_lend, accounts.cash_borrow, fund_lend,
                        fund_borrow)
        self._beta_curves = [a.beta_curve(accounts) for a in self._adjustments]
        self._induced_curves = [b if b is not None else accounts.cash_lend
                                for _, _, b, _ in self._induced]

    @property
    def market(self):
        """Get the LatticeMarket."""
        return self._market

    @property
    def contract(self):
        """Get the Contract."""
        return self._contract

    @property
    def convention(self):
        """Get the TradingConvention."""
        return self._convention

    @property
    def adjustments(self):
        """Get the tuple of exogenous contract adjustments."""
        return self._adjustments

    def growths(self, step):
        """Get (g_lend, g_borrow, g_fund_lend, g_fund_borrow) over a step."""
        return tuple(self._market.growth(c, step) for c in self._curves)

    def alpha_x(self, node):
        """Get sum(alpha X) of the contract adjustments at a node."""
        return sum(a.alpha * a.value(self._market, node) for a in self._adjustments)

    def det_prices(self, node):
        """Get a numpy array of deterministic-asset prices at a node."""
        market = self._market
        return np.array([market.deterministic_price(node, i)
                         for i in range(len(market.deterministic_assets))])

    def children(self, node):
        """Get a list of (transition, child) pairs of a node."""
        market = self._market
        return [(tr, market.node(node.step + 1, tr.child)) for tr in node.transitions]

    def offsets(self, node, xi, eta):
        """Get the part of the next wealth that does not come from cash.

        Args:
            node: A non-terminal node.
            xi: A numpy array of hedge ratios (one per candidate).
            eta: A numpy array with one row of deterministic holdings per candidate.

        Returns:
            A numpy array with one row per candidate and one column per transition of
            xi (S' + D') + eta S_det' + F'(xi) + carry + dA'.
        """
        market = self._market
        step = node.step
        spot = market.spot(node)
        g_l, g_b, gf_l, gf_b = self.growths(step)
        f_next = np.array([self._mode.funding_next(v, spot, gf_l, gf_b) for v in xi])
        values = [a.value(market, node) for a in self._adjustments]
        betas = [market.growth(c, step) for c in self._beta_curves]
        carry = adjustment_carry(values, [a.alpha for a in self._adjustments], betas)
        ind_betas = [market.growth(c, step) for c in self._induced_curves]
        for (_, alpha, _, func), g in zip(self._induced, ind_betas):
            carry = carry + np.array([func(v, spot) * (1 - alpha - g) for v in xi])
        p_up, p_down = market.cum_prices(node)
        stream = self._contract.stream
        cols = []
        for tr, child in self.children(node):
            price = p_up if tr.up else p_down
            det = eta.dot(self.det_prices(child)) if eta.shape[1] else 0.0
            cols.append(xi * price + det + f_next + carry +
                        stream.increment(market, child))
        return np.column_stack(cols)

    def wealth_from_cash(self, node, cash, xi, eta):
        """Get the wealth V = W - sum(alpha X) + xi S + eta S_det + F(xi)."""
        spot = self._market.spot(node)
        f_now = np.array([self._mode.funding_value(v, spot) for v in np.atleast_1d(xi)])
        det = eta.dot(self.det_prices(node)) if eta.shape[1] else 0.0
        return cash - self.alpha_x(node) + xi * spot + det + f_now

    def cash_from_wealth(self, node, wealth, xi, eta):
        """Get the cash position W held at a node for a wealth level and holdings."""
        spot = self._market.spot(node)
        f_now = self._mode.funding_value(xi, spot)
        det = float(np.dot(eta, self.det_prices(node))) if len(eta) else 0.0
        return wealth + self.alpha_x(node) - xi * spot - det - f_now

    def step(self, node, wealth, xi, eta):
        """Get the cash set at a node and the wealth at every child.

        Returns:
            A tuple (cash, [(transition, child, next_wealth), ...]).
        """
        eta = np.asarray(eta, dtype=float)
        cash = self.cash_from_wealth(node, wealth, xi, eta)
        g_l, g_b, _, _ = self.growths(node.step)
        offs = self.offsets(node, np.array([xi]), eta.reshape(1, -1))[0]
        grown = grow_cash(cash, g_l, g_b)
        return cash, [(tr, child, grown + off) for (tr, child), off
                      in zip(self.children(node), offs)]


class FeedbackStrategy(object):
    """A strategy that picks holdings from the node and rebalances its cash.

    On a recombining lattice the wealth of a strategy that is not replicating
    depends on the path, so holdings are stored per node and the cash position is
    read from the wealth reached along each path.

    Args:
        model: A StepModel.
        decisions: A dictionary from node keys to (xi, eta) pairs. Missing nodes
            hold nothing but cash.
        start_wealth: Wealth at the root, x + p.
        allow_borrowing: Set to False to flag negative cash. (Default: True).
        label: Text describing the strategy. (Default: strategy).

    Properties:
        * model
        * decisions
        * start_wealth
        * label
    """

    def __init__(self, model, decisions, start_wealth, allow_borrowing=True,
                 label='strategy'):
        self.model = model
        self.decisions = dict(decisions)
        self.start_wealth = float(start_wealth)
        self.allow_borrowing = bool(allow_borrowing)
        self.label = label
        self._replay = None
        self._steps = None

    def decision(self, node):
        """Get the (xi, eta) pair chosen at a node."""
        n_det = len(self.model.market.deterministic_assets)
        xi, eta = self.decisions.get(node.key, (0.0, ()))
        eta = tuple(eta) + (0.0,) * (n_det - len(eta))
        return float(xi), eta

    def replay(self):
        """Propagate the wealth forward over every path.

        Identical (node, wealth) states are merged. Returns a dictionary with the
        terminal states as a list of (node key, wealth, probability) triples, the
        smallest wealth and the smallest cash position met on the way.
        """
        if self._replay is not None:
            return self._replay
        market = self.model.market
        prob_up = market.asset.probability
        states = {(market.root.key, round(self.start_wealth, 12)):
                  (market.root, self.start_wealth, 1.0)}
        min_wealth, min_cash = self.start_wealth, float('inf')
        for _ in range(market.n_steps):
            nxt = {}
            for node, wealth, prob in states.values():
                xi, eta = self.decision(node)
                cash, moves = self.model.step(node, wealth, xi, eta)
                min_cash = min(min_cash, cash)
                for tr, child, value in moves:
                    p = prob * (prob_up if tr.up else 1 - prob_up) * tr.weight
                    key = (child.key, round(value, 12))
                    if key in nxt:
                        nxt[key] = (child, value, nxt[key][2] + p)
                    else:
                        nxt[key] = (child, value, p)
                    min_wealth = min(min_wealth, value)
            states = nxt
        terminal = [(node.key, wealth, prob) for node, wealth, prob in states.values()]
        self._replay = {'terminal': terminal, 'min_wealth': min_wealth,
                        'min_cash': min_cash}
        return self._replay

    def affine_steps(self):
        """Get the one-step wealth map of the holdings at every non-terminal node.

        Returns:
            A dictionary from node keys to (shift, g_lend, g_borrow, moves) where
            the cash held is wealth + shift and moves is a list of (child key,
            offset) pairs with next wealth = grow_cash(cash) + offset.
        """
        if self._steps is not None:
            return self._steps
        model = self.model
        market = model.market
        steps = {}
        for node in market.iter_nodes():
            if node.step >= market.n_steps:
                continue
            xi, eta = self.decision(node)
            eta = np.asarray(eta, dtype=float)
            shift = model.cash_from_wealth(node, 0.0, xi, eta)
            g_l, g_b, _, _ = model.growths(node.step)
            offs = model.offsets(node, np.array([xi]), eta.reshape(1, -1))[0]
            kids = [child.key for _, child in model.children(node)]
            steps[node.key] = (float(shift), g_l, g_b,
                               [(k, float(o)) for k, o in zip(kids, offs)])
        self._steps = steps
        return steps

    def envelope(self, start_wealth=None):
        """Get the lowest and highest wealth reaching every node.

        The one-step wealth map increases with the wealth, so the extremes over all
        paths are carried node by node without enumerating paths.

        Args:
            start_wealth: Wealth at the root. (Default: the strategy start wealth).

        Returns:
            A tuple (low, high, min_cash) with low and high dictionaries from node
            keys to wealth.
        """
        market = self.model.market
        w0 = self.start_wealth if start_wealth is None else float(start_wealth)
        steps = self.affine_steps()
        low, high = {market.root.key: w0}, {market.root.key: w0}
        min_cash = float('inf')
        for step in range(market.n_steps):
            for node in market.nodes(step):
                if node.key not in low:
                    continue
                shift, g_l, g_b, moves = steps[node.key]
                cash_low = low[node.key] + shift
                min_cash = min(min_cash, cash_low)
                grown_low = grow_cash(cash_low, g_l, g_b)
                grown_high = grow_cash(high[node.key] + shift, g_l, g_b)
                for key, off in moves:
                    low[key] = min(low.get(key, float('inf')), grown_low + off)
                    high[key] = max(high.get(key, float('-inf')), grown_high + off)
        return low, high, min_cash

    def hedge_flags(self, x, start_wealth, tolerance=1e-9):
        """Check whether the holdings started from a wealth superhedge x.

        Returns:
            A tuple (superhedge, strict) of booleans.
        """
        market = self.model.market
        low, high, min_cash = self.envelope(start_wealth)
        values = market.account(market.discount_basis(x))
        ratio = values[0] / values[-1]
        tol = tolerance * max(1.0, abs(x))
        keys = [n.key for n in market.terminal_nodes() if n.key in low]
        ok = all(low[k] * ratio >= x - tol for k in keys)
        if not self.allow_borrowing:
            ok = ok and min_cash >= -tolerance * max(1.0, abs(start_wealth))
        strict = ok and any(high[k] * ratio > x + tol for k in keys)
        return ok, strict

    def terminal_requirement(self, x):
        """Get x B_T / B_0 with B the account of the endowment's sign."""
        market = self.model.market
        values = market.account(market.discount_basis(x))
        return x * values[-1] / values[0]

    def discounted_terminal(self, x):
        """Get a list of (node key, discounted wealth, probability) triples."""
        market = self.model.market
        values = market.account(market.discount_basis(x))
        ratio = values[0] / values[-1]
        return [(k, w * ratio, p) for k, w, p in self.replay()['terminal']]

    def borrows(self, tolerance=1e-9):
        """Check whether the strategy holds negative cash somewhere."""
        return self.replay()['min_cash'] < -tolerance * max(1.0, abs(self.start_wealth))

    def is_superhedge(self, x, tolerance=1e-9):
        """Check V~_T >= x on every path (and no borrowing when precluded)."""
        if not self.allow_borrowing and self.borrows(tolerance):
            return False
        tol = tolerance * max(1.0, abs(x))
        return all(w >= x - tol for _, w, _ in self.discounted_terminal(x))

    def is_strict(self, x, tolerance=1e-9):
        """Check that a superhedge ends strictly above x with positive probability."""
        tol = tolerance * max(1.0, abs(x))
        return self.is_superhedge(x, tolerance) and any(
            w > x + tol and p > 0 for _, w, p in self.discounted_terminal(x))

    def to_dict(self):
        """Get the strategy decisions as a dictionary."""
        return {
            'type': 'FeedbackStrategy',
            'label': self.label,
            'start_wealth': self.start_wealth,
            'allow_borrowing': self.allow_borrowing,
            'decisions': {'{},{}'.format(*k): {'xi': float(v[0]),
                                               'eta': [float(e) for e in v[1]]}
                          for k, v in sorted(self.decisions.items())}
        }

    def __repr__(self):
        return 'FeedbackStrategy: {} (start wealth {:.6g})'.format(
            self.label, self.start_wealth)


class SuperhedgeResult(object):
    """Outcome of a brute-force superhedging search.

    The four fair-price bounds are located by bisection over the price with the
    cheapest holdings replayed forward from x + p. Superhedging at p brackets the
    strict-subhedging sup and the superhedging inf; strict superhedging at p
    brackets the fair sup and the strict-superhedging inf.

    Args:
        x: The endowment.
        cost: The minimal superhedging wealth m_0 at the root.
        attained_strict: True when the cheapest superhedge is strict.
        error_bar: Bound on the cost change caused by the grid resolution.
        strategy: The cheapest superhedge as a FeedbackStrategy.
        space: The SearchSpace.
        cells: Number of (node, candidate) pairs evaluated.
        bounds: Dictionary of the four bounds keyed by BOUND_KEYS.
        price_tolerance: Width of the bisection brackets.

    Properties:
        * price
        * bounds
        * ordering_ok
        * matches_search
    """

    def __init__(self, x, cost, attained_strict, error_bar, strategy, space, cells,
                 bounds, price_tolerance):
        self.x = float(x)
        self.cost = float(cost)
        self.attained_strict = bool(attained_strict)
        self.error_bar = float(error_bar)
        self.strategy = strategy
        self.space = space
        self.cells = int(cells)
        assert set(bounds) == set(BOUND_KEYS), \
            'Expected the bounds {}. Got {}.'.format(BOUND_KEYS, sorted(bounds))
        self._bounds = dict(bounds)
        self.price_tolerance = float(price_tolerance)

    @property
    def price(self):
        """Get the superhedging price m_0 - x."""
        return self.cost - self.x

    @property
    def bounds(self):
        """Get the four fair-price bounds as a dictionary."""
        return dict(self._bounds)

    @property
    def _margin(self):
        return 4 * self.price_tolerance + 1e-12 * max(1.0, abs(self.price))

    @property
    def ordering_ok(self):
        """Check strict-subhedging sup <= fair sup = superhedging inf <= strict inf."""
        b, tol = self._bounds, self._margin
        return b['strict_subhedging_sup'] <= b['fair_sup'] + tol and \
            abs(b['fair_sup'] - b['superhedging_inf']) <= tol and \
            b['superhedging_inf'] <= b['strict_superhedging_inf'] + tol

    @property
    def matches_search(self):
        """Check that the bisected superhedging inf agrees with the search price."""
        return abs(self._bounds['superhedging_inf'] - self.price) <= self._margin

    def to_dict(self):
        """Get the result as a dictionary."""
        return {
            'type': 'SuperhedgeResult',
            'x': self.x,
            'price': self.price,
            'bounds': self.bounds,
            'attained_strict': self.attained_strict,
            'error_bar': self.error_bar,
            'price_tolerance': self.price_tolerance,
            'ordering_ok': self.ordering_ok,
            'matches_search': self.matches_search,
            'cells': self.cells,
            'search_space': self.space.label(),
            'provenance': 'dynamic program over the search space; bounds by '
                          'bisection over the price'
        }

    def __repr__(self):
        return 'SuperhedgeResult: price={:.10g} +/- {:.3g}'.format(
            self.price, self.error_bar)


def _bracket(predicate, lo, hi, width, max_doublings=64):
    """Get (lo, hi) with the predicate false at lo, true at hi and hi - lo <= width.

    The predicate must be monotone in the price.
    """
    step = max(hi - lo, width)
    for _ in range(max_doublings):
        if not predicate(lo):
            break
        lo, step = lo - step, 2 * step
    else:
        raise SearchResourceError('No price below {} fails the hedge check.'.format(lo))
    step = max(hi - lo, width)
    for _ in range(max_doublings):
        if predicate(hi):
            break
        hi, step = hi + step, 2 * step
    else:
        raise SearchResourceError('No price up to {} passes the hedge check.'.format(hi))
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def fair_price_bounds(strategy, x, guess, tolerance=1e-9, width=None):
    """Locate the four fair-price bounds of the holdings of a strategy.

    A price p is tested by replaying the holdings from the wealth x + p; every bound
    comes from its own bisection.

    Args:
        strategy: A FeedbackStrategy whose start wealth is ignored.
        x: The initial endowment.
        guess: A price used to open the brackets.
        tolerance: Relative tolerance of the hedge checks. (Default: 1e-9).
        width: Width of the final brackets. (Default: tolerance times the scale).

    Returns:
        A tuple (bounds, width) with bounds a dictionary of the four bounds.
    """
    width = width or tolerance * max(1.0, abs(x), abs(guess))

    def _superhedge(p):
        return strategy.hedge_flags(x, x + p, tolerance)[0]

    def _strict(p):
        return strategy.hedge_flags(x, x + p, tolerance)[1]

    lo_s, hi_s = _bracket(_superhedge, guess - width, guess + width, width)
    lo_f, hi_f = _bracket(_strict, guess - width, guess + width, width)
    bounds = {'strict_subhedging_sup': lo_s, 'fair_sup': lo_f,
              'superhedging_inf': hi_s, 'strict_superhedging_inf': hi_f}
    return bounds, width


def _replicating_ratio(model, node, requirement):
    """Get the two-point ratio matching the child requirements net of flows."""
    market = model.market
    stream = model.contract.stream
    best = {True: -np.inf, False: -np.inf}
    for tr, child in model.children(node):
        value = requirement[child.key] - stream.increment(market, child)
        best[tr.up] = max(best[tr.up], value)
    p_up, p_down = market.cum_prices(node)
    return (best[True] - best[False]) / (p_up - p_down)


def superhedge_bruteforce(market, contract, x, space, convention=None,
                          tolerance=1e-9):
    """Find the minimal superhedging cost of a contract over a search space.

    Args:
        market: A small LatticeMarket.
        contract: The Contract (exogenous adjustments only).
        x: The initial endowment.
        space: The SearchSpace.
        convention: The TradingConvention. (Default: cash).
        tolerance: Relative tolerance for ties and strictness. (Default: 1e-9).

    Returns:
        A SuperhedgeResult.
    """
    model = StepModel(market, contract, convention)
    n_det = len(market.deterministic_assets)
    etas = space.eta_candidates(n_det)
    n_cand = space.candidate_count(n_det)
    cells = market.node_count * n_cand
    if cells > settings.superhedge_cell_limit:
        raise SearchResourceError(
            'The search needs {} node-candidate cells, above the limit of {}. Use a '
            'coarser grid or fewer steps.'.format(cells, settings.superhedge_cell_limit))
    _logger.info('Superhedging search over %d nodes and %d candidates (%s).',
                 market.node_count, n_cand, space.label())

    values = market.account(market.discount_basis(x))
    target = x * values[-1] / values[0]
    requirement = {n.key: target for n in market.terminal_nodes()}
    strict = {n.key: False for n in market.terminal_nodes()}
    decisions = {}
    error_bar = 0.0
    h = space.resolution
    for step in range(market.n_steps - 1, -1, -1):
        g_l, g_b, _, _ = model.growths(step)
        step_bar = 0.0
        for node in market.nodes(step):
            xis = space.xi_grid
            if space.include_replicating:
                xis = np.append(xis, _replicating_ratio(model, node, requirement))
            xi = np.repeat(xis, len(etas))
            eta = np.tile(etas, (len(xis), 1))
            offs = model.offsets(node, xi, eta)
            kids = model.children(node)
            need = np.array([requirement[child.key] for _, child in kids])
            phi = need[None, :] - offs
            worst = phi.max(axis=1)
            cash = np.where(worst >= 0, worst / g_l, worst / g_b)
            if not space.allow_borrowing:
                cash = np.maximum(cash, 0.0)
            cost = model.wealth_from_cash(node, cash, xi, eta)
            best = cost.min()
            tol = tolerance * max(1.0, abs(best))
            ties = np.flatnonzero(cost <= best + tol)
            kid_strict = np.array([strict[child.key] for _, child in kids])
            grown = np.where(cash >= 0, g_l * cash, g_b * cash)
            slack = grown[:, None] + offs - need[None, :]
            is_strict = ((slack > tol) | ((np.abs(slack) <= tol) & kid_strict)).any(
                axis=1)
            strict_ties = [i for i in ties if is_strict[i]]
            pick = strict_ties[0] if strict_ties else ties[0]
            requirement[node.key] = float(cost[pick])
            strict[node.key] = bool(is_strict[pick])
            decisions[node.key] = (float(xi[pick]), tuple(float(e) for e in eta[pick]))
            p_up, p_down = market.cum_prices(node)
            step_bar = max(step_bar, 0.5 * h * (p_up - p_down))
        error_bar += step_bar
    root = market.root.key
    strategy = FeedbackStrategy(model, decisions, requirement[root],
                                space.allow_borrowing, 'cheapest superhedge')
    bounds, width = fair_price_bounds(strategy, x, requirement[root] - x, tolerance)
    result = SuperhedgeResult(x, requirement[root], strict[root], error_bar, strategy,
                              space, cells, bounds, width)
    if not result.ordering_ok:
        _logger.warning('Fair-price bounds out of order: %s', bounds)
    if not result.matches_search:
        _logger.warning('The bisected superhedging inf %s differs from the search '
                        'price %s.', bounds['superhedging_inf'], result.price)
    _logger.info('%s', result)
    return result


class RegularityVerdict(object):
    """Whether replication is the cheapest superhedge and strict ones are dearer.

    Args:
        verdict: One of REGULAR, NOT_REGULAR or UNDETERMINED.
        replication_cost: The replication cost p_hat_0.
        reason: Text explaining the verdict.
        witness: Optional FeedbackStrategy showing the verdict.
        search: Optional SuperhedgeResult of the brute-force search.
    """
    __slots__ = ('verdict', 'replication_cost', 'reason', 'witness', 'search')

    def __init__(self, verdict, replication_cost, reason, witness=None, search=None):
        self.verdict = verdict
        self.replication_cost = replication_cost
        self.reason = reason
        self.witness = witness
        self.search = search

    def to_dict(self):
        """Get the verdict as a dictionary."""
        base = {'type': 'RegularityVerdict', 'verdict': self.verdict,
                'replication_cost': self.replication_cost, 'reason': self.reason}
        if self.witness is not None:
            base['witness'] = self.witness.to_dict()
        if self.search is not None:
            base['search'] = self.search.to_dict()
        return base

    def __repr__(self):
        return 'RegularityVerdict: {} ({})'.format(self.verdict, self.reason)


def regularity_verdict(market, contract, x, space, convention=None, witnesses=(),
                       tolerance=1e-9):
    """Decide whether a model is regular for a contract over a search space.

    Witness strategies are replayed first; a cheaper superhedge or a strict one at
    the replication cost settles the verdict without a search. Otherwise the
    brute-force search is compared with the replication cost.

    Args:
        market: The LatticeMarket.
        contract: The Contract.
        x: The initial endowment.
        space: The SearchSpace.
        convention: The TradingConvention. (Default: cash).
        witnesses: Optional FeedbackStrategy objects to try first.
        tolerance: Relative tolerance of the comparisons. (Default: 1e-9).

    Returns:
        A RegularityVerdict.
    """
    from .pricing import solve_contract
    if market.has_defaults:
        search = superhedge_bruteforce(market, contract, x, space, convention,
                                       tolerance)
        return RegularityVerdict(UNDETERMINED, None, 'contracts on a lattice with '
                                 'defaults are not replicable; only bounds apply',
                                 search=search)
    solution = solve_contract(market, contract, x, convention)
    p_hat = solution.price
    tol = tolerance * max(1.0, abs(p_hat) + abs(x))
    if not space.allow_borrowing:
        min_cash = min(solution.state(n).cash for n in market.iter_nodes()
                       if n.step < market.n_steps)
        if min_cash < -tol:
            return RegularityVerdict(UNDETERMINED, p_hat, 'the replicating strategy '
                                     'borrows cash, which the search space precludes')
    for witness in witnesses:
        price = witness.start_wealth - x
        if not witness.is_superhedge(x, tolerance):
            continue
        if price < p_hat - tol:
            return RegularityVerdict(NOT_REGULAR, p_hat, 'superhedge "{}" costs {:.10g} '
                                     'below the replication cost'.format(
                                         witness.label, price), witness)
        if price <= p_hat + tol and witness.is_strict(x, tolerance):
            return RegularityVerdict(NOT_REGULAR, p_hat, 'strict superhedge "{}" costs '
                                     'the replication cost'.format(witness.label),
                                     witness)
    search = superhedge_bruteforce(market, contract, x, space, convention, tolerance)
    if search.price < p_hat - tol:
        return RegularityVerdict(NOT_REGULAR, p_hat, 'the search found a superhedge '
                                 'below the replication cost', search.strategy, search)
    if abs(search.price - p_hat) <= tol and search.attained_strict:
        return RegularityVerdict(NOT_REGULAR, p_hat, 'the search found a strict '
                                 'superhedge at the replication cost', search.strategy,
                                 search)
    return RegularityVerdict(REGULAR, p_hat, 'no cheaper or strict superhedge over '
                             'the search space', search=search)
