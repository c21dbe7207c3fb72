# coding=utf-8
"""Portfolios and trading strategies on a lattice.

Holdings set at a node are kept over the following step. The cash account
positions psi_0l >= 0 and psi_0b <= 0 and the funding positions are counted in
units of the respective accounts; the broker position is a cash value that does
not grow.
"""
from .adjustment import Adjustment
from .contract import Contract
from .convention import TradingConvention
from .errors import InvariantError, DomainError


class Holding(object):
    """Holdings chosen at one node.

    Args:
        xi: Units of the lattice asset.
        eta: Tuple of units of the deterministic assets. (Default: ()).
        psi_cash_lend: Units of the cash lending account (>= 0).
        psi_cash_borrow: Units of the cash borrowing account (<= 0).
        psi_fund_lend: Units of the funding lending account of the lattice asset.
        psi_fund_borrow: Units of the funding borrowing account of the asset.
        broker: Cash value held by the broker against short sales.
    """
    __slots__ = ('xi', 'eta', 'psi_cash_lend', 'psi_cash_borrow', 'psi_fund_lend',
                 'psi_fund_borrow', 'broker')

    def __init__(self, xi=0.0, eta=(), psi_cash_lend=0.0, psi_cash_borrow=0.0,
                 psi_fund_lend=0.0, psi_fund_borrow=0.0, broker=0.0):
        self.xi = float(xi)
        self.eta = tuple(float(e) for e in eta)
        self.psi_cash_lend = float(psi_cash_lend)
        self.psi_cash_borrow = float(psi_cash_borrow)
        self.psi_fund_lend = float(psi_fund_lend)
        self.psi_fund_borrow = float(psi_fund_borrow)
        self.broker = float(broker)

    @classmethod
    def from_cash(cls, cash, cash_lend, cash_borrow, xi=0.0, eta=(), funding=(0, 0, 0)):
        """Create a Holding from a signed cash value split over the cash accounts.

        Args:
            cash: Signed value W held in cash.
            cash_lend: Value of B^{0,l} at the node.
            cash_borrow: Value of B^{0,b} at the node.
            xi: Units of the lattice asset.
            eta: Units of the deterministic assets.
            funding: A (psi_fund_lend, psi_fund_borrow, broker) tuple.
        """
        return cls(xi, eta, max(cash, 0.0) / cash_lend, -max(-cash, 0.0) / cash_borrow,
                   *funding)

    def copy(self):
        """Get a copy of the holding."""
        return Holding(self.xi, self.eta, self.psi_cash_lend, self.psi_cash_borrow,
                       self.psi_fund_lend, self.psi_fund_borrow, self.broker)

    def to_dict(self):
        """Get the holding as a dictionary."""
        return {'xi': self.xi, 'eta': list(self.eta), 'psi_0l': self.psi_cash_lend,
                'psi_0b': self.psi_cash_borrow, 'psi_l': self.psi_fund_lend,
                'psi_b': self.psi_fund_borrow, 'broker': self.broker}

    def __repr__(self):
        return 'Holding(xi={:.6g}, psi_0l={:.6g}, psi_0b={:.6g})'.format(
            self.xi, self.psi_cash_lend, self.psi_cash_borrow)


class Portfolio(object):
    """Node-indexed holdings.

    Args:
        holdings: A dictionary from (step, index) node keys to Holding objects.

    Properties:
        * holdings
    """
    __slots__ = ('_holdings',)

    def __init__(self, holdings):
        for key, hold in holdings.items():
            if hold.psi_cash_lend < 0 or hold.psi_cash_borrow > 0:
                raise InvariantError(
                    'Cash positions at node {} have the wrong sign.'.format(key),
                    'psi_0l >= 0 and psi_0b <= 0')
            if hold.psi_cash_lend * hold.psi_cash_borrow != 0:
                raise InvariantError(
                    'Cash is lent and borrowed at node {}.'.format(key),
                    'psi_0l * psi_0b = 0')
        self._holdings = dict(holdings)

    @property
    def holdings(self):
        """Get the dictionary of holdings."""
        return self._holdings

    def __getitem__(self, key):
        return self._holdings[key]

    def __contains__(self, key):
        return key in self._holdings

    def __len__(self):
        return len(self._holdings)


class TradingStrategy(object):
    """A trading strategy (x, p, portfolio) for a contract on [start, T].

    Args:
        market: The LatticeMarket.
        x: Initial endowment.
        p: Price received for the contract at the start.
        portfolio: A Portfolio with holdings at every node reachable from the
            start, terminal nodes included.
        contract: The Contract. (Default: the null contract).
        convention: The TradingConvention. (Default: cash).
        adjustment_values: Optional dictionary from node keys to a tuple with one
            value per compiled contract adjustment. Needed for functionals;
            exogenous adjustments are read from the contract otherwise.
        start: The start node. (Default: the root).

    Properties:
        * market
        * x
        * p
        * portfolio
        * contract
        * convention
        * start
        * adjustments
    """

    def __init__(self, market, x, p, portfolio, contract=None, convention=None,
                 adjustment_values=None, start=None):
        self._market = market
        self._x = float(x)
        self._p = float(p)
        assert isinstance(portfolio, Portfolio), \
            'Expected Portfolio. Got {}.'.format(type(portfolio))
        self._portfolio = portfolio
        self._contract = contract if contract is not None else Contract.null()
        self._convention = convention if convention is not None \
            else TradingConvention.cash()
        self._start = start if start is not None else market.root
        self._adjustments, self._values = self._build_adjustments(adjustment_values)

    @classmethod
    def benchmark(cls, market, x):
        """Get the all-cash strategy investing x in the discounting account.

        Non-negative endowments are lent at B^{0,l}, negative ones borrowed at
        B^{0,b}, and the position is held to maturity.
        """
        holds = {}
        for node in market.iter_nodes():
            holds[node.key] = Holding(psi_cash_lend=max(x, 0.0),
                                      psi_cash_borrow=min(x, 0.0))
        return cls(market, x, 0.0, Portfolio(holds))

    @property
    def market(self):
        """Get the LatticeMarket."""
        return self._market

    @property
    def x(self):
        """Get the initial endowment."""
        return self._x

    @property
    def p(self):
        """Get the price received for the contract."""
        return self._p

    @property
    def portfolio(self):
        """Get the Portfolio."""
        return self._portfolio

    @property
    def contract(self):
        """Get the Contract."""
        return self._contract

    @property
    def convention(self):
        """Get the TradingConvention."""
        return self._convention

    @property
    def start(self):
        """Get the start node."""
        return self._start

    @property
    def adjustments(self):
        """Get the list of Adjustment objects, induced ones included."""
        return self._adjustments

    def holding(self, node):
        """Get the Holding at a node."""
        try:
            return self._portfolio[node.key]
        except KeyError:
            raise DomainError('The strategy holds nothing at node {}.'.format(node.key))

    def has_holding(self, node):
        """Check whether the strategy defines holdings at a node."""
        return node.key in self._portfolio

    def adjustment_values(self, node):
        """Get the tuple of adjustment values X^k at a node."""
        return self._values.get(node.key, tuple(0.0 for _ in self._adjustments))

    def reachable_nodes(self):
        """Get the list of nodes reachable from the start, step by step."""
        market = self._market
        layer = {self._start.key: self._start}
        nodes = [self._start]
        for step in range(self._start.step, market.n_steps):
            nxt = {}
            for node in layer.values():
                for child in market.children(node):
                    nxt[child.key] = child
            nodes.extend(sorted(nxt.values(), key=lambda n: n.index))
            layer = nxt
        return nodes

    def with_price(self, p):
        """Get a copy of the strategy with another contract price and the same
        initial wealth."""
        return TradingStrategy(self._market, self._x + self._p - p, p, self._portfolio,
                               self._contract, self._convention,
                               self._contract_values(), self._start)

    def _contract_values(self):
        count = len(self._contract.compiled_adjustments(self._market))
        return {k: v[:count] for k, v in self._values.items()}

    def _build_adjustments(self, adjustment_values):
        market = self._market
        adjs = self._contract.compiled_adjustments(market)
        for adj in adjs:
            if adj.is_functional and adjustment_values is None:
                raise InvariantError(
                    'Adjustment "{}" is a functional; pass its node values.'.format(
                        adj.identifier), 'adjustment values')
        values = {}
        induced = []
        for mode in self._convention.modes:
            induced.extend(mode.induced_adjustments())
        induced_tables = [{} for _ in induced]
        for node in market.iter_nodes():
            if adjustment_values is not None and node.key in adjustment_values:
                base = tuple(adjustment_values[node.key])
            else:
                base = tuple(0.0 if adj.is_functional else adj.value(market, node)
                             for adj in adjs)
            extra = []
            if node.key in self._portfolio:
                hold = self._portfolio[node.key]
                spot = market.spot(node)
                for table, (_, _, _, func) in zip(induced_tables, induced):
                    val = func(hold.xi, spot)
                    table[node.key] = val
                    extra.append(val)
            else:
                extra = [0.0] * len(induced)
            values[node.key] = base + tuple(extra)
        all_adjs = [adj.with_values(0.0) if adj.is_functional else adj for adj in adjs]
        for table, (ident, alpha, beta, _) in zip(induced_tables, induced):
            all_adjs.append(Adjustment(ident, alpha, beta, table))
        return all_adjs, values

    def __repr__(self):
        return 'TradingStrategy: x={}, p={}, {} nodes'.format(
            self._x, self._p, len(self._portfolio))
