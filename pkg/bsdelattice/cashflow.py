# coding=utf-8
"""Cumulative cash-flow streams of a contract."""
from .payoff import Payoff
from .typing import int_in_range, float_finite
from .errors import InvariantError


class _StreamBase(object):
    """Shared behavior of cash-flow streams.

    A stream is described by its increments dA at lattice nodes. The cumulative
    stream A_t sums the increments along the canonical path of a node.
    """
    __slots__ = ()

    def increment(self, market, node):
        """Get the cash flow dA received at a node."""
        raise NotImplementedError

    def cumulative(self, market, node, start=0):
        """Get A_t - A_start along the canonical path of a node.

        Args:
            market: The LatticeMarket.
            node: The node at time t.
            start: Step after which flows are counted. The default counts every flow
                so that the result is A_t. With start = t the result is A^t_t = 0.
        """
        return sum(self.increment(market, past) for past in market.path_to(node)
                   if past.step > start)

    def increments(self, market, step):
        """Get the list of increments of every node of a step."""
        return [self.increment(market, node) for node in market.nodes(step)]


class CashFlowStream(_StreamBase):
    """A schedule of node-measurable payments.

    Args:
        flows: A list of (step, Payoff) pairs. A payoff is received by the hedger at
            every node of its step. Steps must be at least 1.

    Properties:
        * flows
        * maturity_step
        * is_null
    """
    __slots__ = ('_flows', '_by_step')

    def __init__(self, flows=()):
        clean, by_step = [], {}
        for step, payoff in flows:
            step = int_in_range(step, 0, input_name='flow step')
            if step == 0:
                raise InvariantError('Cash flows are received after inception; got a '
                                     'flow at step 0.', 'A_0 = 0')
            assert isinstance(payoff, Payoff), \
                'Expected Payoff for a cash flow. Got {}.'.format(type(payoff))
            clean.append((step, payoff))
            by_step.setdefault(step, []).append(payoff)
        self._flows = tuple(clean)
        self._by_step = by_step

    @classmethod
    def null(cls):
        """Get a stream without cash flows."""
        return cls()

    @classmethod
    def from_dict(cls, data):
        """Create a CashFlowStream from a dictionary.

        .. code-block:: python

            {
            "type": "CashFlowStream",
            "flows": [
                {"step": 50, "payoff": {"type": "Payoff", "kind": "call",
                                        "strike": 100, "quantity": -1}}
                ]
            }
        """
        assert data['type'] == 'CashFlowStream', \
            'Expected CashFlowStream dictionary. Got {}.'.format(data['type'])
        return cls([(f['step'], Payoff.from_dict(f['payoff'])) for f in data['flows']])

    @property
    def flows(self):
        """Get a tuple of (step, Payoff) pairs."""
        return self._flows

    @property
    def maturity_step(self):
        """Get the step of the last flow (0 for the null stream)."""
        return max(self._by_step) if self._by_step else 0

    @property
    def is_null(self):
        """Get a boolean noting whether the stream has no flows."""
        return len(self._flows) == 0

    def increment(self, market, node):
        return sum(p(market, node) for p in self._by_step.get(node.step, ()))

    def after(self, step):
        """Get the stream A^t of flows strictly after a step."""
        return CashFlowStream([(s, p) for s, p in self._flows if s > step])

    def negate(self):
        """Get the stream -A."""
        return CashFlowStream([(s, p.negate()) for s, p in self._flows])

    def to_dict(self):
        """Get the stream as a dictionary."""
        return {
            'type': 'CashFlowStream',
            'flows': [{'step': s, 'payoff': p.to_dict()} for s, p in self._flows]
        }

    def __len__(self):
        return len(self._flows)

    def __repr__(self):
        return 'CashFlowStream: {} flows'.format(len(self._flows))


class NodeCashFlow(_StreamBase):
    """A stream tabulated by node on a specific lattice.

    Counterparty-risky streams depend on the default status of a node and are built
    as node tables on a default-extended lattice.

    Args:
        increments: A dictionary from (step, index) node keys to the increment dA
            received at the node. Missing nodes receive nothing.
        identifier: Optional text naming the stream. (Default: None).

    Properties:
        * identifier
        * table
        * is_null
    """
    __slots__ = ('_table', '_identifier')

    def __init__(self, increments, identifier=None):
        table = {}
        for key, value in increments.items():
            step, index = key
            if step == 0 and value != 0:
                raise InvariantError('Cash flows are received after inception; got a '
                                     'flow at step 0.', 'A_0 = 0')
            table[(int(step), int(index))] = float_finite(value, 'node increment')
        self._table = table
        self._identifier = identifier

    @property
    def identifier(self):
        """Get the name of the stream."""
        return self._identifier

    @property
    def table(self):
        """Get the dictionary of node increments."""
        return self._table

    @property
    def is_null(self):
        """Get a boolean noting whether every increment is zero."""
        return all(v == 0 for v in self._table.values())

    def increment(self, market, node):
        return self._table.get(node.key, 0.0)

    def after(self, step):
        """Get the stream of increments strictly after a step."""
        return NodeCashFlow({k: v for k, v in self._table.items() if k[0] > step},
                            self._identifier)

    def negate(self):
        """Get the stream with every increment negated."""
        return NodeCashFlow({k: -v for k, v in self._table.items()}, self._identifier)

    def __add__(self, other):
        table = dict(self._table)
        for key, value in other.table.items():
            table[key] = table.get(key, 0.0) + value
        return NodeCashFlow(table)

    def __repr__(self):
        return 'NodeCashFlow: {} ({} nodes)'.format(self._identifier, len(self._table))
