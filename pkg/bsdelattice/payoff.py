# coding=utf-8
"""Node-measurable payoff functions referenced by cash-flow schedules."""
import re

from .typing import float_finite, float_positive, int_in_range
from .errors import InvariantError


class Payoff(object):
    """A payoff evaluated at a lattice node.

    Args:
        kind: Text for the payoff kind. Choose from call, put, straddle, forward,
            digital, constant and gate_value.
        strike: The strike K (the amount for a constant payoff). (Default: 0).
        quantity: A signed multiplier applied to the payoff. Negative quantities
            describe payments by the hedger. (Default: 1).
        asset: Index of the deterministic asset whose recorded gate value is paid
            by a gate_value payoff. (Default: 0).

    Properties:
        * kind
        * strike
        * quantity
        * asset
    """
    __slots__ = ('_kind', '_strike', '_quantity', '_asset')
    KINDS = ('call', 'put', 'straddle', 'forward', 'digital', 'constant', 'gate_value')

    def __init__(self, kind, strike=0, quantity=1, asset=0):
        clean = re.sub(r'[\s-]', '_', str(kind).strip().lower())
        assert clean in self.KINDS, 'Payoff kind must be one of {}. Got "{}".'.format(
            list(self.KINDS), kind)
        self._kind = clean
        self._strike = float_finite(strike, 'payoff strike')
        if clean not in ('constant', 'forward', 'gate_value'):
            float_positive(self._strike, 'payoff strike')
        self._quantity = float_finite(quantity, 'payoff quantity')
        self._asset = int_in_range(asset, 0, input_name='payoff asset')

    @classmethod
    def from_dict(cls, data):
        """Create a Payoff from a dictionary.

        .. code-block:: python

            {
            "type": "Payoff",
            "kind": "call",
            "strike": 100,
            "quantity": -1
            }
        """
        assert data['type'] == 'Payoff', \
            'Expected Payoff dictionary. Got {}.'.format(data['type'])
        return cls(data['kind'], data.get('strike', 0), data.get('quantity', 1),
                   data.get('asset', 0))

    @property
    def kind(self):
        """Get the payoff kind."""
        return self._kind

    @property
    def strike(self):
        """Get the strike (or the amount of a constant payoff)."""
        return self._strike

    @property
    def quantity(self):
        """Get the signed quantity multiplying the payoff."""
        return self._quantity

    @property
    def asset(self):
        """Get the deterministic asset index read by a gate_value payoff."""
        return self._asset

    def value(self, spot):
        """Get the payoff for a given price of the lattice asset."""
        k = self._strike
        if self._kind == 'call':
            raw = max(spot - k, 0.0)
        elif self._kind == 'put':
            raw = max(k - spot, 0.0)
        elif self._kind == 'straddle':
            raw = abs(spot - k)
        elif self._kind == 'forward':
            raw = spot - k
        elif self._kind == 'digital':
            raw = 1.0 if spot > k else 0.0
        elif self._kind == 'constant':
            raw = k
        else:
            raise InvariantError('A gate_value payoff needs a lattice node.',
                                 'gate value')
        return self._quantity * raw

    def negate(self):
        """Get a copy of this payoff with the opposite sign."""
        return Payoff(self._kind, self._strike, -self._quantity, self._asset)

    def scale(self, factor):
        """Get a copy of this payoff with the quantity multiplied by a factor."""
        return Payoff(self._kind, self._strike, self._quantity * factor, self._asset)

    def to_dict(self):
        """Get the payoff as a dictionary."""
        base = {'type': 'Payoff', 'kind': self._kind, 'strike': self._strike,
                'quantity': self._quantity}
        if self._kind == 'gate_value':
            base['asset'] = self._asset
        return base

    def __call__(self, market, node):
        if self._kind == 'gate_value':
            gate = market.gate_value(node, self._asset)
            if gate is None:
                raise InvariantError(
                    'Gate value of asset {} requested at step {} before its gate '
                    'time.'.format(self._asset, node.step), 'gate value')
            return self._quantity * gate
        return self.value(market.spot(node))

    def __key(self):
        return (self._kind, self._strike, self._quantity, self._asset)

    def __hash__(self):
        return hash(self.__key())

    def __eq__(self, other):
        return isinstance(other, Payoff) and self.__key() == other.__key()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'Payoff: {} {} K={}'.format(self._quantity, self._kind, self._strike)


class _Payoffs(object):
    """Payoff constructors with a lookup by name."""

    def call(self, strike, quantity=1):
        """Get a call payoff (S - K)+."""
        return Payoff('call', strike, quantity)

    def put(self, strike, quantity=1):
        """Get a put payoff (K - S)+."""
        return Payoff('put', strike, quantity)

    def straddle(self, strike, quantity=1):
        """Get a straddle payoff |S - K|."""
        return Payoff('straddle', strike, quantity)

    def forward(self, strike, quantity=1):
        """Get a forward payoff S - K."""
        return Payoff('forward', strike, quantity)

    def digital(self, strike, quantity=1):
        """Get a cash-or-nothing payoff paying 1 when S > K."""
        return Payoff('digital', strike, quantity)

    def constant(self, amount, quantity=1):
        """Get a constant payoff."""
        return Payoff('constant', amount, quantity)

    def gate_value(self, asset=0, quantity=1):
        """Get a payoff equal to the recorded gate value of a deterministic asset."""
        return Payoff('gate_value', 0, quantity, asset)

    def by_name(self, payoff_name, strike=0, quantity=1):
        """Get a payoff by its name.

        This method corrects for capitalization as well as the presence of spaces,
        hyphens and underscores.

        Args:
            payoff_name: A payoff name (eg. "call" or "Gate Value").
            strike: The strike (or constant amount) of the payoff.
            quantity: Signed multiplier of the payoff.
        """
        clean = re.sub(r'[\s_-]', '', payoff_name.lower())
        for kind in Payoff.KINDS:
            if kind.replace('_', '') == clean:
                if kind == 'gate_value':
                    return self.gate_value(int(strike), quantity)
                return Payoff(kind, strike, quantity)
        raise ValueError(
            '"{}" is not a valid payoff name.\nChoose from the following: {}'.format(
                payoff_name, list(Payoff.KINDS)))

    def __contains__(self, value):
        return isinstance(value, Payoff)


payoffs = _Payoffs()
