# coding=utf-8
"""Trading conventions for the risky asset: cash, broker short sales and repos.

A convention fixes the funding position F(xi) held against a hedge ratio xi, its
value one step later, and any adjustments it induces. Every solver, wealth and
search routine reads the convention through these methods.
"""
import re

from .rate import RateCurve
from .typing import haircut, float_in_range
from .errors import InvariantError


class _Mode(object):
    """Base class of trading convention modes."""
    __slots__ = ()
    PARAMETERS = ()

    @property
    def name(self):
        """Get the text name of the mode."""
        return re.sub(r'(?<!^)(?=[A-Z])', '_', self.__class__.__name__).lower()

    def funding_value(self, xi, spot):
        """Get the value F(xi) of the funding position set against xi at a node."""
        return 0.0

    def funding_next(self, xi, spot, growth_lend, growth_borrow):
        """Get the value of the funding position one step later.

        Args:
            xi: Hedge ratio.
            spot: Price of the asset when the position is set.
            growth_lend: One-step growth of the funding lending account B^{i,l}.
            growth_borrow: One-step growth of the funding borrowing account B^{i,b}.
        """
        return 0.0

    def funding_units(self, xi, spot, account_lend, account_borrow):
        """Get (psi_l, psi_b, broker) funding holdings behind F(xi).

        Args:
            xi: Hedge ratio.
            spot: Price of the asset.
            account_lend: Value of B^{i,l} at the node.
            account_borrow: Value of B^{i,b} at the node.
        """
        return (0.0, 0.0, 0.0)

    def induced_adjustments(self):
        """Get a list of (identifier, alpha, beta, function(xi, spot)) tuples."""
        return []

    def constraints(self):
        """Get a list of Constraint objects the mode imposes on holdings."""
        return [Constraint('no funding lending', 'equality',
                           lambda h, s, bl, bb: h.psi_fund_lend),
                Constraint('no funding borrowing', 'equality',
                           lambda h, s, bl, bb: h.psi_fund_borrow),
                Constraint('no broker account', 'equality',
                           lambda h, s, bl, bb: h.broker)]

    def to_dict(self):
        """Get the mode as a dictionary."""
        base = {'mode': self.name}
        for param in self.PARAMETERS:
            value = getattr(self, param)
            base[param] = value.to_dict() if isinstance(value, RateCurve) else value
        return base

    def __repr__(self):
        return 'Mode: {}'.format(self.name)


class Cash(_Mode):
    """The asset is bought with cash and sold short against cash."""
    __slots__ = ()


class _SignedRepo(_Mode):
    """Repo modes where F = sign * (1 - h) * exposure * S grows at one account."""
    __slots__ = ('_haircut',)
    PARAMETERS = ('haircut',)

    def __init__(self, haircut_value=0.0):
        self._haircut = haircut(haircut_value, 'repo haircut')

    @property
    def haircut(self):
        """Get the repo haircut h in [0, 1)."""
        return self._haircut


class RepoSymmetric(_SignedRepo):
    """Long and short positions are funded in the repo market.

    Imposes (1 - h) xi S + psi^i B^i = 0.
    """
    __slots__ = ()

    def funding_value(self, xi, spot):
        return -(1 - self._haircut) * xi * spot

    def funding_next(self, xi, spot, growth_lend, growth_borrow):
        value = self.funding_value(xi, spot)
        return value * (growth_lend if value >= 0 else growth_borrow)

    def funding_units(self, xi, spot, account_lend, account_borrow):
        value = self.funding_value(xi, spot)
        if value >= 0:
            return (value / account_lend, 0.0, 0.0)
        return (0.0, value / account_borrow, 0.0)

    def constraints(self):
        h = self._haircut
        return [Constraint(
            'symmetric repo', 'equality',
            lambda hd, s, bl, bb: (1 - h) * hd.xi * s + hd.psi_fund_lend * bl +
            hd.psi_fund_borrow * bb),
            Constraint('no broker account', 'equality',
                       lambda hd, s, bl, bb: hd.broker)]


class RepoCashDriven(_SignedRepo):
    """Long positions are funded in the repo market, short proceeds go to cash.

    Imposes (1 - h_b) xi+ S + psi^{i,b} B^{i,b} = 0 and psi^{i,l} = 0.
    """
    __slots__ = ()

    def funding_value(self, xi, spot):
        return -(1 - self._haircut) * max(xi, 0.0) * spot

    def funding_next(self, xi, spot, growth_lend, growth_borrow):
        return self.funding_value(xi, spot) * growth_borrow

    def funding_units(self, xi, spot, account_lend, account_borrow):
        return (0.0, self.funding_value(xi, spot) / account_borrow, 0.0)

    def constraints(self):
        h = self._haircut
        return [Constraint(
            'cash-driven repo', 'equality',
            lambda hd, s, bl, bb: (1 - h) * max(hd.xi, 0.0) * s +
            hd.psi_fund_borrow * bb),
            Constraint('no funding lending', 'equality',
                       lambda hd, s, bl, bb: hd.psi_fund_lend),
            Constraint('no broker account', 'equality',
                       lambda hd, s, bl, bb: hd.broker)]


class RepoSecurityDriven(_SignedRepo):
    """Short positions are borrowed in the repo market against cash lent.

    Imposes psi^{i,l} B^{i,l} = (1 - h_l) xi- S and psi^{i,b} = 0.
    """
    __slots__ = ()

    def funding_value(self, xi, spot):
        return (1 - self._haircut) * max(-xi, 0.0) * spot

    def funding_next(self, xi, spot, growth_lend, growth_borrow):
        return self.funding_value(xi, spot) * growth_lend

    def funding_units(self, xi, spot, account_lend, account_borrow):
        return (self.funding_value(xi, spot) / account_lend, 0.0, 0.0)

    def constraints(self):
        h = self._haircut
        return [Constraint(
            'security-driven repo', 'equality',
            lambda hd, s, bl, bb: hd.psi_fund_lend * bl -
            (1 - h) * max(-hd.xi, 0.0) * s),
            Constraint('no funding borrowing', 'equality',
                       lambda hd, s, bl, bb: hd.psi_fund_borrow),
            Constraint('no broker account', 'equality',
                       lambda hd, s, bl, bb: hd.broker)]


class BrokerShortSale(_Mode):
    """Short sales through a broker who keeps the proceeds as margin.

    The proceeds xi- S stay in a broker account that earns nothing. They are
    remunerated through the adjustments X^i = -(1 + delta) xi- S and
    X^{i+d} = delta xi- S, both with alpha = 0. The second adjustment is dropped
    when delta = 0.

    Args:
        delta: Extra margin fraction delta >= 0.
        margin_rate: RateCurve remunerating X^i (None for the cash lending account).
        extra_rate: RateCurve remunerating X^{i+d} (None for the cash lending
            account).
    """
    __slots__ = ('_delta', '_margin_rate', '_extra_rate')
    PARAMETERS = ('delta', 'margin_rate', 'extra_rate')

    def __init__(self, delta=0.0, margin_rate=None, extra_rate=None):
        self._delta = float_in_range(delta, 0, 10, 'broker margin delta')
        for curve in (margin_rate, extra_rate):
            assert curve is None or isinstance(curve, RateCurve), \
                'Expected RateCurve for the margin rates. Got {}.'.format(type(curve))
        self._margin_rate = margin_rate
        self._extra_rate = extra_rate

    @property
    def delta(self):
        """Get the extra margin fraction delta."""
        return self._delta

    @property
    def margin_rate(self):
        """Get the curve remunerating the short-sale margin."""
        return self._margin_rate

    @property
    def extra_rate(self):
        """Get the curve remunerating the extra margin."""
        return self._extra_rate

    def funding_value(self, xi, spot):
        return max(-xi, 0.0) * spot

    def funding_next(self, xi, spot, growth_lend, growth_borrow):
        return self.funding_value(xi, spot)

    def funding_units(self, xi, spot, account_lend, account_borrow):
        return (0.0, 0.0, self.funding_value(xi, spot))

    def induced_adjustments(self):
        delta = self._delta
        adjs = [('short_sale_margin', 0.0, self._margin_rate,
                 lambda xi, s: -(1 + delta) * max(-xi, 0.0) * s)]
        if delta > 0:
            adjs.append(('short_sale_extra_margin', 0.0, self._extra_rate,
                         lambda xi, s: delta * max(-xi, 0.0) * s))
        return adjs

    def constraints(self):
        return [Constraint('no funding lending', 'equality',
                           lambda h, s, bl, bb: h.psi_fund_lend),
                Constraint('no funding borrowing', 'equality',
                           lambda h, s, bl, bb: h.psi_fund_borrow),
                Constraint('broker holds short proceeds', 'equality',
                           lambda h, s, bl, bb: h.broker - max(-h.xi, 0.0) * s)]


MODES = {
    'cash': Cash,
    'repo_symmetric': RepoSymmetric,
    'repo_cash_driven': RepoCashDriven,
    'repo_security_driven': RepoSecurityDriven,
    'broker_short_sale': BrokerShortSale
}


def mode_from_dict(data):
    """Create a convention mode from a dictionary with a "mode" key."""
    name = re.sub(r'[\s-]', '_', str(data.get('mode', 'cash')).strip().lower())
    try:
        mode_class = MODES[name]
    except KeyError:
        raise InvariantError('Unknown trading convention "{}". Choose from {}.'.format(
            data.get('mode'), list(MODES)), 'trading convention')
    extra = set(data) - {'mode'} - set(mode_class.PARAMETERS)
    if extra:
        raise InvariantError(
            'Parameters {} do not belong to the {} convention.'.format(
                sorted(extra), name), 'consistent trading convention')
    if mode_class is BrokerShortSale:
        rates = [RateCurve.from_dict(data[k]) if data.get(k) else None
                 for k in ('margin_rate', 'extra_rate')]
        return BrokerShortSale(data.get('delta', 0.0), *rates)
    if mode_class is Cash:
        return Cash()
    return mode_class(data.get('haircut', 0.0))


class Constraint(object):
    """An equality or inequality constraint on the holdings at a node.

    Args:
        name: Text describing the constraint.
        kind: Either "equality" (residual must be 0) or "inequality" (residual must
            be non-negative).
        residual: Callable (holding, spot, funding_lend_value, funding_borrow_value)
            returning the residual.
    """
    __slots__ = ('name', 'kind', 'residual')

    def __init__(self, name, kind, residual):
        assert kind in ('equality', 'inequality'), \
            'Constraint kind must be equality or inequality. Got {}.'.format(kind)
        self.name = name
        self.kind = kind
        self.residual = residual

    def violation(self, holding, spot, account_lend, account_borrow):
        """Get the size of the violation (0 when satisfied)."""
        res = self.residual(holding, spot, account_lend, account_borrow)
        return abs(res) if self.kind == 'equality' else max(-res, 0.0)

    def __repr__(self):
        return 'Constraint: {} ({})'.format(self.name, self.kind)


class ConstraintSet(object):
    """The constraints a trading convention imposes on every node of a strategy.

    Args:
        constraints: A list of Constraint objects.
        adjustments: A list of induced (identifier, alpha, beta, function) tuples.
    """
    __slots__ = ('_constraints', '_adjustments')

    def __init__(self, constraints, adjustments=()):
        self._constraints = tuple(constraints)
        self._adjustments = tuple(adjustments)

    @property
    def constraints(self):
        """Get a tuple of Constraint objects."""
        return self._constraints

    @property
    def adjustments(self):
        """Get a tuple of induced adjustment definitions."""
        return self._adjustments

    def check(self, holding, spot, account_lend, account_borrow, tolerance=1e-9):
        """Get a list of (constraint name, violation) pairs above a tolerance."""
        failed = []
        for con in self._constraints:
            size = con.violation(holding, spot, account_lend, account_borrow)
            if size > tolerance * max(1.0, abs(spot)):
                failed.append((con.name, size))
        return failed

    def __len__(self):
        return len(self._constraints)

    def __iter__(self):
        return iter(self._constraints)


class TradingConvention(object):
    """The trading convention of every lattice asset.

    Args:
        modes: A list with one mode per lattice asset. (Default: cash).

    Properties:
        * modes
    """
    __slots__ = ('_modes',)

    def __init__(self, modes=None):
        modes = tuple(modes) if modes else (Cash(),)
        for mode in modes:
            assert isinstance(mode, _Mode), \
                'Expected a convention mode. Got {}.'.format(type(mode))
        self._modes = modes

    @classmethod
    def cash(cls):
        """Get the cash convention for a single asset."""
        return cls([Cash()])

    @classmethod
    def from_dict(cls, data):
        """Create a TradingConvention from a dictionary.

        .. code-block:: python

            {
            "type": "TradingConvention",
            "modes": [{"mode": "repo_symmetric", "haircut": 0.02}]
            }
        """
        assert data['type'] == 'TradingConvention', \
            'Expected TradingConvention dictionary. Got {}.'.format(data['type'])
        return cls([mode_from_dict(m) for m in data.get('modes', [])])

    @property
    def modes(self):
        """Get the tuple of modes."""
        return self._modes

    def mode(self, asset_index=0):
        """Get the mode of a lattice asset."""
        return self._modes[asset_index]

    def check_assets(self, asset_count):
        """Raise InvariantError when modes and lattice assets do not match."""
        if len(self._modes) != asset_count:
            raise InvariantError(
                'The convention lists {} modes for {} lattice assets.'.format(
                    len(self._modes), asset_count), 'consistent trading convention')

    def to_dict(self):
        """Get the convention as a dictionary."""
        return {'type': 'TradingConvention',
                'modes': [m.to_dict() for m in self._modes]}

    def __repr__(self):
        return 'TradingConvention: {}'.format(', '.join(m.name for m in self._modes))


def convention_to_constraints(convention, asset_index=0):
    """Get the ConstraintSet a trading convention imposes on an asset's holdings.

    Args:
        convention: A TradingConvention.
        asset_index: Index of the lattice asset. (Default: 0).
    """
    mode = convention.mode(asset_index)
    return ConstraintSet(mode.constraints(), mode.induced_adjustments())
