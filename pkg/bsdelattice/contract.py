# coding=utf-8
"""Bilateral contracts: a cash-flow stream plus trading adjustments."""
from .cashflow import CashFlowStream, NodeCashFlow
from .adjustment import Adjustment
from .collateral import CollateralSpec, collateral_to_adjustments
from .typing import valid_string


class Contract(object):
    """A bilateral financial contract seen from the hedger.

    Args:
        stream: A CashFlowStream (or NodeCashFlow) of flows received by the hedger.
        adjustments: A list of Adjustment objects. (Default: None).
        collateral: An optional CollateralSpec compiled into two more adjustments.
        defaults: An optional DefaultSpec describing default times, recoveries and
            the closeout valuation.
        identifier: Text identifier of the contract. (Default: contract).

    Properties:
        * identifier
        * stream
        * adjustments
        * collateral
        * defaults
        * is_null
        * is_local
    """
    __slots__ = ('_identifier', '_stream', '_adjustments', '_collateral', '_defaults')

    def __init__(self, stream=None, adjustments=None, collateral=None, defaults=None,
                 identifier='contract'):
        self._identifier = valid_string(identifier, 'contract identifier')
        stream = stream if stream is not None else CashFlowStream.null()
        assert isinstance(stream, (CashFlowStream, NodeCashFlow)), \
            'Expected CashFlowStream for contract. Got {}.'.format(type(stream))
        self._stream = stream
        adjustments = tuple(adjustments) if adjustments else ()
        for adj in adjustments:
            assert isinstance(adj, Adjustment), \
                'Expected Adjustment. Got {}.'.format(type(adj))
        self._adjustments = adjustments
        if collateral is not None:
            assert isinstance(collateral, CollateralSpec), \
                'Expected CollateralSpec. Got {}.'.format(type(collateral))
        self._collateral = collateral
        self._defaults = defaults

    @classmethod
    def null(cls):
        """Get the null contract (0, 0)."""
        return cls(identifier='null')

    @classmethod
    def from_dict(cls, data):
        """Create a Contract from a dictionary."""
        from .creditrisk import DefaultSpec
        assert data['type'] == 'Contract', \
            'Expected Contract dictionary. Got {}.'.format(data['type'])
        stream = CashFlowStream.from_dict(data['stream']) if data.get('stream') \
            else None
        adjs = [Adjustment.from_dict(a) for a in data.get('adjustments', [])]
        coll = CollateralSpec.from_dict(data['collateral']) \
            if data.get('collateral') else None
        defaults = DefaultSpec.from_dict(data['defaults']) \
            if data.get('defaults') else None
        return cls(stream, adjs, coll, defaults, data.get('identifier', 'contract'))

    @property
    def identifier(self):
        """Get the text identifier of the contract."""
        return self._identifier

    @property
    def stream(self):
        """Get the cash-flow stream A."""
        return self._stream

    @property
    def adjustments(self):
        """Get the tuple of trading adjustments (collateral excluded)."""
        return self._adjustments

    @property
    def collateral(self):
        """Get the CollateralSpec (may be None)."""
        return self._collateral

    @property
    def defaults(self):
        """Get the DefaultSpec (may be None)."""
        return self._defaults

    @property
    def is_null(self):
        """Get a boolean noting whether the contract has no flows or adjustments."""
        return self._stream.is_null and not self._adjustments and \
            (self._collateral is None or self._collateral.is_null)

    @property
    def is_local(self):
        """Get a boolean noting whether every adjustment reads only (t, Y, Z)."""
        return all(adj.is_local for adj in self._adjustments)

    def compiled_adjustments(self, market=None, clean_values=None):
        """Get the adjustments with the collateral compiled in.

        A null collateral spec adds nothing so the contract stays as it is.

        Args:
            market: Optional LatticeMarket used to check and tabulate collateral.
            clean_values: Node values of the clean marked-to-market value for the
                clean_mtm collateral rule.
        """
        adjs = list(self._adjustments)
        if self._collateral is not None and not self._collateral.is_null:
            adjs.extend(collateral_to_adjustments(self._collateral, market,
                                                  clean_values))
        return adjs

    def with_stream(self, stream):
        """Get a copy of the contract with another cash-flow stream."""
        return Contract(stream, self._adjustments, self._collateral, self._defaults,
                        self._identifier)

    def with_adjustments(self, adjustments, collateral=None):
        """Get a copy of the contract with other adjustments and collateral."""
        return Contract(self._stream, adjustments, collateral, self._defaults,
                        self._identifier)

    def mirror(self, adjustments):
        """Get the mirror contract (-A, Y) with independently supplied adjustments."""
        return Contract(self._stream.negate(), adjustments, None, self._defaults,
                        '{}_mirror'.format(self._identifier))

    def to_dict(self):
        """Get the contract as a dictionary."""
        base = {'type': 'Contract', 'identifier': self._identifier}
        if isinstance(self._stream, CashFlowStream):
            base['stream'] = self._stream.to_dict()
        if self._adjustments:
            base['adjustments'] = [a.to_dict() for a in self._adjustments]
        if self._collateral is not None:
            base['collateral'] = self._collateral.to_dict()
        if self._defaults is not None:
            base['defaults'] = self._defaults.to_dict()
        return base

    def __repr__(self):
        return 'Contract: {} ({} flows, {} adjustments)'.format(
            self._identifier, len(getattr(self._stream, 'flows', ())),
            len(self._adjustments))
