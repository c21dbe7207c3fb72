# coding=utf-8
"""Collateral conventions and their compilation into trading adjustments."""
from .rate import RateCurve
from .adjustment import Adjustment, gained_value_of
from .typing import choice, float_finite, float_positive
from .errors import InvariantError

CONVENTIONS = ('rehypothecated', 'segregated')
RULES = ('exogenous', 'mtm', 'clean_mtm')
_C_T_TOL = 1e-12


class CollateralSpec(object):
    """Collateral posted under a CSA.

    Positive collateral C_t is received by the hedger, negative collateral is posted
    by the hedger.

    Args:
        rule: Text for the collateral rule. Choose from the following.

            * exogenous - C is given by values.
            * mtm - C = fraction * p^m = -fraction * gained value (local in Y).
            * clean_mtm - C = fraction * the marked-to-market value of the clean
              contract (resolved by the pricing layer in credit-risk runs).

        convention: Either rehypothecated (collateral received may be reused) or
            segregated (collateral received is kept apart). (Default: rehypothecated).
        remuneration: An optional pair of RateCurves (beta1 for C+, beta2 for C-).
            None items remunerate at the cash lending account. (Default: None).
        values: Exogenous collateral values, a number, a list with one number per
            step or a dictionary of node values. (Default: 0).
        fraction: The fraction gamma used by the mtm rules. (Default: 1).

    Properties:
        * rule
        * convention
        * remuneration
        * values
        * fraction
        * is_null
    """
    __slots__ = ('_rule', '_convention', '_remuneration', '_values', '_fraction')

    def __init__(self, rule='exogenous', convention='rehypothecated', remuneration=None,
                 values=0, fraction=1.0):
        self._rule = choice(rule, RULES, 'collateral rule')
        self._convention = choice(convention, CONVENTIONS, 'collateral convention')
        remuneration = tuple(remuneration) if remuneration else (None, None)
        assert len(remuneration) == 2, 'Remuneration needs two curves (beta1, beta2).'
        for curve in remuneration:
            assert curve is None or isinstance(curve, RateCurve), \
                'Expected RateCurve for remuneration. Got {}.'.format(type(curve))
        self._remuneration = remuneration
        if isinstance(values, dict):
            values = {(int(k[0]), int(k[1])): float_finite(v, 'collateral')
                      for k, v in values.items()}
        elif isinstance(values, (list, tuple)):
            values = tuple(float_finite(v, 'collateral') for v in values)
        else:
            values = float_finite(values, 'collateral')
        self._values = values
        self._fraction = float_positive(fraction, 'collateral fraction')

    @classmethod
    def from_dict(cls, data):
        """Create a CollateralSpec from a dictionary.

        .. code-block:: python

            {
            "type": "CollateralSpec",
            "rule": "exogenous",
            "convention": "segregated",
            "values": [5, 5, 0]
            }
        """
        assert data['type'] == 'CollateralSpec', \
            'Expected CollateralSpec dictionary. Got {}.'.format(data['type'])
        rem = data.get('remuneration')
        if rem is not None:
            rem = tuple(RateCurve.from_dict(c) if c is not None else None for c in rem)
        values = data.get('values', 0)
        if isinstance(values, dict):
            values = {tuple(int(i) for i in k.split(',')): v for k, v in values.items()}
        return cls(data.get('rule', 'exogenous'),
                   data.get('convention', 'rehypothecated'), rem, values,
                   data.get('fraction', 1.0))

    @property
    def rule(self):
        """Get the collateral rule."""
        return self._rule

    @property
    def convention(self):
        """Get rehypothecated or segregated."""
        return self._convention

    @property
    def remuneration(self):
        """Get the (beta1, beta2) remuneration curves."""
        return self._remuneration

    @property
    def values(self):
        """Get the exogenous collateral values."""
        return self._values

    @property
    def fraction(self):
        """Get the fraction gamma of the mtm rules."""
        return self._fraction

    @property
    def is_null(self):
        """Get a boolean noting whether the collateral is identically zero."""
        if self._rule != 'exogenous':
            return False
        vals = self._values
        if isinstance(vals, dict):
            return all(v == 0 for v in vals.values())
        if isinstance(vals, tuple):
            return all(v == 0 for v in vals)
        return vals == 0

    @property
    def alphas(self):
        """Get the (alpha1, alpha2) pair of the convention."""
        return (1.0, 1.0) if self._convention == 'rehypothecated' else (0.0, 1.0)

    def collateral_value(self, market, node, clean_values=None):
        """Get the exogenous collateral C at a node.

        Args:
            market: The LatticeMarket.
            node: The LatticeNode.
            clean_values: Dictionary of node values of the clean marked-to-market
                value, needed by the clean_mtm rule.
        """
        if self._rule == 'clean_mtm':
            if clean_values is None:
                raise InvariantError('The clean_mtm collateral rule needs the clean '
                                     'contract values.', 'clean values')
            return self._fraction * clean_values.get(node.key, 0.0)
        if self._rule == 'mtm':
            raise InvariantError('The mtm collateral rule depends on the solution and '
                                 'has no exogenous value.', 'exogenous collateral')
        vals = self._values
        if isinstance(vals, dict):
            return vals.get(node.key, 0.0)
        if isinstance(vals, tuple):
            return vals[node.step] if node.step < len(vals) else 0.0
        return vals

    def to_dict(self):
        """Get the spec as a dictionary."""
        base = {'type': 'CollateralSpec', 'rule': self._rule,
                'convention': self._convention, 'fraction': self._fraction}
        if any(c is not None for c in self._remuneration):
            base['remuneration'] = [c.to_dict() if c is not None else None
                                    for c in self._remuneration]
        vals = self._values
        if isinstance(vals, dict):
            base['values'] = {'{},{}'.format(*k): v for k, v in vals.items()}
        elif isinstance(vals, tuple):
            base['values'] = list(vals)
        else:
            base['values'] = vals
        return base

    def __repr__(self):
        return 'CollateralSpec: {} ({})'.format(self._rule, self._convention)


def check_terminal_collateral(spec, market):
    """Raise InvariantError unless the exogenous collateral vanishes at maturity."""
    if spec.rule != 'exogenous':
        return
    for node in market.terminal_nodes():
        value = spec.collateral_value(market, node)
        if abs(value) > _C_T_TOL:
            raise InvariantError(
                'Collateral must vanish at maturity; got C_T = {} at node {}.'.format(
                    value, node.key), 'C_T = 0 (terminal collateral)')


def collateral_to_adjustments(spec, market=None, clean_values=None):
    """Compile a CollateralSpec into the adjustments X1 = C+ and X2 = -C-.

    Args:
        spec: The CollateralSpec.
        market: Optional LatticeMarket used to check C_T = 0 and to tabulate
            clean_mtm values.
        clean_values: Node values of the clean marked-to-market value for the
            clean_mtm rule.

    Returns:
        A list of two Adjustment objects with alpha (1, 1) when rehypothecated and
        (0, 1) when segregated.
    """
    alpha1, alpha2 = spec.alphas
    beta1, beta2 = spec.remuneration
    if spec.rule == 'mtm':
        gamma = spec.fraction

        def _received(state):
            return max(-gamma * gained_value_of(state), 0.0)

        def _posted(state):
            return min(-gamma * gained_value_of(state), 0.0)
        rule = {'name': 'mtm_collateral', 'fraction': gamma}
        return [
            Adjustment('collateral_received', alpha1, beta1, function=_received,
                       lipschitz=gamma, rule=dict(rule, side='received')),
            Adjustment('collateral_posted', alpha2, beta2, function=_posted,
                       lipschitz=gamma, rule=dict(rule, side='posted'))
        ]
    if market is not None:
        check_terminal_collateral(spec, market)
    if spec.rule == 'clean_mtm' or (market is not None and isinstance(spec.values,
                                                                        dict)):
        assert market is not None, 'A market is needed to tabulate the collateral.'
        received, posted = {}, {}
        for node in market.iter_nodes():
            c = spec.collateral_value(market, node, clean_values)
            received[node.key] = max(c, 0.0)
            posted[node.key] = min(c, 0.0)
        return [Adjustment('collateral_received', alpha1, beta1, received),
                Adjustment('collateral_posted', alpha2, beta2, posted)]
    vals = spec.values
    if isinstance(vals, tuple):
        received = [max(v, 0.0) for v in vals]
        posted = [min(v, 0.0) for v in vals]
    elif isinstance(vals, dict):
        received = {k: max(v, 0.0) for k, v in vals.items()}
        posted = {k: min(v, 0.0) for k, v in vals.items()}
    else:
        if vals != 0 and market is None:
            raise InvariantError('A constant non-zero collateral cannot vanish at '
                                 'maturity.', 'C_T = 0 (terminal collateral)')
        received, posted = max(vals, 0.0), min(vals, 0.0)
    return [Adjustment('collateral_received', alpha1, beta1, received),
            Adjustment('collateral_posted', alpha2, beta2, posted)]
