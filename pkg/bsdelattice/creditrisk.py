# coding=utf-8
"""Closeout payoffs and the counterparty-credit-risk decomposition of cash flows.

Defaults happen on a default-extended lattice. A node whose status is hedger,
counterparty or simultaneous is the first default time tau on every path through
it; later nodes are closed.
"""
from .lattice import ALIVE, HEDGER, COUNTERPARTY, SIMULTANEOUS, CLOSED
from .cashflow import NodeCashFlow
from .typing import recovery_rate, default_probability, choice, float_finite
from .errors import InvariantError

COUNTERPARTY_FIRST = 'counterparty_first'
HEDGER_FIRST = 'hedger_first'
SIMULTANEOUS_DEFAULT = 'simultaneous'
_WHICH = {COUNTERPARTY: COUNTERPARTY_FIRST, HEDGER: HEDGER_FIRST,
          SIMULTANEOUS: SIMULTANEOUS_DEFAULT}
CLOSEOUT_RULES = ('exogenous', 'clean_mtm')


class DefaultSpec(object):
    """Default events, recoveries and the closeout valuation of a contract.

    Args:
        hedger_probability: Per-step default probability of the hedger in [0, 1).
        counterparty_probability: Per-step default probability of the counterparty.
        recovery_counterparty: Recovery rate R_c in [0, 1].
        recovery_hedger: Recovery rate R_h in [0, 1].
        closeout: Rule for the closeout valuation Q. Either exogenous (Q given by
            closeout_values) or clean_mtm (Q is the marked-to-market value of the
            clean contract). (Default: clean_mtm).
        closeout_values: Exogenous Q as a number or a dictionary of node values.
            (Default: 0).

    Properties:
        * hedger_probability
        * counterparty_probability
        * recovery_counterparty
        * recovery_hedger
        * closeout
        * closeout_values
        * has_risk
    """
    __slots__ = ('_p_h', '_p_c', '_r_c', '_r_h', '_closeout', '_closeout_values')

    def __init__(self, hedger_probability, counterparty_probability,
                 recovery_counterparty=0.4, recovery_hedger=0.4, closeout='clean_mtm',
                 closeout_values=0):
        self._p_h = default_probability(hedger_probability, 'hedger default probability')
        self._p_c = default_probability(counterparty_probability,
                                        'counterparty default probability')
        self._r_c = recovery_rate(recovery_counterparty, 'counterparty recovery')
        self._r_h = recovery_rate(recovery_hedger, 'hedger recovery')
        self._closeout = choice(closeout, CLOSEOUT_RULES, 'closeout rule')
        if isinstance(closeout_values, dict):
            closeout_values = {(int(k[0]), int(k[1])): float_finite(v, 'closeout')
                               for k, v in closeout_values.items()}
        else:
            closeout_values = float_finite(closeout_values, 'closeout')
        self._closeout_values = closeout_values

    @classmethod
    def from_dict(cls, data):
        """Create a DefaultSpec from a dictionary.

        .. code-block:: python

            {
            "type": "DefaultSpec",
            "hedger_probability": 0.01,
            "counterparty_probability": 0.02,
            "recovery_counterparty": 0.4,
            "recovery_hedger": 0.6,
            "closeout": "clean_mtm"
            }
        """
        assert data['type'] == 'DefaultSpec', \
            'Expected DefaultSpec dictionary. Got {}.'.format(data['type'])
        values = data.get('closeout_values', 0)
        if isinstance(values, dict):
            values = {tuple(int(i) for i in k.split(',')): v for k, v in values.items()}
        return cls(data['hedger_probability'], data['counterparty_probability'],
                   data.get('recovery_counterparty', 0.4),
                   data.get('recovery_hedger', 0.4),
                   data.get('closeout', 'clean_mtm'), values)

    @property
    def hedger_probability(self):
        """Get the per-step default probability of the hedger."""
        return self._p_h

    @property
    def counterparty_probability(self):
        """Get the per-step default probability of the counterparty."""
        return self._p_c

    @property
    def recovery_counterparty(self):
        """Get the counterparty recovery rate R_c."""
        return self._r_c

    @property
    def recovery_hedger(self):
        """Get the hedger recovery rate R_h."""
        return self._r_h

    @property
    def closeout(self):
        """Get the closeout valuation rule."""
        return self._closeout

    @property
    def closeout_values(self):
        """Get the exogenous closeout values."""
        return self._closeout_values

    @property
    def has_risk(self):
        """Get a boolean noting whether a default can happen before maturity."""
        return self._p_h > 0 or self._p_c > 0

    def extend(self, market):
        """Get the default-extended copy of a market."""
        return market.with_defaults(self._p_h, self._p_c)

    def closeout_table(self, market, clean_gained=None):
        """Get the closeout valuation Q at every default node.

        Args:
            market: The default-extended LatticeMarket.
            clean_gained: Dictionary of node values of the clean gained value, needed
                by the clean_mtm rule (Q = -gained value).
        """
        table = {}
        for node in market.iter_nodes():
            if not node.is_defaulted:
                continue
            if self._closeout == 'clean_mtm':
                if clean_gained is None:
                    raise InvariantError('The clean_mtm closeout needs the clean '
                                         'contract values.', 'closeout valuation')
                table[node.key] = -clean_gained[node.key]
            elif isinstance(self._closeout_values, dict):
                table[node.key] = self._closeout_values.get(node.key, 0.0)
            else:
                table[node.key] = self._closeout_values
        return table

    def to_dict(self):
        """Get the spec as a dictionary."""
        base = {
            'type': 'DefaultSpec',
            'hedger_probability': self._p_h,
            'counterparty_probability': self._p_c,
            'recovery_counterparty': self._r_c,
            'recovery_hedger': self._r_h,
            'closeout': self._closeout
        }
        vals = self._closeout_values
        base['closeout_values'] = {'{},{}'.format(*k): v for k, v in vals.items()} \
            if isinstance(vals, dict) else vals
        return base

    def __repr__(self):
        return 'DefaultSpec: p_h={}, p_c={}, R_c={}, R_h={}'.format(
            self._p_h, self._p_c, self._r_c, self._r_h)


def upsilon(q_tau, da_tau, c_tau):
    """Get the amount the counterparty owes at default: Q + dA - C."""
    return q_tau + da_tau - c_tau


def closeout_payoff(upsilon_value, c_tau, which_default, r_c, r_h):
    """Get the CSA closeout payoff received by the hedger at the first default.

    Args:
        upsilon_value: The amount Upsilon = Q + dA - C.
        c_tau: Collateral at the default time.
        which_default: One of counterparty_first, hedger_first or simultaneous.
        r_c: Counterparty recovery rate.
        r_h: Hedger recovery rate.
    """
    pos, neg = max(upsilon_value, 0.0), max(-upsilon_value, 0.0)
    if which_default == COUNTERPARTY_FIRST:
        return c_tau + r_c * pos - neg
    if which_default == HEDGER_FIRST:
        return c_tau + pos - r_h * neg
    if which_default == SIMULTANEOUS_DEFAULT:
        return c_tau + r_c * pos - r_h * neg
    raise InvariantError('Unknown default ordering "{}".'.format(which_default),
                         'default ordering')


def _default_inputs(market, node, stream, collateral_values, closeout_values):
    try:
        q = closeout_values[node.key]
    except (KeyError, TypeError):
        raise InvariantError('No closeout valuation Q at default node {}.'.format(
            node.key), 'Q defined at default')
    c = collateral_values.get(node.key, 0.0) if collateral_values else 0.0
    da = stream.increment(market, node)
    return q, da, c


def counterparty_risky_stream(market, stream, defaults, collateral_values=None,
                              closeout_values=None):
    """Get the counterparty-risky stream A# on a default-extended lattice.

    Alive nodes pay the clean increment, a default node pays the closeout payoff and
    closed nodes pay nothing.

    Args:
        market: The default-extended LatticeMarket.
        stream: The clean CashFlowStream A.
        defaults: The DefaultSpec.
        collateral_values: Dictionary of collateral values C at nodes.
        closeout_values: Dictionary of closeout valuations Q at default nodes.
    """
    table = {}
    for node in market.iter_nodes():
        if node.step == 0:
            continue
        if node.status == ALIVE:
            table[node.key] = stream.increment(market, node)
        elif node.is_defaulted:
            q, da, c = _default_inputs(market, node, stream, collateral_values,
                                       closeout_values)
            table[node.key] = closeout_payoff(
                upsilon(q, da, c), c, _WHICH[node.status],
                defaults.recovery_counterparty, defaults.recovery_hedger)
        else:
            table[node.key] = 0.0
    return NodeCashFlow(table, 'counterparty_risky')


def ccr_cashflows(market, stream, defaults, collateral_values=None,
                  closeout_values=None):
    """Get the credit loss, credit gain, replacement and total CCR streams.

    Returns:
        A dictionary with NodeCashFlow values under the keys CL, CG, CR and A_CCR.
    """
    cl, cg, cr = {}, {}, {}
    r_c, r_h = defaults.recovery_counterparty, defaults.recovery_hedger
    for node in market.iter_nodes():
        if node.step == 0 or node.status == ALIVE:
            continue
        key = node.key
        if node.is_defaulted:
            q, da, c = _default_inputs(market, node, stream, collateral_values,
                                       closeout_values)
            ups = upsilon(q, da, c)
            if node.status in (COUNTERPARTY, SIMULTANEOUS):
                cl[key] = -(1 - r_c) * max(ups, 0.0)
            if node.status in (HEDGER, SIMULTANEOUS):
                cg[key] = (1 - r_h) * max(-ups, 0.0)
            cr[key] = q
        elif node.status == CLOSED:
            cr[key] = -stream.increment(market, node)
    cl, cg, cr = NodeCashFlow(cl, 'CL'), NodeCashFlow(cg, 'CG'), NodeCashFlow(cr, 'CR')
    total = cl + cg + cr
    return {'CL': cl, 'CG': cg, 'CR': cr,
            'A_CCR': NodeCashFlow(total.table, 'A_CCR')}


def verify_ccr_decomposition(market, stream, defaults, collateral_values=None,
                             closeout_values=None):
    """Check A#_t = A_t + A^CCR_t at every node of a default-extended lattice.

    Both the per-node increments and the cumulative sums along every node's
    canonical path are compared.

    Returns:
        A tuple with a boolean (True when the identity holds within 1e-12 relative to
        the flow sizes) and the maximum absolute residual.
    """
    risky = counterparty_risky_stream(market, stream, defaults, collateral_values,
                                      closeout_values)
    ccr = ccr_cashflows(market, stream, defaults, collateral_values,
                        closeout_values)['A_CCR']
    worst, scale = 0.0, 1.0
    cumulative = {}
    for node in market.iter_nodes():
        clean_inc = stream.increment(market, node) if node.step > 0 else 0.0
        risky_inc = risky.increment(market, node)
        ccr_inc = ccr.increment(market, node)
        scale = max(scale, abs(clean_inc), abs(risky_inc), abs(ccr_inc))
        worst = max(worst, abs(risky_inc - clean_inc - ccr_inc))
        if node.parent is None:
            cumulative[node.key] = (0.0, 0.0, 0.0)
        else:
            a_r, a_c, a_x = cumulative[(node.step - 1, node.parent)]
            cumulative[node.key] = (a_r + risky_inc, a_c + clean_inc, a_x + ccr_inc)
        a_r, a_c, a_x = cumulative[node.key]
        worst = max(worst, abs(a_r - a_c - a_x))
    return worst <= 1e-12 * scale, worst
