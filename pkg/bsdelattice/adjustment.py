# coding=utf-8
"""Trading adjustments (X, alpha, beta) attached to a contract.

An adjustment value X is either an exogenous node path or a functional of the
solver state. Functionals declare the inputs they read; a pricing problem is local
only when every functional reads nothing but the time, Y and Z.
"""
import math
from collections import namedtuple

from .rate import RateCurve
from .lattice import ALIVE
from .typing import valid_string, float_in_range, float_finite, float_positive
from .errors import GlobalProblemError, SolverError, InvariantError

LOCAL_INPUTS = ('t', 'y', 'z')

LocalState = namedtuple('LocalState', ['step', 'node', 'time', 'y', 'z', 'x',
                                       'cash_lend'])
LocalState.__doc__ = """Solver state handed to adjustment functionals.

Attributes:
    step: Lattice step of the node.
    node: The LatticeNode.
    time: Time of the node in years.
    y: Candidate value of Y (wealth discounted by the cash lending account).
    z: Hedge loading Z at the node.
    x: Initial endowment of the pricing problem.
    cash_lend: Value of the cash lending account B^{0,l} at the node.
"""


def gained_value_of(state):
    """Get the gained value B^{0,l}(Y - x) implied by a solver state."""
    return state.cash_lend * (state.y - state.x)


class Adjustment(object):
    """A trading adjustment.

    Args:
        identifier: Text identifier of the adjustment.
        alpha: Fraction of X available for trading, in [0, 1]. (Default: 0).
        beta: RateCurve of the remuneration account beta^k. None uses the cash
            lending account of the market. (Default: None).
        values: Exogenous values of X. Either a number (constant path), a list with
            one number per step, or a dictionary from (step, index) node keys to
            values. Ignored when a function is given. (Default: 0).
        function: Optional callable taking a LocalState and returning X.
        inputs: Names of the inputs read by the function. Anything besides "t", "y"
            and "z" makes the pricing problem global. (Default: ("t", "y", "z")).
        lipschitz: Optional bound on |dX/dp| where p = B^{0,l}(Y - x) is the
            gained value. Used to check the contraction of the backward step.
        rule: Optional dictionary describing a built-in rule, used for
            serialization of functionals.
        alive_only: Set to True to zero the adjustment at nodes where a default has
            happened. (Default: False).

    Properties:
        * identifier
        * alpha
        * beta
        * is_functional
        * inputs
        * is_local
        * lipschitz
        * rule
        * alive_only
    """
    __slots__ = ('_identifier', '_alpha', '_beta', '_values', '_function', '_inputs',
                 '_lipschitz', '_rule', '_alive_only')

    def __init__(self, identifier, alpha=0, beta=None, values=0, function=None,
                 inputs=LOCAL_INPUTS, lipschitz=None, rule=None, alive_only=False):
        self._identifier = valid_string(identifier, 'adjustment identifier')
        self._alpha = float_in_range(alpha, 0, 1, 'adjustment alpha')
        if beta is not None:
            assert isinstance(beta, RateCurve), \
                'Expected RateCurve for beta. Got {}.'.format(type(beta))
        self._beta = beta
        self._function = function
        if function is None:
            self._values = self._clean_values(values)
        else:
            assert callable(function), 'Adjustment function must be callable.'
            self._values = None
        self._inputs = tuple(str(i) for i in inputs)
        self._lipschitz = float_positive(lipschitz, 'lipschitz constant') \
            if lipschitz is not None else None
        self._rule = rule
        self._alive_only = bool(alive_only)

    @classmethod
    def from_dict(cls, data, beta_lookup=None):
        """Create an Adjustment from a dictionary.

        Exogenous adjustments carry "values"; functionals carry a "rule" dictionary
        with a "name" key (see adjustment_from_rule).

        Args:
            data: The dictionary.
            beta_lookup: Optional callable mapping a curve dictionary to a RateCurve.
        """
        assert data['type'] == 'Adjustment', \
            'Expected Adjustment dictionary. Got {}.'.format(data['type'])
        beta = data.get('beta')
        if beta is not None:
            beta = beta_lookup(beta) if beta_lookup else RateCurve.from_dict(beta)
        if 'rule' in data:
            return adjustment_from_rule(data['identifier'], data['rule'],
                                        data.get('alpha', 0), beta)
        values = data.get('values', 0)
        if isinstance(values, dict):
            values = {tuple(int(i) for i in k.split(',')): v for k, v in values.items()}
        return cls(data['identifier'], data.get('alpha', 0), beta, values)

    @property
    def identifier(self):
        """Get the text identifier."""
        return self._identifier

    @property
    def alpha(self):
        """Get alpha, the fraction of X usable in the portfolio."""
        return self._alpha

    @property
    def beta(self):
        """Get the remuneration RateCurve (None for the cash lending account)."""
        return self._beta

    @property
    def is_functional(self):
        """Get a boolean noting whether X depends on the solver state."""
        return self._function is not None

    @property
    def inputs(self):
        """Get the names of the inputs the functional reads."""
        return self._inputs

    @property
    def is_local(self):
        """Get a boolean noting whether the adjustment reads only (t, Y, Z)."""
        return not self.is_functional or set(self._inputs) <= set(LOCAL_INPUTS)

    @property
    def lipschitz(self):
        """Get the declared Lipschitz bound (None when undeclared)."""
        return self._lipschitz

    @property
    def rule(self):
        """Get the rule dictionary of a built-in functional."""
        return self._rule

    @property
    def alive_only(self):
        """Get a boolean noting whether X vanishes at defaulted nodes."""
        return self._alive_only

    def check_local(self):
        """Raise GlobalProblemError if the adjustment makes the problem global."""
        if not self.is_local:
            raise GlobalProblemError(self._identifier, self._inputs)

    def beta_curve(self, accounts):
        """Get the remuneration curve, resolving the default cash lending account."""
        return self._beta if self._beta is not None else accounts.cash_lend

    def value(self, market, node, state=None):
        """Get X at a node.

        Args:
            market: The LatticeMarket.
            node: The LatticeNode.
            state: The LocalState for functionals.
        """
        if self._alive_only and node.status != ALIVE:
            return 0.0
        if self._function is None:
            return self._lookup(node)
        assert state is not None, \
            'Adjustment "{}" is a functional and needs the solver state.'.format(
                self._identifier)
        result = self._function(state)
        if not math.isfinite(result):
            raise SolverError('Adjustment "{}" returned a non-finite value at node {}.'
                              .format(self._identifier, node.key))
        return float(result)

    def negate(self):
        """Get the adjustment -X with the same alpha and beta."""
        if self._function is None:
            values = self._values
            if isinstance(values, dict):
                values = {k: -v for k, v in values.items()}
            elif isinstance(values, tuple):
                values = [-v for v in values]
            else:
                values = -values
            return Adjustment(self._identifier, self._alpha, self._beta, values,
                              alive_only=self._alive_only)
        func = self._function
        rule = {'name': 'negated', 'rule': self._rule} if self._rule else None
        return Adjustment(self._identifier, self._alpha, self._beta,
                          function=lambda state: -func(state), inputs=self._inputs,
                          lipschitz=self._lipschitz, rule=rule,
                          alive_only=self._alive_only)

    def restricted_to_alive(self):
        """Get a copy of the adjustment that vanishes once a default has happened."""
        return Adjustment(self._identifier, self._alpha, self._beta, self._values
                          if self._values is not None else 0, self._function,
                          self._inputs, self._lipschitz, self._rule, True)

    def with_values(self, values, identifier=None):
        """Get an exogenous copy of this adjustment with given node values."""
        return Adjustment(identifier or self._identifier, self._alpha, self._beta,
                          values, alive_only=self._alive_only)

    def to_dict(self):
        """Get the adjustment as a dictionary."""
        base = {'type': 'Adjustment', 'identifier': self._identifier,
                'alpha': self._alpha}
        if self._beta is not None:
            base['beta'] = self._beta.to_dict()
        if self._function is not None:
            if self._rule is None:
                raise InvariantError('Adjustment "{}" wraps a custom function and '
                                     'cannot be serialized.'.format(self._identifier),
                                     'serializable adjustment')
            base['rule'] = dict(self._rule)
        elif isinstance(self._values, dict):
            base['values'] = {'{},{}'.format(*k): v for k, v in self._values.items()}
        elif isinstance(self._values, tuple):
            base['values'] = list(self._values)
        else:
            base['values'] = self._values
        return base

    def _lookup(self, node):
        values = self._values
        if isinstance(values, dict):
            return values.get(node.key, 0.0)
        if isinstance(values, tuple):
            return values[node.step] if node.step < len(values) else 0.0
        return values

    @staticmethod
    def _clean_values(values):
        if isinstance(values, dict):
            return {(int(k[0]), int(k[1])): float_finite(v, 'adjustment value')
                    for k, v in values.items()}
        if isinstance(values, (list, tuple)):
            return tuple(float_finite(v, 'adjustment value') for v in values)
        return float_finite(values, 'adjustment value')

    def __repr__(self):
        kind = 'functional' if self.is_functional else 'exogenous'
        return 'Adjustment: {} ({}, alpha={})'.format(self._identifier, kind,
                                                      self._alpha)


def capital_adjustment(identifier, capital, beta=None):
    """Get the regulatory capital adjustment X = -K with alpha = 1.

    Args:
        identifier: Text identifier of the adjustment.
        capital: The capital K as a number, a list with one number per step or a
            dictionary of node values.
        beta: RateCurve remunerating the capital account. (Default: None).
    """
    if isinstance(capital, dict):
        values = {k: -v for k, v in capital.items()}
    elif isinstance(capital, (list, tuple)):
        values = [-v for v in capital]
    else:
        values = -float(capital)
    return Adjustment(identifier, 1, beta, values)


def adjustment_from_rule(identifier, rule, alpha=0, beta=None):
    """Create a functional adjustment from a built-in rule dictionary.

    Rules:
        * linear_gain: X = intercept + slope * p + z_slope * Z with p the gained
          value B^{0,l}(Y - x). Local.
        * path_funding_schedule: funding rates that switch once the hedger has
          borrowed during an initial period. The value depends on the history of the
          strategy so the rule is global and is rejected by the solver.

    Args:
        identifier: Text identifier of the adjustment.
        rule: A dictionary with a "name" key and the rule parameters.
        alpha: Alpha of the adjustment.
        beta: Remuneration RateCurve.
    """
    name = rule['name']
    if name == 'linear_gain':
        a = float_finite(rule.get('intercept', 0), 'intercept')
        b = float_finite(rule.get('slope', 0), 'slope')
        c = float_finite(rule.get('z_slope', 0), 'z slope')

        def _linear(state):
            return a + b * gained_value_of(state) + c * state.z
        return Adjustment(identifier, alpha, beta, function=_linear,
                          lipschitz=abs(b), rule=dict(rule))
    if name == 'path_funding_schedule':
        def _history(state):
            raise GlobalProblemError(identifier, LOCAL_INPUTS + ('history',))
        return Adjustment(identifier, alpha, beta, function=_history,
                          inputs=LOCAL_INPUTS + ('history',), rule=dict(rule))
    raise InvariantError('Unknown adjustment rule "{}".'.format(name),
                         'adjustment rule')


def mirror_adjustments(adjustments, solution=None):
    """Get the sign-flipped adjustments Y = -X for the mirror contract.

    There is no reason for the adjustments of the mirror contract to equal -X in
    general; this builder offers that convention only.

    Args:
        adjustments: A list of Adjustment of the original contract.
        solution: An optional BsdeSolution of the original contract. When given,
            functionals are frozen at their realized node values before the flip.
    """
    mirrored = []
    for i, adj in enumerate(adjustments):
        if solution is not None and adj.is_functional:
            adj = adj.with_values(solution.adjustment_table(i))
        mirrored.append(adj.negate())
    return mirrored
