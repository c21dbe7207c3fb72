# coding=utf-8
"""Recombining binomial lattices carrying the risky asset, dividends and accounts.

A lattice node is identified by its step and its index within the step. Besides
the number of up moves, a node may carry a regime (the gate values of
event-gated deterministic assets) and a default status when the lattice has been
extended by default events.
"""
import math

import numpy as np

from .typing import valid_string, float_strictly_positive, probability as \
    valid_probability, default_probability, int_in_range, float_finite
from .account import AccountSet, discount_basis
from .errors import DomainError, InvariantError

ALIVE = 'alive'
HEDGER = 'hedger'
COUNTERPARTY = 'counterparty'
SIMULTANEOUS = 'simultaneous'
CLOSED = 'closed'
STATUSES = (ALIVE, HEDGER, COUNTERPARTY, SIMULTANEOUS, CLOSED)
DEFAULT_STATUSES = (HEDGER, COUNTERPARTY, SIMULTANEOUS)

_STEP_TOL = 1e-9


class LatticeAsset(object):
    """A risky asset on the binomial lattice.

    Args:
        identifier: Text identifier of the asset.
        spot: Spot price S_0.
        up: Up multiplier u.
        down: Down multiplier d, with d < u.
        probability: Real-world probability of an up move, in (0, 1).
            (Default: 0.5).
        dividends: An optional list of dictionaries, each with a "step" key and
            either an "amount" (cash dividend) or a "yield" (fraction of the
            ex-dividend price) key. Dividends are paid at the end of the step to the
            holder over that step. No dividend may be paid at step 0.

    Properties:
        * identifier
        * spot
        * up
        * down
        * probability
        * dividends
    """
    __slots__ = ('_identifier', '_spot', '_up', '_down', '_probability', '_dividends',
                 '_div_by_step')

    def __init__(self, identifier, spot, up, down, probability=0.5, dividends=None):
        self._identifier = valid_string(identifier, 'asset identifier')
        self._spot = float_strictly_positive(spot, 'spot price')
        self._up = float_strictly_positive(up, 'up multiplier')
        self._down = float_strictly_positive(down, 'down multiplier')
        assert self._down < self._up, 'Down multiplier {} must be below the up ' \
            'multiplier {}.'.format(self._down, self._up)
        self._probability = valid_probability(probability, 'up probability')
        self._dividends = tuple(dict(d) for d in (dividends or ()))
        self._div_by_step = {}
        for div in self._dividends:
            step = int_in_range(div['step'], 0, input_name='dividend step')
            if step == 0:
                raise InvariantError('A dividend is scheduled at step 0.', 'D_0 = 0')
            if 'amount' in div:
                entry = ('amount', float_finite(div['amount'], 'dividend amount'))
            elif 'yield' in div:
                entry = ('yield', float_finite(div['yield'], 'dividend yield'))
            else:
                raise InvariantError('Dividend at step {} needs an "amount" or a '
                                     '"yield".'.format(step), 'dividend schedule')
            self._div_by_step.setdefault(step, []).append(entry)

    @classmethod
    def from_volatility(cls, identifier, spot, sigma, dt, probability=0.5,
                        dividends=None):
        """Create an asset with the CRR parameterization u = exp(sigma sqrt(dt)), d = 1/u.
        """
        sigma, dt = float(sigma), float(dt)
        if not sigma > 0:
            raise InvariantError('Volatility must be positive. Got {}.'.format(sigma),
                                 'sigma > 0')
        if not dt > 0:
            raise InvariantError('Time step must be positive. Got {}.'.format(dt),
                                 'dt > 0')
        up = math.exp(sigma * math.sqrt(dt))
        return cls(identifier, spot, up, 1.0 / up, probability, dividends)

    @classmethod
    def from_dict(cls, data, dt=None):
        """Create a LatticeAsset from a dictionary.

        The dictionary needs either "sigma" (together with a dt argument) or explicit
        "up" and "down" multipliers.
        """
        assert data['type'] == 'LatticeAsset', \
            'Expected LatticeAsset dictionary. Got {}.'.format(data['type'])
        prob = data.get('probability', 0.5)
        if 'sigma' in data:
            assert dt is not None, 'A time step is needed to build an asset from sigma.'
            return cls.from_volatility(data['identifier'], data['spot'], data['sigma'],
                                       dt, prob, data.get('dividends'))
        return cls(data['identifier'], data['spot'], data['up'], data['down'], prob,
                   data.get('dividends'))

    @property
    def identifier(self):
        """Get the text identifier of the asset."""
        return self._identifier

    @property
    def spot(self):
        """Get the spot price S_0."""
        return self._spot

    @property
    def up(self):
        """Get the up multiplier."""
        return self._up

    @property
    def down(self):
        """Get the down multiplier."""
        return self._down

    @property
    def probability(self):
        """Get the real-world probability of an up move."""
        return self._probability

    @property
    def dividends(self):
        """Get a tuple of dividend dictionaries."""
        return self._dividends

    def price(self, step, ups):
        """Get the ex-dividend price after a number of steps with a number of up moves.
        """
        return self._spot * self._up ** ups * self._down ** (step - ups)

    def dividend(self, step, price):
        """Get the dividend paid at a node of a step given the node price."""
        total = 0.0
        for kind, value in self._div_by_step.get(step, ()):
            total += value if kind == 'amount' else value * price
        return total

    def to_dict(self):
        """Get the asset as a dictionary."""
        base = {
            'type': 'LatticeAsset',
            'identifier': self._identifier,
            'spot': self._spot,
            'up': self._up,
            'down': self._down,
            'probability': self._probability
        }
        if self._dividends:
            base['dividends'] = [dict(d) for d in self._dividends]
        return base

    def __repr__(self):
        return 'LatticeAsset: {} (S0={}, u={:.6f}, d={:.6f})'.format(
            self._identifier, self._spot, self._up, self._down)


class DeterministicAsset(object):
    """An event-gated deterministic asset.

    Before the gate time the price is 1. At the gate time a gate value g (the
    lattice put price P_U(K) at the gate node) is recorded, and from then on the
    price is 1 + slope * K * (t - U) / g on the gate event and 1 otherwise. The gate
    event is {event_factor * g > K}, or {g > 0} when event_factor is None.

    Args:
        identifier: Text identifier of the asset.
        strike: The put strike K used for the gate value.
        gate_time: The gate time U in years.
        slope: The slope factor of the ramp (2 for the no-borrowing model and 1 for
            the rate-threshold model).
        event_factor: Optional factor c defining the event {c * g > K}.
            (Default: None).

    Properties:
        * identifier
        * formula
        * strike
        * gate_time
        * slope
        * event_factor
    """
    __slots__ = ('_identifier', '_strike', '_gate_time', '_slope', '_event_factor')
    FORMULAS = ('gated_ramp',)

    def __init__(self, identifier, strike, gate_time, slope=1.0, event_factor=None):
        self._identifier = valid_string(identifier, 'deterministic asset identifier')
        self._strike = float_strictly_positive(strike, 'strike')
        self._gate_time = float_strictly_positive(gate_time, 'gate time')
        self._slope = float_finite(slope, 'slope')
        self._event_factor = float_strictly_positive(event_factor, 'event factor') \
            if event_factor is not None else None

    @classmethod
    def from_dict(cls, data):
        """Create a DeterministicAsset from a dictionary with a formula id."""
        assert data['type'] == 'DeterministicAsset', \
            'Expected DeterministicAsset dictionary. Got {}.'.format(data['type'])
        formula = data.get('formula', 'gated_ramp')
        if formula not in cls.FORMULAS:
            raise InvariantError('Unknown deterministic asset formula "{}".'.format(
                formula), 'formula id')
        params = data.get('parameters', {})
        return cls(data['identifier'], params['strike'], params['gate_time'],
                   params.get('slope', 1.0), params.get('event_factor'))

    @property
    def identifier(self):
        """Get the text identifier of the asset."""
        return self._identifier

    @property
    def formula(self):
        """Get the formula id of the price path."""
        return 'gated_ramp'

    @property
    def strike(self):
        """Get the strike K of the gating put."""
        return self._strike

    @property
    def gate_time(self):
        """Get the gate time U."""
        return self._gate_time

    @property
    def slope(self):
        """Get the slope factor of the ramp."""
        return self._slope

    @property
    def event_factor(self):
        """Get the event factor (None when the event is {P_U > 0})."""
        return self._event_factor

    def on_event(self, gate_value):
        """Check whether a gate value lies in the gate event."""
        if gate_value is None:
            return False
        if self._event_factor is None:
            return gate_value > 0
        return self._event_factor * gate_value > self._strike

    def price(self, t, gate_value):
        """Get the price at time t given the recorded gate value (None before U)."""
        if gate_value is None or t < self._gate_time - _STEP_TOL \
                or not self.on_event(gate_value):
            return 1.0
        return 1.0 + self._slope * self._strike * (t - self._gate_time) / gate_value

    def to_dict(self):
        """Get the asset as a dictionary."""
        params = {'strike': self._strike, 'gate_time': self._gate_time,
                  'slope': self._slope}
        if self._event_factor is not None:
            params['event_factor'] = self._event_factor
        return {
            'type': 'DeterministicAsset',
            'identifier': self._identifier,
            'formula': self.formula,
            'parameters': params
        }

    def __repr__(self):
        return 'DeterministicAsset: {} (K={}, U={})'.format(
            self._identifier, self._strike, self._gate_time)


class Transition(object):
    """A move from a node to one of its children.

    Args:
        child: Index of the child node in the next step.
        up: Boolean noting whether the asset moves up.
        weight: Conditional probability of the default-status move given the price
            move (1 on lattices without defaults).
    """
    __slots__ = ('child', 'up', 'weight')

    def __init__(self, child, up, weight=1.0):
        self.child = child
        self.up = up
        self.weight = weight

    def __repr__(self):
        return 'Transition({}, {}, {})'.format(self.child, 'up' if self.up else 'down',
                                               self.weight)


class LatticeNode(object):
    """A node of a LatticeMarket.

    Properties:
        * step
        * index
        * ups
        * status
        * regime
        * parent
        * transitions
    """
    __slots__ = ('step', 'index', 'ups', 'status', 'regime', 'parent', 'transitions')

    def __init__(self, step, index, ups, status=ALIVE, regime=(), parent=None):
        self.step = step
        self.index = index
        self.ups = ups
        self.status = status
        self.regime = regime
        self.parent = parent
        self.transitions = ()

    @property
    def key(self):
        """Get a (step, index) tuple identifying the node."""
        return (self.step, self.index)

    @property
    def is_defaulted(self):
        """Get a boolean noting whether a default happens exactly at this node."""
        return self.status in DEFAULT_STATUSES

    def up_transitions(self):
        """Get the transitions with an up move of the asset."""
        return [tr for tr in self.transitions if tr.up]

    def down_transitions(self):
        """Get the transitions with a down move of the asset."""
        return [tr for tr in self.transitions if not tr.up]

    def __repr__(self):
        extra = '' if self.status == ALIVE else ' {}'.format(self.status)
        return 'LatticeNode({}, {}: j={}{})'.format(self.step, self.index, self.ups, extra)


class LatticeMarket(object):
    """A recombining binomial market with accounts and optional deterministic assets.

    Args:
        asset: The LatticeAsset driving the lattice.
        accounts: An AccountSet covering the lattice horizon.
        n_steps: Number of time steps.
        dt: Length of a time step in years.
        deterministic_assets: An optional list of DeterministicAsset.
        default_probabilities: An optional (p_h, p_c) tuple of per-step default
            probabilities of the hedger and the counterparty. When given, every node
            carries a default status. (Default: None).

    Properties:
        * asset
        * accounts
        * n_steps
        * dt
        * horizon
        * times
        * deterministic_assets
        * default_probabilities
        * has_defaults
        * root
        * node_count
    """

    def __init__(self, asset, accounts, n_steps, dt, deterministic_assets=(),
                 default_probabilities=None):
        assert isinstance(asset, LatticeAsset), \
            'Expected LatticeAsset. Got {}.'.format(type(asset))
        assert isinstance(accounts, AccountSet), \
            'Expected AccountSet. Got {}.'.format(type(accounts))
        self._asset = asset
        self._accounts = accounts
        self._n_steps = int_in_range(n_steps, 1, input_name='number of steps')
        self._dt = float(dt)
        if not self._dt > 0:
            raise InvariantError('Time step must be positive. Got {}.'.format(dt),
                                 'dt > 0')
        if self.horizon > accounts.horizon + _STEP_TOL:
            raise InvariantError('The lattice horizon {} exceeds the account horizon '
                                 '{}.'.format(self.horizon, accounts.horizon),
                                 'curve horizon')
        self._times = np.arange(self._n_steps + 1) * self._dt
        self._det_assets = tuple(deterministic_assets)
        self._gate_steps = tuple(self._gate_step(a) for a in self._det_assets)
        if default_probabilities is not None:
            p_h, p_c = default_probabilities
            self._default_probabilities = (
                default_probability(p_h, 'hedger default probability'),
                default_probability(p_c, 'counterparty default probability'))
        else:
            self._default_probabilities = None
        self._account_cache = {}
        self._gate_values = self._compute_gate_values()
        self._layers = self._build_layers()

    @property
    def asset(self):
        """Get the LatticeAsset of the market."""
        return self._asset

    @property
    def accounts(self):
        """Get the AccountSet of the market."""
        return self._accounts

    @property
    def n_steps(self):
        """Get the number of time steps."""
        return self._n_steps

    @property
    def dt(self):
        """Get the step length in years."""
        return self._dt

    @property
    def horizon(self):
        """Get the maturity T = n_steps * dt."""
        return self._n_steps * self._dt

    @property
    def times(self):
        """Get a numpy array of the lattice times."""
        return self._times

    @property
    def deterministic_assets(self):
        """Get a tuple of DeterministicAsset."""
        return self._det_assets

    @property
    def default_probabilities(self):
        """Get the (p_h, p_c) per-step default probabilities or None."""
        return self._default_probabilities

    @property
    def has_defaults(self):
        """Get a boolean noting whether nodes carry default statuses."""
        return self._default_probabilities is not None

    @property
    def root(self):
        """Get the root node."""
        return self._layers[0][0]

    @property
    def node_count(self):
        """Get the total number of nodes."""
        return sum(len(layer) for layer in self._layers)

    def nodes(self, step):
        """Get the list of nodes of a step."""
        if not 0 <= step <= self._n_steps:
            raise DomainError('Step {} is outside [0, {}].'.format(step, self._n_steps))
        return self._layers[step]

    def node(self, step, index):
        """Get a node by step and index."""
        layer = self.nodes(step)
        if not 0 <= index < len(layer):
            raise DomainError('Node index {} is outside step {} with {} nodes.'.format(
                index, step, len(layer)))
        return layer[index]

    def iter_nodes(self):
        """Iterate over all nodes step by step."""
        for layer in self._layers:
            for node in layer:
                yield node

    def terminal_nodes(self):
        """Get the nodes of the last step."""
        return self._layers[-1]

    def children(self, node):
        """Get the child nodes of a node in transition order."""
        if node.step >= self._n_steps:
            return []
        nxt = self._layers[node.step + 1]
        return [nxt[tr.child] for tr in node.transitions]

    def path_to(self, node):
        """Get the canonical path (list of nodes from the root) leading to a node."""
        path = [node]
        while node.parent is not None:
            node = self._layers[node.step - 1][node.parent]
            path.append(node)
        path.reverse()
        return path

    def time(self, step):
        """Get the time in years of a step."""
        return float(self._times[step])

    def spot(self, node):
        """Get the ex-dividend price of the lattice asset at a node."""
        return self._asset.price(node.step, node.ups)

    def dividend(self, node):
        """Get the dividend increment of the lattice asset paid at a node."""
        return self._asset.dividend(node.step, self.spot(node))

    def deterministic_price(self, node, asset_index):
        """Get the price of a deterministic asset at a node."""
        asset = self._det_assets[asset_index]
        return asset.price(self.time(node.step), node.regime[asset_index])

    def deterministic_index(self, identifier):
        """Get the index of a deterministic asset from its identifier."""
        for i, asset in enumerate(self._det_assets):
            if asset.identifier == identifier:
                return i
        raise DomainError('Unknown asset "{}".'.format(identifier))

    def gate_value(self, node, asset_index=0):
        """Get the recorded gate value of a deterministic asset at a node (or None)."""
        return node.regime[asset_index] if node.regime else None

    def gate_step(self, asset_index=0):
        """Get the lattice step of a deterministic asset's gate time."""
        return self._gate_steps[asset_index]

    def account(self, curve):
        """Get a numpy array of the values of an account curve at every step."""
        key = id(curve)
        if key not in self._account_cache:
            self._account_cache[key] = (curve, curve.values(self._times))
        return self._account_cache[key][1]

    def growth(self, curve, step):
        """Get the one-step growth factor of an account curve over (step, step + 1]."""
        values = self.account(curve)
        return values[step + 1] / values[step]

    def discount_basis(self, x):
        """Get the discounting curve selected by the sign of an endowment x."""
        return discount_basis(self._accounts, x)

    def risk_neutral_up(self, node, curve=None):
        """Get the one-step probability making the discounted asset a martingale.

        Args:
            node: The node at which the step starts.
            curve: The account curve used for discounting. Defaults to the lending
                funding curve of the lattice asset.

        Returns:
            The probability q of an up move such that
            q (S_u + D_u) + (1 - q)(S_d + D_d) = g S with g the one-step growth.
        """
        curve = curve or self._accounts.funding_pair(0)[0]
        g = self.growth(curve, node.step)
        s_up, s_down = self.cum_prices(node)
        q = (g * self.spot(node) - s_down) / (s_up - s_down)
        if not 0 < q < 1:
            raise InvariantError(
                'No risk-neutral measure at node {}: q = {:.6g} is outside (0, 1).'
                .format(node.key, q), 'lattice measure')
        return q

    def transition_probabilities(self, node, up_probability):
        """Get the probability of every transition of a node given an up probability.
        """
        return [(up_probability if tr.up else 1 - up_probability) * tr.weight
                for tr in node.transitions]

    def node_probabilities(self):
        """Get the real-world probability of every node as a list of numpy arrays."""
        probs = [np.ones(1)]
        p = self._asset.probability
        for step in range(self._n_steps):
            nxt = np.zeros(len(self._layers[step + 1]))
            for node in self._layers[step]:
                for tr, pr in zip(node.transitions,
                                  self.transition_probabilities(node, p)):
                    nxt[tr.child] += probs[step][node.index] * pr
            probs.append(nxt)
        return probs

    def with_defaults(self, p_h, p_c):
        """Get a copy of this market extended by per-step default events."""
        return LatticeMarket(self._asset, self._accounts, self._n_steps, self._dt,
                             self._det_assets, (p_h, p_c))

    def without_deterministic_assets(self):
        """Get a copy of this market without deterministic assets."""
        return LatticeMarket(self._asset, self._accounts, self._n_steps, self._dt,
                             (), self._default_probabilities)

    def cum_prices(self, node):
        """Get the cum-dividend prices S + D of the up and down moves from a node."""
        step = node.step + 1
        s_up = self._asset.price(step, node.ups + 1)
        s_down = self._asset.price(step, node.ups)
        return (s_up + self._asset.dividend(step, s_up),
                s_down + self._asset.dividend(step, s_down))

    def _gate_step(self, det_asset):
        ratio = det_asset.gate_time / self._dt
        step = int(round(ratio))
        if abs(ratio - step) > _STEP_TOL or not 0 < step <= self._n_steps:
            raise InvariantError(
                'Gate time {} of {} is not a lattice step (dt = {}).'.format(
                    det_asset.gate_time, det_asset.identifier, self._dt), 'gate time')
        return step

    def _compute_gate_values(self):
        """Compute the gate values P_U(K) from a put priced on the bare lattice."""
        if not self._det_assets:
            return ()
        from .oracle import risk_neutral_values
        from .payoff import payoffs
        base = LatticeMarket(self._asset, self._accounts, self._n_steps, self._dt)
        gates = []
        for det, step in zip(self._det_assets, self._gate_steps):
            values = risk_neutral_values(base, payoffs.put(det.strike),
                                         self._accounts.cash_lend)
            gates.append([float(v) for v in values[step]])
        return tuple(gates)

    def _build_layers(self):
        root_regime = tuple(None for _ in self._det_assets)
        root = LatticeNode(0, 0, 0, ALIVE, root_regime)
        layers = [[root]]
        for step in range(self._n_steps):
            lookup, nxt = {}, []
            for node in layers[step]:
                transitions = []
                for up in (False, True):
                    ups = node.ups + (1 if up else 0)
                    regime = self._next_regime(node.regime, step + 1, ups)
                    for status, weight in self._status_moves(node.status):
                        key = (ups, status, regime)
                        if key not in lookup:
                            lookup[key] = len(nxt)
                            nxt.append(LatticeNode(step + 1, len(nxt), ups, status,
                                                   regime, node.index))
                        transitions.append(Transition(lookup[key], up, weight))
                node.transitions = tuple(transitions)
            layers.append(nxt)
        return layers

    def _next_regime(self, regime, step, ups):
        if not self._det_assets:
            return regime
        new = list(regime)
        for k, gate_step in enumerate(self._gate_steps):
            if step == gate_step:
                new[k] = self._gate_values[k][ups]
        return tuple(new)

    def _status_moves(self, status):
        if self._default_probabilities is None:
            return ((ALIVE, 1.0),)
        if status != ALIVE:
            return ((CLOSED, 1.0),)
        p_h, p_c = self._default_probabilities
        moves = (
            (ALIVE, (1 - p_h) * (1 - p_c)),
            (HEDGER, p_h * (1 - p_c)),
            (COUNTERPARTY, p_c * (1 - p_h)),
            (SIMULTANEOUS, p_h * p_c)
        )
        return tuple(m for m in moves if m[1] > 0)

    def __repr__(self):
        return 'LatticeMarket: {} steps of {} years, {} nodes'.format(
            self._n_steps, self._dt, self.node_count)


def build_lattice(spot, sigma, dt, n_steps, accounts, probability=0.5,
                  dividends=None, deterministic_assets=(), default_probabilities=None,
                  identifier='S1'):
    """Build a CRR lattice market.

    Args:
        spot: Spot price of the lattice asset.
        sigma: Volatility; u = exp(sigma sqrt(dt)) and d = 1/u.
        dt: Step length in years.
        n_steps: Number of steps.
        accounts: AccountSet of the market.
        probability: Real-world probability of an up move. (Default: 0.5).
        dividends: Optional dividend schedule of the lattice asset.
        deterministic_assets: Optional list of DeterministicAsset.
        default_probabilities: Optional (p_h, p_c) per-step default probabilities.
        identifier: Identifier of the lattice asset. (Default: S1).
    """
    asset = LatticeAsset.from_volatility(identifier, spot, sigma, dt, probability,
                                         dividends)
    return LatticeMarket(asset, accounts, n_steps, dt, deterministic_assets,
                         default_probabilities)


def _resolve_asset(market, asset):
    """Get ('lattice', None) or ('deterministic', index) for an asset reference."""
    if asset in (0, market.asset.identifier):
        return 'lattice', None
    if isinstance(asset, int) and 1 <= asset <= len(market.deterministic_assets):
        return 'deterministic', asset - 1
    if isinstance(asset, str):
        return 'deterministic', market.deterministic_index(asset)
    raise DomainError('Unknown asset {}.'.format(asset))


def discounted_cum_dividend_price(market, asset, x, node, basis='cash'):
    """Get the discounted cumulative-dividend price of an asset at a node.

    Sums replace integrals along the node's canonical path. Dividends do not depend
    on the path, so the value is a function of the node.

    Args:
        market: A LatticeMarket.
        asset: Asset reference: 0 or the identifier of the lattice asset, or the
            identifier (or 1-based index) of a deterministic asset.
        x: Signed endowment selecting the cash discounting curve.
        node: The LatticeNode at which the price is wanted.
        basis: "cash" to discount with the curve selected by x, or "funding" to
            discount with the lattice asset's funding curve B^i.
    """
    kind, index = _resolve_asset(market, asset)
    if basis == 'cash':
        curve = market.discount_basis(x)
    elif basis == 'funding':
        curve = market.accounts.funding_pair(0)[0]
    else:
        raise DomainError('Unknown discounting basis "{}".'.format(basis))
    values = market.account(curve)
    if kind == 'deterministic':
        return market.deterministic_price(node, index) / values[node.step]
    total = market.spot(node) / values[node.step]
    for past in market.path_to(node)[1:]:
        total += market.dividend(past) / values[past.step]
    return total
