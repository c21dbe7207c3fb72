# coding=utf-8
"""Piecewise-constant continuously compounded rate curves."""
import math

import numpy as np

from .typing import float_finite, float_strictly_positive, valid_string
from .errors import DomainError, InvariantError

_TIME_TOL = 1e-12


def account_value(curve, t):
    """Get the growth factor B_t = exp(integral of r over [0, t]) of a curve.

    Args:
        curve: A RateCurve.
        t: Time in years within [0, T].
    """
    return curve.account_value(t)


class RateCurve(object):
    """Piecewise-constant continuously compounded rate over [0, T].

    Args:
        segments: An ordered list of (start_time, rate) pairs. The first start time
            must be 0 and every segment runs until the next start (the last one
            until the horizon).
        horizon: The horizon T in years.
        identifier: Optional text name for the curve. (Default: None).

    Properties:
        * identifier
        * segments
        * horizon
        * is_flat
    """
    __slots__ = ('_identifier', '_segments', '_horizon', '_starts', '_rates', '_cum')

    def __init__(self, segments, horizon, identifier=None):
        self._horizon = float_strictly_positive(horizon, 'rate curve horizon')
        segs = []
        for seg in segments:
            start, rate = seg
            segs.append((float_finite(start, 'segment start'),
                         float_finite(rate, 'segment rate')))
        if not segs:
            raise InvariantError('A rate curve needs at least one segment.',
                                 'segments cover [0,T]')
        if abs(segs[0][0]) > _TIME_TOL:
            raise InvariantError('The first segment must start at 0. Got {}.'.format(
                segs[0][0]), 'segments cover [0,T]')
        for (s0, _), (s1, _) in zip(segs[:-1], segs[1:]):
            if not s1 > s0:
                raise InvariantError('Segment starts must increase. Got {} after '
                                     '{}.'.format(s1, s0), 'no gaps or overlaps')
        if segs[-1][0] >= self._horizon:
            raise InvariantError('Segment start {} is not before the horizon {}.'
                                 .format(segs[-1][0], self._horizon),
                                 'segments cover [0,T]')
        self._segments = tuple(segs)
        self._identifier = valid_string(identifier, 'curve identifier') \
            if identifier is not None else None
        self._starts = np.array([s for s, _ in segs])
        self._rates = np.array([r for _, r in segs])
        ends = np.append(self._starts[1:], self._horizon)
        self._cum = np.concatenate(([0.0], np.cumsum(self._rates * (ends - self._starts))))

    @classmethod
    def flat(cls, rate, horizon, identifier=None):
        """Create a curve with a single constant rate."""
        return cls([(0.0, rate)], horizon, identifier)

    @classmethod
    def from_dict(cls, data):
        """Create a RateCurve from a dictionary.

        .. code-block:: python

            {
            "type": "RateCurve",
            "segments": [[0.0, 0.05], [0.0833, 0.06]],
            "horizon": 1.0
            }
        """
        assert data['type'] == 'RateCurve', \
            'Expected RateCurve dictionary. Got {}.'.format(data['type'])
        return cls([tuple(s) for s in data['segments']], data['horizon'],
                   data.get('identifier'))

    @property
    def identifier(self):
        """Get the text identifier of the curve (may be None)."""
        return self._identifier

    @property
    def segments(self):
        """Get a tuple of (start_time, rate) pairs."""
        return self._segments

    @property
    def horizon(self):
        """Get the horizon T of the curve in years."""
        return self._horizon

    @property
    def is_flat(self):
        """Get a boolean noting whether the curve has a single rate."""
        return len(self._segments) == 1

    def rate_at(self, t):
        """Get the instantaneous rate in force at time t."""
        t = self._check_time(t)
        idx = int(np.searchsorted(self._starts, t, side='right')) - 1
        return float(self._rates[max(idx, 0)])

    def integral(self, t):
        """Get the integral of the rate over [0, t]."""
        t = self._check_time(t)
        idx = max(int(np.searchsorted(self._starts, t, side='right')) - 1, 0)
        return float(self._cum[idx] + self._rates[idx] * (t - self._starts[idx]))

    def account_value(self, t):
        """Get the account value B_t with B_0 = 1."""
        return math.exp(self.integral(t))

    def growth(self, t0, t1):
        """Get the growth factor B_t1 / B_t0 of the account between two times."""
        if t1 < t0 - _TIME_TOL:
            raise DomainError('Growth is only defined forward in time. Got {} < {}.'
                              .format(t1, t0))
        return math.exp(self.integral(t1) - self.integral(t0))

    def values(self, times):
        """Get a numpy array of account values at several times."""
        return np.array([self.account_value(t) for t in times])

    def dominates(self, other):
        """Check whether this curve's rate is >= another's rate at every time."""
        starts = sorted(set(self._starts.tolist()) | set(other._starts.tolist()))
        return all(self.rate_at(s) >= other.rate_at(s) - 1e-15 for s in starts
                   if s < min(self.horizon, other.horizon))

    def to_dict(self):
        """Get the curve as a dictionary."""
        base = {
            'type': 'RateCurve',
            'segments': [[s, r] for s, r in self._segments],
            'horizon': self._horizon
        }
        if self._identifier is not None:
            base['identifier'] = self._identifier
        return base

    def _check_time(self, t):
        t = float(t)
        if t < -_TIME_TOL or t > self._horizon + _TIME_TOL:
            raise DomainError('Time {} is outside the curve domain [0, {}].'.format(
                t, self._horizon))
        return min(max(t, 0.0), self._horizon)

    def __key(self):
        return (self._segments, self._horizon, self._identifier)

    def __hash__(self):
        return hash(self.__key())

    def __eq__(self, other):
        return isinstance(other, RateCurve) and self.__key() == other.__key()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'RateCurve: {}'.format(
            ', '.join('{:g}@{:g}'.format(r, s) for s, r in self._segments))
