# coding=utf-8
"""Arbitrage searches and the trading-desk supermartingale check.

Every finding is relative to an explicit search space or sample, and reports say
so: the lab gives evidence, not proofs.
"""
import logging

import numpy as np

from .contract import Contract
from .superhedge import StepModel, FeedbackStrategy, superhedge_bruteforce
from .errors import InvariantError

_logger = logging.getLogger(__name__)

KINDS = ('primary', 'desk', 'pricing')


class ArbitrageCertificate(object):
    """A strategy with V~_T >= x on every path and V~_T > x with positive probability.

    Args:
        kind: One of primary (null contract), desk (a contract and its mirror) or
            pricing (a contract at its replication cost).
        strategy: The FeedbackStrategy, or the first strategy of a desk pair.
        x: The endowment the terminal wealth is compared with.
        evidence: Optional list of (node key, discounted wealth, probability)
            triples. Computed from the strategy when omitted.
        pair: Optional second FeedbackStrategy of a desk pair.

    Properties:
        * kind
        * strategy
        * x
        * evidence
        * pair
    """
    __slots__ = ('kind', 'strategy', 'x', 'evidence', 'pair')

    def __init__(self, kind, strategy, x, evidence=None, pair=None):
        assert kind in KINDS, 'Certificate kind must be one of {}. Got {}.'.format(
            KINDS, kind)
        self.kind = kind
        self.strategy = strategy
        self.x = float(x)
        self.pair = pair
        self.evidence = list(evidence) if evidence is not None else self.replay()

    def replay(self):
        """Recompute the terminal evidence from fresh copies of the strategies."""
        legs = [self.strategy] + ([self.pair] if self.pair is not None else [])
        totals = {}
        for leg in legs:
            fresh = FeedbackStrategy(leg.model, leg.decisions, leg.start_wealth,
                                     leg.allow_borrowing, leg.label)
            for key, value, prob in fresh.discounted_terminal(self.x):
                if key in totals and self.pair is not None:
                    raise InvariantError('Desk certificates need strategies that '
                                         'end in cash-only states.', 'desk replay')
                totals[key] = (value, prob)
        return [(k, v, p) for k, (v, p) in sorted(totals.items())]

    def is_valid(self, tolerance=1e-9):
        """Check the certificate: the replay matches and the wealth dominates x."""
        tol = tolerance * max(1.0, abs(self.x))
        replayed = self.replay()
        if len(replayed) != len(self.evidence) or any(
                abs(a[1] - b[1]) > tol for a, b in zip(replayed, self.evidence)):
            return False
        return all(v >= self.x - tol for _, v, _ in replayed) and \
            any(v > self.x + tol and p > 0 for _, v, p in replayed)

    @property
    def gain_probability(self):
        """Get the probability of ending strictly above x."""
        tol = 1e-9 * max(1.0, abs(self.x))
        return sum(p for _, v, p in self.evidence if v > self.x + tol)

    def to_dict(self):
        """Get the certificate as a dictionary."""
        base = {
            'type': 'ArbitrageCertificate',
            'kind': self.kind,
            'x': self.x,
            'strategy': self.strategy.to_dict(),
            'gain_probability': self.gain_probability,
            'min_terminal': min(v for _, v, _ in self.evidence),
            'max_terminal': max(v for _, v, _ in self.evidence)
        }
        if self.pair is not None:
            base['pair'] = self.pair.to_dict()
        return base

    def __repr__(self):
        return 'ArbitrageCertificate: {} (P(gain) = {:.4g})'.format(
            self.kind, self.gain_probability)


class ArbitrageSearchOutcome(object):
    """Result of a primary arbitrage search, labeled with its search space.

    Args:
        certificate: The ArbitrageCertificate found, or None.
        search: The SuperhedgeResult of the null contract.
    """
    __slots__ = ('certificate', 'search')

    def __init__(self, certificate, search):
        self.certificate = certificate
        self.search = search

    @property
    def found(self):
        """Get a boolean noting whether an arbitrage was found."""
        return self.certificate is not None

    def to_dict(self):
        """Get the outcome as a dictionary."""
        base = {
            'type': 'ArbitrageSearchOutcome',
            'found': self.found,
            'scope': 'relative to the search space: {}'.format(
                self.search.space.label()),
            'minimal_cost': self.search.cost,
            'attained_strict': self.search.attained_strict
        }
        if self.found:
            base['certificate'] = self.certificate.to_dict()
        return base

    def __repr__(self):
        return 'ArbitrageSearchOutcome: {}'.format(
            'certificate found' if self.found else 'none in the search space')


def search_primary_arbitrage(market, x, space, convention=None, tolerance=1e-9):
    """Search an arbitrage with respect to the null contract.

    The cheapest superhedge of the null contract is found by the brute-force
    search. When it costs less than x, or costs x and ends strictly above x with
    positive probability, the same holdings started from x are an arbitrage.

    Args:
        market: A small LatticeMarket.
        x: The initial endowment.
        space: The SearchSpace.
        convention: The TradingConvention. (Default: cash).
        tolerance: Relative tolerance of the comparisons. (Default: 1e-9).

    Returns:
        An ArbitrageSearchOutcome.
    """
    search = superhedge_bruteforce(market, Contract.null(), x, space, convention,
                                   tolerance)
    tol = tolerance * max(1.0, abs(x))
    certificate = None
    if search.cost < x - tol or (search.cost <= x + tol and search.attained_strict):
        best = search.strategy
        strategy = FeedbackStrategy(best.model, best.decisions, x,
                                    space.allow_borrowing, 'null-contract arbitrage')
        candidate = ArbitrageCertificate('primary', strategy, x)
        if candidate.is_valid(tolerance):
            certificate = candidate
        else:
            _logger.warning('The cheapest superhedge from x = %s did not replay as an '
                            'arbitrage.', x)
    outcome = ArbitrageSearchOutcome(certificate, search)
    _logger.info('%s', outcome)
    return outcome


class DeskCheckReport(object):
    """Sampled one-step expectations of the discounted combined wealth.

    Args:
        increments: A list of (node key, expected increment, scale) triples, one per
            sample. The scale is the size of the wealth and prices involved.
        tolerance: Tolerance relative to the scale used to flag increments.
        seed: The sampler seed.
    """
    __slots__ = ('increments', 'tolerance', 'seed')

    def __init__(self, increments, tolerance, seed):
        self.increments = list(increments)
        self.tolerance = tolerance
        self.seed = seed

    @property
    def max_increment(self):
        """Get the largest expected increment."""
        return max(v for _, v, _ in self.increments)

    @property
    def max_abs_increment(self):
        """Get the largest absolute expected increment."""
        return max(abs(v) for _, v, _ in self.increments)

    @property
    def flagged(self):
        """Get the node keys where the expected increment is positive."""
        return sorted({k for k, v, s in self.increments if v > self.tolerance * s})

    @property
    def is_supermartingale(self):
        """Get a boolean noting whether no sampled increment is positive."""
        return not self.flagged

    @property
    def is_martingale(self):
        """Get a boolean noting whether every sampled increment is zero."""
        return all(abs(v) <= self.tolerance * s for _, v, s in self.increments)

    def to_dict(self):
        """Get the report as a dictionary."""
        return {
            'type': 'DeskCheckReport',
            'samples': len(self.increments),
            'seed': self.seed,
            'supermartingale': self.is_supermartingale,
            'martingale': self.is_martingale,
            'max_increment': self.max_increment,
            'max_abs_increment': self.max_abs_increment,
            'flagged': [list(k) for k in self.flagged],
            'scope': 'sampled nodes, wealth levels and hedge ratios'
        }

    def __repr__(self):
        return 'DeskCheckReport: {} samples, max increment {:.3g}'.format(
            len(self.increments), self.max_increment)


def desk_supermartingale_check(market, contract, mirror, x1, x2, convention=None,
                               samples=100, seed=0, tolerance=1e-12):
    """Check that the desk's discounted combined wealth is a supermartingale.

    One desk holds the contract (A, X) with endowment x1 and the mirror (-A, Y) with
    endowment x2. Nodes, wealth levels and hedge ratios of both legs are sampled; for
    every sample the expected one-step increment of the combined wealth, discounted
    with the account of x1 + x2, is computed under the lattice measure.

    Args:
        market: The LatticeMarket.
        contract: The Contract (exogenous adjustments only).
        mirror: A list of Adjustment of the mirror contract.
        x1: Endowment of the first leg.
        x2: Endowment of the second leg.
        convention: The TradingConvention of both legs. (Default: cash).
        samples: Number of samples. (Default: 100).
        seed: Seed of the numpy random generator. (Default: 0).
        tolerance: Tolerance on the expected increments relative to the size of the
            wealth and prices of a sample. (Default: 1e-12).

    Returns:
        A DeskCheckReport.
    """
    long_leg = StepModel(market, contract, convention)
    short_leg = StepModel(market, contract.mirror(mirror), convention)
    disc = market.account(market.discount_basis(x1 + x2))
    nodes = [n for n in market.iter_nodes() if n.step < market.n_steps]
    rng = np.random.default_rng(seed)
    increments = []
    for _ in range(samples):
        node = nodes[int(rng.integers(len(nodes)))]
        spot = market.spot(node)
        v1, v2 = rng.uniform(-spot, spot, 2)
        xi1, xi2 = rng.uniform(-1.0, 1.0, 2)
        _, moves1 = long_leg.step(node, v1, xi1, ())
        _, moves2 = short_leg.step(node, v2, xi2, ())
        q = market.risk_neutral_up(node)
        probs = market.transition_probabilities(node, q)
        now = (v1 + v2) * disc[0] / disc[node.step]
        expected = 0.0
        for (_, child, w1), (_, _, w2), pr in zip(moves1, moves2, probs):
            expected += pr * ((w1 + w2) * disc[0] / disc[child.step] - now)
        scale = max(1.0, abs(v1) + abs(v2) + 2 * spot)
        increments.append((node.key, expected, scale))
    report = DeskCheckReport(increments, tolerance, seed)
    _logger.info('%s', report)
    return report
