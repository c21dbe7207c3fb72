# coding=utf-8
"""Independent price oracles: risk-neutral lattice expectation and Black-Scholes."""
import math

import numpy as np
from scipy.stats import norm


def risk_neutral_values(market, payoff, curve, measure_curve=None, cashflows=None):
    """Get risk-neutral values of a payoff at every node by backward expectation.

    Args:
        market: A LatticeMarket.
        payoff: A callable (market, node) -> terminal payoff.
        curve: RateCurve used for discounting.
        measure_curve: RateCurve whose growth defines the martingale measure of the
            lattice asset. Defaults to the discounting curve.
        cashflows: An optional callable (market, node) -> amount received at the node
            before maturity (steps 1 to n-1).

    Returns:
        A list with one numpy array of node values per step. Values at a node exclude
        any cash flow paid at that node.
    """
    measure_curve = measure_curve or curve
    n = market.n_steps
    values = [None] * (n + 1)
    values[n] = np.array([payoff(market, node) for node in market.nodes(n)],
                         dtype=float)
    for step in range(n - 1, -1, -1):
        nxt = values[step + 1]
        flows = None
        if cashflows is not None and step + 1 < n:
            flows = np.array([cashflows(market, node)
                              for node in market.nodes(step + 1)], dtype=float)
        g = market.growth(curve, step)
        layer = np.empty(len(market.nodes(step)))
        for node in market.nodes(step):
            q = market.risk_neutral_up(node, measure_curve)
            probs = market.transition_probabilities(node, q)
            total = 0.0
            for tr, pr in zip(node.transitions, probs):
                child = nxt[tr.child]
                if flows is not None:
                    child += flows[tr.child]
                total += pr * child
            layer[node.index] = total / g
        values[step] = layer
    return values


def risk_neutral_price(market, payoff, curve, measure_curve=None):
    """Get the risk-neutral price of a terminal payoff at the root."""
    return float(risk_neutral_values(market, payoff, curve, measure_curve)[0][0])


def contract_value(market, stream, curve, measure_curve=None):
    """Get the risk-neutral value at every node of the flows of a CashFlowStream.

    The value at a node excludes the flow paid at the node itself.
    """
    n = market.n_steps
    return risk_neutral_values(
        market, lambda m, node: stream.increment(m, node), curve, measure_curve,
        lambda m, node: stream.increment(m, node) if node.step < n else 0.0)


def lattice_delta(market, values, node):
    """Get the classic two-point hedge ratio at a node from values of the next step.

    Args:
        market: A LatticeMarket without default statuses.
        values: Node values of the step after the node (cum any cash flow).
        node: The node at which the hedge is set.
    """
    up = [tr for tr in node.transitions if tr.up][0]
    down = [tr for tr in node.transitions if not tr.up][0]
    s_up, s_down = market.cum_prices(node)
    return (values[up.child] - values[down.child]) / (s_up - s_down)


def black_scholes(kind, spot, strike, rate, sigma, maturity, dividend_yield=0.0):
    """Get the closed-form Black-Scholes price of a European call or put.

    Args:
        kind: Either "call" or "put".
        spot: Spot price.
        strike: Strike price.
        rate: Continuously compounded risk-free rate.
        sigma: Volatility.
        maturity: Time to maturity in years.
        dividend_yield: Continuous dividend yield. (Default: 0).
    """
    assert kind in ('call', 'put'), 'Kind must be "call" or "put". Got {}.'.format(kind)
    if maturity <= 0:
        intrinsic = spot - strike if kind == 'call' else strike - spot
        return max(intrinsic, 0.0)
    vol = sigma * math.sqrt(maturity)
    d1 = (math.log(spot / strike) + (rate - dividend_yield + 0.5 * sigma ** 2) *
          maturity) / vol
    d2 = d1 - vol
    disc_s = spot * math.exp(-dividend_yield * maturity)
    disc_k = strike * math.exp(-rate * maturity)
    if kind == 'call':
        return float(disc_s * norm.cdf(d1) - disc_k * norm.cdf(d2))
    return float(disc_k * norm.cdf(-d2) - disc_s * norm.cdf(-d1))
