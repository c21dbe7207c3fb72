# coding=utf-8
from bsdelattice.account import AccountSet
from bsdelattice.lattice import build_lattice, ALIVE
from bsdelattice.payoff import payoffs
from bsdelattice.cashflow import CashFlowStream
from bsdelattice.creditrisk import DefaultSpec, upsilon, closeout_payoff, \
    counterparty_risky_stream, ccr_cashflows, verify_ccr_decomposition, \
    COUNTERPARTY_FIRST, HEDGER_FIRST, SIMULTANEOUS_DEFAULT
from bsdelattice.errors import InvariantError

import numpy as np
import pytest


def _market(n_steps=10):
    accounts = AccountSet.flat(0.01, 0.05, n_steps * 0.1)
    return build_lattice(100, 0.2, 0.1, n_steps, accounts)


def test_default_spec():
    """Test the DefaultSpec and its serialization."""
    spec = DefaultSpec(0.01, 0.02, 0.4, 0.6, 'exogenous', {(1, 0): 3.0})
    assert spec.has_risk
    assert spec.closeout == 'exogenous'
    assert not DefaultSpec(0, 0).has_risk
    new_spec = DefaultSpec.from_dict(spec.to_dict())
    assert new_spec.to_dict() == spec.to_dict()
    with pytest.raises(AssertionError):
        DefaultSpec(1.0, 0.01)
    with pytest.raises(AssertionError):
        DefaultSpec(0.01, 0.01, 1.2)
    with pytest.raises(AssertionError):
        DefaultSpec(0.01, 0.01, closeout='replacement')


def test_closeout_payoff():
    """Test the closeout payoff for every default ordering."""
    assert upsilon(10, 2, 4) == 8
    assert closeout_payoff(8, 4, COUNTERPARTY_FIRST, 0.4, 0.6) == pytest.approx(4 + 3.2)
    assert closeout_payoff(8, 4, HEDGER_FIRST, 0.4, 0.6) == pytest.approx(12)
    assert closeout_payoff(-8, 4, HEDGER_FIRST, 0.4, 0.6) == pytest.approx(4 - 4.8)
    assert closeout_payoff(-8, 4, COUNTERPARTY_FIRST, 0.4, 0.6) == pytest.approx(-4)
    assert closeout_payoff(8, 0, SIMULTANEOUS_DEFAULT, 0.4, 0.6) == pytest.approx(3.2)
    assert closeout_payoff(-8, 0, SIMULTANEOUS_DEFAULT, 0.4, 0.6) == \
        pytest.approx(-4.8)
    with pytest.raises(InvariantError):
        closeout_payoff(1, 0, 'unknown', 0.4, 0.6)


def test_closeout_table():
    """Test the closeout valuations at default nodes."""
    market = _market(4)
    spec = DefaultSpec(0.01, 0.02, closeout='exogenous', closeout_values=2.5)
    ext = spec.extend(market)
    table = spec.closeout_table(ext)
    assert table
    assert all(v == 2.5 for v in table.values())
    assert all(ext.node(*k).is_defaulted for k in table)
    clean = DefaultSpec(0.01, 0.02)
    with pytest.raises(InvariantError):
        clean.closeout_table(ext)


def test_risky_stream():
    """Test the counterparty-risky stream on alive, default and closed nodes."""
    market = _market(4)
    stream = CashFlowStream([(2, payoffs.constant(1)), (4, payoffs.call(100))])
    spec = DefaultSpec(0.05, 0.05, 0.4, 0.6, 'exogenous', 1.0)
    ext = spec.extend(market)
    risky = counterparty_risky_stream(ext, stream, spec, None, spec.closeout_table(ext))
    for node in ext.nodes(2):
        value = risky.increment(ext, node)
        if node.status == ALIVE:
            assert value == 1.0
        elif not node.is_defaulted:
            assert value == 0.0
    parts = ccr_cashflows(ext, stream, spec, None, spec.closeout_table(ext))
    assert set(parts) == {'CL', 'CG', 'CR', 'A_CCR'}


def test_ccr_decomposition_randomized():
    """Test A# = A + A_CCR on random default, closeout and collateral inputs."""
    rng = np.random.default_rng(5)
    market = _market()
    stream = CashFlowStream([(3, payoffs.constant(-2)), (10, payoffs.put(100, -1))])
    for _ in range(20):
        p_h, p_c = rng.uniform(0, 0.05, 2)
        r_c, r_h = rng.uniform(0, 1, 2)
        ext = market.with_defaults(p_h, p_c)
        closeout = {n.key: float(v) for n, v in zip(
            ext.iter_nodes(), rng.uniform(-20, 20, ext.node_count))}
        spec = DefaultSpec(p_h, p_c, r_c, r_h, 'exogenous', closeout)
        collateral = {n.key: float(v) for n, v in zip(
            ext.iter_nodes(), rng.uniform(-10, 10, ext.node_count))}
        ok, worst = verify_ccr_decomposition(ext, stream, spec, collateral,
                                             spec.closeout_table(ext))
        assert ok
        assert worst < 1e-9
