# coding=utf-8
from bsdelattice.account import AccountSet
from bsdelattice.lattice import build_lattice
from bsdelattice.payoff import Payoff, payoffs
from bsdelattice.cashflow import CashFlowStream, NodeCashFlow
from bsdelattice.adjustment import Adjustment, LocalState, adjustment_from_rule, \
    capital_adjustment, mirror_adjustments
from bsdelattice.collateral import CollateralSpec, check_terminal_collateral, \
    collateral_to_adjustments
from bsdelattice.contract import Contract
from bsdelattice.errors import InvariantError, GlobalProblemError

import pytest


def _market():
    return build_lattice(100, 0.2, 0.25, 4, AccountSet.flat(0.01, 0.05, 1.0))


def test_payoffs():
    """Test the payoff kinds and the payoff lookup by name."""
    assert payoffs.call(100).value(110) == 10
    assert payoffs.put(100).value(110) == 0
    assert payoffs.put(100, -1).value(90) == -10
    assert payoffs.straddle(100).value(90) == 10
    assert payoffs.forward(100).value(90) == -10
    assert payoffs.digital(100).value(100.5) == 1
    assert payoffs.constant(3).value(0) == 3
    assert payoffs.by_name('Gate Value').kind == 'gate_value'
    assert payoffs.by_name('call', 95, -2) == Payoff('call', 95, -2)
    with pytest.raises(ValueError):
        payoffs.by_name('barrier')
    with pytest.raises(AssertionError):
        Payoff('call', -5)
    with pytest.raises(InvariantError):
        payoffs.gate_value().value(100)

    put = payoffs.put(100, -1)
    assert put.negate() == payoffs.put(100, 1)
    assert Payoff.from_dict(put.to_dict()) == put


def test_cash_flow_stream():
    """Test the CashFlowStream and its step-0 invariant."""
    market = _market()
    stream = CashFlowStream([(2, payoffs.constant(5)), (4, payoffs.call(100, -1))])
    assert stream.maturity_step == 4
    assert len(stream) == 2
    assert stream.increment(market, market.node(2, 1)) == 5
    assert stream.increment(market, market.node(3, 1)) == 0
    top = market.node(4, 4)
    assert stream.increment(market, top) == pytest.approx(100 - market.spot(top))
    assert stream.cumulative(market, top) == pytest.approx(
        5 + 100 - market.spot(top))
    assert stream.after(2).maturity_step == 4 and len(stream.after(2)) == 1
    assert stream.negate().increment(market, market.node(2, 0)) == -5
    assert CashFlowStream.from_dict(stream.to_dict()).to_dict() == stream.to_dict()
    assert CashFlowStream.null().is_null
    with pytest.raises(InvariantError) as err:
        CashFlowStream([(0, payoffs.constant(1))])
    assert 'A_0 = 0' in str(err.value)


def test_node_cash_flow():
    """Test the NodeCashFlow table of increments."""
    market = _market()
    flows = NodeCashFlow({(1, 0): 2.0, (2, 1): -1.0}, 'CL')
    assert flows.increment(market, market.node(1, 0)) == 2.0
    assert flows.increment(market, market.node(1, 1)) == 0.0
    total = flows + NodeCashFlow({(1, 0): 1.0})
    assert total.table[(1, 0)] == 3.0
    assert flows.after(1).table == {(2, 1): -1.0}
    with pytest.raises(InvariantError):
        NodeCashFlow({(0, 0): 1.0})


def test_exogenous_adjustment():
    """Test exogenous adjustments given by step and by node."""
    market = _market()
    by_step = Adjustment('capital', 1, values=[1, 2, 3, 4, 0])
    assert not by_step.is_functional and by_step.is_local
    assert by_step.value(market, market.node(2, 0)) == 3
    assert by_step.negate().value(market, market.node(2, 0)) == -3
    by_node = Adjustment('margin', 0.5, values={(1, 1): 4.0})
    assert by_node.value(market, market.node(1, 1)) == 4.0
    assert by_node.value(market, market.node(1, 0)) == 0.0
    assert Adjustment.from_dict(by_node.to_dict()).to_dict() == by_node.to_dict()
    with pytest.raises(AssertionError):
        Adjustment('capital', 1.5)

    capital = capital_adjustment('kva', 10)
    assert capital.alpha == 1
    assert capital.value(market, market.root) == -10


def test_functional_adjustment():
    """Test the built-in rules and the locality check."""
    market = _market()
    linear = adjustment_from_rule('linear', {'name': 'linear_gain', 'intercept': 1,
                                             'slope': 0.5, 'z_slope': 2})
    assert linear.is_functional and linear.is_local
    assert linear.lipschitz == 0.5
    state = LocalState(1, market.node(1, 0), 0.25, 3.0, 0.1, 1.0, 1.0)
    assert linear.value(market, state.node, state) == pytest.approx(1 + 0.5 * 2 + 0.2)
    assert linear.negate().value(market, state.node, state) == \
        pytest.approx(-(1 + 0.5 * 2 + 0.2))
    assert Adjustment.from_dict(linear.to_dict()).rule == linear.rule

    path = adjustment_from_rule('path_funding', {'name': 'path_funding_schedule'})
    assert not path.is_local
    with pytest.raises(GlobalProblemError) as err:
        path.check_local()
    assert 'global' in str(err.value)
    assert err.value.exit_code == 6

    with pytest.raises(InvariantError):
        adjustment_from_rule('bad', {'name': 'unknown'})
    custom = Adjustment('custom', function=lambda s: s.y)
    with pytest.raises(InvariantError):
        custom.to_dict()


def test_mirror_adjustments():
    """Test the sign-flip builder of mirror adjustments."""
    market = _market()
    adjs = [Adjustment('capital', 1, values=2.0), Adjustment('margin', 0, values=-1.0)]
    mirror = mirror_adjustments(adjs)
    assert [a.value(market, market.root) for a in mirror] == [-2.0, 1.0]
    assert [a.alpha for a in mirror] == [1, 0]


def test_collateral():
    """Test the collateral rules and the C_T = 0 invariant."""
    market = _market()
    spec = CollateralSpec('exogenous', 'segregated', values=[0, 5, -3, 2, 0])
    assert spec.alphas == (0.0, 1.0)
    check_terminal_collateral(spec, market)
    received, posted = collateral_to_adjustments(spec, market)
    node = market.node(1, 0)
    assert received.value(market, node) == 5 and posted.value(market, node) == 0
    node = market.node(2, 0)
    assert received.value(market, node) == 0 and posted.value(market, node) == -3
    assert received.alpha == 0 and posted.alpha == 1

    bad = CollateralSpec('exogenous', 'segregated', values=5)
    with pytest.raises(InvariantError) as err:
        check_terminal_collateral(bad, market)
    assert 'C_T = 0' in str(err.value)

    mtm = CollateralSpec('mtm', 'rehypothecated', fraction=0.8)
    assert not mtm.is_null
    received, posted = collateral_to_adjustments(mtm)
    state = LocalState(1, market.node(1, 0), 0.25, -2.0, 0.0, 0.0, 1.0)
    assert received.value(market, state.node, state) == pytest.approx(1.6)
    assert posted.value(market, state.node, state) == 0.0
    assert CollateralSpec.from_dict(spec.to_dict()).to_dict() == spec.to_dict()


def test_contract():
    """Test the Contract and its serialization."""
    stream = CashFlowStream([(4, payoffs.call(100, -1))])
    collateral = CollateralSpec('mtm', 'rehypothecated', fraction=0.5)
    contract = Contract(stream, [Adjustment('capital', 1, values=1.0)], collateral,
                        identifier='short_call')
    assert contract.is_local
    assert not contract.is_null
    assert Contract.null().is_null
    assert len(contract.compiled_adjustments()) == 3
    assert Contract(stream, collateral=CollateralSpec()).compiled_adjustments() == []

    mirror = contract.mirror([])
    market = _market()
    top = market.node(4, 4)
    assert mirror.stream.increment(market, top) == \
        -contract.stream.increment(market, top)
    assert mirror.identifier == 'short_call_mirror'

    new_contract = Contract.from_dict(contract.to_dict())
    assert new_contract.to_dict() == contract.to_dict()
