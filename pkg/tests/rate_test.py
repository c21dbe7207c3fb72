# coding=utf-8
from bsdelattice.rate import RateCurve
from bsdelattice.account import AccountSet, DiscountBasis, discount_basis, \
    discount_basis_from
from bsdelattice.errors import DomainError, InvariantError

import math
import pytest


def test_flat_curve():
    """Test a flat RateCurve and its account values."""
    curve = RateCurve.flat(0.05, 2.0, 'cash')
    assert curve.is_flat
    assert curve.horizon == 2.0
    assert curve.identifier == 'cash'
    assert curve.rate_at(1.3) == 0.05
    assert curve.integral(1.0) == pytest.approx(0.05, abs=1e-15)
    assert curve.account_value(2.0) == pytest.approx(math.exp(0.1), rel=1e-14)
    assert curve.growth(0.5, 1.5) == pytest.approx(math.exp(0.05), rel=1e-14)
    assert list(curve.values([0, 1])) == pytest.approx([1.0, math.exp(0.05)])


def test_piecewise_curve():
    """Test a piecewise-constant RateCurve."""
    curve = RateCurve([(0.0, 0.02), (0.5, 0.04)], 1.0)
    assert not curve.is_flat
    assert curve.rate_at(0.25) == 0.02
    assert curve.rate_at(0.5) == 0.04
    assert curve.integral(1.0) == pytest.approx(0.01 + 0.02, abs=1e-15)
    assert curve.dominates(RateCurve.flat(0.02, 1.0))
    assert not RateCurve.flat(0.03, 1.0).dominates(curve)


def test_curve_invariants():
    """Test that malformed curves raise the right errors."""
    with pytest.raises(InvariantError):
        RateCurve([], 1.0)
    with pytest.raises(InvariantError):
        RateCurve([(0.1, 0.02)], 1.0)
    with pytest.raises(InvariantError):
        RateCurve([(0.0, 0.02), (0.5, 0.03), (0.4, 0.01)], 1.0)
    with pytest.raises(InvariantError):
        RateCurve([(0.0, 0.02), (1.0, 0.03)], 1.0)
    curve = RateCurve.flat(0.02, 1.0)
    with pytest.raises(DomainError):
        curve.rate_at(1.5)
    with pytest.raises(DomainError):
        curve.growth(0.8, 0.2)


def test_curve_dict():
    """Test the to/from dict methods of RateCurve."""
    curve = RateCurve([(0.0, 0.02), (0.5, 0.04)], 1.0, 'funding')
    new_curve = RateCurve.from_dict(curve.to_dict())
    assert new_curve == curve
    assert new_curve.to_dict() == curve.to_dict()


def test_account_set():
    """Test the AccountSet and its borrow >= lend invariant."""
    accounts = AccountSet.flat(0.01, 0.05, 1.0, funding_rates=[0.02])
    assert not accounts.has_equal_cash_rates
    assert accounts.horizon == 1.0
    lend, borrow = accounts.funding_pair(0)
    assert lend is borrow
    assert lend.rate_at(0) == 0.02
    assert accounts.funding_pair(3) == (accounts.cash_lend, accounts.cash_lend)

    with pytest.raises(InvariantError) as err:
        AccountSet.flat(0.05, 0.01, 1.0)
    assert 'borrow rate >= lend rate' in str(err.value)

    new_accounts = AccountSet.from_dict(accounts.to_dict())
    assert new_accounts.to_dict() == accounts.to_dict()


def test_discount_basis():
    """Test that the sign of the endowment selects the discounting account."""
    accounts = AccountSet.flat(0.01, 0.05, 1.0)
    assert discount_basis(accounts, 0) is accounts.cash_lend
    assert discount_basis(accounts, 10) is accounts.cash_lend
    assert discount_basis(accounts, -1) is accounts.cash_borrow
    assert accounts.discount_basis(-1) is accounts.cash_borrow

    basis = discount_basis_from(accounts, 0.5, -2)
    assert isinstance(basis, DiscountBasis)
    assert basis.start == 0.5
    assert basis(0.5) == pytest.approx(1.0)
    assert basis(1.0) == pytest.approx(math.exp(0.025), rel=1e-14)
    with pytest.raises(DomainError):
        basis(0.2)
