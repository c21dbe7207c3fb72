# coding=utf-8
"""Cash and funding accounts and the discounting conventions built on them."""
from .rate import RateCurve
from .errors import DomainError, InvariantError

_TIME_TOL = 1e-12


class AccountSet(object):
    """The unsecured cash accounts plus one pair of funding accounts per risky asset.

    Args:
        cash_lend: RateCurve for B^{0,l}, the account earning interest on cash lent.
        cash_borrow: RateCurve for B^{0,b}, the account charging interest on cash
            borrowed. Its rate must dominate the lending rate everywhere.
        funding: A list with one item per lattice asset. Each item is either a single
            RateCurve (equal lending and borrowing rates, B^i) or a pair of
            RateCurves (B^{i,l}, B^{i,b}). If None, every asset is funded at the
            cash lending curve. (Default: None).

    Properties:
        * cash_lend
        * cash_borrow
        * funding
        * horizon
        * has_equal_cash_rates
    """
    __slots__ = ('_cash_lend', '_cash_borrow', '_funding')

    def __init__(self, cash_lend, cash_borrow=None, funding=None):
        assert isinstance(cash_lend, RateCurve), \
            'Expected RateCurve for cash_lend. Got {}.'.format(type(cash_lend))
        cash_borrow = cash_borrow if cash_borrow is not None else cash_lend
        assert isinstance(cash_borrow, RateCurve), \
            'Expected RateCurve for cash_borrow. Got {}.'.format(type(cash_borrow))
        if not cash_borrow.dominates(cash_lend):
            raise InvariantError(
                'The cash borrowing rate must be at least the lending rate at every '
                'time.', 'borrow rate >= lend rate')
        self._cash_lend = cash_lend
        self._cash_borrow = cash_borrow
        pairs = []
        for item in (funding or ()):
            if isinstance(item, RateCurve):
                pairs.append((item, item))
            else:
                lend, borrow = item
                assert isinstance(lend, RateCurve) and isinstance(borrow, RateCurve), \
                    'Funding accounts must be RateCurves.'
                pairs.append((lend, borrow))
        self._funding = tuple(pairs)

    @classmethod
    def flat(cls, lend_rate, borrow_rate, horizon, funding_rates=None):
        """Create an AccountSet of flat curves.

        Args:
            lend_rate: Cash lending rate.
            borrow_rate: Cash borrowing rate.
            horizon: Horizon in years.
            funding_rates: Optional list of funding rates (one per lattice asset),
                each a number or a (lend, borrow) pair.
        """
        funding = []
        for rate in (funding_rates or ()):
            if isinstance(rate, (list, tuple)):
                funding.append((RateCurve.flat(rate[0], horizon),
                                RateCurve.flat(rate[1], horizon)))
            else:
                funding.append(RateCurve.flat(rate, horizon))
        return cls(RateCurve.flat(lend_rate, horizon),
                   RateCurve.flat(borrow_rate, horizon), funding)

    @classmethod
    def from_dict(cls, data):
        """Create an AccountSet from a dictionary."""
        assert data['type'] == 'AccountSet', \
            'Expected AccountSet dictionary. Got {}.'.format(data['type'])
        funding = []
        for item in data.get('funding', []):
            if isinstance(item, list):
                funding.append(tuple(RateCurve.from_dict(c) for c in item))
            else:
                funding.append(RateCurve.from_dict(item))
        borrow = RateCurve.from_dict(data['cash_borrow']) \
            if data.get('cash_borrow') else None
        return cls(RateCurve.from_dict(data['cash_lend']), borrow, funding)

    @property
    def cash_lend(self):
        """Get the RateCurve of the cash lending account B^{0,l}."""
        return self._cash_lend

    @property
    def cash_borrow(self):
        """Get the RateCurve of the cash borrowing account B^{0,b}."""
        return self._cash_borrow

    @property
    def funding(self):
        """Get a tuple of (B^{i,l}, B^{i,b}) RateCurve pairs."""
        return self._funding

    @property
    def horizon(self):
        """Get the horizon of the cash accounts."""
        return min(self._cash_lend.horizon, self._cash_borrow.horizon)

    @property
    def has_equal_cash_rates(self):
        """Get a boolean noting whether lending and borrowing cash rates coincide."""
        return self._cash_lend.segments == self._cash_borrow.segments

    def funding_pair(self, asset_index):
        """Get the (lend, borrow) funding curves of a lattice asset.

        Assets without an explicit entry are funded at the cash lending curve.
        """
        if asset_index < len(self._funding):
            return self._funding[asset_index]
        return (self._cash_lend, self._cash_lend)

    def discount_basis(self, x):
        """Get the cash curve used to discount wealth from an endowment x."""
        return discount_basis(self, x)

    def to_dict(self):
        """Get the AccountSet as a dictionary."""
        funding = []
        for lend, borrow in self._funding:
            funding.append(lend.to_dict() if lend is borrow
                           else [lend.to_dict(), borrow.to_dict()])
        return {
            'type': 'AccountSet',
            'cash_lend': self._cash_lend.to_dict(),
            'cash_borrow': self._cash_borrow.to_dict(),
            'funding': funding
        }

    def __repr__(self):
        return 'AccountSet: lend {} | borrow {}'.format(
            self._cash_lend, self._cash_borrow)


def discount_basis(accounts, x):
    """Get the discounting account selected by the sign of the endowment.

    Args:
        accounts: An AccountSet.
        x: Signed initial endowment. Non-negative endowments are discounted with the
            cash lending account, negative ones with the borrowing account.
    """
    return accounts.cash_lend if float(x) >= 0 else accounts.cash_borrow


class DiscountBasis(object):
    """The discounting process u -> B_u / B_t started at time t.

    Args:
        curve: The selected RateCurve.
        start: The start time t in years.
    """
    __slots__ = ('_curve', '_start')

    def __init__(self, curve, start):
        self._curve = curve
        self._start = float(start)
        if self._start < -_TIME_TOL or self._start > curve.horizon + _TIME_TOL:
            raise DomainError('Start time {} is outside [0, {}].'.format(
                start, curve.horizon))

    @property
    def curve(self):
        """Get the RateCurve the discount basis is built on."""
        return self._curve

    @property
    def start(self):
        """Get the start time of the discount basis."""
        return self._start

    def __call__(self, u):
        if u < self._start - _TIME_TOL:
            raise DomainError('Discount factor requested at {} before the start {}.'
                              .format(u, self._start))
        return self._curve.growth(self._start, max(u, self._start))

    def __repr__(self):
        return 'DiscountBasis: {} from t={}'.format(self._curve, self._start)


def discount_basis_from(accounts, t, x_t):
    """Get the discounting process normalized to one at time t.

    Args:
        accounts: An AccountSet.
        t: Start time in years.
        x_t: Signed endowment at time t selecting the curve.
    """
    return DiscountBasis(discount_basis(accounts, x_t), t)
