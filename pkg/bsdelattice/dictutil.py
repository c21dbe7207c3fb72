# coding=utf-8
"""Utilities to convert any dictionary to Python objects.

Note that importing this module will import almost all modules within the
library in order to be able to re-serialize almost any dictionary produced
from the library.
"""
from bsdelattice.rate import RateCurve
from bsdelattice.account import AccountSet
from bsdelattice.lattice import LatticeAsset, DeterministicAsset
from bsdelattice.payoff import Payoff
from bsdelattice.cashflow import CashFlowStream
from bsdelattice.adjustment import Adjustment
from bsdelattice.collateral import CollateralSpec
from bsdelattice.creditrisk import DefaultSpec
from bsdelattice.convention import TradingConvention
from bsdelattice.contract import Contract
from bsdelattice.runconfig import RunConfig


_CLASSES = {
    'RateCurve': RateCurve,
    'AccountSet': AccountSet,
    'DeterministicAsset': DeterministicAsset,
    'Payoff': Payoff,
    'CashFlowStream': CashFlowStream,
    'Adjustment': Adjustment,
    'CollateralSpec': CollateralSpec,
    'DefaultSpec': DefaultSpec,
    'TradingConvention': TradingConvention,
    'Contract': Contract,
    'RunConfig': RunConfig
}


def dict_to_object(bsde_dict, raise_exception=True, dt=None):
    """Re-serialize a dictionary of almost any object within bsdelattice.

    This includes any RunConfig, Contract, CashFlowStream, Payoff, Adjustment,
    CollateralSpec, DefaultSpec, TradingConvention, RateCurve, AccountSet or asset.

    Args:
        bsde_dict: A dictionary of any bsdelattice object.
        raise_exception: Boolean to note whether an exception should be raised
            if the object is not identified as a part of bsdelattice.
            Default: True.
        dt: Optional lattice time step, needed for LatticeAsset dictionaries
            that give a volatility instead of the up and down multipliers.

    Returns:
        A Python object derived from the input bsde_dict.
    """
    try:  # get the type key from the dictionary
        obj_type = bsde_dict['type']
    except KeyError:
        raise ValueError('bsdelattice dictionary lacks required "type" key.')

    if obj_type == 'LatticeAsset':
        return LatticeAsset.from_dict(bsde_dict, dt)
    elif obj_type in _CLASSES:
        return _CLASSES[obj_type].from_dict(bsde_dict)
    elif raise_exception:
        raise ValueError('{} is not a recognized bsdelattice object'.format(obj_type))
