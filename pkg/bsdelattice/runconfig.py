# coding=utf-8
"""Run configurations read by the command line interface.

A run configuration is a JSON file with the sections market, contract, convention,
solver and task.

.. code-block:: python

    {
    "type": "RunConfig",
    "identifier": "vanilla_call",
    "market": {
        "n_steps": 100,
        "dt": 0.01,
        "asset": {"type": "LatticeAsset", "identifier": "S1", "spot": 100,
                  "sigma": 0.2},
        "accounts": {"lend": 0.02, "borrow": 0.02}
        },
    "contract": {"type": "Contract", "stream": {...}},
    "convention": {"type": "TradingConvention", "modes": [{"mode": "cash"}]},
    "solver": {"tolerance": 1e-12, "max_iterations": 200, "damping": 1.0},
    "task": {"x": 0}
    }

The accounts entry is either a full AccountSet dictionary or the flat shorthand
{"lend": r_l, "borrow": r_b, "funding": [...]}.
"""
import hashlib
import json
import logging
import math

from .account import AccountSet
from .lattice import LatticeAsset, DeterministicAsset, LatticeMarket
from .contract import Contract
from .convention import TradingConvention
from .adjustment import Adjustment
from .collateral import check_terminal_collateral
from .config import settings
from .errors import BsdeLatticeError, ConfigSyntaxError, InvariantError

_logger = logging.getLogger(__name__)

SECTIONS = ('market', 'contract', 'convention', 'solver', 'task')
SOLVER_KEYS = ('tolerance', 'max_iterations', 'damping', 'admissibility_bound',
               'superhedge_cell_limit')
TASK_KEYS = ('x', 't', 'seed', 'samples', 'grid', 'xi_min', 'xi_max', 'eta_values',
             'allow_borrowing', 'x1', 'x2', 'decomposition', 'mirror')


class RunConfig(object):
    """A validated run configuration.

    Args:
        asset: The LatticeAsset.
        accounts: The AccountSet.
        n_steps: Number of lattice steps.
        dt: Step length in years.
        contract: The Contract. (Default: the null contract).
        convention: The TradingConvention. (Default: cash).
        deterministic_assets: A list of DeterministicAsset. (Default: ()).
        solver: A dictionary of solver settings. (Default: None).
        task: A dictionary of task parameters. (Default: None).
        identifier: Text identifier of the run. (Default: run).

    Properties:
        * identifier
        * asset
        * accounts
        * n_steps
        * dt
        * contract
        * convention
        * deterministic_assets
        * solver
        * task
        * x
        * config_hash
    """
    __slots__ = ('_identifier', '_asset', '_accounts', '_n_steps', '_dt', '_contract',
                 '_convention', '_det_assets', '_solver', '_task', '_market')

    def __init__(self, asset, accounts, n_steps, dt, contract=None, convention=None,
                 deterministic_assets=(), solver=None, task=None, identifier='run'):
        self._identifier = identifier
        self._asset = asset
        self._accounts = accounts
        self._n_steps = int(n_steps)
        self._dt = float(dt)
        self._contract = contract if contract is not None else Contract.null()
        self._convention = convention if convention is not None \
            else TradingConvention.cash()
        self._det_assets = tuple(deterministic_assets)
        self._solver = _check_keys(dict(solver or {}), SOLVER_KEYS, 'solver')
        self._task = _check_keys(dict(task or {}), TASK_KEYS, 'task')
        self._market = None

    @classmethod
    def from_dict(cls, data):
        """Create a RunConfig from a dictionary, checking every model invariant.

        Raises:
            InvariantError naming the invariant of any semantic problem.
        """
        if not isinstance(data, dict):
            raise InvariantError('A run configuration must be a JSON object.',
                                 'config structure')
        if data.get('type', 'RunConfig') != 'RunConfig':
            raise InvariantError('Expected RunConfig dictionary. Got {}.'.format(
                data.get('type')), 'config type')
        unknown = [k for k in data if k not in SECTIONS + ('type', 'identifier')]
        if unknown:
            raise InvariantError('Unknown sections {}.'.format(unknown),
                                 'known config sections')
        if 'market' not in data:
            raise InvariantError('The market section is required.', 'market section')
        try:
            market = data['market']
            n_steps, dt = market['n_steps'], market['dt']
            asset = LatticeAsset.from_dict(market['asset'], dt)
            accounts = _accounts_from_dict(market['accounts'], n_steps * dt)
            dets = [DeterministicAsset.from_dict(d)
                    for d in market.get('deterministic_assets', [])]
            contract = Contract.from_dict(data['contract']) \
                if data.get('contract') else None
            convention = TradingConvention.from_dict(data['convention']) \
                if data.get('convention') else None
        except BsdeLatticeError:
            raise
        except KeyError as e:
            raise InvariantError('Missing required key {}.'.format(e), 'required key')
        except (AssertionError, ValueError, TypeError) as e:
            raise InvariantError(str(e), 'valid values')
        config = cls(asset, accounts, n_steps, dt, contract, convention, dets,
                     data.get('solver'), data.get('task'),
                     data.get('identifier', 'run'))
        config.check()
        return config

    @property
    def identifier(self):
        """Get the text identifier of the run."""
        return self._identifier

    @property
    def asset(self):
        """Get the LatticeAsset."""
        return self._asset

    @property
    def accounts(self):
        """Get the AccountSet."""
        return self._accounts

    @property
    def n_steps(self):
        """Get the number of lattice steps."""
        return self._n_steps

    @property
    def dt(self):
        """Get the step length in years."""
        return self._dt

    @property
    def contract(self):
        """Get the Contract."""
        return self._contract

    @property
    def convention(self):
        """Get the TradingConvention."""
        return self._convention

    @property
    def deterministic_assets(self):
        """Get a tuple of DeterministicAsset."""
        return self._det_assets

    @property
    def solver(self):
        """Get a dictionary of solver settings."""
        return dict(self._solver)

    @property
    def task(self):
        """Get a dictionary of task parameters."""
        return dict(self._task)

    @property
    def x(self):
        """Get the initial endowment of the task (Default: 0)."""
        return float(self._task.get('x', 0.0))

    @property
    def market(self):
        """Get the LatticeMarket of the configuration (built once)."""
        if self._market is None:
            self._market = LatticeMarket(self._asset, self._accounts, self._n_steps,
                                         self._dt, self._det_assets)
        return self._market

    @property
    def config_hash(self):
        """Get the SHA-256 hex digest of the canonical configuration JSON."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    def task_value(self, key, default=None):
        """Get a task parameter with a default."""
        return self._task.get(key, default)

    def mirror_adjustments(self):
        """Get the mirror adjustments of the task, or None when not configured."""
        mirror = self._task.get('mirror')
        if mirror is None:
            return None
        try:
            return [Adjustment.from_dict(a) for a in mirror]
        except (AssertionError, KeyError, ValueError, TypeError) as e:
            raise InvariantError('Invalid mirror adjustment: {}'.format(e),
                                 'valid values')

    def check(self):
        """Check the invariants that tie the sections together.

        Raises:
            InvariantError naming the violated invariant.
        """
        if self._n_steps < 1:
            raise InvariantError('The lattice needs at least one step.', 'N >= 1')
        horizon = self._n_steps * self._dt
        if self._accounts.horizon < horizon - 1e-9:
            raise InvariantError('The accounts end at {} before the lattice horizon '
                                 '{}.'.format(self._accounts.horizon, horizon),
                                 'accounts cover [0, T]')
        market = self.market
        self._convention.check_assets(1)
        stream = self._contract.stream
        if getattr(stream, 'maturity_step', 0) > self._n_steps:
            raise InvariantError('A cash flow falls at step {} beyond the lattice '
                                 '({} steps).'.format(stream.maturity_step,
                                                      self._n_steps),
                                 'flows within [0, T]')
        collateral = self._contract.collateral
        if collateral is not None:
            check_terminal_collateral(collateral, market)
        t = self._task.get('t')
        if t is not None and not 0 <= int(t) <= self._n_steps:
            raise InvariantError('Task step t = {} is outside [0, {}].'.format(
                t, self._n_steps), 't within [0, T]')
        if self.x < 0:
            raise InvariantError('The endowment x = {} is negative.'.format(self.x),
                                 'x >= 0')
        self.mirror_adjustments()

    def apply_solver(self):
        """Copy the solver section into the package settings for this run."""
        for key, value in self._solver.items():
            setattr(settings, key, value)

    def with_steps(self, n_steps):
        """Get a copy of this configuration on a lattice with another step count.

        The horizon is kept and every step-valued input is rescaled; the rescaled
        steps must stay integers.
        """
        if n_steps == self._n_steps:
            return self
        data = self.to_dict()
        ratio = float(n_steps) / self._n_steps

        def _rescale(step, name):
            new = step * ratio
            if abs(new - round(new)) > 1e-9:
                raise InvariantError('{} at step {} does not fall on the {}-step '
                                     'lattice.'.format(name, step, n_steps),
                                     'steps on the lattice')
            return int(round(new))

        asset = self._asset
        if abs(asset.up * asset.down - 1) > 1e-12:
            raise InvariantError('Only CRR assets (d = 1/u) can be moved to another '
                                 'lattice.', 'CRR parameterization')
        market = data['market']
        market['asset'] = {
            'type': 'LatticeAsset', 'identifier': asset.identifier, 'spot': asset.spot,
            'sigma': math.log(asset.up) / math.sqrt(self._dt),
            'probability': asset.probability
        }
        if asset.dividends:
            market['asset']['dividends'] = [
                dict(d, step=_rescale(d['step'], 'A dividend'))
                for d in asset.dividends]
        market['dt'] = self._dt * self._n_steps / n_steps
        market['n_steps'] = int(n_steps)
        stream = data.get('contract', {}).get('stream')
        if stream:
            for flow in stream['flows']:
                flow['step'] = _rescale(flow['step'], 'A cash flow')
        if 't' in data.get('task', {}):
            data['task']['t'] = _rescale(data['task']['t'], 'The task step')
        if _has_step_tables(data.get('contract', {})):
            raise InvariantError('Per-step or per-node input tables cannot be moved to '
                                 'another lattice.', 'steps on the lattice')
        return RunConfig.from_dict(data)

    def to_dict(self):
        """Get the configuration as a dictionary."""
        base = {
            'type': 'RunConfig',
            'identifier': self._identifier,
            'market': {
                'n_steps': self._n_steps,
                'dt': self._dt,
                'asset': self._asset.to_dict(),
                'accounts': self._accounts.to_dict(),
                'deterministic_assets': [d.to_dict() for d in self._det_assets]
            },
            'contract': self._contract.to_dict(),
            'convention': self._convention.to_dict(),
            'solver': dict(self._solver),
            'task': dict(self._task)
        }
        return base

    def to_json(self):
        """Get the configuration as an indented JSON string."""
        return json.dumps(self.to_dict(), indent=4, sort_keys=True)

    def __repr__(self):
        return 'RunConfig: {} ({} steps)'.format(self._identifier, self._n_steps)


def _check_keys(section, allowed, name):
    unknown = [k for k in section if k not in allowed]
    if unknown:
        raise InvariantError('Unknown keys {} in the {} section.'.format(unknown, name),
                             'known {} keys'.format(name))
    return section


def _accounts_from_dict(data, horizon):
    if 'type' in data:
        return AccountSet.from_dict(data)
    return AccountSet.flat(data['lend'], data.get('borrow', data['lend']), horizon,
                           data.get('funding'))


def _has_step_tables(contract):
    """Check whether a contract dictionary holds per-step or per-node values."""
    holders = list(contract.get('adjustments', []))
    if contract.get('collateral'):
        holders.append(contract['collateral'])
    if contract.get('defaults'):
        holders.append({'values': contract['defaults'].get('closeout_values', 0)})
    return any(isinstance(h.get('values'), (list, dict)) for h in holders)


def parse_config_text(text, file_path=None):
    """Parse the text of a run configuration.

    Args:
        text: The JSON text.
        file_path: Optional path reported in syntax errors.

    Raises:
        ConfigSyntaxError with the line and column of malformed JSON.
        InvariantError for configurations that break a model invariant.
    """
    try:
        data = json.loads(text)
    except ValueError as e:
        line = getattr(e, 'lineno', None)
        column = getattr(e, 'colno', None)
        raise ConfigSyntaxError(getattr(e, 'msg', str(e)), file_path, line, column)
    return RunConfig.from_dict(data)


def parse_config(path):
    """Read and validate a run configuration file.

    Args:
        path: Path to a JSON run configuration.

    Returns:
        A RunConfig.
    """
    with open(path, 'r') as inf:
        text = inf.read()
    config = parse_config_text(text, path)
    _logger.info('Loaded %s from %s (hash %s).', config, path, config.config_hash[:12])
    return config


def load_run_config(path, steps=None):
    """Read a run configuration and apply its solver settings.

    Args:
        path: Path to a JSON run configuration.
        steps: Optional number of lattice steps replacing the configured one.

    Returns:
        A RunConfig.
    """
    config = parse_config(path)
    if steps is not None:
        config = config.with_steps(steps)
    config.apply_solver()
    return config
