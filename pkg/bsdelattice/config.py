"""bsdelattice configurations.

Import this into every module where solver or output settings are needed.

Usage:

.. code-block:: python

    from bsdelattice.config import settings
    print(settings.tolerance)
    print(settings.default_output_folder)
    settings.max_iterations = 500
"""
import os
import json
import tempfile


class Settings(object):
    """bsdelattice settings.

    Args:
        config_file: The path to the config.json file from which settings are loaded.
            If None, the config.json module included in this package will be used.
            Default: None.
        mute: If False, the values of the settings will be printed as they
            are set. If True, no printing will occur upon initialization of this
            class. Default: True.

    Properties:
        * default_output_folder
        * tolerance
        * max_iterations
        * damping
        * admissibility_bound
        * superhedge_cell_limit
        * thread_count
        * config_file
        * mute
    """

    DEFAULTS = {
        'tolerance': 1e-12,
        'max_iterations': 200,
        'damping': 1.0,
        'admissibility_bound': -1e9,
        'superhedge_cell_limit': 2000000,
        'thread_count': 1
    }
    THREAD_ENV = 'BSDELATTICE_THREADS'

    def __init__(self, config_file=None, mute=True):
        self.mute = bool(mute)
        self.config_file = config_file

    @property
    def default_output_folder(self):
        """Get or set the path to the folder where CLI artifacts are written."""
        return self._default_output_folder

    @default_output_folder.setter
    def default_output_folder(self, path):
        if not path:
            path = self._find_default_output_folder()
        self._default_output_folder = path
        if not self.mute:
            print('Path to the default output folder is set to: '
                  '{}'.format(self._default_output_folder))

    @property
    def tolerance(self):
        """Get or set the fixed-point tolerance of the backward solver."""
        return self._tolerance

    @tolerance.setter
    def tolerance(self, value):
        value = float(value)
        assert value > 0, 'Solver tolerance must be positive. Got {}.'.format(value)
        self._tolerance = value

    @property
    def max_iterations(self):
        """Get or set the maximum number of fixed-point iterations per node."""
        return self._max_iterations

    @max_iterations.setter
    def max_iterations(self, value):
        value = int(value)
        assert value >= 1, 'Max iterations must be at least 1. Got {}.'.format(value)
        self._max_iterations = value

    @property
    def damping(self):
        """Get or set the damping factor in (0, 1] of the fixed-point iteration."""
        return self._damping

    @damping.setter
    def damping(self, value):
        value = float(value)
        assert 0 < value <= 1, 'Damping must be in (0, 1]. Got {}.'.format(value)
        self._damping = value

    @property
    def admissibility_bound(self):
        """Get or set the default lower bound on discounted wealth (currency)."""
        return self._admissibility_bound

    @admissibility_bound.setter
    def admissibility_bound(self, value):
        self._admissibility_bound = float(value)

    @property
    def superhedge_cell_limit(self):
        """Get or set the largest node-by-candidate count a brute-force search may use.
        """
        return self._superhedge_cell_limit

    @superhedge_cell_limit.setter
    def superhedge_cell_limit(self, value):
        self._superhedge_cell_limit = int(value)

    @property
    def thread_count(self):
        """Get or set the number of worker threads for independent solver runs.

        The BSDELATTICE_THREADS environment variable takes precedence over the
        value in config.json.
        """
        env_value = os.getenv(self.THREAD_ENV)
        if env_value:
            try:
                return max(1, int(env_value))
            except ValueError:
                pass
        return self._thread_count

    @thread_count.setter
    def thread_count(self, value):
        value = int(value)
        assert value >= 1, 'Thread count must be at least 1. Got {}.'.format(value)
        self._thread_count = value

    @property
    def config_file(self):
        """Get or set the path to the config.json file from which settings are loaded.

        Setting this to None will result in using the config.json module included
        in this package.
        """
        return self._config_file

    @config_file.setter
    def config_file(self, cfg):
        if cfg is None:
            cfg = os.path.join(os.path.dirname(__file__), 'config.json')
        self._load_from_file(cfg)
        self._config_file = cfg

    def to_dict(self):
        """Get the current settings as a dictionary."""
        return {
            'default_output_folder': self.default_output_folder,
            'tolerance': self.tolerance,
            'max_iterations': self.max_iterations,
            'damping': self.damping,
            'admissibility_bound': self.admissibility_bound,
            'superhedge_cell_limit': self.superhedge_cell_limit,
            'thread_count': self.thread_count
        }

    def _load_from_file(self, file_path):
        """Set all of the the properties of this object from a config JSON file.

        Args:
            file_path: Path to a JSON file containing the settings. A sample of this
                JSON is the config.json file within this package.
        """
        assert os.path.isfile(file_path), \
            ValueError('No file found at {}'.format(file_path))

        values = dict(self.DEFAULTS)
        values['default_output_folder'] = ''
        with open(file_path, 'r') as cfg:
            try:
                data = json.load(cfg)
            except Exception as e:
                print('Failed to load settings from {}.\nThey will be set to '
                      'defaults instead\n{}'.format(file_path, e))
            else:
                for key, val in data.items():
                    if key.startswith('__') or key not in values:
                        continue
                    if isinstance(val, str):
                        val = val.strip()
                        if not val:
                            continue
                    values[key] = val

        self.default_output_folder = values['default_output_folder']
        self.tolerance = values['tolerance']
        self.max_iterations = values['max_iterations']
        self.damping = values['damping']
        self.admissibility_bound = values['admissibility_bound']
        self.superhedge_cell_limit = values['superhedge_cell_limit']
        self.thread_count = values['thread_count']

    @staticmethod
    def _find_default_output_folder():
        """Find the default output folder in its usual location.

        An attempt will be made to create the directory if it does not already exist.
        """
        home_folder = os.getenv('HOME') or os.path.expanduser('~')
        if not os.access(home_folder, os.W_OK):
            home_folder = tempfile.gettempdir()
        out_folder = os.path.join(home_folder, 'bsdelattice_runs')
        if not os.path.isdir(out_folder):
            try:
                os.makedirs(out_folder)
            except OSError as e:
                if e.errno != 17:  # another run created it first
                    raise OSError('Failed to create default output '
                                  'folder: %s\n%s' % (out_folder, e))
        return out_folder


"""Object possessing all solver and output settings."""
settings = Settings()
