"""Commands to set bsdelattice configurations."""
import click
import sys
import logging
import json

from bsdelattice.config import settings

_logger = logging.getLogger(__name__)


@click.group(help='Commands to set bsdelattice configurations.')
def set_config():
    pass


def _set_key(key, value):
    """Write a key of config.json, resetting it to default when value is None."""
    config_file = settings.config_file
    with open(config_file) as inf:
        data = json.load(inf)
    data[key] = value if value is not None else ''
    with open(config_file, 'w') as fp:
        json.dump(data, fp, indent=4)
    settings.config_file = config_file
    msg_end = 'reset to default' if value is None else 'set to: {}'.format(value)
    print('{} successfully {}.'.format(key.replace('_', '-'), msg_end))


@set_config.command('default-output-folder')
@click.argument('folder-path', required=False, type=click.Path(
    exists=True, file_okay=False, dir_okay=True, resolve_path=True))
def default_output_folder(folder_path):
    """Set the default-output-folder configuration variable.

    \b
    Args:
        folder_path: Path to a folder to be set as the default-output-folder.
            If unspecified, the default-output-folder will be set back to
            the default.
    """
    try:
        _set_key('default_output_folder', folder_path)
    except Exception as e:
        _logger.exception('Failed to set default-output-folder.\n{}'.format(e))
        sys.exit(1)
    else:
        sys.exit(0)


@set_config.command('tolerance')
@click.argument('value', required=False, type=float)
def tolerance(value):
    """Set the fixed-point tolerance of the backward solver.

    \b
    Args:
        value: A positive number. If unspecified, the tolerance is reset to 1e-12.
    """
    try:
        _set_key('tolerance', value)
    except Exception as e:
        _logger.exception('Failed to set tolerance.\n{}'.format(e))
        sys.exit(1)
    else:
        sys.exit(0)


@set_config.command('max-iterations')
@click.argument('value', required=False, type=click.IntRange(min=1))
def max_iterations(value):
    """Set the maximum number of fixed-point iterations per node.

    \b
    Args:
        value: An integer of at least 1. If unspecified, it is reset to 200.
    """
    try:
        _set_key('max_iterations', value)
    except Exception as e:
        _logger.exception('Failed to set max-iterations.\n{}'.format(e))
        sys.exit(1)
    else:
        sys.exit(0)


@set_config.command('damping')
@click.argument('value', required=False, type=click.FloatRange(min=0, max=1))
def damping(value):
    """Set the damping factor of the fixed-point iteration.

    \b
    Args:
        value: A number in (0, 1]. If unspecified, it is reset to 1.
    """
    try:
        if value is not None and value <= 0:
            raise ValueError('Damping must be in (0, 1]. Got {}.'.format(value))
        _set_key('damping', value)
    except Exception as e:
        _logger.exception('Failed to set damping.\n{}'.format(e))
        sys.exit(1)
    else:
        sys.exit(0)


@set_config.command('superhedge-cell-limit')
@click.argument('value', required=False, type=click.IntRange(min=1))
def superhedge_cell_limit(value):
    """Set the largest node-by-candidate count of a brute-force search.

    \b
    Args:
        value: An integer. If unspecified, it is reset to 2000000.
    """
    try:
        _set_key('superhedge_cell_limit', value)
    except Exception as e:
        _logger.exception('Failed to set superhedge-cell-limit.\n{}'.format(e))
        sys.exit(1)
    else:
        sys.exit(0)


@set_config.command('thread-count')
@click.argument('value', required=False, type=click.IntRange(min=1))
def thread_count(value):
    """Set the number of worker threads for independent solver runs.

    The BSDELATTICE_THREADS environment variable overrides this value.

    \b
    Args:
        value: An integer. If unspecified, it is reset to 1.
    """
    try:
        _set_key('thread_count', value)
    except Exception as e:
        _logger.exception('Failed to set thread-count.\n{}'.format(e))
        sys.exit(1)
    else:
        sys.exit(0)
