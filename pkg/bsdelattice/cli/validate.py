"""bsdelattice validation commands."""
import click
import sys
import logging
import json

from ladybug.commandutil import process_content_to_output

from bsdelattice.runconfig import parse_config
from bsdelattice.errors import BsdeLatticeError, exit_code_for

_logger = logging.getLogger(__name__)


@click.group(help='Commands for validating bsdelattice inputs.')
def validate():
    pass


@validate.command('config')
@click.argument('config-file', type=click.Path(
    exists=True, file_okay=True, dir_okay=False, resolve_path=True))
@click.option(
    '--plain-text/--json', ' /-j', help='Flag to note whether the output validation '
    'report should be formatted as a JSON object instead of plain text. If set to JSON, '
    'the output object will contain a boolean "valid" attribute, an "error" text '
    'that is empty for valid configurations, the "exit_code" and, for valid '
    'configurations, the "config_hash" and a "local" boolean noting whether every '
    'adjustment reads only (t, Y, Z).', default=True, show_default=True)
@click.option(
    '--output-file', '-f', help='Optional file to output the full report '
    'of the validation. By default it will be printed out to stdout.',
    type=click.File('w'), default='-')
def validate_config_cli(config_file, plain_text, output_file):
    """Validate a run configuration.

    The command exits with 0 for a valid configuration, 2 when the file is not
    valid JSON (the message gives the line and column) and 3 when an input breaks
    a model invariant (the message names the invariant).

    \b
    Args:
        config_file: Full path to a JSON run configuration.
    """
    try:
        code = validate_config(config_file, not plain_text, output_file)
    except Exception as e:
        _logger.exception('Config validation failed.\n{}'.format(e))
        sys.exit(1)
    else:
        sys.exit(code)


def validate_config(config_file, json_output=False, output_file=None):
    """Validate a run configuration and write the report.

    Args:
        config_file: Full path to a JSON run configuration.
        json_output: Boolean to note whether the report should be formatted as
            JSON instead of plain text. (Default: False).
        output_file: Optional file to output the report.

    Returns:
        The exit code of the validation (0, 2 or 3).
    """
    report = {'type': 'ValidationReport', 'config_file': config_file}
    try:
        config = parse_config(config_file)
    except BsdeLatticeError as e:
        report.update({'valid': False, 'error': str(e), 'exit_code': exit_code_for(e)})
    else:
        report.update({'valid': True, 'error': '', 'exit_code': 0,
                       'config_hash': config.config_hash,
                       'local': config.contract.is_local})
    if json_output:
        content = json.dumps(report, indent=4)
    elif report['valid']:
        content = 'Valid run configuration: {}\n'.format(config_file)
        if not report['local']:
            content += 'The pricing problem is global and will be rejected by the ' \
                'solver.\n'
    else:
        content = 'Invalid run configuration: {}\n{}\n'.format(
            config_file, report['error'])
    process_content_to_output(content, output_file)
    return report['exit_code']
