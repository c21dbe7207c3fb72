"""
Command Line Interface (CLI) entry point for bsdelattice.

Note:

    Do not import this module in your code directly unless you are extending the command
    line interface. For running the commands execute them from the command line or as a
    subprocess (e.g. ``subprocess.call(['bsdelattice', 'config'])``)

bsdelattice is using click (https://click.palletsprojects.com/en/7.x/) for creating the
CLI. Every command reads a JSON run configuration, writes a JSON report to stdout (or
to ``--output-file``) and exits with a code naming the kind of failure:

* 0 - success.
* 1 - unexpected error.
* 2 - the run configuration is not valid JSON.
* 3 - an input breaks a model invariant.
* 4 - the backward solver failed.
* 5 - a search space exceeds the configured limits.
* 6 - the pricing problem is global.
"""
import click
import sys
import logging
import json

from ..config import settings
from bsdelattice.cli.setconfig import set_config
from bsdelattice.cli.price import price, exdiv, mtm, offset, ccr_split
from bsdelattice.cli.lab import superhedge, check_comparison, check_desk_noarb, \
    search_arbitrage
from bsdelattice.cli.counterexample import counterexample
from bsdelattice.cli.validate import validate

_logger = logging.getLogger(__name__)


@click.group()
@click.version_option()
def main():
    pass


@main.command('config')
@click.option('--output-file', help='Optional file to output the JSON string of '
              'the config object. By default, it will be printed out to stdout',
              type=click.File('w'), default='-', show_default=True)
def config(output_file):
    """Get a JSON object with all configuration information"""
    try:
        output_file.write(json.dumps(settings.to_dict(), indent=4))
    except Exception as e:
        _logger.exception('Failed to retrieve configurations.\n{}'.format(e))
        sys.exit(1)
    else:
        sys.exit(0)


main.add_command(set_config, name='set-config')
main.add_command(price)
main.add_command(exdiv)
main.add_command(mtm)
main.add_command(offset)
main.add_command(ccr_split, name='ccr-split')
main.add_command(superhedge)
main.add_command(check_comparison, name='check-comparison')
main.add_command(check_desk_noarb, name='check-desk-noarb')
main.add_command(search_arbitrage, name='search-arbitrage')
main.add_command(counterexample)
main.add_command(validate)


if __name__ == "__main__":
    main()
