"""bsdelattice commands for superhedging, comparison and arbitrage checks."""
import click
import sys
import logging

from bsdelattice.runconfig import load_run_config
from bsdelattice.bsde import build_generator, comparison_suite
from bsdelattice.superhedge import SearchSpace, superhedge_bruteforce, \
    regularity_verdict
from bsdelattice.arbitrage import search_primary_arbitrage, \
    desk_supermartingale_check
from bsdelattice.adjustment import mirror_adjustments
from bsdelattice.writer import run_report, write_report
from bsdelattice.errors import exit_code_for

_logger = logging.getLogger(__name__)

_config_argument = click.argument('config-file', type=click.Path(
    exists=True, file_okay=True, dir_okay=False, resolve_path=True))
_grid_option = click.option(
    '--grid', '-g', help='Spacing of the hedge-ratio grid. Defaults to "grid" of the '
    'task section or 0.01.', type=float, default=None)
_seed_option = click.option(
    '--seed', '-s', help='Seed of the random sampler. Defaults to "seed" of the task '
    'section or 0.', type=int, default=None)
_output_option = click.option(
    '--output-file', '-f', help='Optional file to output the JSON report. By '
    'default it will be printed out to stdout.', type=click.File('w'), default='-')


def search_space(config, grid=None):
    """Get the SearchSpace described by the task section of a run configuration."""
    grid = grid if grid is not None else config.task_value('grid', 0.01)
    return SearchSpace.from_step(
        grid, config.task_value('xi_min', -1.0), config.task_value('xi_max', 1.0),
        config.task_value('eta_values', ()), config.task_value('allow_borrowing', True))


def _seed(config, seed):
    return int(seed if seed is not None else config.task_value('seed', 0))


@click.command('superhedge')
@_config_argument
@_grid_option
@_output_option
def superhedge(config_file, grid, output_file):
    """Search the cheapest superhedge and decide whether the model is regular.

    The report holds the four fair-price bounds, the grid error bar and the
    regularity verdict, all relative to the reported search space.

    \b
    Args:
        config_file: Full path to a JSON run configuration.
    """
    try:
        run_superhedge(config_file, grid, output_file)
    except Exception as e:
        _logger.exception('Superhedging search failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0)


def run_superhedge(config_file, grid=None, output_file=None):
    """Run the superhedging search of a run configuration."""
    config = load_run_config(config_file)
    market, space = config.market, search_space(config, grid)
    verdict = regularity_verdict(market, config.contract, config.x, space,
                                 config.convention)
    search = verdict.search or superhedge_bruteforce(
        market, config.contract, config.x, space, config.convention)
    result = {
        'search': search.to_dict(),
        'verdict': verdict.to_dict(),
        'replication_cost': verdict.replication_cost,
        'scope': 'relative to the search space: {}'.format(space.label())
    }
    if verdict.replication_cost is not None:
        result['distance_to_replication'] = abs(search.price -
                                                verdict.replication_cost)
    return write_report(run_report('superhedge', result, config,
                                   {'grid': space.resolution}), output_file)


@click.command('check-comparison')
@_config_argument
@_seed_option
@_output_option
def check_comparison(config_file, seed, output_file):
    """Check comparison and strict comparison on random terminal pairs.

    The number of pairs is "samples" of the task section (default 100).

    \b
    Args:
        config_file: Full path to a JSON run configuration.
    """
    try:
        run_check_comparison(config_file, seed, output_file)
    except Exception as e:
        _logger.exception('Comparison check failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0)


def run_check_comparison(config_file, seed=None, output_file=None):
    """Run the comparison suite of a run configuration."""
    config = load_run_config(config_file)
    seed = _seed(config, seed)
    generator = build_generator(config.market, config.contract, config.x,
                                config.convention)
    result = comparison_suite(config.market, generator,
                              int(config.task_value('samples', 100)), seed)
    return write_report(run_report('check-comparison', result, config,
                                   {'seed': seed}), output_file)


@click.command('check-desk-noarb')
@_config_argument
@_seed_option
@_output_option
def check_desk_noarb(config_file, seed, output_file):
    """Check that a desk holding a contract and its mirror has no arbitrage.

    Endowments come from "x1" and "x2" of the task section (defaults x and 0) and
    the mirror adjustments from "mirror" (default: the sign flip of the contract's
    adjustments).

    \b
    Args:
        config_file: Full path to a JSON run configuration.
    """
    try:
        run_check_desk_noarb(config_file, seed, output_file)
    except Exception as e:
        _logger.exception('Desk no-arbitrage check failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0)


def run_check_desk_noarb(config_file, seed=None, output_file=None):
    """Run the desk supermartingale check of a run configuration."""
    config = load_run_config(config_file)
    seed = _seed(config, seed)
    market, contract = config.market, config.contract
    mirror = config.mirror_adjustments()
    if mirror is None:
        mirror = mirror_adjustments(contract.compiled_adjustments(market))
    report = desk_supermartingale_check(
        market, contract, mirror, config.task_value('x1', config.x),
        config.task_value('x2', 0.0), config.convention,
        int(config.task_value('samples', 100)), seed)
    return write_report(run_report('check-desk-noarb', report.to_dict(), config,
                                   {'seed': seed}), output_file)


@click.command('search-arbitrage')
@_config_argument
@_grid_option
@_output_option
def search_arbitrage(config_file, grid, output_file):
    """Search an arbitrage with respect to the null contract.

    The contract section is ignored. Any certificate found is relative to the
    reported search space.

    \b
    Args:
        config_file: Full path to a JSON run configuration.
    """
    try:
        run_search_arbitrage(config_file, grid, output_file)
    except Exception as e:
        _logger.exception('Arbitrage search failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0)


def run_search_arbitrage(config_file, grid=None, output_file=None):
    """Run the primary arbitrage search of a run configuration."""
    config = load_run_config(config_file)
    space = search_space(config, grid)
    outcome = search_primary_arbitrage(config.market, config.x, space,
                                       config.convention)
    return write_report(run_report('search-arbitrage', outcome.to_dict(), config,
                                   {'grid': space.resolution}), output_file)
