"""bsdelattice pricing commands."""
import click
import sys
import logging

from bsdelattice.runconfig import load_run_config
from bsdelattice.pricing import price_contract, solve_contract, gained_value, \
    ex_dividend_price, marked_to_market, offsetting_price, ccr_price_split, \
    node_table_to_dict
from bsdelattice.adjustment import mirror_adjustments
from bsdelattice.wealth import WealthPath
from bsdelattice.writer import run_report, write_report, write_csv, \
    write_json_artifact
from bsdelattice.errors import InvariantError, exit_code_for

_logger = logging.getLogger(__name__)

_config_argument = click.argument('config-file', type=click.Path(
    exists=True, file_okay=True, dir_okay=False, resolve_path=True))
_steps_option = click.option(
    '--steps', '-n', help='Optional number of lattice steps replacing the one of the '
    'configuration. The horizon is kept.', type=click.IntRange(min=1), default=None)
_out_dir_option = click.option(
    '--out-dir', '-o', help='Optional folder where CSV and JSON artifacts are '
    'written.', type=click.Path(file_okay=False, resolve_path=True), default=None)
_output_option = click.option(
    '--output-file', '-f', help='Optional file to output the JSON report. By '
    'default it will be printed out to stdout.', type=click.File('w'), default='-')


def _task_step(config, t):
    t = t if t is not None else config.task_value('t')
    if t is None:
        raise InvariantError('A step is needed: use --t or set "t" in the task '
                             'section.', 't within [0, T]')
    return int(t)


@click.command('price')
@_config_argument
@_steps_option
@_out_dir_option
@_output_option
def price(config_file, steps, out_dir, output_file):
    """Price a contract and recover its replicating strategy.

    The report holds the replication cost p_hat_0, the hedge at the root, the
    linear-oracle price when the generator is linear and the self-financing check
    of the recovered strategy.

    \b
    Args:
        config_file: Full path to a JSON run configuration.
    """
    try:
        run_price(config_file, steps, out_dir, output_file)
    except Exception as e:
        _logger.exception('Pricing failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0)


def run_price(config_file, steps=None, out_dir=None, output_file=None):
    """Price the contract of a run configuration.

    Args:
        config_file: Full path to a JSON run configuration.
        steps: Optional number of lattice steps replacing the configured one.
        out_dir: Optional folder for solution.csv, wealth_path.csv and report.json.
        output_file: Optional file to output the JSON report. If None, the string
            will simply be returned from this method.
    """
    config = load_run_config(config_file, steps)
    market = config.market
    report, strategy = price_contract(market, config.contract, config.x,
                                      config.convention)
    result = report.to_dict(include_paths=False)
    result['strategy'] = {'x': strategy.x, 'p': strategy.p}
    full = run_report('price', result, config, {'steps': steps})
    if out_dir:
        write_csv(out_dir, 'solution.csv', report.solution, config)
        write_csv(out_dir, 'wealth_path.csv', WealthPath(strategy), config)
        write_json_artifact(out_dir, 'report.json', full)
    return write_report(full, output_file)


@click.command('exdiv')
@_config_argument
@click.option('--t', 't', help='Lattice step of the ex-dividend price. Defaults to '
              '"t" of the task section.', type=click.IntRange(min=0), default=None)
@_steps_option
@_output_option
def exdiv(config_file, t, steps, output_file):
    """Get the hedger's ex-dividend price p^e_t at every node of a step.

    The report also holds the gained value p_hat_t of the same nodes and the largest
    gap between the two.

    \b
    Args:
        config_file: Full path to a JSON run configuration.
    """
    try:
        run_exdiv(config_file, t, steps, output_file)
    except Exception as e:
        _logger.exception('Ex-dividend pricing failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0)


def run_exdiv(config_file, t=None, steps=None, output_file=None):
    """Compute the ex-dividend price of a run configuration at step t."""
    config = load_run_config(config_file, steps)
    market = config.market
    t = _task_step(config, t)
    p_e = ex_dividend_price(market, config.contract, config.x, t, config.convention)
    p_hat = gained_value(market, config.contract, config.x, config.convention)
    p_hat_t = {k: p_hat[k] for k in p_e}
    result = {
        't': t,
        'p_e': node_table_to_dict(p_e),
        'p_hat': node_table_to_dict(p_hat_t),
        'max_gap': max(abs(p_e[k] - p_hat_t[k]) for k in p_e)
    }
    return write_report(run_report('exdiv', result, config, {'t': t, 'steps': steps}),
                        output_file)


@click.command('mtm')
@_config_argument
@_steps_option
@_output_option
def mtm(config_file, steps, output_file):
    """Get the gained value p_hat and the marked-to-market value p^m at every node.

    \b
    Args:
        config_file: Full path to a JSON run configuration.
    """
    try:
        run_mtm(config_file, steps, output_file)
    except Exception as e:
        _logger.exception('Marked-to-market valuation failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0)


def run_mtm(config_file, steps=None, output_file=None):
    """Compute the marked-to-market table of a run configuration."""
    config = load_run_config(config_file, steps)
    p_hat = gained_value(config.market, config.contract, config.x, config.convention)
    result = {'p_hat': node_table_to_dict(p_hat),
              'p_m': node_table_to_dict(marked_to_market(p_hat))}
    return write_report(run_report('mtm', result, config, {'steps': steps}),
                        output_file)


@click.command('offset')
@_config_argument
@click.option('--t', 't', help='Lattice step of the offsetting price. Defaults to '
              '"t" of the task section.', type=click.IntRange(min=0), default=None)
@_steps_option
@_output_option
def offset(config_file, t, steps, output_file):
    """Get the offsetting price p^o_t at every node of a step.

    The mirror adjustments come from "mirror" in the task section. Without them the
    realized adjustments of the contract are frozen and their signs flipped.

    \b
    Args:
        config_file: Full path to a JSON run configuration.
    """
    try:
        run_offset(config_file, t, steps, output_file)
    except Exception as e:
        _logger.exception('Offsetting pricing failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0)


def run_offset(config_file, t=None, steps=None, output_file=None):
    """Compute the offsetting price of a run configuration at step t."""
    config = load_run_config(config_file, steps)
    market = config.market
    t = _task_step(config, t)
    solution = solve_contract(market, config.contract, config.x, config.convention)
    mirror = config.mirror_adjustments()
    source = 'task section'
    if mirror is None:
        mirror = mirror_adjustments(solution.generator.adjustments, solution)
        source = 'sign flip of the realized adjustments'
    prices, gaps = offsetting_price(market, config.contract, mirror, config.x, t,
                                    config.convention, solution)
    result = {
        't': t,
        'mirror': source,
        'p_o': node_table_to_dict(prices),
        'gap': node_table_to_dict(gaps),
        'max_abs_gap': max(abs(v) for v in gaps.values())
    }
    return write_report(run_report('offset', result, config, {'t': t, 'steps': steps}),
                        output_file)


@click.command('ccr-split')
@_config_argument
@_steps_option
@_output_option
def ccr_split(config_file, steps, output_file):
    """Split a counterparty-risky price into its clean and CCR parts.

    The endowments x1, x2 and the decomposition are read from the task section.
    The report holds all three solver runs and the additivity gap.

    \b
    Args:
        config_file: Full path to a JSON run configuration with a "defaults" entry
            in its contract.
    """
    try:
        run_ccr_split(config_file, steps, output_file)
    except Exception as e:
        _logger.exception('CCR split failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0)


def run_ccr_split(config_file, steps=None, output_file=None):
    """Compute the CCR split of a run configuration."""
    config = load_run_config(config_file, steps)
    split = ccr_price_split(
        config.market, config.contract, config.x, config.task_value('x1'),
        config.task_value('x2'),
        config.task_value('decomposition', 'clean_with_adjustments'),
        config.convention)
    return write_report(run_report('ccr-split', split.to_dict(), config,
                                   {'steps': steps}), output_file)
