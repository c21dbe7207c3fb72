"""bsdelattice commands reproducing models where replication is not optimal."""
import click
import sys
import logging

from bsdelattice.counterexample import reproduce_no_borrowing, \
    reproduce_rate_threshold
from bsdelattice.writer import run_report, write_report
from bsdelattice.errors import exit_code_for

_logger = logging.getLogger(__name__)


@click.group(help='Commands reproducing non-regular models. Each command exits with '
             '0 when every predicted outcome is observed and 1 otherwise.')
def counterexample():
    pass


@counterexample.command('no-borrowing')
@click.option('--u', 'gate_time', help='Gate time U in years.', type=float,
              default=0.5, show_default=True)
@click.option('--t', 'maturity', help='Maturity T in years.', type=float,
              default=1.5, show_default=True)
@click.option('--dt', help='Lattice step in years.', type=float, default=0.1,
              show_default=True)
@click.option('--output-file', '-f', help='Optional file to output the JSON report. '
              'By default it will be printed out to stdout.',
              type=click.File('w'), default='-')
def no_borrowing(gate_time, maturity, dt, output_file):
    """Reproduce the zero-rate model where borrowing is precluded.

    Contract A pays the put value P_U(K) at U and receives the put at T; it costs
    nothing to replicate. Investing P_U(K) in the ramp asset at U pays
    P_U(K) + 2K(T - U), which covers the put when T - U >= 0.5.
    """
    try:
        ok = run_no_borrowing(gate_time, maturity, dt, output_file)
    except Exception as e:
        _logger.exception('No-borrowing reproduction failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0 if ok else 1)


def run_no_borrowing(gate_time=0.5, maturity=1.5, dt=0.1, output_file=None):
    """Run the no-borrowing reproduction and return whether it was reproduced."""
    report = reproduce_no_borrowing(gate_time=gate_time, maturity=maturity, dt=dt)
    write_report(run_report('counterexample no-borrowing', report.to_dict(),
                            parameters=report.parameters), output_file)
    return report.reproduced


@counterexample.command('rate-threshold')
@click.option('--rb', 'borrow_rate', help='Cash borrowing rate r_b.', type=float,
              default=1.2, show_default=True)
@click.option('--grid', '-g', help='Spacing of the hedge-ratio grid of the primary '
              'arbitrage search.', type=float, default=0.05, show_default=True)
@click.option('--output-file', '-f', help='Optional file to output the JSON report. '
              'By default it will be printed out to stdout.',
              type=click.File('w'), default='-')
def rate_threshold(borrow_rate, grid, output_file):
    """Reproduce the model with lending at 0 and borrowing at r_b.

    Above the threshold ln(S2_T) the null contract admits no arbitrage in the search
    space, yet the hedger of a short put can switch into the ramp asset on the gate
    event and end strictly above zero.
    """
    try:
        ok = run_rate_threshold(borrow_rate, grid, output_file)
    except Exception as e:
        _logger.exception('Rate-threshold reproduction failed.\n{}'.format(e))
        sys.exit(exit_code_for(e))
    else:
        sys.exit(0 if ok else 1)


def run_rate_threshold(borrow_rate=1.2, grid=0.05, output_file=None):
    """Run the rate-threshold reproduction and return whether it was reproduced."""
    report = reproduce_rate_threshold(borrow_rate, grid=grid)
    write_report(run_report('counterexample rate-threshold', report.to_dict(),
                            parameters=report.parameters), output_file)
    return report.reproduced
