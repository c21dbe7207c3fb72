# coding=utf-8
"""Price concepts built on the backward solver.

The gained value, ex-dividend price, marked-to-market value, offsetting price and
the split of a counterparty-risky price into a clean and a CCR part are all read
from solver runs. Superhedging bounds and the regularity verdict live in
superhedge.py.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

from .bsde import build_generator, solve_backward, recover_strategy
from .cashflow import CashFlowStream
from .collateral import CollateralSpec
from .contract import Contract
from .creditrisk import counterparty_risky_stream, ccr_cashflows, \
    verify_ccr_decomposition
from .oracle import contract_value
from .wealth import is_self_financing
from .config import settings
from .errors import InvariantError, DomainError

_logger = logging.getLogger(__name__)

DECOMPOSITIONS = ('clean_with_adjustments', 'ccr_with_adjustments')


def node_table_to_dict(table):
    """Convert a dictionary keyed by (step, index) into one keyed by "step,index"."""
    return {'{},{}'.format(*k): v for k, v in sorted(table.items())}


def solve_contract(market, contract, x, convention=None, clean_values=None,
                   start_step=0):
    """Build the generator of a contract and solve the pricing BSDE.

    Args:
        market: The LatticeMarket.
        contract: The Contract.
        x: The initial endowment.
        convention: The TradingConvention. (Default: cash).
        clean_values: Node values of the clean marked-to-market value used by the
            clean_mtm collateral rule.
        start_step: Step at which the backward induction stops. (Default: 0).

    Returns:
        A BsdeSolution.
    """
    generator = build_generator(market, contract, x, convention, clean_values)
    return solve_backward(market, generator, start_step=start_step)


def gained_value(market, contract, x, convention=None, solution=None):
    """Get the hedger's gained value p_hat at every node.

    Args:
        market: The LatticeMarket.
        contract: The Contract.
        x: The initial endowment (x >= 0).
        convention: The TradingConvention. (Default: cash).
        solution: An optional BsdeSolution of the same problem to read from.

    Returns:
        A dictionary from node keys to p_hat_t = B^{0,l}_t (Y_t - x).
    """
    solution = solution or solve_contract(market, contract, x, convention)
    return {node.key: solution.gained_value(node) for node in solution.nodes()}


def _check_step(market, t):
    if not 0 <= t <= market.n_steps or int(t) != t:
        raise DomainError('Step {} is not a step of the lattice (0 to {}).'.format(
            t, market.n_steps))
    return int(t)


def ex_dividend_price(market, contract, x, t, convention=None):
    """Get the hedger's ex-dividend price at every node of a step.

    The hedger starts at step t with the endowment x B^{0,l}_t and replicates the
    flows strictly after t.

    Args:
        market: The LatticeMarket.
        contract: The Contract.
        x: The initial endowment (x >= 0).
        t: The lattice step.
        convention: The TradingConvention. (Default: cash).

    Returns:
        A dictionary from the node keys of step t to p^e_t.
    """
    t = _check_step(market, t)
    remaining = contract.with_stream(contract.stream.after(t))
    solution = solve_contract(market, remaining, x, convention, start_step=t)
    return {node.key: solution.gained_value(node) for node in market.nodes(t)}


def marked_to_market(p_hat):
    """Get the marked-to-market value p^m = -p_hat from a gained-value table."""
    return {key: -value for key, value in p_hat.items()}


def offsetting_price(market, contract, mirror, x, t, convention=None, solution=None):
    """Get the offsetting price of a contract at every node of a step.

    The hedger who replicated the contract from time 0 holds the wealth V_t and
    enters the mirror contract (-A, Y). The residual contract (0, X^t + Y^t) is
    replicated from t with the realized adjustments X frozen at their node values.

    Args:
        market: The LatticeMarket.
        contract: The Contract.
        mirror: A list of Adjustment of the mirror contract.
        x: The initial endowment (x >= 0).
        t: The lattice step.
        convention: The TradingConvention. (Default: cash).
        solution: An optional BsdeSolution of the contract on [0, T].

    Returns:
        A tuple with a dictionary from node keys of step t to p^o_t and a dictionary
        of the gap p^o_t + p_hat_t at the same nodes (0 for a perfect offset).
    """
    t = _check_step(market, t)
    solution = solution or solve_contract(market, contract, x, convention)
    frozen = [adj.with_values(solution.adjustment_table(i))
              for i, adj in enumerate(solution.generator.adjustments)]
    residual = Contract(CashFlowStream.null(), frozen + list(mirror),
                        identifier='{}_residual'.format(contract.identifier))
    res_solution = solve_contract(market, residual, x, convention, start_step=t)
    prices, gaps = {}, {}
    for node in market.nodes(t):
        p_o = res_solution.wealth(node) - solution.wealth(node)
        prices[node.key] = p_o
        gaps[node.key] = p_o + solution.gained_value(node)
    return prices, gaps


def _clean_contract(contract):
    """Get the clean contract, reading a clean_mtm collateral as the mtm rule."""
    coll = contract.collateral
    if coll is not None and coll.rule == 'clean_mtm':
        coll = CollateralSpec('mtm', coll.convention, coll.remuneration,
                              fraction=coll.fraction)
    return Contract(contract.stream, contract.adjustments, coll, None,
                    contract.identifier)


def _ccr_collateral(collateral):
    """Get the collateral of a credit-risk run, reading the mtm rule as clean_mtm."""
    if collateral is not None and collateral.rule == 'mtm':
        return CollateralSpec('clean_mtm', collateral.convention,
                              collateral.remuneration, fraction=collateral.fraction)
    return collateral


def project_clean_values(clean_market, clean_table, extended_market):
    """Copy node values of a plain lattice onto its default-extended copy."""
    lookup = {(n.step, n.ups, n.regime): clean_table[n.key]
              for n in clean_market.iter_nodes() if n.key in clean_table}
    return {n.key: lookup[(n.step, n.ups, n.regime)]
            for n in extended_market.iter_nodes()}


class CcrSplit(object):
    """Prices of a counterparty-risky contract and of its clean and CCR parts.

    Args:
        full: BsdeSolution of the full contract (A#, X) with endowment x.
        clean: BsdeSolution of the clean leg with endowment x1.
        ccr: BsdeSolution of the CCR leg with endowment x2.
        decomposition: Name of the decomposition.
        decomposition_residual: Largest residual of A# = A + A^CCR.

    Properties:
        * full_price
        * clean_price
        * ccr_price
        * gap
    """
    __slots__ = ('full', 'clean', 'ccr', 'decomposition', 'decomposition_residual')

    def __init__(self, full, clean, ccr, decomposition, decomposition_residual):
        self.full = full
        self.clean = clean
        self.ccr = ccr
        self.decomposition = decomposition
        self.decomposition_residual = decomposition_residual

    @property
    def full_price(self):
        """Get p_hat_0 of the full contract."""
        return self.full.price

    @property
    def clean_price(self):
        """Get p_hat_0 of the clean leg."""
        return self.clean.price

    @property
    def ccr_price(self):
        """Get p_hat_0 of the CCR leg."""
        return self.ccr.price

    @property
    def gap(self):
        """Get the additivity gap full - clean - CCR."""
        return self.full_price - self.clean_price - self.ccr_price

    def to_dict(self):
        """Get the split as a dictionary with the provenance of every number."""
        return {
            'type': 'CcrSplit',
            'decomposition': self.decomposition,
            'full': {'price': self.full_price, 'x': self.full.x,
                     'run': 'full contract on the default-extended lattice'},
            'clean': {'price': self.clean_price, 'x': self.clean.x,
                      'run': 'clean leg on the plain lattice'},
            'ccr': {'price': self.ccr_price, 'x': self.ccr.x,
                    'run': 'CCR leg on the default-extended lattice'},
            'gap': self.gap,
            'decomposition_residual': self.decomposition_residual
        }

    def __repr__(self):
        return 'CcrSplit: full={:.6g}, clean={:.6g}, ccr={:.6g}, gap={:.3g}'.format(
            self.full_price, self.clean_price, self.ccr_price, self.gap)


def ccr_price_split(market, contract, x, x1=None, x2=None,
                    decomposition='clean_with_adjustments', convention=None):
    """Price a counterparty-risky contract and its clean and CCR parts.

    The clean contract is solved first on the plain lattice; its marked-to-market
    value feeds the clean_mtm closeout and collateral rules. The full contract
    (A#, X) and the CCR leg are then solved on the default-extended lattice, where
    every adjustment vanishes once a default has happened.

    Args:
        market: The plain LatticeMarket.
        contract: A Contract carrying a DefaultSpec.
        x: The endowment of the full run.
        x1: The endowment of the clean leg. (Default: x).
        x2: The endowment of the CCR leg. (Default: 0).
        decomposition: Either clean_with_adjustments ((A, X) + (A^CCR, 0)) or
            ccr_with_adjustments ((A, 0) + (A^CCR, X)).
            (Default: clean_with_adjustments).
        convention: The TradingConvention. (Default: cash).

    Returns:
        A CcrSplit.
    """
    if contract.defaults is None:
        raise InvariantError('The CCR split needs a contract with a default '
                             'specification.', 'defaults defined')
    if decomposition not in DECOMPOSITIONS:
        raise InvariantError('Unknown decomposition "{}". Choose from {}.'.format(
            decomposition, DECOMPOSITIONS), 'decomposition')
    x1 = x if x1 is None else x1
    x2 = 0.0 if x2 is None else x2
    if abs(x1 + x2 - x) > 1e-12 * max(1.0, abs(x)):
        raise InvariantError('Endowments do not add up: {} + {} != {}.'.format(
            x1, x2, x), 'x = x1 + x2')
    defaults = contract.defaults
    ext = defaults.extend(market)

    clean = _clean_contract(contract)
    clean_solution = solve_contract(market, clean, x1, convention)
    clean_gained = project_clean_values(
        market, {n.key: clean_solution.gained_value(n) for n in market.iter_nodes()},
        ext)
    clean_mtm = marked_to_market(clean_gained)
    closeout = defaults.closeout_table(ext, clean_gained)

    collateral = _ccr_collateral(contract.collateral)
    coll_values = None
    adjs = list(contract.adjustments)
    if collateral is not None and not collateral.is_null:
        coll_values = {n.key: collateral.collateral_value(ext, n, clean_mtm)
                       for n in ext.iter_nodes()}
        adjs = Contract(None, adjs, collateral).compiled_adjustments(ext, clean_mtm)
    adjs = [adj.restricted_to_alive() for adj in adjs]

    risky = counterparty_risky_stream(ext, contract.stream, defaults, coll_values,
                                      closeout)
    ccr_stream = ccr_cashflows(ext, contract.stream, defaults, coll_values,
                               closeout)['A_CCR']
    ok, residual = verify_ccr_decomposition(ext, contract.stream, defaults,
                                            coll_values, closeout)
    if not ok:
        _logger.warning('Counterparty-risky stream differs from A + A_CCR by %.3g.',
                        residual)

    full = Contract(risky, adjs, identifier='{}_full'.format(contract.identifier))
    ccr_adjs = adjs if decomposition == 'ccr_with_adjustments' else []
    ccr = Contract(ccr_stream, ccr_adjs,
                   identifier='{}_ccr'.format(contract.identifier))
    if decomposition == 'ccr_with_adjustments':
        clean_leg = Contract(contract.stream, identifier=contract.identifier)
        runs = [(market, clean_leg, x1), (ext, full, x), (ext, ccr, x2)]
    else:
        runs = [(ext, full, x), (ext, ccr, x2)]

    workers = max(1, min(settings.thread_count, len(runs)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(solve_contract, m, c, e, convention)
                   for m, c, e in runs]
        solutions = [f.result() for f in futures]
    if decomposition == 'ccr_with_adjustments':
        clean_solution = solutions.pop(0)
    full_solution, ccr_solution = solutions
    split = CcrSplit(full_solution, clean_solution, ccr_solution, decomposition,
                     residual)
    _logger.info('%s', split)
    return split


class PricingReport(object):
    """Prices of a contract read from one or more solver runs.

    Args:
        solution: The BsdeSolution of the contract on [0, T].
        p_e: Optional dictionary from steps to ex-dividend price tables.
        p_o: Optional dictionary from steps to (price table, gap table) pairs.
        bounds: Optional SuperhedgeResult of a brute-force search.
        ccr_split: Optional CcrSplit.
        verdict: Optional RegularityVerdict.
        oracle_price: Optional price of the same flows from the linear oracle.
        self_financing: Optional (ok, worst residual, node) tuple of the replay of
            the recovered strategy.

    Properties:
        * solution
        * price
        * p_hat
        * p_m
    """

    def __init__(self, solution, p_e=None, p_o=None, bounds=None, ccr_split=None,
                 verdict=None, oracle_price=None, self_financing=None):
        self.solution = solution
        self.p_e = p_e or {}
        self.p_o = p_o or {}
        self.bounds = bounds
        self.ccr_split = ccr_split
        self.verdict = verdict
        self.oracle_price = oracle_price
        self.self_financing = self_financing
        self._p_hat = None

    @property
    def price(self):
        """Get the replication cost p_hat_0."""
        return self.solution.price

    @property
    def p_hat(self):
        """Get the gained-value table."""
        if self._p_hat is None:
            self._p_hat = {n.key: self.solution.gained_value(n)
                           for n in self.solution.nodes()}
        return self._p_hat

    @property
    def p_m(self):
        """Get the marked-to-market table."""
        return marked_to_market(self.p_hat)

    def to_dict(self, include_paths=True):
        """Get the report as a dictionary.

        Args:
            include_paths: Set to False to leave out the node tables of p_hat and
                p_m. (Default: True).
        """
        sol = self.solution
        base = {
            'type': 'PricingReport',
            'x': sol.x,
            'price': self.price,
            'y0': sol.root_value,
            'z0': sol.z(sol.market.root),
            'xi0': sol.hedge(sol.market.root),
            'provenance': {'price': 'backward solver on [0, T]',
                           'iterations': sol.iteration_count}
        }
        if include_paths:
            base['p_hat'] = node_table_to_dict(self.p_hat)
            base['p_m'] = node_table_to_dict(self.p_m)
        if self.p_e:
            base['p_e'] = {str(t): node_table_to_dict(v) for t, v in self.p_e.items()}
            base['provenance']['p_e'] = 'backward solver on [t, T] per step'
        if self.p_o:
            base['p_o'] = {str(t): {'price': node_table_to_dict(p),
                                    'gap': node_table_to_dict(g)}
                           for t, (p, g) in self.p_o.items()}
            base['provenance']['p_o'] = 'residual contract solved on [t, T]'
        if self.oracle_price is not None:
            base['oracle_price'] = self.oracle_price
            base['provenance']['oracle_price'] = 'risk-neutral lattice expectation'
        if self.self_financing is not None:
            ok, worst, node = self.self_financing
            base['self_financing'] = {'ok': ok, 'worst': worst,
                                      'node': list(node) if node else None}
        if self.bounds is not None:
            base['bounds'] = self.bounds.to_dict()
        if self.ccr_split is not None:
            base['ccr_split'] = self.ccr_split.to_dict()
        if self.verdict is not None:
            base['verdict'] = self.verdict.to_dict()
        return base

    def __repr__(self):
        return 'PricingReport: p_hat_0={:.10g}'.format(self.price)


def price_contract(market, contract, x, convention=None, replay=True):
    """Solve a contract and report its gained value and replicating strategy.

    The linear oracle price is added when the generator is linear and the replay of
    the recovered strategy is checked on lattices without defaults.

    Args:
        market: The LatticeMarket.
        contract: The Contract.
        x: The initial endowment (x >= 0).
        convention: The TradingConvention. (Default: cash).
        replay: Set to False to skip the self-financing replay. (Default: True).

    Returns:
        A tuple (PricingReport, TradingStrategy).
    """
    solution = solve_contract(market, contract, x, convention)
    strategy = recover_strategy(solution)
    oracle = None
    if solution.generator.is_linear:
        curve = market.accounts.cash_lend
        oracle = -float(contract_value(market, contract.stream, curve, curve)[0][0])
    check = None
    if replay and not market.has_defaults:
        check = is_self_financing(strategy)
    return PricingReport(solution, oracle_price=oracle, self_financing=check), strategy
