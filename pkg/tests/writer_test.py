# coding=utf-8
from bsdelattice.account import AccountSet
from bsdelattice.lattice import build_lattice
from bsdelattice.payoff import payoffs
from bsdelattice.cashflow import CashFlowStream
from bsdelattice.contract import Contract
from bsdelattice.pricing import solve_contract
from bsdelattice.runconfig import parse_config
from bsdelattice.writer import run_report, report_to_json, write_report, \
    artifact_header, write_csv, write_json_artifact, solver_parameters

import os
import json
import numpy as np


def test_run_report():
    """Test the report wrapper and its JSON form."""
    config = parse_config('./bsdelattice/samples/vanilla_call.json')
    report = run_report('price', {'price': np.float64(1.5), 'path': (1, 2)}, config,
                        {'steps': None})
    assert report['config_hash'] == config.config_hash
    assert set(report['solver']) == {'tolerance', 'max_iterations', 'damping'}
    text = report_to_json(report)
    data = json.loads(text)
    assert data['result'] == {'price': 1.5, 'path': [1, 2]}
    assert report_to_json(report) == text
    assert write_report(report) == text


def test_artifacts(tmpdir):
    """Test the CSV and JSON artifacts written into a folder."""
    accounts = AccountSet.flat(0.01, 0.05, 1.0)
    market = build_lattice(100, 0.2, 0.5, 2, accounts)
    contract = Contract(CashFlowStream([(2, payoffs.call(100, -1))]))
    solution = solve_contract(market, contract, 0.0)
    folder = str(tmpdir.join('artifacts'))
    path = write_csv(folder, 'solution.csv', solution)
    assert os.path.isfile(path)
    with open(path) as inf:
        lines = inf.read().splitlines()
    assert lines[0] == artifact_header().strip()
    assert lines[1].startswith('step,node_id')
    assert len(lines) == 2 + market.node_count
    assert 'tolerance={}'.format(solver_parameters()['tolerance']) in lines[0]

    json_path = write_json_artifact(folder, 'report.json', {'price': 1.0})
    with open(json_path) as inf:
        assert json.load(inf) == {'price': 1.0}
