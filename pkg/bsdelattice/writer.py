# coding=utf-8
"""Writers of JSON reports and CSV artifacts.

Every artifact embeds the hash of the run configuration and the solver settings it
was produced with. Reports carry no timestamps so that a configuration and a seed
always produce the same bytes.
"""
import json
import logging
import os

import numpy as np

from ladybug.commandutil import process_content_to_output

from .config import settings

_logger = logging.getLogger(__name__)

SOLVER_KEYS = ('tolerance', 'max_iterations', 'damping')


def solver_parameters():
    """Get a dictionary of the solver settings used by the current run."""
    return {key: getattr(settings, key) for key in SOLVER_KEYS}


def run_report(command, result, config=None, parameters=None):
    """Wrap the result of a command in a report dictionary.

    Args:
        command: Name of the CLI command.
        result: Dictionary with the result of the command.
        config: Optional RunConfig the command ran on.
        parameters: Optional dictionary of command options.
    """
    report = {
        'type': 'RunReport',
        'command': command,
        'parameters': dict(parameters or {}),
        'solver': solver_parameters(),
        'result': result
    }
    if config is not None:
        report['config'] = config.identifier
        report['config_hash'] = config.config_hash
    return report


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError('Object of type {} is not JSON serializable.'.format(
        type(value).__name__))


def report_to_json(report):
    """Get a report dictionary as an indented JSON string with sorted keys."""
    return json.dumps(report, indent=4, sort_keys=True, default=_to_builtin)


def write_report(report, output_file=None):
    """Write a report dictionary as JSON.

    Args:
        report: The report dictionary.
        output_file: Optional file path or open file object. If None, the JSON
            string is returned.
    """
    return process_content_to_output(report_to_json(report), output_file)


def artifact_header(config=None):
    """Get the comment line heading every CSV artifact."""
    params = solver_parameters()
    parts = ['{}={}'.format(k, params[k]) for k in SOLVER_KEYS]
    if config is not None:
        parts.insert(0, 'config_hash={}'.format(config.config_hash))
    return '# bsdelattice {}\n'.format(' '.join(parts))


def write_csv(folder, file_name, writer, config=None):
    """Write a CSV artifact into a folder.

    Args:
        folder: Path to the output folder, created when missing.
        file_name: Name of the CSV file.
        writer: Object with a to_csv(file_obj) method (a BsdeSolution or a
            WealthPath).
        config: Optional RunConfig whose hash heads the file.

    Returns:
        The path to the written file.
    """
    if not os.path.isdir(folder):
        os.makedirs(folder)
    path = os.path.join(folder, file_name)
    with open(path, 'w', newline='') as outf:
        outf.write(artifact_header(config))
        writer.to_csv(outf)
    _logger.info('Wrote %s.', path)
    return path


def write_json_artifact(folder, file_name, report):
    """Write a report dictionary as a JSON file into a folder and return its path."""
    if not os.path.isdir(folder):
        os.makedirs(folder)
    path = os.path.join(folder, file_name)
    with open(path, 'w') as outf:
        outf.write(report_to_json(report))
    _logger.info('Wrote %s.', path)
    return path
