from datetime import datetime, timezone
import json
from os import PathLike
from pathlib import Path
import platform

import numpy
import pandas

from spraylab.jets import max_order
from spraylab.reports import CheckReport


def versions() -> {str: str}:
    """ versions of the interpreter and the numeric stack a report was produced with """
    from spraylab import __version__

    return {
        'spraylab': __version__,
        'python': platform.python_version(),
        'numpy': numpy.__version__,
        'pandas': pandas.__version__,
    }


def _exact(value) -> object:
    if isinstance(value, (bool, numpy.bool_)):
        return bool(value)
    if isinstance(value, (float, numpy.floating)):
        return repr(float(value))
    if isinstance(value, (int, numpy.integer)):
        return int(value)
    if isinstance(value, dict):
        return {key: _exact(entry) for key, entry in value.items()}
    if isinstance(value, (list, tuple)):
        return [_exact(entry) for entry in value]
    return value


def report_document(report: CheckReport, configuration: {str: object} = None) -> {str: object}:
    """
    JSON-ready document of a report; residuals are `repr` strings so they survive any locale bit-for-bit

    :param report: check report
    :param configuration: run configuration overriding the report's own
    """

    if configuration is None:
        configuration = report.configuration
    configuration = dict(configuration)
    configuration.setdefault('max_order', max_order())

    per_point = [
        {name: _exact(value) for name, value in row.items()}
        for row in report.dataframe.to_dict(orient='records')
    ]
    return {
        'check': report.name,
        'subject': _exact(report.subject),
        'status': report.status,
        'valid': report.valid,
        'config': _exact(configuration),
        'per_point': per_point,
        'aggregate': _exact(report.aggregate),
        'results': _exact(report.results),
        'verdicts': {verdict.name: verdict.to_dict() for verdict in report.verdicts},
        'notes': list(report.notes),
        'versions': versions(),
        'timestamp': f'{datetime.now(timezone.utc):%Y-%m-%dT%H:%M:%SZ}',
    }


def write_report(report: CheckReport, output_filename: PathLike, configuration: {str: object} = None):
    """
    write a report to JSON, a text table, or CSV, depending on the file suffix

    :param report: check report
    :param output_filename: path ending in `.json`, `.txt`, or `.csv`
    :param configuration: run configuration recorded in JSON reports
    """

    if not isinstance(output_filename, Path):
        output_filename = Path(output_filename)
    output_filename = output_filename.expanduser().resolve()

    if output_filename.suffix == '.json':
        with open(output_filename, 'w', encoding='utf-8') as output_file:
            json.dump(report_document(report, configuration), output_file, indent=2, ensure_ascii=False)
    elif output_filename.suffix == '.txt':
        with pandas.option_context('display.max_rows', None, 'display.max_columns', None, 'display.width', 200):
            table = report.dataframe.to_string(index=False, float_format=lambda value: f'{value: .6e}')
        with open(output_filename, 'w', encoding='utf-8') as output_file:
            output_file.write(f'{report.summary()}\n\n{table}\n')
    elif output_filename.suffix == '.csv':
        report.dataframe.to_csv(output_filename, index=False, float_format='%.17g')
    else:
        raise NotImplementedError(f'saving to file type "{output_filename.suffix}" has not been implemented')
