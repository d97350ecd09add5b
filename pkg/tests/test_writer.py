import json
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy
import pytest

from spraylab.points import PhasePoint
from spraylab.reports import CheckReport, Verdict, threshold_verdict
from spraylab.writer import report_document, write_report

REFERENCE_DIRECTORY = Path(__file__).parent / 'reference'


@pytest.fixture
def report():
    points = PhasePoint((numpy.array([0.5, -0.25]),), (numpy.array([1.0, 2.0]),))
    report = CheckReport('demo', {'name': 'demo metric'}, points, {'seed': 3, 'points': 2})
    report.add_column('residual', [1e-3, 0.125])
    report.add_column('excluded', [False, True])
    report.add_verdict(threshold_verdict('residual', report.columns['residual'], 1e-2, report.included))
    report.add_verdict(Verdict('ok', True, None))
    report.results['kappa'] = -0.25
    report.add_note('second point excluded')
    return report


def test_report(report):
    assert report.passed
    assert report.verdict('residual').value == 1e-3
    assert report.aggregate == {'residual': {'max': 1e-3, 'mean': 1e-3}}
    with pytest.raises(KeyError):
        report.verdict('missing')

    summary = report.summary()
    assert summary.startswith('demo of demo metric: PASS')
    assert 'kappa = -0.25' in summary
    assert 'note: second point excluded' in summary

    report.invalidate('broken')
    assert not report.passed
    assert 'report is invalid' in report.summary()


def test_merge(report):
    other = CheckReport('other', points=report.points)
    other.add_column('F', [1.0, 2.0])
    other.add_verdict(Verdict('positivity', False, 1.0, 0.0))
    report.merge(other, prefix='axioms')

    assert 'axioms_F' in report.columns
    assert not report.verdict('axioms_positivity').passed
    assert not report.passed


def test_write_csv(report):
    filename = 'report_table.csv'
    reference_filename = REFERENCE_DIRECTORY / filename
    with TemporaryDirectory() as temporary_directory:
        output_filename = Path(temporary_directory) / filename
        write_report(report, output_filename)
        with open(output_filename) as output_file, open(reference_filename) as reference_file:
            assert output_file.read() == reference_file.read()


def test_write_txt(report):
    with TemporaryDirectory() as temporary_directory:
        output_filename = Path(temporary_directory) / 'report.txt'
        write_report(report, output_filename)
        text = output_filename.read_text(encoding='utf-8')

    assert text.startswith(report.summary())
    assert 'residual' in text.splitlines()[len(report.summary().splitlines()) + 1]


def test_write_json(report):
    with TemporaryDirectory() as temporary_directory:
        output_filename = Path(temporary_directory) / 'report.json'
        write_report(report, output_filename, {'command': 'demo', 'tolerance': 1e-2})
        with open(output_filename, encoding='utf-8') as output_file:
            document = json.load(output_file)

    assert document['check'] == 'demo'
    assert document['status'] == 'PASS'
    assert document['valid']
    assert document['config']['command'] == 'demo'
    assert document['config']['tolerance'] == repr(1e-2)
    assert 'max_order' in document['config']
    assert float(document['per_point'][1]['residual']) == 0.125
    assert document['per_point'][1]['excluded'] is True
    assert document['verdicts']['residual']['status'] == 'PASS'
    assert float(document['verdicts']['residual']['value']) == 1e-3
    assert document['verdicts']['ok']['value'] is None
    assert document['results']['kappa'] == repr(-0.25)
    assert set(document['versions']) == {'spraylab', 'python', 'numpy', 'pandas'}
    assert document['timestamp'].endswith('Z')


def test_report_document_defaults_to_report_configuration(report):
    document = report_document(report)
    assert document['config']['seed'] == 3
    assert document['notes'] == ['second point excluded']


def test_unsupported_suffix(report):
    with TemporaryDirectory() as temporary_directory:
        with pytest.raises(NotImplementedError):
            write_report(report, Path(temporary_directory) / 'report.kml')
