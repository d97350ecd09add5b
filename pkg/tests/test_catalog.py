import inspect
from pathlib import Path
from tempfile import TemporaryDirectory
from typing import Callable, Dict

import numpy
import pytest

from spraylab.catalog import (
    FACTORS,
    METRICS,
    CatalogError,
    SamplingDomain,
    catalog,
    catalog_entries,
    describe,
    factor_catalog,
    factor_from_file,
    load_expression_file,
    metric_from_file,
)
from spraylab.parsing import ExpressionError
from spraylab.points import PhasePoint, stack_points, to_array
from spraylab.sampling import chunks, sample_domain, sample_points, sweep, thread_count, vector_battery


def test_catalog():
    for name in METRICS:
        for dimension in (2, 3):
            metric = catalog(name, dimension)
            assert metric.name == name
            assert metric.dimension == dimension

    assert catalog('poincare_ball', 2).expected_curvature == -1.0
    assert catalog('sphere_projective', 3).expected_curvature == 1.0
    assert catalog('funk_disk', 2).expected_curvature == -0.25
    assert catalog('euclidean', 4).expected_curvature == 0.0
    assert catalog('rand_riemann', 2).expected_curvature is None


def test_catalog_values():
    assert catalog('euclidean', 2)((0.3, -0.2), (3.0, 4.0)) == pytest.approx(5.0)
    assert catalog('poincare_ball', 2)((0.0, 0.0), (1.0, 0.0)) == pytest.approx(2.0)
    # the Funk metric at the origin is the unit norm
    assert catalog('funk_disk', 2)((0.0, 0.0), (0.6, 0.8)) == pytest.approx(1.0)


def test_catalog_errors():
    with pytest.raises(CatalogError):
        catalog('klein_disk', 2)
    with pytest.raises(CatalogError):
        catalog('euclidean', 1)
    with pytest.raises(CatalogError):
        factor_catalog('cubic', 2)
    with pytest.raises(CatalogError):
        SamplingDomain('annulus')
    with pytest.raises(CatalogError):
        SamplingDomain('ball', 0.0)


def test_seeded_entries():
    assert catalog('rand_riemann', 2, seed=3).text == catalog('rand_riemann', 2, seed=3).text
    assert catalog('rand_riemann', 2, seed=3).text != catalog('rand_riemann', 2, seed=4).text
    assert factor_catalog('rand_factor', 3, seed=1).text == factor_catalog('rand_factor', 3, seed=1).text
    assert describe(catalog('rand_riemann', 2, seed=3))['seed'] == 3

    for text in (catalog('rand_riemann', 3, seed=0).text, factor_catalog('rand_factor', 2, seed=0).text):
        assert 'np.' not in text
        assert 'float64' not in text


def test_factors():
    for name in FACTORS:
        factor = factor_catalog(name, 2)
        assert factor.name == name
        assert factor.dimension == 2

    funk_half = factor_catalog('funk_half', 2)
    assert funk_half.restricts_domain
    assert funk_half.deformed_metric == 'funk_disk'
    assert not factor_catalog('euclid', 2).restricts_domain


def test_catalog_entries():
    entries = catalog_entries(2)
    assert len(entries) == len(METRICS) + len(FACTORS)
    assert {entry['kind'] for entry in entries} == {'metric', 'factor'}


def test_expression_files():
    with TemporaryDirectory() as temporary_directory:
        filename = Path(temporary_directory) / 'randers.txt'
        filename.write_text(
            '# Randers-type metric on the plane\ndim=2\nsqrt(y1^2 + y2^2) + 0.3*x2*y1\n', encoding='utf-8'
        )

        assert load_expression_file(filename) == (2, 'sqrt(y1^2 + y2^2) + 0.3*x2*y1')
        metric = metric_from_file(filename)
        assert metric.name == 'randers'
        assert metric.expected_curvature is None
        assert metric((0.0, 1.0), (1.0, 0.0)) == pytest.approx(1.3)

        factor = factor_from_file(filename)
        assert factor.dimension == 2

        missing_header = Path(temporary_directory) / 'missing_header.txt'
        missing_header.write_text('sqrt(y1^2 + y2^2)\n', encoding='utf-8')
        with pytest.raises(CatalogError):
            metric_from_file(missing_header)

        bad_expression = Path(temporary_directory) / 'bad_expression.txt'
        bad_expression.write_text('dim=2\nsqrt(y1^2 + y3^2)\n', encoding='utf-8')
        with pytest.raises(ExpressionError):
            metric_from_file(bad_expression)

        with pytest.raises(FileNotFoundError):
            metric_from_file(Path(temporary_directory) / 'nonexistent.txt')


def test_sample_domain():
    ball = SamplingDomain('ball', 0.6)
    sample = sample_domain(ball, 3, 200, seed=5)

    x = to_array(sample.x, sample.size)
    y = to_array(sample.y, sample.size)
    fiber_norms = numpy.sqrt(numpy.sum(y ** 2, axis=0))

    assert sample.size == 200
    assert numpy.all(ball.contains(x))
    assert numpy.all((fiber_norms >= 0.5) & (fiber_norms <= 2.0))

    with pytest.raises(ValueError):
        sample_domain(ball, 2, 0)


def test_sampling_is_deterministic():
    metric = catalog('poincare_ball', 2)
    first = sample_points(metric, 10, seed=42)
    second = sample_points(metric, 10, seed=42)
    third = sample_points(metric, 10, seed=43)

    assert stack_points(first) == stack_points(second)
    assert not stack_points(first) == stack_points(third)
    assert vector_battery(2, 3, 4, seed=1) == vector_battery(2, 3, 4, seed=1)


def test_vector_battery():
    battery = vector_battery(3, 2, 5)
    assert len(battery) == 5
    for vectors in battery:
        assert len(vectors) == 2
        for vector in vectors:
            assert len(vector) == 6
            assert numpy.linalg.norm(vector) == pytest.approx(1.0)


def test_sweep_matches_across_threads():
    sample = sample_domain(SamplingDomain(), 2, 25, seed=2)

    def function(point):
        return {'product': point.x[0] * point.y[1], 'sum': point.x[1] + point.y[0]}

    single = sweep(function, sample, threads=1)
    threaded = sweep(function, sample, threads=4)

    assert len(chunks(sample, 4)) == 4
    for name in single:
        assert numpy.array_equal(single[name], threaded[name])

    annotation = inspect.signature(sweep).parameters['function'].annotation
    assert annotation == Callable[[PhasePoint], Dict[str, numpy.ndarray]]


def test_thread_count(monkeypatch):
    monkeypatch.delenv('SPRAYLAB_THREADS', raising=False)
    assert thread_count() == 1
    monkeypatch.setenv('SPRAYLAB_THREADS', '3')
    assert thread_count() == 3
    monkeypatch.setenv('SPRAYLAB_THREADS', 'many')
    assert thread_count() == 1
