import numpy
import pytest

from spraylab.calculus import PreconditionError
from spraylab.catalog import MetricSpec, catalog
from spraylab.checks import bianchi_check, cc_check, identity_check, scalar_flag_check
from spraylab.finsler import geodesic_spray
from spraylab.model import Tolerances
from spraylab.sampling import sample_domain

POINTS = 8
BATTERY = 4


@pytest.mark.parametrize(
    'name,dimension,expected',
    [('euclidean', 2, 0.0), ('poincare_ball', 2, -1.0), ('sphere_projective', 3, 1.0), ('funk_disk', 2, -0.25)],
)
def test_constant_flag_curvature(name, dimension, expected):
    metric = catalog(name, dimension)
    report = cc_check(metric, count=POINTS, seed=42, battery_size=BATTERY)

    assert report.passed, report.summary()
    assert report.results['kappa'] == pytest.approx(expected, abs=1e-8)
    assert report.verdict('kappa_spread').value < 1e-6
    assert report.verdict('isotropic').automatic == (dimension == 2)
    assert report.verdict('d_h_xi').automatic == (dimension > 2)
    assert report.size == POINTS


def test_random_metric_is_not_of_constant_curvature():
    metric = catalog('rand_riemann', 2, seed=0)
    report = cc_check(metric, count=POINTS, seed=1, battery_size=BATTERY)

    assert not report.passed
    assert report.verdict('isotropic').passed
    assert not report.verdict('kappa_spread').passed
    assert report.verdict('kappa_spread').value > 1e-2
    assert not report.verdict('d_h_xi').passed
    assert numpy.max(report.columns['d_h_xi']) > 1e-2
    assert not report.verdict('constant_flag_curvature').passed


def test_invalid_metric():
    metric = MetricSpec('quadratic', 2, 'y1^2 + y2^2')
    report = cc_check(metric, count=4)

    assert not report.valid
    assert not report.passed
    assert report.verdict('axioms_homogeneity').status == 'FAIL'
    assert 'axioms_F' in report.columns


def test_threaded_sweep_is_reproducible():
    metric = catalog('poincare_ball', 2)
    single = cc_check(metric, count=6, seed=3, battery_size=BATTERY, threads=1)
    threaded = cc_check(metric, count=6, seed=3, battery_size=BATTERY, threads=3)

    for name in ('kappa', 'd_J_xi', 'd_h_xi'):
        assert numpy.allclose(single.columns[name], threaded.columns[name], rtol=1e-12, atol=1e-15)


def test_tolerances():
    metric = catalog('rand_riemann', 2, seed=0)
    strict = cc_check(metric, count=4, battery_size=BATTERY)
    loose = cc_check(metric, count=4, battery_size=BATTERY, tolerances=Tolerances(xi=10.0))

    assert not strict.verdict('kappa_spread').passed
    assert loose.verdict('kappa_spread').passed
    assert loose.configuration['tolerances']['xi'] == 10.0

    with pytest.raises(ValueError):
        Tolerances(curvature=0)


def test_bianchi():
    metric = catalog('sphere_projective', 3)
    points = sample_domain(metric.domain, 3, 4, seed=5)
    report = bianchi_check(geodesic_spray(metric), points, battery_size=BATTERY)

    assert report.passed, report.summary()
    assert numpy.max(report.columns['d_h_xi']) < 1e-6


def test_bianchi_preconditions():
    metric = catalog('poincare_ball', 2)
    with pytest.raises(PreconditionError):
        bianchi_check(geodesic_spray(metric), sample_domain(metric.domain, 2, 2))

    metric = catalog('rand_riemann', 3, seed=1)
    with pytest.raises(PreconditionError):
        bianchi_check(geodesic_spray(metric), sample_domain(metric.domain, 3, 4, seed=3))


def test_scalar_flag_curvature():
    for metric in (catalog('poincare_ball', 2), catalog('rand_riemann', 2, seed=2)):
        report = scalar_flag_check(metric, count=4, seed=6)
        assert report.passed, report.summary()

    report = scalar_flag_check(catalog('funk_disk', 2), count=4, seed=6)
    assert report.passed, report.summary()
    assert numpy.allclose(report.columns['kappa'], -0.25, atol=1e-8)


@pytest.mark.parametrize(
    'name,dimension,count',
    [
        ('euclidean', 2, 2),
        ('poincare_ball', 2, 2),
        ('sphere_projective', 2, 2),
        ('funk_disk', 2, 2),
        ('sphere_projective', 3, 1),
    ],
)
def test_identity_suite(name, dimension, count):
    metric = catalog(name, dimension)
    points = sample_domain(metric.domain, dimension, count, seed=7)
    report = identity_check(geodesic_spray(metric), points, battery_size=2)

    assert report.passed, report.summary()
    for column in ('J_squared', 'h_J_bracket', 'h_fast_vs_fn', 'R_fast_vs_fn', 'R_reconstruction', 'xi_constant_curvature'):
        assert column in report.columns


def test_identity_suite_without_isotropy():
    metric = catalog('rand_riemann', 3, seed=1)
    points = sample_domain(metric.domain, 3, 1, seed=3)
    report = identity_check(geodesic_spray(metric), points, battery_size=2)

    assert 'R_reconstruction' not in report.columns
    assert 'R_constant_curvature' not in report.columns
    assert report.verdict('h_plus_v').passed
    assert report.verdict('phi_of_S').passed


def test_seeded_sweep_is_deterministic():
    metric = catalog('rand_riemann', 2)
    first = cc_check(metric, count=4, seed=11, battery_size=BATTERY)
    second = cc_check(metric, count=4, seed=11, battery_size=BATTERY)

    assert first.columns.keys() == second.columns.keys()
    for name in first.columns:
        numpy.testing.assert_array_equal(first.columns[name], second.columns[name])
    numpy.testing.assert_equal(first.results, second.results)
