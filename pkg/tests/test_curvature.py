import numpy
import pytest

from spraylab.calculus import d_K, vertical_endomorphism
from spraylab.catalog import catalog, factor_catalog
from spraylab.checks import ricci_from_xi_check
from spraylab.curvature import (
    CurvaturePack,
    connection,
    curvature_one_form,
    curvature_tensor,
    horizontal_differential,
    isotropy_decompose,
    jacobi_endomorphism,
    semi_basic_differentials,
    vertical_differential,
)
from spraylab.finsler import flat_spray, geodesic_spray
from spraylab.points import PhasePoint, to_array
from spraylab.projective import deform_spray
from spraylab.riemannian import gauss_curvature, riemannian_metric, sectional_curvature
from spraylab.sampling import sample_domain, vector_battery


def kappa(metric, points) -> numpy.ndarray:
    rho, _, _ = isotropy_decompose(geodesic_spray(metric), points)
    return rho / to_array(metric.evaluate(points), points.size) ** 2


def test_flat_curvature():
    for spray in (flat_spray(2), geodesic_spray(catalog('euclidean', 3))):
        n = spray.dimension
        points = sample_domain(catalog('euclidean', n).domain, n, 5, seed=1)
        pack = CurvaturePack(spray)

        assert numpy.all(to_array(pack.jacobi_coefficients(points), points.size) == 0)
        assert numpy.all(to_array(pack.curvature_coefficients(points), points.size) == 0)
        assert numpy.all(to_array(pack.xi_coefficients(points), points.size) == 0)


def test_two_dimensional_sprays_are_isotropic():
    metric = catalog('rand_riemann', 2, seed=11)
    points = sample_domain(metric.domain, 2, 10, seed=2)

    _, _, residual = isotropy_decompose(geodesic_spray(metric), points)
    assert numpy.max(residual) < 1e-9

    deformed = deform_spray(flat_spray(2), factor_catalog('rand_factor', 2, seed=3), points)
    _, _, residual = isotropy_decompose(deformed, points)
    assert numpy.max(residual) < 1e-9


def test_three_dimensional_generic_spray_is_not_isotropic():
    metric = catalog('rand_riemann', 3, seed=1)
    points = sample_domain(metric.domain, 3, 10, seed=3)
    _, _, residual = isotropy_decompose(geodesic_spray(metric), points)
    assert numpy.max(residual) > 1e-6


@pytest.mark.parametrize(
    'name,dimension,expected',
    [('poincare_ball', 2, -1.0), ('poincare_ball', 3, -1.0), ('sphere_projective', 3, 1.0), ('funk_disk', 2, -0.25)],
)
def test_constant_flag_curvature(name, dimension, expected):
    metric = catalog(name, dimension)
    points = sample_domain(metric.domain, dimension, 10, seed=4)
    assert numpy.allclose(kappa(metric, points), expected, atol=1e-9)


def test_gauss_curvature_oracles():
    poincare = riemannian_metric(catalog('poincare_ball', 2))
    sphere = riemannian_metric(catalog('sphere_projective', 2))
    for x in ([0.0, 0.0], [0.2, -0.3]):
        assert gauss_curvature(poincare, x) == pytest.approx(-1.0, abs=1e-5)
        assert gauss_curvature(sphere, x) == pytest.approx(1.0, abs=1e-5)

    hyperbolic = riemannian_metric(catalog('poincare_ball', 3))
    assert sectional_curvature(hyperbolic, [0.1, 0.2, -0.1], [1.0, 0.0, 0.5], [0.0, 1.0, 0.0]) == pytest.approx(
        -1.0, abs=1e-5
    )


def test_flag_curvature_matches_gauss_curvature():
    metric = catalog('rand_riemann', 2, seed=5)
    tensor = riemannian_metric(metric)
    points = sample_domain(metric.domain, 2, 6, seed=5)

    values = kappa(metric, points)
    for index, point in enumerate(points):
        assert values[index] == pytest.approx(gauss_curvature(tensor, numpy.array(point.x)), abs=1e-5)


def test_curvature_one_form_of_constant_curvature():
    # ξ = κF d_JF
    metric = catalog('poincare_ball', 2)
    point = PhasePoint((0.2, 0.1), (-0.4, 1.3))
    xi = curvature_one_form(geodesic_spray(metric))
    value = metric.evaluate(point)
    gradient = vertical_differential(metric.evaluate, point)

    vector = vector_battery(2, 1, 1, seed=6)[0]
    assert xi(point, *vector) == pytest.approx(-value * sum(g * a for g, a in zip(gradient, vector[0][:2])), abs=1e-9)


def test_ricci_scalar_from_alpha_and_xi():
    metric = catalog('funk_disk', 2)
    report = ricci_from_xi_check(geodesic_spray(metric), sample_domain(metric.domain, 2, 8, seed=7))
    assert report.passed, report.summary()

    metric = catalog('rand_riemann', 3, seed=2)
    report = ricci_from_xi_check(geodesic_spray(metric), sample_domain(metric.domain, 3, 4, seed=7))
    assert report.verdict('rho_vs_i_S_alpha').passed
    assert any('isotropic' in note for note in report.notes)


def test_semi_basic_differentials():
    point = PhasePoint((0.3, -0.5), (0.8, 0.6))
    spray = geodesic_spray(catalog('poincare_ball', 2))

    d_j, _ = semi_basic_differentials(spray, lambda point: (point.y[1], -point.y[0]), point)
    assert d_j[0][1] == pytest.approx(-2.0)
    assert d_j[1][0] == pytest.approx(2.0)
    assert d_j[0][0] == 0.0

    def function(point):
        return point.x[0] * point.y[1] ** 3 / (point.y[0] ** 2 + point.y[1] ** 2)

    # d_J d_J f = 0
    d_j, _ = semi_basic_differentials(spray, lambda inner: vertical_differential(function, inner), point)
    assert numpy.max(numpy.abs(to_array(d_j, 1))) < 1e-12

    # d_h d_h f = 0 for the flat spray
    flat = flat_spray(2)
    _, d_h = semi_basic_differentials(flat, lambda inner: horizontal_differential(flat, function, inner), point)
    assert numpy.max(numpy.abs(to_array(d_h, 1))) < 1e-12


def test_connection_and_curvature_forms():
    point = PhasePoint((0.2, -0.1, 0.3), (0.5, 1.0, -0.4))
    flat = flat_spray(3)
    horizontal, vertical = connection(flat)
    assert horizontal(point, (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)) == pytest.approx((1.0, 2.0, 3.0, 0.0, 0.0, 0.0))
    assert vertical(point, (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)) == pytest.approx((0.0, 0.0, 0.0, 4.0, 5.0, 6.0))

    spray = geodesic_spray(catalog('sphere_projective', 3))
    jacobi = jacobi_endomorphism(spray)
    curvature = curvature_tensor(spray)
    S = spray.spray(point)
    assert max(abs(value) for value in jacobi(point, S)) < 1e-9

    first, second = vector_battery(3, 2, 1, seed=9)[0]
    forward = curvature(point, first, second)
    backward = curvature(point, second, first)
    assert numpy.allclose(forward, [-value for value in backward], atol=1e-10)
    assert all(abs(value) < 1e-12 for value in forward[:3])


def test_curvature_objects_are_semi_basic():
    # Φ, R, ξ and d_Jξ vanish as soon as one argument is vertical
    point = PhasePoint((0.2, -0.1), (0.6, 0.8))
    pack = CurvaturePack(geodesic_spray(catalog('funk_disk', 2)))
    vertical = (0.0, 0.0, 0.7, -1.3)
    generic = (0.4, 0.1, -0.6, 0.9)

    def largest(value) -> float:
        return float(numpy.max(numpy.abs(numpy.atleast_1d(value))))

    for jacobi in (pack.jacobi, pack.fn_jacobi_endomorphism()):
        assert largest(jacobi(point, vertical)) < 1e-9
    for curvature in (pack.curvature, pack.fn_curvature_tensor()):
        assert largest(curvature(point, vertical, generic)) < 1e-9
        assert largest(curvature(point, generic, vertical)) < 1e-9
    for xi in (pack.xi, pack.fn_curvature_one_form()):
        assert largest(xi(point, vertical)) < 1e-9
    for d_j_xi in (pack.d_J_xi, d_K(vertical_endomorphism(2), pack.xi)):
        assert largest(d_j_xi(point, vertical, generic)) < 1e-9
        assert largest(d_j_xi(point, generic, vertical)) < 1e-9

    assert largest(pack.jacobi(point, generic)) > 1e-3
