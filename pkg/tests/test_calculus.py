import numpy
import pytest

from spraylab import jets
from spraylab.base import LinearCombination, PreconditionError
from spraylab.calculus import (
    ScalarField,
    ScalarForm,
    SemiBasicForm,
    VectorField,
    VectorValuedForm,
    coefficient_norm,
    compose,
    constant_field,
    coordinate_vector,
    d_K,
    exterior_derivative,
    fn_bracket,
    form_residual,
    identity,
    i_K,
    liouville,
    lie_bracket,
    semi_basic_trace,
    vertical_endomorphism,
    wedge,
    zero_form,
)
from spraylab.catalog import catalog
from spraylab.curvature import vertical_differential
from spraylab.points import PhasePoint
from spraylab.sampling import vector_battery

TOLERANCE = 1e-12


@pytest.fixture
def point():
    return PhasePoint((0.3, -0.2), (0.7, 1.1))


@pytest.fixture
def function():
    return ScalarField(2, lambda point: point.x[0] * point.y[1] ** 2 + jets.sin(point.x[1]) * point.y[0], name='f')


def test_vertical_endomorphism(point):
    J = vertical_endomorphism(2)
    battery = vector_battery(2, 1, 6)

    assert J(point, (1.0, 2.0, 3.0, 4.0)) == (0.0, 0.0, 1.0, 2.0)
    assert numpy.all(form_residual(compose(J, J), zero_form(2, 1, True), point, battery) < TOLERANCE)
    assert semi_basic_trace(J)(point) == pytest.approx(2.0)

    with pytest.raises(PreconditionError):
        semi_basic_trace(identity(2))(point)


def test_liouville_brackets(point):
    J = vertical_endomorphism(2)
    C = liouville(2)
    battery = vector_battery(2, 1, 6)

    # [C, J] = −J and [J, C] = J
    assert numpy.all(form_residual(fn_bracket(C, J), -J, point, battery) < TOLERANCE)
    assert numpy.all(form_residual(fn_bracket(J, C), J, point, battery) < TOLERANCE)


def test_vertical_endomorphism_is_integrable(point):
    J = vertical_endomorphism(2)
    battery = vector_battery(2, 2, 6)
    assert numpy.all(form_residual(fn_bracket(J, J), None, point, battery) < TOLERANCE)


def test_lie_bracket(point):
    first = constant_field(coordinate_vector(2, 0), name='∂x1')
    second = VectorField(2, lambda point: (0.0, 0.0, point.x[0] ** 2, 0.0), name='x1² ∂y1')

    bracket = lie_bracket(first, second)(point)
    assert bracket == pytest.approx((0.0, 0.0, 2 * 0.3, 0.0))
    assert fn_bracket(second, first)(point) == pytest.approx((0.0, 0.0, -2 * 0.3, 0.0))


def test_exterior_derivative(point, function):
    differential = exterior_derivative(function)
    direction = (0.2, -1.0, 0.5, 0.3)

    expected = 0.2 * 1.1 ** 2 - 1.0 * numpy.cos(-0.2) * 0.7 + 0.5 * numpy.sin(-0.2) + 0.3 * 2 * 0.3 * 1.1
    assert differential(point, direction) == pytest.approx(expected)

    battery = vector_battery(2, 2, 6)
    assert numpy.all(form_residual(exterior_derivative(differential), None, point, battery) < 1e-10)


def test_vertical_derivation(point, function):
    J = vertical_endomorphism(2)
    d_J = d_K(J, function)
    coefficients = vertical_differential(function, point)
    semi_basic = SemiBasicForm(2, 1, lambda point: vertical_differential(function, point), name='∂f/∂y')

    assert coefficients == pytest.approx((numpy.sin(-0.2), 2 * 0.3 * 1.1))
    assert numpy.all(form_residual(d_J, semi_basic, point, vector_battery(2, 1, 6)) < TOLERANCE)

    # d_J² = 0
    assert numpy.all(form_residual(d_K(J, d_J), None, point, vector_battery(2, 2, 6)) < 1e-10)


def test_liouville_derivation_of_homogeneous_function(point):
    metric = catalog('funk_disk', 2)
    C = liouville(2)
    battery = vector_battery(2, 0, 1)

    # Euler: C(F) = F for F positively 1-homogeneous
    assert numpy.all(form_residual(metric.field, d_K(C, metric.field), point, battery) < 1e-12)


def test_substitution(point, function):
    J = vertical_endomorphism(2)
    differential = exterior_derivative(function)
    vector = (0.4, 0.1, -0.6, 0.9)

    assert i_K(J, differential)(point, vector) == pytest.approx(differential(point, J(point, vector)))
    assert i_K(liouville(2), differential)(point) == pytest.approx(differential(point, (0.0, 0.0, 0.7, 1.1)))


def test_wedge(point, function):
    first = exterior_derivative(function)
    second = d_K(vertical_endomorphism(2), function)
    a = (0.4, 0.1, -0.6, 0.9)
    b = (-0.2, 0.3, 0.5, 0.0)

    product = wedge(first, second)
    assert product(point, a, b) == pytest.approx(
        first(point, a) * second(point, b) - first(point, b) * second(point, a)
    )
    assert product(point, a, b) == pytest.approx(-product(point, b, a))
    assert wedge(first, first)(point, a, b) == pytest.approx(0.0)

    scaled = wedge(function, first)
    assert scaled(point, a) == pytest.approx(function(point) * first(point, a))


def test_coefficient_norm():
    battery = vector_battery(2, 2, 5)
    one_form = numpy.array([[2.0, 0.0], [-1.0, 3.0]])
    two_form = numpy.array([[[0.0], [1.5]], [[-1.5], [0.0]]])

    expected = max(abs(2.0 * vectors[0][0] - 1.0 * vectors[0][1]) for vectors in battery)
    assert coefficient_norm(one_form, battery)[0] == pytest.approx(expected)
    assert coefficient_norm(one_form, battery)[1] == pytest.approx(
        max(abs(3.0 * vectors[0][1]) for vectors in battery)
    )

    expected = max(
        abs(1.5 * (vectors[0][0] * vectors[1][1] - vectors[0][1] * vectors[1][0])) for vectors in battery
    )
    assert coefficient_norm(two_form, battery)[0] == pytest.approx(expected)


def test_form_residual_is_relative(point, function):
    battery = vector_battery(2, 0, 1)
    large = LinearCombination([(1e6, function)])
    shifted = ScalarField(2, lambda point: 1e6 * function(point) + 1.0)

    residual = form_residual(large, shifted, point, battery)
    assert residual[0] == pytest.approx(1.0 / (1e6 * abs(function(point))))


def test_form_errors(point, function):
    J = vertical_endomorphism(2)
    with pytest.raises(PreconditionError):
        J(point)
    with pytest.raises(PreconditionError):
        LinearCombination([(1.0, J), (1.0, function)])
    with pytest.raises(PreconditionError):
        fn_bracket(J, function)
    with pytest.raises(PreconditionError):
        SemiBasicForm(2, 3, lambda point: ())


def linear_field(vector, point, seed) -> VectorField:
    """ vector field through `vector` at `point` with random linear coefficients """
    size = len(vector)
    matrix = numpy.random.default_rng(seed).normal(size=(size, size))
    base = point.coordinates

    def function(other):
        coordinates = other.coordinates
        return tuple(
            vector[row]
            + sum(float(matrix[row][column]) * (coordinates[column] - base[column]) for column in range(size))
            for row in range(size)
        )

    return VectorField(len(vector) // 2, function, name=f'X{seed}')


def applied_field(form, field) -> VectorField:
    return VectorField(form.dimension, lambda other: form(other, field(other)), name=f'{form.name}({field.name})')


def bracket(first, second, point) -> numpy.ndarray:
    return numpy.array(lie_bracket(first, second)(point), dtype=float)


def directional(function, field, point):
    return jets.directional_derivative(
        lambda coordinates: function(PhasePoint.from_coordinates(coordinates)), point.coordinates, [field(point)]
    )


def differential_on_fields(form, first, second, point):
    """ `dω(X, Y) = X(ω(Y)) − Y(ω(X)) − ω([X, Y])` for vector fields `X, Y` """
    return (
        directional(lambda other: form(other, second(other)), first, point)
        - directional(lambda other: form(other, first(other)), second, point)
        - form(point, tuple(bracket(first, second, point)))
    )


@pytest.fixture
def operators():
    first = VectorValuedForm(
        2,
        1,
        lambda point, v: (v[0] * point.y[0], v[1] * point.x[0], v[2] + point.x[1] * v[0], v[3] * point.y[1]),
        name='K',
    )
    second = VectorValuedForm(
        2,
        1,
        lambda point, v: (v[2] * point.x[1], v[0] + v[3], jets.sin(point.y[0]) * v[1], point.x[0] * v[3]),
        name='L',
    )
    return first, second


@pytest.fixture
def one_form():
    return ScalarForm(
        2,
        1,
        lambda point, v: point.y[1] * v[0] + jets.sin(point.x[0]) * v[3] + point.x[1] * point.y[0] * v[2],
        name='ω',
    )


def test_brackets_are_tensorial(point, operators):
    # constant and linear extensions of the arguments give the same brackets
    K, L = operators
    a = (0.4, 0.1, -0.6, 0.9)
    b = (-0.2, 0.3, 0.5, 0.7)
    X = linear_field(a, point, 1)
    Y = linear_field(b, point, 2)
    KX, KY, LX, LY = (applied_field(K, X), applied_field(K, Y), applied_field(L, X), applied_field(L, Y))

    XY = tuple(bracket(X, Y, point))
    expected = (
        bracket(KX, LY, point)
        - bracket(KY, LX, point)
        - numpy.array(L(point, tuple(bracket(KX, Y, point) - bracket(KY, X, point))))
        - numpy.array(K(point, tuple(bracket(LX, Y, point) - bracket(LY, X, point))))
        + numpy.array(K(point, L(point, XY)))
        + numpy.array(L(point, K(point, XY)))
    )
    assert numpy.allclose(fn_bracket(K, L)(point, a, b), expected, atol=1e-10)

    field = VectorField(2, lambda other: (other.y[0], other.y[1], other.x[0] * other.y[1], -other.y[0] ** 2), name='Z')
    expected = bracket(field, applied_field(K, Y), point) - numpy.array(K(point, tuple(bracket(field, Y, point))))
    assert numpy.allclose(fn_bracket(field, K)(point, b), expected, atol=1e-10)


def test_derivations_are_tensorial(point, operators, one_form):
    K, _ = operators
    a = (0.4, 0.1, -0.6, 0.9)
    b = (-0.2, 0.3, 0.5, 0.7)
    X = linear_field(a, point, 3)
    Y = linear_field(b, point, 4)
    KX, KY = applied_field(K, X), applied_field(K, Y)

    assert differential_on_fields(one_form, X, Y, point) == pytest.approx(
        exterior_derivative(one_form)(point, a, b), abs=1e-10
    )

    substituted = differential_on_fields(one_form, KX, Y, point) + differential_on_fields(one_form, X, KY, point)
    assert i_K(K, exterior_derivative(one_form))(point, a, b) == pytest.approx(substituted, abs=1e-10)

    inserted = ScalarForm(2, 1, lambda other, v: one_form(other, K(other, v)), name='i_K ω')
    assert i_K(K, one_form)(point, a) == pytest.approx(inserted(point, a), abs=1e-12)

    expected = substituted - differential_on_fields(inserted, X, Y, point)
    assert d_K(K, one_form)(point, a, b) == pytest.approx(expected, abs=1e-10)
