import itertools
import math

from hypothesis import given, settings, strategies
import numpy
import pytest

from spraylab import jets
from spraylab.jets import (
    ConfigurationError,
    EvaluationError,
    Jet,
    directional_derivative,
    max_order,
    primal,
    seed,
    set_max_order,
)

coordinates = strategies.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


@pytest.fixture
def restore_max_order():
    order = max_order()
    yield
    set_max_order(order)


def test_first_derivative():
    assert directional_derivative(lambda point: point[0] ** 3, (2.0,), [(1.0,)]) == pytest.approx(12.0)
    assert directional_derivative(lambda point: jets.log(point[0]), (2.0,), [(1.0,)]) == pytest.approx(0.5)


def test_second_derivative():
    value = directional_derivative(lambda point: point[0] ** 3, (2.0,), [(1.0,), (1.0,)])
    assert value == pytest.approx(12.0)


def test_mixed_partials():
    def function(point):
        return point[0] * point[1] ** 2

    first = directional_derivative(function, (1.5, -0.5), [(1.0, 0.0), (0.0, 1.0)])
    second = directional_derivative(function, (1.5, -0.5), [(0.0, 1.0), (1.0, 0.0)])

    assert first == pytest.approx(-1.0)
    assert second == pytest.approx(first)


def test_tuple_valued():
    def function(point):
        return point[0] * point[1], jets.sin(point[0])

    gradient = directional_derivative(function, (0.3, 2.0), [(1.0, 0.0)])

    assert gradient[0] == pytest.approx(2.0)
    assert gradient[1] == pytest.approx(math.cos(0.3))


def test_batched_leaves():
    x = numpy.array([0.1, 0.5, 1.0, 2.0])
    value = directional_derivative(lambda point: jets.exp(2 * point[0]), (x,), [(1.0,)])
    assert numpy.allclose(value, 2 * numpy.exp(2 * x))


def test_no_dependence():
    assert directional_derivative(lambda point: 3.0, (1.0,), [(1.0,)]) == 0.0


def test_elementary_functions():
    x = 0.7
    cases = [
        (jets.sqrt, 0.5 / math.sqrt(x)),
        (jets.exp, math.exp(x)),
        (jets.log, 1 / x),
        (jets.sin, math.cos(x)),
        (jets.cos, -math.sin(x)),
        (jets.tan, 1 + math.tan(x) ** 2),
        (lambda value: jets.power(2.0, value), 2.0 ** x * math.log(2.0)),
        (lambda value: jets.power(value, 2.5), 2.5 * x ** 1.5),
    ]
    for function, expected in cases:
        assert directional_derivative(lambda point: function(point[0]), (x,), [(1.0,)]) == pytest.approx(expected)


def test_nested_levels_do_not_mix():
    # d/dx [x * d/dy (x*y)] = d/dx [x^2] = 2x
    def inner(point):
        return directional_derivative(lambda values: values[0] * values[1], point, [(0.0, 1.0)])

    value = directional_derivative(lambda point: point[0] * inner(point), (1.5, 4.0), [(1.0, 0.0)])
    assert value == pytest.approx(3.0)


def test_domain_violation():
    with pytest.raises(EvaluationError):
        directional_derivative(lambda point: jets.sqrt(point[0]), (-1.0,), [(1.0,)])
    with pytest.raises(EvaluationError):
        directional_derivative(lambda point: jets.log(point[0] - 1.0), (1.0,), [(1.0,)])


def test_max_order(restore_max_order):
    with pytest.raises(ConfigurationError):
        set_max_order(4)
    with pytest.raises(ConfigurationError):
        set_max_order(6.5)

    set_max_order(5)
    assert max_order() == 5
    with pytest.raises(ConfigurationError):
        directional_derivative(lambda point: point[0] ** 7, (1.0,), [(1.0,)] * 6)
    with pytest.raises(ConfigurationError):
        seed(1.0, 5)


def test_order_mismatch():
    with pytest.raises(ConfigurationError):
        directional_derivative(lambda point: point[0], (1.0,), [(1.0,)], order=2)
    with pytest.raises(ConfigurationError):
        directional_derivative(lambda point: point[0], (1.0, 2.0), [(1.0,)])


def test_primal():
    jet = seed(seed(2.0, 0, 1.0), 1, 3.0)
    assert isinstance(jet, Jet)
    assert jet.level == 1
    assert primal(jet) == 2.0
    assert primal(4.0) == 4.0


@given(coordinates, coordinates)
@settings(max_examples=100, deadline=None)
def test_jets_agree_with_floats(x, y):
    def function(point):
        return jets.sin(point[0]) * jets.exp(point[1]) / (1 + point[0] ** 2) - point[0] * point[1]

    jet_value = function((seed(x, 0), seed(y, 1)))
    float_value = math.sin(x) * math.exp(y) / (1 + x ** 2) - x * y
    assert primal(jet_value) == pytest.approx(float_value, rel=1e-12, abs=1e-12)


@given(coordinates, coordinates)
@settings(max_examples=50, deadline=None)
def test_derivative_against_closed_form(x, y):
    def function(point):
        return jets.sin(point[0] * point[1])

    derivative = directional_derivative(function, (x, y), [(1.0, 0.0), (0.0, 1.0)])
    expected = math.cos(x * y) - x * y * math.sin(x * y)
    assert derivative == pytest.approx(expected, rel=1e-10, abs=1e-10)


CORPUS = [
    lambda point: jets.exp(point[0]) * jets.sin(point[1]),
    lambda point: jets.sqrt(1 + point[0] ** 2 + point[1] ** 2),
    lambda point: jets.log(2 + point[0] * point[1]),
    lambda point: (point[0] + 2) ** 3 / (1 + point[1] ** 2),
    lambda point: jets.cos(point[0] - point[1]) * jets.tan(0.3 * point[0]),
]

# finite-difference step per derivative order
STEPS = {1: 1e-3, 2: 5e-3, 3: 1e-2, 4: 1e-2}


def central_difference(function, point, directions, step):
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=len(directions)):
        shift = sum(sign * numpy.asarray(direction) for sign, direction in zip(signs, directions))
        total += numpy.prod(signs) * function(tuple(numpy.asarray(point) + step * shift))
    return total / (2 * step) ** len(directions)


def extrapolated_difference(function, point, directions, step):
    return (4 * central_difference(function, point, directions, step / 2) - central_difference(function, point, directions, step)) / 3


@pytest.mark.parametrize('order', [1, 2, 3, 4])
def test_derivatives_against_finite_differences(order):
    generator = numpy.random.default_rng(order)
    for function in CORPUS:
        point = tuple(float(value) for value in generator.uniform(-0.5, 0.5, size=2))
        directions = [tuple(float(value) for value in generator.normal(size=2)) for _ in range(order)]

        expected = extrapolated_difference(function, point, directions, STEPS[order])
        assert directional_derivative(function, point, directions) == pytest.approx(expected, rel=1e-5, abs=1e-6)


def test_documented_derivatives():
    assert directional_derivative(lambda point: point[0] ** 2, (3.0,), [(1.0,)]) == pytest.approx(6.0)
    assert directional_derivative(lambda point: jets.exp(point[0]), (0.0,), [(1.0,)]) == pytest.approx(1.0)

    value = directional_derivative(lambda point: jets.sqrt(point[0]), (4.0,), [(1.0,), (1.0,)])
    assert value == pytest.approx(-1 / 32, rel=1e-12)
    assert value == pytest.approx(
        central_difference(lambda point: math.sqrt(point[0]), (4.0,), [(1.0,), (1.0,)], 1e-4), rel=1e-5
    )

    def norm(point):
        return jets.sqrt(point[0] ** 2 + point[1] ** 2)

    assert directional_derivative(norm, (3.0, 4.0), [(1.0, 0.0)]) == pytest.approx(0.6)
