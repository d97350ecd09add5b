from typing import Any, Callable, Sequence, Union

import numpy

DEFAULT_MAX_ORDER = 8
MINIMUM_MAX_ORDER = 5

_MAX_ORDER = DEFAULT_MAX_ORDER


class ConfigurationError(Exception):
    pass


class EvaluationError(Exception):
    def __init__(self, message: str, expression: str = None, offset: int = None):
        """
        arithmetic failure while evaluating a function

        :param message: description of the failure
        :param expression: offending sub-expression, if known
        :param offset: 1-based source offset of the offending sub-expression, if known
        """

        if expression is not None:
            message = f'{message} in `{expression}`'
            if offset is not None:
                message += f' at offset {offset}'
        super().__init__(message)
        self.expression = expression
        self.offset = offset


def set_max_order(order: int):
    """
    set the maximum nesting depth of jets

    :param order: new maximum (at least 5)
    """

    global _MAX_ORDER
    if int(order) != order or order < MINIMUM_MAX_ORDER:
        raise ConfigurationError(
            f'max jet order must be an integer >= {MINIMUM_MAX_ORDER}, not {order}'
        )
    _MAX_ORDER = int(order)


def max_order() -> int:
    return _MAX_ORDER


class Jet:
    """
    truncated dual number `value + derivative * t_level` with `t_level^2 = 0`

    Value and derivative are floats, numpy arrays (one entry per batched point), or jets of lower level,
    so that a jet nested `k` levels deep carries every mixed derivative along `k` seeded directions.
    """

    __slots__ = ('level', 'value', 'derivative')
    # keep numpy from broadcasting a leaf array over a jet operand
    __array_ufunc__ = None

    def __init__(self, level: int, value: Any, derivative: Any):
        self.level = level
        self.value = value
        self.derivative = derivative

    def __add__(self, other: Any) -> 'Jet':
        other_level = jet_level(other)
        if other_level == self.level:
            return Jet(self.level, self.value + other.value, self.derivative + other.derivative)
        elif other_level < self.level:
            return Jet(self.level, self.value + other, self.derivative)
        else:
            return other.__radd__(self)

    def __radd__(self, other: Any) -> 'Jet':
        return Jet(self.level, other + self.value, self.derivative)

    def __sub__(self, other: Any) -> 'Jet':
        other_level = jet_level(other)
        if other_level == self.level:
            return Jet(self.level, self.value - other.value, self.derivative - other.derivative)
        elif other_level < self.level:
            return Jet(self.level, self.value - other, self.derivative)
        else:
            return other.__rsub__(self)

    def __rsub__(self, other: Any) -> 'Jet':
        return Jet(self.level, other - self.value, -self.derivative)

    def __mul__(self, other: Any) -> 'Jet':
        other_level = jet_level(other)
        if other_level == self.level:
            return Jet(
                self.level,
                self.value * other.value,
                self.value * other.derivative + self.derivative * other.value,
            )
        elif other_level < self.level:
            return Jet(self.level, self.value * other, self.derivative * other)
        else:
            return other.__rmul__(self)

    def __rmul__(self, other: Any) -> 'Jet':
        return Jet(self.level, other * self.value, other * self.derivative)

    def __truediv__(self, other: Any) -> 'Jet':
        other_level = jet_level(other)
        if other_level == self.level:
            quotient = self.value / other.value
            return Jet(
                self.level, quotient, (self.derivative - quotient * other.derivative) / other.value
            )
        elif other_level < self.level:
            return Jet(self.level, self.value / other, self.derivative / other)
        else:
            return other.__rtruediv__(self)

    def __rtruediv__(self, other: Any) -> 'Jet':
        quotient = other / self.value
        return Jet(self.level, quotient, -(quotient * self.derivative) / self.value)

    def __pow__(self, exponent: Any) -> 'Jet':
        if isinstance(exponent, Jet):
            return exp(exponent * log(self))
        if exponent == 0:
            return Jet(self.level, power(self.value, 0), 0.0 * self.derivative)
        return Jet(
            self.level,
            power(self.value, exponent),
            exponent * power(self.value, exponent - 1) * self.derivative,
        )

    def __rpow__(self, base: Any) -> 'Jet':
        return exp(self * log(base))

    def __neg__(self) -> 'Jet':
        return Jet(self.level, -self.value, -self.derivative)

    def __pos__(self) -> 'Jet':
        return self

    def sqrt(self) -> 'Jet':
        root = sqrt(self.value)
        return Jet(self.level, root, self.derivative / (2 * root))

    def exp(self) -> 'Jet':
        exponential = exp(self.value)
        return Jet(self.level, exponential, exponential * self.derivative)

    def log(self) -> 'Jet':
        return Jet(self.level, log(self.value), self.derivative / self.value)

    def sin(self) -> 'Jet':
        return Jet(self.level, sin(self.value), cos(self.value) * self.derivative)

    def cos(self) -> 'Jet':
        return Jet(self.level, cos(self.value), -sin(self.value) * self.derivative)

    def tan(self) -> 'Jet':
        tangent = tan(self.value)
        return Jet(self.level, tangent, (1 + tangent * tangent) * self.derivative)

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.level}, {self.value!r}, {self.derivative!r})'


Scalar = Union[float, numpy.ndarray, Jet]


def jet_level(value: Any) -> int:
    """ nesting level of the given value (`-1` for plain reals and arrays) """
    return value.level if isinstance(value, Jet) else -1


def highest_level(values: Sequence[Any]) -> int:
    level = -1
    for value in values:
        if isinstance(value, (list, tuple)):
            level = max(level, highest_level(value))
        elif isinstance(value, Jet):
            level = max(level, value.level)
    return level


def seed(value: Scalar, level: int, direction: Scalar = 1.0) -> Jet:
    """
    lift a value to a jet whose derivative along its own level is the given direction

    :param value: order-0 part
    :param level: nesting level to seed
    :param direction: derivative along `level` (1 for a coordinate seed)
    :return: seeded jet
    """

    if level < 0 or level >= _MAX_ORDER:
        raise ConfigurationError(
            f'jet level {level} out of range for max order {_MAX_ORDER}'
        )
    return Jet(level, value, direction)


def primal(value: Scalar) -> Union[float, numpy.ndarray]:
    """ order-0 part of a jet (identity on plain reals) """
    while isinstance(value, Jet):
        value = value.value
    return value


def derivative_part(value: Any, level: int) -> Any:
    """
    derivative of a (possibly nested) result along the given seeded level

    :param value: scalar or nested tuple of scalars
    :param level: seeded level
    :return: same structure, holding derivatives
    """

    if isinstance(value, (list, tuple)):
        return tuple(derivative_part(entry, level) for entry in value)
    if isinstance(value, Jet):
        if value.level == level:
            return value.derivative
        elif value.level > level:
            raise ConfigurationError(
                f'found level {value.level} above the extracted level {level}; '
                'a closure captured a jet from an enclosing derivative'
            )
    return 0.0


def is_zero(value: Any) -> bool:
    if isinstance(value, Jet):
        return False
    if isinstance(value, numpy.ndarray):
        return not numpy.any(value)
    return value == 0


def directional_derivative(
    function: Callable[[tuple], Any],
    coordinates: Sequence[Scalar],
    directions: Sequence[Sequence[Scalar]],
    order: int = None,
) -> Any:
    """
    mixed directional derivative `D_{directions[k-1]} ... D_{directions[0]} function` at the given coordinates

    :param function: map from a coordinate tuple to a scalar or a nested tuple of scalars
    :param coordinates: evaluation point (floats, arrays, or jets)
    :param directions: `k` direction vectors, each as long as `coordinates`
    :param order: expected number of directions, if given
    :return: derivative, with the structure of the function's output
    """

    if order is not None and order != len(directions):
        raise ConfigurationError(f'expected {order} directions, received {len(directions)}')
    if len(directions) > _MAX_ORDER:
        raise ConfigurationError(
            f'derivative order {len(directions)} exceeds max order {_MAX_ORDER}'
        )

    base_level = max(highest_level(coordinates), highest_level(directions)) + 1
    if base_level + len(directions) > _MAX_ORDER:
        raise ConfigurationError(
            f'derivative needs jet levels up to {base_level + len(directions) - 1}, '
            f'beyond max order {_MAX_ORDER}; raise it with `set_max_order`'
        )

    seeded = list(coordinates)
    for index, direction in enumerate(directions):
        if len(direction) != len(seeded):
            raise ConfigurationError(
                f'direction of length {len(direction)} does not match point of length {len(seeded)}'
            )
        level = base_level + index
        seeded = [
            coordinate if is_zero(component) else seed(coordinate, level, component)
            for coordinate, component in zip(seeded, direction)
        ]

    try:
        with numpy.errstate(divide='raise', invalid='raise', over='raise'):
            result = function(tuple(seeded))
    except ArithmeticError as error:
        raise EvaluationError(f'{error.__class__.__name__}: {error}')

    for index in reversed(range(len(directions))):
        result = derivative_part(result, base_level + index)
    return result


def sqrt(value: Scalar) -> Scalar:
    if isinstance(value, Jet):
        return value.sqrt()
    return numpy.sqrt(value)


def exp(value: Scalar) -> Scalar:
    if isinstance(value, Jet):
        return value.exp()
    return numpy.exp(value)


def log(value: Scalar) -> Scalar:
    if isinstance(value, Jet):
        return value.log()
    return numpy.log(value)


def sin(value: Scalar) -> Scalar:
    if isinstance(value, Jet):
        return value.sin()
    return numpy.sin(value)


def cos(value: Scalar) -> Scalar:
    if isinstance(value, Jet):
        return value.cos()
    return numpy.cos(value)


def tan(value: Scalar) -> Scalar:
    if isinstance(value, Jet):
        return value.tan()
    return numpy.tan(value)


def power(base: Scalar, exponent: Scalar) -> Scalar:
    if isinstance(base, Jet) or isinstance(exponent, Jet):
        return base ** exponent
    return numpy.power(base, exponent)
