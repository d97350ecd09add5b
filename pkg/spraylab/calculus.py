"""
Frölicher-Nijenhuis calculus on the slit tangent bundle

Tangent vectors of TM are tuples of `2n` scalars `(a¹..aⁿ, b¹..bⁿ)` in the coordinate frame `(∂/∂x, ∂/∂y)`.
Every operation builds a new form whose evaluator differentiates the evaluators of its operands with jets,
so results compose and can themselves be differentiated.
"""

from typing import Any, Callable, Sequence

import numpy

from spraylab import jets
from spraylab.base import (
    Form,
    LinearCombination,
    PreconditionError,
    add_values,
    scale_values,
    subtract_values,
)
from spraylab.jets import Scalar
from spraylab.model import SEMI_BASIC_TOLERANCE
from spraylab.points import PhasePoint, to_array

__all__ = [
    'Form',
    'LinearCombination',
    'PreconditionError',
    'ScalarField',
    'VectorField',
    'ScalarForm',
    'VectorValuedForm',
    'SemiBasicForm',
]


class ScalarField(Form):
    """ smooth function on T₀M """

    def __init__(
        self,
        dimension: int,
        function: Callable[[PhasePoint], Scalar],
        name: str = None,
        constant: bool = False,
    ):
        super().__init__(dimension, 0, name, constant=constant)
        self.function = function

    def evaluate(self, point: PhasePoint) -> Scalar:
        return self.function(point)


class VectorField(Form):
    """ vector field on T₀M, as a vector-valued 0-form """

    vector_valued = True

    def __init__(
        self,
        dimension: int,
        function: Callable[[PhasePoint], tuple],
        name: str = None,
        constant: bool = False,
    ):
        super().__init__(dimension, 0, name, constant=constant)
        self.function = function

    def evaluate(self, point: PhasePoint) -> tuple:
        return tuple(self.function(point))


class ScalarForm(Form):
    """ scalar-valued form of arbitrary degree given by its evaluator """

    def __init__(
        self,
        dimension: int,
        degree: int,
        evaluator: Callable[..., Scalar],
        name: str = None,
        semi_basic: bool = False,
        constant: bool = False,
    ):
        super().__init__(dimension, degree, name, semi_basic, constant)
        self.evaluator = evaluator

    def evaluate(self, point: PhasePoint, *vectors: Sequence[Scalar]) -> Scalar:
        return self.evaluator(point, *vectors)


class VectorValuedForm(Form):
    """ vector-valued form of arbitrary degree given by its evaluator """

    vector_valued = True

    def __init__(
        self,
        dimension: int,
        degree: int,
        evaluator: Callable[..., tuple],
        name: str = None,
        semi_basic: bool = False,
        constant: bool = False,
    ):
        super().__init__(dimension, degree, name, semi_basic, constant)
        self.evaluator = evaluator

    def evaluate(self, point: PhasePoint, *vectors: Sequence[Scalar]) -> tuple:
        return tuple(self.evaluator(point, *vectors))


class SemiBasicForm(Form):
    """
    semi-basic scalar 1-form `ω(X) = ωₖaᵏ` or 2-form `ω(X, Y) = ωⱼₖaʲãᵏ`, given by its coefficients

    Only the horizontal components `a` of the arguments enter.
    Coefficients are computed once per point, so batteries of test vectors cost a single evaluation.
    """

    def __init__(
        self,
        dimension: int,
        degree: int,
        coefficients: Callable[[PhasePoint], tuple],
        name: str = None,
    ):
        if degree not in (1, 2):
            raise PreconditionError(f'coefficient forms have degree 1 or 2, not {degree}')
        super().__init__(dimension, degree, name, semi_basic=True)
        self.coefficients = coefficients

    def evaluate(self, point: PhasePoint, *vectors: Sequence[Scalar]) -> Scalar:
        return self.contract(self.coefficients(point), vectors)

    def evaluate_battery(self, point: PhasePoint, battery: Sequence[Sequence[Any]]) -> [Scalar]:
        coefficients = self.coefficients(point)
        return [self.contract(coefficients, vectors) for vectors in battery]

    def contract(self, coefficients: tuple, vectors: Sequence[Sequence[Scalar]]) -> Scalar:
        n = self.dimension
        if self.degree == 1:
            return _sum(coefficients[k] * vectors[0][k] for k in range(n) if not jets.is_zero(vectors[0][k]))
        first, second = vectors
        return _sum(
            coefficients[j][k] * first[j] * second[k]
            for j in range(n)
            if not jets.is_zero(first[j])
            for k in range(n)
            if not jets.is_zero(second[k])
        )


class ProductForm(Form):
    """ pointwise product `f ω` of a function and a form """

    def __init__(self, function: Form, form: Form, name: str = None):
        if function.degree != 0 or function.vector_valued:
            raise PreconditionError(f'{function!r} is not a function')
        if name is None:
            name = f'{function.name} {form.name}'
        super().__init__(
            form.dimension,
            form.degree,
            name,
            semi_basic=form.semi_basic,
            constant=form.constant and function.constant,
        )
        self.vector_valued = form.vector_valued
        self.function = function
        self.form = form

    def evaluate(self, point: PhasePoint, *vectors: Sequence[Scalar]) -> Any:
        return scale_values(self.function(point), self.form(point, *vectors))

    def evaluate_battery(self, point: PhasePoint, battery: Sequence[Sequence[Any]]) -> [Any]:
        factor = self.function(point)
        return [scale_values(factor, value) for value in self.form.evaluate_battery(point, battery)]


class WedgeForm(Form):
    """ `ω ∧ θ` of a 1-form with a scalar or vector-valued 1-form """

    def __init__(self, first: Form, second: Form, name: str = None):
        if first.vector_valued or first.degree != 1 or second.degree != 1:
            raise PreconditionError(f'wedge is implemented for 1-forms only, not {first!r} and {second!r}')
        if name is None:
            name = f'{first.name}∧{second.name}'
        super().__init__(
            first.dimension,
            2,
            name,
            semi_basic=first.semi_basic and second.semi_basic,
            constant=first.constant and second.constant,
        )
        self.vector_valued = second.vector_valued
        self.first = first
        self.second = second

    def evaluate(self, point: PhasePoint, *vectors: Sequence[Scalar]) -> Any:
        a, b = vectors
        return subtract_values(
            scale_values(self.first(point, a), self.second(point, b)),
            scale_values(self.first(point, b), self.second(point, a)),
        )

    def evaluate_battery(self, point: PhasePoint, battery: Sequence[Sequence[Any]]) -> [Any]:
        firsts = [(vectors[0],) for vectors in battery]
        seconds = [(vectors[1],) for vectors in battery]
        first_on_firsts = self.first.evaluate_battery(point, firsts)
        first_on_seconds = self.first.evaluate_battery(point, seconds)
        second_on_firsts = self.second.evaluate_battery(point, firsts)
        second_on_seconds = self.second.evaluate_battery(point, seconds)
        return [
            subtract_values(scale_values(a, d), scale_values(b, c))
            for a, b, c, d in zip(first_on_firsts, first_on_seconds, second_on_firsts, second_on_seconds)
        ]


def _sum(terms) -> Scalar:
    total = 0.0
    for term in terms:
        total = total + term
    return total


def zero_vector(dimension: int) -> tuple:
    return (0.0,) * (2 * dimension)


def coordinate_vector(dimension: int, index: int) -> tuple:
    """ `index`-th coordinate vector of TM (`∂/∂xⁱ` for `index < n`, `∂/∂yⁱ⁻ⁿ` otherwise) """
    vector = [0.0] * (2 * dimension)
    vector[index] = 1.0
    return tuple(vector)


def horizontal_part(vector: Sequence[Scalar]) -> tuple:
    return tuple(vector[: len(vector) // 2])


def vertical_part(vector: Sequence[Scalar]) -> tuple:
    return tuple(vector[len(vector) // 2 :])


def is_zero_vector(vector: Sequence[Scalar]) -> bool:
    return all(jets.is_zero(component) for component in vector)


def derivative(function: Callable[[PhasePoint], Any], point: PhasePoint, *directions: Sequence[Scalar]) -> Any:
    """
    directional derivative `D_{directions[-1]} ... D_{directions[0]} function` at a point,
    treating each direction as a constant vector

    :param function: map from phase points to scalars or tuples of scalars
    :param point: evaluation point
    :param directions: tangent vectors with `2n` components
    """

    return jets.directional_derivative(
        lambda coordinates: function(PhasePoint.from_coordinates(coordinates)),
        point.coordinates,
        directions,
    )


def constant_field(vector: Sequence[Scalar], name: str = None) -> VectorField:
    """ vector field with the same components at every point """
    vector = tuple(vector)
    return VectorField(len(vector) // 2, lambda point: vector, name=name or 'constant', constant=True)


def applied(form: Form, vector: Sequence[Scalar]) -> VectorField:
    """ vector field `X ↦ K(X)` obtained by feeding a constant vector to a vector-valued 1-form """
    return VectorField(
        form.dimension,
        lambda point: form(point, vector),
        name=f'{form.name}(·)',
        constant=form.constant,
    )


def _apply(form: Form, point: PhasePoint, vector: Sequence[Scalar]) -> Any:
    if is_zero_vector(vector):
        return zero_vector(form.dimension) if form.vector_valued else 0.0
    return form(point, vector)


def liouville(dimension: int) -> VectorField:
    """ Liouville vector field `C = yⁱ∂/∂yⁱ` """
    zeros = (0.0,) * dimension
    return VectorField(dimension, lambda point: zeros + point.y, name='C')


def vertical_endomorphism(dimension: int) -> VectorValuedForm:
    """ vertical endomorphism `J(∂/∂xⁱ) = ∂/∂yⁱ`, `J(∂/∂yⁱ) = 0` """
    zeros = (0.0,) * dimension
    return VectorValuedForm(
        dimension,
        1,
        lambda point, vector: zeros + tuple(vector[:dimension]),
        name='J',
        semi_basic=True,
        constant=True,
    )


def identity(dimension: int) -> VectorValuedForm:
    return VectorValuedForm(
        dimension, 1, lambda point, vector: tuple(vector), name='Id', constant=True
    )


def zero_form(dimension: int, degree: int, vector_valued: bool = False) -> Form:
    if vector_valued:
        zeros = zero_vector(dimension)
        if degree == 0:
            return VectorField(dimension, lambda point: zeros, name='0', constant=True)
        return VectorValuedForm(
            dimension, degree, lambda point, *vectors: zeros, name='0', semi_basic=True, constant=True
        )
    if degree == 0:
        return ScalarField(dimension, lambda point: 0.0, name='0', constant=True)
    return ScalarForm(
        dimension, degree, lambda point, *vectors: 0.0, name='0', semi_basic=True, constant=True
    )


def bracket_at(first: Form, second: Form, point: PhasePoint) -> tuple:
    """
    Lie bracket `[X, Y] = D_X Y − D_Y X` of two vector fields at a point

    :param first: vector field `X`
    :param second: vector field `Y`
    :param point: evaluation point
    """

    value = zero_vector(first.dimension)
    if not second.constant:
        direction = first(point)
        if not is_zero_vector(direction):
            value = add_values(value, derivative(second, point, direction))
    if not first.constant:
        direction = second(point)
        if not is_zero_vector(direction):
            value = subtract_values(value, derivative(first, point, direction))
    return value


def lie_bracket(first: VectorField, second: VectorField) -> VectorField:
    """ Lie bracket `[X, Y]` of vector fields """
    return VectorField(
        first.dimension,
        lambda point: bracket_at(first, second, point),
        name=f'[{first.name}, {second.name}]',
        constant=first.constant and second.constant,
    )


def fn_bracket_vector_field(field: VectorField, form: VectorValuedForm) -> VectorValuedForm:
    """
    Frölicher-Nijenhuis bracket `[X, K](Y) = [X, KY] − K[X, Y]` of a vector field with a vector-valued 1-form

    :param field: vector field `X`
    :param form: vector-valued 1-form `K`
    """

    if form.degree != 1 or not form.vector_valued:
        raise PreconditionError(f'expected a vector-valued 1-form, not {form!r}')

    def evaluator(point: PhasePoint, vector: Sequence[Scalar]) -> tuple:
        first = bracket_at(field, applied(form, vector), point)
        second = _apply(form, point, bracket_at(field, constant_field(vector), point))
        return subtract_values(first, second)

    return VectorValuedForm(field.dimension, 1, evaluator, name=f'[{field.name}, {form.name}]')


def fn_bracket_one_forms(first: VectorValuedForm, second: VectorValuedForm) -> VectorValuedForm:
    """
    Frölicher-Nijenhuis bracket of two vector-valued 1-forms, as a vector-valued 2-form

    `[K, L](X, Y) = [KX, LY] − [KY, LX] − L([KX, Y] − [KY, X]) − K([LX, Y] − [LY, X])` on constant `X, Y`

    :param first: vector-valued 1-form `K`
    :param second: vector-valued 1-form `L`
    """

    for form in (first, second):
        if form.degree != 1 or not form.vector_valued:
            raise PreconditionError(f'expected a vector-valued 1-form, not {form!r}')

    def evaluator(point: PhasePoint, a: Sequence[Scalar], b: Sequence[Scalar]) -> tuple:
        x_field = constant_field(a)
        y_field = constant_field(b)
        kx = applied(first, a)
        ky = applied(first, b)
        lx = applied(second, a)
        ly = applied(second, b)

        value = subtract_values(bracket_at(kx, ly, point), bracket_at(ky, lx, point))
        value = subtract_values(
            value,
            _apply(
                second,
                point,
                subtract_values(bracket_at(kx, y_field, point), bracket_at(ky, x_field, point)),
            ),
        )
        value = subtract_values(
            value,
            _apply(
                first,
                point,
                subtract_values(bracket_at(lx, y_field, point), bracket_at(ly, x_field, point)),
            ),
        )
        return value

    return VectorValuedForm(
        first.dimension,
        2,
        evaluator,
        name=f'[{first.name}, {second.name}]',
        semi_basic=first.semi_basic and second.semi_basic,
    )


def fn_bracket(first: Form, second: Form) -> Form:
    """
    graded Frölicher-Nijenhuis bracket of vector-valued forms of degree at most 1

    :param first: vector field or vector-valued 1-form
    :param second: vector field or vector-valued 1-form
    """

    if not first.vector_valued or not second.vector_valued:
        raise PreconditionError('the Frölicher-Nijenhuis bracket takes vector-valued forms')

    degrees = (first.degree, second.degree)
    if degrees == (0, 0):
        return lie_bracket(first, second)
    elif degrees == (0, 1):
        return fn_bracket_vector_field(first, second)
    elif degrees == (1, 0):
        return LinearCombination(
            [(-1.0, fn_bracket_vector_field(second, first))], name=f'[{first.name}, {second.name}]'
        )
    elif degrees == (1, 1):
        return fn_bracket_one_forms(first, second)
    else:
        raise PreconditionError(f'brackets of degrees {degrees} are not supported')


def exterior_derivative(form: Form) -> ScalarForm:
    """
    exterior derivative `dω`, evaluated on constant vectors as `Σ (−1)ⁱ D_{Xᵢ} ω(X₀..X̂ᵢ..Xₚ)`

    :param form: scalar form of degree `p`
    :return: scalar form of degree `p + 1`
    """

    if form.vector_valued:
        raise PreconditionError(f'exterior derivative of vector-valued {form!r} is not supported')

    def evaluator(point: PhasePoint, *vectors: Sequence[Scalar]) -> Scalar:
        total = 0.0
        for index, vector in enumerate(vectors):
            if is_zero_vector(vector):
                continue
            rest = vectors[:index] + vectors[index + 1 :]
            term = derivative(lambda other: form(other, *rest), point, vector)
            total = total + term if index % 2 == 0 else total - term
        return total

    return ScalarForm(form.dimension, form.degree + 1, evaluator, name=f'd{form.name}')


def insert(field: VectorField, form: Form) -> Form:
    """
    interior product `i_X ω(X₁..) = ω(X, X₁..)` of a vector field into a scalar or vector-valued form

    :param field: vector field `X`
    :param form: form of degree at least 1
    """

    if form.degree == 0:
        return zero_form(form.dimension, 0, form.vector_valued)

    def evaluator(point: PhasePoint, *vectors: Sequence[Scalar]) -> Any:
        return form(point, field(point), *vectors)

    name = f'i_{field.name} {form.name}'
    if form.vector_valued:
        return VectorValuedForm(form.dimension, form.degree - 1, evaluator, name=name)
    if form.degree == 1:
        return ScalarField(form.dimension, evaluator, name=name)
    return ScalarForm(form.dimension, form.degree - 1, evaluator, name=name)


def i_K(operator: Form, form: Form) -> Form:
    """
    substitution `i_K ω` of a vector-valued form into a scalar form

    Supported: `K` a vector field (interior product), `K` a vector-valued 1-form
    (`Σᵢ ω(X₁..KXᵢ..Xₚ)`), and `ω` a 1-form (`ω ∘ K`) for `K` of any degree.

    :param operator: vector-valued form `K` of degree `k`
    :param form: scalar form `ω` of degree `p`
    :return: scalar form of degree `k + p − 1`
    """

    if not operator.vector_valued or form.vector_valued:
        raise PreconditionError(f'cannot substitute {operator!r} into {form!r}')

    n = form.dimension
    name = f'i_{operator.name} {form.name}'

    if operator.degree == 0:
        return insert(operator, form)
    if form.degree == 0:
        return zero_form(n, operator.degree - 1)

    if form.degree == 1:

        def evaluator(point: PhasePoint, *vectors: Sequence[Scalar]) -> Scalar:
            image = operator(point, *vectors)
            return 0.0 if is_zero_vector(image) else form(point, image)

    elif operator.degree == 1:

        def evaluator(point: PhasePoint, *vectors: Sequence[Scalar]) -> Scalar:
            total = 0.0
            for index, vector in enumerate(vectors):
                image = _apply(operator, point, vector)
                if is_zero_vector(image):
                    continue
                total = total + form(point, *vectors[:index], image, *vectors[index + 1 :])
            return total

    else:
        raise PreconditionError(
            f'substitution of a {operator.degree}-form into a {form.degree}-form is not supported'
        )

    degree = operator.degree + form.degree - 1
    if degree == 0:
        return ScalarField(n, lambda point: evaluator(point), name=name)
    return ScalarForm(
        n, degree, evaluator, name=name, semi_basic=operator.semi_basic and form.semi_basic
    )


def d_K(operator: Form, form: Form) -> Form:
    """
    Frölicher-Nijenhuis derivation `d_K = i_K ∘ d − (−1)^(k−1) d ∘ i_K`

    :param operator: vector-valued form `K` of degree `k` (0, 1 or 2)
    :param form: scalar form `ω`
    :return: scalar form of degree `k + p`
    """

    if form.degree == 0:
        result = i_K(operator, exterior_derivative(form))
    else:
        first = i_K(operator, exterior_derivative(form))
        second = exterior_derivative(i_K(operator, form))
        # vector fields give the Lie derivative i_X d + d i_X
        sign = 1.0 if operator.degree % 2 == 0 else -1.0
        result = LinearCombination([(1.0, first), (sign, second)])
    result.name = f'd_{operator.name} {form.name}'
    return result


def wedge(first: Form, second: Form) -> Form:
    """
    exterior product of scalar forms of degree at most 1, or of a 1-form with a vector-valued 1-form

    :param first: scalar form of degree 0 or 1
    :param second: scalar or vector-valued form
    """

    if first.degree == 0 and not first.vector_valued:
        return ProductForm(first, second)
    elif second.degree == 0 and not second.vector_valued:
        return ProductForm(second, first)
    return WedgeForm(first, second)


def wedge_vector(form: Form, operator: Form) -> Form:
    """ `ω ∧ K`, where `(ω ∧ K)(X, Y) = ω(X) KY − ω(Y) KX` """
    if not operator.vector_valued:
        raise PreconditionError(f'{operator!r} is not vector-valued')
    return wedge(form, operator)


def tensor(form: Form, field: VectorField) -> VectorValuedForm:
    """ vector-valued form `ω ⊗ X` """
    if form.vector_valued or not field.vector_valued or field.degree != 0:
        raise PreconditionError(f'cannot build {form!r} ⊗ {field!r}')

    def evaluator(point: PhasePoint, *vectors: Sequence[Scalar]) -> tuple:
        return scale_values(form(point, *vectors), field(point))

    return VectorValuedForm(
        form.dimension, form.degree, evaluator, name=f'{form.name}⊗{field.name}'
    )


def multiply(function: Form, form: Form) -> Form:
    """ pointwise product `f ω` """
    return ProductForm(function, form)


def compose(operator: Form, form: Form) -> Form:
    """
    composition `K ∘ L` of a vector-valued 1-form with a vector-valued form

    :param operator: vector-valued 1-form `K`
    :param form: vector-valued form `L` of degree `q`
    :return: vector-valued form of degree `q`
    """

    if operator.degree != 1 or not operator.vector_valued or not form.vector_valued:
        raise PreconditionError(f'cannot compose {operator!r} with {form!r}')

    def evaluator(point: PhasePoint, *vectors: Sequence[Scalar]) -> tuple:
        return _apply(operator, point, form(point, *vectors))

    name = f'{operator.name}∘{form.name}'
    if form.degree == 0:
        return VectorField(form.dimension, evaluator, name=name)
    return VectorValuedForm(form.dimension, form.degree, evaluator, name=name)


def semi_basic_trace(
    form: VectorValuedForm, tolerance: float = SEMI_BASIC_TOLERANCE, verify: bool = True
) -> ScalarField:
    """
    trace `Kⁱᵢ` of a semi-basic vector 1-form `K = Kⁱⱼ dxʲ ⊗ ∂/∂yⁱ`

    :param form: vector-valued 1-form
    :param tolerance: relative size below which components count as vanishing
    :param verify: whether to check that the form vanishes on verticals and takes vertical values
    """

    if form.degree != 1 or not form.vector_valued:
        raise PreconditionError(f'trace needs a vector-valued 1-form, not {form!r}')
    n = form.dimension

    def trace(point: PhasePoint) -> Scalar:
        images = [form(point, coordinate_vector(n, index)) for index in range(n)]
        if verify:
            size = point.size
            horizontal = to_array(images, size)
            scale = max(1.0, float(numpy.max(numpy.abs(horizontal))))
            leaks = [numpy.max(numpy.abs(horizontal[:, :n]))]
            for index in range(n):
                vertical_image = form(point, coordinate_vector(n, n + index))
                leaks.append(numpy.max(numpy.abs(to_array(vertical_image, size))))
            if max(leaks) > tolerance * scale:
                raise PreconditionError(
                    f'{form.name} is not semi-basic (component of size {max(leaks):.3e} outside the vertical part)'
                )
        return _sum(images[index][n + index] for index in range(n))

    return ScalarField(n, trace, name=f'Tr {form.name}')


def battery_norm(form: Form, point: PhasePoint, battery: Sequence[Sequence[Any]]) -> numpy.ndarray:
    """
    largest absolute component of a form over a battery of test-vector tuples

    :param form: scalar or vector-valued form
    :param point: phase point (possibly batched)
    :param battery: tuples of `degree` tangent vectors
    :return: one value per batched point
    """

    size = point.size
    if isinstance(form, SemiBasicForm):
        return coefficient_norm(to_array(form.coefficients(point), size), battery)
    values = form.evaluate_battery(point, battery)
    norms = [numpy.max(numpy.abs(to_array(value, size)).reshape(-1, size), axis=0) for value in values]
    return numpy.max(numpy.stack(norms, axis=0), axis=0)


def coefficient_norm(coefficients: numpy.ndarray, battery: Sequence[Sequence[Any]]) -> numpy.ndarray:
    """
    largest absolute value of a semi-basic form over a battery, from its coefficient array

    :param coefficients: array `[k, point]` (1-form) or `[j, k, point]` (2-form)
    :param battery: tuples of tangent vectors
    :return: one value per batched point
    """

    coefficients = numpy.asarray(coefficients, dtype=float)
    degree = coefficients.ndim - 1
    n = coefficients.shape[0]
    vectors = numpy.asarray(battery, dtype=float)[:, :degree, :n]
    if degree == 1:
        values = numpy.einsum('kp,tk->tp', coefficients, vectors[:, 0])
    elif degree == 2:
        values = numpy.einsum('jkp,tj,tk->tp', coefficients, vectors[:, 0], vectors[:, 1])
    else:
        raise PreconditionError(f'coefficient arrays of degree {degree} are not supported')
    return numpy.max(numpy.abs(values), axis=0)


def _battery_arrays(values: [Any], size: int) -> numpy.ndarray:
    return numpy.stack([to_array(value, size).reshape(-1, size) for value in values], axis=0)


def form_residual(
    first: Form, second: Form, point: PhasePoint, battery: Sequence[Sequence[Any]]
) -> numpy.ndarray:
    """
    largest difference of two forms over a battery, relative to `max(1, largest value of the first)`

    :param first: reference form
    :param second: form expected to equal it, or `None` for zero
    :param point: phase point (possibly batched)
    :param battery: tuples of tangent vectors
    :return: one value per batched point
    """

    size = point.size
    reference = _battery_arrays(first.evaluate_battery(point, battery), size)
    scale = numpy.maximum(1.0, numpy.max(numpy.abs(reference), axis=(0, 1)))
    if second is None:
        return numpy.max(numpy.abs(reference), axis=(0, 1)) / scale
    other = _battery_arrays(second.evaluate_battery(point, battery), size)
    return numpy.max(numpy.abs(reference - other), axis=(0, 1)) / scale
