from abc import ABC, abstractmethod
from typing import Any, Sequence

from spraylab.points import PhasePoint


class PreconditionError(Exception):
    pass


class Form(ABC):
    """
    alternating multilinear map on tangent vectors of T₀M, evaluated pointwise

    Scalar fields and vector fields are the degree-0 members of the family.
    Evaluators are written against generic scalars (floats, batched arrays, jets) so any form can be differentiated.
    """

    vector_valued: bool = False

    def __init__(
        self,
        dimension: int,
        degree: int,
        name: str = None,
        semi_basic: bool = False,
        constant: bool = False,
    ):
        """
        :param dimension: dimension `n` of the base manifold (tangent vectors of TM have `2n` components)
        :param degree: number of vector arguments
        :param name: label used in reports and logs
        :param semi_basic: whether the form vanishes on vertical arguments (and, if vector-valued, takes vertical values)
        :param constant: whether the values are independent of the point
        """

        self.dimension = dimension
        self.degree = degree
        self.name = name if name is not None else self.__class__.__name__
        self.semi_basic = semi_basic
        self.constant = constant

    @abstractmethod
    def evaluate(self, point: PhasePoint, *vectors: Sequence[Any]) -> Any:
        """
        value at a point on the given tangent vectors

        :param point: phase point (possibly batched or jet-valued)
        :param vectors: `degree` tangent vectors with `2n` components each
        :return: scalar, or tuple of `2n` scalars for vector-valued forms
        """

        raise NotImplementedError

    def evaluate_battery(self, point: PhasePoint, battery: Sequence[Sequence[Any]]) -> [Any]:
        """
        values on every vector tuple of a test battery

        :param point: phase point
        :param battery: tuples of `degree` tangent vectors
        :return: one value per tuple
        """

        if self.degree == 0:
            value = self(point)
            return [value for _ in battery]
        return [self(point, *vectors) for vectors in battery]

    def __call__(self, point: PhasePoint, *vectors: Sequence[Any]) -> Any:
        if len(vectors) != self.degree:
            raise PreconditionError(
                f'{self.name} has degree {self.degree}, but received {len(vectors)} vector(s)'
            )
        return self.evaluate(point, *vectors)

    def __add__(self, other: 'Form') -> 'Form':
        return LinearCombination([(1.0, self), (1.0, other)])

    def __sub__(self, other: 'Form') -> 'Form':
        return LinearCombination([(1.0, self), (-1.0, other)])

    def __neg__(self) -> 'Form':
        return LinearCombination([(-1.0, self)])

    def __mul__(self, coefficient: float) -> 'Form':
        return LinearCombination([(float(coefficient), self)])

    def __rmul__(self, coefficient: float) -> 'Form':
        return self.__mul__(coefficient)

    def __repr__(self) -> str:
        kind = 'vector-valued' if self.vector_valued else 'scalar'
        return f'{self.__class__.__name__}({self.name!r}, {kind}, degree={self.degree}, dimension={self.dimension})'


class LinearCombination(Form):
    """ constant-coefficient linear combination of forms of equal degree and kind """

    def __init__(self, terms: [(float, Form)], name: str = None):
        forms = [form for _, form in terms]
        first = forms[0]
        for form in forms[1:]:
            if (
                form.degree != first.degree
                or form.vector_valued != first.vector_valued
                or form.dimension != first.dimension
            ):
                raise PreconditionError(f'cannot combine {first!r} with {form!r}')

        if name is None:
            name = ' + '.join(
                f'{coefficient:g}*{form.name}' if coefficient != 1 else form.name
                for coefficient, form in terms
            )
        super().__init__(
            first.dimension,
            first.degree,
            name,
            semi_basic=all(form.semi_basic for form in forms),
            constant=all(form.constant for form in forms),
        )
        self.vector_valued = first.vector_valued
        self.terms = terms

    def evaluate(self, point: PhasePoint, *vectors: Sequence[Any]) -> Any:
        total = None
        for coefficient, form in self.terms:
            value = scale_values(coefficient, form(point, *vectors))
            total = value if total is None else add_values(total, value)
        return total

    def evaluate_battery(self, point: PhasePoint, battery: Sequence[Sequence[Any]]) -> [Any]:
        totals = None
        for coefficient, form in self.terms:
            values = [scale_values(coefficient, value) for value in form.evaluate_battery(point, battery)]
            totals = (
                values
                if totals is None
                else [add_values(total, value) for total, value in zip(totals, values)]
            )
        return totals


def add_values(first: Any, second: Any) -> Any:
    if isinstance(first, tuple):
        return tuple(add_values(a, b) for a, b in zip(first, second))
    return first + second


def subtract_values(first: Any, second: Any) -> Any:
    if isinstance(first, tuple):
        return tuple(subtract_values(a, b) for a, b in zip(first, second))
    return first - second


def scale_values(coefficient: Any, value: Any) -> Any:
    if isinstance(value, tuple):
        return tuple(scale_values(coefficient, entry) for entry in value)
    if isinstance(coefficient, float) and coefficient == 1.0:
        return value
    return coefficient * value
