from typing import Callable, Sequence, Union

import numpy

from spraylab.calculus import (
    VectorField,
    coordinate_vector,
    derivative,
    liouville,
    lie_bracket,
)
from spraylab.catalog import MetricSpec, describe
from spraylab.jets import Scalar
from spraylab.model import (
    EXCLUDED_CONDITION_NUMBER,
    HOMOGENEITY_SCALINGS,
    HOMOGENEITY_TOLERANCE,
    IDENTITY_TOLERANCE,
    METRIC_HOMOGENEITY_TOLERANCE,
)
from spraylab.points import PhasePoint, as_batch, to_array
from spraylab.reports import CheckReport, threshold_verdict, Verdict
from spraylab.utilities import get_logger

LOGGER = get_logger('spraylab.finsler')

# eigenvalues of `g` below this fraction of the largest count as vanishing
SINGULARITY_THRESHOLD = 1e-12


class NotFinslerError(Exception):
    pass


class SprayData:
    """ spray `S = yⁱ∂/∂xⁱ − 2Gⁱ∂/∂yⁱ` together with its coefficient functions `Gⁱ` """

    def __init__(
        self,
        dimension: int,
        coefficients: Callable[[PhasePoint], Sequence[Scalar]],
        source: str,
        name: str = None,
        metric: MetricSpec = None,
    ):
        """
        :param dimension: dimension `n` of the base manifold
        :param coefficients: map from a phase point to the `n` spray coefficients `Gⁱ`, generic over scalars
        :param source: how the spray was obtained (`geodesic`, `deformed`, `flat`, `coefficients`)
        :param name: label used in reports
        :param metric: metric whose geodesic spray this is, if any
        """

        if name is None:
            name = metric.name if metric is not None else source

        self.dimension = dimension
        self.source = source
        self.name = name
        self.metric = metric
        self.__coefficients = coefficients

        self.spray = VectorField(dimension, self.__vector, name=f'S[{name}]')

    def coefficients(self, point: PhasePoint) -> tuple:
        values = tuple(self.__coefficients(point))
        if len(values) != self.dimension:
            raise ValueError(
                f'spray {self.name} returned {len(values)} coefficients in dimension {self.dimension}'
            )
        return values

    def __vector(self, point: PhasePoint) -> tuple:
        return tuple(point.y) + tuple(-2 * value for value in self.coefficients(point))

    def __call__(self, point: PhasePoint) -> tuple:
        return self.spray(point)

    @property
    def description(self) -> {str: object}:
        description = {'name': self.name, 'source': self.source, 'dimension': self.dimension}
        if self.metric is not None:
            description['metric'] = describe(self.metric)
        return description

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.name!r}, source={self.source!r}, dimension={self.dimension})'


def energy(metric: MetricSpec) -> Callable[[PhasePoint], Scalar]:
    """ `F²` as a function of phase points """

    def squared(point: PhasePoint) -> Scalar:
        value = metric.evaluate(point)
        return value * value

    return squared


def fundamental_tensor(metric: MetricSpec, point: PhasePoint) -> tuple:
    """
    fundamental tensor `gᵢⱼ = ½ ∂²F²/∂yⁱ∂yʲ`, generic over scalars

    :param metric: Finsler metric
    :param point: phase point (possibly batched or jet-valued)
    :return: symmetric `n × n` nested tuple
    """

    n = metric.dimension
    squared = energy(metric)
    entries = {}
    for row in range(n):
        for column in range(row, n):
            entries[row, column] = 0.5 * derivative(
                squared,
                point,
                coordinate_vector(n, n + row),
                coordinate_vector(n, n + column),
            )
    return tuple(
        tuple(entries[min(row, column), max(row, column)] for column in range(n)) for row in range(n)
    )


def solve_positive_definite(matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> tuple:
    """
    solve `A w = b` by Gaussian elimination without pivoting

    Sound for positive-definite `A`, and free of data-dependent branches, so jets and batches pass through.

    :param matrix: `n × n` nested sequence
    :param rhs: `n` entries
    :return: solution `w`
    """

    n = len(rhs)
    rows = [list(matrix[index]) + [rhs[index]] for index in range(n)]
    for pivot in range(n):
        for row in range(pivot + 1, n):
            factor = rows[row][pivot] / rows[pivot][pivot]
            for column in range(pivot, n + 1):
                rows[row][column] = rows[row][column] - factor * rows[pivot][column]

    solution = [0.0] * n
    for row in reversed(range(n)):
        total = rows[row][n]
        for column in range(row + 1, n):
            total = total - rows[row][column] * solution[column]
        solution[row] = total / rows[row][row]
    return tuple(solution)


def metric_tensor(
    metric: MetricSpec, point: PhasePoint, strict: bool = True
) -> (numpy.ndarray, numpy.ndarray, numpy.ndarray):
    """
    fundamental tensor as floats, with its inverse and condition number

    :param metric: Finsler metric
    :param point: phase point (possibly batched)
    :param strict: raise on singular or indefinite tensors
    :return: arrays of shape `(size, n, n)`, `(size, n, n)`, and `(size,)`
    """

    size = point.size
    tensor = numpy.moveaxis(to_array(fundamental_tensor(metric, point), size), -1, 0)

    eigenvalues = numpy.linalg.eigvalsh(tensor)
    scale = numpy.maximum(numpy.max(numpy.abs(eigenvalues), axis=-1), 1e-300)
    degenerate = eigenvalues[:, 0] <= SINGULARITY_THRESHOLD * scale
    if strict and numpy.any(degenerate):
        raise NotFinslerError(
            f'{metric.name} is not a Finsler metric at {numpy.count_nonzero(degenerate)} of {size} points '
            f'(fundamental tensor singular or indefinite, e.g. at {point[int(numpy.argmax(degenerate))]})'
        )

    with numpy.errstate(divide='ignore', invalid='ignore'):
        condition = numpy.linalg.cond(tensor)
    inverse = numpy.full_like(tensor, numpy.nan)
    invertible = ~degenerate
    if numpy.any(invertible):
        inverse[invertible] = numpy.linalg.inv(tensor[invertible])
    condition = numpy.where(degenerate, numpy.inf, condition)
    return tensor, inverse, condition


def spray_coefficients(metric: MetricSpec, point: PhasePoint) -> tuple:
    """
    geodesic spray coefficients `Gⁱ = ¼ gⁱˡ (yᵏ ∂²F²/∂xᵏ∂yˡ − ∂F²/∂xˡ)`, generic over scalars

    :param metric: Finsler metric
    :param point: phase point
    :return: `n` coefficients
    """

    n = metric.dimension
    squared = energy(metric)
    tensor = fundamental_tensor(metric, point)
    radial = tuple(point.y) + (0.0,) * n

    rhs = []
    for index in range(n):
        mixed = derivative(squared, point, radial, coordinate_vector(n, n + index))
        gradient = derivative(squared, point, coordinate_vector(n, index))
        rhs.append(mixed - gradient)

    return tuple(0.25 * value for value in solve_positive_definite(tensor, rhs))


def geodesic_spray(metric: MetricSpec) -> SprayData:
    """
    geodesic spray of a Finsler metric

    :param metric: Finsler metric
    :return: spray whose coefficients are computed from `F²` at every evaluation
    """

    LOGGER.debug(f'building geodesic spray of {metric.name} in dimension {metric.dimension}')
    return SprayData(
        metric.dimension,
        lambda point: spray_coefficients(metric, point),
        source='geodesic',
        name=metric.name,
        metric=metric,
    )


def spray_from_coefficients(
    dimension: int,
    coefficients: Callable[[PhasePoint], Sequence[Scalar]],
    name: str = None,
    source: str = 'coefficients',
) -> SprayData:
    return SprayData(dimension, coefficients, source=source, name=name)


def flat_spray(dimension: int) -> SprayData:
    """ spray of straight lines, `Gⁱ = 0` """
    zeros = (0.0,) * dimension
    return SprayData(dimension, lambda point: zeros, source='flat', name='flat')


def _scaled(point: PhasePoint, scaling: float) -> PhasePoint:
    return PhasePoint(point.x, tuple(scaling * value for value in point.y), check=False)


def finsler_axioms_check(
    metric: MetricSpec, sample: Union[PhasePoint, Sequence[PhasePoint]]
) -> CheckReport:
    """
    positivity, homogeneity, Euler identity, and positive-definiteness of `g` at sample points

    :param metric: metric to check
    :param sample: sample points
    :return: report with one verdict per axiom
    """

    points = as_batch(sample)
    size = points.size
    report = CheckReport('finsler axioms', describe(metric), points)

    values = to_array(metric.evaluate(points), size)
    report.add_column('F', values)

    homogeneity = numpy.zeros(size)
    for scaling in HOMOGENEITY_SCALINGS:
        scaled = to_array(metric.evaluate(_scaled(points, scaling)), size)
        homogeneity = numpy.maximum(
            homogeneity, numpy.abs(scaled - scaling * values) / numpy.maximum(scaling * numpy.abs(values), 1e-300)
        )
    report.add_column('homogeneity', homogeneity)

    tensor, _, condition = metric_tensor(metric, points, strict=False)
    eigenvalues = numpy.linalg.eigvalsh(tensor)
    report.add_column('min_eigenvalue', eigenvalues[:, 0])
    report.add_column('cond_g', condition)

    fiber = to_array(points.y, size).T
    euler = numpy.einsum('pi,pij,pj->p', fiber, tensor, fiber)
    report.add_column('euler', numpy.abs(euler - values ** 2) / numpy.maximum(values ** 2, 1e-300))

    scale = numpy.maximum(numpy.max(numpy.abs(eigenvalues), axis=-1), 1e-300)
    positive_definite = eigenvalues[:, 0] > SINGULARITY_THRESHOLD * scale
    report.add_column('excluded', ~positive_definite | (condition > EXCLUDED_CONDITION_NUMBER))

    report.add_verdict(
        Verdict('positivity', numpy.all(values > 0), float(numpy.min(values)), 0.0)
    )
    report.add_verdict(
        threshold_verdict('homogeneity', homogeneity, METRIC_HOMOGENEITY_TOLERANCE)
    )
    report.add_verdict(
        Verdict(
            'positive_definite',
            numpy.all(positive_definite),
            float(numpy.min(eigenvalues[:, 0])),
            0.0,
            note=None
            if numpy.all(positive_definite)
            else f'g singular or indefinite at {numpy.count_nonzero(~positive_definite)} of {size} points',
        )
    )
    report.add_verdict(
        threshold_verdict('euler', report.columns['euler'], IDENTITY_TOLERANCE, positive_definite)
    )

    if not report.passed:
        LOGGER.warning(f'{metric.name} fails the Finsler axioms: ' + ', '.join(
            verdict.name for verdict in report.verdicts if not verdict.passed
        ))
    return report


def spray_axioms_check(spray: SprayData, sample: Union[PhasePoint, Sequence[PhasePoint]]) -> CheckReport:
    """
    `JS = 𝒞`, `[𝒞, S] = S`, and `G(x, λy) = λ²G(x, y)` at sample points

    :param spray: spray to check
    :param sample: sample points
    """

    points = as_batch(sample)
    size = points.size
    n = spray.dimension
    report = CheckReport('spray axioms', spray.description, points)

    values = spray(points)
    magnitude = numpy.maximum(1.0, numpy.max(numpy.abs(to_array(values, size)), axis=0))

    # JS = 𝒞 compares the x-part of S with the fiber coordinates
    vertical = numpy.abs(to_array(values[:n], size) - to_array(points.y, size))
    report.add_column('JS_minus_C', numpy.max(vertical, axis=0) / magnitude)

    bracket = lie_bracket(liouville(n), spray.spray)(points)
    difference = to_array(bracket, size) - to_array(values, size)
    report.add_column('liouville_bracket', numpy.max(numpy.abs(difference), axis=0) / magnitude)

    coefficients = to_array(spray.coefficients(points), size)
    homogeneity = numpy.zeros(size)
    for scaling in HOMOGENEITY_SCALINGS:
        scaled = to_array(spray.coefficients(_scaled(points, scaling)), size)
        residual = numpy.max(numpy.abs(scaled - scaling ** 2 * coefficients), axis=0)
        homogeneity = numpy.maximum(
            homogeneity,
            residual / numpy.maximum(1.0, scaling ** 2 * numpy.max(numpy.abs(coefficients), axis=0)),
        )
    report.add_column('homogeneity', homogeneity)

    report.add_verdict(threshold_verdict('JS_equals_C', report.columns['JS_minus_C'], IDENTITY_TOLERANCE))
    report.add_verdict(
        threshold_verdict('liouville_bracket', report.columns['liouville_bracket'], IDENTITY_TOLERANCE)
    )
    report.add_verdict(threshold_verdict('homogeneity', homogeneity, HOMOGENEITY_TOLERANCE))
    return report


def recover_factor(spray: SprayData, deformed: SprayData, point: PhasePoint) -> (numpy.ndarray, numpy.ndarray):
    """
    projective factor `P` with `G̃ⁱ − Gⁱ = Pyⁱ`, by least squares over `i`

    :return: factor and the largest inconsistency over `i`, per point
    """

    size = point.size
    difference = to_array(deformed.coefficients(point), size) - to_array(spray.coefficients(point), size)
    fiber = to_array(point.y, size)
    factor = numpy.sum(difference * fiber, axis=0) / numpy.sum(fiber ** 2, axis=0)
    residual = numpy.max(numpy.abs(difference - factor * fiber), axis=0)
    return factor, residual


__all__ = [
    'NotFinslerError',
    'SprayData',
    'finsler_axioms_check',
    'flat_spray',
    'fundamental_tensor',
    'geodesic_spray',
    'metric_tensor',
    'solve_positive_definite',
    'spray_axioms_check',
    'spray_coefficients',
    'spray_from_coefficients',
]
