"""
classical coordinate formulas of Riemannian geometry, evaluated with floats and central differences

These serve as independent oracles for the jet-based pipeline.
"""

from typing import Callable

import numpy

from spraylab.catalog import ExpressionSpec, MetricSpec

FIRST_DERIVATIVE_STEP = 1e-5
SECOND_DERIVATIVE_STEP = 1e-4


def central_difference(function: Callable[[numpy.ndarray], numpy.ndarray], x: numpy.ndarray, step: float = FIRST_DERIVATIVE_STEP) -> numpy.ndarray:
    """
    gradient of an array-valued function by central differences

    :param function: map from an `n`-vector to an array of any shape
    :param x: evaluation point
    :param step: difference step
    :return: array of shape `(n, *shape)`, indexed by the differentiation variable first
    """

    x = numpy.asarray(x, dtype=float)
    derivatives = []
    for index in range(len(x)):
        offset = numpy.zeros_like(x)
        offset[index] = step
        derivatives.append(
            (numpy.asarray(function(x + offset)) - numpy.asarray(function(x - offset))) / (2 * step)
        )
    return numpy.stack(derivatives, axis=0)


def riemannian_metric(metric: MetricSpec) -> Callable[[numpy.ndarray], numpy.ndarray]:
    """
    coefficient matrix `g(x)` of a Riemannian metric, by polarization of the quadratic form `F²`

    :param metric: metric with `F² = gᵢⱼ(x)yⁱyʲ`
    :return: map from base coordinates to the `n × n` matrix
    """

    n = metric.dimension
    identity = numpy.eye(n)

    def squared(x: numpy.ndarray, y: numpy.ndarray) -> float:
        return float(metric(tuple(x), tuple(y))) ** 2

    def tensor(x: numpy.ndarray) -> numpy.ndarray:
        matrix = numpy.zeros((n, n))
        for row in range(n):
            matrix[row, row] = squared(x, identity[row])
            for column in range(row):
                value = 0.5 * (
                    squared(x, identity[row] + identity[column])
                    - squared(x, identity[row])
                    - squared(x, identity[column])
                )
                matrix[row, column] = value
                matrix[column, row] = value
        return matrix

    return tensor


def christoffel_symbols(
    tensor: Callable[[numpy.ndarray], numpy.ndarray], x: numpy.ndarray, step: float = FIRST_DERIVATIVE_STEP
) -> numpy.ndarray:
    """
    Christoffel symbols `Γⁱⱼₖ = ½ gⁱˡ (∂ⱼgₗₖ + ∂ₖgₗⱼ − ∂ₗgⱼₖ)`

    :param tensor: metric coefficients as a function of base coordinates
    :param x: base point
    :param step: difference step
    :return: array indexed `[i, j, k]`
    """

    gradient = central_difference(tensor, x, step)  # [l, a, b] = ∂ₗ g_ab
    inverse = numpy.linalg.inv(tensor(numpy.asarray(x, dtype=float)))
    lowered = 0.5 * (
        numpy.einsum('jlk->ljk', gradient) + numpy.einsum('klj->ljk', gradient) - gradient
    )
    return numpy.einsum('il,ljk->ijk', inverse, lowered)


def conformal_christoffel_symbols(gradient: numpy.ndarray) -> numpy.ndarray:
    """
    Christoffel symbols of `g = e^{2σ} δ`, `Γⁱⱼₖ = δⁱⱼσₖ + δⁱₖσⱼ − δⱼₖσⁱ`

    :param gradient: `∂σ` at the point
    """

    gradient = numpy.asarray(gradient, dtype=float)
    identity = numpy.eye(len(gradient))
    return (
        numpy.einsum('ij,k->ijk', identity, gradient)
        + numpy.einsum('ik,j->ijk', identity, gradient)
        - numpy.einsum('jk,i->ijk', identity, gradient)
    )


def poincare_christoffel_symbols(x: numpy.ndarray) -> numpy.ndarray:
    """ Christoffel symbols of the Poincaré ball, `σ = log 2 − log(1 − |x|²)` """
    x = numpy.asarray(x, dtype=float)
    return conformal_christoffel_symbols(2 * x / (1 - numpy.dot(x, x)))


def geodesic_coefficients(symbols: numpy.ndarray, y: numpy.ndarray) -> numpy.ndarray:
    """ `Gⁱ = ½ Γⁱⱼₖ yʲyᵏ` """
    y = numpy.asarray(y, dtype=float)
    return 0.5 * numpy.einsum('ijk,j,k->i', symbols, y, y)


def riemann_tensor(
    tensor: Callable[[numpy.ndarray], numpy.ndarray],
    x: numpy.ndarray,
    step: float = SECOND_DERIVATIVE_STEP,
) -> numpy.ndarray:
    """
    components `Rⁱⱼₖₗ` of `R(∂ₖ, ∂ₗ)∂ⱼ = ∂ₖΓⁱₗⱼ − ∂ₗΓⁱₖⱼ + ΓⁱₖₘΓᵐₗⱼ − ΓⁱₗₘΓᵐₖⱼ`

    :param tensor: metric coefficients as a function of base coordinates
    :param x: base point
    :param step: difference step of the outer derivative
    """

    symbols = christoffel_symbols(tensor, x)
    gradient = central_difference(lambda point: christoffel_symbols(tensor, point), x, step)  # [k, i, l, j]
    return (
        numpy.einsum('kilj->ijkl', gradient)
        - numpy.einsum('likj->ijkl', gradient)
        + numpy.einsum('ikm,mlj->ijkl', symbols, symbols)
        - numpy.einsum('ilm,mkj->ijkl', symbols, symbols)
    )


def sectional_curvature(
    tensor: Callable[[numpy.ndarray], numpy.ndarray],
    x: numpy.ndarray,
    u: numpy.ndarray,
    v: numpy.ndarray,
) -> float:
    """
    sectional curvature `⟨R(u, v)v, u⟩ / (|u|²|v|² − ⟨u, v⟩²)` of the plane spanned by `u` and `v`
    """

    x = numpy.asarray(x, dtype=float)
    u = numpy.asarray(u, dtype=float)
    v = numpy.asarray(v, dtype=float)
    metric = tensor(x)
    curvature = numpy.einsum('ijkl,j,k,l->i', riemann_tensor(tensor, x), v, u, v)
    numerator = float(u @ metric @ curvature)
    denominator = float((u @ metric @ u) * (v @ metric @ v) - (u @ metric @ v) ** 2)
    return numerator / denominator


def gauss_curvature(tensor: Callable[[numpy.ndarray], numpy.ndarray], x: numpy.ndarray) -> float:
    """ Gauss curvature of a surface metric """
    return sectional_curvature(tensor, x, [1.0, 0.0], [0.0, 1.0])


def finite_difference_spray(metric: MetricSpec, x: numpy.ndarray, y: numpy.ndarray, step: float = SECOND_DERIVATIVE_STEP) -> numpy.ndarray:
    """
    geodesic spray coefficients `Gⁱ = ¼ gⁱˡ (yᵏ ∂²F²/∂xᵏ∂yˡ − ∂F²/∂xˡ)` by central differences of `F²`

    :param metric: Finsler metric
    :param x: base coordinates
    :param y: fiber coordinates
    :param step: difference step
    """

    x = numpy.asarray(x, dtype=float)
    y = numpy.asarray(y, dtype=float)

    def squared(base: numpy.ndarray, fiber: numpy.ndarray) -> float:
        return float(metric(tuple(base), tuple(fiber))) ** 2

    def fiber_gradient(base: numpy.ndarray, fiber: numpy.ndarray) -> numpy.ndarray:
        return central_difference(lambda value: squared(base, value), fiber, step)

    tensor = 0.5 * central_difference(lambda fiber: fiber_gradient(x, fiber), y, step)
    mixed = central_difference(lambda base: fiber_gradient(base, y), x, step)  # [k, l]
    gradient = central_difference(lambda base: squared(base, y), x, step)
    rhs = numpy.einsum('k,kl->l', y, mixed) - gradient
    return 0.25 * numpy.linalg.solve(0.5 * (tensor + tensor.T), rhs)


def classical_hamel_residual(
    factor: ExpressionSpec, x: numpy.ndarray, y: numpy.ndarray, step: float = SECOND_DERIVATIVE_STEP
) -> numpy.ndarray:
    """
    Hamel expressions `yᵏ ∂²P/∂xᵏ∂yⁱ − ∂P/∂xⁱ` of a factor against the flat spray, by central differences

    :param factor: projective factor `P`
    :param x: base coordinates
    :param y: fiber coordinates
    :param step: difference step
    :return: one value per index `i`
    """

    x = numpy.asarray(x, dtype=float)
    y = numpy.asarray(y, dtype=float)

    def value(base: numpy.ndarray, fiber: numpy.ndarray) -> float:
        return float(factor(tuple(base), tuple(fiber)))

    mixed = central_difference(
        lambda base: central_difference(lambda fiber: value(base, fiber), y, step), x, step
    )  # [k, i]
    gradient = central_difference(lambda base: value(base, y), x, step)
    return numpy.einsum('k,ki->i', y, mixed) - gradient
