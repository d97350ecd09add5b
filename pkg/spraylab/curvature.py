"""
curvature apparatus of a spray: connection, Jacobi endomorphism, curvature, isotropy, and the curvature 1-form

Every object has a coordinate fast path built from derivatives of the spray coefficients `Gⁱ`,
and the connection-level objects also have their Frölicher-Nijenhuis definitions for cross-validation.
"""

from typing import Callable, Sequence

import numpy

from spraylab.base import LinearCombination
from spraylab.calculus import (
    ScalarField,
    SemiBasicForm,
    VectorValuedForm,
    compose,
    coordinate_vector,
    d_K,
    derivative,
    fn_bracket,
    identity,
    vertical_endomorphism,
)
from spraylab.finsler import SprayData
from spraylab.jets import Scalar
from spraylab.points import PhasePoint, to_array
from spraylab.utilities import get_logger

LOGGER = get_logger('spraylab.curvature')


def _transpose(columns: Sequence[Sequence[Scalar]]) -> tuple:
    return tuple(tuple(column[row] for column in columns) for row in range(len(columns[0])))


def connection_coefficients(spray: SprayData, point: PhasePoint) -> tuple:
    """
    nonlinear connection `Nⁱⱼ = ∂Gⁱ/∂yʲ`

    :return: nested tuple indexed `[i][j]`
    """

    n = spray.dimension
    columns = [
        _as_tuple(derivative(spray.coefficients, point, coordinate_vector(n, n + column)), n)
        for column in range(n)
    ]
    return _transpose(columns)


def _as_tuple(value, length: int) -> tuple:
    # derivatives of coefficient-free sprays collapse to a plain zero
    if isinstance(value, tuple):
        return value
    return (value,) * length


def horizontal_directions(connection: Sequence[Sequence[Scalar]]) -> [tuple]:
    """ horizontal lifts `δ/δxᵏ = ∂/∂xᵏ − Nˡₖ∂/∂yˡ` of the coordinate vectors """
    n = len(connection)
    directions = []
    for column in range(n):
        base = [0.0] * n
        base[column] = 1.0
        directions.append(tuple(base) + tuple(-connection[row][column] for row in range(n)))
    return directions


def jacobi_coefficients(spray: SprayData, point: PhasePoint) -> tuple:
    """
    Jacobi endomorphism `Φⁱⱼ = 2∂Gⁱ/∂xʲ − S(Nⁱⱼ) − NⁱₖNᵏⱼ`

    :return: nested tuple indexed `[i][j]`
    """

    n = spray.dimension
    connection = connection_coefficients(spray, point)
    vector = spray(point)

    gradients = [
        _as_tuple(derivative(spray.coefficients, point, coordinate_vector(n, column)), n)
        for column in range(n)
    ]
    transported = [
        _as_tuple(derivative(spray.coefficients, point, coordinate_vector(n, n + column), vector), n)
        for column in range(n)
    ]

    rows = []
    for row in range(n):
        entries = []
        for column in range(n):
            value = 2 * gradients[column][row] - transported[column][row]
            for index in range(n):
                value = value - connection[row][index] * connection[index][column]
            entries.append(value)
        rows.append(tuple(entries))
    return tuple(rows)


def curvature_coefficients(spray: SprayData, point: PhasePoint) -> tuple:
    """
    curvature `Rⁱⱼₖ = δNⁱⱼ/δxᵏ − δNⁱₖ/δxʲ`

    :return: nested tuple indexed `[i][j][k]`
    """

    n = spray.dimension
    directions = horizontal_directions(connection_coefficients(spray, point))

    # transported[k][j][i] = δₖ Nⁱⱼ
    transported = [
        [
            _as_tuple(derivative(spray.coefficients, point, coordinate_vector(n, n + column), direction), n)
            for column in range(n)
        ]
        for direction in directions
    ]
    return tuple(
        tuple(
            tuple(transported[k][j][i] - transported[j][k][i] for k in range(n)) for j in range(n)
        )
        for i in range(n)
    )


def isotropy_coefficients(jacobi: Sequence[Sequence[Scalar]], fiber: Sequence[Scalar]) -> (Scalar, tuple):
    """
    Ricci scalar `ρ = Tr Φ / (n − 1)` and the least-squares `αⱼ` of `Φⁱⱼ = ρδⁱⱼ − αⱼyⁱ`

    :param jacobi: `Φⁱⱼ`
    :param fiber: fiber coordinates `y`
    :return: `ρ` and `(α₁..αₙ)`, generic over scalars
    """

    n = len(fiber)
    trace = 0.0
    for index in range(n):
        trace = trace + jacobi[index][index]
    rho = trace / (n - 1)

    norm = 0.0
    for value in fiber:
        norm = norm + value * value

    alpha = []
    for column in range(n):
        total = 0.0
        for row in range(n):
            entry = rho - jacobi[row][column] if row == column else -jacobi[row][column]
            total = total + fiber[row] * entry
        alpha.append(total / norm)
    return rho, tuple(alpha)


def isotropy_residual(
    jacobi: numpy.ndarray, rho: numpy.ndarray, alpha: numpy.ndarray, fiber: numpy.ndarray
) -> numpy.ndarray:
    """
    `max |Φⁱⱼ − ρδⁱⱼ + αⱼyⁱ| / max(1, max |Φ|)` per point

    :param jacobi: array `[i, j, point]`
    :param rho: array `[point]`
    :param alpha: array `[j, point]`
    :param fiber: array `[i, point]`
    """

    n = jacobi.shape[0]
    model = rho[None, None, :] * numpy.eye(n)[:, :, None] - alpha[None, :, :] * fiber[:, None, :]
    scale = numpy.maximum(1.0, numpy.max(numpy.abs(jacobi), axis=(0, 1)))
    return numpy.max(numpy.abs(jacobi - model), axis=(0, 1)) / scale


def semi_basic_differentials(
    spray: SprayData, coefficients: Callable[[PhasePoint], Sequence[Scalar]], point: PhasePoint
) -> (tuple, tuple):
    """
    `d_Jω` and `d_hω` of a semi-basic 1-form `ω = ωₖdxᵏ`, from one Jacobian of its coefficients

    `(d_Jω)ⱼₖ = ∂ωₖ/∂yʲ − ∂ωⱼ/∂yᵏ` and `(d_hω)ⱼₖ = δⱼωₖ − δₖωⱼ` with `δⱼ = ∂/∂xʲ − Nˡⱼ∂/∂yˡ`

    :param spray: spray defining the horizontal projector
    :param coefficients: map from a phase point to `(ω₁..ωₙ)`
    :param point: phase point
    :return: nested tuples indexed `[j][k]`
    """

    n = spray.dimension
    connection = connection_coefficients(spray, point)
    # jacobian[a][k] = ∂ωₖ along coordinate `a` of TM
    jacobian = [
        _as_tuple(derivative(coefficients, point, coordinate_vector(n, index)), n)
        for index in range(2 * n)
    ]
    vertical = jacobian[n:]
    transported = [
        tuple(
            jacobian[row][column]
            - _sum(connection[index][row] * vertical[index][column] for index in range(n))
            for column in range(n)
        )
        for row in range(n)
    ]
    d_j = tuple(
        tuple(vertical[row][column] - vertical[column][row] for column in range(n))
        for row in range(n)
    )
    d_h = tuple(
        tuple(transported[row][column] - transported[column][row] for column in range(n))
        for row in range(n)
    )
    return d_j, d_h


def horizontal_differential(
    spray: SprayData, function: Callable[[PhasePoint], Scalar], point: PhasePoint
) -> tuple:
    """ coefficients `δₖf` of `d_hf` """
    return tuple(
        derivative(function, point, direction)
        for direction in horizontal_directions(connection_coefficients(spray, point))
    )


def vertical_differential(function: Callable[[PhasePoint], Scalar], point: PhasePoint) -> tuple:
    """ coefficients `∂f/∂yᵏ` of `d_Jf` """
    n = point.dimension
    return tuple(derivative(function, point, coordinate_vector(n, n + index)) for index in range(n))


class CurvaturePack:
    """ connection, curvature, and curvature 1-form of one spray, as forms on T₀M """

    def __init__(self, spray: SprayData):
        self.spray = spray
        self.dimension = spray.dimension
        n = self.dimension
        zeros = (0.0,) * n

        def horizontal(point: PhasePoint, vector: Sequence[Scalar]) -> tuple:
            connection = self.connection_coefficients(point)
            return tuple(vector[:n]) + tuple(
                -_contract(connection[row], vector[:n]) for row in range(n)
            )

        def vertical(point: PhasePoint, vector: Sequence[Scalar]) -> tuple:
            connection = self.connection_coefficients(point)
            return zeros + tuple(
                vector[n + row] + _contract(connection[row], vector[:n]) for row in range(n)
            )

        def jacobi(point: PhasePoint, vector: Sequence[Scalar]) -> tuple:
            coefficients = self.jacobi_coefficients(point)
            return zeros + tuple(_contract(coefficients[row], vector[:n]) for row in range(n))

        def curvature(point: PhasePoint, first: Sequence[Scalar], second: Sequence[Scalar]) -> tuple:
            coefficients = self.curvature_coefficients(point)
            return zeros + tuple(
                _bilinear(coefficients[row], first[:n], second[:n]) for row in range(n)
            )

        name = spray.name
        self.horizontal = VectorValuedForm(n, 1, horizontal, name=f'h[{name}]')
        self.vertical = VectorValuedForm(n, 1, vertical, name=f'v[{name}]')
        self.jacobi = VectorValuedForm(n, 1, jacobi, name=f'Φ[{name}]', semi_basic=True)
        self.curvature = VectorValuedForm(n, 2, curvature, name=f'R[{name}]', semi_basic=True)
        self.ricci_scalar = ScalarField(n, self.ricci_scalar_at, name=f'ρ[{name}]')
        self.alpha = SemiBasicForm(n, 1, self.alpha_coefficients, name=f'α[{name}]')
        self.xi = SemiBasicForm(n, 1, self.xi_coefficients, name=f'ξ[{name}]')
        self.d_J_xi = SemiBasicForm(
            n, 2, lambda point: self.xi_derivatives(point)[0], name=f'd_J ξ[{name}]'
        )
        self.d_h_xi = SemiBasicForm(
            n, 2, lambda point: self.xi_derivatives(point)[1], name=f'd_h ξ[{name}]'
        )

    def connection_coefficients(self, point: PhasePoint) -> tuple:
        return connection_coefficients(self.spray, point)

    def jacobi_coefficients(self, point: PhasePoint) -> tuple:
        return jacobi_coefficients(self.spray, point)

    def curvature_coefficients(self, point: PhasePoint) -> tuple:
        return curvature_coefficients(self.spray, point)

    def isotropy_coefficients(self, point: PhasePoint) -> (Scalar, tuple):
        return isotropy_coefficients(self.jacobi_coefficients(point), point.y)

    def ricci_scalar_at(self, point: PhasePoint) -> Scalar:
        return self.isotropy_coefficients(point)[0]

    def alpha_coefficients(self, point: PhasePoint) -> tuple:
        return self.isotropy_coefficients(point)[1]

    def isotropy(self, point: PhasePoint) -> (numpy.ndarray, numpy.ndarray, numpy.ndarray):
        """
        isotropy decomposition `Φ = ρJ − α⊗𝒞` as floats

        :return: `ρ` per point, `α` as `[j, point]`, and the normalized residual per point
        """

        size = point.size
        jacobi = self.jacobi_coefficients(point)
        rho, alpha = isotropy_coefficients(jacobi, point.y)
        rho = to_array(rho, size)
        alpha = to_array(alpha, size)
        residual = isotropy_residual(to_array(jacobi, size), rho, alpha, to_array(point.y, size))
        return rho, alpha, residual

    def xi_coefficients(self, point: PhasePoint) -> tuple:
        """ `ξₖ = (αₖ + ∂ρ/∂yᵏ) / 3` """
        n = self.dimension
        _, alpha = self.isotropy_coefficients(point)
        return tuple(
            (alpha[index] + derivative(self.ricci_scalar_at, point, coordinate_vector(n, n + index))) / 3
            for index in range(n)
        )

    def xi_derivatives(self, point: PhasePoint) -> (tuple, tuple):
        """ coefficients `[j][k]` of `d_Jξ` and `d_hξ` """
        return semi_basic_differentials(self.spray, self.xi_coefficients, point)

    def fn_horizontal_projector(self) -> VectorValuedForm:
        """ `h = ½(Id − [S, J])` """
        n = self.dimension
        return LinearCombination(
            [(0.5, identity(n)), (-0.5, fn_bracket(self.spray.spray, vertical_endomorphism(n)))],
            name=f'½(Id − [S, J])[{self.spray.name}]',
        )

    def fn_vertical_projector(self) -> VectorValuedForm:
        """ `v = ½(Id + [S, J])` """
        n = self.dimension
        return LinearCombination(
            [(0.5, identity(n)), (0.5, fn_bracket(self.spray.spray, vertical_endomorphism(n)))],
            name=f'½(Id + [S, J])[{self.spray.name}]',
        )

    def fn_jacobi_endomorphism(self) -> VectorValuedForm:
        """ `Φ = v∘[S, h]` """
        return compose(self.vertical, fn_bracket(self.spray.spray, self.horizontal))

    def fn_curvature_tensor(self) -> VectorValuedForm:
        """ `R = ½[h, h]` """
        return LinearCombination(
            [(0.5, fn_bracket(self.horizontal, self.horizontal))], name=f'½[h, h][{self.spray.name}]'
        )

    def fn_curvature_one_form(self) -> LinearCombination:
        """ `ξ = (α + d_Jρ)/3` through the derivation `d_J` """
        d_j_rho = d_K(vertical_endomorphism(self.dimension), self.ricci_scalar)
        return LinearCombination(
            [(1 / 3, self.alpha), (1 / 3, d_j_rho)], name=f'(α + d_J ρ)/3[{self.spray.name}]'
        )

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.spray!r})'


def _sum(terms) -> Scalar:
    total = 0.0
    for term in terms:
        total = total + term
    return total


def _contract(row: Sequence[Scalar], vector: Sequence[Scalar]) -> Scalar:
    return _sum(entry * component for entry, component in zip(row, vector))


def _bilinear(matrix: Sequence[Sequence[Scalar]], first: Sequence[Scalar], second: Sequence[Scalar]) -> Scalar:
    return _sum(_contract(matrix[row], second) * first[row] for row in range(len(first)))


def connection(spray: SprayData) -> (VectorValuedForm, VectorValuedForm):
    """ horizontal and vertical projectors `(h, v)` of a spray """
    pack = CurvaturePack(spray)
    return pack.horizontal, pack.vertical


def jacobi_endomorphism(spray: SprayData) -> VectorValuedForm:
    return CurvaturePack(spray).jacobi


def curvature_tensor(spray: SprayData) -> VectorValuedForm:
    return CurvaturePack(spray).curvature


def isotropy_decompose(spray: SprayData, point: PhasePoint) -> (numpy.ndarray, numpy.ndarray, numpy.ndarray):
    """
    `ρ`, `α`, and the isotropy residual at a (batched) point

    :param spray: spray
    :param point: phase point
    """

    return CurvaturePack(spray).isotropy(point)


def curvature_one_form(spray: SprayData) -> SemiBasicForm:
    """ curvature 1-form `ξ = (α + d_Jρ)/3` """
    return CurvaturePack(spray).xi
