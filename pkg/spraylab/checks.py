"""
checks of the curvature conditions: constant flag curvature, the Bianchi-type identity, scalar flag curvature,
and the identity suite relating the coordinate objects to their bracket definitions
"""

from typing import Sequence, Union

import numpy

from spraylab.calculus import (
    PreconditionError,
    ScalarField,
    coefficient_norm,
    compose,
    d_K,
    derivative,
    fn_bracket,
    form_residual,
    identity,
    insert,
    liouville,
    multiply,
    tensor,
    vertical_endomorphism,
    wedge,
    wedge_vector,
)
from spraylab.catalog import MetricSpec, describe
from spraylab.curvature import CurvaturePack
from spraylab.finsler import SprayData, finsler_axioms_check, geodesic_spray, metric_tensor
from spraylab.jets import Scalar
from spraylab.model import (
    BATTERY_SIZE,
    CONNECTION_TOLERANCE,
    DEFAULT_POINTS,
    DEFAULT_SEED,
    EXCLUDED_CONDITION_NUMBER,
    HOMOGENEITY_TOLERANCE,
    Tolerances,
)
from spraylab.points import PhasePoint, as_batch, to_array
from spraylab.reports import CheckReport, Verdict, largest, threshold_verdict
from spraylab.sampling import sample_domain, sweep, vector_battery
from spraylab.utilities import get_logger

LOGGER = get_logger('spraylab.checks')

Sample = Union[PhasePoint, Sequence[PhasePoint]]


def _sample(metric: MetricSpec, sample: Sample, count: int, seed: int) -> PhasePoint:
    if sample is None:
        return sample_domain(metric.domain, metric.dimension, count, seed)
    return as_batch(sample)


def _configuration(points: PhasePoint, seed: int, tolerances: Tolerances, battery_size: int) -> {str: object}:
    return {
        'points': points.size,
        'seed': seed,
        'battery_size': battery_size,
        'tolerances': tolerances.to_dict(),
        'norm': f'max over {battery_size} seeded unit test-vector tuples, relative to max(1, scale)',
    }


def flag_curvature(pack: CurvaturePack, metric: MetricSpec) -> ScalarField:
    """ `κ = ρ/F²` as a function on T₀M """

    def kappa(point: PhasePoint) -> Scalar:
        value = metric.evaluate(point)
        return pack.ricci_scalar_at(point) / (value * value)

    return ScalarField(pack.dimension, kappa, name=f'κ[{metric.name}]')


def cc_check(
    metric: MetricSpec,
    sample: Sample = None,
    count: int = DEFAULT_POINTS,
    seed: int = DEFAULT_SEED,
    tolerances: Tolerances = None,
    battery_size: int = BATTERY_SIZE,
    threads: int = None,
) -> CheckReport:
    """
    the three conditions for constant flag curvature: isotropy, `d_Jξ = 0`, and `d_hξ = 0`, with the spread of `κ = ρ/F²`

    :param metric: Finsler metric
    :param sample: sample points (drawn from the metric's domain if not given)
    :param count: number of points to draw
    :param seed: seed of the sample and of the test-vector battery
    :param tolerances: tolerance ladder
    :param battery_size: number of test-vector tuples
    :param threads: threads of the point sweep
    :return: report with per-point residuals and one verdict per condition
    """

    if tolerances is None:
        tolerances = Tolerances()
    points = _sample(metric, sample, count, seed)
    n = metric.dimension
    report = CheckReport(
        'constant flag curvature',
        describe(metric),
        points,
        _configuration(points, seed, tolerances, battery_size),
    )

    axioms = finsler_axioms_check(metric, points)
    if not axioms.passed:
        report.merge(axioms, prefix='axioms')
        report.invalidate(f'{metric.name} fails the Finsler axioms on the sample')
        return report

    pack = CurvaturePack(geodesic_spray(metric))
    covector_battery = vector_battery(n, 1, battery_size, seed)
    pair_battery = vector_battery(n, 2, battery_size, seed)

    def measure(chunk: PhasePoint) -> {str: numpy.ndarray}:
        size = chunk.size
        rho, _, isotropy = pack.isotropy(chunk)
        xi = to_array(pack.xi_coefficients(chunk), size)
        d_j, d_h = pack.xi_derivatives(chunk)
        scale = numpy.maximum(1.0, coefficient_norm(xi, covector_battery))
        value = to_array(metric.evaluate(chunk), size)
        _, _, condition = metric_tensor(metric, chunk, strict=False)
        return {
            'isotropy_residual': isotropy,
            'd_J_xi': coefficient_norm(to_array(d_j, size), pair_battery) / scale,
            'd_h_xi': coefficient_norm(to_array(d_h, size), pair_battery) / scale,
            'rho': rho,
            'kappa': rho / value ** 2,
            'cond_g': condition,
        }

    for name, values in sweep(measure, points, threads).items():
        report.add_column(name, values)
    excluded = report.columns['cond_g'] > EXCLUDED_CONDITION_NUMBER
    report.add_column('excluded', excluded)
    if numpy.any(excluded):
        LOGGER.warning(
            f'excluding {numpy.count_nonzero(excluded)} points with cond(g) > {EXCLUDED_CONDITION_NUMBER:g}'
        )
    included = report.included

    isotropy_verdict = threshold_verdict(
        'isotropic',
        report.columns['isotropy_residual'],
        tolerances.curvature,
        included,
        note='automatic in dimension 2, where every spray is isotropic' if n == 2 else None,
        automatic=n == 2,
    )
    if largest(report.columns['isotropy_residual'], included) >= tolerances.curvature:
        report.add_note('isotropy residual above tolerance; ξ is formal at those points')
        LOGGER.warning(f'{metric.name} is not isotropic on the sample; ξ is formal')
    report.add_verdict(isotropy_verdict)

    report.add_verdict(threshold_verdict('d_J_xi', report.columns['d_J_xi'], tolerances.xi, included))

    d_h_verdict = threshold_verdict(
        'd_h_xi',
        report.columns['d_h_xi'],
        tolerances.xi,
        included,
        note='automatic in dimension > 2 for isotropic sprays' if n > 2 else None,
        automatic=n > 2,
    )
    if n > 2 and d_h_verdict.value >= tolerances.xi and isotropy_verdict.value < tolerances.curvature:
        report.add_note(
            f'internal-consistency failure: d_h ξ = {d_h_verdict.value:.3e} on an isotropic spray in dimension {n}'
        )
        LOGGER.warning(f'd_h ξ does not vanish on isotropic {metric.name} in dimension {n}')
    report.add_verdict(d_h_verdict)

    kappa = report.columns['kappa'][included]
    spread = float(numpy.std(kappa)) if kappa.size > 0 else 0.0
    report.add_verdict(Verdict('kappa_spread', spread < tolerances.xi, spread, tolerances.xi))

    mean = float(numpy.mean(kappa)) if kappa.size > 0 else float('nan')
    constant = all(verdict.passed for verdict in report.verdicts)
    report.add_verdict(
        Verdict(
            'constant_flag_curvature',
            constant,
            mean,
            note=f'κ = {mean!r}' if constant else 'flag curvature is not constant on the sample',
        )
    )
    report.results['kappa'] = mean
    if metric.expected_curvature is not None:
        report.add_note(f'expected κ = {metric.expected_curvature!r}')

    LOGGER.info(f'{metric.name}: constant flag curvature {report.status} (κ mean {mean:.6g}, spread {spread:.3e})')
    return report


def bianchi_check(
    spray: SprayData,
    sample: Sample,
    seed: int = DEFAULT_SEED,
    tolerances: Tolerances = None,
    battery_size: int = BATTERY_SIZE,
    threads: int = None,
) -> CheckReport:
    """
    `d_hξ = 0` for an isotropic spray in dimension at least 3

    :param spray: isotropic spray
    :param sample: sample points
    :param seed: seed of the test-vector battery
    :param tolerances: tolerance ladder
    :param battery_size: number of test-vector tuples
    :param threads: threads of the point sweep
    """

    if tolerances is None:
        tolerances = Tolerances()
    n = spray.dimension
    if n < 3:
        raise PreconditionError(f'd_h ξ vanishes by isotropy only in dimension > 2, not {n}')

    points = as_batch(sample)
    pack = CurvaturePack(spray)

    _, _, isotropy = pack.isotropy(points)
    if numpy.max(isotropy) >= tolerances.curvature:
        raise PreconditionError(
            f'{spray.name} is not isotropic on the sample (residual {numpy.max(isotropy):.3e})'
        )

    report = CheckReport(
        'bianchi', spray.description, points, _configuration(points, seed, tolerances, battery_size)
    )
    report.add_column('isotropy_residual', isotropy)

    covector_battery = vector_battery(n, 1, battery_size, seed)
    pair_battery = vector_battery(n, 2, battery_size, seed)

    def measure(chunk: PhasePoint) -> {str: numpy.ndarray}:
        size = chunk.size
        xi = to_array(pack.xi_coefficients(chunk), size)
        scale = numpy.maximum(1.0, coefficient_norm(xi, covector_battery))
        _, d_h = pack.xi_derivatives(chunk)
        d_h = to_array(d_h, size)
        # i_S d_h ξ has coefficients yʲ (d_h ξ)ⱼₖ
        contracted = numpy.einsum('jp,jkp->kp', to_array(chunk.y, size), d_h)
        return {
            'd_h_xi': coefficient_norm(d_h, pair_battery) / scale,
            'i_S_d_h_xi': coefficient_norm(contracted, covector_battery) / scale,
        }

    for name, values in sweep(measure, points, threads).items():
        report.add_column(name, values)

    report.add_verdict(threshold_verdict('d_h_xi', report.columns['d_h_xi'], tolerances.xi))
    report.add_verdict(threshold_verdict('i_S_d_h_xi', report.columns['i_S_d_h_xi'], tolerances.xi))
    LOGGER.info(f'{spray.name}: d_h ξ = 0 {report.status} (max {largest(report.columns["d_h_xi"]):.3e})')
    return report


def scalar_flag_check(
    metric: MetricSpec,
    sample: Sample = None,
    count: int = DEFAULT_POINTS,
    seed: int = DEFAULT_SEED,
    tolerances: Tolerances = None,
    threads: int = None,
) -> CheckReport:
    """
    scalar flag curvature `Φ = κ(F²J − F d_JF⊗𝒞)` with `κ = ρ/F²`, and `ξ = (1/3F) d_J(κF³)`

    :param metric: Finsler metric
    :param sample: sample points (drawn from the metric's domain if not given)
    :param count: number of points to draw
    :param seed: seed of the sample
    :param tolerances: tolerance ladder
    :param threads: threads of the point sweep
    """

    if tolerances is None:
        tolerances = Tolerances()
    points = _sample(metric, sample, count, seed)
    n = metric.dimension
    pack = CurvaturePack(geodesic_spray(metric))
    report = CheckReport(
        'scalar flag curvature', describe(metric), points, _configuration(points, seed, tolerances, 0)
    )

    def weighted_ricci(point: PhasePoint) -> Scalar:
        # κF³ = ρF
        return pack.ricci_scalar_at(point) * metric.evaluate(point)

    def measure(chunk: PhasePoint) -> {str: numpy.ndarray}:
        size = chunk.size
        value = metric.evaluate(chunk)
        gradient = [
            derivative(metric.evaluate, chunk, _fiber_vector(n, index)) for index in range(n)
        ]
        jacobi = to_array(pack.jacobi_coefficients(chunk), size)
        value = to_array(value, size)
        gradient = to_array(gradient, size)
        fiber = to_array(chunk.y, size)
        rho = numpy.trace(jacobi) / (n - 1)
        kappa = rho / value ** 2
        model = kappa * (
            value ** 2 * numpy.eye(n)[:, :, None] - value * fiber[:, None, :] * gradient[None, :, :]
        )
        scale = numpy.maximum(1.0, numpy.max(numpy.abs(jacobi), axis=(0, 1)))
        flag = numpy.max(numpy.abs(jacobi - model), axis=(0, 1)) / scale

        xi = to_array(pack.xi_coefficients(chunk), size)
        weighted = to_array(
            [derivative(weighted_ricci, chunk, _fiber_vector(n, index)) for index in range(n)], size
        ) / (3 * value)
        xi_scale = numpy.maximum(1.0, numpy.max(numpy.abs(xi), axis=0))
        return {
            'kappa': kappa,
            'scalar_flag_residual': flag,
            'xi_formula_residual': numpy.max(numpy.abs(xi - weighted), axis=0) / xi_scale,
        }

    for name, values in sweep(measure, points, threads).items():
        report.add_column(name, values)

    report.add_verdict(
        threshold_verdict('scalar_flag', report.columns['scalar_flag_residual'], tolerances.curvature)
    )
    report.add_verdict(
        threshold_verdict('xi_formula', report.columns['xi_formula_residual'], tolerances.xi)
    )
    kappa = report.columns['kappa']
    report.add_note(f'κ ranges over [{numpy.min(kappa)!r}, {numpy.max(kappa)!r}]')
    return report


def _fiber_vector(dimension: int, index: int) -> tuple:
    vector = [0.0] * (2 * dimension)
    vector[dimension + index] = 1.0
    return tuple(vector)


def ricci_from_xi_check(
    spray: SprayData, sample: Sample, tolerances: Tolerances = None
) -> CheckReport:
    """ `ρ = i_Sα` and, on isotropic sprays, `ρ = i_Sξ` """

    if tolerances is None:
        tolerances = Tolerances()
    points = as_batch(sample)
    size = points.size
    pack = CurvaturePack(spray)
    report = CheckReport('ricci scalar', spray.description, points)

    rho, alpha, isotropy = pack.isotropy(points)
    xi = to_array(pack.xi_coefficients(points), size)
    fiber = to_array(points.y, size)
    scale = numpy.maximum(1.0, numpy.abs(rho))
    report.add_column('isotropy_residual', isotropy)
    report.add_column('rho_vs_i_S_alpha', numpy.abs(rho - numpy.sum(alpha * fiber, axis=0)) / scale)
    report.add_column('rho_vs_i_S_xi', numpy.abs(rho - numpy.sum(xi * fiber, axis=0)) / scale)

    report.add_verdict(
        threshold_verdict('rho_vs_i_S_alpha', report.columns['rho_vs_i_S_alpha'], tolerances.curvature)
    )
    isotropic = isotropy < tolerances.curvature
    if not numpy.all(isotropic):
        report.add_note('ρ = i_S ξ is only checked where the spray is isotropic')
    report.add_verdict(
        threshold_verdict('rho_vs_i_S_xi', report.columns['rho_vs_i_S_xi'], tolerances.curvature, isotropic)
    )
    return report


def identity_check(
    spray: SprayData,
    sample: Sample,
    seed: int = DEFAULT_SEED,
    tolerances: Tolerances = None,
    battery_size: int = BATTERY_SIZE,
    metric: MetricSpec = None,
) -> CheckReport:
    """
    agreement of the coordinate objects with their bracket definitions, and the structure identities of the curvature

    :param spray: spray
    :param sample: sample points
    :param seed: seed of the test-vector battery
    :param tolerances: tolerance ladder
    :param battery_size: number of test-vector tuples
    :param metric: metric of the spray, for metricity and the constant-curvature identities
    """

    if tolerances is None:
        tolerances = Tolerances()
    if metric is None:
        metric = spray.metric

    points = as_batch(sample)
    n = spray.dimension
    pack = CurvaturePack(spray)
    report = CheckReport(
        'identities', spray.description, points, _configuration(points, seed, tolerances, battery_size)
    )

    vectors = vector_battery(n, 1, battery_size, seed)
    pairs = vector_battery(n, 2, battery_size, seed)

    J = vertical_endomorphism(n)
    C = liouville(n)
    S = spray.spray
    h = pack.horizontal
    v = pack.vertical
    jacobi = pack.jacobi
    curvature = pack.curvature

    def check(name: str, first, second, battery, tolerance: float):
        residual = form_residual(first, second, points, battery)
        report.add_column(name, residual)
        report.add_verdict(threshold_verdict(name, residual, tolerance))

    check('J_squared', compose(J, J), None, vectors, tolerances.identity)
    check('h_plus_v', h + v, identity(n), vectors, tolerances.identity)
    check('h_idempotent', compose(h, h), h, vectors, tolerances.identity)
    check('v_idempotent', compose(v, v), v, vectors, tolerances.identity)
    check('h_v_orthogonal', compose(h, v), None, vectors, tolerances.identity)
    check('h_C_bracket', fn_bracket(h, C), None, vectors, tolerances.identity)
    check('h_J_bracket', fn_bracket(h, J), None, pairs, tolerances.identity)
    check('J_of_S', compose(J, S), C, [()], tolerances.identity)

    check('h_fast_vs_fn', h, pack.fn_horizontal_projector(), vectors, CONNECTION_TOLERANCE)
    check('v_fast_vs_fn', v, pack.fn_vertical_projector(), vectors, CONNECTION_TOLERANCE)
    check('phi_fast_vs_fn', jacobi, pack.fn_jacobi_endomorphism(), vectors, tolerances.curvature)
    check('R_fast_vs_fn', curvature, pack.fn_curvature_tensor(), pairs, tolerances.curvature)
    check('J_phi_vs_3R', fn_bracket(J, jacobi), 3.0 * curvature, pairs, tolerances.curvature)
    check('phi_vs_i_S_R', jacobi, insert(S, curvature), vectors, tolerances.curvature)
    check('phi_of_S', compose(jacobi, S), None, [()], HOMOGENEITY_TOLERANCE)

    _, _, isotropy = pack.isotropy(points)
    report.add_column('isotropy_residual', isotropy)
    if numpy.max(isotropy) < tolerances.curvature:
        reconstruction = wedge_vector(pack.xi, J) - tensor(pack.d_J_xi, C)
        check('R_reconstruction', curvature, reconstruction, pairs, tolerances.xi)
        check('xi_fast_vs_fn', pack.xi, pack.fn_curvature_one_form(), vectors, tolerances.xi)
        check('d_J_xi_fast_vs_fn', pack.d_J_xi, d_K(J, pack.xi), pairs, tolerances.xi)
        check('d_h_xi_fast_vs_fn', pack.d_h_xi, d_K(h, pack.xi), pairs, tolerances.xi)
    else:
        report.add_note('spray is not isotropic on the sample; ξ-level identities skipped')

    if metric is not None:
        value = metric.field
        d_j_value = d_K(J, value)
        check('d_h_F', d_K(h, value), None, vectors, HOMOGENEITY_TOLERANCE)

        if metric.expected_curvature is not None:
            kappa = flag_curvature(pack, metric)
            kappa_value = multiply(kappa, value)
            check('R_constant_curvature', curvature, wedge_vector(multiply(kappa_value, d_j_value), J), pairs, tolerances.xi)
            check('xi_constant_curvature', pack.xi, multiply(kappa_value, d_j_value), vectors, tolerances.xi)
            check('d_J_kappa_wedge_d_J_F', wedge(d_K(J, kappa), d_j_value), None, pairs, tolerances.xi)

            def transported_kappa(point: PhasePoint) -> Scalar:
                return derivative(kappa, point, S(point))

            check(
                'S_kappa_d_J_F_vs_F_d_h_kappa',
                multiply(ScalarField(n, transported_kappa, name='S(κ)'), d_j_value),
                multiply(value, d_K(h, kappa)),
                vectors,
                tolerances.xi,
            )

    LOGGER.info(f'{spray.name}: identity suite {report.status}')
    return report
