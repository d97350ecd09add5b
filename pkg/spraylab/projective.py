"""
projective deformations `S̃ = S − 2P𝒞`: Hamel functions, the projective invariants of isotropic sprays, and Beltrami verdicts
"""

from typing import Sequence, Union

import numpy

from spraylab.calculus import (
    PreconditionError,
    SemiBasicForm,
    coefficient_norm,
    d_K,
    derivative,
    form_residual,
    liouville,
    multiply,
    tensor,
    vertical_endomorphism,
    wedge,
)
from spraylab.catalog import FactorSpec, MetricSpec, catalog, describe
from spraylab.checks import cc_check
from spraylab.curvature import (
    CurvaturePack,
    horizontal_differential,
    semi_basic_differentials,
    vertical_differential,
)
from spraylab.finsler import SprayData, geodesic_spray, recover_factor
from spraylab.model import (
    BATTERY_SIZE,
    DEFAULT_POINTS,
    DEFAULT_SEED,
    HOMOGENEITY_TOLERANCE,
    Tolerances,
)
from spraylab.points import PhasePoint, as_batch, to_array
from spraylab.reports import CheckReport, Verdict, largest, threshold_verdict
from spraylab.sampling import sample_domain, sweep, vector_battery
from spraylab.utilities import get_logger

LOGGER = get_logger('spraylab.projective')

Sample = Union[PhasePoint, Sequence[PhasePoint]]

# points used to verify the homogeneity of a factor when no sample is given
HOMOGENEITY_SAMPLE_SIZE = 16


def homogeneity_residual(factor: FactorSpec, point: PhasePoint) -> numpy.ndarray:
    """ `|𝒞(P) − P| / max(1, |P|)` per point """
    size = point.size
    value = to_array(factor.evaluate(point), size)
    radial = (0.0,) * factor.dimension + tuple(point.y)
    dilation = to_array(derivative(factor.evaluate, point, radial), size)
    return numpy.abs(dilation - value) / numpy.maximum(1.0, numpy.abs(value))


def deform_spray(
    spray: SprayData,
    factor: FactorSpec,
    sample: Sample = None,
    tolerance: float = HOMOGENEITY_TOLERANCE,
) -> SprayData:
    """
    projective deformation `S̃ = S − 2P𝒞`, with coefficients `G̃ⁱ = Gⁱ + Pyⁱ`

    :param spray: spray `S`
    :param factor: positively 1-homogeneous factor `P`
    :param sample: points at which `𝒞(P) = P` is verified (drawn from the factor's domain if not given)
    :param tolerance: largest allowed homogeneity residual
    :return: deformed spray
    """

    if factor.dimension != spray.dimension:
        raise PreconditionError(
            f'factor {factor.name} has dimension {factor.dimension}, spray {spray.name} has {spray.dimension}'
        )

    if sample is None:
        points = sample_domain(factor.domain, factor.dimension, HOMOGENEITY_SAMPLE_SIZE, DEFAULT_SEED)
    else:
        points = as_batch(sample)
    residual = largest(homogeneity_residual(factor, points))
    if not residual < tolerance:
        raise PreconditionError(
            f'factor {factor.name} is not positively 1-homogeneous (𝒞(P) − P residual {residual:.3e})'
        )

    def coefficients(point: PhasePoint) -> tuple:
        value = factor.evaluate(point)
        return tuple(
            original + value * fiber for original, fiber in zip(spray.coefficients(point), point.y)
        )

    LOGGER.debug(f'deforming {spray.name} by {factor.name}')
    return SprayData(
        spray.dimension, coefficients, source='deformed', name=f'{spray.name} + {factor.name}'
    )


def vertical_factor_form(factor: FactorSpec) -> SemiBasicForm:
    """ `d_JP` """
    return SemiBasicForm(
        factor.dimension,
        1,
        lambda point: vertical_differential(factor.evaluate, point),
        name=f'd_J {factor.name}',
    )


def horizontal_factor_form(factor: FactorSpec, spray: SprayData) -> SemiBasicForm:
    """ `d_hP` """
    return SemiBasicForm(
        factor.dimension,
        1,
        lambda point: horizontal_differential(spray, factor.evaluate, point),
        name=f'd_h {factor.name}',
    )


def hamel_form(factor: FactorSpec, spray: SprayData) -> SemiBasicForm:
    """ `d_h d_J P`, which vanishes exactly when `P` is a Hamel function of `S` """
    return SemiBasicForm(
        factor.dimension,
        2,
        lambda point: semi_basic_differentials(
            spray, lambda inner: vertical_differential(factor.evaluate, inner), point
        )[1],
        name=f'd_h d_J {factor.name}',
    )


def vertical_horizontal_form(factor: FactorSpec, spray: SprayData) -> SemiBasicForm:
    """ `d_J d_h P` """
    return SemiBasicForm(
        factor.dimension,
        2,
        lambda point: semi_basic_differentials(
            spray, lambda inner: horizontal_differential(spray, factor.evaluate, inner), point
        )[0],
        name=f'd_J d_h {factor.name}',
    )


def hamel_residual(
    factor: FactorSpec,
    spray: SprayData,
    sample: Sample,
    battery_size: int = BATTERY_SIZE,
    seed: int = DEFAULT_SEED,
) -> numpy.ndarray:
    """
    max-norm of the 2-form `d_h d_J P` over the test battery

    :param factor: projective factor `P`
    :param spray: spray `S` providing the horizontal projector
    :param sample: sample points
    :param battery_size: number of test-vector tuples
    :param seed: seed of the test-vector battery
    :return: one value per point
    """

    points = as_batch(sample)
    battery = vector_battery(spray.dimension, 2, battery_size, seed)
    coefficients = hamel_form(factor, spray).coefficients(points)
    return coefficient_norm(to_array(coefficients, points.size), battery)


def hamel_check(
    factor: FactorSpec,
    spray: SprayData,
    sample: Sample = None,
    count: int = DEFAULT_POINTS,
    seed: int = DEFAULT_SEED,
    tolerances: Tolerances = None,
    battery_size: int = BATTERY_SIZE,
    threads: int = None,
) -> CheckReport:
    """
    whether `P` is a Hamel function of `S`, `d_h d_J P = 0`

    :param factor: projective factor `P`
    :param spray: spray `S`
    :param sample: sample points (drawn from the factor's domain if not given)
    :param count: number of points to draw
    :param seed: seed of the sample and of the test-vector battery
    :param tolerances: tolerance ladder
    :param battery_size: number of test-vector tuples
    :param threads: threads of the point sweep
    """

    if tolerances is None:
        tolerances = Tolerances()
    if sample is None:
        points = sample_domain(factor.domain, factor.dimension, count, seed)
    else:
        points = as_batch(sample)

    report = CheckReport(
        'hamel',
        {'factor': describe(factor), 'spray': spray.description},
        points,
        {'points': points.size, 'seed': seed, 'battery_size': battery_size, 'tolerances': tolerances.to_dict()},
    )
    report.add_column(
        'hamel_residual',
        sweep(
            lambda chunk: {'hamel_residual': hamel_residual(factor, spray, chunk, battery_size, seed)},
            points,
            threads,
        )['hamel_residual'],
    )
    report.add_verdict(threshold_verdict('hamel', report.columns['hamel_residual'], tolerances.curvature))
    LOGGER.info(f'{factor.name} against {spray.name}: Hamel {report.status}')
    return report


def projective_invariants_check(
    spray: SprayData,
    factor: FactorSpec,
    sample: Sample,
    seed: int = DEFAULT_SEED,
    tolerances: Tolerances = None,
    battery_size: int = BATTERY_SIZE,
) -> CheckReport:
    """
    transformation rules of an isotropic spray under `S̃ = S − 2P𝒞`, with `S̃` run through the full pipeline

    (a) `h̃ = h − PJ − d_JP⊗𝒞`, (b) `ξ̃ = ξ + Pd_JP − d_hP`, (c) `d_Jξ̃ = d_Jξ − d_Jd_hP`, (d) `d_h̃ξ̃ = d_hξ`,
    and `d_RP = ξ∧d_JP − Pd_Jξ`

    :param spray: isotropic spray `S`
    :param factor: projective factor `P`
    :param sample: sample points
    :param seed: seed of the test-vector battery
    :param tolerances: tolerance ladder
    :param battery_size: number of test-vector tuples
    """

    if tolerances is None:
        tolerances = Tolerances()
    points = as_batch(sample)
    n = spray.dimension
    pack = CurvaturePack(spray)

    _, _, isotropy = pack.isotropy(points)
    if largest(isotropy) >= tolerances.curvature:
        raise PreconditionError(
            f'{spray.name} is not isotropic on the sample (residual {largest(isotropy):.3e})'
        )

    deformed = CurvaturePack(deform_spray(spray, factor, points))
    report = CheckReport(
        'projective invariants',
        {'factor': describe(factor), 'spray': spray.description},
        points,
        {'points': points.size, 'seed': seed, 'battery_size': battery_size, 'tolerances': tolerances.to_dict()},
    )
    report.add_column('isotropy_residual', isotropy)

    vectors = vector_battery(n, 1, battery_size, seed)
    pairs = vector_battery(n, 2, battery_size, seed)

    J = vertical_endomorphism(n)
    value = factor.field
    d_j_factor = vertical_factor_form(factor)
    d_h_factor = horizontal_factor_form(factor, spray)

    horizontal = pack.horizontal - multiply(value, J) - tensor(d_j_factor, liouville(n))
    one_form = pack.xi + multiply(value, d_j_factor) - d_h_factor
    vertical_derivative = pack.d_J_xi - vertical_horizontal_form(factor, spray)
    curvature_derivative = wedge(pack.xi, d_j_factor) - multiply(value, pack.d_J_xi)

    residuals = [
        ('deformed_horizontal', deformed.horizontal, horizontal, vectors, tolerances.curvature),
        ('deformed_xi', deformed.xi, one_form, vectors, tolerances.xi),
        ('deformed_d_J_xi', deformed.d_J_xi, vertical_derivative, pairs, tolerances.xi),
        ('deformed_d_h_xi', deformed.d_h_xi, pack.d_h_xi, pairs, tolerances.xi),
        ('d_R_factor', d_K(pack.curvature, value), curvature_derivative, pairs, tolerances.xi),
    ]
    for name, first, second, battery, tolerance in residuals:
        residual = form_residual(first, second, points, battery)
        report.add_column(name, residual)
        report.add_verdict(threshold_verdict(name, residual, tolerance))

    LOGGER.info(f'{spray.name} deformed by {factor.name}: projective invariants {report.status}')
    return report


def realized_metric(factor: FactorSpec, deformed_spray: SprayData, points: PhasePoint, tolerance: float) -> MetricSpec:
    """
    metric named by the factor whose geodesic spray is the deformed spray on the sample, if any

    :param factor: projective factor `P`
    :param deformed_spray: `S − 2P𝒞`
    :param points: batched sample
    :param tolerance: relative agreement of the spray coefficients
    """

    if factor.deformed_metric is None:
        return None
    metric = catalog(factor.deformed_metric, factor.dimension)
    expected = to_array(geodesic_spray(metric).coefficients(points), points.size)
    actual = to_array(deformed_spray.coefficients(points), points.size)
    difference = float(numpy.max(numpy.abs(actual - expected)))
    if difference > tolerance * max(1.0, float(numpy.max(numpy.abs(expected)))):
        LOGGER.debug(f'{deformed_spray.name} differs from the geodesic spray of {metric.name} by {difference:.3e}')
        return None
    return metric


def beltrami_check(
    metric: MetricSpec,
    factor: FactorSpec,
    sample: Sample = None,
    count: int = DEFAULT_POINTS,
    seed: int = DEFAULT_SEED,
    tolerances: Tolerances = None,
    battery_size: int = BATTERY_SIZE,
    threads: int = None,
) -> CheckReport:
    """
    for a metric of constant flag curvature, `S̃ = S − 2P𝒞` has constant flag curvature exactly when `P` is a Hamel function

    The Hamel condition and the three constant-curvature conditions on `S̃` are measured independently;
    the verdicts assert their equivalence and the transport rule `d_Jξ̃ = d_Jξ − d_Jd_hP`.

    :param metric: metric of constant flag curvature
    :param factor: projective factor `P`
    :param sample: sample points (drawn from the factor's domain if it is narrower, else the metric's)
    :param count: number of points to draw
    :param seed: seed of the sample and of the test-vector battery
    :param tolerances: tolerance ladder
    :param battery_size: number of test-vector tuples
    :param threads: threads of the point sweep
    """

    if tolerances is None:
        tolerances = Tolerances()
    n = metric.dimension
    if factor.dimension != n:
        raise PreconditionError(f'factor {factor.name} has dimension {factor.dimension}, metric {metric.name} has {n}')

    if sample is None:
        domain = factor.domain if factor.restricts_domain else metric.domain
        points = sample_domain(domain, n, count, seed)
    else:
        points = as_batch(sample)

    report = CheckReport(
        'beltrami',
        {'metric': describe(metric), 'factor': describe(factor)},
        points,
        {'points': points.size, 'seed': seed, 'battery_size': battery_size, 'tolerances': tolerances.to_dict()},
    )

    precondition = cc_check(
        metric, points, seed=seed, tolerances=tolerances, battery_size=battery_size, threads=threads
    )
    if not precondition.passed:
        report.merge(precondition, prefix='precondition')
        report.invalidate(f'{metric.name} does not have constant flag curvature on the sample')
        return report
    report.results['kappa'] = precondition.results['kappa']

    spray = geodesic_spray(metric)
    deformed_spray = deform_spray(spray, factor, points)
    pack = CurvaturePack(spray)
    deformed = CurvaturePack(deformed_spray)

    covectors = vector_battery(n, 1, battery_size, seed)
    pairs = vector_battery(n, 2, battery_size, seed)
    transport = vertical_horizontal_form(factor, spray)

    def measure(chunk: PhasePoint) -> {str: numpy.ndarray}:
        size = chunk.size
        _, _, isotropy = deformed.isotropy(chunk)
        xi = to_array(deformed.xi_coefficients(chunk), size)
        scale = numpy.maximum(1.0, coefficient_norm(xi, covectors))
        d_j, d_h = deformed.xi_derivatives(chunk)
        d_j = to_array(d_j, size)
        original = to_array(pack.xi_derivatives(chunk)[0], size)
        d_j_d_h = to_array(transport.coefficients(chunk), size)
        _, recovery = recover_factor(spray, deformed_spray, chunk)
        return {
            'hamel_residual': hamel_residual(factor, spray, chunk, battery_size, seed),
            'deformed_isotropy_residual': isotropy,
            'd_J_xi_deformed': coefficient_norm(d_j, pairs) / scale,
            'd_h_xi_deformed': coefficient_norm(to_array(d_h, size), pairs) / scale,
            'd_J_d_h_P': coefficient_norm(d_j_d_h, pairs),
            'd_J_xi_transport': coefficient_norm(d_j - (original - d_j_d_h), pairs) / scale,
            'factor_recovery': recovery,
        }

    for name, values in sweep(measure, points, threads).items():
        report.add_column(name, values)

    hamel = threshold_verdict('hamel', report.columns['hamel_residual'], tolerances.curvature)
    conditions = [
        threshold_verdict(
            'deformed_isotropic',
            report.columns['deformed_isotropy_residual'],
            tolerances.curvature,
            automatic=n == 2,
        ),
        threshold_verdict('deformed_d_J_xi', report.columns['d_J_xi_deformed'], tolerances.xi),
        threshold_verdict(
            'deformed_d_h_xi', report.columns['d_h_xi_deformed'], tolerances.xi, automatic=n > 2
        ),
    ]
    deformed_cc = all(condition.passed for condition in conditions)
    report.results['hamel'] = hamel.status
    report.results['hamel_residual'] = hamel.value
    report.results['deformed_cc'] = 'PASS' if deformed_cc else 'FAIL'
    for condition in conditions:
        report.results[condition.name] = condition.value

    report.add_verdict(
        Verdict(
            'equivalence',
            hamel.passed == deformed_cc,
            None,
            note=f'hamel {hamel.status}, deformed constant flag curvature {report.results["deformed_cc"]}',
        )
    )
    report.add_verdict(
        threshold_verdict('d_J_xi_transport', report.columns['d_J_xi_transport'], tolerances.curvature)
    )

    deformed_metric = realized_metric(factor, deformed_spray, points, tolerances.curvature)
    if deformed_metric is not None:
        value = to_array(deformed_metric.evaluate(points), points.size)
        rho, _, _ = deformed.isotropy(points)
        report.add_column('kappa_deformed', rho / value ** 2)
        kappa = float(numpy.mean(report.columns['kappa_deformed']))
        report.results['kappa_deformed'] = kappa
        report.add_note(f'deformed spray is the geodesic spray of {deformed_metric.name}, κ̃ = {kappa!r}')
    else:
        report.add_note('Finsler metrizability of the deformed spray is not decided')

    if not report.passed:
        LOGGER.warning(f'{metric.name} deformed by {factor.name}: Beltrami equivalence violated')
    LOGGER.info(
        f'{metric.name} deformed by {factor.name}: hamel {hamel.status}, deformed constant flag curvature '
        f'{report.results["deformed_cc"]}'
    )
    return report
