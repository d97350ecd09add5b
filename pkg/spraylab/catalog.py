from os import PathLike
from pathlib import Path
import re
from typing import Sequence

import numpy

from spraylab.calculus import ScalarField
from spraylab.jets import Scalar
from spraylab.parsing import Expr, parse
from spraylab.points import PhasePoint

HEADER_PATTERN = re.compile(r'^\s*dim\s*=\s*(?P<dimension>\d+)\s*$')

BALL_RADIUS = 0.6
BOX_RADIUS = 1.0

RANDOM_AMPLITUDE = 0.4
RANDOM_FREQUENCY = 1.5


class CatalogError(Exception):
    pass


class SamplingDomain:
    """ region of base coordinates where a metric is sampled; fibers are sampled separately """

    def __init__(self, shape: str = 'box', radius: float = BOX_RADIUS):
        """
        :param shape: `box` (`|xⁱ| < radius`) or `ball` (`|x| < radius`)
        :param radius: half-width of the box, or radius of the ball
        """

        if shape not in ('box', 'ball'):
            raise CatalogError(f'unknown domain shape "{shape}"')
        if radius <= 0:
            raise CatalogError(f'domain radius must be positive, not {radius}')
        self.shape = shape
        self.radius = float(radius)

    def contains(self, x: numpy.ndarray) -> numpy.ndarray:
        """
        :param x: base coordinates of shape `(n, size)`
        :return: boolean mask over the batch
        """

        x = numpy.asarray(x, dtype=float)
        if self.shape == 'ball':
            return numpy.sqrt(numpy.sum(x ** 2, axis=0)) < self.radius
        return numpy.all(numpy.abs(x) < self.radius, axis=0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SamplingDomain)
            and self.shape == other.shape
            and self.radius == other.radius
        )

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.shape!r}, {self.radius!r})'


class ExpressionSpec:
    """ named expression in `x1..xn`, `y1..yn` with its sampling domain """

    def __init__(
        self,
        name: str,
        dimension: int,
        text: str,
        domain: SamplingDomain = None,
        notes: str = None,
        parameters: {str: object} = None,
    ):
        if domain is None:
            domain = SamplingDomain()

        self.name = name
        self.dimension = dimension
        self.expression = parse(text, dimension)
        self.domain = domain
        self.notes = notes
        self.parameters = parameters if parameters is not None else {}

    @property
    def text(self) -> str:
        return self.expression.text

    def __call__(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        return self.expression.evaluate(x, y)

    @property
    def field(self) -> ScalarField:
        """ the expression as a function on T₀M """
        expression = self.expression
        return ScalarField(
            self.dimension, lambda point: expression.evaluate(point.x, point.y), name=self.name
        )

    def evaluate(self, point: PhasePoint) -> Scalar:
        return self.expression.evaluate(point.x, point.y)

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.name!r}, dimension={self.dimension}, text={self.text!r})'


class MetricSpec(ExpressionSpec):
    """ Finsler metric `F(x, y)` given by an expression """

    def __init__(
        self,
        name: str,
        dimension: int,
        text: str,
        domain: SamplingDomain = None,
        expected_curvature: float = None,
        notes: str = None,
        parameters: {str: object} = None,
    ):
        """
        :param name: catalog name or file stem
        :param dimension: dimension `n` of the base manifold
        :param text: expression for `F`
        :param domain: sampling domain where `F` is defined and positive
        :param expected_curvature: constant flag curvature, where known
        :param notes: free-form remarks carried into reports
        :param parameters: construction parameters (seed, ...)
        """

        super().__init__(name, dimension, text, domain, notes, parameters)
        self.expected_curvature = expected_curvature


class FactorSpec(ExpressionSpec):
    """ projective factor `P(x, y)`, positively 1-homogeneous in `y` """

    def __init__(
        self,
        name: str,
        dimension: int,
        text: str,
        domain: SamplingDomain = None,
        deformed_metric: str = None,
        notes: str = None,
        parameters: {str: object} = None,
    ):
        """
        :param name: catalog name or file stem
        :param dimension: dimension `n` of the base manifold
        :param text: expression for `P`
        :param domain: sampling domain where `P` is defined, if narrower than the metric's
        :param deformed_metric: catalog metric whose geodesic spray is the deformation of the flat spray by `P`
        :param notes: free-form remarks carried into reports
        :param parameters: construction parameters (seed, ...)
        """

        super().__init__(name, dimension, text, domain, notes, parameters)
        self.deformed_metric = deformed_metric
        self.restricts_domain = domain is not None


def _variable_sum(dimension: int, template: str) -> str:
    return ' + '.join(template.format(index=index) for index in range(1, dimension + 1))


def _norm_squared(dimension: int, kind: str = 'y') -> str:
    return _variable_sum(dimension, kind + '{index}^2')


def _inner_product(dimension: int) -> str:
    return _variable_sum(dimension, 'x{index}*y{index}')


def _funk_text(dimension: int) -> str:
    xy = _inner_product(dimension)
    xx = _norm_squared(dimension, 'x')
    yy = _norm_squared(dimension, 'y')
    return f'(({xy}) + sqrt(({xy})^2 + ({yy})*(1 - ({xx}))))/(1 - ({xx}))'


def euclidean(dimension: int) -> MetricSpec:
    return MetricSpec(
        'euclidean',
        dimension,
        f'sqrt({_norm_squared(dimension)})',
        SamplingDomain('box', BOX_RADIUS),
        expected_curvature=0.0,
        notes='flat metric',
    )


def sphere_projective(dimension: int) -> MetricSpec:
    """ round unit sphere in central-projection coordinates; its geodesics are straight lines """

    xx = _norm_squared(dimension, 'x')
    yy = _norm_squared(dimension, 'y')
    xy = _inner_product(dimension)
    return MetricSpec(
        'sphere_projective',
        dimension,
        f'sqrt((1 + {xx})*({yy}) - ({xy})^2)/(1 + {xx})',
        SamplingDomain('ball', BALL_RADIUS),
        expected_curvature=1.0,
        notes='projectively flat, Gⁱ = −⟨x,y⟩yⁱ/(1+|x|²)',
    )


def poincare_ball(dimension: int) -> MetricSpec:
    return MetricSpec(
        'poincare_ball',
        dimension,
        f'2*sqrt({_norm_squared(dimension)})/(1 - ({_norm_squared(dimension, "x")}))',
        SamplingDomain('ball', BALL_RADIUS),
        expected_curvature=-1.0,
        notes='conformally flat hyperbolic metric',
    )


def funk_disk(dimension: int) -> MetricSpec:
    return MetricSpec(
        'funk_disk',
        dimension,
        _funk_text(dimension),
        SamplingDomain('ball', BALL_RADIUS),
        expected_curvature=-0.25,
        notes='Funk metric of the unit ball, Gⁱ = ½Fyⁱ',
    )


def rand_riemann(dimension: int, seed: int = 0) -> MetricSpec:
    """
    random perturbation `gᵢⱼ = δᵢⱼ + aᵢⱼ sin(wᵢⱼ·x + φᵢⱼ)` of the flat metric

    Amplitudes are bounded by `0.4/n`, so every Gershgorin disk of `g` lies right of 0.6.
    """

    generator = numpy.random.default_rng(seed)
    bound = RANDOM_AMPLITUDE / dimension

    terms = []
    for row in range(1, dimension + 1):
        for column in range(row, dimension + 1):
            amplitude = generator.uniform(-bound, bound)
            frequencies = generator.normal(0.0, RANDOM_FREQUENCY, size=dimension)
            phase = generator.uniform(0.0, 2 * numpy.pi)
            argument = ' + '.join(
                f'({float(frequency)!r})*x{index}' for index, frequency in enumerate(frequencies, start=1)
            )
            coefficient = f'({float(amplitude)!r})*sin({argument} + {float(phase)!r})'
            if row == column:
                terms.append(f'(1 + {coefficient})*y{row}^2')
            else:
                terms.append(f'2*{coefficient}*y{row}*y{column}')

    return MetricSpec(
        'rand_riemann',
        dimension,
        f'sqrt({" + ".join(terms)})',
        SamplingDomain('box', BOX_RADIUS),
        expected_curvature=None,
        notes='generic Riemannian metric of non-constant curvature',
        parameters={'seed': seed},
    )


METRICS = {
    'euclidean': euclidean,
    'sphere_projective': sphere_projective,
    'poincare_ball': poincare_ball,
    'funk_disk': funk_disk,
    'rand_riemann': rand_riemann,
}


def zero_factor(dimension: int) -> FactorSpec:
    return FactorSpec('zero', dimension, '0', deformed_metric='euclidean', notes='trivial deformation')


def funk_half(dimension: int) -> FactorSpec:
    return FactorSpec(
        'funk_half',
        dimension,
        f'0.5*({_funk_text(dimension)})',
        SamplingDomain('ball', BALL_RADIUS),
        deformed_metric='funk_disk',
        notes='deforms the flat spray into the Funk geodesic spray',
    )


def x1y1_over_norm(dimension: int) -> FactorSpec:
    """ `x¹(y¹)²/|y|`, the 1-homogeneous form of `x¹y¹/|y|` """
    return FactorSpec(
        'x1y1_over_norm',
        dimension,
        f'x1*y1^2/sqrt({_norm_squared(dimension)})',
        notes='not a Hamel function of the flat spray',
    )


def euclid_factor(dimension: int) -> FactorSpec:
    return FactorSpec(
        'euclid',
        dimension,
        f'sqrt({_norm_squared(dimension)})',
        notes='x-independent, a Hamel function of the flat spray',
    )


def rand_factor(dimension: int, seed: int = 0) -> FactorSpec:
    """ random smooth factor `P = b(x)·y + c(x)|y|` """

    generator = numpy.random.default_rng(seed)

    def smooth_coefficient(scale: float) -> str:
        offset = generator.uniform(-scale, scale)
        amplitude = generator.uniform(-scale, scale)
        frequencies = generator.normal(0.0, 1.0, size=dimension)
        phase = generator.uniform(0.0, 2 * numpy.pi)
        argument = ' + '.join(
            f'({float(frequency)!r})*x{index}' for index, frequency in enumerate(frequencies, start=1)
        )
        return f'({float(offset)!r} + ({float(amplitude)!r})*sin({argument} + {float(phase)!r}))'

    linear = ' + '.join(f'{smooth_coefficient(0.5)}*y{index}' for index in range(1, dimension + 1))
    return FactorSpec(
        'rand_factor',
        dimension,
        f'{linear} + {smooth_coefficient(0.3)}*sqrt({_norm_squared(dimension)})',
        notes='generic smooth factor',
        parameters={'seed': seed},
    )


FACTORS = {
    'zero': zero_factor,
    'funk_half': funk_half,
    'x1y1_over_norm': x1y1_over_norm,
    'euclid': euclid_factor,
    'rand_factor': rand_factor,
}

SEEDED = {'rand_riemann', 'rand_factor'}


def _validate_dimension(name: str, dimension: int):
    if int(dimension) != dimension or dimension < 2:
        raise CatalogError(f'"{name}" needs an integer dimension of at least 2, not {dimension}')


def catalog(name: str, dimension: int = 2, seed: int = 0) -> MetricSpec:
    """
    built-in metric by name

    :param name: one of `euclidean`, `sphere_projective`, `poincare_ball`, `funk_disk`, `rand_riemann`
    :param dimension: dimension `n` of the base manifold
    :param seed: seed of randomized metrics
    :return: metric
    """

    if name not in METRICS:
        raise CatalogError(f'unknown metric "{name}"; choose from {list(METRICS)}')
    _validate_dimension(name, dimension)
    if name in SEEDED:
        return METRICS[name](int(dimension), seed=seed)
    return METRICS[name](int(dimension))


def factor_catalog(name: str, dimension: int = 2, seed: int = 0) -> FactorSpec:
    """
    built-in projective factor by name

    :param name: one of `zero`, `funk_half`, `x1y1_over_norm`, `euclid`, `rand_factor`
    :param dimension: dimension `n` of the base manifold
    :param seed: seed of randomized factors
    :return: factor
    """

    if name not in FACTORS:
        raise CatalogError(f'unknown factor "{name}"; choose from {list(FACTORS)}')
    _validate_dimension(name, dimension)
    if name in SEEDED:
        return FACTORS[name](int(dimension), seed=seed)
    return FACTORS[name](int(dimension))


def catalog_entries(dimension: int = 2) -> [{str: object}]:
    """ description of every built-in metric and factor """
    entries = []
    for name in METRICS:
        metric = catalog(name, dimension)
        entries.append(
            {
                'kind': 'metric',
                'name': name,
                'expected_curvature': metric.expected_curvature,
                'domain': f'{metric.domain.shape} {metric.domain.radius:g}',
                'notes': metric.notes,
            }
        )
    for name in FACTORS:
        factor = factor_catalog(name, dimension)
        entries.append(
            {
                'kind': 'factor',
                'name': name,
                'expected_curvature': None,
                'domain': f'{factor.domain.shape} {factor.domain.radius:g}',
                'notes': factor.notes,
            }
        )
    return entries


def load_expression_file(filename: PathLike) -> (int, str):
    """
    read an expression file: a `dim=<n>` header line followed by one expression

    :param filename: path to UTF-8 text file
    :return: dimension and expression text
    """

    if not isinstance(filename, Path):
        filename = Path(filename)

    lines = [line.strip() for line in filename.read_text(encoding='utf-8').splitlines()]
    lines = [line for line in lines if len(line) > 0 and not line.startswith('#')]
    if len(lines) < 2:
        raise CatalogError(f'{filename} needs a `dim=<n>` header and an expression')

    match = HEADER_PATTERN.match(lines[0])
    if match is None:
        raise CatalogError(f'{filename} must start with a `dim=<n>` header, not "{lines[0]}"')
    dimension = int(match.group('dimension'))
    _validate_dimension(filename.name, dimension)
    return dimension, ' '.join(lines[1:])


def metric_from_file(filename: PathLike) -> MetricSpec:
    dimension, text = load_expression_file(filename)
    return MetricSpec(Path(filename).stem, dimension, text, notes=f'read from {filename}')


def factor_from_file(filename: PathLike) -> FactorSpec:
    dimension, text = load_expression_file(filename)
    return FactorSpec(Path(filename).stem, dimension, text, notes=f'read from {filename}')


def describe(spec: ExpressionSpec) -> {str: object}:
    """ identifying fields of a metric or factor, as stored in reports """
    description = {
        'name': spec.name,
        'dimension': spec.dimension,
        'expression': spec.text,
        'domain': {'shape': spec.domain.shape, 'radius': spec.domain.radius},
    }
    description.update(spec.parameters)
    return description


__all__ = [
    'CatalogError',
    'Expr',
    'ExpressionSpec',
    'FactorSpec',
    'MetricSpec',
    'SamplingDomain',
    'catalog',
    'catalog_entries',
    'factor_catalog',
    'factor_from_file',
    'load_expression_file',
    'metric_from_file',
]
