from concurrent.futures import ThreadPoolExecutor
import os
from typing import Callable, Dict

import numpy

from spraylab.catalog import ExpressionSpec, SamplingDomain
from spraylab.model import BATTERY_SIZE, DEFAULT_POINTS, DEFAULT_SEED, FIBER_SCALE_RANGE
from spraylab.points import PhasePoint
from spraylab.utilities import get_logger

LOGGER = get_logger('spraylab.sampling')

THREADS_VARIABLE = 'SPRAYLAB_THREADS'


def sample_domain(
    domain: SamplingDomain, dimension: int, count: int = DEFAULT_POINTS, seed: int = DEFAULT_SEED
) -> PhasePoint:
    """
    batched sample: `x` uniform in the domain, `y` uniform on the unit sphere scaled by uniform(0.5, 2)

    :param domain: sampling domain of the base coordinates
    :param dimension: dimension `n`
    :param count: number of points
    :param seed: random seed
    :return: batched phase point of `count` points
    """

    if count < 1:
        raise ValueError(f'number of points must be positive, not {count}')

    generator = numpy.random.default_rng(seed)

    accepted = numpy.zeros((dimension, 0))
    while accepted.shape[1] < count:
        candidates = generator.uniform(-domain.radius, domain.radius, size=(dimension, 2 * count))
        accepted = numpy.concatenate([accepted, candidates[:, domain.contains(candidates)]], axis=1)
    x = accepted[:, :count]

    directions = generator.normal(size=(dimension, count))
    norms = numpy.sqrt(numpy.sum(directions ** 2, axis=0))
    while numpy.any(norms == 0):
        directions[:, norms == 0] = generator.normal(size=(dimension, int(numpy.count_nonzero(norms == 0))))
        norms = numpy.sqrt(numpy.sum(directions ** 2, axis=0))
    scales = generator.uniform(*FIBER_SCALE_RANGE, size=count)
    y = directions / norms * scales

    return PhasePoint(list(x), list(y))


def sample_points(
    spec: ExpressionSpec, count: int = DEFAULT_POINTS, seed: int = DEFAULT_SEED, domain: SamplingDomain = None
) -> [PhasePoint]:
    """
    deterministic sample of phase points in the domain of a metric or factor

    :param spec: metric or factor
    :param count: number of points
    :param seed: random seed
    :param domain: domain overriding the one of the metric or factor
    :return: list of single points
    """

    if domain is None:
        domain = spec.domain
    return list(sample_domain(domain, spec.dimension, count, seed))


def vector_battery(dimension: int, degree: int, count: int = BATTERY_SIZE, seed: int = DEFAULT_SEED) -> [tuple]:
    """
    seeded pseudo-random unit test vectors of TM, grouped into tuples

    :param dimension: dimension `n` (vectors have `2n` components)
    :param degree: vectors per tuple
    :param count: number of tuples
    :param seed: random seed
    :return: `count` tuples of `degree` vectors
    """

    generator = numpy.random.default_rng([seed, dimension, degree])
    battery = []
    for _ in range(count):
        vectors = generator.normal(size=(degree, 2 * dimension))
        vectors /= numpy.sqrt(numpy.sum(vectors ** 2, axis=1))[:, None]
        battery.append(tuple(tuple(float(value) for value in vector) for vector in vectors))
    return battery


def thread_count() -> int:
    """ threads allowed for point sweeps, from `SPRAYLAB_THREADS` (default 1) """
    value = os.environ.get(THREADS_VARIABLE, '1')
    try:
        threads = int(value)
    except ValueError:
        LOGGER.warning(f'ignoring non-integer {THREADS_VARIABLE}="{value}"')
        threads = 1
    return max(1, threads)


def chunks(point: PhasePoint, count: int) -> [PhasePoint]:
    """ split a batched point into at most `count` contiguous batches """
    size = point.size
    bounds = numpy.linspace(0, size, min(count, size) + 1).astype(int)
    return [
        PhasePoint(
            [_slice(value, start, stop) for value in point.x],
            [_slice(value, start, stop) for value in point.y],
            check=False,
        )
        for start, stop in zip(bounds[:-1], bounds[1:])
        if stop > start
    ]


def _slice(value, start: int, stop: int):
    if isinstance(value, numpy.ndarray) and value.ndim > 0:
        return value[start:stop]
    return numpy.full(stop - start, float(value))


def sweep(
    function: Callable[[PhasePoint], Dict[str, numpy.ndarray]], point: PhasePoint, threads: int = None
) -> {str: numpy.ndarray}:
    """
    evaluate a per-point function over a batch, optionally split across threads

    :param function: map from a batched point to named per-point arrays
    :param point: batched sample
    :param threads: thread count (defaults to `SPRAYLAB_THREADS`)
    :return: concatenated arrays, in point order
    """

    if threads is None:
        threads = thread_count()
    if threads <= 1 or point.size <= 1:
        return function(point)

    parts = chunks(point, threads)
    LOGGER.debug(f'sweeping {point.size} points in {len(parts)} chunks')
    with ThreadPoolExecutor(max_workers=threads) as executor:
        results = list(executor.map(function, parts))
    return {
        name: numpy.concatenate([numpy.atleast_1d(result[name]) for result in results])
        for name in results[0]
    }
