from typing import Any, Sequence, Union

import numpy

from spraylab.jets import Jet, Scalar, primal


class PhasePoint:
    """ point (x, y) of the slit tangent bundle T₀M, or a batch of such points sharing one evaluation pass """

    def __init__(self, x: Sequence[Scalar], y: Sequence[Scalar], check: bool = True):
        """
        phase point from base and fiber coordinates

        :param x: base coordinates; each entry a float, a 1-D array (batch), or a jet
        :param y: fiber coordinates, nonzero at every batched point
        :param check: whether to verify that `y` is nonzero
        """

        if len(x) != len(y):
            raise ValueError(f'base and fiber dimensions differ ({len(x)} != {len(y)})')

        self.x = tuple(_as_coordinate(value) for value in x)
        self.y = tuple(_as_coordinate(value) for value in y)

        if check:
            fiber_norm = sum(numpy.square(primal(value)) for value in self.y)
            if numpy.any(fiber_norm == 0):
                raise ValueError('fiber coordinates vanish; points must lie on the slit tangent bundle')

    @classmethod
    def from_coordinates(cls, coordinates: Sequence[Scalar], check: bool = False) -> 'PhasePoint':
        """
        phase point from the `2n` coordinates `(x¹..xⁿ, y¹..yⁿ)`

        :param coordinates: concatenated base and fiber coordinates
        :param check: whether to verify that `y` is nonzero
        """

        dimension = len(coordinates) // 2
        return cls(coordinates[:dimension], coordinates[dimension:], check=check)

    @property
    def dimension(self) -> int:
        return len(self.x)

    @property
    def coordinates(self) -> tuple:
        return self.x + self.y

    @property
    def size(self) -> int:
        """ number of batched points """
        size = 1
        for value in self.coordinates:
            value = primal(value)
            if isinstance(value, numpy.ndarray) and value.ndim > 0:
                size = max(size, value.shape[0])
        return size

    @property
    def batched(self) -> bool:
        return any(
            isinstance(primal(value), numpy.ndarray) and primal(value).ndim > 0
            for value in self.coordinates
        )

    def __getitem__(self, index: int) -> 'PhasePoint':
        """ single point from a batch """
        return self.__class__(
            [_batch_entry(value, index) for value in self.x],
            [_batch_entry(value, index) for value in self.y],
            check=False,
        )

    def __iter__(self):
        for index in range(self.size):
            yield self[index]

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other: 'PhasePoint') -> bool:
        return (
            isinstance(other, PhasePoint)
            and self.dimension == other.dimension
            and self.size == other.size
            and numpy.allclose(to_array(self.coordinates, self.size), to_array(other.coordinates, other.size))
        )

    def __str__(self) -> str:
        return f'x={to_array(self.x, self.size).T.tolist()}, y={to_array(self.y, self.size).T.tolist()}'

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(x={self.x!r}, y={self.y!r})'


def _as_coordinate(value: Any) -> Scalar:
    if isinstance(value, Jet):
        return value
    if isinstance(value, numpy.ndarray) and value.ndim > 0:
        return value.astype(float)
    return float(value)


def _batch_entry(value: Scalar, index: int) -> float:
    value = primal(value)
    if isinstance(value, numpy.ndarray) and value.ndim > 0:
        return float(value[index])
    return float(value)


def stack_points(points: Sequence[PhasePoint]) -> PhasePoint:
    """
    batch single points into one phase point with array coordinates

    :param points: points of equal dimension
    :return: batched point
    """

    if len(points) == 0:
        raise ValueError('no points to stack')
    dimension = points[0].dimension
    if any(point.dimension != dimension for point in points):
        raise ValueError('cannot stack points of different dimensions')
    coordinates = numpy.concatenate(
        [to_array(point.coordinates, point.size) for point in points], axis=-1
    )
    return PhasePoint.from_coordinates(list(coordinates), check=True)


def to_array(values: Union[Scalar, Sequence], size: int) -> numpy.ndarray:
    """
    order-0 parts of a (nested) structure of scalars as a float array whose last axis runs over the batch

    :param values: scalar or nested sequence of scalars
    :param size: batch size
    :return: array of shape `(*structure, size)`
    """

    if isinstance(values, (list, tuple)):
        if len(values) == 0:
            return numpy.zeros((0, size))
        return numpy.stack([to_array(value, size) for value in values], axis=0)
    return numpy.broadcast_to(numpy.asarray(primal(values), dtype=float), (size,)).copy()


def unstack(point: PhasePoint) -> [PhasePoint]:
    """ single points of a batch """
    return list(point)


def as_batch(sample: Union[PhasePoint, Sequence[PhasePoint]]) -> PhasePoint:
    """ one batched point from a point or a list of points """
    if isinstance(sample, PhasePoint):
        return sample
    return stack_points(list(sample))
