from typing import Sequence

import numpy
from pandas import DataFrame

from spraylab.points import PhasePoint, to_array


class Verdict:
    """ outcome of one condition of a check """

    def __init__(
        self,
        name: str,
        passed: bool,
        value: float,
        tolerance: float = None,
        note: str = None,
        automatic: bool = False,
    ):
        """
        :param name: condition name
        :param passed: whether the condition holds
        :param value: measured statistic (usually the largest residual over included points)
        :param tolerance: threshold the statistic was compared against
        :param note: remark explaining an automatic verdict or a failure
        :param automatic: whether the verdict holds by theory regardless of the measurement
        """

        self.name = name
        self.passed = bool(passed)
        self.value = float(value) if value is not None else None
        self.tolerance = float(tolerance) if tolerance is not None else None
        self.note = note
        self.automatic = automatic

    @property
    def status(self) -> str:
        return 'PASS' if self.passed else 'FAIL'

    def to_dict(self) -> {str: object}:
        return {
            'status': self.status,
            'value': repr(self.value) if self.value is not None else None,
            'tolerance': repr(self.tolerance) if self.tolerance is not None else None,
            'automatic': self.automatic,
            'note': self.note,
        }

    def __str__(self) -> str:
        message = f'{self.name}: {self.status}'
        if self.value is not None:
            message += f' ({self.value:.3e}'
            if self.tolerance is not None:
                message += f' vs tolerance {self.tolerance:.0e}'
            message += ')'
        if self.note is not None:
            message += f' - {self.note}'
        return message

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.name!r}, {self.status}, value={self.value!r}, tolerance={self.tolerance!r})'


def largest(values: numpy.ndarray, included: numpy.ndarray = None) -> float:
    """ largest value over included points (`inf` if any included value is not finite) """
    values = numpy.asarray(values, dtype=float)
    if included is not None:
        values = values[included]
    if values.size == 0:
        return 0.0
    if not numpy.all(numpy.isfinite(values)):
        return float('inf')
    return float(numpy.max(values))


def threshold_verdict(
    name: str,
    values: numpy.ndarray,
    tolerance: float,
    included: numpy.ndarray = None,
    note: str = None,
    automatic: bool = False,
) -> Verdict:
    """
    verdict that passes when the largest residual over included points is below tolerance

    :param name: condition name
    :param values: per-point residuals
    :param tolerance: threshold
    :param included: mask of points that count towards the verdict
    :param note: remark
    :param automatic: pass regardless of the measurement
    """

    maximum = largest(values, included)
    return Verdict(name, automatic or maximum < tolerance, maximum, tolerance, note, automatic)


class CheckReport:
    """ per-point residuals and verdicts of one check """

    def __init__(
        self,
        name: str,
        subject: {str: object} = None,
        points: PhasePoint = None,
        configuration: {str: object} = None,
    ):
        """
        :param name: name of the check
        :param subject: identifiers of the checked metric, spray, and factor
        :param points: batched sample points, one row per point
        :param configuration: seed, sampling, and tolerances used
        """

        self.name = name
        self.subject = subject if subject is not None else {}
        self.points = points
        self.configuration = configuration if configuration is not None else {}
        self.columns = {}
        self.verdicts = []
        self.notes = []
        self.results = {}
        self.valid = True

    @property
    def size(self) -> int:
        if self.points is not None:
            return self.points.size
        for values in self.columns.values():
            return len(values)
        return 0

    def add_column(self, name: str, values: Sequence[float]):
        values = numpy.broadcast_to(numpy.asarray(values), (self.size,)).copy()
        self.columns[name] = values

    def add_verdict(self, verdict: Verdict):
        self.verdicts.append(verdict)

    def add_note(self, note: str):
        if note not in self.notes:
            self.notes.append(note)

    def invalidate(self, reason: str):
        """ mark the report as invalid; every verdict fails """
        self.valid = False
        self.add_note(reason)

    def verdict(self, name: str) -> Verdict:
        for verdict in self.verdicts:
            if verdict.name == name:
                return verdict
        raise KeyError(f'no verdict "{name}" in {self.name} report')

    @property
    def excluded(self) -> numpy.ndarray:
        if 'excluded' in self.columns:
            return self.columns['excluded'].astype(bool)
        return numpy.zeros(self.size, dtype=bool)

    @property
    def included(self) -> numpy.ndarray:
        return ~self.excluded

    @property
    def passed(self) -> bool:
        return self.valid and len(self.verdicts) > 0 and all(verdict.passed for verdict in self.verdicts)

    @property
    def status(self) -> str:
        return 'PASS' if self.passed else 'FAIL'

    @property
    def dataframe(self) -> DataFrame:
        """ one row per sample point, with coordinates and per-point residuals """

        data = {}
        if self.points is not None:
            size = self.points.size
            for index, values in enumerate(to_array(self.points.x, size), start=1):
                data[f'x{index}'] = values
            for index, values in enumerate(to_array(self.points.y, size), start=1):
                data[f'y{index}'] = values
        data.update(self.columns)
        return DataFrame(data)

    @property
    def aggregate(self) -> {str: {str: float}}:
        """ max and mean of every numeric column over included points """

        aggregate = {}
        included = self.included
        for name, values in self.columns.items():
            if name == 'excluded' or values.dtype == bool:
                continue
            values = values[included].astype(float)
            if values.size == 0:
                continue
            aggregate[name] = {'max': float(numpy.max(values)), 'mean': float(numpy.mean(values))}
        return aggregate

    def merge(self, other: 'CheckReport', prefix: str = None):
        """
        take over columns, verdicts, and notes of another report on the same points

        :param other: report to absorb
        :param prefix: prefix for the absorbed column and verdict names
        """

        for name, values in other.columns.items():
            self.columns[name if prefix is None or name == 'excluded' else f'{prefix}_{name}'] = values
        for verdict in other.verdicts:
            if prefix is not None:
                verdict.name = f'{prefix}_{verdict.name}'
            self.verdicts.append(verdict)
        for note in other.notes:
            self.add_note(note)
        if not other.valid:
            self.valid = False

    def summary(self) -> str:
        lines = [f'{self.name} of {self.subject.get("name", "?")}: {self.status}']
        if not self.valid:
            lines.append('report is invalid')
        lines.extend(f'  {verdict}' for verdict in self.verdicts)
        lines.extend(
            f'  {name} = {value:.6g}' if isinstance(value, float) else f'  {name} = {value}'
            for name, value in self.results.items()
        )
        lines.extend(f'  note: {note}' for note in self.notes)
        return '\n'.join(lines)

    def __str__(self) -> str:
        return self.summary()

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.name!r}, {self.status}, points={self.size}, verdicts={len(self.verdicts)})'
