from argparse import ArgumentParser, Namespace
from datetime import datetime
import logging
from os import PathLike
import sys

import humanize
from pandas import DataFrame

from spraylab.calculus import PreconditionError
from spraylab.catalog import CatalogError, catalog, catalog_entries, factor_catalog, factor_from_file, metric_from_file
from spraylab.checks import bianchi_check, cc_check, identity_check, scalar_flag_check
from spraylab.finsler import NotFinslerError, geodesic_spray
from spraylab.jets import ConfigurationError, DEFAULT_MAX_ORDER, EvaluationError, set_max_order
from spraylab.model import BATTERY_SIZE, DEFAULT_POINTS, DEFAULT_SEED, Tolerances
from spraylab.parsing import ExpressionError
from spraylab.projective import beltrami_check, hamel_check, projective_invariants_check
from spraylab.reports import CheckReport
from spraylab.sampling import sample_domain
from spraylab.utilities import get_logger, output_filename, read_configuration, set_console_level
from spraylab.writer import write_report

LOGGER = get_logger('spraylab')

COMMANDS = ['check-cc', 'bianchi', 'hamel', 'beltrami', 'invariants', 'flag-curvature', 'identities', 'catalog']
FACTOR_COMMANDS = {'hamel', 'beltrami', 'invariants'}

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


class RunConfig:
    """ settings of one run, merged from defaults, an INI file, and command-line flags """

    defaults = {
        'metric': 'euclidean',
        'metric_file': None,
        'factor': None,
        'factor_file': None,
        'dim': 2,
        'points': DEFAULT_POINTS,
        'seed': DEFAULT_SEED,
        'battery': BATTERY_SIZE,
        'tol_id': None,
        'tol_curv': None,
        'tol_xi': None,
        'max_order': DEFAULT_MAX_ORDER,
        'json': None,
        'table': None,
    }

    types = {
        'dim': int,
        'points': int,
        'seed': int,
        'battery': int,
        'tol_id': float,
        'tol_curv': float,
        'tol_xi': float,
        'max_order': int,
    }

    def __init__(self, command: str, **kwargs):
        """
        :param command: one of `COMMANDS`
        :param kwargs: settings overriding the defaults
        """

        if command not in COMMANDS:
            raise UsageError(f'unknown command "{command}"; choose from {COMMANDS}')
        unknown = set(kwargs) - set(self.defaults)
        if len(unknown) > 0:
            raise UsageError(f'unknown setting(s) {sorted(unknown)}')

        self.command = command
        settings = dict(self.defaults)
        for key, value in kwargs.items():
            if value is not None:
                settings[key] = value
        for key, value in settings.items():
            if value is not None and key in self.types:
                try:
                    value = self.types[key](value)
                except ValueError:
                    raise UsageError(f'setting "{key}" must be {self.types[key].__name__}, not "{value}"')
            setattr(self, key, value)

        if self.points < 1:
            raise UsageError(f'number of points must be at least 1, not {self.points}')
        if self.battery < 1:
            raise UsageError(f'battery size must be at least 1, not {self.battery}')

        try:
            defaults = Tolerances()
            self.tolerances = Tolerances(
                identity=self.tol_id if self.tol_id is not None else defaults.identity,
                curvature=self.tol_curv if self.tol_curv is not None else defaults.curvature,
                xi=self.tol_xi if self.tol_xi is not None else defaults.xi,
            )
        except ValueError as error:
            raise UsageError(str(error))

    @classmethod
    def from_configuration(cls, command: str, filename: PathLike = None, **kwargs) -> 'RunConfig':
        """
        merge an INI file (sections `[run]` and `[tolerances]`) under the given settings

        :param command: one of `COMMANDS`
        :param filename: INI file
        :param kwargs: settings taking precedence over the file
        """

        settings = {}
        if filename is not None:
            try:
                configuration = read_configuration(filename)
            except FileNotFoundError as error:
                raise UsageError(str(error))
            settings.update(configuration.get('run', {}))
            for key, value in configuration.get('tolerances', {}).items():
                aliases = {'identity': 'tol_id', 'curvature': 'tol_curv', 'xi': 'tol_xi'}
                if key not in aliases:
                    raise UsageError(f'unknown tolerance "{key}" in {filename}')
                settings[aliases[key]] = value
            settings = {key.replace('-', '_'): value for key, value in settings.items()}
        settings.update({key: value for key, value in kwargs.items() if value is not None})
        return cls(command, **settings)

    def to_dict(self) -> {str: object}:
        configuration = {'command': self.command}
        configuration.update({key: getattr(self, key) for key in self.defaults})
        configuration['tolerances'] = self.tolerances.to_dict()
        return configuration

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.command!r}, dim={self.dim}, points={self.points}, seed={self.seed})'


def metric_of(config: RunConfig):
    if config.metric_file is not None:
        metric = metric_from_file(config.metric_file)
        if metric.dimension != config.dim:
            LOGGER.info(f'using dimension {metric.dimension} from {config.metric_file}')
        return metric
    return catalog(config.metric, config.dim, config.seed)


def factor_of(config: RunConfig, dimension: int):
    if config.factor_file is not None:
        return factor_from_file(config.factor_file)
    if config.factor is None:
        raise UsageError(f'command "{config.command}" needs --factor or --factor-file')
    return factor_catalog(config.factor, dimension, config.seed)


def run(config: RunConfig) -> CheckReport:
    """
    execute one command

    :param config: run settings
    :return: report of the check (`None` for `catalog`)
    """

    set_max_order(config.max_order)

    if config.command == 'catalog':
        table = DataFrame(catalog_entries(config.dim))
        print(table.to_string(index=False))
        return None

    metric = metric_of(config)
    n = metric.dimension
    arguments = {'seed': config.seed, 'tolerances': config.tolerances, 'battery_size': config.battery}

    if config.command == 'check-cc':
        return cc_check(metric, count=config.points, **arguments)
    elif config.command == 'flag-curvature':
        return scalar_flag_check(metric, count=config.points, seed=config.seed, tolerances=config.tolerances)

    if config.command in FACTOR_COMMANDS:
        factor = factor_of(config, n)
        if factor.dimension != n:
            raise UsageError(f'factor has dimension {factor.dimension}, metric has dimension {n}')
        if config.command == 'beltrami':
            return beltrami_check(metric, factor, count=config.points, **arguments)
        domain = factor.domain if factor.restricts_domain else metric.domain
        points = sample_domain(domain, n, config.points, config.seed)
        spray = geodesic_spray(metric)
        if config.command == 'hamel':
            return hamel_check(factor, spray, points, **arguments)
        return projective_invariants_check(spray, factor, points, **arguments)

    points = sample_domain(metric.domain, n, config.points, config.seed)
    spray = geodesic_spray(metric)
    if config.command == 'bianchi':
        return bianchi_check(spray, points, **arguments)
    return identity_check(spray, points, metric=metric, **arguments)


def parse_arguments(arguments: [str] = None) -> Namespace:
    args_parser = ArgumentParser(
        prog='spraylab', description='numerical checks of the curvature of Finsler sprays and their projective deformations'
    )
    args_parser.add_argument('command', choices=COMMANDS, help='check to run')
    metric_group = args_parser.add_mutually_exclusive_group()
    metric_group.add_argument('--metric', help='catalog metric (see the `catalog` command)')
    metric_group.add_argument('--metric-file', help='metric file with a `dim=<n>` header and an expression for F')
    factor_group = args_parser.add_mutually_exclusive_group()
    factor_group.add_argument('--factor', help='catalog projective factor')
    factor_group.add_argument('--factor-file', help='factor file with a `dim=<n>` header and an expression for P')
    args_parser.add_argument('--dim', type=int, help='dimension of the base manifold (default: 2)')
    args_parser.add_argument('--points', type=int, help=f'number of sample points (default: {DEFAULT_POINTS})')
    args_parser.add_argument('--seed', type=int, help=f'random seed (default: {DEFAULT_SEED})')
    args_parser.add_argument('--battery', type=int, help=f'test-vector tuples per residual (default: {BATTERY_SIZE})')
    args_parser.add_argument('--tol-id', type=float, help='tolerance of algebraic identities')
    args_parser.add_argument('--tol-curv', type=float, help='tolerance of curvature-level quantities')
    args_parser.add_argument('--tol-xi', type=float, help='tolerance of quantities at the level of the curvature 1-form')
    args_parser.add_argument('--max-order', type=int, help=f'maximum jet nesting depth (default: {DEFAULT_MAX_ORDER})')
    args_parser.add_argument('--json', help='path to JSON report')
    args_parser.add_argument('--table', help='path to text (`.txt`) or CSV (`.csv`) table of per-point residuals')
    args_parser.add_argument('--config', help='INI file with `[run]` and `[tolerances]` sections')
    args_parser.add_argument('--log', help='path to log file to save log messages')
    args_parser.add_argument('--quiet', action='store_true', help='only log warnings and errors to the console')
    return args_parser.parse_args(arguments)


def main(arguments: [str] = None) -> int:
    args = parse_arguments(arguments)

    if args.quiet:
        set_console_level(LOGGER, logging.WARNING)
    if args.log is not None:
        get_logger(LOGGER.name, output_filename(args.log, 'spraylab_log', '.txt'))

    try:
        config = RunConfig.from_configuration(
            args.command,
            args.config,
            metric=args.metric,
            metric_file=args.metric_file,
            factor=args.factor,
            factor_file=args.factor_file,
            dim=args.dim,
            points=args.points,
            seed=args.seed,
            battery=args.battery,
            tol_id=args.tol_id,
            tol_curv=args.tol_curv,
            tol_xi=args.tol_xi,
            max_order=args.max_order,
            json=args.json,
            table=args.table,
        )
    except UsageError as error:
        LOGGER.error(f'{error.__class__.__name__} - {error}')
        return EXIT_USAGE

    LOGGER.debug(f'running {config!r} with tolerances {config.tolerances!r}')
    start_time = datetime.now()
    try:
        report = run(config)
    except (UsageError, CatalogError, ConfigurationError, ExpressionError, OSError) as error:
        LOGGER.error(f'{error.__class__.__name__} - {error}')
        return EXIT_USAGE
    except (PreconditionError, NotFinslerError, EvaluationError, FloatingPointError, ZeroDivisionError) as error:
        LOGGER.error(f'{error.__class__.__name__} - {error}')
        return EXIT_FAIL
    LOGGER.info(f'finished {config.command} in {humanize.naturaldelta(datetime.now() - start_time)}')

    if report is None:
        return EXIT_PASS

    print(report.summary())

    for path, prefix, suffix in ((config.json, 'spraylab_report', '.json'), (config.table, 'spraylab_table', '.txt')):
        if path is None:
            continue
        filename = output_filename(path, prefix, suffix)
        try:
            write_report(report, filename, config.to_dict())
        except (NotImplementedError, OSError) as error:
            LOGGER.error(f'{error.__class__.__name__} - {error}')
            return EXIT_USAGE
        LOGGER.info(f'wrote {report.name} report to {filename}')

    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == '__main__':
    sys.exit(main())
