import configparser
from datetime import datetime
import logging
from os import PathLike
from pathlib import Path
import sys

LOG_FORMAT = '%(asctime)s | %(levelname)-8s | %(message)s'


def read_configuration(filename: PathLike) -> {str: {str: str}}:
    """
    read an INI file into nested dictionaries, one per section

    :param filename: path to INI file
    :return: `{section: {key: value}}`, without the `DEFAULT` section
    """

    if not isinstance(filename, Path):
        filename = Path(filename)
    if not filename.exists():
        raise FileNotFoundError(f'configuration file does not exist: {filename}')

    configuration_file = configparser.ConfigParser()
    configuration_file.read(filename, encoding='utf-8')
    return {
        section_name: {key: value for key, value in section.items()}
        for section_name, section in configuration_file.items()
        if section_name.upper() != 'DEFAULT'
    }


def output_filename(path: PathLike, prefix: str, suffix: str) -> Path:
    """
    resolve an output path, naming a timestamped file when given a directory

    :param path: file or directory
    :param prefix: file name prefix used inside a directory
    :param suffix: file suffix used inside a directory
    :return: file path whose parent directory exists
    """

    filename = Path(path).expanduser()
    if filename.is_dir() or (not filename.exists() and filename.suffix == ''):
        filename = filename / f'{prefix}_{datetime.now():%Y%m%dT%H%M%S}{suffix}'
    if not filename.parent.exists():
        filename.parent.mkdir(parents=True, exist_ok=True)
    return filename


def get_logger(
    name: str,
    log_filename: PathLike = None,
    file_level: int = None,
    console_level: int = None,
    log_format: str = None,
) -> logging.Logger:
    """
    logger of a spraylab module; the top-level logger splits DEBUG/INFO to stdout and WARNING+ to stderr

    :param name: dotted logger name; children are parented to the logger of their package
    :param log_filename: file receiving a copy of all records
    :param file_level: level of the file handler
    :param console_level: level of the console handlers of a new top-level logger
    :param log_format: record format
    """

    if file_level is None:
        file_level = logging.DEBUG
    if console_level is None:
        console_level = logging.INFO
    logger = logging.getLogger(name)

    if logger.level == logging.NOTSET and len(logger.handlers) == 0:
        if '.' in name:
            logger.parent = get_logger(name.rsplit('.', 1)[0])
        else:
            logger.setLevel(logging.DEBUG)
            if console_level != logging.NOTSET:
                if console_level <= logging.INFO:

                    class LoggingOutputFilter(logging.Filter):
                        def filter(self, rec):
                            return rec.levelno in (logging.DEBUG, logging.INFO)

                    console_output = logging.StreamHandler(sys.stdout)
                    console_output.setLevel(console_level)
                    console_output.addFilter(LoggingOutputFilter())
                    logger.addHandler(console_output)

                console_errors = logging.StreamHandler(sys.stderr)
                console_errors.setLevel(max((console_level, logging.WARNING)))
                logger.addHandler(console_errors)

    if log_filename is not None:
        if not isinstance(log_filename, Path):
            log_filename = Path(log_filename)
        log_filename = log_filename.resolve().expanduser()
        file_handler = logging.FileHandler(log_filename)
        file_handler.setLevel(file_level)
        for existing_file_handler in [
            handler for handler in logger.handlers if type(handler) is logging.FileHandler
        ]:
            logger.removeHandler(existing_file_handler)
        logger.addHandler(file_handler)

    if log_format is None:
        log_format = LOG_FORMAT
    log_formatter = logging.Formatter(log_format)
    for handler in logger.handlers:
        handler.setFormatter(log_formatter)

    return logger


def set_console_level(logger: logging.Logger, level: int):
    """ change the level of the stdout handler of a top-level logger, keeping warnings on stderr """
    for handler in logger.handlers:
        if type(handler) is logging.StreamHandler and handler.stream is sys.stdout:
            handler.setLevel(level)
