"""
Módulo CLI - Front end de línea de comandos.
"""

from typing import Optional, Sequence

from ..logging.metrics import MetricsLogger
from ...domain.exceptions import InfoDensityError, exit_code_for
from .commands import JobRunner, run
from .csv_writer import write_csv
from .inputs import load_covariance, parse_input, resolve_spectra
from .parser import build_parser, config_from_args, parse_args
from .schemas import JobConfig


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Punto de entrada del CLI.

    Returns:
        int: Código de salida (0 éxito, 2 entrada inválida, 3 fallo numérico)
    """
    args = parse_args(argv)
    try:
        config = config_from_args(args)
    except InfoDensityError as e:
        MetricsLogger.log_error("INVALID_CONFIG", e, job=args.command)
        return exit_code_for(e)
    return run(config)


__all__ = [
    "main",
    "run",
    "JobRunner",
    "JobConfig",
    "write_csv",
    "load_covariance",
    "parse_input",
    "resolve_spectra",
    "build_parser",
    "config_from_args",
    "parse_args",
]
