"""
Entry point principal: configura loguru y despacha el CLI.
"""

import sys
from typing import Optional, Sequence

from loguru import logger


LOG_FORMAT = (
	"<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
	"<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | <level>{message}</level>"
)


def configure_logging(verbose: bool = False) -> None:
	"""
	Sustituye el sink por defecto por uno en stderr.

	El CSV va a stdout, así que los logs nunca se mezclan con la salida.
	"""
	from src.config.settings import settings

	logger.remove()
	logger.add(
		sys.stderr,
		format=LOG_FORMAT,
		level="DEBUG" if verbose else settings.effective_log_level(),
	)

	is_valid, errors = settings.validate_numerics()
	if not is_valid:
		logger.warning("La configuración numérica tiene advertencias:")
		for error in errors:
			logger.warning(f"  - {error}")


def run(argv: Optional[Sequence[str]] = None) -> int:
	"""Ejecuta el CLI con los argumentos dados (sys.argv por defecto)."""
	argv = list(sys.argv[1:] if argv is None else argv)
	configure_logging(verbose="-v" in argv or "--verbose" in argv)

	from src.infrastructure.cli import main as cli_main

	return cli_main(argv)


# Entry point
if __name__ == "__main__":
	sys.exit(run())
