"""
Sistema de métricas y logging estructurado.

Centraliza el logging de eventos numéricos importantes (construcción de
tablas de coeficientes, evaluaciones de rejilla, muestreos, cuadraturas)
con el formato `EVENT=... | clave=valor` fácil de filtrar en los logs.
"""

import numpy as np
from loguru import logger
from typing import Optional
from functools import wraps
import time


# Umbral a partir del cual una operación se considera lenta
SLOW_OPERATION_MS = 5000


def _format_value(value) -> str:
	if isinstance(value, float):
		return f"{value:.6g}"
	return str(value)


class MetricsLogger:
	"""
	Logger de métricas de cálculo.

	Formato estructurado `CLAVE=valor | ...` en una sola línea.
	"""

	@staticmethod
	def log_event(
		event_type: str,
		job: Optional[str] = None,
		**kwargs
	) -> None:
		"""
		Loguea un evento de cálculo.

		Args:
			event_type: Tipo de evento (ej: COEFFICIENT_TABLE_EXTENDED)
			job: Comando del CLI que lo origina (opcional)
			**kwargs: Datos adicionales del evento
		"""
		parts = [f"EVENT={event_type}"]

		if job:
			parts.append(f"job={job}")

		for key, value in kwargs.items():
			parts.append(f"{key}={_format_value(value)}")

		logger.info(" | ".join(parts))

	@staticmethod
	def log_error(
		error_type: str,
		error: Exception,
		job: Optional[str] = None,
		**kwargs
	) -> None:
		"""
		Loguea un error con contexto.

		Args:
			error_type: Tipo de error (ej: TRUNCATION_FAILED)
			error: Excepción capturada
			job: Comando del CLI (opcional)
			**kwargs: Contexto adicional
		"""
		parts = [f"ERROR={error_type}"]

		if job:
			parts.append(f"job={job}")

		parts.append(f"message={error}")

		for key, value in kwargs.items():
			parts.append(f"{key}={_format_value(value)}")

		logger.error(" | ".join(parts))

	@staticmethod
	def log_performance(
		operation: str,
		duration_ms: float,
		**kwargs
	) -> None:
		"""
		Loguea la duración de una operación.

		Args:
			operation: Nombre de la operación
			duration_ms: Duración en milisegundos
			**kwargs: Contexto adicional
		"""
		parts = [
			f"PERF={operation}",
			f"duration_ms={duration_ms:.2f}"
		]

		for key, value in kwargs.items():
			parts.append(f"{key}={_format_value(value)}")

		message = " | ".join(parts)

		if duration_ms > SLOW_OPERATION_MS:
			logger.warning(message)
		else:
			logger.debug(message)


def _result_size(result) -> Optional[int]:
	"""Número de puntos devueltos por una evaluación de rejilla (None si no aplica)."""
	if isinstance(result, list):
		return len(result)
	if isinstance(result, np.ndarray):
		return int(result.size)
	if isinstance(result, tuple) and result and isinstance(result[0], np.ndarray):
		return int(result[0].size)
	return None


def track_performance(operation_name: str):
	"""
	Decorator que mide funciones costosas y registra cuántos puntos devuelven.

	Usage:
		@track_performance("pdf_fast_grid")
		def pdf_values(self, xs):
			...
	"""
	def decorator(func):
		@wraps(func)
		def wrapper(*args, **kwargs):
			inicio = time.perf_counter()
			try:
				result = func(*args, **kwargs)
			except Exception as e:
				MetricsLogger.log_performance(
					operation_name,
					(time.perf_counter() - inicio) * 1000,
					status="error",
					error=type(e).__name__,
				)
				raise

			contexto = {"status": "success"}
			puntos = _result_size(result)
			if puntos is not None:
				contexto["points"] = puntos
			MetricsLogger.log_performance(operation_name, (time.perf_counter() - inicio) * 1000, **contexto)
			return result

		return wrapper
	return decorator
