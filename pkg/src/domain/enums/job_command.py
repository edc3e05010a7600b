"""
Enum para los subcomandos del CLI.
"""

from enum import Enum


class JobCommand(str, Enum):
	"""Subcomandos disponibles en la línea de comandos."""

	CCA = "cca"
	PDF = "pdf"
	CDF = "cdf"
	MOMENTS = "moments"
	SAMPLE = "sample"
	VALIDATE = "validate"
	REQUIRED_TERMS = "required-terms"
	BENCH = "bench"
	GAUSSIAN_DISTANCE = "gaussian-distance"

	@property
	def descripcion(self) -> str:
		"""Descripción corta para la ayuda del CLI."""
		descripciones = {
			self.CCA: "Correlaciones canónicas e información mutua",
			self.PDF: "Densidad de la densidad de información sobre una rejilla",
			self.CDF: "Distribución acumulada sobre una rejilla",
			self.MOMENTS: "Momentos centrales",
			self.SAMPLE: "Muestras Monte Carlo",
			self.VALIDATE: "Batería de comprobaciones contra oráculos",
			self.REQUIRED_TERMS: "Número de términos para una cota de error",
			self.BENCH: "Tiempo de la serie directa frente a la rápida",
			self.GAUSSIAN_DISTANCE: "Distancia máxima a la aproximación gaussiana",
		}
		return descripciones.get(self, "")
