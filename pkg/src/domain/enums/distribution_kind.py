"""
Enum para el tipo de función de distribución evaluada.

Define si se trabaja con la densidad (PDF) o con la
función de distribución acumulada (CDF).
"""

from enum import Enum


class DistributionKind(str, Enum):
	"""
	Tipo de función de distribución de la densidad de información.

	Hereda de str para facilitar serialización CSV/JSON
	y comparaciones con strings del CLI.
	"""

	PDF = "pdf"
	CDF = "cdf"

	@classmethod
	def get_choices(cls) -> list[str]:
		"""
		Retorna los valores admitidos por el CLI.

		Returns:
			Lista de valores ('pdf', 'cdf')
		"""
		return [item.value for item in cls]
