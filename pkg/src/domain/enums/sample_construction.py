"""
Enum para las construcciones del muestreador Monte Carlo.
"""

from enum import Enum


class SampleConstruction(str, Enum):
	"""
	Construcción usada para generar muestras de la densidad de información.

	- SUM_REPRESENTATION: suma ponderada de diferencias de cuadrados normales
	- JOINT_GAUSSIAN: pares bivariantes correlados y densidad de cada par
	- CHI_SQUARE_DIFFERENCE: diferencia de dos chi-cuadrado (solo correlaciones iguales)
	"""

	SUM_REPRESENTATION = "sum_representation"
	JOINT_GAUSSIAN = "joint_gaussian"
	CHI_SQUARE_DIFFERENCE = "chi_square_difference"
