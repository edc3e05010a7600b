"""
Modelo SampleBatch: extracciones Monte Carlo de la densidad de información.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..enums.sample_construction import SampleConstruction


class SampleBatch(BaseModel):
	"""
	Lote de muestras con su procedencia (semilla y construcción).

	Attributes:
		values: Muestras de i(ξ;η)
		seed: Semilla raíz del SeedSequence
		construction: Construcción usada para generar las muestras
	"""

	model_config = ConfigDict(arbitrary_types_allowed=True)

	values: np.ndarray = Field(..., description="Muestras de la densidad de información")
	seed: int = Field(..., ge=0, description="Semilla raíz")
	construction: SampleConstruction = Field(..., description="Construcción del muestreador")

	@field_validator("values")
	@classmethod
	def validate_values(cls, v: np.ndarray) -> np.ndarray:
		"""Exige un vector 1-D no vacío."""
		v = np.asarray(v, dtype=float)
		if v.ndim != 1 or v.size < 1:
			raise ValueError("Un SampleBatch necesita al menos una muestra (vector 1-D)")
		return v

	@property
	def n(self) -> int:
		"""Número de muestras."""
		return int(self.values.size)

	def sorted_values(self) -> np.ndarray:
		return np.sort(self.values)
