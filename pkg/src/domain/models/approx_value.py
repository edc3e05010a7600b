"""
Modelos ApproxValue y MomentRequest.
"""

from pydantic import BaseModel, Field, model_validator


class ApproxValue(BaseModel):
	"""
	Valor numérico con el número de términos sumados y su cota de error.

	Attributes:
		value: Valor aproximado
		n_terms: Sumandos evaluados (1 en las fórmulas cerradas)
		error_bound: Cota rigurosa y uniforme del error de truncamiento
		underflow: True si el factor e^{-z} final se anuló por underflow
	"""

	value: float = Field(..., description="Valor aproximado")
	n_terms: int = Field(default=1, ge=0, description="Número de sumandos")
	error_bound: float = Field(default=0.0, ge=0, description="Cota del error de truncamiento")
	underflow: bool = Field(default=False, description="El valor se anuló por underflow")

	@classmethod
	def exact(cls, value: float) -> "ApproxValue":
		"""Resultado de una fórmula cerrada (un término, cota 0)."""
		return cls(value=float(value), n_terms=1, error_bound=0.0)

	def as_row(self) -> tuple[float, float, int]:
		"""(value, error_bound, n_terms) en el orden de las columnas CSV."""
		return self.value, self.error_bound, self.n_terms


class MomentRequest(BaseModel):
	"""
	Petición de momento central de orden m.

	m = 0 se rechaza (sería trivialmente 1). El orden máximo lo pasa el
	servicio que atiende la petición (`moment_order_max` de su configuración).
	"""

	m: int = Field(..., ge=1, description="Orden del momento central")
	max_order: int = Field(..., ge=1, description="Orden máximo admitido")

	@model_validator(mode="after")
	def validate_m(self) -> "MomentRequest":
		if self.m > self.max_order:
			raise ValueError(
				f"Orden de momento {self.m} mayor que el máximo admitido ({self.max_order})"
			)
		return self

	@property
	def is_odd(self) -> bool:
		return self.m % 2 == 1

	@property
	def half(self) -> int:
		"""m/2 para órdenes pares."""
		return self.m // 2
