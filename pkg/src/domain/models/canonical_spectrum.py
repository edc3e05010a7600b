"""
Modelos CanonicalSpectrum y WhiteningPair.

El espectro canónico es todo lo que la ley de la densidad de información
necesita saber del modelo gaussiano conjunto: correlaciones ordenadas,
rango e información mutua.
"""

import numpy as np
from pydantic import BaseModel, Field, computed_field, field_validator


class CanonicalSpectrum(BaseModel):
	"""
	Correlaciones canónicas ρ_1 ≥ ρ_2 ≥ … ≥ ρ_r > 0.

	Las correlaciones se ordenan de forma descendente al validar, así que
	`CanonicalSpectrum(correlations=[0.3, 0.9])` produce [0.9, 0.3].

	Attributes:
		correlations: Correlaciones canónicas, cada una en (0, 1)
		rank_tolerance: Umbral usado para anular valores singulares pequeños
	"""

	correlations: list[float] = Field(
		default_factory=list,
		description="Correlaciones canónicas en orden no creciente"
	)

	rank_tolerance: float = Field(
		default=0.0,
		ge=0,
		description="Umbral de rango aplicado en el análisis de correlación canónica"
	)

	@field_validator("correlations")
	@classmethod
	def validate_correlations(cls, v: list[float]) -> list[float]:
		"""Ordena de forma descendente y exige 0 < ρ < 1."""
		valores = [float(rho) for rho in v]
		for rho in valores:
			if not np.isfinite(rho) or not 0.0 < rho < 1.0:
				raise ValueError(f"Correlación canónica {rho!r} fuera del intervalo abierto (0, 1)")
		return sorted(valores, reverse=True)

	# ==========================================
	# Campos calculados
	# ==========================================

	@computed_field
	@property
	def r(self) -> int:
		"""Rango (número de correlaciones no nulas)."""
		return len(self.correlations)

	@computed_field
	@property
	def mutual_information(self) -> float:
		"""
		Información mutua en nats: ½ Σ log(1/(1−ρ_i²)).

		Returns:
			float: 0 para r = 0
		"""
		if not self.correlations:
			return 0.0
		rho = self.as_array()
		return float(-0.5 * np.sum(np.log1p(-rho * rho)))

	@property
	def rho_max(self) -> float:
		"""ρ_1, la mayor correlación."""
		return self.correlations[0]

	@property
	def rho_min(self) -> float:
		"""ρ_r, la menor correlación (escala de todos los núcleos)."""
		return self.correlations[-1]

	@property
	def variance(self) -> float:
		"""Varianza de la densidad de información, Σ ρ_i²."""
		return float(np.sum(self.as_array() ** 2))

	@property
	def is_equal(self) -> bool:
		"""True si todas las correlaciones coinciden (incluye r = 1)."""
		return self.r >= 1 and self.correlations[0] == self.correlations[-1]

	def as_array(self) -> np.ndarray:
		"""Correlaciones como array numpy (copia)."""
		return np.asarray(self.correlations, dtype=float)

	def __str__(self) -> str:
		return f"r={self.r} ρ=[{', '.join(f'{rho:.6g}' for rho in self.correlations)}] I={self.mutual_information:.6g}"


class WhiteningPair(BaseModel):
	"""
	Matrices de blanqueo A = Uᵀ R_X^{-1/2} y B = Vᵀ R_Y^{-1/2}.

	Con ellas ξ̂ = Aξ y η̂ = Bη tienen covarianzas identidad y covarianza
	cruzada diagonal con las correlaciones canónicas.
	"""

	a: list[list[float]] = Field(..., description="Matriz de blanqueo de ξ (p×p)")
	b: list[list[float]] = Field(..., description="Matriz de blanqueo de η (q×q)")

	@property
	def a_matrix(self) -> np.ndarray:
		return np.asarray(self.a, dtype=float)

	@property
	def b_matrix(self) -> np.ndarray:
		return np.asarray(self.b, dtype=float)
