"""
Modelo KernelState: estado de las recurrencias de U_k y D_k en una rejilla.
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


_RESCALE_THRESHOLD = 1e250
_SQRT_PI = float(np.sqrt(np.pi))


class KernelState(BaseModel):
	"""
	Estado de los núcleos en el índice k para un vector de abscisas w ≥ 0.

	Los valores de U se guardan escalados: U_k(w) = u_curr · exp(log_scale − w).
	El factor e^{-w} no se aplica nunca dentro de la recurrencia y log_scale
	se reajusta cuando u crece, de modo que el estado no desborda para
	ningún w. D no está escalado (vive en [0, 1/2]).

	Attributes:
		r: Rango del espectro
		z: Abscisas escaladas w = |x − I| / ρ_r
		k: Índice actual
		u_curr: U_k escalado
		u_next: U_{k+1} escalado
		log_scale: Exponente común de u_curr, u_next y pdf_sum
		d_curr: D_k (None si sólo se evalúa la densidad)
		pdf_sum: Σ_{i≤k} δ_i U_i, en la escala de u
		cdf_sum: Σ_{i≤k} δ_i D_i
	"""

	model_config = ConfigDict(arbitrary_types_allowed=True)

	r: int = Field(..., ge=1)
	z: np.ndarray
	k: int = Field(default=0, ge=0)
	u_curr: np.ndarray
	u_next: np.ndarray
	log_scale: np.ndarray
	d_curr: Optional[np.ndarray] = None
	pdf_sum: Optional[np.ndarray] = None
	cdf_sum: Optional[np.ndarray] = None

	@model_validator(mode="after")
	def validate_state(self) -> "KernelState":
		"""u estrictamente positivo y D en [0, 1/2]."""
		if np.any(self.z < 0):
			raise ValueError("Las abscisas escaladas deben ser no negativas")
		if not (np.all(self.u_curr > 0) and np.all(self.u_next > 0)):
			raise ValueError("Los valores del núcleo U deben ser estrictamente positivos")
		if self.d_curr is not None and (np.any(self.d_curr < 0) or np.any(self.d_curr > 0.5 + 1e-12)):
			raise ValueError("D_k debe estar en [0, 1/2]")
		if self.pdf_sum is None:
			self.pdf_sum = np.zeros_like(self.z)
		if self.cdf_sum is None:
			self.cdf_sum = np.zeros_like(self.z)
		return self

	def accumulate(self, weight: float) -> None:
		"""Suma weight·U_k (y weight·D_k) a los acumuladores."""
		self.pdf_sum += weight * self.u_curr
		if self.d_curr is not None:
			self.cdf_sum += weight * self.d_curr

	def advance(self) -> None:
		"""
		Avanza de k a k+1.

		D_{k+1} = D_k − w·U_k(w) / (2√π (r/2 + k))
		U_{k+2} = w²/((r+2k+2)(r+2k))·U_k + (r+2k+1)/(r+2k+2)·U_{k+1}
		"""
		r, k, w = self.r, self.k, self.z

		if self.d_curr is not None:
			paso = w * np.exp(self.log_scale - w) * self.u_curr / (2.0 * _SQRT_PI * (r / 2.0 + k))
			self.d_curr = np.maximum(self.d_curr - paso, 0.0)

		a = k + 2
		u_new = (
			w * w / ((r + 2 * a - 2) * (r + 2 * a - 4)) * self.u_curr
			+ (r + 2 * a - 3) / (r + 2 * a - 2) * self.u_next
		)
		self.u_curr, self.u_next = self.u_next, u_new
		self.k = k + 1
		self._rescale()

	def _rescale(self) -> None:
		grande = self.u_next > _RESCALE_THRESHOLD
		if not np.any(grande):
			return
		factor = np.where(grande, self.u_next, 1.0)
		self.u_curr = self.u_curr / factor
		self.u_next = self.u_next / factor
		self.pdf_sum = self.pdf_sum / factor
		self.log_scale = self.log_scale + np.log(factor)

	def log_pdf_sum(self) -> np.ndarray:
		"""log Σ δ_i U_i(w) sin el factor e^{-w} perdido por underflow."""
		with np.errstate(divide="ignore"):
			return np.log(self.pdf_sum) + self.log_scale - self.z
