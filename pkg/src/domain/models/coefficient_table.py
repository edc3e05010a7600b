"""
Modelo CoefficientTable: coeficientes γ_j y δ_k de la serie de índice único.

Los coeficientes dependen sólo del espectro, nunca de x, así que una tabla
se construye una vez y se comparte en toda una rejilla de evaluación.
"""

import threading
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from .canonical_spectrum import CanonicalSpectrum
from ..exceptions import NumericalError


_INITIAL_CAPACITY = 64
_GAMMA_CHUNK = 4096


class CoefficientTable(BaseModel):
	"""
	Tabla ampliable de coeficientes para un espectro con r ≥ 2.

	- γ_j = Σ_{i<r} (1/2j)(1 − ρ_r²/ρ_i²)^j
	- δ_0 = 1, δ_{k+1} = (1/(k+1)) Σ_{j=1}^{k+1} j γ_j δ_{k+1−j}
	- prefactor = Π_{i<r} ρ_r/ρ_i
	- scaled_partial_sums[k] = prefactor · Σ_{i≤k} δ_i  (≤ 1, no decreciente)

	La ampliación es de sólo-añadir y se serializa con un lock; los lectores
	ven siempre un prefijo ya confirmado.
	"""

	model_config = ConfigDict(arbitrary_types_allowed=True)

	spectrum: CanonicalSpectrum = Field(..., description="Espectro al que pertenecen los coeficientes")

	_bases: np.ndarray = PrivateAttr()
	_prefactor: float = PrivateAttr()
	_gammas: np.ndarray = PrivateAttr()
	_n_gammas: int = PrivateAttr(default=0)
	_deltas: np.ndarray = PrivateAttr()
	_partial: np.ndarray = PrivateAttr()
	_n_deltas: int = PrivateAttr(default=0)
	_lock: threading.Lock = PrivateAttr(default_factory=threading.Lock)

	@model_validator(mode="after")
	def validate_rank(self) -> "CoefficientTable":
		if self.spectrum.r < 2:
			raise ValueError("La tabla de coeficientes necesita al menos dos correlaciones canónicas")
		return self

	def model_post_init(self, __context) -> None:
		rho = self.spectrum.as_array()
		ratios = rho[-1] / rho[:-1]
		self._bases = 1.0 - ratios * ratios
		self._prefactor = float(np.exp(np.sum(np.log(ratios))))
		if self._prefactor <= 0.0:
			raise NumericalError(
				"El prefactor Π ρ_r/ρ_i se anula en doble precisión; "
				"el espectro es demasiado disperso para la serie de índice único"
			)

		self._gammas = np.zeros(_INITIAL_CAPACITY)
		self._deltas = np.zeros(_INITIAL_CAPACITY)
		self._partial = np.zeros(_INITIAL_CAPACITY)
		self._deltas[0] = 1.0
		self._partial[0] = min(self._prefactor, 1.0)
		self._n_deltas = 1

	# ==========================================
	# Lectura de prefijos confirmados
	# ==========================================

	@property
	def prefactor(self) -> float:
		return self._prefactor

	@property
	def bases(self) -> np.ndarray:
		"""1 − ρ_r²/ρ_i² para i < r (todas en [0, 1))."""
		return self._bases

	@property
	def max_index(self) -> int:
		"""Mayor K con δ_K calculado."""
		return self._n_deltas - 1

	@property
	def deltas(self) -> np.ndarray:
		"""δ_0 … δ_K (vista de sólo lectura)."""
		view = self._deltas[: self._n_deltas]
		view.flags.writeable = False
		return view

	@property
	def gammas(self) -> np.ndarray:
		"""γ_1 … γ_J (vista de sólo lectura)."""
		view = self._gammas[: self._n_gammas]
		view.flags.writeable = False
		return view

	@property
	def scaled_partial_sums(self) -> np.ndarray:
		"""prefactor · Σ_{i≤k} δ_i para k = 0 … K."""
		view = self._partial[: self._n_deltas]
		view.flags.writeable = False
		return view

	@property
	def partial_scaled_sum(self) -> float:
		"""Valor corriente de prefactor · Σ δ_k."""
		return float(self._partial[self._n_deltas - 1])

	def tail(self, n: int) -> float:
		"""1 − prefactor · Σ_{k≤n} δ_k, recortado a [0, 1]."""
		if n > self.max_index:
			self.extend(n)
		return max(0.0, 1.0 - float(self._partial[n]))

	# ==========================================
	# Ampliación
	# ==========================================

	def gamma(self, j: int) -> float:
		"""γ_j (j ≥ 1), calculando los que falten."""
		if j < 1:
			raise ValueError("γ_j está definido para j ≥ 1")
		if j > self._n_gammas:
			with self._lock:
				self._extend_gammas(j)
		return float(self._gammas[j - 1])

	def extend(self, upto: int, max_index: Optional[int] = None) -> "CoefficientTable":
		"""
		Completa δ_k hasta el índice `upto` (inclusive).

		Args:
			upto: Índice final requerido
			max_index: Si se indica, no se supera este índice

		Returns:
			CoefficientTable: self, para encadenar

		Raises:
			NumericalError: Si algún δ_k desborda el rango de doble precisión
		"""
		if max_index is not None:
			upto = min(upto, max_index)
		if upto <= self.max_index:
			return self

		with self._lock:
			start = self._n_deltas
			if upto < start:
				return self

			self._extend_gammas(upto)
			self._ensure_capacity(upto + 1)

			jg = np.arange(1, upto + 1) * self._gammas[:upto]
			deltas = self._deltas
			for k in range(start - 1, upto):
				deltas[k + 1] = np.dot(jg[: k + 1], deltas[k::-1]) / (k + 1)

			nuevos = deltas[start : upto + 1]
			if not np.all(np.isfinite(nuevos)):
				raise NumericalError(
					f"δ_k desborda la doble precisión antes de k={upto}; "
					"el espectro necesita una escala logarítmica no soportada"
				)

			previo = self._partial[start - 1]
			self._partial[start : upto + 1] = np.minimum(
				previo + self._prefactor * np.cumsum(nuevos), 1.0
			)
			self._n_deltas = upto + 1

		return self

	def _extend_gammas(self, upto: int) -> None:
		if upto <= self._n_gammas:
			return
		if upto > self._gammas.size:
			capacidad = max(upto, 2 * self._gammas.size)
			buffer = np.zeros(capacidad)
			buffer[: self._n_gammas] = self._gammas[: self._n_gammas]
			self._gammas = buffer

		for inicio in range(self._n_gammas + 1, upto + 1, _GAMMA_CHUNK):
			j = np.arange(inicio, min(inicio + _GAMMA_CHUNK, upto + 1))
			potencias = np.power(self._bases[None, :], j[:, None])
			self._gammas[j - 1] = potencias.sum(axis=1) / (2.0 * j)
		self._n_gammas = upto

	def _ensure_capacity(self, size: int) -> None:
		if size <= self._deltas.size:
			return
		capacidad = max(size, 2 * self._deltas.size)
		for nombre in ("_deltas", "_partial"):
			viejo = getattr(self, nombre)
			nuevo = np.zeros(capacidad)
			nuevo[: self._n_deltas] = viejo[: self._n_deltas]
			setattr(self, nombre, nuevo)
