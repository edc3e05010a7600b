"""
Servicio de oráculos independientes.

Maquinaria de verificación que no comparte álgebra con las series:
- Muestreadores Monte Carlo (suma de cuadrados, pares gaussianos, chi-cuadrado)
- Inversión de la función característica por cuadratura
- Estadísticos de Kolmogorov-Smirnov y resumen de momentos
- Oráculos de Bessel K (integral de Basset) y Struve L (serie directa)
"""

from concurrent.futures import ThreadPoolExecutor
from math import fsum
from typing import Callable, Optional, Union

import numpy as np
from loguru import logger
from numpy.random import Generator, PCG64, SeedSequence
from scipy import integrate, special, stats

from ...config.settings import Settings, settings as default_settings
from ...domain.enums.sample_construction import SampleConstruction
from ...domain.exceptions import InputError, NotApplicableError, UnsupportedOracleError
from ...domain.models.canonical_spectrum import CanonicalSpectrum
from ...domain.models.sample_batch import SampleBatch
from ...infrastructure.logging.metrics import MetricsLogger, track_performance
from .series_service import SeriesService


# ==========================================
# Construcciones por partición (devuelven ι − I)
# ==========================================

def _draw_sum_representation(rng: Generator, rho: np.ndarray, m: int) -> np.ndarray:
	xi = rng.standard_normal((m, rho.size))
	eta = rng.standard_normal((m, rho.size))
	return 0.5 * (xi * xi - eta * eta) @ rho


def _draw_joint_gaussian(rng: Generator, rho: np.ndarray, m: int) -> np.ndarray:
	x = rng.standard_normal((m, rho.size))
	w = rng.standard_normal((m, rho.size))
	complemento = 1.0 - rho * rho
	y = rho * x + np.sqrt(complemento) * w
	# log p(x, y) / (p(x) p(y)) de cada par estándar con correlación ρ
	por_par = -0.5 * np.log(complemento) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * complemento)
	# centrada: I = −½ Σ log(1 − ρ²) se suma una sola vez en _sample
	return por_par.sum(axis=1) + 0.5 * np.sum(np.log(complemento))


def _draw_chi_square_difference(rng: Generator, rho: np.ndarray, m: int) -> np.ndarray:
	z1 = rng.chisquare(rho.size, m)
	z2 = rng.chisquare(rho.size, m)
	return 0.5 * rho[0] * (z1 - z2)


_CONSTRUCCIONES: dict[SampleConstruction, Callable[[Generator, np.ndarray, int], np.ndarray]] = {
	SampleConstruction.SUM_REPRESENTATION: _draw_sum_representation,
	SampleConstruction.JOINT_GAUSSIAN: _draw_joint_gaussian,
	SampleConstruction.CHI_SQUARE_DIFFERENCE: _draw_chi_square_difference,
}


class OracleService:
	"""
	Servicio de oráculos Monte Carlo y de cuadratura.

	El muestreo se parte en bloques de `sample_chunk_size` extracciones; cada
	bloque recibe una semilla hija de SeedSequence(seed), de modo que el
	lote no depende del número de hilos.
	"""

	def __init__(self, settings: Optional[Settings] = None):
		"""
		Inicializa el servicio de oráculos.

		Args:
			settings: Configuración (opcional, global por defecto)
		"""
		self.settings = settings or default_settings

	# ==========================================
	# Muestreo
	# ==========================================

	def _sample(
		self,
		spectrum: CanonicalSpectrum,
		n: int,
		seed: Optional[int],
		construction: SampleConstruction,
	) -> SampleBatch:
		if n < 1:
			raise InputError(f"El número de muestras debe ser al menos 1, recibido {n}")
		if spectrum.r < 1:
			raise InputError("El muestreo necesita r ≥ 1 (con r = 0 la densidad es idénticamente 0)")
		seed = self.settings.seed if seed is None else seed

		rho = spectrum.as_array()
		bloque = self.settings.sample_chunk_size
		tamanos = [min(bloque, n - inicio) for inicio in range(0, n, bloque)]
		hijas = SeedSequence(seed).spawn(len(tamanos))
		extraer = _CONSTRUCCIONES[construction]

		def generar(args: tuple[SeedSequence, int]) -> np.ndarray:
			semilla, m = args
			return extraer(Generator(PCG64(semilla)), rho, m)

		if self.settings.workers > 1 and len(tamanos) > 1:
			with ThreadPoolExecutor(max_workers=self.settings.workers) as executor:
				partes = list(executor.map(generar, zip(hijas, tamanos)))
		else:
			partes = [generar(args) for args in zip(hijas, tamanos)]

		valores = np.concatenate(partes) + spectrum.mutual_information
		MetricsLogger.log_event(
			"SAMPLE_DRAWN", construction=construction.value, r=spectrum.r, n=n, seed=seed
		)
		return SampleBatch(values=valores, seed=seed, construction=construction)

	@track_performance("sample_sum_representation")
	def sample_sum_representation(
		self, spectrum: CanonicalSpectrum, n: int, seed: Optional[int] = None
	) -> SampleBatch:
		"""
		½ Σ ρ_i (ξ_i² − η_i²) + I con 2r normales estándar por extracción.

		Raises:
			InputError: n < 1 o r = 0
		"""
		return self._sample(spectrum, n, seed, SampleConstruction.SUM_REPRESENTATION)

	@track_performance("sample_joint_gaussian")
	def sample_joint_gaussian(
		self, spectrum: CanonicalSpectrum, n: int, seed: Optional[int] = None
	) -> SampleBatch:
		"""
		Suma de las densidades de información de r pares (x, ρx + √(1−ρ²)w).

		No usa la representación como suma de cuadrados: es un oráculo de
		extremo a extremo.
		"""
		return self._sample(spectrum, n, seed, SampleConstruction.JOINT_GAUSSIAN)

	@track_performance("sample_chi_square_difference")
	def sample_chi_square_difference(
		self, spectrum: CanonicalSpectrum, n: int, seed: Optional[int] = None
	) -> SampleBatch:
		"""(ρ/2)(Z_1 − Z_2) + I con Z_1, Z_2 ~ χ²(r); sólo correlaciones iguales."""
		if spectrum.r >= 1 and not spectrum.is_equal:
			raise NotApplicableError("La diferencia de chi-cuadrado necesita correlaciones iguales")
		return self._sample(spectrum, n, seed, SampleConstruction.CHI_SQUARE_DIFFERENCE)

	def sample(
		self,
		spectrum: CanonicalSpectrum,
		n: int,
		seed: Optional[int] = None,
		construction: SampleConstruction = SampleConstruction.SUM_REPRESENTATION,
	) -> SampleBatch:
		"""Despacha a la construcción pedida."""
		metodos = {
			SampleConstruction.SUM_REPRESENTATION: self.sample_sum_representation,
			SampleConstruction.JOINT_GAUSSIAN: self.sample_joint_gaussian,
			SampleConstruction.CHI_SQUARE_DIFFERENCE: self.sample_chi_square_difference,
		}
		return metodos[construction](spectrum, n, seed)

	# ==========================================
	# Inversión de la función característica
	# ==========================================

	@track_performance("pdf_quadrature")
	def pdf_quadrature(self, spectrum: CanonicalSpectrum, x: float) -> tuple[float, float]:
		"""
		(1/π) ∫_0^∞ Π(1+ρ_i²t²)^{-1/2} cos(t(x−I)) dt.

		Para x ≠ I la integral se calcula con el algoritmo de Fourier de
		QUADPACK (ciclo a ciclo del coseno, con extrapolación); en x = I con
		una cuadratura adaptativa sobre [0, ∞).

		Returns:
			tuple: (valor, error absoluto estimado)

		Raises:
			UnsupportedOracleError: r = 1
		"""
		if spectrum.r < 2:
			raise UnsupportedOracleError(
				"La cuadratura necesita r ≥ 2: con r = 1 el integrando decae como 1/t"
			)
		cf = SeriesService.characteristic_function
		z = abs(float(x) - spectrum.mutual_information)
		tolerancia = self.settings.quadrature_tolerance * np.pi

		def integrando(t: float) -> float:
			return cf(spectrum, t)

		if z == 0.0:
			valor, error = integrate.quad(integrando, 0.0, np.inf, epsabs=tolerancia, limit=500)
		else:
			valor, error = integrate.quad(
				integrando, 0.0, np.inf, weight="cos", wvar=z, epsabs=tolerancia, limlst=200
			)
		return valor / np.pi, error / np.pi

	# ==========================================
	# Bondad de ajuste
	# ==========================================

	@staticmethod
	def ks_statistic(
		batch: Union[SampleBatch, np.ndarray],
		cdf: Callable,
	) -> float:
		"""
		sup |F_n − F| por la fórmula de la muestra ordenada:
		D = max_i max(i/n − F(x_(i)), F(x_(i)) − (i−1)/n).

		Raises:
			InputError: lote vacío
		"""
		valores = batch.sorted_values() if isinstance(batch, SampleBatch) else np.sort(np.asarray(batch, dtype=float))
		if valores.size == 0:
			raise InputError("El estadístico KS necesita al menos una muestra")
		n = valores.size
		try:
			f = np.broadcast_to(np.asarray(cdf(valores), dtype=float), valores.shape)
		except (TypeError, ValueError):
			f = np.array([float(cdf(v)) for v in valores])
		i = np.arange(1, n + 1)
		return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))

	@staticmethod
	def two_sample_ks(batch_a: SampleBatch, batch_b: SampleBatch) -> tuple[float, float]:
		"""
		KS de dos muestras.

		Returns:
			tuple: (estadístico, p-valor)
		"""
		resultado = stats.ks_2samp(batch_a.values, batch_b.values)
		return float(resultado.statistic), float(resultado.pvalue)

	@staticmethod
	def tabulated_cdf(grid, values) -> Callable[[np.ndarray], np.ndarray]:
		"""CDF interpolada linealmente a partir de una tabla (0 y 1 fuera de ella)."""
		grid = np.asarray(grid, dtype=float)
		values = np.asarray(values, dtype=float)
		return lambda x: np.interp(x, grid, values, left=0.0, right=1.0)

	@staticmethod
	def moment_summary(batch: SampleBatch) -> dict[str, float]:
		"""
		Media, varianza y tercer momento central con sus errores estándar.

		Los errores estándar son los asintóticos de los momentos muestrales.
		"""
		v = batch.values
		n = batch.n
		m2, m3, m4, m6 = (float(stats.moment(v, k)) for k in (2, 3, 4, 6))
		return {
			"n": n,
			"mean": float(np.mean(v)),
			"mean_se": float(np.sqrt(m2 / n)),
			"variance": m2,
			"variance_se": float(np.sqrt(max(m4 - m2 * m2, 0.0) / n)),
			"third_central": m3,
			"third_central_se": float(np.sqrt(max(m6 - m3 * m3 - 6.0 * m4 * m2 + 9.0 * m2 ** 3, 0.0) / n)),
		}

	# ==========================================
	# Oráculos de funciones especiales
	# ==========================================

	def bessel_k_quadrature(self, order: float, z: float) -> float:
		"""
		K_ν(z) por la integral de Basset:
		K_ν(z) = Γ(ν+½)(2z)^ν/√π ∫_0^∞ cos t / (t² + z²)^{ν+½} dt,  ν > −½, z > 0.
		"""
		if order <= -0.5 or z <= 0:
			raise UnsupportedOracleError("La integral de Basset necesita ν > −1/2 y z > 0")
		integral, _ = integrate.quad(
			lambda t: (t * t + z * z) ** (-(order + 0.5)),
			0.0,
			np.inf,
			weight="cos",
			wvar=1.0,
			epsabs=self.settings.quadrature_tolerance,
			limlst=200,
		)
		return float(special.gamma(order + 0.5) * (2.0 * z) ** order / np.sqrt(np.pi) * integral)

	@staticmethod
	def struve_l_series_oracle(order: float, z: float) -> float:
		"""
		L_ν(z) = Σ_k (z/2)^{2k+ν+1} / (Γ(k+3/2) Γ(k+ν+3/2)) sumada con fsum
		hasta que el término cae por debajo de la precisión de máquina.
		"""
		if z < 0:
			raise UnsupportedOracleError("El oráculo de Struve L necesita z ≥ 0")
		if z == 0:
			return 0.0
		terminos = []
		k = 0
		while True:
			termino = (z / 2.0) ** (2 * k + order + 1) / (special.gamma(k + 1.5) * special.gamma(k + order + 1.5))
			terminos.append(termino)
			if k > z and abs(termino) <= np.finfo(float).eps * abs(fsum(terminos)):
				break
			k += 1
		return fsum(terminos)


# ============================================================================
# FUNCIÓN FACTORY (SINGLETON)
# ============================================================================

_oracle_service: Optional[OracleService] = None


def get_oracle_service() -> OracleService:
	"""
	Obtiene la instancia singleton del servicio de oráculos.

	Returns:
		OracleService: Instancia del servicio
	"""
	global _oracle_service

	if _oracle_service is None:
		_oracle_service = OracleService()
		logger.info("✅ OracleService inicializado")

	return _oracle_service
