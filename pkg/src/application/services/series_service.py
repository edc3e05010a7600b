"""
Servicio de evaluación de referencia de la densidad de información.

Evalúa por suma directa y fórmulas cerradas:
- PDF y CDF por la caja multi-índice con topes por dimensión
- Fórmulas para correlaciones iguales (Bessel y exponencial-polinómica)
- Momentos centrales por convolución de polinomios en ρ²
- Función característica y referencia gaussiana

La caja se agrupa por orden total k = k_1 + … + k_{r−1}: el polinomio de
pesos de la caja es el producto de las sucesiones de pesos truncadas de
cada dimensión, de modo que cada multi-índice se cuenta exactamente una vez
y los núcleos se evalúan directamente en cada orden total.
"""

from itertools import combinations_with_replacement
from math import factorial
from typing import Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import ValidationError
from scipy import special, stats
from scipy.special import logsumexp

from ...config.settings import Settings, settings as default_settings
from ...domain.enums.distribution_kind import DistributionKind
from ...domain.exceptions import InputError, PoleError, TruncationError
from ...domain.models.approx_value import ApproxValue, MomentRequest
from ...domain.models.canonical_spectrum import CanonicalSpectrum
from ...infrastructure.logging.metrics import MetricsLogger, track_performance
from ...infrastructure.special.functions import bessel_struve_product, log_bessel_k


_LOG_TWO = float(np.log(2.0))
_LOG_SQRT_PI = 0.5 * float(np.log(np.pi))
_CAP_CHUNK = 1024


# ==========================================
# Núcleos por definición directa
# ==========================================

def log_kernel_u(r: int, k: int, w: np.ndarray) -> np.ndarray:
	"""
	log U_k(w) con U_k(w) = K_{(r−1)/2+k}(w) (w/2)^{(r−1)/2+k} / Γ(r/2+k).

	En w = 0 usa el límite Γ((r−1)/2+k) / (2Γ(r/2+k)) (infinito si r = 1, k = 0).
	"""
	w = np.atleast_1d(np.asarray(w, dtype=float))
	orden = (r - 1) / 2.0 + k
	resultado = np.empty_like(w)
	cero = w == 0
	if np.any(cero):
		resultado[cero] = (
			special.gammaln(orden) - _LOG_TWO - special.gammaln(r / 2.0 + k)
			if orden > 0 else np.inf
		)
	if np.any(~cero):
		wp = w[~cero]
		resultado[~cero] = (
			np.atleast_1d(log_bessel_k(orden, wp))
			+ orden * np.log(wp / 2.0)
			- special.gammaln(r / 2.0 + k)
		)
	return resultado


def kernel_u_direct(r: int, k: int, w) -> np.ndarray:
	"""U_k(w) por su definición con Bessel K."""
	return np.exp(log_kernel_u(r, k, w))


def kernel_d_direct(r: int, k: int, w, config: Optional[Settings] = None) -> np.ndarray:
	"""
	D_k en la abscisa escalada w = z/ρ_r:
	(w/2)[K_{ν+k}(w) L_{ν−1+k}(w) + K_{ν−1+k}(w) L_{ν+k}(w)], ν = (r−1)/2.
	"""
	w = np.atleast_1d(np.asarray(w, dtype=float))
	return 0.5 * np.atleast_1d(bessel_struve_product((r - 1) / 2.0 + k, w, config))


def bound_prefactor(r: int, rho_min: float, n: int) -> float:
	"""Γ((r−1)/2+n) / (2ρ_r√π Γ(r/2+n)): factor de la cota de la densidad."""
	if r < 2 and n == 0:
		return np.inf
	log_g = special.gammaln((r - 1) / 2.0 + n) - special.gammaln(r / 2.0 + n)
	return float(np.exp(log_g - _LOG_TWO - _LOG_SQRT_PI) / rho_min)


def dimension_weights(base: float, ratio: float, cap: int) -> np.ndarray:
	"""
	Pesos (ρ_r/ρ_i) · (2k)!/((k!)² 4^k) · b^k para k = 0 … cap.
	"""
	pesos = np.empty(cap + 1)
	pesos[0] = ratio
	for k in range(cap):
		pesos[k + 1] = pesos[k] * (2 * k + 1) / (2 * k + 2) * base
	return pesos


def dimension_tail_bounds(base: float, ratio: float, upto: int) -> np.ndarray:
	"""
	Cotas superiores de 1 − S_i(n) para n = 0 … upto.

	Los pesos k > n se suman hacia atrás (sin cancelación) y se añade el
	resto w_upto · b/(1−b), que acota la cola geométricamente.
	"""
	if base == 0.0:
		return np.zeros(upto + 1)
	pesos = dimension_weights(base, ratio, upto)
	colas = np.zeros(upto + 1)
	colas[:-1] = np.cumsum(pesos[:0:-1])[::-1]
	return colas + pesos[-1] * base / (1.0 - base)


def _centered(spectrum: CanonicalSpectrum, x) -> np.ndarray:
	return np.atleast_1d(np.asarray(x, dtype=float)) - spectrum.mutual_information


class SeriesService:
	"""
	Servicio de referencia (suma directa y formas cerradas).

	Es el camino lento y de confianza frente al que se valida la
	evaluación rápida por recurrencias.
	"""

	def __init__(self, settings: Optional[Settings] = None):
		"""
		Inicializa el servicio de series.

		Args:
			settings: Configuración (opcional, global por defecto)
		"""
		self.settings = settings or default_settings

	# ==========================================
	# Caja multi-índice
	# ==========================================

	def _validate_caps(self, spectrum: CanonicalSpectrum, caps: Sequence[int]) -> list[int]:
		if spectrum.r < 1:
			raise InputError("La densidad de información necesita r ≥ 1")
		caps = [int(c) for c in caps]
		if len(caps) != spectrum.r - 1:
			raise InputError(f"Se esperaban {spectrum.r - 1} topes, recibidos {len(caps)}")
		if any(c < 0 for c in caps):
			raise InputError("Los topes de la caja deben ser no negativos")
		if sum(caps) + 1 > self.settings.max_box_terms:
			raise InputError(
				f"El orden total de la caja ({sum(caps)}) supera max_box_terms={self.settings.max_box_terms}"
			)
		return caps

	def _weights_by_order(self, spectrum: CanonicalSpectrum, caps: list[int]) -> np.ndarray:
		"""Pesos de la caja agrupados por orden total (longitud Σcaps + 1)."""
		rho = spectrum.as_array()
		ratios = rho[-1] / rho[:-1]
		agrupados = np.ones(1)
		for ratio, cap in zip(ratios, caps):
			agrupados = np.convolve(agrupados, dimension_weights(1.0 - ratio * ratio, ratio, cap))
		return agrupados

	def box_tail(self, spectrum: CanonicalSpectrum, caps: Sequence[int]) -> float:
		"""
		1 − Ŝ(n_1, …, n_{r−1}): masa de los pesos fuera de la caja.

		La suma sobre la caja factoriza en el producto de las sumas parciales
		de cada dimensión.
		"""
		caps = self._validate_caps(spectrum, caps)
		rho = spectrum.as_array()
		ratios = rho[-1] / rho[:-1]
		log_producto = 0.0
		for ratio, cap in zip(ratios, caps):
			cola = dimension_tail_bounds(1.0 - ratio * ratio, ratio, 2 * cap + 256)[cap]
			log_producto += np.log1p(-min(cola, 1.0))
		return float(min(1.0, -np.expm1(log_producto)))

	def caps_for_target(
		self,
		spectrum: CanonicalSpectrum,
		target: float,
		kind: DistributionKind = DistributionKind.PDF,
	) -> list[int]:
		"""
		Topes por dimensión cuya cota de truncamiento es ≤ target.

		La cota se reparte por igual entre dimensiones: cada una debe cumplir
		1 − S_i ≤ 1 − (1 − t)^{1/(r−1)}, con t = target / G(0) para la
		densidad (G decrece con el orden total) y t = 2·target para la CDF.

		Raises:
			TruncationError: Si alguna dimensión supera max_box_terms
		"""
		if target <= 0:
			raise InputError("target debe ser positivo")
		if spectrum.r < 2:
			return []

		if kind == DistributionKind.PDF:
			t = target / bound_prefactor(spectrum.r, spectrum.rho_min, 0)
		else:
			t = 2.0 * target
		if t >= 1.0:
			return [0] * (spectrum.r - 1)
		por_dimension = -np.expm1(np.log1p(-t) / (spectrum.r - 1))

		rho = spectrum.as_array()
		caps = []
		for rho_i in rho[:-1]:
			ratio = rho[-1] / rho_i
			base = 1.0 - ratio * ratio
			limite = _CAP_CHUNK
			while True:
				colas = dimension_tail_bounds(base, ratio, limite)
				cumplen = np.nonzero(colas <= por_dimension)[0]
				if cumplen.size:
					caps.append(int(cumplen[0]))
					break
				if limite >= self.settings.max_box_terms:
					raise TruncationError(
						f"No se alcanza la cota {target:.1e} con topes ≤ {limite}",
						best_bound=float(colas[-1]),
						n_terms=limite,
					)
				limite = min(2 * limite, self.settings.max_box_terms)

		logger.debug(f"Topes para {kind.value} con cota {target:.1e}: {caps}")
		return caps

	def _direct_bound(self, spectrum: CanonicalSpectrum, caps: list[int], kind: DistributionKind) -> float:
		cola = self.box_tail(spectrum, caps)
		if cola == 0.0:
			return 0.0
		if kind == DistributionKind.CDF:
			return 0.5 * cola
		return cola * bound_prefactor(spectrum.r, spectrum.rho_min, sum(caps))

	# ==========================================
	# PDF y CDF por suma directa
	# ==========================================

	@track_performance("pdf_direct")
	def pdf_direct_values(
		self,
		spectrum: CanonicalSpectrum,
		xs,
		caps: Sequence[int],
	) -> tuple[np.ndarray, float, int]:
		"""
		Densidad por la caja multi-índice en un vector de puntos.

		Returns:
			tuple: (valores, error_bound, n_terms)

		Raises:
			PoleError: r = 1 evaluada en x = I
		"""
		caps = self._validate_caps(spectrum, caps)
		r, rho_r = spectrum.r, spectrum.rho_min
		w = np.abs(_centered(spectrum, xs)) / rho_r
		if r == 1 and np.any(w == 0):
			raise PoleError("Con r = 1 la densidad tiene una singularidad logarítmica en x = I")

		pesos = self._weights_by_order(spectrum, caps)
		log_suma = np.full_like(w, -np.inf)
		for k, peso in enumerate(pesos):
			if peso <= 0.0:
				continue
			log_suma = np.logaddexp(log_suma, np.log(peso) + log_kernel_u(r, k, w))

		valores = np.exp(log_suma - np.log(rho_r) - _LOG_SQRT_PI)
		n_terms = int(np.prod([c + 1 for c in caps])) if caps else 1
		return valores, self._direct_bound(spectrum, caps, DistributionKind.PDF), n_terms

	def pdf_direct(self, spectrum: CanonicalSpectrum, x: float, caps: Sequence[int]) -> ApproxValue:
		"""
		Densidad en x por la caja multi-índice con topes `caps`.

		Args:
			spectrum: Espectro con r ≥ 1
			x: Punto de evaluación
			caps: r−1 topes no negativos

		Returns:
			ApproxValue: Valor, términos de la caja y cota de truncamiento
		"""
		valores, cota, n_terms = self.pdf_direct_values(spectrum, [x], caps)
		return ApproxValue(value=float(valores[0]), n_terms=n_terms, error_bound=cota)

	@track_performance("cdf_direct")
	def cdf_direct_values(
		self,
		spectrum: CanonicalSpectrum,
		xs,
		caps: Sequence[int],
	) -> tuple[np.ndarray, float, int]:
		"""
		CDF por la caja multi-índice: F = ½ − V(I−x) si x ≤ I, ½ + V(x−I) si x > I.

		Returns:
			tuple: (valores, error_bound, n_terms)
		"""
		caps = self._validate_caps(spectrum, caps)
		r, rho_r = spectrum.r, spectrum.rho_min
		centrado = _centered(spectrum, xs)
		w = np.abs(centrado) / rho_r

		pesos = self._weights_by_order(spectrum, caps)
		v = np.zeros_like(w)
		for k, peso in enumerate(pesos):
			if peso <= 0.0:
				continue
			v += peso * kernel_d_direct(r, k, w, self.settings)

		valores = np.where(centrado > 0, 0.5 + v, 0.5 - v)
		n_terms = int(np.prod([c + 1 for c in caps])) if caps else 1
		return valores, self._direct_bound(spectrum, caps, DistributionKind.CDF), n_terms

	def cdf_direct(self, spectrum: CanonicalSpectrum, x: float, caps: Sequence[int]) -> ApproxValue:
		"""CDF en x por la caja multi-índice con topes `caps`."""
		valores, cota, n_terms = self.cdf_direct_values(spectrum, [x], caps)
		return ApproxValue(value=float(valores[0]), n_terms=n_terms, error_bound=cota)

	# ==========================================
	# Correlaciones iguales
	# ==========================================

	@staticmethod
	def _equal_center(r: int, rho: float) -> float:
		if not 0.0 < rho < 1.0:
			raise InputError(f"ρ debe estar en (0, 1), recibido {rho}")
		if r < 1:
			raise InputError(f"r debe ser al menos 1, recibido {r}")
		return float(-0.5 * r * np.log1p(-rho * rho))

	def log_pdf_equal(self, r: int, rho: float, x) -> np.ndarray:
		"""log f(x) con r correlaciones iguales a ρ, sin underflow."""
		centro = self._equal_center(r, rho)
		a = np.abs(np.atleast_1d(np.asarray(x, dtype=float)) - centro) / rho
		if r == 1 and np.any(a == 0):
			raise PoleError("Con r = 1 la densidad tiene una singularidad logarítmica en x = I")

		if r % 2 == 0:
			return self._log_pdf_equal_even(r, rho, a)
		return log_kernel_u(r, 0, a) - np.log(rho) - _LOG_SQRT_PI

	@staticmethod
	def _log_pdf_equal_even(r: int, rho: float, a: np.ndarray) -> np.ndarray:
		h = r // 2 - 1
		i = np.arange(h + 1, dtype=float)
		log_coef = special.gammaln(2 * h - i + 1) + i * _LOG_TWO - special.gammaln(h - i + 1) - special.gammaln(i + 1)
		log_a = np.log(np.where(a > 0, a, 1.0))
		log_poli = logsumexp(log_coef[None, :] + i[None, :] * log_a[:, None], axis=1)
		# a = 0: sólo sobrevive el término i = 0
		log_poli = np.where(a > 0, log_poli, log_coef[0])
		return log_poli - a - np.log(rho) - (r - 1) * _LOG_TWO - special.gammaln(h + 1)

	def pdf_equal_bessel(self, r: int, rho: float, x) -> np.ndarray:
		"""Densidad con correlaciones iguales por el término único de Bessel."""
		centro = self._equal_center(r, rho)
		a = np.abs(np.atleast_1d(np.asarray(x, dtype=float)) - centro) / rho
		if r == 1 and np.any(a == 0):
			raise PoleError("Con r = 1 la densidad tiene una singularidad logarítmica en x = I")
		return np.exp(log_kernel_u(r, 0, a) - np.log(rho) - _LOG_SQRT_PI)

	def pdf_equal_closed_form(self, r: int, rho: float, x) -> np.ndarray:
		"""Densidad exponencial-polinómica para r par."""
		if r % 2:
			raise InputError("La forma cerrada exponencial-polinómica necesita r par")
		centro = self._equal_center(r, rho)
		a = np.abs(np.atleast_1d(np.asarray(x, dtype=float)) - centro) / rho
		return np.exp(self._log_pdf_equal_even(r, rho, a))

	def pdf_equal(self, r: int, rho: float, x: float) -> float:
		"""
		Densidad con r correlaciones iguales a ρ.

		Para r par usa la forma cerrada exponencial-polinómica; si no, el
		término único de Bessel.
		"""
		return float(np.exp(self.log_pdf_equal(r, rho, x))[0])

	def v_equal_bessel(self, r: int, rho: float, z) -> np.ndarray:
		"""V(z) = (w/2)[K_ν L_{ν−1} + K_{ν−1} L_ν](w), w = z/ρ, ν = (r−1)/2."""
		w = np.abs(np.atleast_1d(np.asarray(z, dtype=float))) / rho
		return kernel_d_direct(r, 0, w, self.settings)

	@staticmethod
	def v_equal_closed_form(r: int, rho: float, z) -> np.ndarray:
		"""V(z) exponencial-polinómica para r par."""
		if r % 2:
			raise InputError("La forma cerrada exponencial-polinómica necesita r par")
		a = np.abs(np.atleast_1d(np.asarray(z, dtype=float))) / rho
		h = r // 2 - 1
		i = np.arange(h + 1)
		log_coef = (
			special.gammaln(2 * h - i + 1) + i * _LOG_TWO - special.gammaln(h - i + 1)
			- (r - 1) * _LOG_TWO - special.gammaln(h + 1)
		)
		# Σ_{m=0}^{i} a^m / m! para cada i
		potencias = np.cumprod(
			np.concatenate([np.ones((a.size, 1)), a[:, None] / np.arange(1, h + 1)[None, :]], axis=1),
			axis=1,
		)
		parciales = np.cumsum(potencias, axis=1)
		resta = np.exp(logsumexp(log_coef[None, :] + np.log(parciales), axis=1) - a)
		return np.maximum(0.5 - resta, 0.0)

	def cdf_equal(self, r: int, rho: float, x: float) -> float:
		"""CDF con r correlaciones iguales a ρ."""
		centro = self._equal_center(r, rho)
		z = float(x) - centro
		if z == 0.0:
			return 0.5
		if r % 2 == 0:
			v = float(self.v_equal_closed_form(r, rho, abs(z))[0])
		else:
			v = float(self.v_equal_bessel(r, rho, abs(z))[0])
		return 0.5 + v if z > 0 else 0.5 - v

	# ==========================================
	# Fachada
	# ==========================================

	def pdf(self, spectrum: CanonicalSpectrum, x: float, target_error: Optional[float] = None) -> ApproxValue:
		"""
		Densidad en x: fórmula exacta si las correlaciones son iguales, caja
		con topes para la cota pedida en otro caso.
		"""
		if spectrum.r < 1:
			raise InputError("Con r = 0 la densidad de información es degenerada (i ≡ 0)")
		if spectrum.is_equal:
			return ApproxValue.exact(self.pdf_equal(spectrum.r, spectrum.rho_min, x))
		caps = self.caps_for_target(spectrum, target_error or self.settings.target_error, DistributionKind.PDF)
		return self.pdf_direct(spectrum, x, caps)

	def cdf(self, spectrum: CanonicalSpectrum, x: float, target_error: Optional[float] = None) -> ApproxValue:
		"""CDF en x (exacta con correlaciones iguales)."""
		if spectrum.r < 1:
			raise InputError("Con r = 0 la densidad de información es degenerada (i ≡ 0)")
		if spectrum.is_equal:
			return ApproxValue.exact(self.cdf_equal(spectrum.r, spectrum.rho_min, x))
		caps = self.caps_for_target(spectrum, target_error or self.settings.target_error, DistributionKind.CDF)
		return self.cdf_direct(spectrum, x, caps)

	# ==========================================
	# Momentos
	# ==========================================

	def _moment_request(self, m: int) -> MomentRequest:
		try:
			return MomentRequest(m=m, max_order=self.settings.moment_order_max)
		except ValidationError as e:
			raise InputError(f"Orden de momento inválido: {m}") from e

	def central_moment(self, spectrum: CanonicalSpectrum, m: int) -> float:
		"""
		Momento central de orden m.

		Impar → 0. Par → m! · [ρ^m] Π_i Σ_j (2j)!/(4^j (j!)²) ρ_i^{2j},
		por convolución de polinomios en ρ². Con correlaciones iguales:
		m!/(m/2)! · Π_{j=1}^{m/2} (r/2+j−1) · ρ^m.
		"""
		peticion = self._moment_request(m)
		if peticion.is_odd:
			return 0.0
		h = peticion.half

		if spectrum.r >= 1 and spectrum.is_equal:
			log_valor = (
				special.gammaln(m + 1) - special.gammaln(h + 1)
				+ special.gammaln(spectrum.r / 2.0 + h) - special.gammaln(spectrum.r / 2.0)
				+ m * np.log(spectrum.rho_min)
			)
			return float(np.exp(log_valor))

		base = np.empty(h + 1)
		base[0] = 1.0
		for j in range(h):
			base[j + 1] = base[j] * (2 * j + 1) / (2 * j + 2)

		producto = np.zeros(h + 1)
		producto[0] = 1.0
		for rho in spectrum.correlations:
			polinomio = base * (rho * rho) ** np.arange(h + 1)
			producto = np.convolve(producto, polinomio)[: h + 1]

		return float(factorial(m) * producto[h])

	def central_moment_enumerated(self, spectrum: CanonicalSpectrum, m: int) -> float:
		"""
		Momento central por enumeración explícita de {2m_1 + … + 2m_r = m}.

		Exponencial en r; sólo para validación.
		"""
		peticion = self._moment_request(m)
		if peticion.is_odd or spectrum.r == 0:
			return 0.0
		h = peticion.half
		total = 0.0
		# Multiconjuntos de h índices ↔ composiciones (m_1, …, m_r) con Σ m_i = h
		for eleccion in combinations_with_replacement(range(spectrum.r), h):
			termino = float(factorial(m))
			for i, rho in enumerate(spectrum.correlations):
				mi = eleccion.count(i)
				termino *= factorial(2 * mi) / (4 ** mi * factorial(mi) ** 2) * rho ** (2 * mi)
			total += termino
		return total

	@staticmethod
	def fourth_moment_two_sum(spectrum: CanonicalSpectrum) -> float:
		"""9 Σ ρ_i⁴ + 6 Σ_{i>j} ρ_i² ρ_j²."""
		cuadrados = spectrum.as_array() ** 2
		cruzados = sum(cuadrados[i] * cuadrados[j] for i in range(len(cuadrados)) for j in range(i))
		return float(9.0 * np.sum(cuadrados ** 2) + 6.0 * cruzados)

	# ==========================================
	# Función característica y referencia gaussiana
	# ==========================================

	@staticmethod
	def characteristic_function(spectrum: CanonicalSpectrum, t):
		"""Π_i (1 + ρ_i² t²)^{-1/2} (función característica centrada en I)."""
		t_arr = np.atleast_1d(np.asarray(t, dtype=float))
		rho = spectrum.as_array()
		valores = np.exp(-0.5 * np.sum(np.log1p((rho[None, :] * t_arr[:, None]) ** 2), axis=1))
		return float(valores[0]) if np.ndim(t) == 0 else valores

	@staticmethod
	def gaussian_reference(spectrum: CanonicalSpectrum, x):
		"""
		Ley normal con media I y varianza Σρ² evaluada en x.

		Returns:
			tuple: (pdf, cdf)
		"""
		if spectrum.r < 1:
			raise InputError("La referencia gaussiana necesita r ≥ 1")
		normal = stats.norm(loc=spectrum.mutual_information, scale=np.sqrt(spectrum.variance))
		return normal.pdf(x), normal.cdf(x)

	def gaussian_sup_distance(
		self,
		spectrum: CanonicalSpectrum,
		grid,
		cdf_values: Optional[np.ndarray] = None,
	) -> float:
		"""
		sup_x |F(x) − Φ(x)| sobre una rejilla de puntos absolutos.

		Args:
			spectrum: Espectro con r ≥ 1
			grid: Puntos x
			cdf_values: CDF ya evaluada en la rejilla (opcional)
		"""
		grid = np.asarray(grid, dtype=float)
		if cdf_values is None:
			if spectrum.is_equal:
				cdf_values = np.array([self.cdf_equal(spectrum.r, spectrum.rho_min, x) for x in grid])
			else:
				from .fasteval_service import FastEvaluator

				evaluador = FastEvaluator(spectrum, self.settings.target_error, settings=self.settings)
				cdf_values = np.array([v.value for v in evaluador.cdf_values(grid)])
		_, gauss = self.gaussian_reference(spectrum, grid)
		distancia = float(np.max(np.abs(np.asarray(cdf_values) - gauss)))
		MetricsLogger.log_event("GAUSSIAN_SUP_DISTANCE", r=spectrum.r, distance=distancia)
		return distancia


# ============================================================================
# FUNCIÓN FACTORY (SINGLETON)
# ============================================================================

_series_service: Optional[SeriesService] = None


def get_series_service() -> SeriesService:
	"""
	Obtiene la instancia singleton del servicio de series.

	Returns:
		SeriesService: Instancia del servicio
	"""
	global _series_service

	if _series_service is None:
		_series_service = SeriesService()
		logger.info("✅ SeriesService inicializado")

	return _series_service
