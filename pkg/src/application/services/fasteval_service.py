"""
Servicio de evaluación rápida por recurrencias (serie de índice único).

    f(x) = (1/(ρ_r√π)) · P · Σ_k δ_k U_k(|x − I|/ρ_r)
    V(z) = P · Σ_k δ_k D_k(z),        P = Π_{i<r} ρ_r/ρ_i

Los coeficientes δ_k no dependen de x: una CoefficientTable se construye
una vez por espectro y se comparte en toda la rejilla. U_k y D_k se
obtienen con recurrencias de dos términos a partir de U_0, U_1 y D_0.
"""

from concurrent.futures import ThreadPoolExecutor
import threading
from typing import Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import ValidationError
from scipy import integrate, special

from ...config.settings import Settings, settings as default_settings
from ...domain.enums.distribution_kind import DistributionKind
from ...domain.exceptions import NotApplicableError, NumericalError, TruncationError
from ...domain.models.approx_value import ApproxValue
from ...domain.models.canonical_spectrum import CanonicalSpectrum
from ...domain.models.coefficient_table import CoefficientTable
from ...domain.models.kernel_state import KernelState
from ...infrastructure.logging.metrics import MetricsLogger, track_performance
from .series_service import (
	SeriesService,
	bound_prefactor,
	kernel_d_direct,
	kernel_u_direct,
	log_kernel_u,
)


_LOG_SQRT_PI = 0.5 * float(np.log(np.pi))
_EXTEND_CHUNK = 256
_GRID_CHUNK = 256


def _require_distinct(spectrum: CanonicalSpectrum) -> None:
	if spectrum.r < 2:
		raise NotApplicableError("La serie de índice único necesita r ≥ 2")
	if spectrum.is_equal:
		raise NotApplicableError(
			"Con correlaciones iguales la serie se reduce a un término: use la fórmula cerrada"
		)


def d0_quadrature(r: int, w: float) -> float:
	"""D_0 = (1/√π) ∫_0^w U_0(s) ds por cuadratura adaptativa."""
	if w == 0:
		return 0.0
	valor, _ = integrate.quad(lambda s: float(kernel_u_direct(r, 0, s)[0]), 0.0, w, limit=200)
	return valor / np.sqrt(np.pi)


def initial_kernel_state(r: int, w: np.ndarray, with_d: bool, config: Optional[Settings] = None) -> KernelState:
	"""
	Estado en k = 0: U_0 y U_1 por Bessel K (escalados) y D_0 por el
	producto Bessel·Struve, con cuadratura donde éste no es finito.
	"""
	w = np.asarray(w, dtype=float)
	log_u0 = log_kernel_u(r, 0, w) + w
	log_u1 = log_kernel_u(r, 1, w) + w
	escala = np.maximum(log_u0, log_u1)

	d_curr = None
	if with_d:
		d_curr = kernel_d_direct(r, 0, w, config)
		no_finito = ~np.isfinite(d_curr)
		if np.any(no_finito):
			logger.debug(f"D_0 por cuadratura en {int(np.sum(no_finito))} puntos")
			d_curr = d_curr.copy()
			d_curr[no_finito] = [d0_quadrature(r, float(wi)) for wi in w[no_finito]]
		# D_0 ∈ [0, 1/2]; en la cola el producto Bessel·Struve redondea por encima de 1/2
		d_curr = np.clip(d_curr, 0.0, 0.5)

	try:
		return KernelState(
			r=r,
			z=w,
			u_curr=np.exp(log_u0 - escala),
			u_next=np.exp(log_u1 - escala),
			log_scale=escala,
			d_curr=d_curr,
		)
	except ValidationError as e:
		raise NumericalError(f"Estado inicial del núcleo inválido (r={r}): {e.errors()[0]['msg']}") from e


def kernel_recurrence(r: int, w, n: int, with_d: bool = True) -> tuple[np.ndarray, np.ndarray]:
	"""
	U_k(w) y D_k (en la abscisa escalada w) para k = 0 … n por recurrencia.

	Returns:
		tuple: (U, D) con forma (n+1, len(w))
	"""
	w = np.atleast_1d(np.asarray(w, dtype=float))
	estado = initial_kernel_state(r, w, with_d)
	u = np.empty((n + 1, w.size))
	d = np.empty((n + 1, w.size))
	for k in range(n + 1):
		u[k] = estado.u_curr * np.exp(estado.log_scale - w)
		d[k] = estado.d_curr if with_d else np.nan
		if k < n:
			estado.advance()
	return u, d


class FastEvaluator:
	"""
	Evaluador de rejillas para un espectro y una cota de error fijos.

	La tabla de coeficientes y los números de términos se calculan una vez;
	los puntos se reparten en bloques entre `workers` hilos y las filas se
	devuelven en el orden de la rejilla.
	"""

	def __init__(
		self,
		spectrum: CanonicalSpectrum,
		target_error: Optional[float] = None,
		max_terms: Optional[int] = None,
		settings: Optional[Settings] = None,
		workers: Optional[int] = None,
		service: Optional["FastEvalService"] = None,
	):
		self.settings = settings or default_settings
		self.spectrum = spectrum
		self.target_error = target_error or self.settings.target_error
		self.max_terms = max_terms or self.settings.max_terms
		self.workers = workers or self.settings.workers
		self.service = service or (get_fasteval_service() if settings is None else FastEvalService(self.settings))
		self.series = SeriesService(self.settings)
		self._n: dict[DistributionKind, int] = {}

	@property
	def delegates_to_closed_form(self) -> bool:
		"""True si el espectro tiene correlaciones iguales (fórmula exacta)."""
		return self.spectrum.is_equal

	def terms(self, kind: DistributionKind) -> int:
		"""Número de términos n para la cota pedida (calculado una vez)."""
		if kind not in self._n:
			self._n[kind] = self.service.required_terms(
				self.spectrum, self.target_error, kind, self.max_terms
			)
		return self._n[kind]

	def _chunks(self, w: np.ndarray) -> list[np.ndarray]:
		return [w[i : i + _GRID_CHUNK] for i in range(0, w.size, _GRID_CHUNK)] or [w]

	def _run(self, w: np.ndarray, n: int, with_d: bool) -> list[KernelState]:
		tabla = self.service.coefficient_table(self.spectrum, n)
		pesos = tabla.prefactor * tabla.deltas[: n + 1]

		def evaluar(bloque: np.ndarray) -> KernelState:
			estado = initial_kernel_state(self.spectrum.r, bloque, with_d, self.settings)
			for k in range(n + 1):
				estado.accumulate(pesos[k])
				if k < n:
					estado.advance()
			return estado

		bloques = self._chunks(w)
		if self.workers > 1 and len(bloques) > 1:
			with ThreadPoolExecutor(max_workers=self.workers) as executor:
				return list(executor.map(evaluar, bloques))
		return [evaluar(b) for b in bloques]

	def _scaled_abscissa(self, xs) -> tuple[np.ndarray, np.ndarray]:
		centrado = np.atleast_1d(np.asarray(xs, dtype=float)) - self.spectrum.mutual_information
		return centrado, np.abs(centrado) / self.spectrum.rho_min

	@track_performance("pdf_fast_grid")
	def pdf_values(self, xs) -> list[ApproxValue]:
		"""Densidad en cada punto de xs."""
		if self.delegates_to_closed_form:
			return [
				ApproxValue.exact(self.series.pdf_equal(self.spectrum.r, self.spectrum.rho_min, x))
				for x in np.atleast_1d(xs)
			]

		n = self.terms(DistributionKind.PDF)
		cota = self.service.pdf_bound(self.spectrum, n)
		_, w = self._scaled_abscissa(xs)
		log_norm = -np.log(self.spectrum.rho_min) - _LOG_SQRT_PI

		filas = []
		for estado in self._run(w, n, with_d=False):
			valores = estado.pdf_sum * np.exp(estado.log_scale - estado.z + log_norm)
			for valor, suma in zip(valores, estado.pdf_sum):
				filas.append(ApproxValue(
					value=float(valor),
					n_terms=n + 1,
					error_bound=cota,
					underflow=bool(valor == 0.0 and suma > 0.0),
				))
		return filas

	@track_performance("log_pdf_fast_grid")
	def log_pdf_values(self, xs) -> np.ndarray:
		"""log f en cada punto de xs, sin underflow."""
		if self.delegates_to_closed_form:
			return self.series.log_pdf_equal(self.spectrum.r, self.spectrum.rho_min, xs)

		n = self.terms(DistributionKind.PDF)
		_, w = self._scaled_abscissa(xs)
		log_norm = -np.log(self.spectrum.rho_min) - _LOG_SQRT_PI
		return np.concatenate([e.log_pdf_sum() + log_norm for e in self._run(w, n, with_d=False)])

	@track_performance("cdf_fast_grid")
	def cdf_values(self, xs) -> list[ApproxValue]:
		"""CDF en cada punto de xs."""
		if self.delegates_to_closed_form:
			return [
				ApproxValue.exact(self.series.cdf_equal(self.spectrum.r, self.spectrum.rho_min, x))
				for x in np.atleast_1d(xs)
			]

		n = self.terms(DistributionKind.CDF)
		cota = self.service.cdf_bound(self.spectrum, n)
		centrado, w = self._scaled_abscissa(xs)
		v = np.concatenate([e.cdf_sum for e in self._run(w, n, with_d=True)])
		valores = np.where(centrado > 0, 0.5 + v, 0.5 - v)
		return [ApproxValue(value=float(valor), n_terms=n + 1, error_bound=cota) for valor in valores]


class FastEvalService:
	"""
	Servicio de evaluación rápida.

	Mantiene una caché de tablas de coeficientes por espectro; la
	ampliación de cada tabla es exclusiva y los lectores sólo ven prefijos
	confirmados.
	"""

	def __init__(self, settings: Optional[Settings] = None):
		"""
		Inicializa el servicio.

		Args:
			settings: Configuración (opcional, global por defecto)
		"""
		self.settings = settings or default_settings
		self._tables: dict[tuple[float, ...], CoefficientTable] = {}
		self._lock = threading.Lock()

	# ==========================================
	# Coeficientes
	# ==========================================

	def coefficient_table(self, spectrum: CanonicalSpectrum, upto: int = 0) -> CoefficientTable:
		"""
		Tabla de coeficientes del espectro (cacheada), ampliada hasta `upto`.

		Raises:
			NotApplicableError: r < 2
		"""
		if spectrum.r < 2:
			raise NotApplicableError("Los coeficientes γ_j, δ_k necesitan r ≥ 2")
		clave = tuple(spectrum.correlations)
		with self._lock:
			tabla = self._tables.get(clave)
			if tabla is None:
				tabla = CoefficientTable(spectrum=spectrum)
				self._tables[clave] = tabla
		if upto > tabla.max_index:
			self.extend_deltas(tabla, upto)
		return tabla

	def gamma_coeff(self, spectrum: CanonicalSpectrum, j: int) -> float:
		"""γ_j = Σ_{i<r} (1/2j)(1 − ρ_r²/ρ_i²)^j."""
		return self.coefficient_table(spectrum).gamma(j)

	@track_performance("extend_deltas")
	def extend_deltas(self, table: CoefficientTable, upto: int) -> CoefficientTable:
		"""Completa δ_k hasta `upto` y registra el nuevo estado de la tabla."""
		anterior = table.max_index
		table.extend(upto)
		if table.max_index > anterior:
			MetricsLogger.log_event(
				"COEFFICIENT_TABLE_EXTENDED",
				r=table.spectrum.r,
				k_max=table.max_index,
				scaled_sum=table.partial_scaled_sum,
			)
		return table

	@staticmethod
	def delta_bell(table: CoefficientTable, k: int) -> float:
		"""
		δ_k = B_k(1!γ_1, 2!γ_2, …, k!γ_k) / k! con el polinomio de Bell completo
		B_{n+1} = Σ_{i=0}^{n} C(n, i) B_{n−i} x_{i+1}.
		"""
		x = [special.factorial(j) * table.gamma(j) for j in range(1, k + 1)]
		bell = [1.0]
		for n in range(k):
			bell.append(sum(special.comb(n, i) * bell[n - i] * x[i] for i in range(n + 1)))
		return float(bell[k] / special.factorial(k))

	# ==========================================
	# Cotas y número de términos
	# ==========================================

	def pdf_bound(self, spectrum: CanonicalSpectrum, n: int) -> float:
		"""Γ((r−1)/2+n)/(2ρ_r√πΓ(r/2+n)) · (1 − P Σ_{k≤n} δ_k)."""
		tabla = self.coefficient_table(spectrum, n)
		return bound_prefactor(spectrum.r, spectrum.rho_min, n) * tabla.tail(n)

	def cdf_bound(self, spectrum: CanonicalSpectrum, n: int) -> float:
		"""½ (1 − P Σ_{k≤n} δ_k)."""
		return 0.5 * self.coefficient_table(spectrum, n).tail(n)

	def required_terms(
		self,
		spectrum: CanonicalSpectrum,
		target_error: float,
		kind: DistributionKind = DistributionKind.PDF,
		max_terms: Optional[int] = None,
	) -> int:
		"""
		Menor n cuya cota uniforme es ≤ target_error.

		- pdf: Γ((r−1)/2+n)/(2ρ_r√πΓ(r/2+n)) · (1 − P Σ_{k≤n} δ_k) ≤ target
		- cdf: (1 − P Σ_{k≤n} δ_k) ≤ target

		Sólo usa la tabla de coeficientes (las cotas no dependen de x).

		Raises:
			NotApplicableError: r < 2 o correlaciones iguales
			TruncationError: n superaría max_terms
		"""
		_require_distinct(spectrum)
		max_terms = max_terms or self.settings.max_terms
		tabla = self.coefficient_table(spectrum)
		r = spectrum.r

		inicio, limite = 0, min(_EXTEND_CHUNK, max_terms)
		while True:
			self.extend_deltas(tabla, limite)
			n = np.arange(inicio, limite + 1)
			colas = np.maximum(1.0 - tabla.scaled_partial_sums[inicio : limite + 1], 0.0)
			if kind == DistributionKind.PDF:
				log_g = special.gammaln((r - 1) / 2.0 + n) - special.gammaln(r / 2.0 + n)
				cotas = np.exp(log_g) / (2.0 * spectrum.rho_min * np.sqrt(np.pi)) * colas
			else:
				cotas = colas

			cumplen = np.nonzero(cotas <= target_error)[0]
			if cumplen.size:
				resultado = int(n[cumplen[0]])
				MetricsLogger.log_event(
					"REQUIRED_TERMS", r=r, kind=kind.value, target=target_error, n=resultado
				)
				return resultado

			if limite >= max_terms:
				mejor = float(cotas[-1]) if kind == DistributionKind.PDF else 0.5 * float(cotas[-1])
				raise TruncationError(
					f"La cota {target_error:.1e} necesita más de max_terms={max_terms} términos",
					best_bound=mejor,
					n_terms=max_terms,
				)
			inicio, limite = limite + 1, min(2 * limite, max_terms)

	# ==========================================
	# Evaluación puntual
	# ==========================================

	def pdf_fast(
		self,
		spectrum: CanonicalSpectrum,
		x: float,
		target_error: Optional[float] = None,
		max_terms: Optional[int] = None,
	) -> ApproxValue:
		"""
		Densidad en x por la serie de índice único con n adaptativo.

		Con correlaciones iguales delega en la fórmula cerrada.
		"""
		evaluador = FastEvaluator(spectrum, target_error, max_terms, settings=self.settings, service=self)
		return evaluador.pdf_values([x])[0]

	def cdf_fast(
		self,
		spectrum: CanonicalSpectrum,
		x: float,
		target_error: Optional[float] = None,
		max_terms: Optional[int] = None,
	) -> ApproxValue:
		"""CDF en x por la serie de índice único con n adaptativo."""
		evaluador = FastEvaluator(spectrum, target_error, max_terms, settings=self.settings, service=self)
		return evaluador.cdf_values([x])[0]

	def characteristic_function_series(
		self,
		spectrum: CanonicalSpectrum,
		t: float,
		n: int,
	) -> ApproxValue:
		"""
		Función característica en forma de coeficientes:
		φ(t) = P · Σ_k δ_k q^{r/2+k},  q = 1/(1 + ρ_r² t²),
		con cola ≤ q^{r/2+n+1} · (1 − P Σ_{k≤n} δ_k).
		"""
		_require_distinct(spectrum)
		tabla = self.coefficient_table(spectrum, n)
		q = 1.0 / (1.0 + (spectrum.rho_min * t) ** 2)
		k = np.arange(n + 1)
		valor = tabla.prefactor * float(np.sum(tabla.deltas[: n + 1] * q ** (spectrum.r / 2.0 + k)))
		cota = q ** (spectrum.r / 2.0 + n + 1) * tabla.tail(n)
		return ApproxValue(value=valor, n_terms=n + 1, error_bound=cota)


# ============================================================================
# FUNCIÓN FACTORY (SINGLETON)
# ============================================================================

_fasteval_service: Optional[FastEvalService] = None


def get_fasteval_service() -> FastEvalService:
	"""
	Obtiene la instancia singleton del servicio de evaluación rápida.

	Returns:
		FastEvalService: Instancia del servicio
	"""
	global _fasteval_service

	if _fasteval_service is None:
		_fasteval_service = FastEvalService()
		logger.info("✅ FastEvalService inicializado")

	return _fasteval_service
