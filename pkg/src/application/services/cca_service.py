"""
Servicio de análisis de correlación canónica.

Extrae el espectro canónico (correlaciones, rango, información mutua) de un
modelo gaussiano conjunto:
    M = R_X^{-1/2} R_XY R_Y^{-1/2} = U Σ Vᵀ
    A = Uᵀ R_X^{-1/2},  B = Vᵀ R_Y^{-1/2}
"""

from typing import Optional

import numpy as np
from loguru import logger

from ...config.settings import Settings, settings as default_settings
from ...domain.exceptions import (
	DegenerateModelError,
	InputError,
	NotPositiveSemidefiniteError,
)
from ...domain.models.canonical_spectrum import CanonicalSpectrum, WhiteningPair
from ...domain.models.covariance_model import CovarianceModel
from ...infrastructure.logging.metrics import MetricsLogger, track_performance


def _symmetric_eigh(
	matrix: np.ndarray,
	symmetry_tolerance: float,
) -> tuple[np.ndarray, np.ndarray]:
	matrix = np.asarray(matrix, dtype=float)
	if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
		raise InputError(f"Se esperaba una matriz cuadrada, recibida forma {matrix.shape}")

	escala = max(float(np.max(np.abs(matrix))), np.finfo(float).tiny)
	if float(np.max(np.abs(matrix - matrix.T))) / escala > symmetry_tolerance:
		raise InputError("La matriz no es simétrica dentro de la tolerancia")

	return np.linalg.eigh((matrix + matrix.T) / 2)


def symmetric_sqrt(
	matrix: np.ndarray,
	tolerance: Optional[float] = None,
	symmetry_tolerance: float = 1e-12,
) -> np.ndarray:
	"""
	Raíz cuadrada simétrica semidefinida positiva por autodescomposición.

	Args:
		matrix: Matriz simétrica semidefinida positiva
		tolerance: Autovalores en [-tolerance, 0) se anulan
			(por defecto n·ε·λ_max)
		symmetry_tolerance: Asimetría relativa admitida

	Returns:
		np.ndarray: S simétrica con S·S = matrix

	Raises:
		NotPositiveSemidefiniteError: Algún autovalor < -tolerance
	"""
	autovalores, vectores = _symmetric_eigh(matrix, symmetry_tolerance)
	n = autovalores.size
	if tolerance is None:
		tolerance = n * np.finfo(float).eps * max(float(np.max(np.abs(autovalores))), 0.0)

	if autovalores[0] < -tolerance:
		raise NotPositiveSemidefiniteError(
			f"Autovalor {autovalores[0]:.3e} por debajo de -{tolerance:.1e}"
		)

	raiz = (vectores * np.sqrt(np.clip(autovalores, 0.0, None))) @ vectores.T
	return (raiz + raiz.T) / 2


def inverse_symmetric_sqrt(matrix: np.ndarray, symmetry_tolerance: float = 1e-12) -> np.ndarray:
	"""R^{-1/2} para R simétrica definida positiva."""
	autovalores, vectores = _symmetric_eigh(matrix, symmetry_tolerance)
	if autovalores[0] <= 0:
		raise NotPositiveSemidefiniteError("La matriz no es definida positiva")
	inversa = (vectores / np.sqrt(autovalores)) @ vectores.T
	return (inversa + inversa.T) / 2


def mutual_information(spectrum: CanonicalSpectrum) -> float:
	"""Información mutua ½ Σ log(1/(1−ρ_i²)) en nats."""
	return spectrum.mutual_information


class CCAService:
	"""
	Servicio de análisis de correlación canónica.

	Convierte un CovarianceModel en su espectro canónico y las matrices de
	blanqueo que diagonalizan la covarianza cruzada.
	"""

	def __init__(self, settings: Optional[Settings] = None):
		"""
		Inicializa el servicio.

		Args:
			settings: Configuración (opcional, global por defecto)
		"""
		self.settings = settings or default_settings

	@track_performance("canonical_spectrum")
	def canonical_spectrum(
		self,
		model: CovarianceModel,
		rank_tolerance: Optional[float] = None,
	) -> tuple[CanonicalSpectrum, WhiteningPair]:
		"""
		Calcula el espectro canónico y el par de blanqueo.

		Args:
			model: Modelo gaussiano conjunto validado
			rank_tolerance: Umbral de rango (por defecto c·σ_max·ε con c = max(p, q))

		Returns:
			tuple: (CanonicalSpectrum, WhiteningPair)

		Raises:
			DegenerateModelError: Alguna correlación numéricamente ≥ 1
		"""
		if model.has_means:
			logger.warning("El modelo incluye medias: se ignoran (la ley de i(ξ;η) no depende de ellas)")

		rx_inv = inverse_symmetric_sqrt(model.rx, self.settings.symmetry_tolerance)
		ry_inv = inverse_symmetric_sqrt(model.ry, self.settings.symmetry_tolerance)
		m = rx_inv @ model.rxy @ ry_inv

		u, singulares, vt = np.linalg.svd(m, full_matrices=True)

		if rank_tolerance is None:
			sigma_max = float(singulares[0]) if singulares.size else 0.0
			rank_tolerance = (
				self.settings.rank_tolerance_multiplier(model.p, model.q)
				* sigma_max
				* np.finfo(float).eps
			)

		conservados = singulares[singulares > rank_tolerance]
		limite = 1.0 - self.settings.degenerate_correlation_margin
		if conservados.size and conservados[0] >= limite:
			raise DegenerateModelError(
				f"Correlación canónica {conservados[0]:.15g} numéricamente igual a 1: "
				"la ley conjunta es degenerada"
			)

		spectrum = CanonicalSpectrum(
			correlations=conservados.tolist(),
			rank_tolerance=float(rank_tolerance),
		)
		pair = WhiteningPair(
			a=(u.T @ rx_inv).tolist(),
			b=(vt @ ry_inv).tolist(),
		)

		MetricsLogger.log_event(
			"CANONICAL_SPECTRUM",
			p=model.p,
			q=model.q,
			r=spectrum.r,
			mutual_information=spectrum.mutual_information,
		)
		return spectrum, pair

	def whitening_residuals(
		self,
		model: CovarianceModel,
		pair: WhiteningPair,
		spectrum: CanonicalSpectrum,
	) -> dict[str, float]:
		"""
		Residuos máximos de A R_X Aᵀ = I, B R_Y Bᵀ = I y A R_XY Bᵀ = diag(ρ).

		Returns:
			dict: {"identity_x", "identity_y", "cross"}
		"""
		a, b = pair.a_matrix, pair.b_matrix
		diagonal = np.zeros((model.p, model.q))
		diagonal[np.arange(spectrum.r), np.arange(spectrum.r)] = spectrum.correlations

		return {
			"identity_x": float(np.max(np.abs(a @ model.rx @ a.T - np.eye(model.p)))),
			"identity_y": float(np.max(np.abs(b @ model.ry @ b.T - np.eye(model.q)))),
			"cross": float(np.max(np.abs(a @ model.rxy @ b.T - diagonal))),
		}

	def transform_model(
		self,
		model: CovarianceModel,
		a_hat: np.ndarray,
		b_hat: np.ndarray,
	) -> CovarianceModel:
		"""
		Modelo de (Âξ, B̂η) para Â, B̂ no singulares; conserva el espectro.

		Raises:
			InputError: Si Â o B̂ son singulares o de forma incorrecta
		"""
		a_hat = np.asarray(a_hat, dtype=float)
		b_hat = np.asarray(b_hat, dtype=float)
		if a_hat.shape != (model.p, model.p) or b_hat.shape != (model.q, model.q):
			raise InputError("Las transformaciones deben ser p×p y q×q")
		for nombre, matriz in (("Â", a_hat), ("B̂", b_hat)):
			if np.linalg.matrix_rank(matriz) < matriz.shape[0]:
				raise InputError(f"La transformación {nombre} es singular")

		return CovarianceModel(
			p=model.p,
			q=model.q,
			r_x=(a_hat @ model.rx @ a_hat.T).tolist(),
			r_y=(b_hat @ model.ry @ b_hat.T).tolist(),
			r_xy=(a_hat @ model.rxy @ b_hat.T).tolist(),
		)

	def joint_covariance(self, model: CovarianceModel) -> np.ndarray:
		"""Matriz conjunta por bloques del modelo."""
		return model.joint_covariance()


# ============================================================================
# FUNCIÓN FACTORY (SINGLETON)
# ============================================================================

_cca_service: Optional[CCAService] = None


def get_cca_service() -> CCAService:
	"""
	Obtiene la instancia singleton del servicio de correlación canónica.

	Returns:
		CCAService: Instancia del servicio
	"""
	global _cca_service

	if _cca_service is None:
		_cca_service = CCAService()
		logger.info("✅ CCAService inicializado")

	return _cca_service
