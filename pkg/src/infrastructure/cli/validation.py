"""
Batería de comprobaciones de `validate`.

Cada comprobación devuelve (estado, detalle) con estado pass, fail o
skipped; el resultado sólo depende del espectro, la configuración y la
semilla.
"""

from typing import Callable, Iterator, Optional

import numpy as np
from loguru import logger
from scipy import integrate, stats

from ...application.services.cca_service import CCAService
from ...application.services.fasteval_service import FastEvaluator, FastEvalService
from ...application.services.oracle_service import OracleService
from ...application.services.series_service import SeriesService
from ...config.settings import Settings
from ...domain.models.canonical_spectrum import CanonicalSpectrum
from ...domain.models.covariance_model import CovarianceModel
from ...infrastructure.logging.metrics import MetricsLogger


PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
CheckResult = tuple[str, str]

_KS_SIGNIFICANCE = 1e-3
_NORMALIZATION_POINTS = 2000


class ValidationSuite:
    """
    Comprobaciones de un espectro contra sus oráculos.

    Args:
        spectrum: Espectro a validar
        settings: Configuración efectiva del trabajo
        n_samples: Muestras Monte Carlo por construcción
        seed: Semilla de los muestreadores
        model: Modelo de covarianza de origen (opcional)
    """

    def __init__(
        self,
        spectrum: CanonicalSpectrum,
        settings: Settings,
        n_samples: int,
        seed: int,
        model: Optional[CovarianceModel] = None,
    ):
        self.spectrum = spectrum
        self.settings = settings
        self.n_samples = n_samples
        self.seed = seed
        self.model = model
        self.series = SeriesService(settings)
        self.oracle = OracleService(settings)
        self.evaluator = FastEvaluator(
            spectrum, settings.target_error, settings=settings, service=FastEvalService(settings)
        )

    def checks(self) -> list[tuple[str, Callable[[], CheckResult]]]:
        return [
            ("cca_residuals", self.check_cca_residuals),
            ("cdf_at_center", self.check_cdf_at_center),
            ("cdf_symmetry", self.check_cdf_symmetry),
            ("cdf_monotone", self.check_cdf_monotone),
            ("pdf_normalization", self.check_pdf_normalization),
            ("second_moment", self.check_second_moment),
            ("fourth_moment", self.check_fourth_moment),
            ("odd_moments", self.check_odd_moments),
            ("moment_enumeration", self.check_moment_enumeration),
            ("quadrature_vs_fast", self.check_quadrature),
            ("monte_carlo_ks", self.check_monte_carlo_ks),
            ("cross_construction_ks", self.check_cross_construction),
        ]

    def run(self) -> Iterator[tuple[str, str, str]]:
        """Ejecuta las comprobaciones en orden y produce (check, estado, detalle)."""
        for nombre, check in self.checks():
            try:
                estado, detalle = check()
            except Exception as e:
                # una comprobación que revienta cuenta como fallo y no corta la tabla
                MetricsLogger.log_error("VALIDATION_CHECK_FAILED", e, check=nombre)
                estado, detalle = FAIL, f"{type(e).__name__}: {e}"
            logger.debug(f"{nombre}: {estado} ({detalle})")
            yield nombre, estado, detalle

    # ==========================================
    # Auxiliares
    # ==========================================

    def _grid(self) -> np.ndarray:
        ancho = 5.0 * self.spectrum.rho_max
        return self.spectrum.mutual_information + np.linspace(-ancho, ancho, 11)

    def _cdf(self, xs) -> tuple[np.ndarray, float]:
        valores = self.evaluator.cdf_values(xs)
        return np.array([v.value for v in valores]), max(v.error_bound for v in valores)

    def _pdf(self, xs) -> tuple[np.ndarray, float]:
        valores = self.evaluator.pdf_values(xs)
        return np.array([v.value for v in valores]), max(v.error_bound for v in valores)

    # ==========================================
    # Comprobaciones
    # ==========================================

    def check_cca_residuals(self) -> CheckResult:
        if self.model is None:
            return SKIPPED, "entrada sin modelo de covarianza"
        cca = CCAService(self.settings)
        espectro, par = cca.canonical_spectrum(self.model)
        residuos = cca.whitening_residuals(self.model, par, espectro)
        peor = max(residuos.values())
        return (PASS if peor <= 1e-8 else FAIL), f"max_residual={peor:.3e}"

    def check_cdf_at_center(self) -> CheckResult:
        valores, _ = self._cdf([self.spectrum.mutual_information])
        return (PASS if valores[0] == 0.5 else FAIL), f"F(I)={float(valores[0]):.6f}"

    def check_cdf_symmetry(self) -> CheckResult:
        z = np.linspace(0.0, 5.0 * self.spectrum.rho_max, 6)[1:]
        centro = self.spectrum.mutual_information
        izquierda, cota = self._cdf(centro - z)
        derecha, _ = self._cdf(centro + z)
        peor = float(np.max(np.abs(izquierda + derecha - 1.0)))
        return (PASS if peor <= 2 * cota + 1e-15 else FAIL), f"max|F(I-z)+F(I+z)-1|={peor:.3e}"

    def check_cdf_monotone(self) -> CheckResult:
        valores, cota = self._cdf(self._grid())
        peor = float(np.min(np.diff(valores)))
        return (PASS if peor >= -(2 * cota + 1e-15) else FAIL), f"min_step={peor:.3e}"

    def check_pdf_normalization(self) -> CheckResult:
        if self.spectrum.r < 2:
            return SKIPPED, "r = 1: singularidad logarítmica en x = I"
        ancho = 60.0 * self.spectrum.rho_max
        centro = self.spectrum.mutual_information
        mitad = np.linspace(0.0, ancho, _NORMALIZATION_POINTS + 1)
        derecha, _ = self._pdf(centro + mitad)
        izquierda, _ = self._pdf(centro - mitad)
        masa = integrate.simpson(derecha, x=mitad) + integrate.simpson(izquierda, x=mitad)
        return (PASS if abs(masa - 1.0) <= 1e-6 else FAIL), f"integral={masa:.12f}"

    def check_second_moment(self) -> CheckResult:
        valor = self.series.central_moment(self.spectrum, 2)
        esperado = self.spectrum.variance
        error = abs(valor - esperado)
        return (PASS if error <= 1e-14 * max(1.0, esperado) else FAIL), f"error={error:.3e}"

    def check_fourth_moment(self) -> CheckResult:
        valor = self.series.central_moment(self.spectrum, 4)
        esperado = self.series.fourth_moment_two_sum(self.spectrum)
        error = abs(valor - esperado) / max(1.0, esperado)
        return (PASS if error <= 1e-12 else FAIL), f"relative_error={error:.3e}"

    def check_odd_moments(self) -> CheckResult:
        impares = [self.series.central_moment(self.spectrum, m) for m in (1, 3, 5)]
        return (PASS if all(v == 0.0 for v in impares) else FAIL), f"values={impares}"

    def check_moment_enumeration(self) -> CheckResult:
        if self.spectrum.r > 6:
            return SKIPPED, "enumeración limitada a r ≤ 6"
        valor = self.series.central_moment(self.spectrum, 6)
        esperado = self.series.central_moment_enumerated(self.spectrum, 6)
        error = abs(valor - esperado) / max(1.0, esperado)
        return (PASS if error <= 1e-12 else FAIL), f"relative_error={error:.3e}"

    def check_quadrature(self) -> CheckResult:
        if self.spectrum.r < 2:
            return SKIPPED, "la cuadratura necesita r ≥ 2"
        puntos = self._grid()[1::2]
        rapidos, cota = self._pdf(puntos)
        peor = 0.0
        for x, rapido in zip(puntos, rapidos):
            valor, _ = self.oracle.pdf_quadrature(self.spectrum, x)
            peor = max(peor, abs(valor - rapido))
        return (PASS if peor <= cota + 2e-8 else FAIL), f"max_diff={peor:.3e}"

    def check_monte_carlo_ks(self) -> CheckResult:
        lote = self.oracle.sample_sum_representation(self.spectrum, self.n_samples, self.seed)
        rejilla = np.linspace(lote.values.min(), lote.values.max(), 2001)
        valores, cota = self._cdf(rejilla)
        estadistico = self.oracle.ks_statistic(lote, self.oracle.tabulated_cdf(rejilla, valores))
        umbral = float(stats.kstwo.isf(_KS_SIGNIFICANCE, lote.n)) + 2 * cota + 1e-4
        return (PASS if estadistico <= umbral else FAIL), f"D={estadistico:.5f} threshold={umbral:.5f}"

    def check_cross_construction(self) -> CheckResult:
        suma = self.oracle.sample_sum_representation(self.spectrum, self.n_samples, self.seed)
        pares = self.oracle.sample_joint_gaussian(self.spectrum, self.n_samples, self.seed + 1)
        estadistico, p_valor = self.oracle.two_sample_ks(suma, pares)
        return (PASS if p_valor >= _KS_SIGNIFICANCE else FAIL), f"D={estadistico:.5f} p={p_valor:.4f}"
