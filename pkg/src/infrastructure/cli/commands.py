"""
Ejecución de trabajos del CLI.

Cada comando produce una tabla (cabecera + filas) que se escribe en CSV;
los errores se registran una vez aquí y se traducen a códigos de salida.
"""

import time
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from loguru import logger

from ...application.services.cca_service import CCAService
from ...application.services.fasteval_service import FastEvaluator, FastEvalService
from ...application.services.oracle_service import OracleService
from ...application.services.series_service import SeriesService
from ...config.settings import Settings, settings as default_settings
from ...domain.enums.distribution_kind import DistributionKind
from ...domain.enums.job_command import JobCommand
from ...domain.exceptions import InputError, NotApplicableError, exit_code_for
from ...domain.models.approx_value import ApproxValue
from ...domain.models.canonical_spectrum import CanonicalSpectrum
from ...domain.models.covariance_model import CovarianceModel
from ..logging.metrics import MetricsLogger
from .csv_writer import write_csv
from .inputs import parse_input, resolve_spectra, single_spectrum
from .schemas.request import JobConfig
from .validation import FAIL, ValidationSuite


Table = tuple[Sequence[str], Iterable[Sequence]]


class JobRunner:
    """
    Ejecutor de trabajos.

    Construye una configuración efectiva a partir de la global y de las
    opciones del trabajo, y servicios propios para ella.
    """

    def __init__(self, config: JobConfig, settings: Optional[Settings] = None):
        self.config = config
        base = settings or default_settings
        cambios = {
            "target_error": config.target_error,
            "max_terms": config.max_terms,
            "seed": config.seed,
        }
        if config.workers is not None:
            cambios["workers"] = config.workers
        self.settings = base.model_copy(update=cambios)

        self.series = SeriesService(self.settings)
        self.fasteval = FastEvalService(self.settings)
        self.oracle = OracleService(self.settings)
        self.cca = CCAService(self.settings)
        self._exit_code = 0

    # ==========================================
    # Punto de entrada
    # ==========================================

    def run(self) -> int:
        """
        Ejecuta el trabajo y escribe su tabla.

        Returns:
            int: 0 éxito, 2 entrada inválida, 3 fallo numérico o validación fallida
        """
        comando = self.config.command
        handlers: dict[JobCommand, Callable[[], Table]] = {
            JobCommand.CCA: self.cca_table,
            JobCommand.PDF: lambda: self.distribution_table(DistributionKind.PDF),
            JobCommand.CDF: lambda: self.distribution_table(DistributionKind.CDF),
            JobCommand.MOMENTS: self.moments_table,
            JobCommand.SAMPLE: self.sample_table,
            JobCommand.VALIDATE: self.validate_table,
            JobCommand.REQUIRED_TERMS: self.required_terms_table,
            JobCommand.BENCH: self.bench_table,
            JobCommand.GAUSSIAN_DISTANCE: self.gaussian_distance_table,
        }

        inicio = time.perf_counter()
        try:
            cabecera, filas = handlers[comando]()
            escritas = write_csv(cabecera, filas, self.config.output)
        except Exception as e:
            MetricsLogger.log_error(type(e).__name__, e, job=comando.value)
            return exit_code_for(e)

        MetricsLogger.log_event(
            "JOB_COMPLETED",
            job=comando.value,
            rows=escritas,
            seconds=time.perf_counter() - inicio,
        )
        return self._exit_code

    # ==========================================
    # Auxiliares
    # ==========================================

    def _spectrum(self) -> CanonicalSpectrum:
        espectro = single_spectrum(self.config, self.settings)
        if espectro.r < 1:
            raise InputError("Con r = 0 la densidad de información es idénticamente 0")
        return espectro

    def _grid(self, spectrum: CanonicalSpectrum) -> tuple[np.ndarray, np.ndarray]:
        """(etiquetas de la rejilla, puntos x absolutos)."""
        etiquetas = self.config.grid.points()
        if self.config.absolute:
            return etiquetas, etiquetas
        return etiquetas, spectrum.mutual_information + etiquetas

    def _evaluator(self, spectrum: CanonicalSpectrum) -> FastEvaluator:
        return FastEvaluator(
            spectrum,
            self.settings.target_error,
            self.settings.max_terms,
            settings=self.settings,
            service=self.fasteval,
        )

    def _direct_values(
        self, spectrum: CanonicalSpectrum, xs: np.ndarray, kind: DistributionKind
    ) -> list[ApproxValue]:
        if spectrum.is_equal:
            evaluar = self.series.pdf if kind == DistributionKind.PDF else self.series.cdf
            return [evaluar(spectrum, x) for x in xs]
        caps = self.series.caps_for_target(spectrum, self.settings.target_error, kind)
        directo = self.series.pdf_direct_values if kind == DistributionKind.PDF else self.series.cdf_direct_values
        valores, cota, n_terms = directo(spectrum, xs, caps)
        return [ApproxValue(value=float(v), n_terms=n_terms, error_bound=cota) for v in valores]

    # ==========================================
    # Comandos
    # ==========================================

    def cca_table(self) -> Table:
        filas = []
        for documento in parse_input(self.config):
            if isinstance(documento, CovarianceModel):
                espectro, par = self.cca.canonical_spectrum(documento)
                residuos = self.cca.whitening_residuals(documento, par, espectro)
            else:
                espectro, residuos = documento, {}
            filas.append(("r", espectro.r))
            filas.extend((f"rho_{i}", rho) for i, rho in enumerate(espectro.correlations, start=1))
            filas.append(("mutual_information", espectro.mutual_information))
            filas.extend((f"residual_{nombre}", valor) for nombre, valor in residuos.items())
        return ("name", "value"), filas

    def distribution_table(self, kind: DistributionKind) -> Table:
        espectro = self._spectrum()
        etiquetas, xs = self._grid(espectro)
        if self.config.method == "direct":
            valores = self._direct_values(espectro, xs, kind)
        else:
            evaluador = self._evaluator(espectro)
            valores = evaluador.pdf_values(xs) if kind == DistributionKind.PDF else evaluador.cdf_values(xs)
        filas = ((x, *v.as_row()) for x, v in zip(etiquetas, valores))
        return ("x", "value", "error_bound", "n_terms"), filas

    def moments_table(self) -> Table:
        espectro = self._spectrum()
        return ("m", "value"), [(m, self.series.central_moment(espectro, m)) for m in self.config.orders]

    def sample_table(self) -> Table:
        espectro = self._spectrum()
        lote = self.oracle.sample(espectro, self.config.n_samples, self.config.seed, self.config.construction)
        return ("value",), ((float(v),) for v in lote.values)

    def required_terms_table(self) -> Table:
        filas = []
        for espectro in resolve_spectra(self.config, self.settings):
            for kind in self.config.kinds:
                n = self.fasteval.required_terms(
                    espectro, self.settings.target_error, kind, self.settings.max_terms
                )
                filas.append((espectro.r, kind.value, n))
        return ("r", "kind", "n"), filas

    def validate_table(self) -> Table:
        documentos = parse_input(self.config)
        modelo = documentos[0] if isinstance(documentos[0], CovarianceModel) else None
        espectro = self._spectrum()
        suite = ValidationSuite(espectro, self.settings, self.config.n_samples, self.config.seed, modelo)
        filas = list(suite.run())
        fallidas = [nombre for nombre, estado, _ in filas if estado == FAIL]
        if fallidas:
            logger.warning(f"Comprobaciones fallidas: {fallidas}")
            self._exit_code = 3
        return ("check", "status", "detail"), filas

    def bench_table(self) -> Table:
        espectro = self._spectrum()
        if espectro.is_equal:
            raise NotApplicableError("bench compara las series generales; el espectro tiene correlaciones iguales")
        _, xs = self._grid(espectro)

        inicio = time.perf_counter()
        directos = np.array([
            [v.value for v in self._direct_values(espectro, xs, kind)]
            for kind in (DistributionKind.PDF, DistributionKind.CDF)
        ])
        t_directo = time.perf_counter() - inicio

        inicio = time.perf_counter()
        evaluador = FastEvaluator(
            espectro, self.settings.target_error, self.settings.max_terms,
            settings=self.settings, service=FastEvalService(self.settings),
        )
        rapidos = np.array([
            [v.value for v in evaluador.pdf_values(xs)],
            [v.value for v in evaluador.cdf_values(xs)],
        ])
        t_rapido = time.perf_counter() - inicio

        diferencia = float(np.max(np.abs(directos - rapidos)))
        aceleracion = t_directo / t_rapido if t_rapido > 0 else float("inf")
        if aceleracion < self.settings.benchmark_speedup_threshold:
            logger.warning(
                f"Aceleración {aceleracion:.1f}x por debajo del umbral "
                f"{self.settings.benchmark_speedup_threshold:.0f}x"
            )
        MetricsLogger.log_event("BENCHMARK", job="bench", r=espectro.r, speedup=aceleracion)
        return ("method", "seconds", "max_abs_diff", "speedup"), [
            ("direct", t_directo, 0.0, 1.0),
            ("fast", t_rapido, diferencia, aceleracion),
        ]

    def gaussian_distance_table(self) -> Table:
        filas = []
        for espectro in resolve_spectra(self.config, self.settings):
            _, xs = self._grid(espectro)
            filas.append((espectro.r, self.series.gaussian_sup_distance(espectro, xs)))
        return ("r", "sup_distance"), filas


def run(config: JobConfig, settings: Optional[Settings] = None) -> int:
    """Ejecuta un trabajo y devuelve su código de salida."""
    return JobRunner(config, settings).run()
