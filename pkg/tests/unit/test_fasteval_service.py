"""
Tests unitarios para la evaluación rápida por recurrencias.
"""

import numpy as np
import pytest
import sys
from pathlib import Path

# Añadir el directorio raíz al path
ROOT_DIR = Path(__file__).parent.parent.parent
sys.path.insert(0, str(ROOT_DIR))

from src.config.scenarios import awgn_brownian_spectrum
from src.domain.enums import DistributionKind
from src.domain.exceptions import NotApplicableError, TruncationError
from src.domain.models import CanonicalSpectrum
from src.application.services import FastEvalService, FastEvaluator, SeriesService
from src.application.services.fasteval_service import d0_quadrature, kernel_recurrence
from src.application.services.series_service import kernel_d_direct, kernel_u_direct


class TestKernelRecurrence:
    """Tests de las recurrencias de U_k y D_k."""

    @pytest.mark.parametrize("r", [2, 3, 6])
    def test_u_matches_bessel_definition(self, r):
        """Test: U_k por recurrencia = U_k por Bessel K."""
        w = np.array([0.0, 0.5, 5.0, 50.0])
        u, _ = kernel_recurrence(r, w, 50, with_d=False)

        for k in (0, 1, 7, 25, 50):
            assert np.allclose(u[k], kernel_u_direct(r, k, w), rtol=1e-10, atol=0), f"k={k}"

    @pytest.mark.parametrize("r", [2, 5])
    def test_d_matches_struve_definition(self, r):
        """Test: D_k por recurrencia = D_k por Bessel·Struve."""
        w = np.array([0.0, 0.3, 2.0, 12.0])
        _, d = kernel_recurrence(r, w, 30)

        for k in (0, 3, 12, 30):
            assert np.allclose(d[k], kernel_d_direct(r, k, w), rtol=0, atol=1e-12), f"k={k}"

    def test_d_decreasing(self):
        """Test: 0 ≤ D_{k+1} ≤ D_k ≤ ½."""
        _, d = kernel_recurrence(3, np.linspace(0.0, 20.0, 21), 40)

        assert np.all(d >= 0) and np.all(d <= 0.5)
        assert np.all(np.diff(d, axis=0) <= 1e-16)

    def test_no_overflow_far_out(self):
        """Test: El estado no desborda para w grande con muchos términos."""
        u, _ = kernel_recurrence(4, np.array([800.0]), 2000, with_d=False)

        assert np.all(np.isfinite(u))

    def test_d0_quadrature(self):
        """Test: La cuadratura de D_0 coincide con la forma Bessel·Struve."""
        assert d0_quadrature(3, 1.5) == pytest.approx(kernel_d_direct(3, 0, 1.5)[0], rel=1e-8)
        assert d0_quadrature(3, 0.0) == 0.0


class TestCoefficients:
    """Tests de γ_j, δ_k y la tabla cacheada."""

    def test_bell_identity(self, fasteval_service, three_distinct):
        """Test: δ_k por la recurrencia = B_k(1!γ_1, …)/k!."""
        tabla = fasteval_service.coefficient_table(three_distinct, 12)

        for k in range(13):
            assert FastEvalService.delta_bell(tabla, k) == pytest.approx(tabla.deltas[k], rel=1e-12)

    def test_r2_deltas_are_dimension_weights(self, fasteval_service, two_distinct):
        """Test: Con r = 2, P·δ_k coincide con los pesos de la única dimensión."""
        from src.application.services.series_service import dimension_weights

        tabla = fasteval_service.coefficient_table(two_distinct, 30)
        ratio = 0.3 / 0.9

        assert np.allclose(tabla.prefactor * tabla.deltas[:31], dimension_weights(1 - ratio ** 2, ratio, 30), rtol=1e-13)

    def test_gamma_coeff(self, fasteval_service, two_distinct):
        """Test: γ_1 = (1 − 1/9)/2 = 4/9."""
        assert fasteval_service.gamma_coeff(two_distinct, 1) == pytest.approx(4.0 / 9.0, rel=1e-15)

    def test_table_cached(self, fasteval_service, three_distinct):
        """Test: El mismo espectro reutiliza la tabla."""
        a = fasteval_service.coefficient_table(three_distinct, 10)
        b = fasteval_service.coefficient_table(CanonicalSpectrum(correlations=[0.2, 0.5, 0.8]), 20)

        assert a is b
        assert b.max_index >= 20

    def test_r1_not_applicable(self, fasteval_service):
        """Test: r = 1 → NotApplicableError."""
        with pytest.raises(NotApplicableError):
            fasteval_service.coefficient_table(CanonicalSpectrum(correlations=[0.5]))


class TestRequiredTerms:
    """Tests del número de términos para la cota pedida."""

    # r = 15, PDF: la cota baja de 1e−2 en n = 1494; el valor 1688 que suele
    # citarse corresponde a una cota de 6.45e−3 con cualquiera de las dos
    # convenciones de ρ_i(T) (π o π²)
    @pytest.mark.parametrize("r,pdf_n,cdf_n", [(2, 15, 20), (5, 141, 196), (10, 638, 886), (15, 1494, 2071)])
    def test_awgn_term_counts(self, fasteval_service, r, pdf_n, cdf_n):
        """Test: Canal AWGN con T = 1 y cota 1e−2."""
        spectrum = awgn_brownian_spectrum(1.0, r)

        n_pdf = fasteval_service.required_terms(spectrum, 1e-2, DistributionKind.PDF)
        n_cdf = fasteval_service.required_terms(spectrum, 1e-2, DistributionKind.CDF)

        print(f"\n🔢 r={r}: pdf n={n_pdf} (esperado {pdf_n}), cdf n={n_cdf} (esperado {cdf_n})")
        assert abs(n_pdf - pdf_n) <= 2
        assert abs(n_cdf - cdf_n) <= 2

    def test_bound_met_and_minimal(self, fasteval_service, three_distinct):
        """Test: La cota se cumple en n y no en n − 1."""
        n = fasteval_service.required_terms(three_distinct, 1e-6, DistributionKind.PDF)

        assert fasteval_service.pdf_bound(three_distinct, n) <= 1e-6
        assert fasteval_service.pdf_bound(three_distinct, n - 1) > 1e-6

    def test_monotone_in_target(self, fasteval_service, awgn_r5):
        """Test: Cotas más estrictas necesitan más términos."""
        ns = [fasteval_service.required_terms(awgn_r5, t, DistributionKind.CDF) for t in (1e-2, 1e-4, 1e-8)]

        assert ns == sorted(ns)
        assert ns[0] < ns[-1]

    def test_truncation_error(self, fasteval_service, awgn_r5):
        """Test: max_terms insuficiente → TruncationError con la mejor cota."""
        with pytest.raises(TruncationError) as exc_info:
            fasteval_service.required_terms(awgn_r5, 1e-12, DistributionKind.PDF, max_terms=20)

        assert exc_info.value.n_terms == 20
        assert exc_info.value.best_bound > 1e-12

    def test_equal_not_applicable(self, fasteval_service, equal_r4):
        """Test: Correlaciones iguales → NotApplicableError."""
        with pytest.raises(NotApplicableError):
            fasteval_service.required_terms(equal_r4, 1e-8)


class TestFastEvaluation:
    """Tests de pdf_fast, cdf_fast y FastEvaluator."""

    def test_matches_direct_r2(self, fasteval_service, series_service, two_distinct):
        """Test: Con r = 2 la serie rápida con n términos = caja con tope n."""
        evaluador = FastEvaluator(two_distinct, 1e-10, service=fasteval_service, settings=fasteval_service.settings)
        n = evaluador.terms(DistributionKind.PDF)
        xs = two_distinct.mutual_information + np.array([0.0, 0.4, -1.2, 3.0])

        rapido = np.array([v.value for v in evaluador.pdf_values(xs)])
        directo, _, _ = series_service.pdf_direct_values(two_distinct, xs, [n])

        assert np.allclose(rapido, directo, rtol=0, atol=1e-12)

    def test_matches_direct_r3(self, fasteval_service, series_service, three_distinct):
        """Test: PDF y CDF rápidas frente a la caja con cota 1e−12."""
        xs = three_distinct.mutual_information + np.linspace(-4.0, 4.0, 11)
        caps_pdf = series_service.caps_for_target(three_distinct, 1e-12, DistributionKind.PDF)
        caps_cdf = series_service.caps_for_target(three_distinct, 1e-12, DistributionKind.CDF)
        evaluador = FastEvaluator(three_distinct, 1e-12, service=fasteval_service, settings=fasteval_service.settings)

        pdf_directa, _, _ = series_service.pdf_direct_values(three_distinct, xs, caps_pdf)
        cdf_directa, _, _ = series_service.cdf_direct_values(three_distinct, xs, caps_cdf)

        assert np.allclose([v.value for v in evaluador.pdf_values(xs)], pdf_directa, rtol=0, atol=1e-10)
        assert np.allclose([v.value for v in evaluador.cdf_values(xs)], cdf_directa, rtol=0, atol=1e-10)

    def test_cdf_center_exact(self, fasteval_service, two_distinct):
        """Test: F(I) = ½ exactamente."""
        assert fasteval_service.cdf_fast(two_distinct, two_distinct.mutual_information).value == 0.5

    def test_cdf_tails(self, fasteval_service, awgn_r5):
        """Test: F → 0 y F → 1 en las colas."""
        centro = awgn_r5.mutual_information

        assert fasteval_service.cdf_fast(awgn_r5, centro - 40.0).value < 1e-7
        assert fasteval_service.cdf_fast(awgn_r5, centro + 40.0).value > 1.0 - 1e-7

    def test_far_tail_d0_clamped(self, fasteval_service, awgn_r5):
        """Test: En la cola lejana D_0 redondea por encima de ½ y no rompe el estado."""
        valor = fasteval_service.cdf_fast(awgn_r5, awgn_r5.mutual_information - 40.0)

        assert 0.0 <= valor.value <= 1e-7
        assert valor.error_bound <= fasteval_service.settings.target_error

    def test_cdf_grid_monotone(self, fasteval_service, awgn_r5):
        """Test: Rejilla de 201 puntos en [−3, 3] con cota 1e−6: F en [0, 1] y creciente."""
        evaluador = FastEvaluator(awgn_r5, 1e-6, service=fasteval_service, settings=fasteval_service.settings)
        valores = evaluador.cdf_values(np.linspace(-3.0, 3.0, 201))
        cdf = np.array([v.value for v in valores])
        cota = max(v.error_bound for v in valores)

        assert np.all((cdf >= 0.0) & (cdf <= 1.0))
        assert np.min(np.diff(cdf)) >= -2 * cota

    def test_perturbed_equal(self, fasteval_service, series_service):
        """Test: ρ = [0.5 + 1e−12, 0.5] coincide con la fórmula de Laplace."""
        spectrum = CanonicalSpectrum(correlations=[0.5 + 1e-12, 0.5])
        x = spectrum.mutual_information + 0.3

        assert fasteval_service.pdf_fast(spectrum, x).value == pytest.approx(series_service.pdf_equal(2, 0.5, x), abs=1e-9)

    def test_equal_delegates(self, fasteval_service, series_service, equal_r4):
        """Test: Con correlaciones iguales se usa la forma cerrada (cota 0)."""
        x = equal_r4.mutual_information + 0.2
        valor = fasteval_service.pdf_fast(equal_r4, x)

        assert valor.error_bound == 0.0
        assert valor.value == series_service.pdf_equal(4, 0.3, x)

    def test_bound_reported(self, fasteval_service, three_distinct):
        """Test: La cota devuelta respeta la pedida."""
        valor = fasteval_service.pdf_fast(three_distinct, 0.3, target_error=1e-6)

        assert valor.error_bound <= 1e-6
        assert valor.n_terms >= 1

    def test_underflow_and_log_pdf(self, fasteval_service, two_distinct):
        """Test: Lejos del centro f se anula pero log f sigue siendo finito."""
        evaluador = FastEvaluator(two_distinct, 1e-8, service=fasteval_service, settings=fasteval_service.settings)
        x = two_distinct.mutual_information + 1000.0

        valor = evaluador.pdf_values([x])[0]
        log_valor = evaluador.log_pdf_values([x])[0]

        assert valor.value == 0.0
        assert valor.underflow
        assert np.isfinite(log_valor) and log_valor < -1000.0

    def test_log_pdf_consistent(self, fasteval_service, three_distinct):
        """Test: log_pdf_values = log(pdf_values) donde no hay underflow."""
        evaluador = FastEvaluator(three_distinct, 1e-10, service=fasteval_service, settings=fasteval_service.settings)
        xs = np.linspace(-2.0, 4.0, 13)

        valores = np.array([v.value for v in evaluador.pdf_values(xs)])

        assert np.allclose(evaluador.log_pdf_values(xs), np.log(valores), rtol=1e-12)

    def test_workers_same_result(self, fasteval_service, awgn_r5):
        """Test: El reparto en hilos no cambia los valores ni su orden."""
        xs = np.linspace(-3.0, 6.0, 600)
        uno = FastEvaluator(awgn_r5, 1e-8, workers=1, service=fasteval_service, settings=fasteval_service.settings)
        cuatro = FastEvaluator(awgn_r5, 1e-8, workers=4, service=fasteval_service, settings=fasteval_service.settings)

        assert [v.value for v in uno.cdf_values(xs)] == [v.value for v in cuatro.cdf_values(xs)]

    def test_terms_computed_once(self, fasteval_service, awgn_r5):
        """Test: n se calcula una vez por tipo y evaluador."""
        evaluador = FastEvaluator(awgn_r5, 1e-6, service=fasteval_service, settings=fasteval_service.settings)
        n = evaluador.terms(DistributionKind.PDF)
        evaluador.pdf_values([0.0, 1.0])

        assert evaluador.terms(DistributionKind.PDF) == n
        assert evaluador.pdf_values([1.0])[0].n_terms == n + 1


class TestCharacteristicSeries:
    """Tests de la función característica en forma de coeficientes."""

    @pytest.mark.parametrize("t", [0.0, 0.5, 2.0, 10.0])
    def test_matches_product_form(self, fasteval_service, three_distinct, t):
        """Test: P Σ δ_k q^{r/2+k} = Π (1 + ρ_i²t²)^{-1/2} dentro de la cota."""
        serie = fasteval_service.characteristic_function_series(three_distinct, t, 200)
        producto = SeriesService.characteristic_function(three_distinct, t)

        assert abs(serie.value - producto) <= serie.error_bound + 1e-14

    def test_equal_not_applicable(self, fasteval_service, equal_r2):
        """Test: Correlaciones iguales → NotApplicableError."""
        with pytest.raises(NotApplicableError):
            fasteval_service.characteristic_function_series(equal_r2, 1.0, 10)


def half_line_rule(width: float, panels: int = 120, order: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Nodos y pesos de Gauss-Legendre compuesto en [0, width]."""
    nodos, pesos = np.polynomial.legendre.leggauss(order)
    bordes = np.linspace(0.0, width, panels + 1)
    centros = 0.5 * (bordes[:-1] + bordes[1:])
    mitades = 0.5 * np.diff(bordes)
    return (centros[:, None] + mitades[:, None] * nodos).ravel(), (mitades[:, None] * pesos).ravel()


class TestIntegralIdentities:
    """Tests de la densidad rápida integrada por cuadratura."""

    # r par: U_k(w) es exponencial por polinomio, sin términos w^j log w en w = 0
    SPECTRA = [[0.9, 0.3], [0.8, 0.6, 0.4, 0.3]]

    @staticmethod
    def symmetric_pdf(fasteval_service, spectrum):
        evaluador = FastEvaluator(spectrum, 1e-12, service=fasteval_service, settings=fasteval_service.settings)
        z, pesos = half_line_rule(60.0 * spectrum.rho_max)
        f = np.array([v.value for v in evaluador.pdf_values(spectrum.mutual_information + z)])
        return z, pesos, f

    @pytest.mark.parametrize("correlations", SPECTRA)
    def test_fourier_transform_is_characteristic_function(self, fasteval_service, correlations):
        """Test: ∫ f(I+z) cos(tz) dz = Π (1 + ρ_i²t²)^{-1/2}."""
        spectrum = CanonicalSpectrum(correlations=correlations)
        z, pesos, f = self.symmetric_pdf(fasteval_service, spectrum)

        for t in (0.0, 0.5, 1.0, 3.0):
            transformada = 2.0 * np.sum(pesos * f * np.cos(t * z))
            assert transformada == pytest.approx(SeriesService.characteristic_function(spectrum, t), abs=1e-6), f"t={t}"

    @pytest.mark.parametrize("correlations", SPECTRA)
    def test_central_moments(self, fasteval_service, series_service, correlations):
        """Test: ∫ (x − I)^m f dx = momento central en forma cerrada (m = 2, 4)."""
        spectrum = CanonicalSpectrum(correlations=correlations)
        z, pesos, f = self.symmetric_pdf(fasteval_service, spectrum)

        for m in (2, 4):
            integral = 2.0 * np.sum(pesos * z ** m * f)
            esperado = series_service.central_moment(spectrum, m)
            print(f"\n📐 m={m}: {integral:.10f} frente a {esperado:.10f}")
            assert integral == pytest.approx(esperado, abs=1e-6), f"m={m}"
