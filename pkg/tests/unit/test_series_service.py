"""
Tests unitarios para SeriesService (suma directa, formas cerradas y momentos).
"""

import numpy as np
import pytest
import sys
from pathlib import Path
from hypothesis import given, settings as hyp_settings, strategies as st
from scipy import special
from scipy.integrate import simpson

# Añadir el directorio raíz al path
ROOT_DIR = Path(__file__).parent.parent.parent
sys.path.insert(0, str(ROOT_DIR))

from src.config.settings import Settings
from src.config.scenarios import equal_spectrum
from src.domain.enums import DistributionKind
from src.domain.exceptions import InputError, PoleError, TruncationError
from src.domain.models import CanonicalSpectrum
from src.application.services import SeriesService
from src.application.services.series_service import (
    bound_prefactor,
    dimension_tail_bounds,
    dimension_weights,
    kernel_d_direct,
    kernel_u_direct,
)


class TestKernels:
    """Tests de los núcleos U_k y D_k y de los pesos por dimensión."""

    def test_u_at_zero_limit(self):
        """Test: U_k(0) = Γ((r−1)/2+k) / (2Γ(r/2+k))."""
        esperado = np.exp(special.gammaln(1.5) - np.log(2.0) - special.gammaln(2.0))

        assert kernel_u_direct(4, 0, 0.0)[0] == pytest.approx(esperado, rel=1e-14)
        assert kernel_u_direct(4, 0, 1e-12)[0] == pytest.approx(esperado, rel=1e-9)

    def test_u_r1_pole(self):
        """Test: U_0(0) = inf para r = 1."""
        assert kernel_u_direct(1, 0, 0.0)[0] == np.inf

    def test_d_limits(self):
        """Test: D_k(0) = 0 y D_k(w) → ½ para w grande."""
        valores = kernel_d_direct(3, 2, np.array([0.0, 60.0]))

        assert valores[0] == 0.0
        assert valores[1] == pytest.approx(0.5, abs=1e-8)

    def test_weights_sum_to_one(self):
        """Test: Σ_k pesos = ratio · (1−b)^{-1/2} = 1 con b = 1 − ratio²."""
        ratio = 0.5
        pesos = dimension_weights(1.0 - ratio * ratio, ratio, 4000)
        colas = dimension_tail_bounds(1.0 - ratio * ratio, ratio, 4000)

        assert pesos.sum() + colas[-1] == pytest.approx(1.0, rel=1e-12)
        assert np.all(np.diff(colas) <= 0)

    def test_zero_base_weights(self):
        """Test: Con correlaciones iguales sólo sobrevive k = 0."""
        assert dimension_weights(0.0, 1.0, 3).tolist() == [1.0, 0.0, 0.0, 0.0]
        assert np.all(dimension_tail_bounds(0.0, 1.0, 5) == 0.0)

    def test_bound_prefactor_decreases(self):
        """Test: G(n) decrece con n y es inf para r = 1, n = 0."""
        valores = [bound_prefactor(3, 0.3, n) for n in range(0, 50, 7)]

        assert np.all(np.diff(valores) < 0)
        assert bound_prefactor(1, 0.3, 0) == np.inf


class TestEqualCorrelations:
    """Tests de las fórmulas para correlaciones iguales."""

    def test_laplace_r2(self, series_service):
        """Test: r = 2, ρ = 0.5: f(x) = e^{−|x−I|/ρ}/(2ρ)."""
        centro = -np.log(0.75)
        xs = centro + np.array([-2.0, -0.3, 0.0, 0.4, 3.0])
        esperado = np.exp(-np.abs(xs - centro) / 0.5) / 1.0

        valores = np.exp(series_service.log_pdf_equal(2, 0.5, xs))

        assert np.allclose(valores, esperado, rtol=1e-14)
        assert series_service.pdf_equal(2, 0.5, centro) == pytest.approx(1.0, rel=1e-14)

    def test_laplace_cdf(self, series_service):
        """Test: F(I + 1) = 1 − ½e^{−2} y F(I) = ½."""
        centro = -np.log(0.75)

        assert series_service.cdf_equal(2, 0.5, centro + 1.0) == pytest.approx(1.0 - 0.5 * np.exp(-2.0), rel=1e-14)
        assert series_service.cdf_equal(2, 0.5, centro - 1.0) == pytest.approx(0.5 * np.exp(-2.0), rel=1e-13)
        assert series_service.cdf_equal(2, 0.5, centro) == 0.5

    def test_r1_bessel_k0(self, series_service):
        """Test: r = 1: f = K_0(|z|/ρ)/(πρ)."""
        centro = -0.5 * np.log(0.75)
        valor = series_service.pdf_equal(1, 0.5, centro + 0.5)

        assert valor == pytest.approx(special.kv(0, 1.0) / (np.pi * 0.5), rel=1e-13)

    def test_r1_pole(self, series_service):
        """Test: r = 1 en x = I → PoleError."""
        with pytest.raises(PoleError):
            series_service.pdf_equal(1, 0.5, -0.5 * np.log(0.75))

    def test_r3_bessel_k1(self, series_service):
        """Test: r = 3: f = w K_1(w)/(πρ), w = |z|/ρ."""
        rho = 0.4
        centro = -1.5 * np.log1p(-rho * rho)
        w = 1.7

        valor = series_service.pdf_equal_bessel(3, rho, centro + w * rho)[0]

        assert valor == pytest.approx(w * special.kv(1, w) / (np.pi * rho), rel=1e-12)

    @pytest.mark.parametrize("r", [2, 4, 6, 10])
    def test_closed_form_matches_bessel(self, series_service, r):
        """Test: Forma exponencial-polinómica = término de Bessel (r par)."""
        rho = 0.3
        centro = -0.5 * r * np.log1p(-rho * rho)
        xs = centro + np.linspace(-5.0, 5.0, 41)

        assert np.allclose(
            series_service.pdf_equal_closed_form(r, rho, xs),
            series_service.pdf_equal_bessel(r, rho, xs),
            rtol=1e-10,
        )

    @pytest.mark.parametrize("r", [2, 4, 8])
    def test_v_closed_form_matches_bessel(self, series_service, r):
        """Test: V(z) exponencial-polinómica = V(z) de Bessel-Struve."""
        z = np.linspace(0.0, 6.0, 31)

        assert np.allclose(
            SeriesService.v_equal_closed_form(r, 0.3, z),
            series_service.v_equal_bessel(r, 0.3, z),
            atol=1e-12,
        )

    def test_closed_form_needs_even_r(self, series_service):
        """Test: r impar en la forma cerrada → InputError."""
        with pytest.raises(InputError):
            series_service.pdf_equal_closed_form(3, 0.5, 0.0)

    def test_log_pdf_far_tail(self, series_service):
        """Test: log f finito aunque f se anule por underflow."""
        valor = series_service.log_pdf_equal(4, 0.1, 2000.0)[0]

        assert np.isfinite(valor)
        assert valor < -10_000

    @pytest.mark.parametrize("rho", [0.0, 1.0, 1.5])
    def test_invalid_rho(self, series_service, rho):
        """Test: ρ fuera de (0, 1) → InputError."""
        with pytest.raises(InputError):
            series_service.cdf_equal(2, rho, 0.0)


class TestDirectSeries:
    """Tests de la caja multi-índice."""

    def test_equal_spectrum_reduces_to_single_term(self, series_service, equal_r2):
        """Test: Con correlaciones iguales la caja da la densidad de Laplace."""
        x = equal_r2.mutual_information + 0.37
        directo = series_service.pdf_direct(equal_r2, x, [5])

        assert directo.value == pytest.approx(series_service.pdf_equal(2, 0.5, x), rel=1e-13)
        assert directo.error_bound == 0.0

    def test_cdf_center(self, series_service, two_distinct):
        """Test: F(I) = ½ exactamente."""
        assert series_service.cdf_direct(two_distinct, two_distinct.mutual_information, [40]).value == 0.5

    def test_normalization(self, series_service, two_distinct):
        """Test: ∫ f = 1 por la suma directa."""
        caps = series_service.caps_for_target(two_distinct, 1e-9)
        centro = two_distinct.mutual_information
        mitad = np.linspace(0.0, 35.0, 3501)

        derecha, _, _ = series_service.pdf_direct_values(two_distinct, centro + mitad, caps)
        izquierda, _, _ = series_service.pdf_direct_values(two_distinct, centro - mitad, caps)
        total = simpson(derecha, x=mitad) + simpson(izquierda, x=mitad)

        print(f"\n📐 ∫f = {total:.10f} con topes {caps}")
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_pdf_is_derivative_of_cdf(self, series_service, three_distinct):
        """Test: (F(x+h) − F(x−h))/2h ≈ f(x)."""
        x = three_distinct.mutual_information + 0.7
        h = 1e-4
        densidad = series_service.pdf(three_distinct, x, 1e-10).value
        derivada = (
            series_service.cdf(three_distinct, x + h, 1e-10).value
            - series_service.cdf(three_distinct, x - h, 1e-10).value
        ) / (2 * h)

        assert derivada == pytest.approx(densidad, rel=1e-5)

    def test_bound_meets_target(self, series_service, three_distinct):
        """Test: Los topes elegidos cumplen la cota pedida."""
        for kind, metodo in ((DistributionKind.PDF, series_service.pdf_direct), (DistributionKind.CDF, series_service.cdf_direct)):
            caps = series_service.caps_for_target(three_distinct, 1e-7, kind)
            resultado = metodo(three_distinct, 0.5, caps)

            assert resultado.error_bound <= 1e-7
            assert resultado.n_terms == int(np.prod([c + 1 for c in caps]))

    def test_box_tail_decreases(self, series_service, two_distinct):
        """Test: La masa fuera de la caja decrece con los topes."""
        colas = [series_service.box_tail(two_distinct, [n]) for n in (0, 10, 100, 400)]

        assert np.all(np.diff(colas) < 0)
        assert 0 < colas[-1] < 1e-6

    def test_caps_validation(self, series_service, three_distinct):
        """Test: Número o signo de topes incorrecto → InputError."""
        with pytest.raises(InputError):
            series_service.pdf_direct(three_distinct, 0.0, [3])
        with pytest.raises(InputError):
            series_service.pdf_direct(three_distinct, 0.0, [3, -1])

    def test_total_order_limit(self, two_distinct):
        """Test: Orden total por encima de max_box_terms → InputError."""
        servicio = SeriesService(Settings(_env_file=None, max_box_terms=10))

        with pytest.raises(InputError):
            servicio.pdf_direct(two_distinct, 0.0, [20])

    def test_caps_truncation_error(self):
        """Test: Correlaciones muy dispares superan max_box_terms → TruncationError."""
        servicio = SeriesService(Settings(_env_file=None, max_box_terms=1000))
        spectrum = CanonicalSpectrum(correlations=[0.999, 0.001])

        with pytest.raises(TruncationError) as exc_info:
            servicio.caps_for_target(spectrum, 1e-8)

        assert exc_info.value.best_bound > 1e-8

    def test_r1_pole(self, series_service):
        """Test: r = 1 en x = I → PoleError."""
        spectrum = CanonicalSpectrum(correlations=[0.5])

        with pytest.raises(PoleError):
            series_service.pdf_direct(spectrum, spectrum.mutual_information, [])

    def test_r0_rejected(self, series_service):
        """Test: r = 0 → InputError."""
        with pytest.raises(InputError):
            series_service.pdf(CanonicalSpectrum(correlations=[]), 0.0)


class TestMoments:
    """Tests de momentos centrales."""

    def test_variance(self, series_service, three_distinct):
        """Test: m = 2 da Σρ²."""
        assert series_service.central_moment(three_distinct, 2) == pytest.approx(three_distinct.variance, rel=1e-14)

    def test_fourth_moment(self, series_service, three_distinct):
        """Test: m = 4 coincide con 9Σρ⁴ + 6Σ_{i>j}ρ_i²ρ_j²."""
        assert series_service.central_moment(three_distinct, 4) == pytest.approx(
            SeriesService.fourth_moment_two_sum(three_distinct), rel=1e-13
        )

    def test_laplace_moments(self, series_service, equal_r2):
        """Test: Laplace con escala ρ: μ_m = m! ρ^m."""
        for m in (2, 4, 6):
            assert series_service.central_moment(equal_r2, m) == pytest.approx(special.factorial(m) * 0.5 ** m, rel=1e-13)

    def test_equal_formula_matches_convolution(self, series_service):
        """Test: Fórmula de correlaciones iguales = convolución (perturbando una ρ)."""
        iguales = equal_spectrum(0.4, 5)
        casi = CanonicalSpectrum(correlations=[0.4] * 4 + [0.4 * (1 - 1e-13)])

        for m in (2, 4, 8):
            assert series_service.central_moment(iguales, m) == pytest.approx(
                series_service.central_moment(casi, m), rel=1e-10
            )

    @pytest.mark.parametrize("m", [1, 3, 5, 7])
    def test_odd_moments_zero(self, series_service, awgn_r5, m):
        """Test: Momentos impares nulos."""
        assert series_service.central_moment(awgn_r5, m) == 0.0

    @pytest.mark.parametrize("m", [0, 65])
    def test_invalid_order(self, series_service, two_distinct, m):
        """Test: m = 0 o m > moment_order_max → InputError."""
        with pytest.raises(InputError):
            series_service.central_moment(two_distinct, m)

    def test_order_limit_from_service_settings(self, two_distinct):
        """Test: El orden máximo sale de la configuración del servicio."""
        servicio = SeriesService(Settings(_env_file=None, moment_order_max=4))

        assert servicio.central_moment(two_distinct, 4) == pytest.approx(9 * (0.81 ** 2 + 0.09 ** 2) + 6 * 0.81 * 0.09, rel=1e-12)
        with pytest.raises(InputError):
            servicio.central_moment(two_distinct, 6)

    @hyp_settings(max_examples=30, deadline=None)
    @given(
        rho=st.lists(st.floats(min_value=0.05, max_value=0.95), min_size=1, max_size=4),
        m=st.sampled_from([2, 4, 6]),
    )
    def test_enumeration_matches_convolution(self, rho, m):
        """Test: Enumeración explícita = convolución de polinomios."""
        servicio = SeriesService()
        spectrum = CanonicalSpectrum(correlations=rho)

        assert servicio.central_moment_enumerated(spectrum, m) == pytest.approx(
            servicio.central_moment(spectrum, m), rel=1e-12
        )


class TestCharacteristicAndGaussian:
    """Tests de la función característica y la referencia gaussiana."""

    def test_characteristic_function(self, equal_r2):
        """Test: φ(0) = 1 y φ(t) = 1/(1 + ρ²t²) para r = 2 iguales."""
        t = np.array([0.0, 1.0, 3.0])

        assert SeriesService.characteristic_function(equal_r2, 0.0) == 1.0
        assert np.allclose(SeriesService.characteristic_function(equal_r2, t), 1.0 / (1.0 + 0.25 * t ** 2), rtol=1e-14)

    def test_gaussian_reference_center(self, two_distinct):
        """Test: La normal de referencia está centrada en I."""
        _, cdf = SeriesService.gaussian_reference(two_distinct, two_distinct.mutual_information)

        assert cdf == pytest.approx(0.5, abs=1e-15)

    def test_sup_distance_shrinks_with_r(self, series_service):
        """Test: Con muchas correlaciones pequeñas la ley se acerca a la normal."""
        distancias = []
        for r in (2, 40):
            spectrum = equal_spectrum(0.2, r)
            sigma = np.sqrt(spectrum.variance)
            grid = spectrum.mutual_information + np.linspace(-6 * sigma, 6 * sigma, 201)
            distancias.append(series_service.gaussian_sup_distance(spectrum, grid))

        print(f"\n📊 Distancias sup: {distancias}")
        assert distancias[1] < distancias[0]
        assert distancias[1] < 0.02
