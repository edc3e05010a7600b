"""
Configuración compartida para tests.

Contiene fixtures y configuración común
para todos los tests del proyecto.
"""

import json

import numpy as np
import pytest
import sys
from pathlib import Path

# Añadir el directorio raíz al path
ROOT_DIR = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT_DIR))

from src.config.settings import Settings
from src.config.scenarios import awgn_brownian_spectrum, equal_spectrum
from src.domain.models import CanonicalSpectrum
from src.application.services import (
    CCAService,
    FastEvalService,
    OracleService,
    SeriesService,
)


# ============================================
# Fixtures de configuración
# ============================================

@pytest.fixture
def settings_test():
    """Settings de prueba sin cargar .env real."""
    return Settings(
        _env_file=None,
        environment="development",
        target_error=1e-8,
        seed=0,
        workers=1,
    )


# ============================================
# Fixtures de servicios
# ============================================

@pytest.fixture
def cca_service(settings_test):
    return CCAService(settings_test)


@pytest.fixture
def series_service(settings_test):
    return SeriesService(settings_test)


@pytest.fixture
def fasteval_service(settings_test):
    return FastEvalService(settings_test)


@pytest.fixture
def oracle_service(settings_test):
    return OracleService(settings_test)


# ============================================
# Fixtures de dominio
# ============================================

@pytest.fixture
def two_distinct():
    """Espectro ρ = [0.9, 0.3]."""
    return CanonicalSpectrum(correlations=[0.9, 0.3])


@pytest.fixture
def three_distinct():
    """Espectro ρ = [0.8, 0.5, 0.2]."""
    return CanonicalSpectrum(correlations=[0.8, 0.5, 0.2])


@pytest.fixture
def equal_r2():
    """Dos correlaciones iguales a 0.5 (densidad de Laplace)."""
    return equal_spectrum(0.5, 2)


@pytest.fixture
def equal_r4():
    """Cuatro correlaciones iguales a 0.3."""
    return equal_spectrum(0.3, 4)


@pytest.fixture
def awgn_r5():
    """Canal AWGN con entrada browniana, T = 1, r = 5."""
    return awgn_brownian_spectrum(1.0, 5)


@pytest.fixture
def random_spd():
    """Generador de matrices simétricas definidas positivas reproducibles."""
    def _make(n: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((n, n))
        return a @ a.T + n * np.eye(n)
    return _make


# ============================================
# Fixtures de documentos de entrada
# ============================================

@pytest.fixture
def kms_document():
    """Documento de covarianza KMS con p = q = 2 y ρ = 0.5."""
    idx = np.arange(4)
    joint = 0.5 ** np.abs(idx[:, None] - idx[None, :])
    return {
        "p": 2,
        "q": 2,
        "r_x": joint[:2, :2].tolist(),
        "r_y": joint[2:, 2:].tolist(),
        "r_xy": joint[:2, 2:].tolist(),
    }


@pytest.fixture
def kms_json(tmp_path, kms_document):
    """Ruta a un fichero JSON con el documento KMS."""
    ruta = tmp_path / "kms.json"
    ruta.write_text(json.dumps(kms_document), encoding="utf-8")
    return ruta


@pytest.fixture
def equal_covariance_json(tmp_path):
    """Documento con R_X = R_Y = I y R_XY = 0.5·I (p = q = 2): espectro [0.5, 0.5]."""
    documento = {
        "p": 2,
        "q": 2,
        "r_x": [[1.0, 0.0], [0.0, 1.0]],
        "r_y": [[1.0, 0.0], [0.0, 1.0]],
        "r_xy": [[0.5, 0.0], [0.0, 0.5]],
    }
    ruta = tmp_path / "equal.json"
    ruta.write_text(json.dumps(documento), encoding="utf-8")
    return ruta
