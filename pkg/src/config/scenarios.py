"""
Escenarios predefinidos de espectros canónicos y modelos de covarianza.

Este módulo contiene los generadores usados por el CLI y los tests:
- Canal AWGN en tiempo continuo con entrada browniana (ρ_i(T))
- Correlaciones iguales
- Matriz de Kac-Murdock-Szegö (AR(1))
- Catálogo de escenarios de referencia con nombre
"""

from typing import Any, Dict

import numpy as np

from ..domain.models.canonical_spectrum import CanonicalSpectrum
from ..domain.models.covariance_model import CovarianceModel


# ============================================
# GENERADORES
# ============================================

def awgn_brownian_correlations(t: float, r: int) -> np.ndarray:
    """
    Correlaciones ρ_i(T) = sqrt(T² / (T² + π²(i − ½)²)) para i = 1 … r.

    Args:
        t: Horizonte temporal T > 0
        r: Número de correlaciones

    Returns:
        np.ndarray: Correlaciones en orden decreciente
    """
    if t <= 0:
        raise ValueError(f"El horizonte T debe ser positivo, recibido {t}")
    if r < 1:
        raise ValueError(f"r debe ser al menos 1, recibido {r}")
    i = np.arange(1, r + 1, dtype=float)
    return np.sqrt(t * t / (t * t + (np.pi * (i - 0.5)) ** 2))


def awgn_brownian_spectrum(t: float, r: int) -> CanonicalSpectrum:
    """Espectro del canal AWGN con entrada browniana truncado a r términos."""
    return CanonicalSpectrum(correlations=awgn_brownian_correlations(t, r).tolist())


def equal_spectrum(rho: float, r: int) -> CanonicalSpectrum:
    """Espectro con r correlaciones iguales a rho."""
    if r < 1:
        raise ValueError(f"r debe ser al menos 1, recibido {r}")
    return CanonicalSpectrum(correlations=[float(rho)] * r)


def kms_covariance(rho: float, p: int, q: int) -> CovarianceModel:
    """
    Modelo con covarianza conjunta de Kac-Murdock-Szegö (ρ^|i−j|).

    La covarianza cruzada tiene rango 1 y la única correlación canónica es |ρ|.
    """
    if not 0 < abs(rho) < 1:
        raise ValueError(f"La matriz KMS necesita 0 < |ρ| < 1, recibido {rho}")
    if p < 1 or q < 1:
        raise ValueError("p y q deben ser al menos 1")
    idx = np.arange(p + q)
    joint = float(rho) ** np.abs(idx[:, None] - idx[None, :])
    return CovarianceModel.from_joint(joint, p)


def scaled_identity_covariance(rho: float, r_x: np.ndarray, r_y: np.ndarray) -> CovarianceModel:
    """
    Modelo con R_XY = ρ R_X^{1/2} R_Y^{1/2} (p = q): todas las correlaciones valen |ρ|.
    """
    from ..application.services.cca_service import symmetric_sqrt

    r_x = np.asarray(r_x, dtype=float)
    r_y = np.asarray(r_y, dtype=float)
    r_xy = rho * symmetric_sqrt(r_x) @ symmetric_sqrt(r_y)
    return CovarianceModel(
        p=r_x.shape[0],
        q=r_y.shape[0],
        r_x=r_x.tolist(),
        r_y=r_y.tolist(),
        r_xy=r_xy.tolist(),
    )


# ============================================
# CATÁLOGO DE ESCENARIOS
# ============================================
# Estructura: nombre -> {generador, parámetros, descripcion}

SCENARIOS: Dict[str, Dict[str, Any]] = {
    "equal_r2": {
        "kind": "equal", "params": {"rho": 0.5, "r": 2},
        "descripcion": "Dos correlaciones iguales (densidad de Laplace)"
    },
    "equal_r4": {
        "kind": "equal", "params": {"rho": 0.3, "r": 4},
        "descripcion": "Cuatro correlaciones iguales (forma cerrada exponencial-polinómica)"
    },
    "equal_small_r40": {
        "kind": "equal", "params": {"rho": 0.2, "r": 40},
        "descripcion": "Cuarenta correlaciones pequeñas: régimen casi gaussiano"
    },
    "two_distinct": {
        "kind": "list", "params": {"correlations": [0.9, 0.3]},
        "descripcion": "Dos correlaciones distintas"
    },
    "three_distinct": {
        "kind": "list", "params": {"correlations": [0.8, 0.5, 0.2]},
        "descripcion": "Tres correlaciones distintas"
    },
    "awgn_brownian_r5": {
        "kind": "awgn_brownian", "params": {"t": 1.0, "r": 5},
        "descripcion": "Canal AWGN con entrada browniana, T=1, r=5"
    },
    "awgn_brownian_r15": {
        "kind": "awgn_brownian", "params": {"t": 1.0, "r": 15},
        "descripcion": "Canal AWGN con entrada browniana, T=1, r=15: no gaussiano"
    },
}


def get_scenario(name: str) -> CanonicalSpectrum:
    """
    Obtiene el espectro de un escenario del catálogo.

    Args:
        name: Nombre del escenario

    Returns:
        CanonicalSpectrum: Espectro del escenario

    Raises:
        KeyError: Si el escenario no existe
    """
    entrada = SCENARIOS[name]
    params = entrada["params"]
    if entrada["kind"] == "equal":
        return equal_spectrum(params["rho"], params["r"])
    if entrada["kind"] == "awgn_brownian":
        return awgn_brownian_spectrum(params["t"], params["r"])
    return CanonicalSpectrum(correlations=params["correlations"])


def get_all_scenarios() -> list:
    """Nombres de todos los escenarios."""
    return list(SCENARIOS.keys())
