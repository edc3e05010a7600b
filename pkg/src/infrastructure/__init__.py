"""
Módulo de infraestructura - Funciones especiales, logging y CLI.
"""

from .special import (
    bessel_k_scaled,
    bessel_struve_product,
    log_bessel_k,
    struve_l_scaled,
)

__all__ = [
    "bessel_k_scaled",
    "bessel_struve_product",
    "log_bessel_k",
    "struve_l_scaled",
]
