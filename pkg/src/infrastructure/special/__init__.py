"""
Funciones especiales (Bessel K, Struve L, log-gamma) en escala exponencial y logarítmica.
"""

from .functions import (
    bessel_k_scaled,
    bessel_struve_product,
    check_order,
    half_integer_bessel_k_scaled,
    lgamma,
    log_bessel_k,
    log_struve_l,
    struve_l_scaled,
)

__all__ = [
    "bessel_k_scaled",
    "bessel_struve_product",
    "check_order",
    "half_integer_bessel_k_scaled",
    "lgamma",
    "log_bessel_k",
    "log_struve_l",
    "struve_l_scaled",
]
