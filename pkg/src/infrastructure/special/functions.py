"""
Funciones especiales escaladas para los núcleos de la distribución.

- bessel_k_scaled:  e^z K_a(z)
- struve_l_scaled:  e^{-z} L_a(z)
- log_bessel_k / log_struve_l: logaritmos válidos donde K o L desbordan
- bessel_struve_product: z[K_a L_{a-1} + K_{a-1} L_a], formado en escala log

Los órdenes son múltiplos de 1/2 con a ≥ -1. Todas las funciones aceptan
escalares o arrays en z y devuelven el mismo tipo.
"""

from typing import Optional, Union

import numpy as np
from scipy import special
from scipy.special import logsumexp

from ...config.settings import Settings, settings as default_settings
from ...domain.exceptions import DomainError


ArrayLike = Union[float, np.ndarray]

_LOG_TWO_OVER_PI = float(np.log(2.0 / np.pi))
_SERIES_CHUNK = 512
_ASYMPTOTIC_TERMS = 80


# ==========================================
# Validación
# ==========================================

def check_order(order: float) -> float:
    """
    Valida que el orden sea múltiplo de 1/2 y ≥ -1.

    Raises:
        DomainError: Si el orden no es admisible
    """
    order = float(order)
    if not np.isfinite(order) or 2.0 * order != np.round(2.0 * order):
        raise DomainError(f"El orden {order!r} no es múltiplo de 1/2")
    if order < -1.0:
        raise DomainError(f"El orden {order!r} es menor que -1")
    return order


def _as_array(z: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=float)
    return np.atleast_1d(arr).astype(float, copy=True), arr.ndim == 0


def _restore(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values[0]) if scalar else values


def _is_half_integer(order: float) -> bool:
    return abs(order - np.floor(order) - 0.5) < 1e-12


# ==========================================
# Gamma
# ==========================================

def lgamma(x: ArrayLike) -> ArrayLike:
    """
    log Γ(x) para x > 0.

    Raises:
        DomainError: Si algún x ≤ 0
    """
    arr, scalar = _as_array(x)
    if np.any(~(arr > 0)):
        raise DomainError("lgamma está definido sólo para x > 0")
    return _restore(special.gammaln(arr), scalar)


# ==========================================
# Bessel K
# ==========================================

def half_integer_bessel_k_scaled(n: int, z: ArrayLike) -> ArrayLike:
    """
    e^z K_{n+1/2}(z) por la suma finita
    sqrt(π/(2z)) Σ_{k=0}^{n} (n+k)! / (k!(n−k)!) (2z)^{-k}.

    Args:
        n: Entero ≥ 0
        z: Argumento(s) positivo(s)
    """
    if n < 0:
        raise DomainError("La suma finita de Bessel K necesita n ≥ 0")
    arr, scalar = _as_array(z)
    if np.any(~(arr > 0)):
        raise DomainError("Bessel K necesita z > 0")

    coeficientes = np.empty(n + 1)
    coeficientes[0] = 1.0
    for k in range(n):
        coeficientes[k + 1] = coeficientes[k] * (n + k + 1) * (n - k) / (k + 1)

    y = 0.5 / arr
    acumulado = np.full_like(arr, coeficientes[n])
    with np.errstate(over="ignore"):
        for k in range(n - 1, -1, -1):
            acumulado = acumulado * y + coeficientes[k]
        resultado = np.sqrt(np.pi * y) * acumulado

    return _restore(resultado, scalar)


def bessel_k_scaled(
    order: float,
    z: ArrayLike,
    config: Optional[Settings] = None,
) -> ArrayLike:
    """
    e^z · K_order(z) para z > 0.

    Órdenes semienteros hasta `half_integer_closed_form_max` usan la suma
    finita exacta; el resto usa scipy.special.kve. Un resultado que no
    cabe en doble precisión se devuelve como inf.

    Raises:
        DomainError: z ≤ 0 u orden no admisible
    """
    config = config or default_settings
    order = abs(check_order(order))
    arr, scalar = _as_array(z)
    if np.any(~(arr > 0)):
        raise DomainError("Bessel K necesita z > 0")

    if _is_half_integer(order) and order <= config.half_integer_closed_form_max:
        return _restore(np.atleast_1d(half_integer_bessel_k_scaled(int(order - 0.5), arr)), scalar)

    return _restore(special.kve(order, arr), scalar)


def log_bessel_k(order: float, z: ArrayLike) -> ArrayLike:
    """
    log K_order(z) para z ≥ 0 (inf en z = 0).

    Donde kve desborda (órdenes altos con z pequeño) se sube desde el
    orden fraccionario base con la recurrencia de cocientes
    K_{m+1}/K_m = K_{m-1}/K_m + 2m/z, acumulando logaritmos.
    """
    order = abs(check_order(order))
    arr, scalar = _as_array(z)
    resultado = np.full_like(arr, np.inf)
    positivos = arr > 0
    if not np.any(positivos):
        return _restore(resultado, scalar)

    zp = arr[positivos]
    with np.errstate(over="ignore", divide="ignore"):
        directo = special.kve(order, zp)
    fiable = np.isfinite(directo) & (directo > 1e-290)
    valores = np.empty_like(zp)
    valores[fiable] = np.log(directo[fiable]) - zp[fiable]

    if np.any(~fiable):
        zr = zp[~fiable]
        base = order - np.floor(order)
        pasos = int(round(order - base))
        k0 = special.kve(base, zr)
        log_k = np.log(k0) - zr
        if pasos > 0:
            if base == 0.5:
                # K_{3/2}/K_{1/2} = 1 + 1/z
                cociente = 1.0 + 1.0 / zr
            else:
                cociente = special.kve(1.0, zr) / k0
            log_k = log_k + np.log(cociente)
            m = base + 1.0
            for _ in range(pasos - 1):
                cociente = 1.0 / cociente + 2.0 * m / zr
                log_k = log_k + np.log(cociente)
                m += 1.0
        valores[~fiable] = log_k

    resultado[positivos] = valores
    return _restore(resultado, scalar)


# ==========================================
# Struve L
# ==========================================

def _log_struve_series(order: float, z: np.ndarray) -> np.ndarray:
    """
    log L_order(z) por la serie ascendente
    Σ_k (z/2)^{2k+order+1} / (Γ(k+3/2) Γ(k+order+3/2)),
    de términos positivos para order ≥ -1, sumada con logsumexp.
    """
    resultado = np.full_like(z, -np.inf)
    positivos = z > 0
    if not np.any(positivos):
        return resultado

    zp = z[positivos]
    salida = np.empty_like(zp)
    for inicio in range(0, zp.size, _SERIES_CHUNK):
        bloque = zp[inicio : inicio + _SERIES_CHUNK]
        n_terminos = int(3.0 * float(bloque.max())) + 60
        k = np.arange(n_terminos, dtype=float)
        log_coef = -(special.gammaln(k + 1.5) + special.gammaln(k + order + 1.5))
        log_terminos = (2.0 * k[None, :] + order + 1.0) * np.log(bloque[:, None] / 2.0) + log_coef[None, :]
        salida[inicio : inicio + bloque.size] = logsumexp(log_terminos, axis=1)
    resultado[positivos] = salida
    return resultado


def _struve_asymptotic_scaled(order: float, z: np.ndarray) -> np.ndarray:
    """
    e^{-z} L_order(z) = e^{-z} I_{-order}(z) + e^{-z} M(z), con
    M(z) ~ (1/π) Σ_k (−1)^{k+1} Γ(k+½) (z/2)^{order−2k−1} / Γ(order+½−k),
    truncada en el menor término.
    """
    log_mitad = np.log(z / 2.0)
    correccion = np.zeros_like(z)
    previo = np.full_like(z, np.inf)
    activo = np.ones(z.shape, dtype=bool)
    for k in range(_ASYMPTOTIC_TERMS):
        argumento = order + 0.5 - k
        if argumento <= 0 and argumento == np.round(argumento):
            continue
        signo = (-1.0) ** (k + 1) * special.gammasgn(argumento)
        log_mag = special.gammaln(k + 0.5) + (order - 2 * k - 1) * log_mitad - special.gammaln(argumento)
        activo &= log_mag < previo
        correccion = np.where(activo, correccion + signo * np.exp(log_mag - z) / np.pi, correccion)
        previo = np.where(activo, log_mag, previo)
        if not np.any(activo):
            break
    return special.ive(-order, z) + correccion


def struve_l_scaled(
    order: float,
    z: ArrayLike,
    config: Optional[Settings] = None,
) -> ArrayLike:
    """
    e^{-z} · L_order(z) para z ≥ 0.

    - order = -1:   L_1(z) + 2/π
    - order = -1/2: sqrt(2/(πz)) sinh z
    - resto: serie ascendente (z ≤ struve_series_switch u order ≥ z/2)
      o identidad con I_{-order} y la expansión asintótica

    Raises:
        DomainError: z < 0 u orden no admisible
    """
    config = config or default_settings
    order = check_order(order)
    arr, scalar = _as_array(z)
    if np.any(~(arr >= 0)):
        raise DomainError("Struve L necesita z ≥ 0")

    if order == -1.0:
        valores = np.atleast_1d(struve_l_scaled(1.0, arr, config)) + np.exp(-arr) * 2.0 / np.pi
        return _restore(valores, scalar)

    if order == -0.5:
        valores = np.zeros_like(arr)
        positivos = arr > 0
        zp = arr[positivos]
        valores[positivos] = np.sqrt(2.0 / (np.pi * zp)) * (-np.expm1(-2.0 * zp)) / 2.0
        return _restore(valores, scalar)

    valores = np.zeros_like(arr)
    serie = (arr <= config.struve_series_switch) | (order >= arr / 2.0)
    if np.any(serie):
        zs = arr[serie]
        valores[serie] = np.exp(_log_struve_series(order, zs) - zs)
    if np.any(~serie):
        valores[~serie] = _struve_asymptotic_scaled(order, arr[~serie])
    return _restore(valores, scalar)


def log_struve_l(
    order: float,
    z: ArrayLike,
    config: Optional[Settings] = None,
) -> ArrayLike:
    """log L_order(z) para z ≥ 0 (-inf donde L = 0)."""
    config = config or default_settings
    order = check_order(order)
    arr, scalar = _as_array(z)
    if np.any(~(arr >= 0)):
        raise DomainError("Struve L necesita z ≥ 0")

    if order == -1.0:
        valores = np.logaddexp(np.atleast_1d(log_struve_l(1.0, arr, config)), _LOG_TWO_OVER_PI)
        return _restore(valores, scalar)

    valores = np.full_like(arr, -np.inf)
    positivos = arr > 0
    if order == -0.5:
        zp = arr[positivos]
        valores[positivos] = (
            0.5 * np.log(2.0 / (np.pi * zp)) + zp + np.log(-np.expm1(-2.0 * zp)) - np.log(2.0)
        )
        return _restore(valores, scalar)

    serie = (arr <= config.struve_series_switch) | (order >= arr / 2.0)
    if np.any(serie):
        valores[serie] = _log_struve_series(order, arr[serie])
    asintotico = ~serie & positivos
    if np.any(asintotico):
        za = arr[asintotico]
        valores[asintotico] = np.log(_struve_asymptotic_scaled(order, za)) + za
    return _restore(valores, scalar)


# ==========================================
# Producto Bessel·Struve
# ==========================================

def bessel_struve_product(
    order: float,
    z: ArrayLike,
    config: Optional[Settings] = None,
) -> ArrayLike:
    """
    z [K_a(z) L_{a-1}(z) + K_{a-1}(z) L_a(z)] para z ≥ 0, con a = order ≥ 0.

    Cada producto se forma como exp(log K + log L), así que el resultado es
    finito para cualquier orden y z. Vale 0 en z = 0 y tiende a 1 cuando
    z → ∞.
    """
    order = check_order(order)
    if order < 0:
        raise DomainError("bessel_struve_product necesita a ≥ 0")
    arr, scalar = _as_array(z)
    if np.any(~(arr >= 0)):
        raise DomainError("bessel_struve_product necesita z ≥ 0")

    resultado = np.zeros_like(arr)
    positivos = arr > 0
    if np.any(positivos):
        zp = arr[positivos]
        log_z = np.log(zp)
        primero = log_z + np.atleast_1d(log_bessel_k(order, zp)) + np.atleast_1d(log_struve_l(order - 1.0, zp, config))
        segundo = log_z + np.atleast_1d(log_bessel_k(order - 1.0, zp)) + np.atleast_1d(log_struve_l(order, zp, config))
        resultado[positivos] = np.exp(np.logaddexp(primero, segundo))
    return _restore(resultado, scalar)
