"""
Jerarquía de errores de la librería.

Los errores de entrada heredan de ValueError y se traducen al código de
salida 2 del CLI; los numéricos heredan de ArithmeticError y dan código 3.
"""

from typing import Optional

from pydantic import ValidationError


class InfoDensityError(Exception):
    """Raíz de todos los errores de la librería."""

    exit_code: int = 1


class InputError(InfoDensityError, ValueError):
    """Entrada inválida (esquema, dimensiones, parámetros fuera de rango)."""

    exit_code = 2


class DomainError(InputError):
    """Argumento fuera del dominio de una función especial."""


class PoleError(InputError):
    """Evaluación de la densidad con r = 1 exactamente en x = I (singularidad de K_0)."""


class NotPositiveSemidefiniteError(InputError):
    """Matriz con autovalores negativos más allá de la tolerancia."""


class DegenerateModelError(InputError):
    """Correlación canónica numéricamente igual a 1: la ley conjunta es degenerada."""


class NotApplicableError(InputError):
    """Operación no aplicable al espectro (p. ej. serie rápida con correlaciones iguales)."""


class UnsupportedOracleError(InputError):
    """El oráculo no admite el espectro dado (p. ej. cuadratura con r = 1)."""


class NumericalError(InfoDensityError, ArithmeticError):
    """Fallo numérico (desbordamiento, no convergencia)."""

    exit_code = 3


class TruncationError(NumericalError):
    """
    El truncamiento adaptativo superaría el número máximo de términos.

    Attributes:
        best_bound: Mejor cota de error alcanzada con max_terms sumandos
        n_terms: Número de términos evaluados al abandonar
    """

    def __init__(self, message: str, best_bound: float, n_terms: int):
        super().__init__(message)
        self.best_bound = best_bound
        self.n_terms = n_terms


def exit_code_for(error: Optional[BaseException]) -> int:
    """
    Código de salida del CLI para una excepción.

    Returns:
        int: 0 sin error, 2 entrada inválida, 3 fallo numérico
    """
    if error is None:
        return 0
    if isinstance(error, InfoDensityError):
        return error.exit_code
    # las entradas ya llegan validadas; un ValidationError aquí es de un modelo interno
    if isinstance(error, ValidationError):
        return 3
    if isinstance(error, (ValueError, OSError)):
        return 2
    return 3
