"""
Lectura de entradas del CLI: listas de correlaciones, documentos JSON de
covarianza y escenarios integrados.
"""

import json
from pathlib import Path
from typing import Union

from loguru import logger
from pydantic import ValidationError

from ...application.services.cca_service import CCAService
from ...config.scenarios import (
    awgn_brownian_spectrum,
    equal_spectrum,
    get_all_scenarios,
    get_scenario,
    kms_covariance,
)
from ...config.settings import Settings
from ...domain.exceptions import InputError
from ...domain.models.canonical_spectrum import CanonicalSpectrum
from ...domain.models.covariance_model import CovarianceModel
from .schemas.request import JobConfig


InputDocument = Union[CovarianceModel, CanonicalSpectrum]


def parse_float_list(text: str) -> list[float]:
    """'0.3,0.9' -> [0.3, 0.9]."""
    try:
        return [float(parte) for parte in text.split(",") if parte.strip()]
    except ValueError as e:
        raise InputError(f"Lista de números inválida: {text!r}") from e


def parse_int_list(text: str) -> list[int]:
    """'2,5,10' -> [2, 5, 10]."""
    try:
        return [int(parte) for parte in text.split(",") if parte.strip()]
    except ValueError as e:
        raise InputError(f"Lista de enteros inválida: {text!r}") from e


def parse_keyed(text: str, key: str) -> str:
    """Acepta 'T=1' o '1' para la clave T."""
    texto = text.strip()
    prefijo = f"{key}="
    if texto.upper().startswith(prefijo.upper()):
        return texto[len(prefijo):]
    return texto


def spectrum_from_list(correlations: list[float]) -> CanonicalSpectrum:
    """Espectro validado (ordenado de forma descendente, cada ρ en (0, 1))."""
    if not correlations:
        raise InputError("La lista de correlaciones está vacía")
    try:
        return CanonicalSpectrum(correlations=correlations)
    except ValidationError as e:
        raise InputError(f"Correlaciones inválidas: {e.errors()[0]['msg']}") from e


def load_covariance(path: Union[str, Path]) -> CovarianceModel:
    """
    Lee un documento JSON {"p", "q", "r_x", "r_y", "r_xy"} (medias opcionales).

    Raises:
        InputError: Fichero ilegible, JSON mal formado o modelo inválido
    """
    try:
        with open(path, encoding="utf-8") as f:
            documento = json.load(f)
    except OSError as e:
        raise InputError(f"No se puede leer {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"JSON inválido en {path}: {e}") from e

    try:
        return CovarianceModel.model_validate(documento)
    except ValidationError as e:
        raise InputError(f"Documento de covarianza inválido: {e.errors()[0]['msg']}") from e


def parse_input(config: JobConfig) -> list[InputDocument]:
    """
    Convierte la entrada del trabajo en modelos o espectros validados.

    Returns:
        list: Un CovarianceModel (--covariance, --kms) o uno o varios
            CanonicalSpectrum (--rho, --equal, --awgn-brownian, --scenario)
    """
    if config.rho is not None:
        return [spectrum_from_list(config.rho)]
    if config.covariance is not None:
        return [load_covariance(config.covariance)]
    if config.kms is not None:
        try:
            return [kms_covariance(config.kms.rho, config.kms.p, config.kms.q)]
        except (ValueError, ValidationError) as e:
            raise InputError(f"Escenario KMS inválido: {e}") from e
    if config.equal is not None:
        try:
            return [equal_spectrum(config.equal.rho, r) for r in config.equal.r]
        except (ValueError, ValidationError) as e:
            raise InputError(f"Espectro de correlaciones iguales inválido: {e}") from e
    if config.scenario is not None:
        try:
            return [get_scenario(config.scenario)]
        except KeyError as e:
            raise InputError(
                f"Escenario desconocido {config.scenario!r}; disponibles: {get_all_scenarios()}"
            ) from e
    try:
        return [awgn_brownian_spectrum(config.awgn_brownian.t, r) for r in config.awgn_brownian.r]
    except (ValueError, ValidationError) as e:
        raise InputError(f"Espectro AWGN inválido: {e}") from e


def resolve_spectra(config: JobConfig, settings: Settings) -> list[CanonicalSpectrum]:
    """Espectros del trabajo; los modelos de covarianza pasan por el CCA."""
    cca = CCAService(settings)
    espectros = []
    for documento in parse_input(config):
        if isinstance(documento, CovarianceModel):
            espectro, _ = cca.canonical_spectrum(documento)
            espectros.append(espectro)
        else:
            espectros.append(documento)
    logger.debug(f"Espectros de entrada: {[str(e) for e in espectros]}")
    return espectros


def single_spectrum(config: JobConfig, settings: Settings) -> CanonicalSpectrum:
    """Espectro único del trabajo (error si la entrada define varios)."""
    espectros = resolve_spectra(config, settings)
    if len(espectros) != 1:
        raise InputError(
            f"El comando {config.command.value} necesita un único espectro; la entrada define {len(espectros)}"
        )
    return espectros[0]
