"""
Módulo de aplicación - Servicios de cálculo.
"""

from .services import (
    CCAService,
    get_cca_service,
    SeriesService,
    get_series_service,
    FastEvalService,
    FastEvaluator,
    get_fasteval_service,
    OracleService,
    get_oracle_service,
)

__all__ = [
    "CCAService",
    "get_cca_service",
    "SeriesService",
    "get_series_service",
    "FastEvalService",
    "FastEvaluator",
    "get_fasteval_service",
    "OracleService",
    "get_oracle_service",
]
