"""
Módulo de servicios de cálculo.
"""

from .cca_service import CCAService, get_cca_service
from .series_service import SeriesService, get_series_service
from .fasteval_service import FastEvalService, FastEvaluator, get_fasteval_service
from .oracle_service import OracleService, get_oracle_service

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
