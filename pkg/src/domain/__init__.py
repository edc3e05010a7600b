"""
Módulo de dominio - Modelos, enums y errores de la densidad de información.
"""

from .enums import DistributionKind, JobCommand, SampleConstruction
from .models import (
    ApproxValue,
    CanonicalSpectrum,
    CoefficientTable,
    CovarianceModel,
    KernelState,
    MomentRequest,
    SampleBatch,
    WhiteningPair,
)

__all__ = [
    # Enums
    "DistributionKind",
    "JobCommand",
    "SampleConstruction",
    # Models
    "ApproxValue",
    "CanonicalSpectrum",
    "CoefficientTable",
    "CovarianceModel",
    "KernelState",
    "MomentRequest",
    "SampleBatch",
    "WhiteningPair",
]
