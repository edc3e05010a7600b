"""
Módulo de modelos de dominio.
"""

from .covariance_model import CovarianceModel
from .canonical_spectrum import CanonicalSpectrum, WhiteningPair
from .approx_value import ApproxValue, MomentRequest
from .sample_batch import SampleBatch
from .coefficient_table import CoefficientTable
from .kernel_state import KernelState

__all__ = [
    "CovarianceModel",
    "CanonicalSpectrum",
    "WhiteningPair",
    "ApproxValue",
    "MomentRequest",
    "SampleBatch",
    "CoefficientTable",
    "KernelState",
]
