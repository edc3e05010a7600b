"""
Infraestructura de logging y métricas.
"""

from .metrics import MetricsLogger, track_performance

__all__ = ["MetricsLogger", "track_performance"]
