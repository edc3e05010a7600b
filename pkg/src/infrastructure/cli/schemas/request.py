"""
Request Schemas - Modelos Pydantic para los trabajos del CLI.
"""

from pathlib import Path
from typing import List, Literal, Optional

import numpy as np

from pydantic import BaseModel, Field, model_validator

from ....config.settings import settings
from ....domain.enums.distribution_kind import DistributionKind
from ....domain.enums.job_command import JobCommand
from ....domain.enums.sample_construction import SampleConstruction


class GridSpec(BaseModel):
    """Rejilla equiespaciada (min, max, count)."""

    min: float = Field(..., description="Extremo inferior")
    max: float = Field(..., description="Extremo superior")
    count: int = Field(..., ge=2, description="Número de puntos (al menos 2)")

    @model_validator(mode="after")
    def validate_bounds(self) -> "GridSpec":
        if not self.max > self.min:
            raise ValueError(f"La rejilla necesita max > min, recibido [{self.min}, {self.max}]")
        return self

    def points(self):
        """Puntos de la rejilla."""
        return np.linspace(self.min, self.max, self.count)


class EqualInput(BaseModel):
    """Escenario de correlaciones iguales: ρ y uno o varios r."""

    rho: float = Field(..., gt=0, lt=1)
    r: List[int] = Field(..., min_length=1)


class KMSInput(BaseModel):
    """Escenario Kac-Murdock-Szegö: ρ, p, q."""

    rho: float = Field(..., gt=-1, lt=1)
    p: int = Field(..., ge=1)
    q: int = Field(..., ge=1)


class AWGNInput(BaseModel):
    """Canal AWGN con entrada browniana: horizonte T y lista de r."""

    t: float = Field(..., gt=0, description="Horizonte temporal T")
    r: List[int] = Field(..., min_length=1)


class JobConfig(BaseModel):
    """
    Trabajo completo del CLI.

    Exactamente una fuente de entrada: --rho, --covariance,
    --awgn-brownian, --equal, --kms o --scenario.
    """

    command: JobCommand

    rho: Optional[List[float]] = Field(None, description="Correlaciones canónicas en línea")
    covariance: Optional[Path] = Field(None, description="Documento JSON de covarianza")
    awgn_brownian: Optional[AWGNInput] = None
    equal: Optional[EqualInput] = None
    kms: Optional[KMSInput] = None
    scenario: Optional[str] = Field(None, description="Nombre de un escenario del catálogo")

    grid: GridSpec = Field(
        default_factory=lambda: GridSpec(min=-5.0, max=5.0, count=101),
        description="Rejilla en coordenadas centradas (x − I) salvo --absolute"
    )
    absolute: bool = Field(default=False, description="La rejilla está en coordenadas x absolutas")

    target_error: float = Field(default=settings.target_error, gt=0)
    max_terms: int = Field(default=settings.max_terms, ge=1)
    seed: int = Field(default=settings.seed, ge=0)
    output: Optional[Path] = Field(None, description="Fichero CSV de salida (stdout si no se indica)")
    method: Literal["fast", "direct"] = Field(default="fast")
    workers: Optional[int] = Field(None, ge=1)

    kinds: List[DistributionKind] = Field(
        default_factory=lambda: [DistributionKind.PDF, DistributionKind.CDF],
        description="Tipos para required-terms"
    )
    orders: List[int] = Field(default_factory=lambda: [2, 4], description="Órdenes de momento")
    n_samples: int = Field(default=100_000, ge=1, description="Muestras para sample/validate")
    construction: SampleConstruction = Field(default=SampleConstruction.SUM_REPRESENTATION)

    @model_validator(mode="after")
    def validate_single_input(self) -> "JobConfig":
        fuentes = [
            nombre for nombre in ("rho", "covariance", "awgn_brownian", "equal", "kms", "scenario")
            if getattr(self, nombre) is not None
        ]
        if len(fuentes) != 1:
            raise ValueError(
                f"Se necesita exactamente una entrada (--rho, --covariance, --awgn-brownian, "
                f"--equal, --kms o --scenario); recibidas: {fuentes or 'ninguna'}"
            )
        return self
