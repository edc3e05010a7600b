"""
Modelo CovarianceModel para la especificación gaussiana conjunta.

Representa las matrices de covarianza por bloques de los vectores
ξ (dimensión p) y η (dimensión q) y su covarianza cruzada.
"""

from typing import Optional
import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ...config.settings import settings


def _as_matrix(value: list[list[float]], name: str) -> np.ndarray:
    """Convierte una lista de filas en matriz 2-D finita."""
    matrix = np.asarray(value, dtype=float)
    if matrix.ndim != 2:
        raise ValueError(f"{name} debe ser una matriz (lista de filas)")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{name} contiene valores no finitos")
    return matrix


def _symmetrize(value: list[list[float]], name: str) -> list[list[float]]:
    """Simetriza (M + Mᵀ)/2 rechazando asimetrías mayores que la tolerancia."""
    matrix = _as_matrix(value, name)
    if matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{name} debe ser cuadrada, recibida {matrix.shape}")

    escala = max(float(np.max(np.abs(matrix))), np.finfo(float).tiny)
    asimetria = float(np.max(np.abs(matrix - matrix.T))) / escala
    if asimetria > settings.symmetry_tolerance:
        raise ValueError(
            f"{name} no es simétrica (asimetría relativa {asimetria:.3e} "
            f"> {settings.symmetry_tolerance:.1e})"
        )

    return ((matrix + matrix.T) / 2).tolist()


class CovarianceModel(BaseModel):
    """
    Modelo de la ley gaussiana conjunta de (ξ, η).

    Las medias no intervienen en la distribución de la densidad de
    información; si el documento las trae se aceptan y se ignoran.

    Attributes:
        p: Dimensión de ξ
        q: Dimensión de η
        r_x: Covarianza de ξ (p×p, simétrica definida positiva)
        r_y: Covarianza de η (q×q, simétrica definida positiva)
        r_xy: Covarianza cruzada (p×q)
        mean_x: Media de ξ (opcional, ignorada)
        mean_y: Media de η (opcional, ignorada)
    """

    p: int = Field(..., ge=1, description="Dimensión de ξ")
    q: int = Field(..., ge=1, description="Dimensión de η")
    r_x: list[list[float]] = Field(..., description="Covarianza de ξ")
    r_y: list[list[float]] = Field(..., description="Covarianza de η")
    r_xy: list[list[float]] = Field(..., description="Covarianza cruzada ξ-η")
    mean_x: Optional[list[float]] = Field(default=None, description="Media de ξ (ignorada)")
    mean_y: Optional[list[float]] = Field(default=None, description="Media de η (ignorada)")

    @field_validator("r_x")
    @classmethod
    def validate_r_x(cls, v: list[list[float]]) -> list[list[float]]:
        """Valida y simetriza R_X."""
        return _symmetrize(v, "r_x")

    @field_validator("r_y")
    @classmethod
    def validate_r_y(cls, v: list[list[float]]) -> list[list[float]]:
        """Valida y simetriza R_Y."""
        return _symmetrize(v, "r_y")

    @field_validator("r_xy")
    @classmethod
    def validate_r_xy(cls, v: list[list[float]]) -> list[list[float]]:
        """Valida que R_XY sea una matriz finita."""
        return _as_matrix(v, "r_xy").tolist()

    @model_validator(mode="after")
    def validate_blocks(self) -> "CovarianceModel":
        """
        Comprueba dimensiones y definición positiva.

        R_X y R_Y deben ser definidas positivas con margen p·ε·λ_max,
        y la matriz conjunta por bloques también (todas las ρ_i < 1).
        """
        if self.rx.shape != (self.p, self.p):
            raise ValueError(f"r_x debe ser {self.p}x{self.p}, recibida {self.rx.shape}")
        if self.ry.shape != (self.q, self.q):
            raise ValueError(f"r_y debe ser {self.q}x{self.q}, recibida {self.ry.shape}")
        if self.rxy.shape != (self.p, self.q):
            raise ValueError(f"r_xy debe ser {self.p}x{self.q}, recibida {self.rxy.shape}")

        eps = np.finfo(float).eps
        for nombre, matriz, dim in (("r_x", self.rx, self.p), ("r_y", self.ry, self.q)):
            autovalores = np.linalg.eigvalsh(matriz)
            if autovalores[0] <= dim * eps * autovalores[-1]:
                raise ValueError(
                    f"{nombre} no es definida positiva "
                    f"(λ_min={autovalores[0]:.3e}, λ_max={autovalores[-1]:.3e})"
                )

        try:
            np.linalg.cholesky(self.joint_covariance())
        except np.linalg.LinAlgError as e:
            raise ValueError(
                "La matriz de covarianza conjunta no es definida positiva"
            ) from e

        if self.mean_x is not None and len(self.mean_x) != self.p:
            raise ValueError(f"mean_x debe tener longitud {self.p}")
        if self.mean_y is not None and len(self.mean_y) != self.q:
            raise ValueError(f"mean_y debe tener longitud {self.q}")

        return self

    # ==========================================
    # Vistas numpy
    # ==========================================

    @property
    def rx(self) -> np.ndarray:
        """R_X como array."""
        return np.asarray(self.r_x, dtype=float)

    @property
    def ry(self) -> np.ndarray:
        """R_Y como array."""
        return np.asarray(self.r_y, dtype=float)

    @property
    def rxy(self) -> np.ndarray:
        """R_XY como array."""
        return np.asarray(self.r_xy, dtype=float)

    @property
    def has_means(self) -> bool:
        """Indica si el documento traía medias (que se ignoran)."""
        return self.mean_x is not None or self.mean_y is not None

    def joint_covariance(self) -> np.ndarray:
        """
        Matriz conjunta [[R_X, R_XY], [R_XYᵀ, R_Y]].

        Returns:
            np.ndarray: Matriz (p+q)×(p+q)
        """
        return np.block([[self.rx, self.rxy], [self.rxy.T, self.ry]])

    @classmethod
    def from_joint(cls, joint: np.ndarray, p: int) -> "CovarianceModel":
        """
        Factory method a partir de la matriz conjunta (p+q)×(p+q).

        Args:
            joint: Matriz de covarianza conjunta
            p: Dimensión del primer bloque

        Returns:
            CovarianceModel: Nueva instancia
        """
        joint = np.asarray(joint, dtype=float)
        q = joint.shape[0] - p
        return cls(
            p=p,
            q=q,
            r_x=joint[:p, :p].tolist(),
            r_y=joint[p:, p:].tolist(),
            r_xy=joint[:p, p:].tolist(),
        )
