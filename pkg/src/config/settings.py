"""
Configuración centralizada de la librería de densidad de información.

Todos los parámetros numéricos (tolerancias, límites de términos, semillas)
se leen de variables de entorno con prefijo INFODENSITY_ o de un fichero .env:
- Desarrollo: logging DEBUG
- Producción: logging INFO
"""

from typing import Literal, Optional
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, field_validator
from functools import lru_cache


class Settings(BaseSettings):
	"""
	Configuración principal de la librería y del CLI.

	Agrupa:
	- Entorno y logging
	- Parámetros de truncamiento de series
	- Tolerancias del análisis de correlación canónica
	- Parámetros de muestreo Monte Carlo y paralelismo
	"""

	model_config = SettingsConfigDict(
		env_file=".env",
		env_file_encoding="utf-8",
		env_prefix="INFODENSITY_",
		case_sensitive=False,
		extra="ignore",
	)

	# ==========================================
	# Environment
	# ==========================================
	environment: Literal["development", "production"] = Field(
		default="development",
		description="Entorno de ejecución"
	)

	log_level: Optional[str] = Field(
		default=None,
		description="Nivel de log explícito (auto según entorno si no se indica)"
	)

	# ==========================================
	# Truncamiento de series
	# ==========================================
	target_error: float = Field(
		default=1e-8,
		gt=0,
		description="Cota de error de truncamiento objetivo"
	)

	max_terms: int = Field(
		default=1_000_000,
		ge=1,
		description="Número máximo de sumandos de la serie rápida"
	)

	max_box_terms: int = Field(
		default=200_000,
		ge=1,
		description="Orden total máximo (Σ topes + 1) de la caja de la serie directa"
	)

	# ==========================================
	# Funciones especiales
	# ==========================================
	struve_series_switch: float = Field(
		default=30.0,
		gt=0,
		description="Argumento a partir del cual Struve L usa la rama asintótica"
	)

	half_integer_closed_form_max: float = Field(
		default=25.5,
		ge=0.5,
		description="Mayor orden semientero evaluado con la suma finita de Bessel K"
	)

	# ==========================================
	# Análisis de correlación canónica
	# ==========================================
	rank_tolerance_factor: Optional[float] = Field(
		default=None,
		gt=0,
		description="Factor c de la tolerancia de rango (None = max(p, q))"
	)

	symmetry_tolerance: float = Field(
		default=1e-8,
		gt=0,
		description="Asimetría relativa máxima admitida en matrices de covarianza"
	)

	degenerate_correlation_margin: float = Field(
		default=1e-12,
		gt=0,
		description="Correlaciones >= 1 - margen se rechazan como degeneradas"
	)

	# ==========================================
	# Monte Carlo y paralelismo
	# ==========================================
	seed: int = Field(
		default=0,
		ge=0,
		description="Semilla por defecto de los muestreadores"
	)

	sample_chunk_size: int = Field(
		default=250_000,
		ge=1,
		description="Muestras por partición (cada partición recibe su propia semilla)"
	)

	workers: int = Field(
		default=1,
		ge=1,
		description="Hilos para evaluar rejillas y particiones de muestreo"
	)

	quadrature_tolerance: float = Field(
		default=1e-10,
		gt=0,
		description="Tolerancia absoluta de las cuadraturas oráculo"
	)

	# ==========================================
	# Momentos y benchmark
	# ==========================================
	moment_order_max: int = Field(
		default=64,
		ge=2,
		description="Orden máximo de momento central admitido"
	)

	benchmark_speedup_threshold: float = Field(
		default=50.0,
		gt=0,
		description="Aceleración mínima esperada de la serie rápida frente a la directa"
	)

	@field_validator("log_level")
	@classmethod
	def validate_log_level(cls, v: Optional[str]) -> Optional[str]:
		"""Valida que el nivel de log sea uno de los de loguru."""
		if v is None:
			return v

		niveles = {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}
		if v.upper() not in niveles:
			raise ValueError(f"log_level '{v}' no es un nivel válido: {sorted(niveles)}")

		return v.upper()

	# ==========================================
	# Métodos de utilidad
	# ==========================================

	def is_production(self) -> bool:
		"""Verifica si está en producción."""
		return self.environment == "production"

	def effective_log_level(self) -> str:
		"""Nivel de log efectivo (explícito o derivado del entorno)."""
		if self.log_level:
			return self.log_level
		return "INFO" if self.is_production() else "DEBUG"

	def rank_tolerance_multiplier(self, p: int, q: int) -> float:
		"""
		Factor c de la tolerancia de rango para dimensiones p y q.

		Returns:
			float: rank_tolerance_factor si está fijado, si no max(p, q)
		"""
		if self.rank_tolerance_factor is not None:
			return self.rank_tolerance_factor
		return float(max(p, q))

	def validate_numerics(self) -> tuple[bool, list[str]]:
		"""
		Valida que la combinación de parámetros numéricos sea coherente.

		Returns:
			tuple: (is_valid, list_of_errors)
		"""
		errors = []

		if self.target_error < 1e-15:
			errors.append(
				"target_error por debajo de la precisión de doble precisión; "
				"las cotas no serán alcanzables"
			)

		if self.struve_series_switch < 10:
			errors.append(
				"struve_series_switch < 10: la rama asintótica de Struve L pierde precisión"
			)

		if self.half_integer_closed_form_max > 60:
			errors.append(
				"half_integer_closed_form_max > 60: la suma finita puede desbordar para z pequeño"
			)

		if self.max_terms < 10:
			errors.append("max_terms < 10: casi cualquier espectro fallará por truncamiento")

		return len(errors) == 0, errors


@lru_cache()
def get_settings() -> Settings:
	"""
	Obtiene la instancia de configuración (singleton cacheado).

	Returns:
		Settings: Instancia única de configuración
	"""
	return Settings()


# Instancia global para importación directa
settings = get_settings()
