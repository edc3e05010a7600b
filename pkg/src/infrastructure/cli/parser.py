"""
Parser de argumentos (argparse) y construcción del JobConfig.
"""

import argparse
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from ...config.settings import settings
from ...domain.enums.distribution_kind import DistributionKind
from ...domain.enums.job_command import JobCommand
from ...domain.enums.sample_construction import SampleConstruction
from ...domain.exceptions import InputError
from .inputs import parse_float_list, parse_int_list, parse_keyed
from .schemas.request import JobConfig


def _input_parent() -> argparse.ArgumentParser:
    padre = argparse.ArgumentParser(add_help=False)
    entrada = padre.add_argument_group("entrada (exactamente una)")
    entrada.add_argument("--rho", help="Correlaciones canónicas separadas por comas (ej: 0.9,0.3)")
    entrada.add_argument("--covariance", help="Documento JSON con p, q, r_x, r_y, r_xy")
    entrada.add_argument("--awgn-brownian", metavar="T", help="Canal AWGN con entrada browniana (T=1 o 1)")
    entrada.add_argument("--r", help="Lista de r para --awgn-brownian (ej: 2,5,10,15)")
    entrada.add_argument("--equal", nargs=2, metavar=("RHO", "R"), help="r correlaciones iguales (R admite lista)")
    entrada.add_argument("--kms", nargs=3, metavar=("RHO", "P", "Q"), help="Covarianza Kac-Murdock-Szegö")
    entrada.add_argument("--scenario", help="Escenario del catálogo (ej: awgn_brownian_r5)")

    comunes = padre.add_argument_group("opciones comunes")
    comunes.add_argument("--grid", help="MIN,MAX,COUNT (coordenadas centradas x − I)")
    comunes.add_argument("--absolute", action="store_true", help="La rejilla está en coordenadas x absolutas")
    comunes.add_argument("--target", type=float, default=settings.target_error, help="Cota de error objetivo")
    comunes.add_argument("--max-terms", type=int, default=settings.max_terms, help="Máximo de términos")
    comunes.add_argument("--seed", type=int, default=settings.seed, help="Semilla de los muestreadores")
    comunes.add_argument("--out", help="Fichero CSV de salida (stdout por defecto)")
    comunes.add_argument("--workers", type=int, help="Hilos para rejillas y muestreo")
    comunes.add_argument("-v", "--verbose", action="store_true", help="Logging DEBUG")
    return padre


def build_parser() -> argparse.ArgumentParser:
    """Parser con un subcomando por JobCommand."""
    parser = argparse.ArgumentParser(
        prog="infodensity",
        description="Distribución de la densidad de información de vectores gaussianos",
    )
    padre = _input_parent()
    sub = parser.add_subparsers(dest="command", required=True)

    for comando in JobCommand:
        p = sub.add_parser(comando.value, parents=[padre], help=comando.descripcion)
        if comando in (JobCommand.PDF, JobCommand.CDF):
            p.add_argument("--method", choices=["fast", "direct"], default="fast")
        if comando == JobCommand.REQUIRED_TERMS:
            p.add_argument("--kind", choices=DistributionKind.get_choices() + ["both"], default="both")
        if comando == JobCommand.MOMENTS:
            p.add_argument("--m", default="2,4", help="Órdenes separados por comas")
        if comando in (JobCommand.SAMPLE, JobCommand.VALIDATE):
            p.add_argument("--n", type=int, default=100_000, help="Número de muestras")
        if comando == JobCommand.SAMPLE:
            p.add_argument(
                "--construction",
                choices=[c.value for c in SampleConstruction],
                default=SampleConstruction.SUM_REPRESENTATION.value,
            )
    return parser


def config_from_args(args: argparse.Namespace) -> JobConfig:
    """
    Traduce los argumentos a un JobConfig validado.

    Raises:
        InputError: Cualquier violación del esquema
    """
    datos = {
        "command": args.command,
        "absolute": args.absolute,
        "target_error": args.target,
        "max_terms": args.max_terms,
        "seed": args.seed,
        "output": args.out,
        "workers": args.workers,
    }

    if args.rho is not None:
        datos["rho"] = parse_float_list(args.rho)
    if args.covariance is not None:
        datos["covariance"] = args.covariance
    if args.awgn_brownian is not None:
        datos["awgn_brownian"] = {
            "t": parse_keyed(args.awgn_brownian, "T"),
            "r": parse_int_list(parse_keyed(args.r, "r")) if args.r else [],
        }
    elif args.r is not None:
        raise InputError("--r sólo se usa junto con --awgn-brownian")
    if args.equal is not None:
        datos["equal"] = {"rho": args.equal[0], "r": parse_int_list(args.equal[1])}
    if args.kms is not None:
        datos["kms"] = {"rho": args.kms[0], "p": args.kms[1], "q": args.kms[2]}
    if args.scenario is not None:
        datos["scenario"] = args.scenario

    if args.grid is not None:
        partes = parse_float_list(args.grid)
        if len(partes) != 3:
            raise InputError(f"--grid necesita MIN,MAX,COUNT; recibido {args.grid!r}")
        if partes[2] != int(partes[2]):
            raise InputError("COUNT de la rejilla debe ser entero")
        datos["grid"] = {"min": partes[0], "max": partes[1], "count": int(partes[2])}

    if getattr(args, "method", None):
        datos["method"] = args.method
    if getattr(args, "kind", None):
        datos["kinds"] = (
            DistributionKind.get_choices() if args.kind == "both" else [args.kind]
        )
    if getattr(args, "m", None):
        datos["orders"] = parse_int_list(args.m)
    if getattr(args, "n", None) is not None:
        datos["n_samples"] = args.n
    if getattr(args, "construction", None):
        datos["construction"] = args.construction

    try:
        return JobConfig.model_validate(datos)
    except ValidationError as e:
        error = e.errors()[0]
        campo = ".".join(str(parte) for parte in error["loc"])
        raise InputError(f"Configuración inválida ({campo}): {error['msg']}") from e


def _attach_grid_values(argv: Sequence[str]) -> list[str]:
    """'--grid -3,3,7' -> '--grid=-3,3,7' (argparse tomaría '-3,3,7' por una opción)."""
    salida: list[str] = []
    tokens = iter(argv)
    for token in tokens:
        if token == "--grid":
            valor = next(tokens, None)
            salida.append(token if valor is None else f"--grid={valor}")
        else:
            salida.append(token)
    return salida


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    argv = sys.argv[1:] if argv is None else argv
    return build_parser().parse_args(_attach_grid_values(argv))
