"""
Escritura CSV en streaming.

Las filas se escriben según llegan (generadores incluidos); los reales se
formatean con 17 cifras significativas y punto decimal.
"""

import csv
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from ...domain.exceptions import InputError


def format_cell(value) -> str:
    """Formatea una celda: reales a %.17g, el resto con str()."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


@contextmanager
def open_destination(destination: Optional[Union[str, Path, TextIO]]):
    """Abre el destino (ruta, fichero abierto o stdout si None)."""
    if destination is None:
        yield sys.stdout
        return
    if hasattr(destination, "write"):
        yield destination
        return
    try:
        handle = open(destination, "w", encoding="utf-8", newline="")
    except OSError as e:
        raise InputError(f"No se puede escribir en {destination}: {e}") from e
    with handle:
        yield handle


def write_csv(
    header: Sequence[str],
    rows: Iterable[Sequence],
    destination: Optional[Union[str, Path, TextIO]] = None,
) -> int:
    """
    Escribe cabecera y filas en CSV.

    Args:
        header: Nombres de columna
        rows: Filas (cualquier iterable; no se materializa)
        destination: Ruta, fichero abierto o None para stdout

    Returns:
        int: Número de filas escritas (sin la cabecera)

    Raises:
        InputError: Destino no escribible o fila de ancho distinto a la cabecera
    """
    escritas = 0
    with open_destination(destination) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise InputError(
                    f"Fila {escritas + 1} con {len(row)} columnas; la cabecera tiene {len(header)}"
                )
            writer.writerow([format_cell(v) for v in row])
            escritas += 1
    return escritas
