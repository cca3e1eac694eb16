"""
AdS-Fronts - Utilidades de Formateo y Escritura
===============================================

PROPÓSITO:
----------
Formateo numérico independiente del locale y escritores deterministas de
artefactos: dos corridas con la misma configuración producen bytes idénticos.

FUNCIONALIDADES:
- Formateo de reales con 17 cifras significativas ('.' decimal)
- Emisor JSON con orden de claves fijo y NaN/inf como null
- CSV con encabezado, separador ',' y fin de línea LF (pandas)
- OBJ de nubes de frente: un objeto por rama y rebanada, cuadriláteros (s, μ)
"""

import math
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np
import pandas as pd

# ============================================================================
# CONSTANTES
# ============================================================================

FORMATO_REAL = "%.17g"

# |x_m1| mínimo para proyectar los vértices OBJ a la carta (x_0, x_1, x_2)/x_m1
UMBRAL_CARTA_OBJ = 1e-3


# ============================================================================
# FORMATEO NUMÉRICO
# ============================================================================

def formatear_numero(valor: Union[float, int, None]) -> str:
    """
    Formatea un real con 17 cifras significativas, sin depender del locale.

    Args:
        valor: Número a formatear

    Returns:
        str: Texto del número; "null" para None, NaN o infinito

    Examples:
        >>> formatear_numero(0.1)
        "0.10000000000000001"
        >>> formatear_numero(float("nan"))
        "null"
    """
    if valor is None:
        return "null"
    if isinstance(valor, (bool, np.bool_)):
        return "true" if valor else "false"
    if isinstance(valor, (int, np.integer)):
        return str(int(valor))
    valor = float(valor)
    if not math.isfinite(valor):
        return "null"
    texto = FORMATO_REAL % valor
    if texto == "-0":
        texto = "0"
    return texto


# ============================================================================
# JSON DETERMINISTA
# ============================================================================

_ESCAPES_JSON = {i: f"\\u{i:04x}" for i in range(0x20)}
_ESCAPES_JSON.update({ord('"'): '\\"', ord("\\"): "\\\\", ord("\n"): "\\n",
                      ord("\r"): "\\r", ord("\t"): "\\t"})


def _cadena_json(texto: str) -> str:
    return '"' + texto.translate(_ESCAPES_JSON) + '"'


def a_json(valor, sangria: int = 2, _nivel: int = 0) -> str:
    """
    Serializa dicts, listas, tuplas, arreglos numpy, enums y escalares.

    Las claves conservan el orden de inserción del dict.
    """
    espacio = " " * (sangria * (_nivel + 1))
    cierre = " " * (sangria * _nivel)

    if isinstance(valor, Enum):
        valor = valor.value
    if isinstance(valor, np.ndarray):
        valor = valor.tolist()
    if isinstance(valor, dict):
        if not valor:
            return "{}"
        items = [f"{espacio}{_cadena_json(str(k))}: {a_json(v, sangria, _nivel + 1)}"
                 for k, v in valor.items()]
        return "{\n" + ",\n".join(items) + "\n" + cierre + "}"
    if isinstance(valor, (list, tuple)):
        if not valor:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in valor):
            return "[" + ", ".join(a_json(v, sangria, _nivel + 1) for v in valor) + "]"
        items = [espacio + a_json(v, sangria, _nivel + 1) for v in valor]
        return "[\n" + ",\n".join(items) + "\n" + cierre + "]"
    if isinstance(valor, str):
        return _cadena_json(valor)
    return formatear_numero(valor)


def escribir_json(ruta: Union[str, Path], datos: dict) -> Path:
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    with open(ruta, "w", encoding="utf-8", newline="\n") as f:
        f.write(a_json(datos) + "\n")
    return ruta


# ============================================================================
# CSV
# ============================================================================

def escribir_csv(ruta: Union[str, Path], df: pd.DataFrame) -> Path:
    """CSV con encabezado, 17 cifras significativas y fin de línea LF"""
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(ruta, index=False, float_format=FORMATO_REAL, lineterminator="\n",
              encoding="utf-8", na_rep="")
    return ruta


# ============================================================================
# OBJ
# ============================================================================

def _vertices_obj(puntos: np.ndarray) -> np.ndarray:
    """Proyección a la carta afín si |x_m1| está lejos de 0 en toda la nube"""
    if puntos.size and np.min(np.abs(puntos[..., 0])) >= UMBRAL_CARTA_OBJ:
        return puntos[..., 1:] / puntos[..., :1]
    return puntos[..., 1:]


def obj_texto(objetos: Iterable) -> str:
    """
    Texto OBJ de una secuencia de (nombre, puntos (n_s, n_mu, 4)).

    Los índices de vértice son globales y 1-based.
    """
    lineas = []
    base = 1
    for nombre, puntos in objetos:
        n_s, n_mu = puntos.shape[:2]
        vertices = _vertices_obj(puntos).reshape(-1, 3)
        lineas.append(f"o {nombre}")
        for v in vertices:
            lineas.append("v " + " ".join(formatear_numero(c) for c in v))
        for i in range(n_s - 1):
            for j in range(n_mu - 1):
                a = base + i * n_mu + j
                lineas.append(f"f {a} {a + n_mu} {a + n_mu + 1} {a + 1}")
        base += n_s * n_mu
    return "\n".join(lineas) + "\n"


def escribir_obj(ruta: Union[str, Path], objetos: Iterable) -> Path:
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    with open(ruta, "w", encoding="utf-8", newline="\n") as f:
        f.write(obj_texto(objetos))
    return ruta


def nombre_objeto(sign_value: str, indice_t: int, prefijo: Optional[str] = "front") -> str:
    return f"{prefijo}_{sign_value}_t{indice_t}"
