"""
AdS-Fronts - Métrica Pseudo-Euclídea R⁴₂
=========================================

PROPÓSITO:
----------
Álgebra lineal semi-euclídea exacta en R⁴₂ (índice 2): producto pseudo-escalar,
tipo causal, producto cuña y pruebas de pertenencia a AdS³, conos nulos,
pseudo-esfera e hiperplanos.

FUNCIONALIDADES:
----------------
1. Producto interno <x,y> = -x₋₁y₋₁ - x₀y₀ + x₁y₁ + x₂y₂
2. Clasificación causal (Spacelike / Null / Timelike) con tolerancia explícita
3. Producto cuña de tres vectores (desarrollo formal del determinante)
4. Pertenencia a AdS³, cono nulo con vértice, pseudo-esfera e hiperplanos

CONVENCIONES:
-------------
Un SemiVector es un arreglo numpy de forma (4,) con componentes
(x₋₁, x₀, x₁, x₂). Todas las funciones aceptan además lotes de forma
(..., 4) y operan sobre el último eje.

VERSIÓN: 1.0
"""

from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np

# ============================================================================
# CONSTANTES
# ============================================================================

# Firma de la forma bilineal (x₋₁, x₀, x₁, x₂)
SIGNATURE = np.array([-1.0, -1.0, 1.0, 1.0])

# Primera fila formal del determinante del producto cuña: (-e₋₁, -e₀, e₁, e₂)
WEDGE_ROW = SIGNATURE

NULL_TOL = 1e-10

# Por debajo de este umbral un vector se considera nulo componente a componente
ZERO_THRESHOLD = np.finfo(float).eps

E_M1 = np.array([1.0, 0.0, 0.0, 0.0])
E_0 = np.array([0.0, 1.0, 0.0, 0.0])
E_1 = np.array([0.0, 0.0, 1.0, 0.0])
E_2 = np.array([0.0, 0.0, 0.0, 1.0])

ArrayLike = Union[Sequence[float], np.ndarray]


# ============================================================================
# ERRORES
# ============================================================================

class AdSError(Exception):
    """Error base de todo el cálculo geométrico"""


class ZeroVector(AdSError):
    """El vector no tiene tipo causal (todas sus componentes son ~0)"""


# ============================================================================
# MODELOS DE DATOS
# ============================================================================

SemiVector = np.ndarray


def semivector(components: ArrayLike) -> SemiVector:
    """
    Construye un SemiVector validado.

    Args:
        components: 4 reales (x₋₁, x₀, x₁, x₂)

    Returns:
        np.ndarray de forma (4,) y dtype float

    Raises:
        ValueError: si no son 4 componentes finitas
    """
    x = np.asarray(components, dtype=float)
    if x.shape != (4,):
        raise ValueError(f"Un SemiVector tiene 4 componentes, se recibió forma {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"Componentes no finitas: {x}")
    return x


class CausalType(Enum):
    SPACELIKE = "Spacelike"
    NULL = "Null"
    TIMELIKE = "Timelike"


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """
    Hiperplano HP(n, c) = {x | <x, n> = c} con pseudo-normal n.
    """
    normal: SemiVector
    offset: float

    def __post_init__(self):
        normal = semivector(self.normal)
        if np.linalg.norm(normal) <= 0.0:
            raise ValueError("La pseudo-normal de un hiperplano no puede ser cero")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    def to_dict(self) -> dict:
        return {"normal": self.normal.tolist(), "offset": self.offset}


# ============================================================================
# OPERACIONES
# ============================================================================

def inner(x: ArrayLike, y: ArrayLike) -> Union[float, np.ndarray]:
    """Producto pseudo-escalar <x,y> sobre el último eje"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    valor = np.sum(SIGNATURE * x * y, axis=-1)
    return float(valor) if np.ndim(valor) == 0 else valor


def causal_type(x: ArrayLike, null_tol: float = NULL_TOL) -> CausalType:
    """
    Tipo causal de x según el signo de <x,x>.

    Raises:
        ZeroVector: si todas las componentes están bajo el umbral de máquina
    """
    x = semivector(x)
    if np.all(np.abs(x) < ZERO_THRESHOLD):
        raise ZeroVector(f"Vector nulo sin tipo causal: {x}")

    q = inner(x, x)
    if q < -null_tol:
        return CausalType.TIMELIKE
    if abs(q) <= null_tol:
        return CausalType.NULL
    return CausalType.SPACELIKE


def _minor_dets(m: np.ndarray) -> np.ndarray:
    """Determinantes 3×3 de m (..., 3, 4) quitando cada columna; forma (..., 4)"""
    columnas = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
    return np.stack([np.linalg.det(m[..., :, c]) for c in columnas], axis=-1)


def wedge(x1: ArrayLike, x2: ArrayLike, x3: ArrayLike) -> np.ndarray:
    """
    Producto cuña x1 ∧ x2 ∧ x3.

    Desarrollo formal por la primera fila (-e₋₁, -e₀, e₁, e₂) del determinante
    cuyas filas restantes son x1, x2, x3. Cumple <x, x1∧x2∧x3> = det(x, x1, x2, x3)
    para todo x. Entradas degeneradas devuelven el vector cero.
    """
    m = np.stack(np.broadcast_arrays(
        np.asarray(x1, dtype=float),
        np.asarray(x2, dtype=float),
        np.asarray(x3, dtype=float),
    ), axis=-2)
    cofactores = _minor_dets(m) * np.array([1.0, -1.0, 1.0, -1.0])
    return WEDGE_ROW * cofactores


def on_ads(x: ArrayLike, tol: float) -> bool:
    """x ∈ AdS³  ⇔  |<x,x> + 1| ≤ tol"""
    return bool(abs(inner(x, x) + 1.0) <= tol)


def on_nullcone(x: ArrayLike, vertex: ArrayLike, tol: float) -> bool:
    """x pertenece al cono nulo cerrado con vértice dado"""
    d = np.asarray(x, dtype=float) - np.asarray(vertex, dtype=float)
    return bool(abs(inner(d, d)) <= tol)


def on_pseudo_sphere(x: ArrayLike, tol: float) -> bool:
    """x ∈ S³₂  ⇔  |<x,x> - 1| ≤ tol"""
    return bool(abs(inner(x, x) - 1.0) <= tol)


def hyperplane_contains(h: Hyperplane, x: ArrayLike, tol: float) -> bool:
    """|<x, n> - c| ≤ tol"""
    return bool(abs(inner(x, h.normal) - h.offset) <= tol)


def adaptedness(gamma: np.ndarray, b: np.ndarray) -> Union[float, np.ndarray]:
    """
    det(Γ, b, e₁, e₂) = Γ₋₁b₀ - Γ₀b₋₁ (bloque 2×2 temporal).

    Positivo cuando b es un normal temporal adaptado.
    """
    gamma = np.asarray(gamma, dtype=float)
    b = np.asarray(b, dtype=float)
    return gamma[..., 0] * b[..., 1] - gamma[..., 1] * b[..., 0]
