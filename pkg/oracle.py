"""
AdS-Fronts - Oráculos Independientes de Verificación
====================================================

PROPÓSITO:
----------
Primitivas de fuerza bruta para verificar el pipeline principal por rutas
que no comparten código con él:

1. Diferencias finitas centradas (orden 2 o 4) para derivadas k = 1..4
2. Barrido denso de puntos críticos de la función altura (bisección)
3. Búsqueda exhaustiva O(N²) de pares cercanos entre nubes de frente
4. Determinante 4×4 por cofactores (para la identidad del producto cuña)

Los oráculos priorizan la independencia sobre el rendimiento.

VERSIÓN: 1.0
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from fronts import FrontCloud
from worldsheet import WorldSheet

logger = logging.getLogger(__name__)

# ============================================================================
# CONSTANTES
# ============================================================================

# Pesos de los esténciles centrados: {(orden, k): (desplazamientos, pesos)}
STENCILS = {
    (2, 1): (range(-1, 2), (-0.5, 0.0, 0.5)),
    (2, 2): (range(-1, 2), (1.0, -2.0, 1.0)),
    (2, 3): (range(-2, 3), (-0.5, 1.0, 0.0, -1.0, 0.5)),
    (2, 4): (range(-2, 3), (1.0, -4.0, 6.0, -4.0, 1.0)),
    (4, 1): (range(-2, 3), (1 / 12, -8 / 12, 0.0, 8 / 12, -1 / 12)),
    (4, 2): (range(-2, 3), (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)),
    (4, 3): (range(-3, 4), (1 / 8, -1.0, 13 / 8, 0.0, -13 / 8, 1.0, -1 / 8)),
    (4, 4): (range(-3, 4), (-1 / 6, 2.0, -13 / 2, 28 / 3, -13 / 2, 2.0, -1 / 6)),
}

DEFAULT_STEPS = {1: 1e-3, 2: 1e-3, 3: 5e-3, 4: 1e-2}
STEP_RANGE = (1e-6, 1e-2)
BISECTION_TOL = 1e-10


# ============================================================================
# DIFERENCIAS FINITAS
# ============================================================================

@dataclass(frozen=True)
class FDScheme:
    order: int = 4
    step: float = 1e-3

    def __post_init__(self):
        if self.order not in (2, 4):
            raise ValueError(f"Orden de esquema no soportado: {self.order}")
        if not STEP_RANGE[0] <= self.step <= STEP_RANGE[1]:
            raise ValueError(f"Paso fuera de [{STEP_RANGE[0]:g}, {STEP_RANGE[1]:g}]: {self.step}")


def default_scheme(k: int, order: int = 4) -> FDScheme:
    return FDScheme(order, DEFAULT_STEPS[k])


def fd_derivative(f: Callable, x: float, k: int, scheme: Optional[FDScheme] = None):
    """
    k-ésima derivada centrada de f en x.

    f puede devolver escalares o arreglos (derivada componente a componente).
    """
    if k not in (1, 2, 3, 4):
        raise ValueError(f"Solo se soportan derivadas de orden 1 a 4, no {k}")
    scheme = scheme or default_scheme(k)
    desplazamientos, pesos = STENCILS[(scheme.order, k)]
    h = scheme.step
    total = 0.0
    for j, c in zip(desplazamientos, pesos):
        if c != 0.0:
            total = total + c * np.asarray(f(x + j * h), dtype=float)
    resultado = total / h ** k
    return float(resultado) if np.ndim(resultado) == 0 else resultado


# ============================================================================
# BARRIDO DE PUNTOS CRÍTICOS
# ============================================================================

@dataclass
class CriticalPoint:
    s: float
    h: float


def height_critical_scan(w: WorldSheet, t: float, lam, n: int,
                         tol: float = BISECTION_TOL) -> List[CriticalPoint]:
    """
    Ceros de ∂H/∂s sobre la curva momentánea t, con H(s) = <Γ(s,t), λ> + 1.

    ∂H/∂s se obtiene por diferencias finitas de H evaluada con Γ (sin jets
    ni marcos); los cambios de signo se refinan por bisección.
    """
    lam = np.asarray(lam, dtype=float)
    firma = np.array([-1.0, -1.0, 1.0, 1.0])

    def altura(s):
        return float(np.sum(firma * w.gamma(s, t) * lam)) + 1.0

    paso = default_scheme(1)
    a_min, a_max = w.s_interval(t)
    margen = 3 * paso.step

    def pendiente(s):
        s = min(max(s, a_min + margen), a_max - margen)
        return fd_derivative(altura, s, 1, paso)

    nodos = np.linspace(a_min + margen, a_max - margen, n)
    valores = np.array([pendiente(s) for s in nodos])

    criticos = []
    for i in range(n):
        if valores[i] == 0.0:
            criticos.append(float(nodos[i]))
    for i in range(n - 1):
        if valores[i] == 0.0 or valores[i + 1] == 0.0:
            continue
        if np.sign(valores[i]) != np.sign(valores[i + 1]):
            a, b, fa = float(nodos[i]), float(nodos[i + 1]), valores[i]
            while b - a > tol:
                m = 0.5 * (a + b)
                fm = pendiente(m)
                if np.sign(fm) == np.sign(fa):
                    a, fa = m, fm
                else:
                    b = m
            criticos.append(0.5 * (a + b))
    criticos.sort()
    return [CriticalPoint(s, altura(s)) for s in criticos]


# ============================================================================
# BÚSQUEDA EXHAUSTIVA DE INTERSECCIONES
# ============================================================================

@dataclass
class IntersectionPair:
    index_a: Tuple[int, int]
    index_b: Tuple[int, int]
    distance: float
    point_a: np.ndarray
    point_b: np.ndarray

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.point_a + self.point_b)


def _misma_preimagen(ca: FrontCloud, cb: FrontCloud, ia: Tuple[int, int], ib: Tuple[int, int],
                     vecindad: int, s_period: Optional[int]) -> bool:
    if ca.sign is not cb.sign:
        return False
    d = abs(ia[0] - ib[0])
    if s_period:
        d = min(d % s_period, s_period - d % s_period)
    return d <= vecindad


def allpairs_intersections(cloud_a: FrontCloud, cloud_b: FrontCloud, eps: float,
                           neighbor: int = 2, s_period: Optional[int] = None,
                           block: int = 512) -> List[IntersectionPair]:
    """
    Todos los pares a distancia euclídea ≤ eps con preimágenes distintas.

    Dos nodos de la misma rama a ≤ neighbor índices en s (cíclicos si se da
    s_period) cuentan como la misma preimagen.
    """
    misma_nube = cloud_a is cloud_b
    pa = cloud_a.points.reshape(-1, 4)
    pb = cloud_b.points.reshape(-1, 4)
    n_mu_a = cloud_a.points.shape[1]
    n_mu_b = cloud_b.points.shape[1]

    pares = []
    for inicio in range(0, len(pa), block):
        bloque = pa[inicio:inicio + block]
        d = np.sqrt(np.sum((bloque[:, None, :] - pb[None, :, :]) ** 2, axis=-1))
        for fila, col in zip(*np.nonzero(d <= eps)):
            i = inicio + int(fila)
            j = int(col)
            if misma_nube and j <= i:
                continue
            ia = divmod(i, n_mu_a)
            ib = divmod(j, n_mu_b)
            if _misma_preimagen(cloud_a, cloud_b, ia, ib, neighbor, s_period):
                continue
            pares.append(IntersectionPair(ia, ib, float(d[fila, col]), pa[i].copy(), pb[j].copy()))
    logger.debug("🔍 Búsqueda exhaustiva: %d pares a distancia ≤ %g", len(pares), eps)
    return pares


# ============================================================================
# DETERMINANTE POR COFACTORES
# ============================================================================

def cofactor_det(m) -> float:
    """Determinante por desarrollo de Laplace en la primera fila"""
    m = [list(map(float, fila)) for fila in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0.0
    for j in range(n):
        menor = [fila[:j] + fila[j + 1:] for fila in m[1:]]
        total += (-1) ** j * m[0][j] * cofactor_det(menor)
    return total
