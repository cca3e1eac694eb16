"""
AdS-Fronts - Aritmética de Series de Taylor Truncadas
=====================================================

PROPÓSITO:
----------
Propagar derivadas exactas en s a través de la construcción del marco móvil
(productos internos, productos cuña, normalizaciones) sin diferencias finitas.

CONVENCIÓN:
-----------
Un "jet" de orden K es un arreglo c de forma (K+1, ...) con c[k] = f⁽ᵏ⁾/k!.
Los jets vectoriales tienen el eje de componentes al final: (K+1, ..., 4).
Todas las operaciones truncan al menor orden de sus argumentos.

VERSIÓN: 1.0
"""

from math import factorial

import numpy as np

from pseudo_metric import inner, wedge


# ============================================================================
# CONVERSIÓN
# ============================================================================

def from_derivatives(derivs: np.ndarray) -> np.ndarray:
    """Jet a partir de derivadas f, f', f'', ... apiladas en el eje 0"""
    derivs = np.asarray(derivs, dtype=float)
    escala = np.array([1.0 / factorial(k) for k in range(derivs.shape[0])])
    return derivs * escala.reshape((-1,) + (1,) * (derivs.ndim - 1))


def as_vector_factor(jet: np.ndarray) -> np.ndarray:
    """Añade el eje de componentes a un jet escalar"""
    return jet[..., None]


# ============================================================================
# PRODUCTOS
# ============================================================================

def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Producto de Cauchy; las formas tras el eje 0 se difunden"""
    n = min(a.shape[0], b.shape[0])
    salida = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(n):
        for i in range(k + 1):
            salida[k] += a[i] * b[k - i]
    return salida


def scale(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Jet escalar por jet vectorial"""
    return mul(as_vector_factor(a), v)


def inner_jet(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Jet de <a, b>"""
    n = min(a.shape[0], b.shape[0])
    partes = []
    for k in range(n):
        partes.append(sum(inner(a[i], b[k - i]) for i in range(k + 1)))
    return np.stack([np.asarray(p, dtype=float) for p in partes], axis=0)


def wedge_jet(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Jet de a ∧ b ∧ c (suma trilineal)"""
    n = min(a.shape[0], b.shape[0], c.shape[0])
    partes = []
    for k in range(n):
        total = 0.0
        for i in range(k + 1):
            for j in range(k + 1 - i):
                total = total + wedge(a[i], b[j], c[k - i - j])
        partes.append(total)
    return np.stack(partes, axis=0)


# ============================================================================
# FUNCIONES ELEMENTALES
# ============================================================================

def reciprocal(a: np.ndarray) -> np.ndarray:
    """Jet de 1/a; requiere a[0] ≠ 0"""
    r = np.zeros_like(a, dtype=float)
    r[0] = 1.0 / a[0]
    for k in range(1, a.shape[0]):
        acumulado = sum(a[i] * r[k - i] for i in range(1, k + 1))
        r[k] = -acumulado * r[0]
    return r


def sqrt(a: np.ndarray) -> np.ndarray:
    """Jet de √a; requiere a[0] > 0"""
    r = np.zeros_like(a, dtype=float)
    r[0] = np.sqrt(a[0])
    for k in range(1, a.shape[0]):
        acumulado = sum(r[i] * r[k - i] for i in range(1, k))
        r[k] = (a[k] - acumulado) / (2.0 * r[0])
    return r


def rsqrt(a: np.ndarray) -> np.ndarray:
    return reciprocal(sqrt(a))


# ============================================================================
# CÁLCULO
# ============================================================================

def deriv(a: np.ndarray) -> np.ndarray:
    """Jet de la derivada (pierde un orden)"""
    k = np.arange(1, a.shape[0], dtype=float)
    return a[1:] * k.reshape((-1,) + (1,) * (a.ndim - 1))


def integ(a: np.ndarray, constante=0.0) -> np.ndarray:
    """Jet de la primitiva con valor inicial dado (gana un orden)"""
    k = np.arange(1, a.shape[0] + 1, dtype=float)
    cola = a / k.reshape((-1,) + (1,) * (a.ndim - 1))
    cabeza = np.broadcast_to(np.asarray(constante, dtype=float), a.shape[1:])[None]
    return np.concatenate([cabeza, cola], axis=0)


def compose(f: np.ndarray, incremento: np.ndarray, vectorial: bool = False) -> np.ndarray:
    """
    Jet de f(u₀ + δ(σ)) dado el jet de f en u₀ y el jet escalar de δ con δ(0) = 0.

    Evaluación de Horner truncada al orden de δ.
    """
    n = incremento.shape[0]
    factor = as_vector_factor(incremento) if vectorial else incremento
    forma = np.broadcast_shapes(f.shape[1:], factor.shape[1:])
    resultado = np.zeros((n,) + forma)
    for k in reversed(range(f.shape[0])):
        resultado = mul(factor, resultado) if k < f.shape[0] - 1 else resultado
        resultado[0] = resultado[0] + f[k]
    return resultado


def evaluate_at(a: np.ndarray, h) -> np.ndarray:
    """Valor del polinomio de Taylor en el desplazamiento h (Horner)"""
    h = np.asarray(h, dtype=float)
    valor = np.broadcast_to(a[-1], np.broadcast_shapes(a.shape[1:], h.shape)).copy()
    for k in reversed(range(a.shape[0] - 1)):
        valor = valor * h + a[k]
    return valor
