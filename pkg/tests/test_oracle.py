"""Oráculos de fuerza bruta"""

import math

import numpy as np
import pytest

from conftest import DOS_PI, RAIZ2
from fronts import FrontCloud, SignChoice, front_point, sample_front_cloud
from oracle import (STENCILS, FDScheme, allpairs_intersections, cofactor_det, default_scheme,
                    fd_derivative, height_critical_scan)

PLUS, MINUS = SignChoice.PLUS, SignChoice.MINUS


# ----------------------------------------------------------------------------
# Diferencias finitas
# ----------------------------------------------------------------------------

def test_pesos_suman_cero():
    for (orden, k), (desplazamientos, pesos) in STENCILS.items():
        assert len(desplazamientos) == len(pesos)
        assert sum(pesos) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("k, esperado", [(1, math.cos(0.7)), (2, -math.sin(0.7)),
                                         (3, -math.cos(0.7)), (4, math.sin(0.7))])
def test_derivadas_del_seno(k, esperado):
    assert fd_derivative(math.sin, 0.7, k) == pytest.approx(esperado, abs=1e-5)


def test_polinomio_exacto():
    assert fd_derivative(lambda x: x ** 2, 1.5, 1) == pytest.approx(3.0, abs=1e-10)


def test_derivada_vectorial():
    d = fd_derivative(lambda x: np.array([x, x ** 2, math.exp(x)]), 0.0, 1)
    np.testing.assert_allclose(d, [1.0, 0.0, 1.0], atol=1e-10)


@pytest.mark.parametrize("orden, k", [(2, 1), (2, 2), (4, 1)])
def test_orden_de_convergencia(orden, k):
    exacta = math.exp(0.3)
    grueso = abs(fd_derivative(math.exp, 0.3, k, FDScheme(orden, 1e-2)) - exacta)
    fino = abs(fd_derivative(math.exp, 0.3, k, FDScheme(orden, 5e-3)) - exacta)
    assert math.log2(grueso / fino) == pytest.approx(orden, abs=0.3)


@pytest.mark.parametrize("orden, paso", [(3, 1e-3), (4, 1e-1), (2, 1e-8)])
def test_esquema_invalido(orden, paso):
    with pytest.raises(ValueError):
        FDScheme(orden, paso)


def test_esquema_por_defecto():
    assert default_scheme(4) == FDScheme(4, 1e-2)
    with pytest.raises(ValueError):
        fd_derivative(math.sin, 0.0, 5)


# ----------------------------------------------------------------------------
# Barrido de puntos críticos
# ----------------------------------------------------------------------------

def test_barrido_en_un_punto_del_frente(hopf):
    lam = front_point(hopf, 1.0, 0.0, 0.5, PLUS).point
    criticos = height_critical_scan(hopf, 0.0, lam, 400)
    cero = [c for c in criticos if abs(c.h) <= 1e-9]
    assert len(cero) == 1
    assert cero[0].s == pytest.approx(1.0, abs=1e-8)


def test_barrido_en_la_curva(hopf):
    criticos = height_critical_scan(hopf, 0.0, hopf.gamma(1.0, 0.0), 400)
    assert min(abs(c.s - 1.0) for c in criticos) <= 1e-8
    assert any(c.h == pytest.approx(-2.0, abs=1e-9) for c in criticos)


def test_barrido_lejos_de_los_rayos(hopf):
    lam = np.array([math.cosh(0.3), 0.0, math.sinh(0.3), 0.0])
    criticos = height_critical_scan(hopf, 0.0, lam, 400)
    assert criticos
    assert all(abs(c.h) >= 0.1 for c in criticos)


# ----------------------------------------------------------------------------
# Búsqueda exhaustiva
# ----------------------------------------------------------------------------

def _nube_abierta(hopf, sign=PLUS):
    return sample_front_cloud(hopf, 0.0, np.linspace(0.0, math.pi, 40),
                              np.linspace(1.0, 2.0, 12), sign)


def test_misma_nube_sin_pares(hopf):
    nube = _nube_abierta(hopf)
    assert allpairs_intersections(nube, nube, 1e-12) == []


def test_copia_de_la_nube_sin_pares(hopf):
    nube = _nube_abierta(hopf)
    copia = FrontCloud(nube.t, nube.sign, nube.s_values.copy(), nube.mu_values.copy(),
                       nube.points.copy())
    assert allpairs_intersections(nube, copia, 1e-12) == []


def test_nubes_disjuntas(hopf):
    nube = _nube_abierta(hopf)
    lejos = FrontCloud(nube.t, MINUS, nube.s_values, nube.mu_values, nube.points + 10.0)
    assert allpairs_intersections(nube, lejos, 0.5) == []


def test_concentracion_focal(hopf):
    s = np.linspace(0.0, DOS_PI, 33)[:-1]
    nube = sample_front_cloud(hopf, 0.0, s, [0.5, 1 / RAIZ2, 0.9], PLUS)
    pares = allpairs_intersections(nube, nube, 1e-10, s_period=32)
    assert pares
    foco = np.array([1 / RAIZ2, 1 / RAIZ2, 0.0, 0.0])
    for par in pares:
        assert par.index_a[1] == par.index_b[1] == 1
        np.testing.assert_allclose(par.midpoint, foco, atol=1e-12)
        d = abs(par.index_a[0] - par.index_b[0])
        assert min(d, 32 - d) > 2


# ----------------------------------------------------------------------------
# Determinante
# ----------------------------------------------------------------------------

def test_cofactores(rng):
    assert cofactor_det([[2.0]]) == 2.0
    assert cofactor_det(np.eye(4)) == 1.0
    for _ in range(10):
        m = rng.normal(size=(4, 4))
        assert cofactor_det(m) == pytest.approx(np.linalg.det(m), rel=1e-10, abs=1e-12)
