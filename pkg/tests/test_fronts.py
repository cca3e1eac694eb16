"""Frentes de luz, curvas focales y nubes del frente"""

import math

import numpy as np
import pytest

from conftest import DOS_PI, RAIZ2
from fronts import (FOCAL_COLUMNS, FRONT_COLUMNS, ParabolicPoint, SignChoice, focal_curve,
                    focal_curve_at, focal_point, front_point, nullcone_gauss,
                    principal_curvature, sample_front_cloud, unfolded_focal_point,
                    unfolded_front_point)
from oracle import fd_derivative
from pseudo_metric import inner, on_ads, on_nullcone
from singularities import focal_tangent
from worldsheet import WorldSheet

PLUS, MINUS = SignChoice.PLUS, SignChoice.MINUS


def _focal_hopf(t: float, sign: SignChoice) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    if sign is PLUS:
        return np.array([c - s, s + c, 0.0, 0.0]) / RAIZ2
    return np.array([c + s, s - c, 0.0, 0.0]) / RAIZ2


# ----------------------------------------------------------------------------
# Puntos del frente
# ----------------------------------------------------------------------------

def test_punto_del_frente_hopf(hopf):
    m = front_point(hopf, 0.0, 0.0, 1.0, PLUS)
    np.testing.assert_allclose(m.point, [RAIZ2 - 1.0, 1.0, 1.0 - RAIZ2, 0.0], atol=1e-12)
    assert m.to_dict()["sign"] == "plus"


def test_gauss_nulo_hopf(hopf):
    v = nullcone_gauss(hopf, 0.0, 0.0, PLUS)
    np.testing.assert_allclose(v, [-1.0, 1.0, -RAIZ2, 0.0], atol=1e-12)
    assert principal_curvature(hopf, 0.0, 0.0, PLUS) == pytest.approx(RAIZ2, abs=1e-12)
    assert principal_curvature(hopf, 0.0, 0.0, MINUS) == pytest.approx(-RAIZ2, abs=1e-12)


@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_frente_en_el_cono_de_luz(perturbado, rng, sign):
    """LS(s,t,μ) - Γ(s,t) es nulo para todo μ"""
    for _ in range(20):
        s = rng.uniform(0.0, 6.0)
        t = float(rng.choice([0.0, 0.5]))
        mu = rng.uniform(-3.0, 3.0)
        p = front_point(perturbado, s, t, mu, sign).point
        assert on_nullcone(p, perturbado.gamma(s, t), 1e-10)
        assert on_ads(p, 1e-10)


def test_variantes_desplegadas(hopf):
    m, t = unfolded_front_point(hopf, 0.5, 0.25, 1.0, MINUS)
    assert t == 0.25
    np.testing.assert_allclose(m.point, front_point(hopf, 0.5, 0.25, 1.0, MINUS).point)
    foco, t = unfolded_focal_point(hopf, 0.5, 0.25, MINUS)
    assert t == 0.25
    np.testing.assert_allclose(foco.point, _focal_hopf(0.25, MINUS), atol=1e-12)


def test_nube_del_frente(hopf):
    s = np.linspace(0.0, DOS_PI, 9)
    mu = np.linspace(-1.0, 1.0, 5)
    nube = sample_front_cloud(hopf, 0.3, s, mu, PLUS)
    assert nube.shape == (9, 5)
    np.testing.assert_allclose(nube.points[4, 3], front_point(hopf, s[4], 0.3, mu[3], PLUS).point,
                               atol=1e-13)
    puntos, i_s, i_mu = nube.flat()
    assert puntos.shape == (45, 4)
    assert (i_s[7], i_mu[7]) == (1, 2)
    assert list(nube.to_dataframe().columns) == FRONT_COLUMNS


# ----------------------------------------------------------------------------
# Puntos y curvas focales
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("sign", [PLUS, MINUS])
@pytest.mark.parametrize("t", [-0.8, 0.0, 0.6])
def test_punto_focal_hopf(hopf, sign, t):
    for s in (0.0, 1.3, 4.0):
        foco = focal_point(hopf, s, t, sign)
        np.testing.assert_allclose(foco.point, _focal_hopf(t, sign), atol=1e-12)
        assert inner(foco.point, foco.point) == pytest.approx(-1.0, abs=1e-12)
        assert foco.residual <= 1e-12


def test_punto_focal_del_ejemplo(hopf):
    np.testing.assert_allclose(focal_point(hopf, 0.0, 0.0, MINUS).point,
                               [1 / RAIZ2, -1 / RAIZ2, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(focal_point(hopf, 0.0, 0.0, PLUS).point,
                               [1 / RAIZ2, 1 / RAIZ2, 0.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_curva_focal_hopf_es_un_punto(hopf, sign):
    curva = focal_curve(hopf, 0.0, sign, 128)
    assert len(curva) == 128
    assert curva.diameter() <= 1e-8
    assert curva.gaps == []
    assert max(m.residual for m in curva) <= 1e-8
    assert list(curva.to_dataframe().columns) == FOCAL_COLUMNS


@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_curva_focal_perturbada(perturbado, sign):
    curva = focal_curve(perturbado, 0.0, sign, 96)
    assert curva.gaps == []
    assert max(m.residual for m in curva) <= 1e-8
    assert curva.diameter() > 1e-3
    p = curva.points
    np.testing.assert_allclose(p[0], p[-1], atol=1e-8)
    assert np.all(np.abs(inner(p, p) + 1.0) <= 1e-10)


def test_punto_parabolico():
    """Γ_ss = Γ: κ_g = κ_n = 0 y ambas ramas son parabólicas"""
    w = WorldSheet.from_texts(["cosh(s)*cos(t)", "cosh(s)*sin(t)", "sinh(s)", "0"],
                              (-1.0, 1.0), (-0.5, 0.5))
    with pytest.raises(ParabolicPoint) as exc:
        focal_point(w, 0.2, 0.0, PLUS)
    assert exc.value.sign is PLUS
    assert abs(exc.value.kappa) <= 1e-8

    curva = focal_curve_at(w, 0.0, PLUS, np.linspace(-1.0, 1.0, 11))
    assert len(curva) == 0
    assert curva.gaps == [(-1.0, 1.0)]


# ----------------------------------------------------------------------------
# Tangente de la curva focal
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_tangente_focal_contra_diferencias_finitas(perturbado, sign):
    _, fin = perturbado.s_interval(0.0)
    for s in np.linspace(0.2, fin - 0.2, 12):
        analitica = focal_tangent(perturbado, s, 0.0, sign)
        numerica = fd_derivative(lambda x: focal_point(perturbado, x, 0.0, sign).point, s, 1)
        np.testing.assert_allclose(analitica, numerica, rtol=1e-6, atol=1e-6)


def test_tangente_focal_hopf_nula(hopf):
    for sign in (PLUS, MINUS):
        assert np.linalg.norm(focal_tangent(hopf, 1.0, 0.2, sign)) <= 1e-9
