"""Función altura, invariante σ± y clasificación de singularidades"""

import math

import numpy as np
import pytest

from conftest import RAIZ2
from frames import frame_at
from fronts import SignChoice, focal_curve, focal_point, front_point, sample_front_cloud
from oracle import FDScheme, fd_derivative
from pseudo_metric import inner
from singularities import (RESIDUAL_KEYS, SingularityClass, classify_point, classify_values,
                           curve_on_lightcone, cusp_tangency_check, dsigma, find_roots,
                           h_sss_closed_form, height, height_germ_order, height_t_derivative,
                           is_constant_focal, sigma, sigma_roots, singularity_report,
                           versality_determinant)

PLUS, MINUS = SignChoice.PLUS, SignChoice.MINUS


def _raices_modulo(raices, periodo):
    """Raíces reducidas a [0, periodo) sin repetir el extremo"""
    reducidas = sorted({round(r % periodo, 7) % round(periodo, 7) for r in raices})
    return np.array(reducidas)


# ----------------------------------------------------------------------------
# Función altura
# ----------------------------------------------------------------------------

def test_altura_ejemplos_hopf(hopf):
    assert height(hopf, 0.0, 0.0, [RAIZ2, 0.0, 1.0, 0.0]).h == pytest.approx(0.0, abs=1e-14)
    he = height(hopf, 0.0, 0.0, [RAIZ2, 0.0, 0.0, 1.0])
    assert he.h == pytest.approx(-1.0, abs=1e-14)
    assert he.dh[0] == pytest.approx(1.0, abs=1e-14)


def test_altura_en_el_punto_focal(hopf):
    he = height(hopf, 0.0, 0.0, [1 / RAIZ2, 1 / RAIZ2, 0.0, 0.0])
    assert max(abs(he.h), abs(he.dh[0]), abs(he.dh[1])) <= 1e-9
    assert abs(he.dh[2]) <= 1e-9


def test_altura_rutas_coinciden(perturbado, rng):
    for _ in range(30):
        s = rng.uniform(0.0, 6.0)
        lam = rng.normal(size=4)
        assert height(perturbado, s, 0.5, lam).agreement() <= 1e-8


def test_altura_en_puntos_del_frente(perturbado, rng):
    """Todo punto del frente es un punto crítico de altura cero"""
    for sign in (PLUS, MINUS):
        for _ in range(15):
            s, mu = rng.uniform(0.0, 6.0), rng.uniform(-3.0, 3.0)
            lam = front_point(perturbado, s, 0.0, mu, sign).point
            he = height(perturbado, s, 0.0, lam)
            assert abs(he.h) <= 1e-8
            assert abs(he.dh[0]) <= 1e-8


def test_derivada_temporal_de_la_altura(hopf):
    lam = front_point(hopf, 0.0, 0.0, 1.0, PLUS).point
    assert height_t_derivative(hopf, 0.0, 0.0, lam) == pytest.approx(-RAIZ2, abs=1e-12)


@pytest.mark.parametrize("nombre", ["hopf", "perturbado"])
@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_derivada_temporal_no_se_anula_fuera_de_la_curva_base(request, malla_chica, nombre, sign):
    w = request.getfixturevalue(nombre)
    mu = malla_chica.mu_values()
    mu = mu[mu != 0.0]
    peor = np.inf
    for t in malla_chica.t_values(w.t_range):
        s = w.s_values(t, malla_chica.n_s)
        nube = sample_front_cloud(w, t, s, mu, sign)
        _, gt = w.jets(s, t)
        dh_t = inner(gt[0][:, None, :], nube.points)
        peor = min(peor, float(np.min(np.abs(dh_t))))
    assert peor >= 1e-6


def test_tercera_derivada_por_variante(perturbado, rng):
    """
    Solo el coeficiente 1 + κ_g² - κ_n² de t reproduce la derivada simbólica;
    con + κ_n² la discrepancia es 2κ_n²<t, λ>.
    """
    fallos_impreso = 0
    n = 60
    for _ in range(n):
        s = rng.uniform(0.0, 6.0)
        lam = rng.normal(size=4)
        he = height(perturbado, s, 0.0, lam)
        f = frame_at(perturbado, s, 0.0)
        escala = 1.0 + float(np.linalg.norm(lam))
        assert abs(h_sss_closed_form(f, lam, "frame") - he.dh[2]) <= 1e-7 * escala
        if abs(h_sss_closed_form(f, lam, "printed") - he.dh[2]) > 1e-7 * escala:
            fallos_impreso += 1
    assert fallos_impreso >= 0.9 * n

    with pytest.raises(ValueError):
        h_sss_closed_form(frame_at(perturbado, 0.0, 0.0), np.ones(4), "otra")


def test_tercera_derivada_en_el_punto_focal(perturbado):
    """En el punto focal ∂³H/∂s³ = -σ/κ"""
    for sign in (PLUS, MINUS):
        for s in (0.5, 1.9, 3.3):
            f = frame_at(perturbado, s, 0.0)
            lam = focal_point(perturbado, s, 0.0, sign).point
            esperado = -sigma(perturbado, s, 0.0, sign) / f.principal_curvature(sign)
            assert height(perturbado, s, 0.0, lam).dh[2] == pytest.approx(esperado, abs=1e-7)


# ----------------------------------------------------------------------------
# σ± y clasificación
# ----------------------------------------------------------------------------

def test_sigma_hopf_nula(hopf):
    for sign in (PLUS, MINUS):
        for s in np.linspace(0.0, 6.0, 7):
            assert abs(sigma(hopf, s, 0.3, sign)) <= 1e-10
            assert abs(dsigma(hopf, s, 0.3, sign)) <= 1e-10
        assert is_constant_focal(hopf, 0.3, sign)
        assert sigma_roots(hopf, 0.3, sign) == []


def test_sigma_perturbado_es_menos_la_derivada_de_kappa_n(perturbado):
    for s in (0.4, 2.2, 5.0):
        f = frame_at(perturbado, s, 0.0)
        assert sigma(perturbado, s, 0.0, PLUS) == pytest.approx(-f.dkappa_n, abs=1e-9)
        assert sigma(perturbado, s, 0.0, MINUS) == pytest.approx(f.dkappa_n, abs=1e-9)


def test_derivada_de_sigma_contra_diferencias_finitas(perturbado, rng):
    esquema = FDScheme(order=4, step=1e-3)
    for sign in (PLUS, MINUS):
        for s in rng.uniform(0.2, 6.0, 10):
            numerica = fd_derivative(lambda x: sigma(perturbado, x, 0.0, sign), s, 1, esquema)
            assert dsigma(perturbado, s, 0.0, sign) == pytest.approx(numerica, rel=1e-6, abs=1e-7)


def test_clasificacion_hopf(hopf):
    assert classify_point(hopf, 1.0, 0.0, PLUS) is SingularityClass.CONSTANT_FOCAL


def test_clasificacion_perturbado_generica(perturbado):
    _, largo = perturbado.s_interval(0.0)
    assert classify_point(perturbado, largo / 8, 0.0, PLUS) is SingularityClass.CUSPIDAL_EDGE


@pytest.mark.parametrize("valores, esperada", [
    ((0.0, 1.0, 1.0), SingularityClass.SWALLOWTAIL),
    ((1e-12, 1e-6, 1.0), SingularityClass.DEGENERATE),
    ((0.5, 0.0, 1.0), SingularityClass.CUSPIDAL_EDGE),
    ((0.5, 0.0, 0.0), SingularityClass.REGULAR),
])
def test_regla_de_clasificacion(valores, esperada):
    assert classify_values(*valores) is esperada


def test_clasificacion_punto_focal_constante_gana():
    assert classify_values(0.0, 0.0, 1.0, constant_focal=True) is SingularityClass.CONSTANT_FOCAL


# ----------------------------------------------------------------------------
# Raíces
# ----------------------------------------------------------------------------

def test_raices_sintéticas():
    raices = find_roots(np.sin, np.cos, np.linspace(0.0, 2 * math.pi, 50))
    assert len(raices) == 3
    np.testing.assert_allclose(raices, [0.0, math.pi, 2 * math.pi], atol=1e-10)


def test_raices_en_lote_una_evaluacion_por_iteracion():
    llamadas = []

    def fdf(x):
        llamadas.append(len(x))
        return np.sin(x), np.cos(x)

    raices = find_roots(np.sin, None, np.linspace(0.1, 20.5 * math.pi, 401), fdf=fdf)
    np.testing.assert_allclose(raices, math.pi * np.arange(1, 21), atol=1e-10)
    assert llamadas[0] == 20
    assert len(llamadas) <= 10


def test_raices_sin_cambio_de_signo():
    assert find_roots(lambda x: np.asarray(x) ** 2 + 1.0, lambda x: 2 * x,
                      np.linspace(-1.0, 1.0, 20)) == []


@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_raices_perturbado_simetricas(perturbado, sign):
    """La simetría s ↦ s + π del embebido desplaza las raíces medio periodo"""
    _, largo = perturbado.s_interval(0.0)
    raices = sigma_roots(perturbado, 0.0, sign, 128)
    assert all(abs(r.sigma) <= 1e-8 for r in raices)
    reducidas = _raices_modulo([r.s for r in raices], largo)
    assert len(reducidas) >= 4
    for r in reducidas:
        espejo = (r + largo / 2) % largo
        distancia = np.minimum(np.abs(reducidas - espejo), largo - np.abs(reducidas - espejo))
        assert np.min(distancia) <= 1e-6


# ----------------------------------------------------------------------------
# Colas de golondrina y tangencia
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_reporte_colas_de_golondrina(perturbado, sign):
    reporte = singularity_report(perturbado, 0.0, sign, 64)
    colas = [e for e in reporte.entries if e.klass is SingularityClass.SWALLOWTAIL]
    assert colas
    for e in colas:
        assert abs(e.sigma) <= 1e-8
        assert abs(e.dsigma) >= 1e-3
        assert e.residuals["ell_prime_norm"] <= 1e-6
        assert e.residuals["ell_pp_angle"] <= 1e-4
        assert e.residuals["h_sss"] <= 1e-6
        assert e.focal_germ == "cusp_2_3_4"
    ok, mensaje = reporte.validar()
    assert ok, mensaje

    s = [e.s for e in reporte.entries]
    assert s == sorted(s)
    d = reporte.to_dict()
    assert d["sign"] == sign.value
    assert tuple(d["entries"][0]["residuals"]) == RESIDUAL_KEYS


def test_reporte_hopf(hopf):
    reporte = singularity_report(hopf, 0.0, PLUS, 32)
    assert len(reporte.entries) == 32
    assert reporte.count(SingularityClass.CONSTANT_FOCAL) == 32
    assert all(e.focal_germ == "point" for e in reporte.entries)


def test_tangencia_en_las_raices(perturbado):
    for r in sigma_roots(perturbado, 0.0, PLUS, 128):
        norma, angulo = cusp_tangency_check(perturbado, 0.0, PLUS, r.s)
        assert norma <= 1e-6
        assert angulo <= 1e-4


def test_tangencia_hopf(hopf):
    norma, _ = cusp_tangency_check(hopf, 0.0, PLUS, 1.0)
    assert norma <= 1e-9


# ----------------------------------------------------------------------------
# Versalidad y complementos
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_versalidad_hopf(hopf, sign):
    det, referencia = versality_determinant(hopf, 0.0, 0.0, sign)
    assert abs(det) == pytest.approx(RAIZ2, abs=1e-7)
    assert abs(referencia) == pytest.approx(RAIZ2, abs=1e-12)


@pytest.mark.parametrize("chart", ["auto", "m1", "0"])
def test_versalidad_perturbado(perturbado, chart):
    _, largo = perturbado.s_interval(0.0)
    for sign in (PLUS, MINUS):
        for s in np.linspace(0.1, largo - 0.1, 9):
            det, referencia = versality_determinant(perturbado, s, 0.0, sign, chart)
            assert abs(det / referencia) == pytest.approx(1.0, abs=1e-6)


def test_versalidad_carta_desconocida(hopf):
    with pytest.raises(ValueError):
        versality_determinant(hopf, 0.0, 0.0, PLUS, "x")


def test_orden_del_germen(hopf, perturbado):
    assert height_germ_order(hopf, 0.5, 0.0, PLUS) == 4
    _, largo = perturbado.s_interval(0.0)
    assert height_germ_order(perturbado, largo / 8, 0.0, PLUS) == 2
    lam = front_point(perturbado, largo / 8, 0.0, 0.3, PLUS).point
    assert height_germ_order(perturbado, largo / 8, 0.0, PLUS, lam) == 1


def test_curva_en_el_cono_de_luz(hopf):
    for sign in (PLUS, MINUS):
        curva = focal_curve(hopf, 0.0, sign, 64)
        assert curva.diameter() <= 1e-8
        assert curve_on_lightcone(hopf, 0.0, curva.points[0]) <= 1e-9
