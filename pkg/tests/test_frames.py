"""Marco adaptado, curvaturas y ecuaciones de Frenet-Serret"""

import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import DOS_PI, RAIZ2
from frames import (CURVATURE_COLUMNS, FRAME_COLUMNS, DegenerateFrame, SignChoice,
                    curvatures_by_projection, dsigma_from_frame, frame_at, frame_field,
                    frames_on_curve, frenet_residual, frenet_residuals, sigma_from_frame)
from oracle import fd_derivative
from pseudo_metric import SIGNATURE, adaptedness, inner
from worldsheet import WorldSheet


def _gram(campo) -> np.ndarray:
    base = np.stack([campo.gamma, campo.bvec, campo.nvec, campo.tvec], axis=1)  # (n, 4, 4)
    return np.einsum("nik,k,njk->nij", base, SIGNATURE, base)


# ----------------------------------------------------------------------------
# Toro de Hopf: formas cerradas
# ----------------------------------------------------------------------------

def test_marco_hopf_en_el_origen(hopf):
    f = frame_at(hopf, 0.0, 0.0)
    np.testing.assert_allclose(f.gamma, [RAIZ2, 0.0, 1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(f.tvec, [0.0, 0.0, 0.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(f.bvec, [0.0, 1.0, 0.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(f.nvec, [-1.0, 0.0, -RAIZ2, 0.0], atol=1e-14)
    assert (f.kappa_g, f.kappa_n, f.tau_g) == pytest.approx((0.0, RAIZ2, 0.0), abs=1e-12)
    ok, mensaje = f.validar()
    assert ok, mensaje


def test_hopf_malla_gram_y_curvaturas(hopf):
    s = np.linspace(0.0, DOS_PI, 128)
    t = np.linspace(-1.0, 1.0, 32)
    S, T = np.meshgrid(s, t, indexing="ij")
    campo = frame_field(hopf, S, T)
    residuo = np.max(np.abs(_gram(campo) - np.diag([-1.0, -1.0, 1.0, 1.0])))
    assert residuo <= 1e-10
    np.testing.assert_allclose(campo.kappa_g, 0.0, atol=1e-9)
    np.testing.assert_allclose(campo.kappa_n, RAIZ2, atol=1e-9)
    np.testing.assert_allclose(campo.tau_g, 0.0, atol=1e-9)
    assert np.all(adaptedness(campo.gamma, campo.bvec) > 0)


def test_hopf_residuos_de_frenet(hopf):
    s = np.linspace(0.0, DOS_PI, 64)
    t = np.linspace(-1.0, 1.0, 16)
    S, T = np.meshgrid(s, t, indexing="ij")
    assert np.max(frenet_residuals(frame_field(hopf, S, T))) <= 1e-9
    assert max(frenet_residual(hopf, 0.0, 0.0)) <= 1e-12


def test_hopf_sigma_nula(hopf):
    campo = frames_on_curve(hopf, 0.3, hopf.s_values(0.3, 50))
    for sign in SignChoice:
        assert np.max(np.abs(sigma_from_frame(campo, sign))) <= 1e-10
        assert np.max(np.abs(dsigma_from_frame(campo, sign))) <= 1e-10


# ----------------------------------------------------------------------------
# Toro perturbado
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("t", [0.0, 0.5])
def test_perturbado_residuos_de_frenet(perturbado, t):
    campo = frames_on_curve(perturbado, t, perturbado.s_values(t, 64))
    assert np.max(frenet_residuals(campo)) <= 1e-7
    residuo = np.max(np.abs(_gram(campo) - np.diag([-1.0, -1.0, 1.0, 1.0])))
    assert residuo <= 1e-9


def test_perturbado_b_es_la_direccion_temporal(perturbado):
    """b = Γ_t/‖Γ_t‖ no depende de s: κ_g = τ_g = 0"""
    campo = frames_on_curve(perturbado, 0.0, perturbado.s_values(0.0, 40))
    np.testing.assert_allclose(campo.bvec, np.tile([0.0, 1.0, 0.0, 0.0], (40, 1)), atol=1e-10)
    np.testing.assert_allclose(campo.kappa_g, 0.0, atol=1e-9)
    np.testing.assert_allclose(campo.tau_g, 0.0, atol=1e-9)
    assert np.ptp(campo.kappa_n) > 0.1


def test_curvaturas_por_proyeccion(perturbado):
    for s in (0.3, 1.7, 4.1):
        f = frame_at(perturbado, s, 0.0)
        kg, kn, tg = curvatures_by_projection(perturbado, s, 0.0)
        assert (kg, kn, tg) == pytest.approx((f.kappa_g, f.kappa_n, f.tau_g), abs=1e-9)


def test_derivadas_de_curvatura_contra_diferencias_finitas(perturbado):
    for s in (0.4, 1.1, 2.5):
        f = frame_at(perturbado, s, 0.0)
        d1 = fd_derivative(lambda x: frame_at(perturbado, x, 0.0).kappa_n, s, 1)
        d2 = fd_derivative(lambda x: frame_at(perturbado, x, 0.0).kappa_n, s, 2)
        assert f.dkappa_n == pytest.approx(d1, rel=1e-6, abs=1e-7)
        assert f.d2kappa_n == pytest.approx(d2, rel=1e-5, abs=1e-6)


def test_vectores_nulos(perturbado):
    f = frame_at(perturbado, 1.0, 0.0)
    for sign in SignChoice:
        v = f.null_vector(sign)
        assert abs(inner(v, v)) <= 1e-12
        assert abs(inner(v, f.gamma)) <= 1e-12
        assert abs(inner(v, f.tvec)) <= 1e-12


# ----------------------------------------------------------------------------
# Casos límite
# ----------------------------------------------------------------------------

def test_marco_degenerado():
    w = WorldSheet.from_texts(["sqrt(2)", "0", "cos(s)", "sin(s)"], (0.0, DOS_PI), (0.0, 1.0))
    with pytest.raises(DegenerateFrame):
        frame_at(w, 0.5, 0.5)


def test_continuidad_corrige_saltos(hopf):
    campo = frames_on_curve(hopf, 0.0, hopf.s_values(0.0, 12))
    original = campo.nvec.copy()
    mascara = np.arange(12) >= 5
    campo.flip_normal(mascara)
    assert campo.enforce_continuity() == 1
    np.testing.assert_allclose(campo.nvec, original, atol=1e-15)
    np.testing.assert_allclose(campo.kappa_n, RAIZ2, atol=1e-9)


def test_columnas_de_salida(hopf):
    campo = frames_on_curve(hopf, 0.0, hopf.s_values(0.0, 8))
    assert list(campo.to_dataframe().columns) == FRAME_COLUMNS
    df = campo.curvatures_dataframe()
    assert list(df.columns) == CURVATURE_COLUMNS
    np.testing.assert_allclose(df["kappa_plus"], RAIZ2, atol=1e-9)
    np.testing.assert_allclose(df["kappa_minus"], -RAIZ2, atol=1e-9)


def test_signos():
    assert SignChoice.PLUS.epsilon == 1.0 and SignChoice.MINUS.epsilon == -1.0
    assert SignChoice("minus").symbol == "-"


def test_umbral_de_degeneracion_viaja_con_la_hoja(hopf):
    estricta = replace(hopf, degenerate_tol=1e6)
    with pytest.raises(DegenerateFrame):
        frame_at(estricta, 0.5, 0.0)
    with pytest.raises(DegenerateFrame):
        frames_on_curve(estricta, 0.0, estricta.s_values(0.0, 8))
    campo = frame_field(estricta, np.array([0.5]), 0.0, degenerate_tol=1e-10)
    assert np.all(np.isfinite(campo.kappa_g))
