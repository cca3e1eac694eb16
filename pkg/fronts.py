"""
AdS-Fronts - Frentes Luminosos Momentáneos y Curvas Focales
===========================================================

PROPÓSITO:
----------
Evaluar los frentes luminosos momentáneos LS± = Γ + μ(b ± n), su versión
desplegada (con t como coordenada extra), la imagen de Gauss en el cono
nulo b ± n, las curvaturas principales κ± = κ_g ± κ_n y las curvas focales
LF± = Γ + (b ± n)/κ±.

FUNCIONALIDADES:
----------------
1. Puntos sueltos: front_point, unfolded_front_point, focal_point
2. Curvas focales muestreadas en s con huecos en los puntos parabólicos
3. Nubes de frente sobre la malla (s, μ) con índices de malla
4. Exportación a DataFrame (CSV) de nubes y curvas focales

VERSIÓN: 1.0
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from frames import FrameField, SignChoice, frame_at, frames_on_curve, sigma_from_frame
from pseudo_metric import AdSError, inner
from worldsheet import WorldSheet

logger = logging.getLogger(__name__)

__all__ = [
    "SignChoice", "ParabolicPoint", "FrontSample", "FocalSample", "FocalCurve", "FrontCloud",
    "front_point", "unfolded_front_point", "nullcone_gauss", "principal_curvature",
    "focal_point", "unfolded_focal_point", "focal_curve", "sample_front_cloud",
]

# ============================================================================
# CONSTANTES
# ============================================================================

KAPPA_FLOOR = 1e-8
MU_RANGE = (-3.0, 3.0)
BOTH_SIGNS = (SignChoice.PLUS, SignChoice.MINUS)

FRONT_COLUMNS = ["s", "t", "mu", "sign", "x_m1", "x_0", "x_1", "x_2"]
FOCAL_COLUMNS = ["t", "sign", "s", "kappa", "sigma", "x_m1", "x_0", "x_1", "x_2"]


class ParabolicPoint(AdSError):
    """|κ_g ± κ_n| ≤ kappa_floor: el punto focal está en el infinito del rayo"""

    def __init__(self, s: float, t: float, sign: SignChoice, kappa: float):
        super().__init__(f"Punto parabólico en (s,t)=({s:.6g}, {t:.6g}), rama {sign.value}: "
                         f"κ = {kappa:.3e}")
        self.s = s
        self.t = t
        self.sign = sign
        self.kappa = kappa


# ============================================================================
# MODELOS DE DATOS
# ============================================================================

@dataclass
class FrontSample:
    s: float
    t: float
    mu: float
    sign: SignChoice
    point: np.ndarray

    def to_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "mu": self.mu, "sign": self.sign.value,
                "point": self.point.tolist()}


@dataclass
class FocalSample:
    s: float
    t: float
    sign: SignChoice
    point: np.ndarray
    kappa: float
    sigma: float
    # max(|H|, |H_s|, |H_ss|) en el punto focal, relativo a la escala de λ
    residual: float = float("nan")

    def to_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "sign": self.sign.value, "point": self.point.tolist(),
                "kappa": self.kappa, "sigma": self.sigma, "residual": self.residual}


@dataclass
class FocalCurve:
    """Curva focal de una rebanada; los huecos son intervalos parabólicos en s"""
    t: float
    sign: SignChoice
    samples: List[FocalSample] = field(default_factory=list)
    gaps: List[Tuple[float, float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def points(self) -> np.ndarray:
        if not self.samples:
            return np.zeros((0, 4))
        return np.stack([m.point for m in self.samples])

    def diameter(self) -> float:
        """Diámetro euclídeo de las muestras (0 para un punto focal constante)"""
        p = self.points
        if len(p) < 2:
            return 0.0
        return float(np.max(np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)))

    def to_dataframe(self) -> pd.DataFrame:
        filas = [[m.t, m.sign.value, m.s, m.kappa, m.sigma, *m.point] for m in self.samples]
        return pd.DataFrame(filas, columns=FOCAL_COLUMNS)


@dataclass
class FrontCloud:
    """
    Nube del frente sobre la malla (s, μ) de una rebanada y una rama.

    points[i, j] = LS(s_values[i], mu_values[j])
    """
    t: float
    sign: SignChoice
    s_values: np.ndarray
    mu_values: np.ndarray
    points: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.points.shape[:2]

    def flat(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(puntos (N,4), índice en s (N,), índice en μ (N,))"""
        n_s, n_mu = self.shape
        i_s, i_mu = np.meshgrid(np.arange(n_s), np.arange(n_mu), indexing="ij")
        return self.points.reshape(-1, 4), i_s.ravel(), i_mu.ravel()

    def to_dataframe(self) -> pd.DataFrame:
        puntos, i_s, i_mu = self.flat()
        datos = {
            "s": self.s_values[i_s],
            "t": np.full(len(i_s), self.t),
            "mu": self.mu_values[i_mu],
            "sign": [self.sign.value] * len(i_s),
        }
        for j, nombre in enumerate(("x_m1", "x_0", "x_1", "x_2")):
            datos[nombre] = puntos[:, j]
        return pd.DataFrame(datos, columns=FRONT_COLUMNS)


# ============================================================================
# OPERACIONES PUNTUALES
# ============================================================================

def nullcone_gauss(w: WorldSheet, s: float, t: float, sign: SignChoice) -> np.ndarray:
    """(b ± n)(s,t): nulo y ortogonal a Γ y a Γ_s"""
    return frame_at(w, s, t).null_vector(sign)


def principal_curvature(w: WorldSheet, s: float, t: float, sign: SignChoice) -> float:
    """κ± = κ_g ± κ_n"""
    return frame_at(w, s, t).principal_curvature(sign)


def front_point(w: WorldSheet, s: float, t: float, mu: float, sign: SignChoice) -> FrontSample:
    f = frame_at(w, s, t)
    punto = f.gamma + mu * f.null_vector(sign)
    return FrontSample(float(s), float(t), float(mu), sign, punto)


def unfolded_front_point(w: WorldSheet, s: float, t: float, mu: float,
                         sign: SignChoice) -> Tuple[FrontSample, float]:
    return front_point(w, s, t, mu, sign), float(t)


def _residuo_focal(gamma_jet: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """max(|H|, |H_s|, |H_ss|) / (1 + ‖λ‖) con H(s) = <Γ(s), λ> + 1"""
    h = inner(gamma_jet[0], lam) + 1.0
    h_s = inner(gamma_jet[1], lam)
    h_ss = 2.0 * inner(gamma_jet[2], lam)
    escala = 1.0 + np.linalg.norm(lam, axis=-1)
    return np.maximum.reduce([np.abs(h), np.abs(h_s), np.abs(h_ss)]) / escala


def focal_point(w: WorldSheet, s: float, t: float, sign: SignChoice,
                kappa_floor: float = KAPPA_FLOOR) -> FocalSample:
    """
    λ = Γ + (b ± n)/(κ_g ± κ_n).

    Raises:
        ParabolicPoint: si |κ_g ± κ_n| ≤ kappa_floor
    """
    curva = focal_curve_at(w, t, sign, np.array([float(s)]), kappa_floor)
    if not curva.samples:
        f = frame_at(w, s, t)
        raise ParabolicPoint(float(s), float(t), sign, f.principal_curvature(sign))
    return curva.samples[0]


def unfolded_focal_point(w: WorldSheet, s: float, t: float,
                         sign: SignChoice) -> Tuple[FocalSample, float]:
    return focal_point(w, s, t, sign), float(t)


# ============================================================================
# OPERACIONES EN LOTE
# ============================================================================

def _huecos(s_values: np.ndarray, parabolico: np.ndarray) -> List[Tuple[float, float]]:
    """Intervalos [s_ini, s_fin] de corridas consecutivas de nodos parabólicos"""
    huecos = []
    i = 0
    n = len(parabolico)
    while i < n:
        if parabolico[i]:
            j = i
            while j + 1 < n and parabolico[j + 1]:
                j += 1
            huecos.append((float(s_values[i]), float(s_values[j])))
            i = j + 1
        else:
            i += 1
    return huecos


def focal_curve_from_field(campo: FrameField, t: float, sign: SignChoice,
                           kappa_floor: float = KAPPA_FLOOR) -> FocalCurve:
    """Curva focal a partir de marcos ya calculados"""
    kappa = campo.principal_curvature(sign)
    parabolico = np.abs(kappa) <= kappa_floor
    ok = ~parabolico
    sigma = sigma_from_frame(campo, sign)

    puntos = campo.gamma[ok] + campo.null_vector(sign)[ok] / kappa[ok, None]
    residuos = _residuo_focal(campo.gamma_jet[:, ok], puntos)

    muestras = [
        FocalSample(float(s), float(t), sign, p, float(k), float(sg), float(r))
        for s, p, k, sg, r in zip(campo.s[ok], puntos, kappa[ok], sigma[ok], residuos)
    ]
    huecos = _huecos(campo.s, parabolico)
    if huecos:
        logger.warning("⚠️ Curva focal t=%.6g rama %s: %d huecos parabólicos",
                       t, sign.value, len(huecos))
    return FocalCurve(float(t), sign, muestras, huecos)


def focal_curve_at(w: WorldSheet, t: float, sign: SignChoice, s_values: np.ndarray,
                   kappa_floor: float = KAPPA_FLOOR) -> FocalCurve:
    campo = frames_on_curve(w, t, s_values)
    return focal_curve_from_field(campo, t, sign, kappa_floor)


def focal_curve(w: WorldSheet, t: float, sign: SignChoice, n_samples: int,
                kappa_floor: float = KAPPA_FLOOR) -> FocalCurve:
    """
    Muestrea la curva focal LF± de la rebanada t en n_samples valores de s.

    Los puntos parabólicos no lanzan: se omiten y quedan como huecos.
    """
    return focal_curve_at(w, t, sign, w.s_values(t, n_samples), kappa_floor)


def cloud_from_field(campo: FrameField, t: float, sign: SignChoice,
                     mu_values: np.ndarray) -> FrontCloud:
    mu = np.asarray(mu_values, dtype=float)
    puntos = campo.gamma[:, None, :] + mu[None, :, None] * campo.null_vector(sign)[:, None, :]
    return FrontCloud(float(t), sign, campo.s.copy(), mu, puntos)


def sample_front_cloud(w: WorldSheet, t: float, s_values, mu_values,
                       sign: SignChoice, campo: Optional[FrameField] = None) -> FrontCloud:
    """Nube LS±(s, μ) sobre el producto de s_values y mu_values"""
    if campo is None:
        campo = frames_on_curve(w, t, np.asarray(s_values, dtype=float))
    return cloud_from_field(campo, t, sign, mu_values)
