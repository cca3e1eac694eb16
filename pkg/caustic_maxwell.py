"""
AdS-Fronts - BR-Cáustica y Conjunto de Maxwell
==============================================

PROPÓSITO:
----------
Ensamblar la BR-cáustica como unión en t de las curvas focales y calcular el
conjunto de Maxwell como las auto-intersecciones de los frentes desplegados.

PIPELINE DE MAXWELL (por rebanada t):
-------------------------------------
1. Muestrear ambas hojas del frente sobre la malla (s, μ)
2. Pares candidatos con cKDTree.query_pairs(r = hash_cell), descartando vecinos
   inmediatos de la misma hoja (|Δi_s| ≤ 2, cíclico si la curva es cerrada)
3. Una semilla por celda de hash del punto medio y combinación de ramas
4. Gauss-Newton amortiguado (paso de norma mínima) sobre
   LS(s₁, μ₁, ±) - LS(s₂, μ₂, ±) = 0 hasta residuo ≤ refine_tol
5. Deduplicación por punto ambiente a 2·refine_tol y clasificación del tipo

Las distancias de hash y agrupación son euclídeas en coordenadas ambiente.
Los puntos de clausura (límites de auto-intersecciones) no se certifican:
solo se reportan muestras detectadas.

VERSIÓN: 1.0
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

import utils_series as jets
from frames import FrameField, SignChoice, frame_field, frames_on_curve
from fronts import (BOTH_SIGNS, FOCAL_COLUMNS, KAPPA_FLOOR, FocalSample, cloud_from_field,
                    focal_curve_from_field)
from pseudo_metric import inner
from worldsheet import SampleGrid, WorldSheet

logger = logging.getLogger(__name__)

__all__ = [
    "SampleGrid", "MaxwellKind", "Preimage", "MaxwellSample", "CausticCloud",
    "br_caustic", "maxwell_momentary", "maxwell_unfolded", "discriminant",
]

# ============================================================================
# CONSTANTES
# ============================================================================

HASH_CELL = 0.05
REFINE_TOL = 1e-9
PREIMAGE_SEP = 1e-6
KIND_TOL = 1e-6
RESIDUAL_TOL = 1e-8
NEIGHBOR_INDEX = 2
NEWTON_MAX_ITER = 60
BACKTRACK_STEPS = 8
# Pulido con el marco exacto tras converger sobre la tabla de la rebanada
POLISH_GATE = 1e-3
POLISH_MAX_ITER = 12
POLISH_BACKTRACK = 4

MAXWELL_COLUMNS = ["t", "kind", "s1", "mu1", "sign1", "s2", "mu2", "sign2",
                   "x_m1", "x_0", "x_1", "x_2", "residual"]


class MaxwellKind(Enum):
    CROSS_SHEET = "CrossSheet"
    SAME_SHEET = "SameSheet"
    BASE_CURVE = "BaseCurve"
    FOCAL_CONCENTRATION = "FocalConcentration"


# ============================================================================
# MODELOS DE DATOS
# ============================================================================

@dataclass(frozen=True)
class Preimage:
    s: float
    mu: float
    sign: SignChoice

    def key(self) -> Tuple[int, float, float]:
        return (0 if self.sign is SignChoice.PLUS else 1, self.s, self.mu)


@dataclass
class MaxwellSample:
    t: float
    point: np.ndarray
    preimages: Tuple[Preimage, Preimage]
    kind: MaxwellKind
    residual: float

    def to_row(self) -> list:
        a, b = self.preimages
        return [self.t, self.kind.value, a.s, a.mu, a.sign.value, b.s, b.mu, b.sign.value,
                *self.point.tolist(), self.residual]

    def to_dict(self) -> dict:
        return dict(zip(MAXWELL_COLUMNS, self.to_row()))


@dataclass
class CausticCloud:
    samples: List[FocalSample] = field(default_factory=list)
    # (t, rama, s_ini, s_fin)
    gaps: List[Tuple[float, str, float, float]] = field(default_factory=list)
    rejected: int = 0

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def points(self) -> np.ndarray:
        if not self.samples:
            return np.zeros((0, 4))
        return np.stack([m.point for m in self.samples])

    def for_slice(self, t: float, sign: Optional[SignChoice] = None) -> List[FocalSample]:
        return [m for m in self.samples if m.t == t and (sign is None or m.sign is sign)]

    def points_by_slice(self) -> Dict[float, np.ndarray]:
        """Puntos focales agrupados por rebanada, cada grupo de forma (k, 4)"""
        grupos: Dict[float, list] = {}
        for m in self.samples:
            grupos.setdefault(m.t, []).append(m.point)
        return {t: np.array(p).reshape(-1, 4) for t, p in grupos.items()}

    def to_dataframe(self) -> pd.DataFrame:
        filas = [[m.t, m.sign.value, m.s, m.kappa, m.sigma, *m.point] for m in self.samples]
        return pd.DataFrame(filas, columns=FOCAL_COLUMNS)


def samples_dataframe(samples: Sequence[MaxwellSample]) -> pd.DataFrame:
    return pd.DataFrame([m.to_row() for m in samples], columns=MAXWELL_COLUMNS)


# ============================================================================
# UTILIDADES
# ============================================================================

def map_ordered(func: Callable, items: Iterable, threads: int = 1) -> list:
    """map con ThreadPoolExecutor que conserva el orden de entrada"""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _es_cerrada(campo: FrameField, tol: float = 1e-9) -> bool:
    """La curva momentánea se cierra si el primer y último nodo coinciden con su marco"""
    if len(campo) < 3:
        return False
    return bool(np.allclose(campo.gamma[0], campo.gamma[-1], atol=tol)
                and np.allclose(campo.nvec[0], campo.nvec[-1], atol=1e3 * tol)
                and np.allclose(campo.bvec[0], campo.bvec[-1], atol=1e3 * tol))


# ============================================================================
# BR-CÁUSTICA
# ============================================================================

def _caustica_rebanada(w: WorldSheet, t: float, n_s: int, kappa_floor: float,
                       residual_tol: float):
    campo = frames_on_curve(w, t, w.s_values(t, n_s))
    salida = []
    for sign in BOTH_SIGNS:
        curva = focal_curve_from_field(campo, t, sign, kappa_floor)
        buenas = [m for m in curva.samples if m.residual <= residual_tol]
        rechazadas = len(curva.samples) - len(buenas)
        if rechazadas:
            logger.warning("⚠️ t=%.6g rama %s: %d muestras focales no pasan los residuos",
                           t, sign.value, rechazadas)
        huecos = [(float(t), sign.value, a, b) for a, b in curva.gaps]
        salida.append((buenas, huecos, rechazadas))
    return salida


def br_caustic(w: WorldSheet, grid: SampleGrid, threads: int = 1,
               kappa_floor: float = KAPPA_FLOOR,
               residual_tol: float = RESIDUAL_TOL,
               t_values: Optional[np.ndarray] = None) -> CausticCloud:
    """
    Unión en t de las curvas focales de ambas ramas.

    Cada muestra pasa el chequeo de residuos (H, H_s, H_ss); las que no,
    se descartan y se cuentan.
    """
    if t_values is None:
        t_values = grid.t_values(w.t_range)
    nube = CausticCloud()
    resultados = map_ordered(
        lambda t: _caustica_rebanada(w, float(t), grid.n_s, kappa_floor, residual_tol),
        t_values, threads)
    for por_rama in resultados:
        for buenas, huecos, rechazadas in por_rama:
            nube.samples.extend(buenas)
            nube.gaps.extend(huecos)
            nube.rejected += rechazadas
    logger.info("📊 BR-cáustica: %d muestras en %d rebanadas (%d descartadas)",
                len(nube), len(t_values), nube.rejected)
    return nube


# ============================================================================
# GAUSS-NEWTON VECTORIZADO
# ============================================================================

class _FrenteTabulado:
    """
    LS(s, μ, ε) por desarrollo de Taylor alrededor del nodo más cercano de
    la rebanada. Error del orden de (h/2)³ con h el paso de la malla en s.
    """

    def __init__(self, campo: FrameField):
        self.campo = campo
        self.s0 = float(campo.s[0])
        self.h = float(campo.s[-1] - campo.s[0]) / max(len(campo) - 1, 1)
        self._d_gamma = jets.deriv(campo.gamma_jet)
        self._d_b = jets.deriv(campo.bvec_jet)
        self._d_n = jets.deriv(campo.nvec_jet)

    def nodo(self, s: np.ndarray) -> np.ndarray:
        i = np.rint((s - self.s0) / self.h).astype(np.int64)
        return np.clip(i, 0, len(self.campo) - 1)

    def __call__(self, s: np.ndarray, mu: np.ndarray, eps: np.ndarray, con_jacobiano: bool = True):
        i = self.nodo(s)
        d = (s - self.campo.s[i])[:, None]
        b = jets.evaluate_at(self.campo.bvec_jet[:, i], d)
        n = jets.evaluate_at(self.campo.nvec_jet[:, i], d)
        v = b + eps[:, None] * n
        punto = jets.evaluate_at(self.campo.gamma_jet[:, i], d) + mu[:, None] * v
        if not con_jacobiano:
            return punto, None, None
        dv = jets.evaluate_at(self._d_b[:, i], d) + eps[:, None] * jets.evaluate_at(self._d_n[:, i], d)
        d_s = jets.evaluate_at(self._d_gamma[:, i], d) + mu[:, None] * dv
        return punto, d_s, v


class _FrenteExacto:
    """LS(s, μ, ε) con el marco exacto, con n orientado como en la tabla de la rebanada"""

    def __init__(self, w: WorldSheet, t: float, tabla: _FrenteTabulado):
        self.w = w
        self.t = t
        self.tabla = tabla

    def campo(self, s: np.ndarray) -> FrameField:
        campo = frame_field(self.w, s, self.t)
        vecino = self.tabla.campo.nvec[self.tabla.nodo(s)]
        campo.flip_normal(inner(campo.nvec, vecino) < 0)
        return campo

    def __call__(self, s: np.ndarray, mu: np.ndarray, eps: np.ndarray, con_jacobiano: bool = True):
        campo = self.campo(s)
        v = campo.bvec + eps[:, None] * campo.nvec
        punto = campo.gamma + mu[:, None] * v
        if not con_jacobiano:
            return punto, None, None
        dv = campo.bvec_jet[1] + eps[:, None] * campo.nvec_jet[1]
        return punto, campo.tvec + mu[:, None] * dv, v


class _Refinador:
    """Gauss-Newton amortiguado sobre x = (s₁, μ₁, s₂, μ₂) para muchas semillas"""

    def __init__(self, frente: Callable, s_interval: Tuple[float, float],
                 mu_range: Tuple[float, float], cerrada: bool, tol: float,
                 max_iter: int = NEWTON_MAX_ITER, retrocesos: int = BACKTRACK_STEPS):
        self.frente = frente
        self.s_min, self.s_max = s_interval
        self.mu_min, self.mu_max = mu_range
        self.cerrada = cerrada
        self.tol = tol
        self.max_iter = max_iter
        self.retrocesos = retrocesos

    def _ajustar(self, x: np.ndarray) -> np.ndarray:
        x = x.copy()
        for c in (0, 2):
            if self.cerrada:
                periodo = self.s_max - self.s_min
                x[:, c] = self.s_min + np.mod(x[:, c] - self.s_min, periodo)
            else:
                x[:, c] = np.clip(x[:, c], self.s_min, self.s_max)
        for c in (1, 3):
            x[:, c] = np.clip(x[:, c], self.mu_min, self.mu_max)
        return x

    def residuo(self, x: np.ndarray, e1: np.ndarray, e2: np.ndarray, jac: bool = False):
        """Ambas preimágenes en una sola evaluación del frente"""
        m = len(x)
        p, d_s, v = self.frente(np.concatenate([x[:, 0], x[:, 2]]),
                                np.concatenate([x[:, 1], x[:, 3]]),
                                np.concatenate([e1, e2]), jac)
        f = p[:m] - p[m:]
        if not jac:
            return f, None, p[:m]
        j = np.stack([d_s[:m], v[:m], -d_s[m:], -v[m:]], axis=-1)  # (m, 4, 4)
        return f, j, p[:m]

    def resolver(self, x: np.ndarray, e1: np.ndarray, e2: np.ndarray):
        x = self._ajustar(x)
        activos = np.ones(len(x), dtype=bool)
        f, j, punto = self.residuo(x, e1, e2, jac=True)
        norma = np.linalg.norm(f, axis=-1)

        for _ in range(self.max_iter):
            activos &= norma > self.tol
            if not np.any(activos):
                break
            idx = np.flatnonzero(activos)
            paso = -np.einsum("mij,mj->mi", np.linalg.pinv(j[idx], rcond=1e-10), f[idx])

            alfa = np.ones(len(idx))
            mejor_x = x[idx].copy()
            mejor_n = norma[idx].copy()
            pendiente = np.ones(len(idx), dtype=bool)
            for _ in range(self.retrocesos):
                sub = np.flatnonzero(pendiente)
                if not sub.size:
                    break
                prueba = self._ajustar(x[idx[sub]] + alfa[sub, None] * paso[sub])
                f_p, _, _ = self.residuo(prueba, e1[idx[sub]], e2[idx[sub]])
                n_p = np.linalg.norm(f_p, axis=-1)
                mejora = n_p < mejor_n[sub]
                mejor_x[sub[mejora]] = prueba[mejora]
                mejor_n[sub[mejora]] = n_p[mejora]
                pendiente[sub[mejora]] = False
                alfa[sub[~mejora]] *= 0.5

            estancadas = pendiente
            x[idx] = mejor_x
            activos[idx[estancadas]] = False
            movidas = idx[~estancadas]
            if movidas.size:
                f_n, j_n, p_n = self.residuo(x[movidas], e1[movidas], e2[movidas], jac=True)
                f[movidas], j[movidas], punto[movidas] = f_n, j_n, p_n
                norma[movidas] = np.linalg.norm(f_n, axis=-1)

        return x, norma, punto


def _refinar(w: WorldSheet, t: float, campo: FrameField, x0: np.ndarray,
             e1: np.ndarray, e2: np.ndarray, s_interval: Tuple[float, float],
             mu_range: Tuple[float, float], cerrada: bool, tol: float):
    """
    Dos etapas: Gauss-Newton sobre el frente tabulado de la rebanada y pulido
    con el marco exacto de las semillas que quedan a menos de POLISH_GATE.
    """
    tabla = _FrenteTabulado(campo)
    x, norma, punto = _Refinador(tabla, s_interval, mu_range, cerrada, tol).resolver(x0, e1, e2)

    exacto = _FrenteExacto(w, t, tabla)
    cerca = np.flatnonzero(norma <= POLISH_GATE)
    if cerca.size:
        pulidor = _Refinador(exacto, s_interval, mu_range, cerrada, tol,
                             POLISH_MAX_ITER, POLISH_BACKTRACK)
        x[cerca], norma[cerca], punto[cerca] = pulidor.resolver(x[cerca], e1[cerca], e2[cerca])
    return x, norma, punto, exacto


# ============================================================================
# MAXWELL MOMENTÁNEO
# ============================================================================

@dataclass
class MaxwellStats:
    """Métricas de calidad de una rebanada"""
    t: float
    candidates: int = 0
    seeds: int = 0
    converged: int = 0
    rejected_same_preimage: int = 0
    samples: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _semillas(puntos: np.ndarray, i_s: np.ndarray, rama: np.ndarray, hash_cell: float,
              periodo: Optional[int]) -> Tuple[np.ndarray, int]:
    """Pares candidatos filtrados y adelgazados a una semilla por celda"""
    arbol = cKDTree(puntos)
    pares = arbol.query_pairs(r=hash_cell, output_type="ndarray")
    candidatos = len(pares)
    if not candidatos:
        return np.zeros((0, 2), dtype=int), 0

    a, b = pares[:, 0], pares[:, 1]
    di = np.abs(i_s[a] - i_s[b])
    if periodo:
        di = np.minimum(di, periodo - di)
    vecinos = (rama[a] == rama[b]) & (di <= NEIGHBOR_INDEX)
    pares = pares[~vecinos]
    if not len(pares):
        return np.zeros((0, 2), dtype=int), candidatos

    pares = pares[np.lexsort((pares[:, 1], pares[:, 0]))]
    medio = 0.5 * (puntos[pares[:, 0]] + puntos[pares[:, 1]])
    celda = np.floor(medio / hash_cell).astype(np.int64)
    ramas = np.sort(np.stack([rama[pares[:, 0]], rama[pares[:, 1]]], axis=-1), axis=-1)
    clave = np.concatenate([celda, ramas], axis=-1)
    _, primeros = np.unique(clave, axis=0, return_index=True)
    return pares[np.sort(primeros)], candidatos


def _clasificar(m1: Preimage, m2: Preimage, punto: np.ndarray, k1: float, k2: float,
                focales: np.ndarray, refine_tol: float, kind_tol: float) -> MaxwellKind:
    if abs(m1.mu) <= kind_tol and abs(m2.mu) <= kind_tol:
        return MaxwellKind.BASE_CURVE
    cerca_focal = False
    if len(focales):
        cerca_focal = bool(np.min(np.linalg.norm(focales - punto, axis=-1)) <= 10.0 * refine_tol)
    if cerca_focal or abs(m1.mu * k1 - 1.0) <= kind_tol or abs(m2.mu * k2 - 1.0) <= kind_tol:
        return MaxwellKind.FOCAL_CONCENTRATION
    if m1.sign is not m2.sign:
        return MaxwellKind.CROSS_SHEET
    return MaxwellKind.SAME_SHEET


def maxwell_momentary_detailed(w: WorldSheet, t: float, grid: SampleGrid,
                               focal_points: Optional[np.ndarray] = None,
                               preimage_sep: float = PREIMAGE_SEP,
                               kind_tol: float = KIND_TOL,
                               kappa_floor: float = KAPPA_FLOOR) -> Tuple[List[MaxwellSample], MaxwellStats]:
    t = float(t)
    stats = MaxwellStats(t)
    s_values = w.s_values(t, grid.n_s)
    campo = frames_on_curve(w, t, s_values)
    cerrada = _es_cerrada(campo)
    n_s_util = grid.n_s - 1 if cerrada else grid.n_s
    mu_values = grid.mu_values()

    if focal_points is None:
        focal_points = np.concatenate(
            [focal_curve_from_field(campo, t, sg, kappa_floor).points for sg in BOTH_SIGNS])

    nubes, indices_s, indices_mu, ramas = [], [], [], []
    for k, sign in enumerate(BOTH_SIGNS):
        nube = cloud_from_field(campo, t, sign, mu_values)
        puntos, i_s, i_mu = nube.flat()
        util = i_s < n_s_util
        nubes.append(puntos[util])
        indices_s.append(i_s[util])
        indices_mu.append(i_mu[util])
        ramas.append(np.full(int(util.sum()), k))
    puntos = np.concatenate(nubes)
    i_s = np.concatenate(indices_s)
    i_mu = np.concatenate(indices_mu)
    rama = np.concatenate(ramas)

    pares, stats.candidates = _semillas(puntos, i_s, rama, grid.hash_cell,
                                        n_s_util if cerrada else None)
    stats.seeds = len(pares)
    if not len(pares):
        logger.debug("🔍 t=%.6g: sin candidatos", t)
        return [], stats

    signos = np.array([sg.epsilon for sg in BOTH_SIGNS])
    a, b = pares[:, 0], pares[:, 1]
    x0 = np.column_stack([s_values[i_s[a]], mu_values[i_mu[a]], s_values[i_s[b]], mu_values[i_mu[b]]])
    e1, e2 = signos[rama[a]], signos[rama[b]]

    x, norma, punto, exacto = _refinar(w, t, campo, x0, e1, e2,
                                       (float(s_values[0]), float(s_values[-1])), grid.mu_range,
                                       cerrada, grid.refine_tol)
    convergidas = norma <= grid.refine_tol
    stats.converged = int(convergidas.sum())

    periodo = float(s_values[-1] - s_values[0])
    ds = np.abs(x[:, 0] - x[:, 2])
    if cerrada:
        ds = np.minimum(ds, periodo - ds)
    distintas = (e1 != e2) | (ds > preimage_sep) | (np.abs(x[:, 1] - x[:, 3]) > grid.refine_tol)
    stats.rejected_same_preimage = int(np.count_nonzero(convergidas & ~distintas))
    validas = np.flatnonzero(convergidas & distintas)
    if not validas.size:
        return [], stats

    kappas = exacto.campo(np.concatenate([x[validas, 0], x[validas, 2]]))
    rama_1 = np.where(e1[validas] > 0, 0, 1)
    rama_2 = np.where(e2[validas] > 0, 0, 1)
    k1 = np.where(rama_1 == 0, kappas.kappa_g[:validas.size] + kappas.kappa_n[:validas.size],
                  kappas.kappa_g[:validas.size] - kappas.kappa_n[:validas.size])
    k2 = np.where(rama_2 == 0, kappas.kappa_g[validas.size:] + kappas.kappa_n[validas.size:],
                  kappas.kappa_g[validas.size:] - kappas.kappa_n[validas.size:])

    muestras = []
    for j, i in enumerate(validas):
        m1 = Preimage(float(x[i, 0]), float(x[i, 1]), BOTH_SIGNS[rama_1[j]])
        m2 = Preimage(float(x[i, 2]), float(x[i, 3]), BOTH_SIGNS[rama_2[j]])
        if m2.key() < m1.key():
            m1, m2 = m2, m1
            ka, kb = float(k2[j]), float(k1[j])
        else:
            ka, kb = float(k1[j]), float(k2[j])
        tipo = _clasificar(m1, m2, punto[i], ka, kb, focal_points, grid.refine_tol, kind_tol)
        muestras.append(MaxwellSample(t, punto[i].copy(), (m1, m2), tipo, float(norma[i])))

    muestras = _deduplicar(sorted(muestras, key=_clave_canonica), 2.0 * grid.refine_tol)
    stats.samples = len(muestras)
    logger.debug("🔍 t=%.6g: %d candidatos, %d semillas, %d convergidas, %d muestras",
                 t, stats.candidates, stats.seeds, stats.converged, stats.samples)
    return muestras, stats


def _clave_canonica(m: MaxwellSample):
    a, b = m.preimages
    return (m.t, a.s, a.mu, a.key()[0], b.key(), tuple(m.point.tolist()))


def _deduplicar(muestras: List[MaxwellSample], radio: float) -> List[MaxwellSample]:
    """Conserva la primera muestra (en orden canónico) de cada grupo de puntos cercanos"""
    if len(muestras) < 2:
        return muestras
    puntos = np.stack([m.point for m in muestras])
    arbol = cKDTree(puntos)
    descartada = np.zeros(len(muestras), dtype=bool)
    for i in range(len(muestras)):
        if descartada[i]:
            continue
        for j in arbol.query_ball_point(puntos[i], r=radio):
            if j > i:
                descartada[j] = True
    return [m for m, d in zip(muestras, descartada) if not d]


def maxwell_momentary(w: WorldSheet, t: float, grid: SampleGrid,
                      focal_points: Optional[np.ndarray] = None,
                      preimage_sep: float = PREIMAGE_SEP,
                      kind_tol: float = KIND_TOL,
                      kappa_floor: float = KAPPA_FLOOR) -> List[MaxwellSample]:
    """
    Auto-intersecciones de los frentes momentáneos de la rebanada t.

    No lanza por muestras problemáticas: las métricas se registran en el log.
    """
    muestras, _ = maxwell_momentary_detailed(w, t, grid, focal_points, preimage_sep,
                                             kind_tol, kappa_floor)
    return muestras


def maxwell_unfolded(w: WorldSheet, grid: SampleGrid, threads: int = 1,
                     caustic: Optional[CausticCloud] = None,
                     preimage_sep: float = PREIMAGE_SEP,
                     kind_tol: float = KIND_TOL,
                     kappa_floor: float = KAPPA_FLOOR,
                     t_values: Optional[np.ndarray] = None) -> List[MaxwellSample]:
    """
    BR-Maxwell: concatenación de las rebanadas (el frente desplegado lleva t
    como última coordenada, así que solo se corta dentro de cada rebanada).
    """
    if t_values is None:
        t_values = grid.t_values(w.t_range)

    focales_por_t = caustic.points_by_slice() if caustic is not None else {}

    def rebanada(t):
        focales = None
        if caustic is not None:
            focales = focales_por_t.get(float(t), np.zeros((0, 4)))
        return maxwell_momentary_detailed(w, float(t), grid, focales, preimage_sep,
                                          kind_tol, kappa_floor)

    resultados = map_ordered(rebanada, t_values, threads)
    muestras = [m for r, _ in resultados for m in r]
    muestras.sort(key=_clave_canonica)
    logger.info("📊 BR-Maxwell: %d muestras en %d rebanadas", len(muestras), len(t_values))
    return muestras


def discriminant(w: WorldSheet, grid: SampleGrid, threads: int = 1,
                 kappa_floor: float = KAPPA_FLOOR,
                 residual_tol: float = RESIDUAL_TOL,
                 preimage_sep: float = PREIMAGE_SEP,
                 kind_tol: float = KIND_TOL) -> Tuple[CausticCloud, List[MaxwellSample]]:
    """(BR-cáustica, BR-Maxwell)"""
    caustica = br_caustic(w, grid, threads, kappa_floor, residual_tol)
    maxwell = maxwell_unfolded(w, grid, threads, caustica, preimage_sep, kind_tol, kappa_floor)
    return caustica, maxwell
