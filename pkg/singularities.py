"""
AdS-Fronts - Función Altura y Clasificación de Singularidades
=============================================================

PROPÓSITO:
----------
Evaluar la función altura AdS H(s,t,λ) = <Γ(s,t), λ> + 1 y sus derivadas en s
hasta 4º orden, calcular el invariante σ± y su derivada, clasificar los puntos
singulares del frente (arista cuspidal / cola de golondrina / degenerado /
punto focal constante), localizar las raíces de σ± y verificar la condición
de versalidad mediante el determinante de la matriz de derivadas de carta.

FUNCIONALIDADES:
----------------
1. height: H y ∂ᵏH/∂sᵏ por dos rutas (derivación simbólica y fórmulas del marco)
2. sigma / dsigma / classify_point
3. sigma_roots: corchetes de cambio de signo + Newton con salvaguarda
4. cusp_tangency_check: ℓ'(s*) y ángulo entre ℓ''(s*) y b ± n
5. versality_determinant: det A frente a 1/λ_carta
6. singularity_report: reporte completo de una rebanada y rama

ESCALERA DE CRITICIDAD:
-----------------------
    punto del frente   → H = H_s = 0
    punto focal        → además H_ss = 0
    raíz de σ±         → además H_sss = 0   (en el punto focal H_sss = -σ/κ)

VERSIÓN: 1.0
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from frames import (FrameData, FrameField, SignChoice, dsigma_from_frame, frame_at,
                    frame_field, sigma_from_frame)
from fronts import KAPPA_FLOOR, ParabolicPoint, focal_point
from pseudo_metric import AdSError, inner
from worldsheet import SampleGrid, WorldSheet

logger = logging.getLogger(__name__)

# ============================================================================
# CONSTANTES
# ============================================================================

SWALLOWTAIL_TOL = 1e-8
DSIGMA_FLOOR = 1e-3
CONSTANT_FOCAL_TOL = 1e-9
CONSTANT_FOCAL_SAMPLES = 256
ROOT_TOL = 1e-10
CHART_TOL = 1e-6
LADDER_TOL = 1e-6
NEWTON_MAX_ITER = 100

# Coeficiente de t en ∂³H/∂s³: "frame" = 1 + κ_g² - κ_n², "printed" = 1 + κ_g² + κ_n².
# La comparación contra la derivada simbólica valida "frame".
H_SSS_T_COEFFICIENT = "frame"


class ChartDegenerate(AdSError):
    """Ninguna componente temporal de λ sirve como carta (ambas < 1e-6)"""


class SingularityClass(Enum):
    REGULAR = "RegularFrontPoint"
    CUSPIDAL_EDGE = "CuspidalEdge"
    SWALLOWTAIL = "Swallowtail"
    DEGENERATE = "DegenerateOrHigher"
    CONSTANT_FOCAL = "ConstantFocal"


FOCAL_GERM = {
    SingularityClass.CUSPIDAL_EDGE: "line",
    SingularityClass.SWALLOWTAIL: "cusp_2_3_4",
    SingularityClass.CONSTANT_FOCAL: "point",
}


# ============================================================================
# MODELOS DE DATOS
# ============================================================================

@dataclass
class HeightEval:
    """
    H y sus derivadas en s por dos rutas.

    dh[k-1] = ∂ᵏH/∂sᵏ por derivación simbólica (k = 1..4);
    dh_frame[k-1] por las fórmulas del marco (k = 1..3, el 4º es NaN).
    """
    s: float
    t: float
    lam: np.ndarray
    h: float
    dh: np.ndarray
    h_frame: float
    dh_frame: np.ndarray

    def agreement(self) -> float:
        """Peor discrepancia relativa entre rutas para H, H_s, H_ss"""
        escala = 1.0 + float(np.linalg.norm(self.lam))
        diferencias = [abs(self.h - self.h_frame)]
        diferencias += [abs(a - b) for a, b in zip(self.dh[:2], self.dh_frame[:2])]
        return max(diferencias) / escala

    def to_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "lambda": self.lam.tolist(), "h": self.h,
                "dh": self.dh.tolist(), "h_frame": self.h_frame, "dh_frame": self.dh_frame.tolist()}


@dataclass
class SigmaRoot:
    s: float
    sigma: float
    dsigma: float

    def to_dict(self) -> dict:
        return {"s": self.s, "sigma": self.sigma, "dsigma": self.dsigma}


@dataclass
class SingularityEntry:
    s: float
    klass: SingularityClass
    sigma: float
    dsigma: float
    residuals: Dict[str, float]
    focal_germ: str = "undetermined"

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "class": self.klass.value,
            "sigma": self.sigma,
            "dsigma": self.dsigma,
            "residuals": {k: self.residuals[k] for k in RESIDUAL_KEYS},
            "focal_germ": self.focal_germ,
        }


RESIDUAL_KEYS = ("h", "h_s", "h_ss", "h_sss", "ell_prime_norm", "ell_pp_angle")


@dataclass
class SingularityReport:
    t: float
    sign: SignChoice
    entries: List[SingularityEntry] = field(default_factory=list)

    def validar(self, swallowtail_tol: float = SWALLOWTAIL_TOL,
                dsigma_floor: float = DSIGMA_FLOOR) -> Tuple[bool, str]:
        for e in self.entries:
            if e.klass is SingularityClass.SWALLOWTAIL:
                if abs(e.sigma) > swallowtail_tol or abs(e.dsigma) < dsigma_floor:
                    return False, f"Cola de golondrina inconsistente en s={e.s:.6g}"
        return True, "Reporte consistente"

    def count(self, klass: SingularityClass) -> int:
        return sum(1 for e in self.entries if e.klass is klass)

    def to_dict(self) -> dict:
        return {"t": self.t, "sign": self.sign.value,
                "entries": [e.to_dict() for e in self.entries]}


# ============================================================================
# FUNCIÓN ALTURA
# ============================================================================

def h_sss_closed_form(f: Union[FrameData, FrameField], lam: np.ndarray,
                      variant: str = H_SSS_T_COEFFICIENT):
    """
    ∂³H/∂s³ = <c_t t + c_b b + c_n n, λ> con
        c_t = 1 + κ_g² ∓ κ_n²  (según variant)
        c_b = κ_n τ_g - κ_g'
        c_n = κ_n' - κ_g τ_g
    """
    if variant not in ("frame", "printed"):
        raise ValueError(f"Variante desconocida: {variant}")
    signo = -1.0 if variant == "frame" else 1.0
    kg, kn, tg = f.kappa_g, f.kappa_n, f.tau_g
    c_t = 1.0 + kg ** 2 + signo * kn ** 2
    c_b = kn * tg - f.dkappa_g
    c_n = f.dkappa_n - kg * tg
    vector = (np.asarray(c_t)[..., None] * f.tvec
              + np.asarray(c_b)[..., None] * f.bvec
              + np.asarray(c_n)[..., None] * f.nvec)
    return inner(vector, lam)


def height(w: WorldSheet, s: float, t: float, lam) -> HeightEval:
    """
    H(s,t,λ) = <Γ(s,t), λ> + 1 y sus derivadas en s.

    Raises:
        DegenerateFrame
    """
    lam = np.asarray(lam, dtype=float)
    campo = frame_field(w, float(s), float(t))
    f = campo.at(0)
    g = campo.gamma_jet[:, 0]

    h = inner(g[0], lam) + 1.0
    dh = np.array([inner(g[k], lam) * fact for k, fact in ((1, 1.0), (2, 2.0), (3, 6.0), (4, 24.0))])

    h_frame = inner(f.gamma, lam) + 1.0
    dh_frame = np.array([
        inner(f.tvec, lam),
        inner(f.gamma - f.kappa_g * f.bvec + f.kappa_n * f.nvec, lam),
        float(h_sss_closed_form(f, lam)),
        float("nan"),
    ])
    return HeightEval(float(s), float(t), lam, float(h), dh, float(h_frame), dh_frame)


def height_t_derivative(w: WorldSheet, s: float, t: float, lam) -> float:
    """
    ∂H/∂t = <Γ_t, λ>.

    En modo reparametrize Γ_t difiere en un múltiplo de Γ_s, que no cambia
    el valor en los puntos donde H_s = 0.
    """
    _, gt = w.jets(float(s), float(t))
    return float(inner(gt[0], np.asarray(lam, dtype=float)))


# ============================================================================
# INVARIANTE σ± Y CLASIFICACIÓN
# ============================================================================

def sigma(w: WorldSheet, s: float, t: float, sign: SignChoice) -> float:
    """σ±(s,t) = ((κ_n ± κ_g)τ_g ∓ (κ_n' ± κ_g'))(s,t)"""
    return float(sigma_from_frame(frame_at(w, s, t), sign))


def dsigma(w: WorldSheet, s: float, t: float, sign: SignChoice) -> float:
    return float(dsigma_from_frame(frame_at(w, s, t), sign))


def _sigma_en_curva(w: WorldSheet, t: float, sign: SignChoice, s_values: np.ndarray) -> np.ndarray:
    return sigma_from_frame(frame_field(w, s_values, float(t)), sign)


@lru_cache(maxsize=512)
def max_abs_sigma(w: WorldSheet, t: float, sign: SignChoice,
                  n: int = CONSTANT_FOCAL_SAMPLES) -> float:
    """max |σ±| sobre la curva momentánea t"""
    return float(np.max(np.abs(_sigma_en_curva(w, t, sign, w.s_values(t, n)))))


def is_constant_focal(w: WorldSheet, t: float, sign: SignChoice,
                      tol: float = CONSTANT_FOCAL_TOL) -> bool:
    return max_abs_sigma(w, float(t), sign) <= tol


def classify_values(sigma_value: float, dsigma_value: float, kappa: float,
                    constant_focal: bool = False,
                    kappa_floor: float = KAPPA_FLOOR,
                    swallowtail_tol: float = SWALLOWTAIL_TOL,
                    dsigma_floor: float = DSIGMA_FLOOR) -> SingularityClass:
    """Regla de clasificación sobre valores ya calculados"""
    if abs(kappa) <= kappa_floor:
        return SingularityClass.REGULAR
    if constant_focal:
        return SingularityClass.CONSTANT_FOCAL
    if abs(sigma_value) > swallowtail_tol:
        return SingularityClass.CUSPIDAL_EDGE
    if abs(dsigma_value) >= dsigma_floor:
        return SingularityClass.SWALLOWTAIL
    return SingularityClass.DEGENERATE


def classify_point(w: WorldSheet, s: float, t: float, sign: SignChoice,
                   swallowtail_tol: float = SWALLOWTAIL_TOL,
                   dsigma_floor: float = DSIGMA_FLOOR,
                   constant_focal_tol: float = CONSTANT_FOCAL_TOL,
                   kappa_floor: float = KAPPA_FLOOR) -> SingularityClass:
    f = frame_at(w, s, t)
    kappa = f.principal_curvature(sign)
    constante = abs(kappa) > kappa_floor and is_constant_focal(w, t, sign, constant_focal_tol)
    return classify_values(float(sigma_from_frame(f, sign)), float(dsigma_from_frame(f, sign)),
                           kappa, constante, kappa_floor, swallowtail_tol, dsigma_floor)


# ============================================================================
# RAÍCES
# ============================================================================

def _newton_salvaguardado(fdf: Callable, a: np.ndarray, b: np.ndarray,
                          fa: np.ndarray, fb: np.ndarray,
                          tol: float, max_iter: int = NEWTON_MAX_ITER) -> np.ndarray:
    """
    Newton en lote, uno por corchete [a, b], con bisección cuando el paso
    sale del corchete. fdf(x) devuelve (f(x), f'(x)) sobre un arreglo.
    """
    a, b = a.astype(float), b.astype(float)
    fa, fb = fa.astype(float), fb.astype(float)
    x = a - fa * (b - a) / (fb - fa)
    fx, dx = (np.array(v, dtype=float) for v in fdf(x))
    listo = np.zeros(x.shape, dtype=bool)

    for _ in range(max_iter):
        listo |= np.abs(fx) <= tol
        act = ~listo
        if not np.any(act):
            break
        mismo = np.sign(fx) == np.sign(fa)
        a = np.where(act & mismo, x, a)
        fa = np.where(act & mismo, fx, fa)
        b = np.where(act & ~mismo, x, b)
        fb = np.where(act & ~mismo, fx, fb)

        with np.errstate(divide="ignore", invalid="ignore"):
            candidato = x - fx / dx
        fuera = ~np.isfinite(candidato) | ~((a < candidato) & (candidato < b))
        candidato = np.where(fuera, 0.5 * (a + b), candidato)
        estancado = (candidato == x) | (b - a <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(x)))
        listo |= act & estancado
        act = ~listo
        if not np.any(act):
            break

        idx = np.flatnonzero(act)
        x[idx] = candidato[idx]
        f_i, d_i = fdf(x[idx])
        fx[idx] = f_i
        dx[idx] = d_i

    for i in np.flatnonzero(~listo):
        logger.warning("⚠️ Newton no convergió en [%.12g, %.12g]: |f| = %.3e",
                       a[i], b[i], abs(fx[i]))
    return x


def find_roots(func: Callable, dfunc: Callable, nodes: np.ndarray,
               tol: float = ROOT_TOL, fdf: Optional[Callable] = None) -> List[float]:
    """
    Raíces de func sobre la malla: nodos con |f| ≤ tol más corchetes de
    cambio de signo refinados.

    func y dfunc aceptan arreglos. fdf, si se da, devuelve ambos valores con
    una sola evaluación y es el que usa el refinamiento.
    """
    nodes = np.asarray(nodes, dtype=float)
    valores = np.asarray(func(nodes), dtype=float)
    en_nodo = np.abs(valores) <= tol
    raices = [float(x) for x in nodes[en_nodo]]

    izq, der = valores[:-1], valores[1:]
    corchetes = np.flatnonzero(~en_nodo[:-1] & ~en_nodo[1:] & (np.sign(izq) != np.sign(der)))
    if corchetes.size:
        if fdf is None:
            def fdf(x):
                return func(x), dfunc(x)
        refinadas = _newton_salvaguardado(fdf, nodes[corchetes], nodes[corchetes + 1],
                                          izq[corchetes], der[corchetes], tol)
        raices.extend(float(r) for r in refinadas)

    raices.sort()
    unicas = []
    for r in raices:
        if not unicas or abs(r - unicas[-1]) > 1e-12 * max(1.0, abs(r)):
            unicas.append(r)
    return unicas


def sigma_roots(w: WorldSheet, t: float, sign: SignChoice,
                grid: Union[SampleGrid, int, None] = None,
                root_tol: float = ROOT_TOL,
                constant_focal_tol: float = CONSTANT_FOCAL_TOL) -> List[SigmaRoot]:
    """
    Raíces refinadas de σ± en la rebanada t.

    Un σ idénticamente nulo (punto focal constante) no produce raíces.
    """
    n = grid.n_s if isinstance(grid, SampleGrid) else int(grid or CONSTANT_FOCAL_SAMPLES)
    if is_constant_focal(w, t, sign, constant_focal_tol):
        return []

    def f(s):
        return _sigma_en_curva(w, t, sign, np.atleast_1d(s))

    def fdf(s):
        campo = frame_field(w, np.atleast_1d(s), float(t))
        return sigma_from_frame(campo, sign), dsigma_from_frame(campo, sign)

    raices = find_roots(f, None, w.s_values(t, n), root_tol, fdf=fdf)
    if not raices:
        logger.debug("🔍 t=%.6g rama %s: sin raíces de σ", t, sign.value)
        return []
    valores, derivadas = fdf(np.array(raices))
    resultado = [SigmaRoot(r, float(v), float(d)) for r, v, d in zip(raices, valores, derivadas)]
    logger.debug("🔍 t=%.6g rama %s: %d raíces de σ", t, sign.value, len(resultado))
    return resultado


# ============================================================================
# TANGENCIA DE LA CURVA FOCAL
# ============================================================================

def _tangencia(f: Union[FrameData, FrameField], sign: SignChoice):
    """
    ℓ' = σ/κ² (b ± n) y ℓ'' = (σ'/κ² - 2σκ'/κ³)(b ± n) + σ/κ² (b ± n)'.

    Returns:
        (‖ℓ'‖, ángulo entre ℓ'' y la recta de b ± n) en norma euclídea
    """
    e = sign.epsilon
    if isinstance(f, FrameField):
        v = f.null_vector(sign)
        dv = f.bvec_jet[1] + e * f.nvec_jet[1]
    else:
        v = f.null_vector(sign)
        dv = f.d_null_vector(sign)
    kappa = np.asarray(f.principal_curvature(sign))
    dkappa = np.asarray(f.dkappa_g + e * f.dkappa_n)
    sg = np.asarray(sigma_from_frame(f, sign))
    dsg = np.asarray(dsigma_from_frame(f, sign))

    ell_p = (sg / kappa ** 2)[..., None] * v
    coef = dsg / kappa ** 2 - 2.0 * sg * dkappa / kappa ** 3
    ell_pp = coef[..., None] * v + (sg / kappa ** 2)[..., None] * dv

    direccion = v / np.linalg.norm(v, axis=-1, keepdims=True)
    paralela = np.abs(np.sum(ell_pp * direccion, axis=-1))
    perpendicular = np.linalg.norm(ell_pp - np.sum(ell_pp * direccion, axis=-1)[..., None] * direccion,
                                   axis=-1)
    norma_pp = np.linalg.norm(ell_pp, axis=-1)
    angulo = np.where(norma_pp > 0, np.arctan2(perpendicular, paralela), np.nan)
    return np.linalg.norm(ell_p, axis=-1), angulo


def focal_tangent(w: WorldSheet, s: float, t: float, sign: SignChoice) -> np.ndarray:
    """ℓ'(s) = σ/κ² (b ± n)"""
    f = frame_at(w, s, t)
    kappa = f.principal_curvature(sign)
    if abs(kappa) <= KAPPA_FLOOR:
        raise ParabolicPoint(float(s), float(t), sign, kappa)
    return float(sigma_from_frame(f, sign)) / kappa ** 2 * f.null_vector(sign)


def cusp_tangency_check(w: WorldSheet, t: float, sign: SignChoice, s_star: float,
                        kappa_floor: float = KAPPA_FLOOR) -> Tuple[float, float]:
    """
    (‖ℓ'(s*)‖, ángulo entre ℓ''(s*) y b ± n).

    Raises:
        ParabolicPoint
    """
    f = frame_at(w, s_star, t)
    kappa = f.principal_curvature(sign)
    if abs(kappa) <= kappa_floor:
        raise ParabolicPoint(float(s_star), float(t), sign, kappa)
    norma, angulo = _tangencia(f, sign)
    return float(norma), float(angulo)


# ============================================================================
# VERSALIDAD
# ============================================================================

def versality_determinant(w: WorldSheet, s: float, t: float, sign: SignChoice,
                          chart: str = "auto") -> Tuple[float, float]:
    """
    Determinante de la matriz A de derivadas de carta de (H, H_s, H_ss) en
    λ = punto focal, y la referencia 1/λ_carta.

    chart: "auto" (mayor |λ₋₁| o |λ₀|), "m1" o "0".

    Raises:
        ParabolicPoint, ChartDegenerate
    """
    lam = focal_point(w, s, t, sign).point
    campo = frame_field(w, float(s), float(t))
    g = campo.gamma_jet[:, 0]
    filas = np.stack([g[0], g[1], 2.0 * g[2]])  # Γ, Γ_s, Γ_ss

    if chart == "auto":
        chart = "m1" if abs(lam[0]) >= abs(lam[1]) else "0"
    if chart not in ("m1", "0"):
        raise ValueError(f"Carta desconocida: {chart}")
    c, otra = (0, 1) if chart == "m1" else (1, 0)
    if abs(lam[c]) < CHART_TOL:
        raise ChartDegenerate(f"|λ_{chart}| = {abs(lam[c]):.3e} < {CHART_TOL:g} en s={s:.6g}, t={t:.6g}")

    x_c = filas[:, c]
    a = np.column_stack([
        x_c * lam[otra] / lam[c] - filas[:, otra],
        filas[:, 2] - x_c * lam[2] / lam[c],
        filas[:, 3] - x_c * lam[3] / lam[c],
    ])
    return float(np.linalg.det(a)), float(1.0 / lam[c])


# ============================================================================
# COMPLEMENTOS
# ============================================================================

def height_germ_order(w: WorldSheet, s: float, t: float, sign: SignChoice,
                      lam: Optional[np.ndarray] = None, tol: float = LADDER_TOL) -> int:
    """
    k del germen A_k de h(u) = H(u, t, λ) en s (4 significa "≥ 4").

    Por defecto λ es el punto focal en s.
    """
    if lam is None:
        lam = focal_point(w, s, t, sign).point
    he = height(w, s, t, lam)
    escala = 1.0 + float(np.linalg.norm(he.lam))
    for k in (1, 2, 3):
        if abs(he.dh[k]) > tol * escala:
            return k
    return 4


def curve_on_lightcone(w: WorldSheet, t: float, lambda0, n: int = CONSTANT_FOCAL_SAMPLES) -> float:
    """Peor |<Γ - λ₀, Γ - λ₀>| sobre la curva momentánea t"""
    lam = np.asarray(lambda0, dtype=float)
    gamma = w.gamma(w.s_values(t, n), t)
    d = gamma - lam
    return float(np.max(np.abs(inner(d, d))))


# ============================================================================
# REPORTE POR REBANADA
# ============================================================================

def singularity_report(w: WorldSheet, t: float, sign: SignChoice, n_s: int,
                       swallowtail_tol: float = SWALLOWTAIL_TOL,
                       dsigma_floor: float = DSIGMA_FLOOR,
                       constant_focal_tol: float = CONSTANT_FOCAL_TOL,
                       root_tol: float = ROOT_TOL,
                       kappa_floor: float = KAPPA_FLOOR) -> SingularityReport:
    """
    Entradas para cada nodo no parabólico de la malla y cada raíz refinada
    de σ±, en orden creciente de s.
    """
    t = float(t)
    nodos = w.s_values(t, n_s)
    raices = sigma_roots(w, t, sign, n_s, root_tol, constant_focal_tol)
    constante = is_constant_focal(w, t, sign, constant_focal_tol)

    todos = np.concatenate([nodos, [r.s for r in raices]])
    es_raiz = np.concatenate([np.zeros(len(nodos), bool), np.ones(len(raices), bool)])
    orden = np.argsort(todos, kind="stable")
    todos, es_raiz = todos[orden], es_raiz[orden]

    campo = frame_field(w, todos, t)
    kappa = campo.principal_curvature(sign)
    sg = sigma_from_frame(campo, sign)
    dsg = dsigma_from_frame(campo, sign)
    ok = np.abs(kappa) > kappa_floor

    lam = campo.gamma + campo.null_vector(sign) / np.where(ok, kappa, 1.0)[:, None]
    g = campo.gamma_jet
    h = np.abs(inner(g[0], lam) + 1.0)
    h_s = np.abs(inner(g[1], lam))
    h_ss = np.abs(2.0 * inner(g[2], lam))
    h_sss = np.abs(6.0 * inner(g[3], lam))
    with np.errstate(all="ignore"):
        ell_p, angulo = _tangencia(campo, sign)

    entradas = []
    for i in np.flatnonzero(ok):
        klass = classify_values(float(sg[i]), float(dsg[i]), float(kappa[i]), constante,
                                kappa_floor, swallowtail_tol, dsigma_floor)
        residuos = {
            "h": float(h[i]), "h_s": float(h_s[i]), "h_ss": float(h_ss[i]),
            "h_sss": float(h_sss[i]),
            "ell_prime_norm": float(ell_p[i]), "ell_pp_angle": float(angulo[i]),
        }
        entradas.append(SingularityEntry(float(todos[i]), klass, float(sg[i]), float(dsg[i]),
                                         residuos, FOCAL_GERM.get(klass, "undetermined")))

    reporte = SingularityReport(t, sign, entradas)
    logger.info("📊 t=%.6g rama %s: %d entradas, %d colas de golondrina, %d aristas cuspidales",
                t, sign.value, len(entradas), reporte.count(SingularityClass.SWALLOWTAIL),
                reporte.count(SingularityClass.CUSPIDAL_EDGE))
    return reporte
