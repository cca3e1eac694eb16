"""
AdS-Fronts - Hojas de Mundo en AdS³
===================================

PROPÓSITO:
----------
Representar una hoja de mundo Γ(s,t) ⊂ AdS³ definida por cuatro expresiones,
validar sus condiciones causales sobre una malla y, cuando se pide,
reparametrizar cada curva momentánea por longitud de arco.

FUNCIONALIDADES:
----------------
1. WorldSheet inmutable con derivadas simbólicas precalculadas
   (∂ᵏΓ/∂sᵏ hasta k = 4 y ∂ᵏΓ_t/∂sᵏ hasta k = 2)
2. Validación por malla: pertenencia a AdS³, curvas momentáneas de tipo
   espacio, plano tangente temporal y, según el modo, longitud de arco
3. Mapa monótono σ ↦ s(σ): σ(s) = ∫‖Γ_s‖ por Gauss-Legendre compuesto
   e interpolante de Hermite con pendientes exactas
4. Jets de Taylor exactos de Γ y Γ_t en el parámetro público

MODOS DE LONGITUD DE ARCO:
--------------------------
- assume:        s ya es longitud de arco; la validación lo verifica
- reject:        igual que assume, pero el fallo sugiere reparametrizar
- reparametrize: el parámetro público es σ ∈ [0, L(t)] en cada rebanada

VERSIÓN: 1.0
"""

import logging
import threading
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline

import utils_series as jets
from expr_dsl import ExprVector4, evaluate_vectors
from pseudo_metric import AdSError, inner

logger = logging.getLogger(__name__)

# ============================================================================
# CONSTANTES
# ============================================================================

ADS_TOL = 1e-8
SPACELIKE_TOL = 1e-10
GRAM_TOL = 1e-10
ARCLENGTH_TOL = 1e-8
REPARAM_TOL = 1e-8
REPARAM_NODES = 2049
DEGENERATE_TOL = 1e-10
GAUSS_ORDER = 10

# Órdenes de los jets que consume el marco móvil
ORDEN_S = 4
ORDEN_T = 2


# ============================================================================
# ERRORES Y ENUMERACIONES
# ============================================================================

class NotSpacelike(AdSError):
    """<Γ_s, Γ_s> ≤ 0 en algún punto de la curva momentánea"""


class ArcLengthMode(Enum):
    ASSUME = "assume"
    REPARAMETRIZE = "reparametrize"
    REJECT = "reject"


# ============================================================================
# MALLA DE MUESTREO
# ============================================================================

@dataclass(frozen=True)
class SampleGrid:
    """Densidades de muestreo y parámetros de búsqueda de intersecciones"""
    n_s: int = 128
    n_t: int = 16
    n_mu: int = 64
    mu_range: Tuple[float, float] = (-3.0, 3.0)
    hash_cell: float = 0.05
    refine_tol: float = 1e-9

    def __post_init__(self):
        ok, mensaje = self.validar()
        if not ok:
            raise ValueError(mensaje)
        object.__setattr__(self, "mu_range", (float(self.mu_range[0]), float(self.mu_range[1])))

    def validar(self) -> Tuple[bool, str]:
        if min(self.n_s, self.n_t, self.n_mu) < 1:
            return False, "n_s, n_t y n_mu deben ser positivos"
        if self.n_s < 2 or self.n_mu < 2:
            return False, "n_s y n_mu deben ser al menos 2"
        if not self.mu_range[0] < self.mu_range[1]:
            return False, f"Rango de μ vacío: {self.mu_range}"
        if self.hash_cell <= 0:
            return False, "hash_cell debe ser positivo"
        if self.refine_tol <= 0:
            return False, "refine_tol debe ser positivo"
        return True, "Malla válida"

    def t_values(self, t_range: Tuple[float, float]) -> np.ndarray:
        if self.n_t == 1:
            return np.array([0.5 * (t_range[0] + t_range[1])])
        return np.linspace(t_range[0], t_range[1], self.n_t)

    def mu_values(self) -> np.ndarray:
        return np.linspace(self.mu_range[0], self.mu_range[1], self.n_mu)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mu_range"] = list(self.mu_range)
        return d


# ============================================================================
# REPORTE DE VALIDACIÓN
# ============================================================================

@dataclass
class CheckResult:
    """Resultado de un chequeo: peor valor, su residuo y dónde ocurrió"""
    name: str
    passed: bool
    worst_value: float
    residual: float
    location: Tuple[float, float]
    tolerance: float
    failure_kind: Optional[str] = None
    hint: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["location"] = list(self.location)
        return d


@dataclass
class ValidationReport:
    passed: bool
    checks: List[CheckResult]
    grid: Dict[str, int] = field(default_factory=dict)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "grid": dict(self.grid),
            "checks": [c.to_dict() for c in self.checks],
        }


# ============================================================================
# MAPA DE LONGITUD DE ARCO
# ============================================================================

@dataclass(frozen=True, eq=False)
class ArcLengthMap:
    """
    Mapa estrictamente creciente σ ↦ s(σ) en una rebanada t.

    Interpolante cúbico de Hermite con pendientes exactas ds/dσ = 1/‖Γ_s‖.
    """
    t: float
    length: float
    sigma_nodes: np.ndarray
    s_nodes: np.ndarray
    spline: CubicHermiteSpline

    def __call__(self, sigma):
        sigma = np.clip(sigma, 0.0, self.length)
        valor = self.spline(sigma)
        return float(valor) if np.ndim(valor) == 0 else valor

    def derivative(self, sigma):
        return self.spline.derivative()(np.clip(sigma, 0.0, self.length))


# ============================================================================
# HOJA DE MUNDO
# ============================================================================

@dataclass(frozen=True, eq=False)
class WorldSheet:
    """
    Hoja de mundo Γ(s,t) en AdS³.

    El parámetro s de todos los métodos públicos es el parámetro público:
    el original en los modos assume/reject, la longitud de arco en el modo
    reparametrize.
    """
    embedding: ExprVector4
    s_range: Tuple[float, float]
    t_range: Tuple[float, float]
    arc_length_mode: ArcLengthMode = ArcLengthMode.ASSUME
    validation: Optional[ValidationReport] = None
    reparam_nodes: int = REPARAM_NODES
    degenerate_tol: float = DEGENERATE_TOL

    _d_s: tuple = field(init=False, repr=False)
    _d_ts: tuple = field(init=False, repr=False)
    _mapas: dict = field(init=False, repr=False)
    _candado: object = field(init=False, repr=False)

    def __post_init__(self):
        s_range = (float(self.s_range[0]), float(self.s_range[1]))
        t_range = (float(self.t_range[0]), float(self.t_range[1]))
        if not s_range[0] < s_range[1]:
            raise ValueError(f"Rango de s vacío: {s_range}")
        if not t_range[0] <= t_range[1]:
            raise ValueError(f"Rango de t vacío: {t_range}")
        if self.reparam_nodes < 4:
            raise ValueError("reparam_nodes debe ser al menos 4")

        object.__setattr__(self, "s_range", s_range)
        object.__setattr__(self, "t_range", t_range)
        object.__setattr__(self, "arc_length_mode", ArcLengthMode(self.arc_length_mode))

        d_s = [self.embedding]
        for _ in range(ORDEN_S):
            d_s.append(d_s[-1].differentiate("s"))
        d_ts = [self.embedding.differentiate("t")]
        for _ in range(ORDEN_T):
            d_ts.append(d_ts[-1].differentiate("s"))

        object.__setattr__(self, "_d_s", tuple(d_s))
        object.__setattr__(self, "_d_ts", tuple(d_ts))
        object.__setattr__(self, "_mapas", {})
        object.__setattr__(self, "_candado", threading.Lock())

    @classmethod
    def from_texts(cls, texts: Union[Sequence[str], Dict[str, str]],
                   s_range: Tuple[float, float], t_range: Tuple[float, float],
                   arc_length_mode: Union[str, ArcLengthMode] = ArcLengthMode.ASSUME,
                   **kwargs) -> "WorldSheet":
        return cls(ExprVector4.parse(texts), s_range, t_range,
                   ArcLengthMode(arc_length_mode), **kwargs)

    def with_validation(self, report: ValidationReport) -> "WorldSheet":
        nueva = replace(self, validation=report)
        nueva._mapas.update(self._mapas)
        return nueva

    @property
    def reparametrized(self) -> bool:
        return self.arc_length_mode is ArcLengthMode.REPARAMETRIZE

    # ------------------------------------------------------------------------
    # Parámetro público
    # ------------------------------------------------------------------------

    def arc_map(self, t: float) -> ArcLengthMap:
        t = float(t)
        mapa = self._mapas.get(t)
        if mapa is None:
            mapa = reparametrize_arclength(self, t, self.reparam_nodes)
            with self._candado:
                self._mapas.setdefault(t, mapa)
        return mapa

    def s_interval(self, t: float) -> Tuple[float, float]:
        if self.reparametrized:
            return (0.0, self.arc_map(t).length)
        return self.s_range

    def s_values(self, t: float, n: int) -> np.ndarray:
        a, b = self.s_interval(t)
        return np.linspace(a, b, n)

    def original_s(self, s, t):
        """Parámetro original correspondiente al parámetro público s"""
        if not self.reparametrized:
            return s
        s_b, t_b = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        plano_s, plano_t = s_b.ravel(), t_b.ravel()
        salida = np.empty(plano_s.shape)
        for tv in np.unique(plano_t):
            m = plano_t == tv
            salida[m] = self.arc_map(float(tv))(plano_s[m])
        if s_b.ndim == 0:
            return float(salida[0])
        return salida.reshape(s_b.shape)

    # ------------------------------------------------------------------------
    # Evaluación
    # ------------------------------------------------------------------------

    def evaluate_raw(self, k_s: int, s, t, t_derivative: bool = False) -> np.ndarray:
        """∂ᵏΓ/∂sᵏ (o ∂ᵏΓ_t/∂sᵏ) en el parámetro original"""
        fuente = self._d_ts if t_derivative else self._d_s
        return fuente[k_s].evaluate(s, t)

    def gamma(self, s, t) -> np.ndarray:
        return self.embedding.evaluate(self.original_s(s, t), t)

    def raw_jets(self, s, t) -> Tuple[np.ndarray, np.ndarray]:
        """Jets en el parámetro original: Γ (orden 4) y Γ_t (orden 2)"""
        valores = evaluate_vectors(self._d_s + self._d_ts, s, t)
        g = jets.from_derivatives(valores[:ORDEN_S + 1])
        gt = jets.from_derivatives(valores[ORDEN_S + 1:])
        return g, gt

    def jets(self, s, t) -> Tuple[np.ndarray, np.ndarray]:
        """
        Jets de Γ (orden 4) y de Γ_t (orden 2) en el parámetro público.

        En modo reparametrize se componen con el jet exacto de s(σ), obtenido
        por iteración de Picard sobre ds/dσ = 1/‖Γ_s‖. El Γ_t compuesto difiere
        del verdadero ∂Γ/∂t a σ fijo en un múltiplo de Γ_s, que no altera el
        plano tangente.
        """
        s0 = self.original_s(s, t)
        g, gt = self.raw_jets(s0, t)
        if not self.reparametrized:
            return g, gt

        gs = jets.deriv(g)
        rapidez_inv = jets.rsqrt(jets.inner_jet(gs, gs))
        delta = np.zeros((ORDEN_S + 1,) + rapidez_inv.shape[1:])
        for _ in range(ORDEN_S):
            delta = jets.integ(jets.compose(rapidez_inv, delta[:ORDEN_S]))
        g_sigma = jets.compose(g, delta, vectorial=True)
        gt_sigma = jets.compose(gt, delta[:ORDEN_T + 1], vectorial=True)
        return g_sigma, gt_sigma

    def to_dict(self) -> dict:
        return {
            "embedding": self.embedding.to_texts(),
            "s_range": list(self.s_range),
            "t_range": list(self.t_range),
            "arc_length_mode": self.arc_length_mode.value,
        }


# ============================================================================
# VALIDACIÓN
# ============================================================================

def _peor(valores: np.ndarray, s: np.ndarray, t: np.ndarray, maximo: bool = True):
    idx = int(np.argmax(valores)) if maximo else int(np.argmin(valores))
    return float(valores.flat[idx]), (float(s.flat[idx]), float(t.flat[idx]))


def validate(w: WorldSheet, grid: SampleGrid,
             ads_tol: float = ADS_TOL,
             spacelike_tol: float = SPACELIKE_TOL,
             gram_tol: float = GRAM_TOL,
             arclength_tol: float = ARCLENGTH_TOL,
             reparam_tol: float = REPARAM_TOL) -> ValidationReport:
    """
    Chequea la hoja en cada nodo de la malla (parámetro original).

    (a) |<Γ,Γ> + 1| ≤ ads_tol
    (b) <Γ_s,Γ_s> > spacelike_tol
    (c) <Γ_s,Γ_s><Γ_t,Γ_t> - <Γ_s,Γ_t>² < -gram_tol
    (d) modos assume/reject: |<Γ_s,Γ_s> - 1| ≤ arclength_tol
    (e) modo reparametrize: residuo de rapidez del mapa de cada rebanada

    Raises:
        EvaluationError: propagado desde el evaluador de expresiones
    """
    s = np.linspace(w.s_range[0], w.s_range[1], grid.n_s)
    t = grid.t_values(w.t_range)
    S, T = np.meshgrid(s, t, indexing="ij")

    gamma = w.evaluate_raw(0, S, T)
    gamma_s = w.evaluate_raw(1, S, T)
    gamma_t = w.evaluate_raw(0, S, T, t_derivative=True)

    q_ss = inner(gamma_s, gamma_s)
    q_tt = inner(gamma_t, gamma_t)
    q_st = inner(gamma_s, gamma_t)
    gram = q_ss * q_tt - q_st ** 2

    checks = []

    dev_ads = np.abs(inner(gamma, gamma) + 1.0)
    peor, donde = _peor(dev_ads, S, T)
    checks.append(CheckResult("on_ads", peor <= ads_tol, peor, peor, donde, ads_tol,
                              None if peor <= ads_tol else "off_ads"))

    minimo, donde = _peor(q_ss, S, T, maximo=False)
    exceso = max(0.0, spacelike_tol - minimo)
    ok = minimo > spacelike_tol
    checks.append(CheckResult("spacelike_curves", ok, minimo, exceso, donde, spacelike_tol,
                              None if ok else "not_spacelike"))

    maximo, donde = _peor(gram, S, T)
    exceso = max(0.0, maximo + gram_tol)
    ok = maximo < -gram_tol
    checks.append(CheckResult("timelike_tangent_plane", ok, maximo, exceso, donde, gram_tol,
                              None if ok else "tangent_plane_not_timelike"))

    base_ok = all(c.passed for c in checks)

    if w.arc_length_mode is ArcLengthMode.REPARAMETRIZE:
        checks.append(_chequeo_reparametrizacion(w, t, base_ok, reparam_tol))
    else:
        dev = np.abs(q_ss - 1.0)
        peor, donde = _peor(dev, S, T)
        ok = peor <= arclength_tol
        if w.arc_length_mode is ArcLengthMode.ASSUME:
            tipo, pista = "arclength_assumption_violated", ""
        else:
            tipo, pista = "rejected_not_arclength", "use arc_length = reparametrize"
        checks.append(CheckResult("arc_length", ok, peor, peor, donde, arclength_tol,
                                  None if ok else tipo, "" if ok else pista))

    passed = all(c.passed for c in checks)
    reporte = ValidationReport(passed, checks, {"n_s": grid.n_s, "n_t": int(len(t))})

    if passed:
        logger.info("✅ Hoja validada en malla %dx%d", grid.n_s, len(t))
    else:
        for c in reporte.failures:
            logger.warning("❌ Chequeo %s falló: peor valor %.3e en (s,t)=(%.6g, %.6g)",
                           c.name, c.worst_value, c.location[0], c.location[1])
    return reporte


def _chequeo_reparametrizacion(w: WorldSheet, t_values: np.ndarray,
                               base_ok: bool, tol: float) -> CheckResult:
    if not base_ok:
        return CheckResult("arc_length_reparam", False, float("nan"), float("nan"),
                           (float("nan"), float("nan")), tol, "skipped_invalid_sheet")
    peor, donde = 0.0, (0.0, float(t_values[0]))
    for tv in t_values:
        try:
            mapa = w.arc_map(float(tv))
        except NotSpacelike:
            return CheckResult("arc_length_reparam", False, float("nan"), float("nan"),
                               (float("nan"), float(tv)), tol, "not_spacelike")
        residuo, sigma = speed_residual(w, mapa)
        if residuo > peor:
            peor, donde = residuo, (sigma, float(tv))
    ok = peor <= tol
    return CheckResult("arc_length_reparam", ok, peor, peor, donde, tol,
                       None if ok else "reparametrization_inaccurate")


# ============================================================================
# REPARAMETRIZACIÓN
# ============================================================================

def _rapidez_inversa(w: WorldSheet, s, t: float):
    gs = w.evaluate_raw(1, s, t)
    q = inner(gs, gs)
    if np.any(np.asarray(q) <= 0):
        raise NotSpacelike(f"<Γ_s,Γ_s> ≤ 0 en t={t}")
    return 1.0 / np.sqrt(q)


def reparametrize_arclength(w: WorldSheet, t: float, n_nodes: int = REPARAM_NODES) -> ArcLengthMap:
    """
    Construye σ ↦ s(σ) tabulando σ(s) = ∫‖Γ_s‖ ds en nodos uniformes de s.

    Cada panel entre nodos se integra con Gauss-Legendre de GAUSS_ORDER
    puntos, de modo que los valores nodales quedan al nivel del redondeo.
    El interpolante de Hermite usa las pendientes exactas 1/‖Γ_s‖.

    Raises:
        NotSpacelike: si <Γ_s,Γ_s> ≤ 0 en algún punto de cuadratura
    """
    s_min, s_max = w.s_range
    s_nodes = np.linspace(s_min, s_max, n_nodes)
    x, pesos = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    mitad = 0.5 * np.diff(s_nodes)
    centro = 0.5 * (s_nodes[1:] + s_nodes[:-1])
    s_cuad = centro[:, None] + mitad[:, None] * x[None, :]
    rapidez = 1.0 / _rapidez_inversa(w, s_cuad, t)
    paneles = mitad * (rapidez @ pesos)

    sigma_nodes = np.concatenate([[0.0], np.cumsum(paneles)])
    if np.any(np.diff(sigma_nodes) <= 0):
        raise NotSpacelike(f"Mapa de longitud de arco no estrictamente creciente en t={t}")
    longitud = float(sigma_nodes[-1])

    pendientes = _rapidez_inversa(w, s_nodes, t)
    spline = CubicHermiteSpline(sigma_nodes, s_nodes, pendientes)
    logger.debug("📊 Longitud de arco en t=%.6g: L=%.12g (%d paneles)", t, longitud, n_nodes - 1)
    return ArcLengthMap(float(t), longitud, sigma_nodes, s_nodes, spline)


def speed_residual(w: WorldSheet, mapa: ArcLengthMap, factor: int = 2) -> Tuple[float, float]:
    """
    Peor |<dΓ/dσ, dΓ/dσ> - 1| sobre una malla más fina que la de nodos.

    Returns:
        (residuo, σ donde ocurre)
    """
    sigma = np.linspace(0.0, mapa.length, factor * mapa.sigma_nodes.size + 1)
    s = mapa(sigma)
    ds = mapa.derivative(sigma)
    gs = w.evaluate_raw(1, s, mapa.t)
    residuo = np.abs(inner(gs, gs) * ds ** 2 - 1.0)
    idx = int(np.argmax(residuo))
    return float(residuo[idx]), float(sigma[idx])
