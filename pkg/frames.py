"""
AdS-Fronts - Marco Móvil Adaptado y Curvaturas
==============================================

PROPÓSITO:
----------
Construir el marco pseudo-ortonormal {Γ, b, n, t} a lo largo de la hoja de
mundo y la terna de curvaturas (κ_g, κ_n, τ_g) con sus derivadas en s.

CONSTRUCCIÓN:
-------------
    t = Γ_s
    n = Γ∧t∧Γ_t / ‖Γ∧t∧Γ_t‖
    b = ±Γ∧n∧t   (signo tal que det(Γ, b, e₁, e₂) > 0)

    κ_g = <t_s, b>     κ_n = <t_s, n>     τ_g = <b_s, n>

Las derivadas en s de las curvaturas se obtienen propagando jets de Taylor
exactos por toda la construcción (utils_series), no diferenciando muestras.

Ecuaciones de Frenet-Serret resultantes:
    Γ_s = t
    t_s = Γ - κ_g b + κ_n n
    b_s = -κ_g t + τ_g n
    n_s = -κ_n t + τ_g b

VERSIÓN: 1.0
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

import utils_series as jets
from pseudo_metric import SIGNATURE, AdSError, adaptedness, inner
from worldsheet import WorldSheet

logger = logging.getLogger(__name__)

# ============================================================================
# CONSTANTES
# ============================================================================

FRAME_COLUMNS = [
    "s", "t",
    "gamma_m1", "gamma_0", "gamma_1", "gamma_2",
    "b_m1", "b_0", "b_1", "b_2",
    "n_m1", "n_0", "n_1", "n_2",
    "t_m1", "t_0", "t_1", "t_2",
    "kappa_g", "kappa_n", "tau_g",
]

CURVATURE_COLUMNS = [
    "s", "t", "kappa_g", "kappa_n", "tau_g",
    "dkappa_g", "dkappa_n", "dtau_g", "d2kappa_g", "d2kappa_n",
    "kappa_plus", "kappa_minus", "sigma_plus", "sigma_minus",
]

_SUFIJOS = ("m1", "0", "1", "2")


# ============================================================================
# ERRORES Y ENUMERACIONES
# ============================================================================

class DegenerateFrame(AdSError):
    """‖Γ∧t∧Γ_t‖ por debajo del umbral: el plano tangente degenera"""


class SignChoice(Enum):
    """Rama ± del campo nulo b ± n"""
    PLUS = "plus"
    MINUS = "minus"

    @property
    def epsilon(self) -> float:
        return 1.0 if self is SignChoice.PLUS else -1.0

    @property
    def symbol(self) -> str:
        return "+" if self is SignChoice.PLUS else "-"


# ============================================================================
# MODELOS DE DATOS
# ============================================================================

@dataclass
class FrameData:
    """Marco adaptado y curvaturas en un punto (s, t)"""
    s: float
    t: float
    gamma: np.ndarray
    tvec: np.ndarray
    nvec: np.ndarray
    bvec: np.ndarray
    kappa_g: float
    kappa_n: float
    tau_g: float
    dkappa_g: float
    dkappa_n: float
    dtau_g: float
    d2kappa_g: float
    d2kappa_n: float
    # derivadas en s de los vectores del marco
    dtvec: np.ndarray
    dbvec: np.ndarray
    dnvec: np.ndarray

    def null_vector(self, sign: SignChoice) -> np.ndarray:
        return self.bvec + sign.epsilon * self.nvec

    def d_null_vector(self, sign: SignChoice) -> np.ndarray:
        return self.dbvec + sign.epsilon * self.dnvec

    def principal_curvature(self, sign: SignChoice) -> float:
        return self.kappa_g + sign.epsilon * self.kappa_n

    def gram_matrix(self) -> np.ndarray:
        """Matriz de Gram en el orden (Γ, b, n, t)"""
        base = np.stack([self.gamma, self.bvec, self.nvec, self.tvec])
        return (base * SIGNATURE) @ base.T

    def validar(self, tol: float = 1e-9) -> Tuple[bool, str]:
        residuo = np.max(np.abs(self.gram_matrix() - np.diag([-1.0, -1.0, 1.0, 1.0])))
        if residuo > tol:
            return False, f"Marco no pseudo-ortonormal (residuo {residuo:.3e})"
        if adaptedness(self.gamma, self.bvec) <= 0:
            return False, "b no está adaptado"
        return True, "Marco válido"

    def to_dict(self) -> dict:
        d = asdict(self)
        for clave, valor in d.items():
            if isinstance(valor, np.ndarray):
                d[clave] = valor.tolist()
        return d


@dataclass
class FrameField:
    """Marcos en lote a lo largo de una lista de nodos (s, t)"""
    s: np.ndarray
    t: np.ndarray
    gamma_jet: np.ndarray   # (5, n, 4)
    tvec_jet: np.ndarray    # (4, n, 4)
    nvec_jet: np.ndarray    # (3, n, 4)
    bvec_jet: np.ndarray    # (3, n, 4)
    kappa_g_jet: np.ndarray  # (3, n)
    kappa_n_jet: np.ndarray  # (3, n)
    tau_g_jet: np.ndarray    # (2, n)

    def __len__(self) -> int:
        return int(self.s.shape[0])

    @property
    def gamma(self) -> np.ndarray:
        return self.gamma_jet[0]

    @property
    def tvec(self) -> np.ndarray:
        return self.tvec_jet[0]

    @property
    def nvec(self) -> np.ndarray:
        return self.nvec_jet[0]

    @property
    def bvec(self) -> np.ndarray:
        return self.bvec_jet[0]

    @property
    def kappa_g(self) -> np.ndarray:
        return self.kappa_g_jet[0]

    @property
    def kappa_n(self) -> np.ndarray:
        return self.kappa_n_jet[0]

    @property
    def tau_g(self) -> np.ndarray:
        return self.tau_g_jet[0]

    @property
    def dkappa_g(self) -> np.ndarray:
        return self.kappa_g_jet[1]

    @property
    def dkappa_n(self) -> np.ndarray:
        return self.kappa_n_jet[1]

    @property
    def dtau_g(self) -> np.ndarray:
        return self.tau_g_jet[1]

    @property
    def d2kappa_g(self) -> np.ndarray:
        return 2.0 * self.kappa_g_jet[2]

    @property
    def d2kappa_n(self) -> np.ndarray:
        return 2.0 * self.kappa_n_jet[2]

    def null_vector(self, sign: SignChoice) -> np.ndarray:
        return self.bvec + sign.epsilon * self.nvec

    def principal_curvature(self, sign: SignChoice) -> np.ndarray:
        return self.kappa_g + sign.epsilon * self.kappa_n

    def sigma(self, sign: SignChoice) -> np.ndarray:
        return sigma_from_frame(self, sign)

    def dsigma(self, sign: SignChoice) -> np.ndarray:
        return dsigma_from_frame(self, sign)

    def at(self, i: int) -> FrameData:
        return FrameData(
            s=float(self.s[i]), t=float(self.t[i]),
            gamma=self.gamma[i].copy(), tvec=self.tvec[i].copy(),
            nvec=self.nvec[i].copy(), bvec=self.bvec[i].copy(),
            kappa_g=float(self.kappa_g[i]), kappa_n=float(self.kappa_n[i]),
            tau_g=float(self.tau_g[i]),
            dkappa_g=float(self.dkappa_g[i]), dkappa_n=float(self.dkappa_n[i]),
            dtau_g=float(self.dtau_g[i]),
            d2kappa_g=float(self.d2kappa_g[i]), d2kappa_n=float(self.d2kappa_n[i]),
            dtvec=self.tvec_jet[1, i].copy(),
            dbvec=self.bvec_jet[1, i].copy(),
            dnvec=self.nvec_jet[1, i].copy(),
        )

    def flip_normal(self, mask: np.ndarray):
        """Invierte n donde mask es cierto; κ_n y τ_g cambian de signo"""
        f = np.where(mask, -1.0, 1.0)
        self.nvec_jet = self.nvec_jet * f[None, :, None]
        self.kappa_n_jet = self.kappa_n_jet * f[None, :]
        self.tau_g_jet = self.tau_g_jet * f[None, :]

    def enforce_continuity(self) -> int:
        """
        Elimina saltos de signo de n entre nodos consecutivos.

        Returns:
            número de saltos corregidos
        """
        if len(self) < 2:
            return 0
        n = self.nvec
        saltos = inner(n[:-1], n[1:]) < 0
        total = int(np.count_nonzero(saltos))
        if total:
            paridad = np.concatenate([[False], np.cumsum(saltos) % 2 == 1])
            self.flip_normal(paridad)
            logger.warning("⚠️ %d saltos de signo de n corregidos a lo largo de la malla", total)

        b = self.bvec
        saltos_b = int(np.count_nonzero(inner(b[:-1], b[1:]) > 0))
        if saltos_b:
            logger.warning("⚠️ b cambia de signo %d veces (la condición de adaptación manda)", saltos_b)
        return total

    def to_dataframe(self) -> pd.DataFrame:
        datos = {"s": self.s, "t": self.t}
        for nombre, vec in (("gamma", self.gamma), ("b", self.bvec),
                            ("n", self.nvec), ("t", self.tvec)):
            for j, suf in enumerate(_SUFIJOS):
                datos[f"{nombre}_{suf}"] = vec[:, j]
        datos["kappa_g"] = self.kappa_g
        datos["kappa_n"] = self.kappa_n
        datos["tau_g"] = self.tau_g
        return pd.DataFrame(datos, columns=FRAME_COLUMNS)

    def curvatures_dataframe(self) -> pd.DataFrame:
        datos = {
            "s": self.s, "t": self.t,
            "kappa_g": self.kappa_g, "kappa_n": self.kappa_n, "tau_g": self.tau_g,
            "dkappa_g": self.dkappa_g, "dkappa_n": self.dkappa_n, "dtau_g": self.dtau_g,
            "d2kappa_g": self.d2kappa_g, "d2kappa_n": self.d2kappa_n,
            "kappa_plus": self.principal_curvature(SignChoice.PLUS),
            "kappa_minus": self.principal_curvature(SignChoice.MINUS),
            "sigma_plus": self.sigma(SignChoice.PLUS),
            "sigma_minus": self.sigma(SignChoice.MINUS),
        }
        return pd.DataFrame(datos, columns=CURVATURE_COLUMNS)


# ============================================================================
# CONSTRUCCIÓN DEL MARCO
# ============================================================================

def frame_field(w: WorldSheet, s, t, degenerate_tol: Optional[float] = None) -> FrameField:
    """
    Marcos en los nodos (s, t) difundidos y aplanados.

    Sin degenerate_tol explícito se usa el umbral que lleva la hoja.

    Raises:
        DegenerateFrame: si ‖Γ∧t∧Γ_t‖ < degenerate_tol en algún nodo
    """
    s_b, t_b = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    s_b, t_b = s_b.ravel(), t_b.ravel()
    if degenerate_tol is None:
        degenerate_tol = w.degenerate_tol
    g, gt = w.jets(s_b, t_b)

    tj = jets.deriv(g)
    normal_cruda = jets.wedge_jet(g[:3], tj[:3], gt[:3])
    nn = jets.inner_jet(normal_cruda, normal_cruda)
    norma = np.sqrt(np.clip(nn[0], 0.0, None))
    malos = norma < degenerate_tol
    if np.any(malos):
        i = int(np.argmax(malos))
        raise DegenerateFrame(
            f"‖Γ∧t∧Γ_t‖ = {norma[i]:.3e} < {degenerate_tol:g} en (s,t)=({s_b[i]:.6g}, {t_b[i]:.6g})")

    nvec = jets.scale(jets.rsqrt(nn), normal_cruda)
    bvec = jets.wedge_jet(g[:3], nvec, tj[:3])
    signo = np.where(adaptedness(g[0], bvec[0]) < 0, -1.0, 1.0)
    bvec = bvec * signo[None, :, None]

    ts = jets.deriv(tj)
    kappa_g = jets.inner_jet(ts, bvec)
    kappa_n = jets.inner_jet(ts, nvec)
    tau_g = jets.inner_jet(jets.deriv(bvec), nvec[:2])

    return FrameField(s_b, t_b, g, tj, nvec, bvec, kappa_g, kappa_n, tau_g)


def frame_at(w: WorldSheet, s: float, t: float) -> FrameData:
    """
    Marco adaptado {Γ, b, n, t} y curvaturas en (s, t).

    Raises:
        DegenerateFrame
    """
    return frame_field(w, float(s), float(t)).at(0)


def frames_on_curve(w: WorldSheet, t: float, s_values,
                    degenerate_tol: Optional[float] = None) -> FrameField:
    """Marcos a lo largo de la curva momentánea t, continuos en s"""
    campo = frame_field(w, np.asarray(s_values, dtype=float), float(t), degenerate_tol)
    campo.enforce_continuity()
    return campo


# ============================================================================
# RESIDUOS Y RUTAS INDEPENDIENTES
# ============================================================================

def frenet_residuals(campo: FrameField) -> np.ndarray:
    """
    Normas euclídeas de los residuos de las cuatro ecuaciones de Frenet-Serret.

    Returns:
        arreglo (n, 4): Γ_s, t_s, b_s, n_s
    """
    gamma, t, n, b = campo.gamma, campo.tvec, campo.nvec, campo.bvec
    kg = campo.kappa_g[:, None]
    kn = campo.kappa_n[:, None]
    tg = campo.tau_g[:, None]

    r_gamma = campo.gamma_jet[1] - t
    r_t = campo.tvec_jet[1] - (gamma - kg * b + kn * n)
    r_b = campo.bvec_jet[1] - (-kg * t + tg * n)
    r_n = campo.nvec_jet[1] - (-kn * t + tg * b)
    return np.stack([np.linalg.norm(r, axis=-1) for r in (r_gamma, r_t, r_b, r_n)], axis=-1)


def frenet_residual(w: WorldSheet, s: float, t: float) -> Tuple[float, float, float, float]:
    """Residuos (Γ_s, t_s, b_s, n_s) en un punto"""
    r = frenet_residuals(frame_field(w, float(s), float(t)))[0]
    return tuple(float(x) for x in r)


def curvatures_by_projection(w: WorldSheet, s: float, t: float) -> Tuple[float, float, float]:
    """
    (κ_g, κ_n, τ_g) resolviendo t_s y b_s en la base {Γ, b, n, t}.

    No usa los productos internos que definen las curvaturas.
    """
    f = frame_at(w, s, t)
    base = np.column_stack([f.gamma, f.bvec, f.nvec, f.tvec])
    coef_t = np.linalg.solve(base, f.dtvec)
    coef_b = np.linalg.solve(base, f.dbvec)
    return float(-coef_t[1]), float(coef_t[2]), float(coef_b[2])


# ============================================================================
# INVARIANTE σ±
# ============================================================================

Marco = Union[FrameData, FrameField]


def sigma_from_frame(f: Marco, sign: SignChoice):
    """σ± = (κ_n ± κ_g)τ_g ∓ (κ_n' ± κ_g')"""
    e = sign.epsilon
    return (f.kappa_n + e * f.kappa_g) * f.tau_g - e * (f.dkappa_n + e * f.dkappa_g)


def dsigma_from_frame(f: Marco, sign: SignChoice):
    e = sign.epsilon
    return ((f.dkappa_n + e * f.dkappa_g) * f.tau_g
            + (f.kappa_n + e * f.kappa_g) * f.dtau_g
            - e * (f.d2kappa_n + e * f.d2kappa_g))
