"""
AdS-Fronts - Figuras Estáticas
==============================

PROPÓSITO:
----------
Generar figuras PNG (backend Agg) para el reporte: el invariante σ± a lo
largo de una rebanada con sus raíces, y la BR-cáustica proyectada.

FUNCIONALIDADES:
----------------
1. figura_sigma: σ+ y σ- contra s, raíces marcadas
2. figura_caustica: muestras focales en la carta (x_1/x_m1, x_2/x_m1)
   coloreadas por t, una columna por rama

VERSIÓN: 1.0
"""

import io
import logging
from typing import Dict, Optional, Sequence

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from caustic_maxwell import CausticCloud
from frames import SignChoice

logger = logging.getLogger(__name__)

COLORES = {SignChoice.PLUS: "#3b82f6", SignChoice.MINUS: "#ef4444"}

# Sin metadatos variables: dos corridas producen los mismos bytes
METADATOS_PNG = {"Software": None}


def _a_png(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=120, bbox_inches="tight", facecolor="white",
                metadata=METADATOS_PNG)
    plt.close(fig)
    return buf.getvalue()


def figura_sigma(s_values: np.ndarray, sigmas: Dict[SignChoice, np.ndarray],
                 raices: Optional[Dict[SignChoice, Sequence[float]]] = None,
                 t: float = 0.0) -> Optional[bytes]:
    """
    σ± contra s en la rebanada t.

    Returns:
        bytes PNG, o None si la figura no pudo generarse
    """
    try:
        fig, ax = plt.subplots(figsize=(6.0, 3.0))
        for sign, valores in sigmas.items():
            ax.plot(s_values, valores, color=COLORES[sign], linewidth=1.0,
                    label=f"σ{sign.symbol}")
            for r in (raices or {}).get(sign, []):
                ax.plot([r], [0.0], "o", color=COLORES[sign], markersize=3)
        ax.axhline(0.0, color="k", linewidth=0.5, alpha=0.5)
        ax.set_xlabel("s", fontsize=8)
        ax.set_ylabel("σ", fontsize=8)
        ax.set_title(f"Invariante σ± en t = {t:.4g}", fontsize=9, fontweight="bold")
        ax.grid(True, alpha=0.2, linestyle="--", linewidth=0.4)
        ax.legend(fontsize=7)
        ax.tick_params(labelsize=7)
        fig.tight_layout(pad=0.3)
        return _a_png(fig)
    except Exception as e:
        logger.error("❌ Error generando figura de σ: %s", e)
        plt.close("all")
        return None


def figura_caustica(nube: CausticCloud) -> Optional[bytes]:
    """BR-cáustica en la carta afín x_m1 ≠ 0, una columna por rama"""
    try:
        fig, ejes = plt.subplots(1, 2, figsize=(7.0, 3.4))
        for ax, sign in zip(ejes, (SignChoice.PLUS, SignChoice.MINUS)):
            muestras = [m for m in nube.samples if m.sign is sign and abs(m.point[0]) > 1e-6]
            if muestras:
                p = np.stack([m.point for m in muestras])
                t = np.array([m.t for m in muestras])
                dispersion = ax.scatter(p[:, 2] / p[:, 0], p[:, 3] / p[:, 0], c=t, s=2,
                                        cmap="viridis")
                fig.colorbar(dispersion, ax=ax, label="t")
            ax.set_title(f"Rama {sign.value}", fontsize=9, fontweight="bold")
            ax.set_xlabel("x_1 / x_m1", fontsize=8)
            ax.set_ylabel("x_2 / x_m1", fontsize=8)
            ax.set_aspect("equal", adjustable="datalim")
            ax.tick_params(labelsize=7)
        fig.tight_layout(pad=0.3)
        return _a_png(fig)
    except Exception as e:
        logger.error("❌ Error generando figura de la cáustica: %s", e)
        plt.close("all")
        return None
