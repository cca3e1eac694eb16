"""
AdS-Fronts - Punto de entrada de línea de comandos
==================================================

PROPÓSITO:
----------
Cargar la configuración de una hoja de mundo, ejecutar un comando del
pipeline y escribir sus artefactos (CSV / OBJ / JSON) de forma determinista.

USO:
----
    python main.py <comando> <config.cfg> [--out DIR] [--threads N]
                   [--sign plus|minus|both] [--t VALOR] [--format csv,obj,json]
                   [--verbose | --quiet]

CÓDIGOS DE SALIDA:
------------------
    0  éxito
    1  la hoja no pasa la validación (ValidationFailure)
    2  configuración inválida (ConfigError o error de expresión)

VERSIÓN: 1.0
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import reportes
from caustic_maxwell import (CausticCloud, br_caustic, map_ordered, maxwell_momentary_detailed,
                             samples_dataframe)
from configuracion import ConfigError, RunConfig, load_config
from expr_dsl import EvaluationError, ExprError
from frames import FrameField, SignChoice, frames_on_curve, frenet_residuals
from fronts import BOTH_SIGNS, cloud_from_field, focal_curve_from_field
from pseudo_metric import AdSError, CausalType, causal_type, inner
from singularities import SingularityReport, singularity_report
from utils_formateo import escribir_csv, escribir_json, escribir_obj, nombre_objeto
from worldsheet import ValidationReport, WorldSheet, validate

logger = logging.getLogger(__name__)

# ============================================================================
# DEFINICIÓN DE COMANDOS
# ============================================================================

COMANDOS_DISPONIBLES = {
    "validate": {"icono": "✅", "descripcion": "Validar la hoja de mundo sobre la malla"},
    "frames": {"icono": "🧭", "descripcion": "Marco adaptado {Γ, b, n, t} por nodo"},
    "curvatures": {"icono": "📈", "descripcion": "κ_g, κ_n, τ_g, derivadas y σ±"},
    "front": {"icono": "🌊", "descripcion": "Nubes de los frentes luminosos momentáneos"},
    "focal": {"icono": "🎯", "descripcion": "Curvas focales por rebanada"},
    "caustic": {"icono": "✨", "descripcion": "BR-cáustica"},
    "maxwell": {"icono": "✂️", "descripcion": "BR-Maxwell (auto-intersecciones)"},
    "classify": {"icono": "🔍", "descripcion": "Clasificación de singularidades"},
    "report": {"icono": "📊", "descripcion": "Pipeline completo con resumen JSON"},
}

EXIT_OK = 0
EXIT_VALIDACION = 1
EXIT_CONFIG = 2


class ValidationFailure(AdSError):
    """La hoja no pasa la validación; lleva el reporte completo"""

    def __init__(self, report: ValidationReport):
        nombres = ", ".join(c.name for c in report.failures)
        super().__init__(f"La hoja no pasa la validación: {nombres}")
        self.report = report


# ============================================================================
# CONTEXTO DE EJECUCIÓN
# ============================================================================

@dataclass
class Contexto:
    config: RunConfig
    hoja: WorldSheet
    t_values: np.ndarray
    signos: Tuple[SignChoice, ...]
    threads: int
    salida: Path

    @property
    def formatos(self) -> Tuple[str, ...]:
        return self.config.outputs.formats

    @property
    def tol(self):
        return self.config.tolerances

    def base_json(self) -> dict:
        return {"effective_config": self.config.to_dict()}

    def campos(self) -> List[FrameField]:
        """Marcos de cada rebanada sobre la malla de s (en el orden de t_values)"""
        n_s = self.config.grid.n_s
        return map_ordered(
            lambda t: frames_on_curve(self.hoja, float(t), self.hoja.s_values(float(t), n_s)),
            self.t_values, self.threads)


def _signos(valor: str) -> Tuple[SignChoice, ...]:
    if valor == "both":
        return BOTH_SIGNS
    return (SignChoice(valor),)


def _validar(config: RunConfig) -> Tuple[WorldSheet, ValidationReport]:
    hoja = config.worldsheet()
    tol = config.tolerances
    reporte = validate(hoja, config.grid, tol.ads_tol, tol.spacelike_tol, tol.gram_tol,
                       tol.arclength_tol)
    return hoja.with_validation(reporte), reporte


# ============================================================================
# COMANDOS
# ============================================================================

def comando_validate(ctx: Contexto) -> dict:
    return {**ctx.base_json(), "validation": ctx.hoja.validation.to_dict()}


def comando_frames(ctx: Contexto) -> dict:
    campos = ctx.campos()
    if "csv" in ctx.formatos:
        escribir_csv(ctx.salida / "frames.csv",
                     pd.concat([c.to_dataframe() for c in campos], ignore_index=True))
    residuos = np.concatenate([frenet_residuals(c) for c in campos])
    return {**ctx.base_json(), "frenet_residual_max": float(np.max(residuos)),
            "nodes": int(residuos.shape[0])}


def comando_curvatures(ctx: Contexto) -> dict:
    campos = ctx.campos()
    if "csv" in ctx.formatos:
        escribir_csv(ctx.salida / "curvatures.csv",
                     pd.concat([c.curvatures_dataframe() for c in campos], ignore_index=True))
    return {**ctx.base_json(), "nodes": int(sum(len(c) for c in campos))}


def comando_front(ctx: Contexto) -> dict:
    mu = ctx.config.grid.mu_values()
    nubes = []
    for i, (t, campo) in enumerate(zip(ctx.t_values, ctx.campos())):
        for sign in ctx.signos:
            nubes.append((i, cloud_from_field(campo, float(t), sign, mu)))
    if "csv" in ctx.formatos:
        escribir_csv(ctx.salida / "front.csv",
                     pd.concat([n.to_dataframe() for _, n in nubes], ignore_index=True))
    if "obj" in ctx.formatos:
        escribir_obj(ctx.salida / "front.obj",
                     [(nombre_objeto(n.sign.value, i), n.points) for i, n in nubes])
    return {**ctx.base_json(), "clouds": len(nubes),
            "points": int(sum(n.points.shape[0] * n.points.shape[1] for _, n in nubes))}


def comando_focal(ctx: Contexto) -> dict:
    curvas = []
    for t, campo in zip(ctx.t_values, ctx.campos()):
        for sign in ctx.signos:
            curvas.append(focal_curve_from_field(campo, float(t), sign, ctx.tol.kappa_floor))
    if "csv" in ctx.formatos:
        escribir_csv(ctx.salida / "focal.csv",
                     pd.concat([c.to_dataframe() for c in curvas], ignore_index=True))
    return {
        **ctx.base_json(),
        "curves": [{"t": c.t, "sign": c.sign.value, "samples": len(c),
                    "gaps": [list(g) for g in c.gaps], "diameter": c.diameter()} for c in curvas],
    }


def _caustica(ctx: Contexto) -> CausticCloud:
    nube = br_caustic(ctx.hoja, ctx.config.grid, ctx.threads, ctx.tol.kappa_floor,
                      ctx.tol.residual_tol, ctx.t_values)
    if len(ctx.signos) == 1:
        nube.samples = [m for m in nube.samples if m.sign is ctx.signos[0]]
    return nube


def comando_caustic(ctx: Contexto) -> dict:
    nube = _caustica(ctx)
    if "csv" in ctx.formatos:
        escribir_csv(ctx.salida / "caustic.csv", nube.to_dataframe())
    return {**ctx.base_json(), "samples": len(nube), "rejected": nube.rejected,
            "gaps": [list(g) for g in nube.gaps]}


def _maxwell(ctx: Contexto, nube: Optional[CausticCloud] = None):
    focales_por_t = nube.points_by_slice() if nube is not None else {}

    def rebanada(t):
        focales = None
        if nube is not None:
            focales = focales_por_t.get(float(t), np.zeros((0, 4)))
        return maxwell_momentary_detailed(ctx.hoja, float(t), ctx.config.grid, focales,
                                          ctx.tol.preimage_sep, ctx.tol.kind_tol,
                                          ctx.tol.kappa_floor)
    resultados = map_ordered(rebanada, ctx.t_values, ctx.threads)
    muestras = [m for r, _ in resultados for m in r]
    estadisticas = [e.to_dict() for _, e in resultados]
    return muestras, estadisticas


def comando_maxwell(ctx: Contexto) -> dict:
    muestras, estadisticas = _maxwell(ctx)
    if "csv" in ctx.formatos:
        escribir_csv(ctx.salida / "maxwell.csv", samples_dataframe(muestras))
    return {**ctx.base_json(), "samples": len(muestras), "slices": estadisticas}


def _reportes_singularidades(ctx: Contexto) -> List[SingularityReport]:
    tol = ctx.tol
    tareas = [(float(t), sign) for t in ctx.t_values for sign in ctx.signos]
    return map_ordered(
        lambda tarea: singularity_report(ctx.hoja, tarea[0], tarea[1], ctx.config.grid.n_s,
                                         tol.swallowtail_tol, tol.dsigma_floor,
                                         tol.constant_focal_tol, tol.root_tol, tol.kappa_floor),
        tareas, ctx.threads)


def _resumen_clases(reporte: SingularityReport) -> dict:
    clases = {}
    for e in reporte.entries:
        clases[e.klass.value] = clases.get(e.klass.value, 0) + 1
    return dict(sorted(clases.items()))


def _clase_dominante(reporte: SingularityReport) -> Optional[str]:
    resumen = _resumen_clases(reporte)
    if not resumen:
        return None
    return max(sorted(resumen), key=lambda k: resumen[k])


def comando_classify(ctx: Contexto) -> dict:
    reportes_t = _reportes_singularidades(ctx)
    return {
        **ctx.base_json(),
        "slices": [{**r.to_dict(), "class": _clase_dominante(r), "counts": _resumen_clases(r)}
                   for r in reportes_t],
    }


def _maximo(valores) -> Optional[float]:
    valores = [v for v in valores if np.isfinite(v)]
    return max(valores) if valores else None


def comando_report(ctx: Contexto) -> dict:
    campos = ctx.campos()
    frenet = np.concatenate([frenet_residuals(c) for c in campos])
    nulidad = []
    for c in campos:
        for sign in ctx.signos:
            v = c.null_vector(sign)
            nulidad.append(float(np.max(np.abs(inner(v, v)))))
    nulos = all(causal_type(c.null_vector(sign)[i], ctx.tol.null_tol) is CausalType.NULL
                for c in campos for sign in ctx.signos for i in (0, len(c) // 2, len(c) - 1))

    reportes_t = _reportes_singularidades(ctx)
    nube = _caustica(ctx)
    muestras, estadisticas = _maxwell(ctx, nube)

    residuos_h = {}
    for clave in ("h", "h_s", "h_ss"):
        residuos_h[clave] = _maximo(e.residuals[clave] for r in reportes_t for e in r.entries)

    resumen = {
        **ctx.base_json(),
        "validation": ctx.hoja.validation.to_dict(),
        "singularities": [{**r.to_dict(), "class": _clase_dominante(r),
                           "counts": _resumen_clases(r)} for r in reportes_t],
        "caustic": {"samples": len(nube), "rejected": nube.rejected, "gaps": len(nube.gaps)},
        "maxwell": {"samples": len(muestras),
                    "by_kind": _por_tipo(muestras),
                    "candidates": int(sum(e["candidates"] for e in estadisticas)),
                    "converged": int(sum(e["converged"] for e in estadisticas))},
        "residual_max": {
            "frenet": float(np.max(frenet)),
            "nullity": _maximo(nulidad),
            "height": residuos_h,
            "caustic": _maximo(m.residual for m in nube.samples),
            "maxwell": _maximo(m.residual for m in muestras),
        },
        "null_vectors_null": bool(nulos),
    }

    if ctx.config.outputs.figures:
        _escribir_figuras(ctx, campos, nube, reportes_t)
    return resumen


def _por_tipo(muestras) -> Dict[str, int]:
    conteo = {}
    for m in muestras:
        conteo[m.kind.value] = conteo.get(m.kind.value, 0) + 1
    return dict(sorted(conteo.items()))


def _escribir_figuras(ctx: Contexto, campos: List[FrameField], nube: CausticCloud,
                      reportes_t: List[SingularityReport]):
    i = len(campos) // 2
    campo = campos[i]
    t = float(ctx.t_values[i])
    raices = {r.sign: [e.s for e in r.entries if e.klass.value == "Swallowtail"]
              for r in reportes_t if r.t == t}
    png = reportes.figura_sigma(campo.s, {sg: campo.sigma(sg) for sg in ctx.signos}, raices, t)
    if png is not None:
        (ctx.salida / "sigma.png").write_bytes(png)
    png = reportes.figura_caustica(nube)
    if png is not None:
        (ctx.salida / "caustic.png").write_bytes(png)


COMANDOS: Dict[str, Callable[[Contexto], dict]] = {
    "validate": comando_validate,
    "frames": comando_frames,
    "curvatures": comando_curvatures,
    "front": comando_front,
    "focal": comando_focal,
    "caustic": comando_caustic,
    "maxwell": comando_maxwell,
    "classify": comando_classify,
    "report": comando_report,
}

# validate, classify y report siempre producen JSON
SIEMPRE_JSON = ("validate", "classify", "report")


# ============================================================================
# EJECUCIÓN
# ============================================================================

def run(command: str, config_path, out: Optional[str] = None, threads: Optional[int] = None,
        sign: str = "both", t: Optional[float] = None,
        formats: Optional[Sequence[str]] = None) -> int:
    """
    Ejecuta un comando sobre el archivo de configuración.

    Returns:
        código de salida (0, 1 o 2)
    """
    if command not in COMANDOS:
        logger.error("❌ Comando desconocido: %s", command)
        return EXIT_CONFIG

    try:
        config = load_config(config_path).with_outputs(out, tuple(formats) if formats else None)
        if t is not None and not config.t_range[0] <= t <= config.t_range[1]:
            raise ConfigError(f"t = {t} fuera de [{config.t_range[0]}, {config.t_range[1]}]",
                              key="--t")
    except ConfigError as e:
        logger.error("❌ Configuración inválida: %s", e)
        return EXIT_CONFIG
    except ExprError as e:
        logger.error("❌ Expresión inválida: %s", e)
        return EXIT_CONFIG

    salida = Path(config.outputs.directory)
    salida.mkdir(parents=True, exist_ok=True)

    try:
        hoja, validacion = _validar(config)
    except EvaluationError as e:
        logger.error("❌ La hoja no se puede evaluar en la malla: %s", e)
        escribir_json(salida / f"{command}.json", {
            "effective_config": config.to_dict(),
            "validation": {"passed": False,
                           "error": {"kind": type(e).__name__, "message": str(e)}},
        })
        return EXIT_VALIDACION

    t_values = np.array([float(t)]) if t is not None else config.grid.t_values(config.t_range)
    ctx = Contexto(config, hoja, t_values, _signos(sign), threads or os.cpu_count() or 1, salida)

    try:
        if not validacion.passed:
            raise ValidationFailure(validacion)
        resultado = COMANDOS[command](ctx)
    except ValidationFailure as e:
        logger.error("❌ %s", e)
        escribir_json(salida / f"{command}.json",
                      {**ctx.base_json(), "validation": e.report.to_dict()})
        return EXIT_VALIDACION
    except AdSError as e:
        logger.error("❌ %s: %s", type(e).__name__, e)
        return EXIT_VALIDACION

    if command in SIEMPRE_JSON or "json" in config.outputs.formats:
        escribir_json(salida / f"{command}.json", resultado)
    info = COMANDOS_DISPONIBLES[command]
    logger.info("%s %s completado: artefactos en %s", info["icono"], command, salida)
    return EXIT_OK


def configurar_logging(verbose: bool = False, quiet: bool = False):
    nivel = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=nivel, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def construir_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adsfronts",
        description="Frentes luminosos, cáusticas y conjuntos de Maxwell de hojas de mundo en AdS³")
    parser.add_argument("command", choices=list(COMANDOS),
                        help="; ".join(f"{k}: {v['descripcion']}"
                                       for k, v in COMANDOS_DISPONIBLES.items()))
    parser.add_argument("config", help="archivo de configuración .cfg")
    parser.add_argument("--out", default=None, help="directorio de salida")
    parser.add_argument("--threads", type=int, default=None, help="hilos de trabajo")
    parser.add_argument("--sign", choices=("plus", "minus", "both"), default="both")
    parser.add_argument("--t", type=float, default=None, help="una sola rebanada t")
    parser.add_argument("--format", default=None,
                        help="lista separada por comas de csv, obj, json")
    grupo = parser.add_mutually_exclusive_group()
    grupo.add_argument("--verbose", action="store_true")
    grupo.add_argument("--quiet", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Función principal de la línea de comandos"""
    args = construir_parser().parse_args(argv)
    configurar_logging(args.verbose, args.quiet)
    formatos = None
    if args.format:
        formatos = tuple(f.strip().lower() for f in args.format.split(",") if f.strip())
        desconocidos = [f for f in formatos if f not in ("csv", "obj", "json")]
        if desconocidos:
            logger.error("❌ Formatos desconocidos: %s", ", ".join(desconocidos))
            return EXIT_CONFIG
    if args.threads is not None and args.threads < 1:
        logger.error("❌ --threads debe ser positivo")
        return EXIT_CONFIG
    return run(args.command, args.config, args.out, args.threads, args.sign, args.t, formatos)


if __name__ == "__main__":
    sys.exit(main())
