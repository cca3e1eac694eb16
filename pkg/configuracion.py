"""
AdS-Fronts - Configuración de Ejecución
=======================================

PROPÓSITO:
----------
Leer el archivo de configuración INI de una corrida, validar cada clave y
construir un RunConfig inmutable con los valores por defecto aplicados.

SECCIONES:
----------
[worldsheet]  x_m1, x_0, x_1, x_2, s_min, s_max, t_min, t_max, arc_length
[grid]        n_s, n_t, n_mu, mu_min, mu_max, hash_cell, refine_tol
[tolerances]  sobrescrituras opcionales de las constantes de los módulos
[outputs]     directory, formats, figures

Todo error se reporta como ConfigError con sección, clave y línea (1-based).

VERSIÓN: 1.0
"""

import configparser
import logging
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, Optional, Tuple

import caustic_maxwell
import fronts
import pseudo_metric
import singularities
import worldsheet
from expr_dsl import COMPONENT_KEYS, ExprError, ExprVector4
from worldsheet import ArcLengthMode, SampleGrid, WorldSheet

logger = logging.getLogger(__name__)

# ============================================================================
# CONSTANTES
# ============================================================================

SECCIONES = ("worldsheet", "grid", "tolerances", "outputs")

CLAVES_HOJA = COMPONENT_KEYS + ("s_min", "s_max", "t_min", "t_max", "arc_length")
CLAVES_MALLA = ("n_s", "n_t", "n_mu", "mu_min", "mu_max", "hash_cell", "refine_tol")
CLAVES_SALIDA = ("directory", "formats", "figures")
FORMATOS = ("csv", "obj", "json")


class ConfigError(pseudo_metric.AdSError):
    """Archivo de configuración mal formado; indica sección, clave y línea"""

    def __init__(self, mensaje: str, section: Optional[str] = None,
                 key: Optional[str] = None, line: Optional[int] = None):
        donde = []
        if section:
            donde.append(f"[{section}]")
        if key:
            donde.append(key)
        if line:
            donde.append(f"línea {line}")
        super().__init__(f"{' '.join(donde)}: {mensaje}" if donde else mensaje)
        self.section = section
        self.key = key
        self.line = line


# ============================================================================
# MODELOS DE DATOS
# ============================================================================

@dataclass(frozen=True)
class Tolerancias:
    """Constantes sobrescribibles, con el valor por defecto de su módulo"""
    null_tol: float = pseudo_metric.NULL_TOL
    ads_tol: float = worldsheet.ADS_TOL
    spacelike_tol: float = worldsheet.SPACELIKE_TOL
    gram_tol: float = worldsheet.GRAM_TOL
    arclength_tol: float = worldsheet.ARCLENGTH_TOL
    degenerate_tol: float = worldsheet.DEGENERATE_TOL
    kappa_floor: float = fronts.KAPPA_FLOOR
    swallowtail_tol: float = singularities.SWALLOWTAIL_TOL
    dsigma_floor: float = singularities.DSIGMA_FLOOR
    constant_focal_tol: float = singularities.CONSTANT_FOCAL_TOL
    root_tol: float = singularities.ROOT_TOL
    residual_tol: float = caustic_maxwell.RESIDUAL_TOL
    preimage_sep: float = caustic_maxwell.PREIMAGE_SEP
    kind_tol: float = caustic_maxwell.KIND_TOL
    reparam_nodes: int = worldsheet.REPARAM_NODES

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Salidas:
    directory: str = "salidas"
    formats: Tuple[str, ...] = ("csv", "json")
    figures: bool = False

    def to_dict(self) -> dict:
        return {"directory": self.directory, "formats": list(self.formats), "figures": self.figures}


@dataclass(frozen=True)
class RunConfig:
    texts: Dict[str, str]
    s_range: Tuple[float, float]
    t_range: Tuple[float, float]
    arc_length: ArcLengthMode
    grid: SampleGrid = field(default_factory=SampleGrid)
    tolerances: Tolerancias = field(default_factory=Tolerancias)
    outputs: Salidas = field(default_factory=Salidas)
    source: str = ""

    def worldsheet(self) -> WorldSheet:
        return WorldSheet.from_texts(self.texts, self.s_range, self.t_range, self.arc_length,
                                     reparam_nodes=self.tolerances.reparam_nodes,
                                     degenerate_tol=self.tolerances.degenerate_tol)

    def with_outputs(self, directory: Optional[str] = None,
                     formats: Optional[Tuple[str, ...]] = None) -> "RunConfig":
        salidas = Salidas(directory or self.outputs.directory,
                          tuple(formats) if formats else self.outputs.formats,
                          self.outputs.figures)
        return RunConfig(self.texts, self.s_range, self.t_range, self.arc_length, self.grid,
                         self.tolerances, salidas, self.source)

    def to_dict(self) -> dict:
        """Configuración efectiva, con los valores por defecto aplicados"""
        return {
            "worldsheet": {
                **{k: self.texts[k] for k in COMPONENT_KEYS},
                "s_min": self.s_range[0], "s_max": self.s_range[1],
                "t_min": self.t_range[0], "t_max": self.t_range[1],
                "arc_length": self.arc_length.value,
            },
            "grid": {
                "n_s": self.grid.n_s, "n_t": self.grid.n_t, "n_mu": self.grid.n_mu,
                "mu_min": self.grid.mu_range[0], "mu_max": self.grid.mu_range[1],
                "hash_cell": self.grid.hash_cell, "refine_tol": self.grid.refine_tol,
            },
            "tolerances": self.tolerances.to_dict(),
            "outputs": self.outputs.to_dict(),
        }


# ============================================================================
# LECTURA
# ============================================================================

def _indice_lineas(texto: str) -> Dict[Tuple[str, str], int]:
    """(sección, clave) → número de línea 1-based de su definición"""
    indice = {}
    seccion = None
    for n, linea in enumerate(texto.splitlines(), start=1):
        limpia = linea.strip()
        m = re.match(r"^\[([^\]]+)\]", limpia)
        if m:
            seccion = m.group(1).strip()
            indice[(seccion, "")] = n
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", limpia)
        if m and seccion is not None:
            indice.setdefault((seccion, m.group(1).strip().lower()), n)
    return indice


class _Lector:
    """Conversión de valores con diagnósticos de sección/clave/línea"""

    def __init__(self, parser: configparser.ConfigParser, lineas: Dict[Tuple[str, str], int]):
        self.parser = parser
        self.lineas = lineas

    def error(self, mensaje: str, seccion: str, clave: Optional[str] = None) -> ConfigError:
        return ConfigError(mensaje, seccion, clave, self.lineas.get((seccion, clave or "")))

    def tiene(self, seccion: str, clave: str) -> bool:
        return self.parser.has_option(seccion, clave)

    def texto(self, seccion: str, clave: str, defecto: Optional[str] = None) -> str:
        if not self.tiene(seccion, clave):
            if defecto is None:
                raise self.error("clave obligatoria ausente", seccion, clave)
            return defecto
        return self.parser.get(seccion, clave).strip()

    def real(self, seccion: str, clave: str, defecto: Optional[float] = None) -> float:
        if not self.tiene(seccion, clave):
            if defecto is None:
                raise self.error("clave obligatoria ausente", seccion, clave)
            return float(defecto)
        crudo = self.parser.get(seccion, clave).strip()
        try:
            valor = float(crudo)
        except ValueError:
            raise self.error(f"número inválido '{crudo}'", seccion, clave) from None
        if valor != valor or valor in (float("inf"), float("-inf")):
            raise self.error(f"número no finito '{crudo}'", seccion, clave)
        return valor

    def entero(self, seccion: str, clave: str, defecto: int) -> int:
        if not self.tiene(seccion, clave):
            return defecto
        crudo = self.parser.get(seccion, clave).strip()
        try:
            return int(crudo)
        except ValueError:
            raise self.error(f"entero inválido '{crudo}'", seccion, clave) from None

    def booleano(self, seccion: str, clave: str, defecto: bool) -> bool:
        if not self.tiene(seccion, clave):
            return defecto
        try:
            return self.parser.getboolean(seccion, clave)
        except ValueError:
            raise self.error("booleano inválido", seccion, clave) from None


def _chequear_claves(lector: _Lector):
    permitidas = {
        "worldsheet": set(CLAVES_HOJA),
        "grid": set(CLAVES_MALLA),
        "tolerances": {f.name for f in fields(Tolerancias)},
        "outputs": set(CLAVES_SALIDA),
    }
    for seccion in lector.parser.sections():
        if seccion not in permitidas:
            raise lector.error("sección desconocida", seccion)
        for clave in lector.parser.options(seccion):
            if clave not in permitidas[seccion]:
                raise lector.error("clave desconocida", seccion, clave)
    if not lector.parser.has_section("worldsheet"):
        raise ConfigError("falta la sección obligatoria", "worldsheet")


def _leer_hoja(lector: _Lector):
    textos = {k: lector.texto("worldsheet", k) for k in COMPONENT_KEYS}
    try:
        ExprVector4.parse(textos)
    except ExprError as e:
        clave = getattr(e, "key", None)
        raise lector.error(f"{type(e).__name__}: {e}", "worldsheet", clave) from e

    s_range = (lector.real("worldsheet", "s_min"), lector.real("worldsheet", "s_max"))
    if not s_range[0] < s_range[1]:
        raise lector.error(f"rango de s vacío {s_range}", "worldsheet", "s_max")
    t_range = (lector.real("worldsheet", "t_min"), lector.real("worldsheet", "t_max"))
    if not t_range[0] <= t_range[1]:
        raise lector.error(f"rango de t vacío {t_range}", "worldsheet", "t_max")

    modo = lector.texto("worldsheet", "arc_length", ArcLengthMode.ASSUME.value).lower()
    try:
        arc_length = ArcLengthMode(modo)
    except ValueError:
        raise lector.error(f"modo desconocido '{modo}' (assume|reparametrize|reject)",
                           "worldsheet", "arc_length") from None
    return textos, s_range, t_range, arc_length


def _leer_malla(lector: _Lector) -> SampleGrid:
    defecto = SampleGrid()
    valores = dict(
        n_s=lector.entero("grid", "n_s", defecto.n_s),
        n_t=lector.entero("grid", "n_t", defecto.n_t),
        n_mu=lector.entero("grid", "n_mu", defecto.n_mu),
        mu_range=(lector.real("grid", "mu_min", defecto.mu_range[0]),
                  lector.real("grid", "mu_max", defecto.mu_range[1])),
        hash_cell=lector.real("grid", "hash_cell", defecto.hash_cell),
        refine_tol=lector.real("grid", "refine_tol", defecto.refine_tol),
    )
    try:
        return SampleGrid(**valores)
    except ValueError as e:
        raise lector.error(str(e), "grid") from e


def _leer_tolerancias(lector: _Lector) -> Tolerancias:
    defecto = Tolerancias()
    valores = {}
    for f in fields(Tolerancias):
        if f.type is int or f.name == "reparam_nodes":
            valores[f.name] = lector.entero("tolerances", f.name, getattr(defecto, f.name))
        else:
            valor = lector.real("tolerances", f.name, getattr(defecto, f.name))
            if valor <= 0:
                raise lector.error("la tolerancia debe ser positiva", "tolerances", f.name)
            valores[f.name] = valor
    if valores["reparam_nodes"] < 4:
        raise lector.error("debe ser al menos 4", "tolerances", "reparam_nodes")
    return Tolerancias(**valores)


def _leer_salidas(lector: _Lector) -> Salidas:
    defecto = Salidas()
    directorio = lector.texto("outputs", "directory", defecto.directory)
    crudo = lector.texto("outputs", "formats", ",".join(defecto.formats))
    formatos = tuple(f.strip().lower() for f in crudo.split(",") if f.strip())
    for f in formatos:
        if f not in FORMATOS:
            raise lector.error(f"formato desconocido '{f}'", "outputs", "formats")
    return Salidas(directorio, formatos, lector.booleano("outputs", "figures", defecto.figures))


def parse_config(texto: str, source: str = "<texto>") -> RunConfig:
    """
    Construye el RunConfig a partir del contenido del archivo.

    Raises:
        ConfigError
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(texto, source=source)
    except configparser.Error as e:
        linea = getattr(e, "lineno", None)
        raise ConfigError(f"sintaxis inválida: {e.message}", line=linea) from e

    lector = _Lector(parser, _indice_lineas(texto))
    _chequear_claves(lector)
    textos, s_range, t_range, arc_length = _leer_hoja(lector)
    config = RunConfig(textos, s_range, t_range, arc_length,
                       _leer_malla(lector), _leer_tolerancias(lector), _leer_salidas(lector), source)
    logger.debug("🔍 Configuración leída de %s", source)
    return config


def load_config(path) -> RunConfig:
    """
    Lee y valida el archivo de configuración.

    Raises:
        ConfigError: archivo ilegible o mal formado
    """
    ruta = Path(path)
    try:
        texto = ruta.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"no se puede leer {ruta}: {e.strerror}") from e
    return parse_config(texto, str(ruta))
