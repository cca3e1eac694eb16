"""Línea de comandos: configuración, códigos de salida y artefactos"""

import json
import time

import pytest

from configuracion import ConfigError, load_config, parse_config
from conftest import FIXTURES, HOPF_TEXTOS, PERTURBADO_TEXTOS
from main import EXIT_CONFIG, EXIT_OK, EXIT_VALIDACION, main, run


def _cfg(tmp_path, textos=HOPF_TEXTOS, arc_length="assume", grid="", extra="",
         nombre="hoja.cfg"):
    componentes = "\n".join(f"{k} = {v}" for k, v in zip(("x_m1", "x_0", "x_1", "x_2"), textos))
    texto = (
        "[worldsheet]\n"
        f"{componentes}\n"
        "s_min = 0\n"
        "s_max = 6.283185307179586\n"
        "t_min = -1\n"
        "t_max = 1\n"
        f"arc_length = {arc_length}\n"
        "\n[grid]\n"
        "n_s = 32\n"
        "n_t = 3\n"
        "n_mu = 16\n"
        "mu_min = 0.2\n"
        "mu_max = 1.2\n"
        f"{grid}"
        "\n[outputs]\n"
        f"directory = {tmp_path / 'salida'}\n"
        "formats = csv, json\n"
        f"{extra}"
    )
    ruta = tmp_path / nombre
    ruta.write_text(texto, encoding="utf-8")
    return ruta


def _leer_json(ruta):
    return json.loads(ruta.read_text(encoding="utf-8"))


# ----------------------------------------------------------------------------
# Configuración
# ----------------------------------------------------------------------------

def test_fixtures_se_leen(config_hopf, config_perturbado):
    hopf = load_config(config_hopf)
    assert hopf.grid.n_s == 128 and hopf.grid.n_t == 16
    assert hopf.arc_length.value == "assume"
    perturbado = load_config(config_perturbado)
    assert perturbado.arc_length.value == "reparametrize"
    assert list(hopf.to_dict()) == ["worldsheet", "grid", "tolerances", "outputs"]


def test_clave_desconocida_con_linea(tmp_path):
    texto = _cfg(tmp_path, grid="foo = 1\n").read_text(encoding="utf-8")
    with pytest.raises(ConfigError) as exc:
        parse_config(texto)
    assert (exc.value.section, exc.value.key) == ("grid", "foo")
    assert exc.value.line == texto.splitlines().index("foo = 1") + 1


def test_numero_invalido(tmp_path):
    texto = _cfg(tmp_path).read_text(encoding="utf-8").replace("n_mu = 16", "n_mu = dieciseis")
    with pytest.raises(ConfigError) as exc:
        parse_config(texto)
    assert exc.value.key == "n_mu"


def test_rango_vacio(tmp_path):
    texto = _cfg(tmp_path).read_text(encoding="utf-8").replace("s_min = 0", "s_min = 7")
    with pytest.raises(ConfigError) as exc:
        parse_config(texto)
    assert exc.value.key == "s_max"


def test_variable_desconocida(tmp_path):
    ruta = _cfg(tmp_path, textos=["sqrt(2)*cos(t)", "sqrt(2)*sin(t)", "cos(q)", "sin(s)"])
    with pytest.raises(ConfigError) as exc:
        load_config(ruta)
    assert exc.value.key == "x_1"
    assert run("validate", ruta) == EXIT_CONFIG


def test_archivo_inexistente(tmp_path):
    assert run("validate", tmp_path / "no_existe.cfg") == EXIT_CONFIG


# ----------------------------------------------------------------------------
# Códigos de salida
# ----------------------------------------------------------------------------

def test_validate_hopf(tmp_path):
    assert run("validate", _cfg(tmp_path), threads=1) == EXIT_OK
    datos = _leer_json(tmp_path / "salida" / "validate.json")
    assert list(datos)[0] == "effective_config"
    assert datos["validation"]["passed"] is True
    assert all(c["residual"] <= 1e-10 for c in datos["validation"]["checks"])


def test_validacion_fallida(tmp_path):
    ruta = _cfg(tmp_path, textos=PERTURBADO_TEXTOS, arc_length="assume")
    assert run("classify", ruta, threads=1) == EXIT_VALIDACION
    datos = _leer_json(tmp_path / "salida" / "classify.json")
    assert datos["validation"]["passed"] is False
    fallos = [c for c in datos["validation"]["checks"] if not c["passed"]]
    assert fallos[0]["failure_kind"] == "arclength_assumption_violated"


def test_t_fuera_de_rango(tmp_path):
    assert run("frames", _cfg(tmp_path), t=5.0) == EXIT_CONFIG


def test_formato_desconocido(tmp_path):
    assert main(["frames", str(_cfg(tmp_path)), "--format", "xml", "--quiet"]) == EXIT_CONFIG


def test_hilos_invalidos(tmp_path):
    assert main(["frames", str(_cfg(tmp_path)), "--threads", "0", "--quiet"]) == EXIT_CONFIG


# ----------------------------------------------------------------------------
# Artefactos
# ----------------------------------------------------------------------------

def test_classify_hopf(tmp_path):
    assert run("classify", _cfg(tmp_path), threads=1, t=0.0) == EXIT_OK
    datos = _leer_json(tmp_path / "salida" / "classify.json")
    assert [r["sign"] for r in datos["slices"]] == ["plus", "minus"]
    assert all(r["class"] == "ConstantFocal" for r in datos["slices"])


def test_frames_csv(tmp_path):
    salida = tmp_path / "marcos"
    codigo = main(["frames", str(_cfg(tmp_path)), "--out", str(salida), "--format", "csv",
                   "--t", "0", "--quiet"])
    assert codigo == EXIT_OK
    lineas = (salida / "frames.csv").read_text(encoding="utf-8").splitlines()
    assert lineas[0].startswith("s,t,gamma_m1,gamma_0,gamma_1,gamma_2,b_m1")
    assert len(lineas) == 1 + 32
    assert not (salida / "frames.json").exists()


def test_front_obj(tmp_path):
    codigo = run("front", _cfg(tmp_path), threads=1, sign="plus", t=0.0, formats=("obj",))
    assert codigo == EXIT_OK
    texto = (tmp_path / "salida" / "front.obj").read_text(encoding="utf-8")
    assert texto.startswith("o front_plus_t0\nv ")
    assert texto.count("\nv ") == 32 * 16
    assert texto.count("\nf ") == 31 * 15


def test_corridas_deterministas(tmp_path):
    ruta = _cfg(tmp_path)
    salida = tmp_path / "salida"
    contenidos = []
    for hilos in (1, 3):
        assert run("maxwell", ruta, threads=hilos) == EXIT_OK
        contenidos.append(((salida / "maxwell.csv").read_bytes(),
                           (salida / "maxwell.json").read_bytes()))
    assert contenidos[0] == contenidos[1]
    assert contenidos[0][0].count(b"FocalConcentration") > 0


def test_reporte_con_figuras(tmp_path):
    ruta = _cfg(tmp_path, extra="figures = true\n")
    assert run("report", ruta, threads=1, t=0.0) == EXIT_OK
    salida = tmp_path / "salida"
    datos = _leer_json(salida / "report.json")
    assert datos["null_vectors_null"] is True
    assert datos["caustic"]["samples"] == 2 * 32
    assert datos["caustic"]["rejected"] == 0
    assert datos["residual_max"]["frenet"] <= 1e-9
    assert set(datos["maxwell"]["by_kind"]) <= {"FocalConcentration"}
    assert (salida / "sigma.png").read_bytes()[:4] == b"\x89PNG"
    assert (salida / "caustic.png").exists()


def test_reporte_incluye_singularidades_completas(tmp_path):
    assert run("report", _cfg(tmp_path), threads=1, t=0.0) == EXIT_OK
    datos = _leer_json(tmp_path / "salida" / "report.json")
    rebanadas = datos["singularities"]
    assert [(r["t"], r["sign"]) for r in rebanadas] == [(0.0, "plus"), (0.0, "minus")]
    for r in rebanadas:
        assert list(r) == ["t", "sign", "entries", "class", "counts"]
        assert r["class"] == "ConstantFocal"
        assert sum(r["counts"].values()) == len(r["entries"]) > 0
        for e in r["entries"]:
            assert list(e) == ["s", "class", "sigma", "dsigma", "residuals", "focal_germ"]
            assert list(e["residuals"]) == ["h", "h_s", "h_ss", "h_sss",
                                            "ell_prime_norm", "ell_pp_angle"]


# ----------------------------------------------------------------------------
# Errores durante la evaluación
# ----------------------------------------------------------------------------

def test_dominio_invalido_en_validate_es_fallo_de_validacion(tmp_path):
    ruta = _cfg(tmp_path, textos=["sqrt(2)*cos(t)", "sqrt(2)*sin(t)", "log(s - 3)", "sin(s)"])
    load_config(ruta)
    assert run("validate", ruta, threads=1) == EXIT_VALIDACION
    datos = _leer_json(tmp_path / "salida" / "validate.json")
    assert datos["validation"]["passed"] is False
    assert datos["validation"]["error"]["kind"] == "DomainError"
    assert datos["effective_config"]["worldsheet"]["x_1"] == "log(s - 3)"


@pytest.mark.parametrize("comando", ["classify", "caustic", "maxwell"])
def test_umbral_de_degeneracion_configurado_llega_a_los_marcos(tmp_path, comando):
    estricta = _cfg(tmp_path, extra="\n[tolerances]\ndegenerate_tol = 1e6\n", nombre="estricta.cfg")
    assert load_config(estricta).tolerances.degenerate_tol == 1e6
    assert run(comando, estricta, threads=1, t=0.0) == EXIT_VALIDACION
    assert run(comando, _cfg(tmp_path), threads=1, t=0.0) == EXIT_OK


# ----------------------------------------------------------------------------
# Escala de aceptación
# ----------------------------------------------------------------------------

@pytest.mark.slow
def test_reporte_perturbado_a_escala_completa(tmp_path):
    texto = (FIXTURES / "perturbed_torus.cfg").read_text(encoding="utf-8")
    texto = (texto.replace("n_s = 128", "n_s = 256").replace("n_t = 16", "n_t = 64")
             .replace("n_mu = 64", "n_mu = 128")
             .replace("directory = salidas/perturbed_torus", f"directory = {tmp_path / 'salida'}"))
    ruta = tmp_path / "perturbado_completo.cfg"
    ruta.write_text(texto, encoding="utf-8")
    config = load_config(ruta)
    assert (config.grid.n_s, config.grid.n_t, config.grid.n_mu) == (256, 64, 128)

    salida = tmp_path / "salida"
    corridas = []
    for _ in range(2):
        inicio = time.perf_counter()
        assert run("report", ruta, threads=1) == EXIT_OK
        assert time.perf_counter() - inicio <= 60.0
        corridas.append({p.name: p.read_bytes() for p in sorted(salida.iterdir())})
    assert corridas[0] == corridas[1]
    assert "report.json" in corridas[0]
    datos = json.loads(corridas[0]["report.json"])
    assert datos["validation"]["passed"] is True
    assert len(datos["singularities"]) == 2 * 64
