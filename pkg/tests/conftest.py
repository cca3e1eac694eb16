"""Fixtures compartidas: las dos hojas de prueba validadas y mallas pequeñas"""

import math
from pathlib import Path

import numpy as np
import pytest

from worldsheet import ArcLengthMode, SampleGrid, WorldSheet, validate

RAIZ = Path(__file__).resolve().parent.parent
FIXTURES = RAIZ / "fixtures"

HOPF_TEXTOS = ["sqrt(2)*cos(t)", "sqrt(2)*sin(t)", "cos(s)", "sin(s)"]
PERTURBADO_TEXTOS = [
    "sqrt(1 + cos(s)^2 + 1.44*sin(s)^2)*cos(t)",
    "sqrt(1 + cos(s)^2 + 1.44*sin(s)^2)*sin(t)",
    "cos(s)",
    "1.2*sin(s)",
]
DOS_PI = 2.0 * math.pi
RAIZ2 = math.sqrt(2.0)


def _validada(w: WorldSheet, grid: SampleGrid) -> WorldSheet:
    reporte = validate(w, grid)
    assert reporte.passed, reporte.to_dict()
    return w.with_validation(reporte)


@pytest.fixture(scope="session")
def malla_chica():
    return SampleGrid(n_s=64, n_t=5, n_mu=32)


@pytest.fixture(scope="session")
def hopf(malla_chica):
    w = WorldSheet.from_texts(HOPF_TEXTOS, (0.0, DOS_PI), (-1.0, 1.0), ArcLengthMode.ASSUME)
    return _validada(w, malla_chica)


@pytest.fixture(scope="session")
def perturbado(malla_chica):
    w = WorldSheet.from_texts(PERTURBADO_TEXTOS, (0.0, DOS_PI), (-1.0, 1.0),
                              ArcLengthMode.REPARAMETRIZE)
    return _validada(w, malla_chica)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def config_hopf():
    return FIXTURES / "hopf_torus.cfg"


@pytest.fixture
def config_perturbado():
    return FIXTURES / "perturbed_torus.cfg"
