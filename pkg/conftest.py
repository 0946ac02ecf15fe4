# -*- coding: utf-8 -*-
"""Fixtures compartidas por las pruebas."""

import sys
from pathlib import Path

import numpy as np
import pytest

RAIZ = Path(__file__).resolve().parent
if str(RAIZ) not in sys.path:
    sys.path.insert(0, str(RAIZ))

from fock_core import make_coherent  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture(scope="session")
def coherent_5():
    return make_coherent(5.0, 250)


@pytest.fixture(scope="session")
def coherent_12():
    return make_coherent(12.0, 320)


@pytest.fixture(scope="session")
def experimentos_dir():
    return RAIZ / "data_experimentos"
