# -*- coding: utf-8 -*-
"""
Estados ideales con 2m fotones agregados o restados.

Los estados se construyen con los operadores de Susskind-Glogower:
    - Agregar:  [ i V^dagger^2 (-1)^n ]^m |psi>
    - Restar:   [ i V^2 (-1)^n ]^m |psi>, renormalizado por la masa que se pierde en |0>..|2m-1>

Además se incluyen:
    - Los operadores no lineales A_{+2m} y A_{-2m}, de los que los estados coherentes
      con fotones agregados/restados son autoestados.
    - El parámetro Q de Mandel medido y sus predicciones analíticas.

Signo del autovalor: numéricamente A_{±2m}|alpha_{±2m}> = (-1)^m alpha |alpha_{±2m}>.
La relación con -alpha se cumple para m impar; para m par el autovalor es +alpha.
``eigen_residual`` informa ambos residuos y el signo verificado.
"""

# %% 1. Importar librerías
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from errors import AllMassRemoved, LowComponentMass, NegativeArgumentWarning, ZeroMeanPhoton
from fock_core import (
    DEFAULT_TOLERANCES,
    FockVector,
    Tolerances,
    apply_annihilation,
    apply_lower,
    apply_parity,
    apply_raise,
    fock_distribution,
    make_coherent,
    mean_photon,
    photon_moment2,
)

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    """Agregar o restar fotones. También selecciona la rama de ``approx_error``."""

    ADD = "add"
    SUBTRACT = "subtract"

    @property
    def sign(self) -> int:
        return 1 if self is Mode.ADD else -1


def _revisar_normalizado(psi: FockVector, tol: Tolerances) -> None:
    if abs(psi.norm() - 1.0) > tol.norm_tol:
        raise ValueError(f"El estado base no esta normalizado (norma {psi.norm():.12f})")


def _revisar_m(m: int) -> None:
    if m < 0:
        raise ValueError(f"m debe ser >= 0, se recibio {m}")


# %% 2. Estados ideales
def add_photons_ideal(psi: FockVector, m: int, tol: Tolerances = DEFAULT_TOLERANCES) -> FockVector:
    """
    Estado con 2m fotones agregados, [i V^dagger^2 (-1)^n]^m |psi>.

    Es un desplazamiento puro de índices con fases: la distribución de Fock se
    corre 2m lugares sin cambiar de forma, y el resultado conserva la norma
    (salvo lo que se pierde por el borde, acotado por ``tail_tol``).
    """
    _revisar_m(m)
    _revisar_normalizado(psi, tol)
    out = psi
    for _ in range(m):
        out = apply_raise(apply_raise(apply_parity(out), tol), tol).scaled(1j)
    return out


def low_component_mass(psi: FockVector, m: int) -> float:
    """Masa en las componentes |0>, ..., |2m-1>: la que elimina la resta de 2m fotones."""
    _revisar_m(m)
    p = fock_distribution(psi)
    return float(np.sum(p[: min(2 * m, psi.dim)]))


def subtract_photons_ideal(
    psi: FockVector, m: int, tol: Tolerances = DEFAULT_TOLERANCES
) -> tuple[FockVector, float]:
    """
    Estado con 2m fotones restados y la masa baja que se descartó.

    Si la masa baja no supera ``low_mass_tol`` se devuelve [i V^2 (-1)^n]^m |psi> tal cual;
    en otro caso se renormaliza por 1/sqrt(1 - masa_baja).
    """
    _revisar_m(m)
    _revisar_normalizado(psi, tol)
    masa_baja = low_component_mass(psi, m)
    if masa_baja >= 1.0 - tol.norm_tol:
        raise AllMassRemoved(f"Restar {2 * m} fotones elimina toda la masa del estado (masa baja {masa_baja:.6f})")
    out = psi
    for _ in range(m):
        out = apply_lower(apply_lower(apply_parity(out))).scaled(1j)
    if masa_baja > tol.low_mass_tol:
        logger.debug("Renormalizando la resta: masa baja %.3e", masa_baja)
        out = out.scaled(1.0 / math.sqrt(1.0 - masa_baja))
    return out, masa_baja


@dataclass(frozen=True, eq=False)
class SgStateSpec:
    """Estado base, número de pasos de dos fotones y modo."""

    base: FockVector
    m: int
    mode: Mode

    def __post_init__(self):
        _revisar_m(self.m)
        object.__setattr__(self, "mode", Mode(self.mode))

    def low_mass(self) -> float:
        return low_component_mass(self.base, self.m) if self.mode is Mode.SUBTRACT else 0.0

    def needs_renormalization(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        return self.low_mass() > tol.low_mass_tol

    def build(self, tol: Tolerances = DEFAULT_TOLERANCES) -> FockVector:
        if self.mode is Mode.ADD:
            return add_photons_ideal(self.base, self.m, tol)
        estado, _ = subtract_photons_ideal(self.base, self.m, tol)
        return estado


def subtracted_mean_photon_predict(psi: FockVector, m: int) -> float:
    """
    Predicción impresa para el número medio de fotones del estado restado:
    (<n> - 2m + sum_{k<2m} |c_k|^2) / (1 - sum_{k<2m} |c_k|^2).

    Solo coincide con la media medida cuando la masa baja es despreciable;
    con componentes bajas presentes la media real hay que medirla con ``mean_photon``.
    """
    masa_baja = low_component_mass(psi, m)
    if masa_baja >= 1.0:
        raise AllMassRemoved("No queda masa despues de la resta")
    return (mean_photon(psi) - 2 * m + masa_baja) / (1.0 - masa_baja)


# %% 3. Operadores no lineales
def apply_A(
    state: FockVector, m: int, mode: Mode | str, tol: Tolerances = DEFAULT_TOLERANCES
) -> FockVector:
    """
    Operador no lineal sobre ``state`` (sin normalizar):
      - **add:** sqrt((n - 2m + 1)/(n + 1)) a
      - **subtract:** sqrt((n + 2m + 1)/(n + 1)) a

    El factor en n se aplica a la izquierda de a, es decir, después de bajar.
    Cuando el argumento de la raíz es negativo el factor se toma como 0; si alguna de
    esas componentes tenía amplitud apreciable se emite ``NegativeArgumentWarning``
    con la cantidad de componentes anuladas.
    """
    mode = Mode(mode)
    _revisar_m(m)
    bajado = apply_annihilation(state).amps
    n = np.arange(state.dim)
    argumento = (n - mode.sign * 2 * m + 1) / (n + 1)
    negativo = argumento < 0
    anuladas = int(np.count_nonzero(negativo & (np.abs(bajado) > tol.tail_tol)))
    if anuladas:
        warnings.warn(
            f"apply_A ({mode.value}, m={m}) anulo {anuladas} componentes con argumento negativo",
            NegativeArgumentWarning,
            stacklevel=2,
        )
    factor = np.sqrt(np.where(negativo, 0.0, argumento))
    return FockVector(factor * bajado)


@dataclass(frozen=True)
class EigenResidual:
    """Residuos ||A|psi> - lambda|psi>|| para lambda = -alpha y lambda = +alpha."""

    minus_alpha: float
    plus_alpha: float

    @property
    def best(self) -> float:
        return min(self.minus_alpha, self.plus_alpha)

    @property
    def verified_sign(self) -> int:
        return -1 if self.minus_alpha <= self.plus_alpha else 1


def expected_eigen_sign(m: int) -> int:
    return -1 if m % 2 else 1


def ideal_coherent_state(
    alpha: complex, m: int, mode: Mode | str, dim: int, tol: Tolerances = DEFAULT_TOLERANCES
) -> FockVector:
    """|alpha_{±2m}> sobre ``dim`` niveles."""
    spec = SgStateSpec(make_coherent(alpha, dim, tol), m, Mode(mode))
    if spec.needs_renormalization(tol):
        raise LowComponentMass(
            f"alpha={complex(alpha)} es chico para restar {2 * m} fotones (masa baja {spec.low_mass():.3e})"
        )
    return spec.build(tol)


def eigen_residual(
    alpha: complex, m: int, mode: Mode | str, dim: int, tol: Tolerances = DEFAULT_TOLERANCES
) -> EigenResidual:
    alpha = complex(alpha)
    estado = ideal_coherent_state(alpha, m, mode, dim, tol)
    imagen = apply_A(estado, m, mode, tol).amps
    residuos = EigenResidual(
        minus_alpha=float(np.linalg.norm(imagen + alpha * estado.amps)),
        plus_alpha=float(np.linalg.norm(imagen - alpha * estado.amps)),
    )
    logger.debug("Residuo de autovalor alpha=%s m=%d %s: %s", alpha, m, Mode(mode).value, residuos)
    return residuos


# %% 4. Estadística de fotones
def mandel_q(state) -> float:
    """Q = (<n^2> - <n>^2)/<n> - 1. Negativo: sub-Poisson; positivo: super-Poisson."""
    media = mean_photon(state)
    if media <= 0.0:
        raise ZeroMeanPhoton("El parametro Q de Mandel no esta definido con <n> = 0")
    return (photon_moment2(state) - media**2) / media - 1.0


def mandel_q_shift_predict(q_base: float, n_base: float, m: int, mode: Mode | str) -> float:
    """Q del estado desplazado a partir de Q y <n> del estado base (la forma de la distribución no cambia)."""
    signo = Mode(mode).sign
    denominador = n_base + signo * 2 * m
    if denominador == 0:
        raise ZeroMeanPhoton("El estado desplazado tendria <n> = 0")
    return n_base / denominador * q_base - signo * 2 * m / denominador


def mandel_q_coherent_predict(alpha: complex, m: int, mode: Mode | str) -> float:
    """Q(alpha_{±2m}) = -/+ 2m / (|alpha|^2 ± 2m)."""
    signo = Mode(mode).sign
    denominador = abs(alpha) ** 2 + signo * 2 * m
    if denominador == 0:
        raise ZeroMeanPhoton("El estado desplazado tendria <n> = 0")
    return -signo * 2 * m / denominador
