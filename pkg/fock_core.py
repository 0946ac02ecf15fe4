# -*- coding: utf-8 -*-
"""
Espacio de Fock truncado para un modo del campo cuantizado.

El módulo reúne lo que usan todos los demás:
    1. Tolerancias numéricas de la simulación.
    2. Tipos de estado: vector de Fock, matriz densidad y estado conjunto qubit-campo.
    3. Política de dimensionamiento y construcción de estados coherentes.
    4. Operadores elementales (escalera, Susskind-Glogower, paridad, número),
       aplicados como desplazamientos de índice y escalamientos, nunca como matrices densas.
    5. Métricas: distribución de Fock, momentos del número de fotones y fidelidad.

Todos los valores son inmutables (los arreglos se marcan como de solo lectura)
y cada operación devuelve un objeto nuevo.
Los constructores normalizan; las aplicaciones de operadores NO normalizan.
"""

# %% 1. Importar librerías
from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np
from scipy import linalg, stats
from scipy.special import gammaln

from errors import DimensionMismatch, TruncationTooSmall

logger = logging.getLogger(__name__)


# %% 2. Tolerancias
@dataclass(frozen=True)
class Tolerances:
    """
    Tolerancias numéricas usadas en toda la simulación.

    - **norm_tol:** desviación admitida de la norma (o traza) respecto de 1.
    - **herm_tol:** defecto de hermiticidad admitido.
    - **psd_tol:** autovalor más negativo admitido (solo en modo de verificación).
    - **tail_tol:** masa que se puede perder por el borde superior del espacio truncado.
    - **low_mass_tol:** bajo este valor de masa en las componentes bajas se usa la resta sin renormalizar.
    """

    norm_tol: float = 1e-10
    herm_tol: float = 1e-10
    psd_tol: float = 1e-8
    tail_tol: float = 1e-10
    low_mass_tol: float = 1e-12

    def __post_init__(self):
        for campo in fields(self):
            valor = getattr(self, campo.name)
            if not math.isfinite(valor) or valor < 0:
                raise ValueError(f"Tolerancia {campo.name} invalida: {valor}")

    @classmethod
    def from_dict(cls, data: dict | None) -> Tolerances:
        """Construye tolerancias a partir de un diccionario parcial de sobreescrituras."""
        if not data:
            return cls()
        nombres = {campo.name for campo in fields(cls)}
        desconocidas = sorted(set(data) - nombres)
        if desconocidas:
            raise ValueError(f"Tolerancias desconocidas: {', '.join(desconocidas)}")
        return cls(**{nombre: float(valor) for nombre, valor in data.items()})


DEFAULT_TOLERANCES = Tolerances()


# %% 3. Tipos de estado
def _solo_lectura(arr) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FockVector:
    """Estado puro del campo: amplitudes c_j sobre |0>, ..., |N-1>."""

    amps: np.ndarray

    def __post_init__(self):
        amps = _solo_lectura(self.amps)
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("Un FockVector necesita un arreglo unidimensional con al menos una amplitud")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps, normalize: bool = True) -> FockVector:
        psi = cls(amps)
        return psi.normalized() if normalize else psi

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> FockVector:
        norma = self.norm()
        if norma == 0.0:
            raise ValueError("No se puede normalizar el vector nulo")
        return FockVector(self.amps / norma)

    def scaled(self, factor: complex) -> FockVector:
        return FockVector(self.amps * factor)

    def overlap(self, other: FockVector) -> complex:
        """<self|other>."""
        if self.dim != other.dim:
            raise DimensionMismatch(f"Dimensiones distintas: {self.dim} y {other.dim}")
        return complex(np.vdot(self.amps, other.amps))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Estado del campo como matriz densidad N x N."""

    elems: np.ndarray

    def __post_init__(self):
        elems = _solo_lectura(self.elems)
        if elems.ndim != 2 or elems.shape[0] != elems.shape[1] or elems.shape[0] < 1:
            raise ValueError(f"Una DensityMatrix debe ser cuadrada, se recibio forma {elems.shape}")
        object.__setattr__(self, "elems", elems)

    @classmethod
    def from_pure(cls, psi: FockVector) -> DensityMatrix:
        return cls(np.outer(psi.amps, psi.amps.conj()))

    @property
    def dim(self) -> int:
        return self.elems.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.elems))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.elems - self.elems.conj().T)))

    def validate(self, tol: Tolerances = DEFAULT_TOLERANCES, check_psd: bool = False) -> DensityMatrix:
        """
        Verifica hermiticidad y traza unitaria.
        La positividad (autovalor mínimo >= -psd_tol) solo se revisa con ``check_psd=True``,
        porque exige una diagonalización completa.
        """
        defecto = self.hermiticity_defect()
        if defecto > tol.herm_tol:
            raise ValueError(f"Matriz densidad no hermitiana: defecto {defecto:.3e}")
        traza = self.trace()
        if abs(traza - 1.0) > tol.norm_tol:
            raise ValueError(f"Traza fuera de tolerancia: {traza}")
        if check_psd:
            minimo = float(linalg.eigvalsh(self.elems, subset_by_index=[0, 0])[0])
            if minimo < -tol.psd_tol:
                raise ValueError(f"Matriz densidad no positiva: autovalor minimo {minimo:.3e}")
        return self


@dataclass(frozen=True, eq=False)
class QubitFieldState:
    """
    Estado puro conjunto qubit-campo: amplitudes ligadas a |e> y a |g>.
    Ninguna de las dos partes está normalizada por separado; la norma conjunta vale 1.
    """

    e_amps: np.ndarray
    g_amps: np.ndarray

    def __post_init__(self):
        e_amps = _solo_lectura(self.e_amps)
        g_amps = _solo_lectura(self.g_amps)
        if e_amps.ndim != 1 or e_amps.shape != g_amps.shape:
            raise DimensionMismatch(f"Componentes incompatibles: {e_amps.shape} y {g_amps.shape}")
        object.__setattr__(self, "e_amps", e_amps)
        object.__setattr__(self, "g_amps", g_amps)

    @classmethod
    def excited(cls, psi: FockVector) -> QubitFieldState:
        """|psi, e>"""
        return cls(psi.amps, np.zeros(psi.dim, dtype=complex))

    @classmethod
    def ground(cls, psi: FockVector) -> QubitFieldState:
        """|psi, g>"""
        return cls(np.zeros(psi.dim, dtype=complex), psi.amps)

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> QubitFieldState:
        vector = np.asarray(vector)
        if vector.ndim != 1 or vector.size % 2:
            raise DimensionMismatch(f"El vector conjunto debe tener largo par, tiene {vector.size}")
        mitad = vector.size // 2
        return cls(vector[:mitad], vector[mitad:])

    @property
    def dim(self) -> int:
        return self.e_amps.size

    def as_vector(self) -> np.ndarray:
        # Orden de la base: primero el bloque |j, e>, luego |j, g>
        return np.concatenate([self.e_amps, self.g_amps])

    def joint_norm(self) -> float:
        return float(np.linalg.norm(self.as_vector()))

    def excited_population(self) -> float:
        return float(np.sum(np.abs(self.e_amps) ** 2))

    def e_component(self) -> FockVector:
        return FockVector(self.e_amps)

    def g_component(self) -> FockVector:
        return FockVector(self.g_amps)


def random_qubit_field_state(dim: int, rng: np.random.Generator) -> QubitFieldState:
    """
    Estado conjunto pseudoaleatorio normalizado.
    Las dos amplitudes más altas de la parte excitada se anulan: es la condición
    para que la evolución no empuje masa fuera del espacio truncado.
    """
    if dim < 3:
        raise ValueError("Se necesitan al menos 3 niveles de Fock")
    e_amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    g_amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    e_amps[-2:] = 0.0
    norma = math.sqrt(np.sum(np.abs(e_amps) ** 2) + np.sum(np.abs(g_amps) ** 2))
    return QubitFieldState(e_amps / norma, g_amps / norma)


# %% 4. Dimensionamiento y estados de referencia
def default_dimension(alpha: complex, m_max: int = 0) -> int:
    """
    Dimensión de truncamiento por defecto: N = ceil(|alpha|^2 + 8|alpha| + 2 m_max + 16).
    Cubre la campana de Poisson (media + 8 desviaciones) más la ganancia máxima de fotones.
    """
    r = abs(alpha)
    return int(math.ceil(r**2 + 8 * r + 2 * m_max + 16))


def coherent_tail_mass(alpha: complex, dim: int) -> float:
    """Masa de Poisson que queda fuera de los primeros ``dim`` niveles, calculada con la cola analítica."""
    media = abs(alpha) ** 2
    if media == 0.0:
        return 0.0
    return float(stats.poisson.sf(dim - 1, media))


def minimum_coherent_dimension(alpha: complex, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    media = abs(alpha) ** 2
    if media == 0.0:
        return 1
    return int(stats.poisson.isf(tol.tail_tol, media)) + 1


def minimum_raise_dimension(alpha: complex, shift: int, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """
    Dimensión mínima para subir ``shift`` niveles un estado coherente con V^dagger.
    ``apply_raise`` acota la amplitud del borde (no la masa), así que la cola de Poisson
    debe quedar bajo tail_tol^2 antes del desplazamiento.
    """
    cota = replace(tol, tail_tol=max(tol.tail_tol**2, sys.float_info.min))
    return minimum_coherent_dimension(alpha, cota) + shift


def vacuum(dim: int) -> FockVector:
    return fock_state(0, dim)


def fock_state(n: int, dim: int) -> FockVector:
    if dim < 1:
        raise ValueError("dim debe ser >= 1")
    if not 0 <= n < dim:
        raise TruncationTooSmall(f"El estado |{n}> no cabe en el espacio truncado", dim, n + 1)
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return FockVector(amps)


def make_coherent(alpha: complex, dim: int, tol: Tolerances = DEFAULT_TOLERANCES) -> FockVector:
    """
    Estado coherente truncado |alpha>, renormalizado sobre los ``dim`` niveles retenidos.

    Las amplitudes se evalúan en escala logarítmica (``gammaln``) para no desbordar j!
    con dimensiones grandes. Si la masa de la cola supera ``tail_tol`` se lanza
    ``TruncationTooSmall`` con la dimensión mínima sugerida.
    """
    if dim < 1:
        raise ValueError("dim debe ser >= 1")
    alpha = complex(alpha)
    cola = coherent_tail_mass(alpha, dim)
    if cola > tol.tail_tol:
        raise TruncationTooSmall(
            f"La cola del estado coherente alpha={alpha} pesa {cola:.3e}",
            dim,
            minimum_coherent_dimension(alpha, tol),
        )
    if alpha == 0:
        return vacuum(dim)
    j = np.arange(dim)
    log_modulo = -abs(alpha) ** 2 / 2 + j * math.log(abs(alpha)) - 0.5 * gammaln(j + 1)
    amps = np.exp(log_modulo) * np.exp(1j * j * np.angle(alpha))
    return FockVector.from_amplitudes(amps)


# %% 5. Operadores elementales
def apply_lower(psi: FockVector) -> FockVector:
    """
    Operador de Susskind-Glogower V: |n> -> |n-1>, con V|0> = 0.
    La componente de vacío se descarta; el resultado no se renormaliza.
    """
    out = np.zeros(psi.dim, dtype=complex)
    out[:-1] = psi.amps[1:]
    return FockVector(out)


def apply_raise(psi: FockVector, tol: Tolerances = DEFAULT_TOLERANCES) -> FockVector:
    """
    Operador V^dagger: |n> -> |n+1>.
    La amplitud del último nivel sale del espacio, por eso debe ser despreciable.
    """
    arriba = abs(psi.amps[-1])
    if arriba > tol.tail_tol:
        raise TruncationTooSmall(
            f"V^dagger empuja fuera del espacio una amplitud {arriba:.3e}",
            psi.dim,
            psi.dim + 1,
        )
    out = np.zeros(psi.dim, dtype=complex)
    out[1:] = psi.amps[:-1]
    return FockVector(out)


def _signos_paridad(dim: int) -> np.ndarray:
    return 1.0 - 2.0 * (np.arange(dim) % 2)


def apply_parity(psi: FockVector) -> FockVector:
    """(-1)^n: exacto, solo cambia signos."""
    return FockVector(psi.amps * _signos_paridad(psi.dim))


def apply_annihilation(psi: FockVector) -> FockVector:
    out = np.zeros(psi.dim, dtype=complex)
    out[:-1] = np.sqrt(np.arange(1, psi.dim)) * psi.amps[1:]
    return FockVector(out)


def apply_number(psi: FockVector) -> FockVector:
    return FockVector(np.arange(psi.dim) * psi.amps)


def apply_lower_dm(rho: DensityMatrix) -> DensityMatrix:
    """V rho V^dagger."""
    out = np.zeros_like(rho.elems)
    out[:-1, :-1] = rho.elems[1:, 1:]
    return DensityMatrix(out)


def apply_raise_dm(rho: DensityMatrix, tol: Tolerances = DEFAULT_TOLERANCES) -> DensityMatrix:
    """V^dagger rho V; la población del último nivel debe ser despreciable."""
    arriba = abs(rho.elems[-1, -1])
    if arriba > tol.tail_tol:
        raise TruncationTooSmall(
            f"V^dagger empuja fuera del espacio una poblacion {arriba:.3e}",
            rho.dim,
            rho.dim + 1,
        )
    out = np.zeros_like(rho.elems)
    out[1:, 1:] = rho.elems[:-1, :-1]
    return DensityMatrix(out)


def scale_dm(rho: DensityMatrix, diagonal: np.ndarray) -> DensityMatrix:
    """D rho D para un operador diagonal real D (p. ej. cos[Omega(n) t])."""
    diagonal = np.asarray(diagonal)
    return DensityMatrix(diagonal[:, None] * rho.elems * diagonal[None, :])


# %% 6. Métricas
def fock_distribution(state: FockVector | DensityMatrix) -> np.ndarray:
    """p_j = |c_j|^2 para un vector, o rho_jj para una matriz densidad."""
    if isinstance(state, FockVector):
        # Parte real e imaginaria por separado: el resultado no depende de la fase global
        return state.amps.real**2 + state.amps.imag**2
    if isinstance(state, DensityMatrix):
        return np.real(np.diag(state.elems)).copy()
    raise TypeError(f"Estado no soportado: {type(state).__name__}")


def mean_photon(state: FockVector | DensityMatrix) -> float:
    p = fock_distribution(state)
    return float(np.arange(p.size) @ p)


def photon_moment2(state: FockVector | DensityMatrix) -> float:
    p = fock_distribution(state)
    j = np.arange(p.size)
    return float((j * j) @ p)


def fidelity(rho: DensityMatrix, target: FockVector, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    F = Tr(rho |target><target|) = <target|rho|target>, recortada a [0, 1].
    """
    if rho.dim != target.dim:
        raise DimensionMismatch(f"rho tiene dimension {rho.dim} y el estado objetivo {target.dim}")
    valor = np.vdot(target.amps, rho.elems @ target.amps)
    if abs(valor.imag) > tol.herm_tol:
        logger.warning("Fidelidad con parte imaginaria %.3e: rho no es hermitiana", valor.imag)
    return float(min(1.0, max(0.0, valor.real)))
