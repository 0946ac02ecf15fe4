# -*- coding: utf-8 -*-
"""
Dinámica del modelo de Jaynes-Cummings de dos fotones en resonancia.

Contenido:
    1. Parámetros y frecuencia de Rabi Omega(n) = g sqrt((n+2)(n+1)).
    2. Propagador en forma cerrada (imagen de interacción) y oráculo por diagonalización densa
       del hamiltoniano g (a^2 sigma_+ + a^dagger^2 sigma_-).
    3. Pasadas con gt = pi como mapas exactos sobre la matriz densidad reducida del campo.
    4. Protocolo de m repeticiones con la fidelidad respecto del estado ideal en cada paso.
    5. Error de la aproximación lineal de la frecuencia de Rabi.

Todo trabaja en la imagen de interacción: no hay fases de evolución libre.
"""

# %% 1. Importar librerías
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg

from errors import DiagonalizationFailure, DimensionMismatch, TruncationTooSmall, TruncationWarning, ZeroMeanPhoton
from fock_core import (
    DEFAULT_TOLERANCES,
    DensityMatrix,
    FockVector,
    QubitFieldState,
    Tolerances,
    apply_lower_dm,
    apply_raise_dm,
    fidelity,
    fock_distribution,
    mean_photon,
    scale_dm,
)
from sg_states import Mode, SgStateSpec, mandel_q, mandel_q_shift_predict

logger = logging.getLogger(__name__)


# %% 2. Parámetros y frecuencia de Rabi
@dataclass(frozen=True)
class TpjcParams:
    """Acoplamiento g (1/tiempo) y tiempo de evolución t. En resonancia omega y omega_0 no aparecen."""

    g: float = 1.0
    t: float = math.pi

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"g debe ser positivo, se recibio {self.g}")
        if not self.t >= 0:
            raise ValueError(f"t debe ser >= 0, se recibio {self.t}")

    @classmethod
    def at_gt(cls, gt: float, g: float = 1.0) -> TpjcParams:
        return cls(g=g, t=gt / g)


@dataclass(frozen=True)
class RabiFrequency:
    g: float

    def __call__(self, n) -> np.ndarray:
        """Omega(n) = g sqrt((n+2)(n+1))."""
        n = np.asarray(n, dtype=float)
        return self.g * np.sqrt((n + 2) * (n + 1))

    def shifted(self, n) -> np.ndarray:
        """Omega(n-2) = g sqrt(n(n-1)); vale 0 en n = 0 y n = 1."""
        n = np.asarray(n, dtype=float)
        return self.g * np.sqrt(np.clip(n * (n - 1), 0.0, None))


def _revisar_estado(state: QubitFieldState, tol: Tolerances) -> None:
    norma = state.joint_norm()
    if abs(norma - 1.0) > tol.norm_tol:
        raise ValueError(f"El estado conjunto no esta normalizado (norma {norma:.12f})")
    arriba = float(np.max(np.abs(state.e_amps[-2:])))
    if arriba > tol.tail_tol:
        raise TruncationTooSmall(
            f"La parte excitada tiene amplitud {arriba:.3e} en los dos niveles superiores", state.dim, state.dim + 2
        )


# %% 3. Propagadores
def evolve_closed_form(
    state: QubitFieldState, params: TpjcParams, tol: Tolerances = DEFAULT_TOLERANCES
) -> QubitFieldState:
    """
    Aplica U(t) como matriz 2x2 de operadores diagonales y desplazamientos:
      - e' = cos[Omega(n) t] e - i sin[Omega(n) t] V^2 g
      - g' = -i V^dagger^2 sin[Omega(n) t] e + cos[Omega(n-2) t] g
    """
    _revisar_estado(state, tol)
    omega = RabiFrequency(params.g)
    n = np.arange(state.dim)
    fase = omega(n) * params.t
    fase_g = omega.shifted(n) * params.t
    e_amps, g_amps = state.e_amps, state.g_amps

    v2_g = np.zeros(state.dim, dtype=complex)
    v2_g[:-2] = g_amps[2:]
    e_nuevo = np.cos(fase) * e_amps - 1j * np.sin(fase) * v2_g

    sin_e = np.sin(fase) * e_amps
    g_nuevo = np.cos(fase_g) * g_amps
    g_nuevo[2:] += -1j * sin_e[:-2]
    return QubitFieldState(e_nuevo, g_nuevo)


def build_hamiltonian(dim: int, g: float) -> np.ndarray:
    """
    Hamiltoniano denso 2N x 2N de g (a^2 sigma_+ + a^dagger^2 sigma_-).
    Base: |0,e>..|N-1,e>, |0,g>..|N-1,g>. Solo acopla |n,e> con |n+2,g>.
    """
    if dim < 3:
        raise ValueError(f"Se necesitan al menos 3 niveles de Fock, se recibio {dim}")
    h = np.zeros((2 * dim, 2 * dim))
    idx = np.arange(dim - 2)
    acople = RabiFrequency(g)(idx)
    h[dim + idx + 2, idx] = acople
    h[idx, dim + idx + 2] = acople
    return h


@lru_cache(maxsize=16)
def hamiltonian_eigensystem(dim: int, g: float) -> tuple[np.ndarray, np.ndarray]:
    """Autovalores y autovectores del hamiltoniano; se guardan en caché como arreglos de solo lectura."""
    try:
        valores, vectores = linalg.eigh(build_hamiltonian(dim, g))
    except (linalg.LinAlgError, ValueError) as exc:
        raise DiagonalizationFailure(f"No se pudo diagonalizar el hamiltoniano (dim={dim}, g={g})") from exc
    valores.setflags(write=False)
    vectores.setflags(write=False)
    return valores, vectores


def evolve_oracle(
    state: QubitFieldState, params: TpjcParams, tol: Tolerances = DEFAULT_TOLERANCES
) -> QubitFieldState:
    """exp(-iHt)|estado> usando la descomposición espectral del hamiltoniano denso."""
    _revisar_estado(state, tol)
    valores, vectores = hamiltonian_eigensystem(state.dim, float(params.g))
    coeficientes = vectores.T @ state.as_vector()
    salida = vectores @ (np.exp(-1j * valores * params.t) * coeficientes)
    return QubitFieldState.from_vector(salida)


# %% 4. Pasadas con gt = pi
def _fases_pasada(dim: int, g: float, shifted: bool) -> np.ndarray:
    omega = RabiFrequency(g)
    n = np.arange(dim)
    frecuencia = omega.shifted(n) if shifted else omega(n)
    return frecuencia * (math.pi / g)


def pass_add(rho: DensityMatrix, g: float = 1.0, tol: Tolerances = DEFAULT_TOLERANCES) -> DensityMatrix:
    """
    Campo después de una pasada con el qubit en |e> y traza sobre el qubit:
    cos[Omega(n) pi] rho cos[Omega(n) pi] + V^dagger^2 sin[Omega(n) pi] rho sin[Omega(n) pi] V^2.
    """
    fase = _fases_pasada(rho.dim, g, shifted=False)
    rama_e = scale_dm(rho, np.cos(fase))
    rama_g = apply_raise_dm(apply_raise_dm(scale_dm(rho, np.sin(fase)), tol), tol)
    return DensityMatrix(rama_e.elems + rama_g.elems)


def pass_subtract(rho: DensityMatrix, g: float = 1.0, tol: Tolerances = DEFAULT_TOLERANCES) -> DensityMatrix:
    """
    Igual que ``pass_add`` con el qubit en |g>:
    cos[Omega(n-2) pi] rho cos[Omega(n-2) pi] + V^2 sin[Omega(n-2) pi] rho sin[Omega(n-2) pi] V^dagger^2.
    """
    fase = _fases_pasada(rho.dim, g, shifted=True)
    rama_g = scale_dm(rho, np.cos(fase))
    rama_e = apply_lower_dm(apply_lower_dm(scale_dm(rho, np.sin(fase))))
    return DensityMatrix(rama_g.elems + rama_e.elems)


# %% 5. Protocolo completo
@dataclass(frozen=True)
class ProtocolResult:
    """Resultado de m pasadas. Las distribuciones y la serie de fidelidad se guardan como pares (índice, valor)."""

    fidelity_series: tuple[tuple[int, float], ...]
    initial_dist: tuple[tuple[int, float], ...]
    final_dist: tuple[tuple[int, float], ...]
    mean_photon_initial: float
    mean_photon_final: float
    mandel_q_final: float | None
    mandel_q_predicted: float | None
    warnings: tuple[str, ...] = ()


def _pares(valores: np.ndarray) -> tuple[tuple[int, float], ...]:
    return tuple((j, float(p)) for j, p in enumerate(valores))


def run_protocol(
    psi0: FockVector,
    m: int,
    mode: Mode | str,
    g: float = 1.0,
    dim: int | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ProtocolResult:
    """
    Repite m veces la pasada de agregar o restar desde rho_0 = |psi0><psi0|.

    Después de cada pasada k se registra F(k) = <psi_k|rho_k|psi_k>, con psi_k el estado
    ideal con 2k fotones agregados/restados. Las advertencias emitidas durante la corrida
    quedan en ``ProtocolResult.warnings``.

    Usa ``warnings.catch_warnings``, que no es seguro entre hilos: las corridas
    paralelas se hacen en procesos separados.
    """
    mode = Mode(mode)
    if m < 0:
        raise ValueError(f"m debe ser >= 0, se recibio {m}")
    if dim is not None and dim != psi0.dim:
        raise DimensionMismatch(f"psi0 tiene dimension {psi0.dim} y se pidio {dim}")
    pasada = pass_add if mode is Mode.ADD else pass_subtract
    logger.info("Protocolo %s: m=%d, dim=%d, g=%s", mode.value, m, psi0.dim, g)

    with warnings.catch_warnings(record=True) as capturadas:
        warnings.simplefilter("always")
        rho = DensityMatrix.from_pure(psi0)
        serie = [(0, fidelity(rho, psi0, tol))]
        for k in range(1, m + 1):
            rho = pasada(rho, g, tol)
            serie.append((k, fidelity(rho, SgStateSpec(psi0, k, mode).build(tol), tol)))
            logger.debug("Pasada %d: F=%.12f, traza=%.15f", k, serie[-1][1], rho.trace().real)

        deriva = abs(rho.trace() - 1.0)
        if deriva > tol.norm_tol:
            warnings.warn(f"La traza se desvio {deriva:.3e} por truncamiento", TruncationWarning)

        media_inicial = mean_photon(psi0)
        try:
            q_final = mandel_q(rho)
        except ZeroMeanPhoton as exc:
            warnings.warn(f"Q final no definido: {exc}", UserWarning)
            q_final = None
        try:
            q_predicho = mandel_q_shift_predict(mandel_q(psi0), media_inicial, m, mode)
        except ZeroMeanPhoton as exc:
            warnings.warn(f"Q predicho no definido: {exc}", UserWarning)
            q_predicho = None

    avisos = tuple(f"{w.category.__name__}: {w.message}" for w in capturadas)
    for aviso in avisos:
        logger.warning(aviso)

    return ProtocolResult(
        fidelity_series=tuple(serie),
        initial_dist=_pares(fock_distribution(psi0)),
        final_dist=_pares(fock_distribution(rho)),
        mean_photon_initial=media_inicial,
        mean_photon_final=mean_photon(rho),
        mandel_q_final=q_final,
        mandel_q_predicted=q_predicho,
        warnings=avisos,
    )


# %% 6. Aproximación lineal de la frecuencia de Rabi
def _brecha(j, which: Mode) -> np.ndarray:
    """Diferencia absoluta entre la aproximación lineal y la raíz exacta."""
    j = np.asarray(j, dtype=float)
    if which is Mode.ADD:
        return np.abs(j + 1.5 - np.sqrt((j + 2) * (j + 1)))
    return np.abs(j - 0.5 - np.sqrt(np.clip(j * (j - 1), 0.0, None)))


def approx_error(j: int, which: Mode | str) -> float:
    """
    Error relativo de las aproximaciones:
      - **add:** sqrt((j+2)(j+1)) ~ j + 3/2
      - **subtract:** sqrt(j(j-1)) ~ j - 1/2 (requiere j >= 2)
    Decrece con j como 1/(8 j^2).
    """
    which = Mode(which)
    if j < 0:
        raise ValueError(f"j debe ser >= 0, se recibio {j}")
    if which is Mode.ADD:
        exacto = math.sqrt((j + 2) * (j + 1))
    else:
        if j < 2:
            raise ValueError("La rama de resta necesita j >= 2")
        exacto = math.sqrt(j * (j - 1))
    return float(_brecha(j, which)) / exacto


def critical_fock_state(which: Mode | str, rel_tol: float = 1e-3, j_max: int = 100_000) -> int:
    """Menor j desde el cual ``approx_error`` queda bajo ``rel_tol``."""
    which = Mode(which)
    inicio = 0 if which is Mode.ADD else 2
    for j in range(inicio, j_max + 1):
        if approx_error(j, which) <= rel_tol:
            return j
    raise ValueError(f"Ningun j <= {j_max} cumple rel_tol={rel_tol}")


def single_pass_error_bound(psi: FockVector, which: Mode | str) -> float:
    """
    Cota de 1 - |<ideal|campo tras una pasada>|^2 para un estado puro:
    sum_j |c_j|^2 (pi * brecha_j)^2. La fase del seno exacto difiere de la ideal en pi * brecha_j.
    En la rama de resta, j = 0 y j = 1 no se mueven y cuentan con desfase pi/2.
    """
    which = Mode(which)
    p = fock_distribution(psi)
    j = np.arange(psi.dim)
    desfase = math.pi * _brecha(j, which)
    if which is Mode.SUBTRACT:
        desfase[:2] = math.pi / 2
    return float(p @ desfase**2)
