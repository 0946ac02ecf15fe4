# -*- coding: utf-8 -*-
"""
Ejecución de experimentos del protocolo de agregar/restar pares de fotones.

Subcomandos:
    1. ``run <config.json> [...] --out DIR [--jobs J]``: corre el protocolo descrito en cada archivo
       de configuración y escribe un archivo por salida pedida, más ``result.json`` con el resultado completo.
    2. ``oracle-check --dim N --trials T --seed S``: compara el propagador en forma cerrada con el
       oráculo de diagonalización densa sobre estados pseudoaleatorios y escribe el reporte por stdout.
    3. ``approx-table --max-j J [--out FILE]``: tabla del error relativo de la aproximación lineal
       de la frecuencia de Rabi (columnas ``j,add_error,subtract_error``).

Las salidas son deterministas: la misma configuración produce los mismos bytes.
Formato de los reales: en los CSV se escriben con ``%.17g``; en los JSON con la representación
más corta de Python (``repr``), que se lee de vuelta al mismo float exacto.
Los gráficos no se generan aquí; solo se escriben los datos para graficarlos.
"""

# %% 1. Importar librerías
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import multiprocessing as mp
import sys
import warnings
from dataclasses import asdict, dataclass, replace
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from errors import ConfigInvalid, IoFailure, ProtocolError, TruncationTooSmall, ZeroMeanPhoton
from fock_core import (
    DEFAULT_TOLERANCES,
    Tolerances,
    default_dimension,
    make_coherent,
    minimum_coherent_dimension,
    minimum_raise_dimension,
    random_qubit_field_state,
)
from sg_states import Mode, eigen_residual, expected_eigen_sign, mandel_q_coherent_predict
from tpjc_sim import (
    ProtocolResult,
    TpjcParams,
    approx_error,
    evolve_closed_form,
    evolve_oracle,
    run_protocol,
)

logger = logging.getLogger(__name__)

OUTPUT_KINDS = (
    "fock_dist",
    "fidelity_series",
    "mandel_q",
    "mean_photon",
    "approx_error_table",
    "oracle_check",
    "eigen_residual",
    "workbook",
)
DEFAULT_OUTPUTS = ("fock_dist", "fidelity_series", "mandel_q", "mean_photon")

ORACLE_TIMES = (0.3, math.pi, 7.1)
ORACLE_THRESHOLD = 1e-8
MAX_ORACLE_DIM = 128

FLOAT_FORMAT = "%.17g"
# Fecha fija en las propiedades del libro Excel para que los bytes no dependan del día
FECHA_LIBRO = datetime(2000, 1, 1)


# %% 2. Configuración
def minimum_dimension(
    alpha: complex, m: int, mode: Mode | str, tol: Tolerances = DEFAULT_TOLERANCES
) -> int:
    """
    Dimensión mínima aceptada: la política por defecto (con la ganancia 2m solo al agregar),
    nunca menos que |alpha|^2 + 2m + 3 y suficiente para que el estado inicial quepa con ``tol``.
    Al agregar, la cola del coherente tiene que dejar libres los 2m niveles superiores
    con amplitud bajo ``tail_tol`` (ver ``minimum_raise_dimension``).
    """
    mode = Mode(mode)
    politica = default_dimension(alpha, m if mode is Mode.ADD else 0)
    if mode is Mode.ADD:
        cola = minimum_raise_dimension(alpha, 2 * m, tol)
    else:
        cola = minimum_coherent_dimension(alpha, tol)
    return max(politica, math.ceil(abs(alpha) ** 2 + 2 * m + 3), cola)


def _entero(data: dict, clave: str, defecto: int | None, minimo: int, maximo: int | None = None) -> int | None:
    valor = data.get(clave, defecto)
    if valor is None:
        return None
    if isinstance(valor, bool) or not isinstance(valor, int):
        raise ConfigInvalid(f"'{clave}' debe ser entero, se recibio {valor!r}")
    if valor < minimo or (maximo is not None and valor > maximo):
        rango = f">= {minimo}" if maximo is None else f"entre {minimo} y {maximo}"
        raise ConfigInvalid(f"'{clave}' debe estar {rango}, se recibio {valor}")
    return valor


def _real(valor, clave: str) -> float:
    if isinstance(valor, bool) or not isinstance(valor, (int, float)) or not math.isfinite(valor):
        raise ConfigInvalid(f"'{clave}' debe ser un numero finito, se recibio {valor!r}")
    return float(valor)


def _parse_alpha(valor) -> complex:
    """alpha como [re, im], {"re": .., "im": ..} o un real."""
    if isinstance(valor, (list, tuple)) and len(valor) == 2:
        re, im = valor
    elif isinstance(valor, dict) and set(valor) <= {"re", "im"} and "re" in valor:
        re, im = valor["re"], valor.get("im", 0.0)
    elif isinstance(valor, (int, float)) and not isinstance(valor, bool):
        re, im = valor, 0.0
    else:
        raise ConfigInvalid(f"'alpha' debe ser [re, im] o {{\"re\": .., \"im\": ..}}, se recibio {valor!r}")
    return complex(_real(re, "alpha.re"), _real(im, "alpha.im"))


@dataclass(frozen=True)
class ExperimentConfig:
    """Un experimento por archivo. ``dim`` ausente significa usar ``minimum_dimension``."""

    alpha: complex
    mode: Mode
    m: int
    dim: int | None = None
    g: float = 1.0
    tolerances: Tolerances = DEFAULT_TOLERANCES
    outputs: tuple[str, ...] = DEFAULT_OUTPUTS
    approx_max_j: int = 200
    oracle_dim: int = 64
    oracle_trials: int = 100
    oracle_seed: int = 42

    @property
    def dimension(self) -> int:
        if self.dim is not None:
            return self.dim
        return minimum_dimension(self.alpha, self.m, self.mode, self.tolerances)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigInvalid("La configuracion debe ser un objeto JSON")
        conocidas = {
            "alpha", "mode", "m", "dim", "g", "tolerances", "outputs",
            "approx_max_j", "oracle_dim", "oracle_trials", "oracle_seed",
        }
        desconocidas = sorted(set(data) - conocidas)
        if desconocidas:
            raise ConfigInvalid(f"Campos desconocidos: {', '.join(desconocidas)}")
        for requerido in ("alpha", "mode", "m"):
            if requerido not in data:
                raise ConfigInvalid(f"Falta el campo '{requerido}'")

        alpha = _parse_alpha(data["alpha"])
        try:
            mode = Mode(data["mode"])
        except ValueError:
            raise ConfigInvalid(f"'mode' debe ser add o subtract, se recibio {data['mode']!r}") from None
        m = _entero(data, "m", None, 0)
        g = _real(data.get("g", 1.0), "g")
        if g <= 0:
            raise ConfigInvalid(f"'g' debe ser positivo, se recibio {g}")
        try:
            tolerances = Tolerances.from_dict(data.get("tolerances"))
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(str(exc)) from None

        outputs = data.get("outputs", list(DEFAULT_OUTPUTS))
        if not isinstance(outputs, list) or not all(isinstance(o, str) for o in outputs):
            raise ConfigInvalid("'outputs' debe ser una lista de nombres")
        invalidas = [o for o in outputs if o not in OUTPUT_KINDS]
        if invalidas:
            raise ConfigInvalid(f"Salidas desconocidas: {', '.join(invalidas)}; validas: {', '.join(OUTPUT_KINDS)}")

        minimo = minimum_dimension(alpha, m, mode, tolerances)
        dim = _entero(data, "dim", None, 1)
        if dim is not None and dim < minimo:
            raise ConfigInvalid(f"dim={dim} es menor que el minimo {minimo} para alpha={alpha}, m={m}, {mode.value}")

        return cls(
            alpha=alpha,
            mode=mode,
            m=m,
            dim=dim,
            g=g,
            tolerances=tolerances,
            outputs=tuple(dict.fromkeys(outputs)),
            approx_max_j=_entero(data, "approx_max_j", 200, 2),
            oracle_dim=_entero(data, "oracle_dim", 64, 3, MAX_ORACLE_DIM),
            oracle_trials=_entero(data, "oracle_trials", 100, 0),
            oracle_seed=_entero(data, "oracle_seed", 42, 0),
        )


def load_config(path: Path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigInvalid(f"No se pudo leer {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path} no es JSON valido: {exc}") from None
    return ExperimentConfig.from_dict(data)


# %% 3. Tablas y escritura de resultados
def fidelity_frame(result: ProtocolResult) -> pd.DataFrame:
    return pd.DataFrame(list(result.fidelity_series), columns=["k", "fidelity"])


def distribution_frame(result: ProtocolResult) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "j": [j for j, _ in result.initial_dist],
            "p_initial": [p for _, p in result.initial_dist],
            "p_final": [p for _, p in result.final_dist],
        }
    )


def summary_frame(result: ProtocolResult) -> pd.DataFrame:
    campos = ["mean_photon_initial", "mean_photon_final", "mandel_q_final", "mandel_q_predicted"]
    filas = [(campo, getattr(result, campo)) for campo in campos]
    filas += [("warning", aviso) for aviso in result.warnings]
    return pd.DataFrame(filas, columns=["campo", "valor"])


def approx_table(max_j: int) -> pd.DataFrame:
    """Error relativo por rama para j = 0..max_j; la rama de resta queda vacía en j < 2."""
    if max_j < 0:
        raise ConfigInvalid(f"max_j debe ser >= 0, se recibio {max_j}")
    filas = []
    for j in range(max_j + 1):
        resta = approx_error(j, Mode.SUBTRACT) if j >= 2 else np.nan
        filas.append((j, approx_error(j, Mode.ADD), resta))
    return pd.DataFrame(filas, columns=["j", "add_error", "subtract_error"])


def _csv_text(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _escribir(path: Path, contenido: str | bytes) -> Path:
    path = Path(path)
    try:
        if isinstance(contenido, bytes):
            path.write_bytes(contenido)
        else:
            path.write_text(contenido, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"No se pudo escribir {path}: {exc}") from exc
    return path


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def emit_csv(result: ProtocolResult, path: Path, table: str = "fidelity_series") -> Path:
    """
    Escribe una tabla del resultado en CSV:
      - **fidelity_series:** ``k,fidelity``, una fila por pasada (incluida k = 0).
      - **fock_dist:** ``j,p_initial,p_final``.
    """
    tablas = {"fidelity_series": fidelity_frame, "fock_dist": distribution_frame}
    if table not in tablas:
        raise ValueError(f"Tabla desconocida: {table}")
    return _escribir(path, _csv_text(tablas[table](result)))


def emit_json(result: ProtocolResult, path: Path) -> Path:
    """Escribe el resultado completo con los nombres de campo de ``ProtocolResult``."""
    return _escribir(path, _json_text(asdict(result)))


def load_result_json(path: Path) -> ProtocolResult:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"No se pudo leer {path}: {exc}") from exc

    def pares(filas):
        return tuple((int(i), float(v)) for i, v in filas)

    return ProtocolResult(
        fidelity_series=pares(data["fidelity_series"]),
        initial_dist=pares(data["initial_dist"]),
        final_dist=pares(data["final_dist"]),
        mean_photon_initial=float(data["mean_photon_initial"]),
        mean_photon_final=float(data["mean_photon_final"]),
        mandel_q_final=data["mandel_q_final"],
        mandel_q_predicted=data["mandel_q_predicted"],
        warnings=tuple(data["warnings"]),
    )


def to_excel(tablas: dict[str, pd.DataFrame]) -> bytes:
    """Convierte varias tablas en un libro Excel en memoria, una hoja por tabla."""
    output = io.BytesIO()
    with pd.ExcelWriter(output, engine="xlsxwriter") as writer:
        writer.book.set_properties({"created": FECHA_LIBRO})
        for nombre, df in tablas.items():
            df.to_excel(writer, index=False, sheet_name=nombre)
    return output.getvalue()


# %% 4. Verificación del propagador
def oracle_check(dim: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """
    Compara ``evolve_closed_form`` con ``evolve_oracle`` en ``trials`` estados pseudoaleatorios
    (semilla ``seed``) para cada gt de ``ORACLE_TIMES``, con g = 1.
    """
    if not 3 <= dim <= MAX_ORACLE_DIM:
        raise ConfigInvalid(f"dim debe estar entre 3 y {MAX_ORACLE_DIM}, se recibio {dim}")
    if trials < 0:
        raise ConfigInvalid(f"trials debe ser >= 0, se recibio {trials}")
    rng = np.random.default_rng(seed)
    maxima = 0.0
    comparaciones = 0
    for _ in range(trials):
        estado = random_qubit_field_state(dim, rng)
        for gt in ORACLE_TIMES:
            params = TpjcParams.at_gt(gt)
            cerrado = evolve_closed_form(estado, params, tol).as_vector()
            oraculo = evolve_oracle(estado, params, tol).as_vector()
            maxima = max(maxima, float(np.linalg.norm(cerrado - oraculo)))
            comparaciones += 1
    logger.info("Oraculo dim=%d: %d comparaciones, desviacion maxima %.3e", dim, comparaciones, maxima)
    return {
        "dim": dim,
        "trials": trials,
        "seed": seed,
        "gt": list(ORACLE_TIMES),
        "comparisons": comparaciones,
        "max_deviation": maxima,
        "threshold": ORACLE_THRESHOLD,
        "passed": maxima <= ORACLE_THRESHOLD,
    }


# %% 5. Corrida de un experimento
@dataclass(frozen=True)
class RunOutcome:
    result: ProtocolResult
    written: tuple[Path, ...]
    oracle_passed: bool | None = None


def run_experiment(config: ExperimentConfig, out_dir: Path) -> RunOutcome:
    """
    Corre el protocolo y los análisis pedidos y escribe los archivos en ``out_dir``.
    Las advertencias de todos los módulos terminan en ``result.json``.
    """
    out_dir = Path(out_dir)
    tol = config.tolerances
    dim = config.dimension
    try:
        psi0 = make_coherent(config.alpha, dim, tol)
        resultado = run_protocol(psi0, config.m, config.mode, config.g, dim, tol)
    except TruncationTooSmall as exc:
        minimo = max(exc.minimum or 0, minimum_dimension(config.alpha, config.m, config.mode, tol))
        raise TruncationTooSmall(exc.detail, exc.dim, minimo) from exc
    try:
        q_predicho = mandel_q_coherent_predict(config.alpha, config.m, config.mode)
    except ZeroMeanPhoton:
        q_predicho = None
    resultado = replace(resultado, mandel_q_predicted=q_predicho)

    extras = {}
    with warnings.catch_warnings(record=True) as capturadas:
        warnings.simplefilter("always")
        if "eigen_residual" in config.outputs:
            residuo = eigen_residual(config.alpha, config.m, config.mode, dim, tol)
            extras["eigen_residual"] = {
                "minus_alpha": residuo.minus_alpha,
                "plus_alpha": residuo.plus_alpha,
                "verified_sign": residuo.verified_sign,
                "expected_sign": expected_eigen_sign(config.m),
            }
        if "oracle_check" in config.outputs:
            extras["oracle_check"] = oracle_check(config.oracle_dim, config.oracle_trials, config.oracle_seed, tol)
    avisos = resultado.warnings + tuple(f"{w.category.__name__}: {w.message}" for w in capturadas)
    resultado = replace(resultado, warnings=avisos)

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"No se pudo crear {out_dir}: {exc}") from exc

    escritos = [emit_json(resultado, out_dir / "result.json")]
    for salida in config.outputs:
        if salida in ("fock_dist", "fidelity_series"):
            escritos.append(emit_csv(resultado, out_dir / f"{salida}.csv", salida))
        elif salida == "mandel_q":
            contenido = {"mandel_q_final": resultado.mandel_q_final, "mandel_q_predicted": resultado.mandel_q_predicted}
            escritos.append(_escribir(out_dir / "mandel_q.json", _json_text(contenido)))
        elif salida == "mean_photon":
            contenido = {
                "mean_photon_initial": resultado.mean_photon_initial,
                "mean_photon_final": resultado.mean_photon_final,
                "mean_photon_ideal": abs(config.alpha) ** 2 + config.mode.sign * 2 * config.m,
            }
            escritos.append(_escribir(out_dir / "mean_photon.json", _json_text(contenido)))
        elif salida == "approx_error_table":
            escritos.append(_escribir(out_dir / "approx_error_table.csv", _csv_text(approx_table(config.approx_max_j))))
        elif salida == "workbook":
            libro = to_excel(
                {
                    "fidelity_series": fidelity_frame(resultado),
                    "fock_dist": distribution_frame(resultado),
                    "summary": summary_frame(resultado),
                }
            )
            escritos.append(_escribir(out_dir / "result.xlsx", libro))
        else:
            escritos.append(_escribir(out_dir / f"{salida}.json", _json_text(extras[salida])))

    oraculo = extras.get("oracle_check")
    logger.info("Experimento escrito en %s (%d archivos)", out_dir, len(escritos))
    return RunOutcome(resultado, tuple(escritos), None if oraculo is None else oraculo["passed"])


def run(config_path: Path, out_dir: Path) -> int:
    """Corre un archivo de configuración; devuelve el código de salida (0 si todo salió bien)."""
    try:
        config = load_config(config_path)
        resultado = run_experiment(config, out_dir)
    except ProtocolError as exc:
        logger.error("%s: %s: %s", config_path, type(exc).__name__, exc)
        return 1
    if resultado.oracle_passed is False:
        logger.error("%s: el propagador en forma cerrada se aparta del oraculo", config_path)
        return 1
    return 0


# %% 6. Línea de comandos
def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="experiment_cli",
        description="Protocolo de Jaynes-Cummings de dos fotones: agregar o restar pares de fotones.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Mensajes de depuracion")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="Corre uno o mas archivos de configuracion")
    p_run.add_argument("configs", nargs="+", type=Path)
    p_run.add_argument("--out", type=Path, default=Path("resultados"))
    p_run.add_argument("--jobs", type=int, default=1)

    p_oracle = sub.add_parser("oracle-check", help="Compara el propagador con el oraculo denso")
    p_oracle.add_argument("--dim", type=int, default=64)
    p_oracle.add_argument("--trials", type=int, default=100)
    p_oracle.add_argument("--seed", type=int, default=42)

    p_tabla = sub.add_parser("approx-table", help="Tabla de error de la aproximacion lineal")
    p_tabla.add_argument("--max-j", type=int, default=200)
    p_tabla.add_argument("--out", type=Path, default=None)
    return parser


def _cmd_run(args) -> int:
    nombres = [cfg.stem for cfg in args.configs]
    if len(set(nombres)) != len(nombres):
        logger.error("Hay configuraciones con el mismo nombre; cada corrida necesita su propio directorio")
        return 1
    tareas = [(cfg, args.out / cfg.stem) for cfg in args.configs]
    if args.jobs > 1 and len(tareas) > 1:
        with mp.Pool(min(args.jobs, len(tareas))) as pool:
            codigos = pool.starmap(run, tareas)
    else:
        codigos = [run(cfg, destino) for cfg, destino in tareas]
    return max(codigos)


def _cmd_oracle(args) -> int:
    try:
        reporte = oracle_check(args.dim, args.trials, args.seed)
    except ProtocolError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return 1
    sys.stdout.write(json.dumps(reporte, indent=2, sort_keys=True) + "\n")
    return 0 if reporte["passed"] else 1


def _cmd_tabla(args) -> int:
    try:
        texto = _csv_text(approx_table(args.max_j))
        if args.out is None:
            sys.stdout.write(texto)
        else:
            _escribir(args.out, texto)
    except ProtocolError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    comandos = {"run": _cmd_run, "oracle-check": _cmd_oracle, "approx-table": _cmd_tabla}
    return comandos[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
