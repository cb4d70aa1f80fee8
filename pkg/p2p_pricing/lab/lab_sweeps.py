"""
Barridos de experimentos: pesos (α, β), capacidad de batería y proporción de
consumidores.

Cada celda (valor del barrido, seed) es una corrida aislada: entorno, agente y
RNG propios. Con workers > 1 las celdas se reparten en procesos; las filas se
ordenan siempre por la clave de la celda, nunca por orden de llegada.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import pandas as pd
from pydantic import ValidationError

from ..profiles import DatasetConfig
from ..schemas import ConfigurationError, WeightConfig
from .lab_graph import run_train
from .lab_reports import write_reports
from .lab_schemas import ExperimentConfig, RunSummary

logger = logging.getLogger(__name__)

# Filas de la tabla de pesos (α, β); 1 − α − β es el peso del SP
WEIGHT_GRID: List[Tuple[float, float]] = [
    (0.2, 0.6), (0.2, 0.2), (0.6, 0.2), (0.3, 0.3), (0.3, 0.5),
    (0.5, 0.3), (0.5, 0.2), (0.4, 0.4), (0.1, 0.7), (0.7, 0.1),
]
BATTERY_CAPACITIES: List[float] = [10.0, 20.0, 30.0, 40.0, 50.0]
CONSUMER_FRACTIONS: List[float] = [0.3, 0.5, 0.7, 0.9]

# Mayor foco en el SP para el barrido de batería
BATTERY_SWEEP_WEIGHTS = WeightConfig(alpha=0.2, beta=0.2)

WEIGHT_COLUMNS = ["alpha", "beta", "sp_weight", "avg_consumer_profit", "avg_prosumer_profit", "avg_sp_profit"]
BATTERY_COLUMNS = ["capacity_kwh", "p_max", "total_reward_last_year"]
RATIO_COLUMNS = ["consumer_fraction", "consumer_count", "prosumer_count", "avg_reward"]


class SweepCell(NamedTuple):
    index: int
    seed: int
    config: ExperimentConfig
    out_dir: Optional[str]


class SweepResult(NamedTuple):
    table: pd.DataFrame
    summaries: List[RunSummary]


# === EJECUCIÓN DE CELDAS ===

def _run_cell(cell: SweepCell) -> Tuple[int, int, RunSummary]:
    summary = run_train(cell.config, seed=cell.seed, out_dir=cell.out_dir, write=cell.out_dir is not None)
    return cell.index, cell.seed, summary


def run_cells(cells: Sequence[SweepCell], workers: int = 1) -> List[RunSummary]:
    """Ejecuta las celdas y devuelve los resúmenes ordenados por (índice, seed)."""
    logger.info(f"🧮 {len(cells)} corridas con {workers} worker(s)")
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(_run_cell, cells))
    else:
        outcomes = [_run_cell(cell) for cell in cells]
    outcomes.sort(key=lambda item: (item[0], item[1]))
    return [summary for _, _, summary in outcomes]


def _make_cells(
    variants: Sequence[ExperimentConfig],
    seeds: Sequence[int],
    runs_dir: Optional[Path],
) -> List[SweepCell]:
    cells = []
    for index, variant in enumerate(variants):
        for seed in seeds:
            out_dir = str(runs_dir / variant.run_id / f"seed_{seed}") if runs_dir is not None else None
            cells.append(SweepCell(index=index, seed=seed, config=variant, out_dir=out_dir))
    return cells


def _seed_mean(rows: List[dict], keys: List[str], columns: List[str]) -> pd.DataFrame:
    """Promedio sobre seeds conservando el orden de la grilla."""
    frame = pd.DataFrame(rows)
    table = frame.groupby("index", sort=True).agg({c: "mean" for c in columns if c not in keys})
    firsts = frame.groupby("index", sort=True)[keys].first()
    return pd.concat([firsts, table], axis=1)[columns].reset_index(drop=True)


def _finish(
    name: str,
    table: pd.DataFrame,
    summaries: List[RunSummary],
    out_dir: Optional[Union[str, Path]],
) -> SweepResult:
    if out_dir is not None:
        write_reports(out_dir, summaries=summaries, tables={name: table})
    return SweepResult(table=table, summaries=summaries)


# === BARRIDO DE PESOS ===

def validate_weight_grid(grid: Iterable[Tuple[float, float]]) -> List[WeightConfig]:
    """Valida todos los pares antes de lanzar cualquier corrida."""
    weights = []
    for alpha, beta in grid:
        try:
            weights.append(WeightConfig(alpha=alpha, beta=beta))
        except ValidationError as e:
            raise ConfigurationError(
                f"Par de pesos inválido (α={alpha}, β={beta}): se requiere α, β ≥ 0 y α + β ≤ 1"
            ) from e
    if not weights:
        raise ConfigurationError("La grilla de pesos está vacía")
    return weights


def run_sweep_weights(
    config: ExperimentConfig,
    grid: Optional[Sequence[Tuple[float, float]]] = None,
    seeds: Optional[Sequence[int]] = None,
    out_dir: Optional[Union[str, Path]] = None,
    workers: int = 1,
    write_runs: bool = False,
) -> SweepResult:
    """
    Una corrida por (α, β, seed). La tabla tiene las columnas α, β, 1−α−β y las
    ganancias medias por miembro de consumidores, prosumidores y SP.
    """
    weights = validate_weight_grid(grid if grid is not None else WEIGHT_GRID)
    seeds = list(seeds if seeds is not None else config.seeds)

    variants = [
        config.model_copy(update={
            "env": config.env.model_copy(update={"weights": w}),
            "run_id": f"{config.run_id}_a{w.alpha:g}_b{w.beta:g}",
        })
        for w in weights
    ]
    runs_dir = Path(out_dir) / "runs" if (out_dir is not None and write_runs) else None
    summaries = run_cells(_make_cells(variants, seeds, runs_dir), workers)

    rows = [
        {"index": i // len(seeds), **s.model_dump(include=set(WEIGHT_COLUMNS))}
        for i, s in enumerate(summaries)
    ]
    table = _seed_mean(rows, ["alpha", "beta", "sp_weight"], WEIGHT_COLUMNS)
    return _finish("sweep_weights", table, summaries, out_dir)


# === BARRIDO DE BATERÍA ===

def run_sweep_battery(
    config: ExperimentConfig,
    capacities: Optional[Sequence[float]] = None,
    seeds: Optional[Sequence[int]] = None,
    out_dir: Optional[Union[str, Path]] = None,
    workers: int = 1,
    weights: Optional[WeightConfig] = BATTERY_SWEEP_WEIGHTS,
    write_runs: bool = False,
) -> SweepResult:
    """
    Una corrida por capacidad y seed; los límites de potencia siguen a
    power_ratio · Λ. La recompensa total del último año sale del rollout
    greedy (ε = 0) de un año con la red final de cada seed.
    """
    capacities = list(capacities if capacities is not None else BATTERY_CAPACITIES)
    bad = [c for c in capacities if not c > 0]
    if bad or not capacities:
        raise ConfigurationError(f"Las capacidades deben ser > 0, se recibió {bad or capacities}")
    seeds = list(seeds if seeds is not None else config.seeds)

    variants = []
    for capacity in capacities:
        env_update = {"battery": config.env.battery.with_capacity(capacity)}
        if weights is not None:
            env_update["weights"] = weights
        variants.append(config.model_copy(update={
            "env": config.env.model_copy(update=env_update),
            "run_id": f"{config.run_id}_cap{capacity:g}",
        }))
    runs_dir = Path(out_dir) / "runs" if (out_dir is not None and write_runs) else None
    summaries = run_cells(_make_cells(variants, seeds, runs_dir), workers)

    rows = []
    for i, summary in enumerate(summaries):
        battery = variants[i // len(seeds)].env.battery
        rows.append({
            "index": i // len(seeds),
            "capacity_kwh": battery.capacity_kwh,
            "p_max": battery.p_bc_max,
            "total_reward_last_year": summary.greedy_reward_year,
        })
    table = _seed_mean(rows, ["capacity_kwh", "p_max"], BATTERY_COLUMNS)
    return _finish("sweep_battery", table, summaries, out_dir)


# === BARRIDO DE PROPORCIÓN ===

def run_sweep_ratio(
    config: ExperimentConfig,
    fractions: Optional[Sequence[float]] = None,
    seeds: Optional[Sequence[int]] = None,
    out_dir: Optional[Union[str, Path]] = None,
    workers: int = 1,
    write_runs: bool = False,
) -> SweepResult:
    """
    Una corrida por proporción de consumidores y seed con el total de clientes
    fijo. Reporta la recompensa media por paso.
    """
    fractions = list(fractions if fractions is not None else CONSUMER_FRACTIONS)
    bad = [f for f in fractions if not 0.0 <= f <= 1.0]
    if bad or not fractions:
        raise ConfigurationError(f"Las proporciones deben estar en [0, 1], se recibió {bad or fractions}")
    seeds = list(seeds if seeds is not None else config.seeds)

    variants = []
    for fraction in fractions:
        dataset = DatasetConfig.model_validate(
            {**config.dataset.model_dump(), "prosumer_fraction": 1.0 - fraction}
        )
        variants.append(config.model_copy(update={
            "dataset": dataset,
            "run_id": f"{config.run_id}_c{fraction:g}",
        }))
    runs_dir = Path(out_dir) / "runs" if (out_dir is not None and write_runs) else None
    summaries = run_cells(_make_cells(variants, seeds, runs_dir), workers)

    rows = []
    for i, summary in enumerate(summaries):
        rows.append({
            "index": i // len(seeds),
            "consumer_fraction": fractions[i // len(seeds)],
            "consumer_count": summary.consumer_count,
            "prosumer_count": summary.prosumer_count,
            "avg_reward": summary.avg_reward,
        })
    table = _seed_mean(rows, ["consumer_fraction", "consumer_count", "prosumer_count"], RATIO_COLUMNS)
    return _finish("sweep_ratio", table, summaries, out_dir)


__all__ = [
    "WEIGHT_GRID",
    "BATTERY_CAPACITIES",
    "CONSUMER_FRACTIONS",
    "BATTERY_SWEEP_WEIGHTS",
    "WEIGHT_COLUMNS",
    "BATTERY_COLUMNS",
    "RATIO_COLUMNS",
    "SweepCell",
    "SweepResult",
    "run_cells",
    "validate_weight_grid",
    "run_sweep_weights",
    "run_sweep_battery",
    "run_sweep_ratio",
]
