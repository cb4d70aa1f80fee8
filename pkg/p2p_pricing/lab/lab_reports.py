"""
Resúmenes de corrida y escritura de artefactos (tablas CSV y documentos JSON).

Todas las tablas se escriben con el mismo formato de flotantes para que dos
corridas idénticas produzcan archivos idénticos byte a byte.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

from ..dqn import TrainStats
from ..schemas import ReportError
from .lab_schemas import ExperimentConfig, RunSummary

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"


# === RESUMEN ===

def summary_window(stats: TrainStats, episode_length: int) -> int:
    """Los últimos min(episode_length, T) pasos ("último año")."""
    return min(episode_length, len(stats))


def summarize(
    stats: TrainStats,
    config: ExperimentConfig,
    seed: int,
    wall_time: float = 0.0,
    greedy: Optional[TrainStats] = None,
) -> RunSummary:
    """
    Resume la ventana final de una corrida. Las ganancias son costos medios por
    paso y por miembro con signo cambiado; el SP es un único miembro.

    Si se pasa `greedy` (rollout con ε = 0 de la red final), su primer año da
    greedy_reward_year, la métrica del barrido de batería.
    """
    window = summary_window(stats, config.env.episode_length)
    greedy_reward = None
    if greedy is not None and len(greedy):
        greedy_window = min(config.env.episode_length, len(greedy))
        greedy_reward = float(np.sum(greedy.rewards[:greedy_window]))
    frame = stats.step_frame().tail(window)

    def _per_member(column: str, count: int) -> float:
        if count == 0 or frame.empty:
            return 0.0
        return float(-frame[column].mean() / count)

    rewards = frame["reward"].to_numpy(dtype=np.float64)
    histogram = np.bincount(
        frame["action"].to_numpy(dtype=np.int64), minlength=config.env.grid.size
    )
    weights = config.env.weights
    return RunSummary(
        run_id=config.run_id,
        seed=seed,
        alpha=weights.alpha,
        beta=weights.beta,
        sp_weight=weights.provider_weight,
        capacity_kwh=config.env.battery.capacity_kwh,
        consumer_count=stats.consumer_count,
        prosumer_count=stats.prosumer_count,
        steps=len(stats),
        window=window,
        total_reward_last_year=float(rewards.sum()),
        avg_reward=float(rewards.mean()) if window else 0.0,
        avg_consumer_profit=_per_member("phi_consumers_total", stats.consumer_count),
        avg_prosumer_profit=_per_member("phi_prosumers_total", stats.prosumer_count),
        avg_sp_profit=float(-frame["psi"].mean()) if window else 0.0,
        mean_operation_cost=float(frame["rho"].mean()) if window else 0.0,
        final_epsilon=float(stats.epsilons[-1]) if len(stats) else 0.0,
        greedy_reward_year=greedy_reward,
        wall_time_s=wall_time,
        action_histogram=[int(n) for n in histogram],
    )


def reward_curve(stats: TrainStats) -> pd.DataFrame:
    frame = stats.step_frame()
    return frame[["step", "episode", "reward"]]


def loss_curve(stats: TrainStats) -> pd.DataFrame:
    return stats.loss_frame()


# === ESCRITURA ===

def ensure_dir(out_dir: Union[str, Path]) -> Path:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ReportError(f"No se puede crear el directorio de salida {out_dir}: {e}", path=str(out_dir)) from e
    return out_dir


def write_table(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    except OSError as e:
        raise ReportError(f"No se puede escribir {path}: {e}", path=str(path)) from e
    return path


def write_json(payload, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as e:
        raise ReportError(f"No se puede escribir {path}: {e}", path=str(path)) from e
    return path


def write_reports(
    out_dir: Union[str, Path],
    stats: Optional[TrainStats] = None,
    summaries: Iterable[RunSummary] = (),
    tables: Optional[Dict[str, pd.DataFrame]] = None,
) -> List[Path]:
    """
    Escribe los artefactos de una corrida o de un barrido. Sobrescribe lo que
    hubiera; con los mismos datos produce los mismos archivos.

    - stats: steps.csv, episodes.csv, reward_curve.csv, loss_curve.csv
    - summaries: summary.json (una corrida) o summaries.json (varias)
    - tables: <nombre>.csv por cada tabla
    """
    out_dir = ensure_dir(out_dir)
    written: List[Path] = []

    if stats is not None:
        written.append(write_table(stats.step_frame(), out_dir / "steps.csv"))
        written.append(write_table(stats.episode_frame(), out_dir / "episodes.csv"))
        written.append(write_table(reward_curve(stats), out_dir / "reward_curve.csv"))
        written.append(write_table(loss_curve(stats), out_dir / "loss_curve.csv"))

    summaries = list(summaries)
    if len(summaries) == 1:
        written.append(write_json(summaries[0].model_dump(mode="json"), out_dir / "summary.json"))
    elif summaries:
        written.append(write_json([s.model_dump(mode="json") for s in summaries], out_dir / "summaries.json"))

    for name, frame in (tables or {}).items():
        written.append(write_table(frame, out_dir / f"{name}.csv"))

    logger.info(f"💾 {len(written)} archivos escritos en {out_dir}")
    return written


__all__ = [
    "FLOAT_FORMAT",
    "ensure_dir",
    "summary_window",
    "summarize",
    "reward_curve",
    "loss_curve",
    "write_table",
    "write_json",
    "write_reports",
]
