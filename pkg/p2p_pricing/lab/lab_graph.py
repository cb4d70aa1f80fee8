"""
Grafo de una corrida de entrenamiento y evaluación de checkpoints.

Flujo:
load_profiles → build_env → train_agent → evaluate_greedy → summarize_run
  → write_run_reports → END

El bucle de 100K pasos del agente vive dentro de train_agent; el grafo solo
encadena las etapas de la corrida.
"""

import logging
import time
from pathlib import Path
from typing import Any, Optional, Union

from langgraph.graph import END, StateGraph
from pydantic import BaseModel, ConfigDict

from ..dqn import evaluate_policy, train
from ..env import export_trajectory
from ..profiles import export_prosumer_series, load_dataset
from ..qnet import load_checkpoint, save_checkpoint
from ..schemas import ConfigurationError, EnvConfig
from .lab_reports import ensure_dir, summarize, write_json, write_reports, write_table
from .lab_schemas import ExperimentConfig, RunSummary

logger = logging.getLogger(__name__)

PROSUMER_PROFILE_HOURS = 48


# === ESTADO ===

class RunState(BaseModel):
    """Estado compartido por los nodos de una corrida."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    experiment: ExperimentConfig
    seed: int = 0
    out_dir: Optional[str] = None
    write: bool = True
    customers: Any = None
    env_config: Any = None
    params: Any = None
    stats: Any = None
    greedy_stats: Any = None
    wall_time: float = 0.0
    summary: Optional[RunSummary] = None


# === NODOS ===

def load_profiles(state: RunState) -> dict:
    customers = load_dataset(state.experiment.dataset)
    logger.info(
        f"👥 {len(customers)} clientes "
        f"({state.experiment.dataset.prosumer_count} prosumidores)"
    )
    return {"customers": customers}


def build_env(state: RunState) -> dict:
    env_config = EnvConfig.from_microgrid(state.experiment.env, state.customers)
    env_config.check_profiles()
    return {"env_config": env_config}


def train_agent(state: RunState) -> dict:
    started = time.perf_counter()
    params, stats = train(state.env_config, state.experiment.agent)
    return {"params": params, "stats": stats, "wall_time": time.perf_counter() - started}


def evaluate_greedy(state: RunState) -> dict:
    # Un año con ε = 0: sin exploración, solo la política aprendida
    greedy_stats, _ = evaluate_policy(state.env_config, state.params, episodes=1)
    return {"greedy_stats": greedy_stats}


def summarize_run(state: RunState) -> dict:
    summary = summarize(state.stats, state.experiment, state.seed, state.wall_time, state.greedy_stats)
    logger.info(
        f"📊 Seed {state.seed}: recompensa último año {summary.total_reward_last_year:.3f} "
        f"(greedy {summary.greedy_reward_year:.3f}), "
        f"ganancia C {summary.avg_consumer_profit:.4f} / P {summary.avg_prosumer_profit:.4f} "
        f"/ SP {summary.avg_sp_profit:.4f}"
    )
    return {"summary": summary}


def write_run_reports(state: RunState) -> dict:
    if not state.write or state.out_dir is None:
        return {}
    out_dir = Path(state.out_dir)
    write_reports(
        out_dir,
        stats=state.stats,
        summaries=[state.summary],
        tables={"prosumer_profile": export_prosumer_series(state.customers, PROSUMER_PROFILE_HOURS)},
    )
    save_checkpoint(out_dir / "checkpoint.qnet", state.experiment.agent.net, state.params)
    write_json(state.experiment.model_dump(mode="json"), out_dir / "config.json")
    return {}


def build_run_graph():
    """Construye el grafo lineal de una corrida."""
    builder = StateGraph(RunState)

    builder.add_node("load_profiles", load_profiles)
    builder.add_node("build_env", build_env)
    builder.add_node("train_agent", train_agent)
    builder.add_node("evaluate_greedy", evaluate_greedy)
    builder.add_node("summarize_run", summarize_run)
    builder.add_node("write_run_reports", write_run_reports)

    builder.set_entry_point("load_profiles")
    builder.add_edge("load_profiles", "build_env")
    builder.add_edge("build_env", "train_agent")
    builder.add_edge("train_agent", "evaluate_greedy")
    builder.add_edge("evaluate_greedy", "summarize_run")
    builder.add_edge("summarize_run", "write_run_reports")
    builder.add_edge("write_run_reports", END)

    return builder.compile()


# === API ===

def run_train(
    config: ExperimentConfig,
    seed: Optional[int] = None,
    out_dir: Optional[Union[str, Path]] = None,
    write: bool = True,
) -> RunSummary:
    """
    Una corrida completa para un seed (por defecto el primero de config.seeds).
    Si write, deja en out_dir las tablas, el resumen, el checkpoint y la config.
    """
    seed = config.seeds[0] if seed is None else seed
    config = config.with_seed(seed)
    if out_dir is None:
        out_dir = Path(config.output_dir) / config.run_id / f"seed_{seed}"

    logger.info(f"🚀 Corrida '{config.run_id}' seed={seed} → {out_dir}")
    graph = build_run_graph()
    final = graph.invoke(RunState(experiment=config, seed=seed, out_dir=str(out_dir), write=write))
    if isinstance(final, dict):
        final = RunState(**final)
    return final.summary


def run_evaluate(
    config: ExperimentConfig,
    checkpoint: Union[str, Path],
    out_dir: Optional[Union[str, Path]] = None,
    episodes: int = 1,
) -> RunSummary:
    """
    Rollout greedy de una red guardada. Escribe evaluation_steps.csv,
    trajectory.csv y evaluation_summary.json.
    """
    checkpoint = Path(checkpoint)
    if not checkpoint.is_file():
        raise ConfigurationError(f"No se encuentra el checkpoint: {checkpoint}")
    net_cfg, params = load_checkpoint(checkpoint)
    if net_cfg.output_size != config.env.grid.size:
        raise ConfigurationError(
            f"El checkpoint tiene {net_cfg.output_size} salidas y la grilla {config.env.grid.size} acciones"
        )
    config = config.model_copy(update={"agent": config.agent.model_copy(update={"net": net_cfg})})

    customers = load_dataset(config.dataset)
    env_config = EnvConfig.from_microgrid(config.env, customers)
    env_config.check_profiles()

    started = time.perf_counter()
    stats, results = evaluate_policy(env_config, params, episodes)
    summary = summarize(stats, config, config.seeds[0], time.perf_counter() - started, greedy=stats)

    out_dir = ensure_dir(out_dir if out_dir is not None else checkpoint.parent)
    write_table(stats.step_frame(), out_dir / "evaluation_steps.csv")
    write_table(export_trajectory(results), out_dir / "trajectory.csv")
    write_json(summary.model_dump(mode="json"), out_dir / "evaluation_summary.json")
    logger.info(f"✅ Evaluación escrita en {out_dir}")
    return summary


__all__ = ["RunState", "build_run_graph", "run_train", "run_evaluate"]
