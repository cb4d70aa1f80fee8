#!/usr/bin/env python3
"""
🔋 Línea de comandos del laboratorio de precios P2P.

Subcomandos:
    train           Entrena el agente DQN (una corrida por seed)
    sweep-weights   Barrido de pesos (α, β)
    sweep-battery   Barrido de capacidad de batería
    sweep-ratio     Barrido de proporción de consumidores
    evaluate        Rollout greedy de un checkpoint

Ejemplo:
    python -m p2p_pricing train --config configs/baseline.json --seed 0 1 2 \\
        --set agent.total_steps=5000
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from .lab import (
    DEFAULT_DATA,
    DEFAULT_LOG_LEVEL,
    DEFAULT_WORKERS,
    ExperimentConfig,
    run_evaluate,
    run_sweep_battery,
    run_sweep_ratio,
    run_sweep_weights,
    run_train,
    write_reports,
)
from .schemas import ConfigurationError, P2PLabError

logger = logging.getLogger("p2p_pricing")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


# === ARGUMENTOS ===

def _weight_pair(raw: str) -> Tuple[float, float]:
    try:
        alpha, beta = (float(v) for v in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"Par de pesos inválido '{raw}': se espera alfa,beta")
    return alpha, beta


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="Archivo JSON de ExperimentConfig")
    parser.add_argument("--seed", type=int, nargs="+", help="Uno o más seeds (reemplaza config.seeds)")
    parser.add_argument("--out", type=Path, help="Directorio de salida (reemplaza config.output_dir)")
    parser.add_argument("--data", help="Ruta CSV de perfiles, 'synthetic' o 'bundled'")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="CLAVE=VALOR",
        help="Override puntual, p.ej. env.weights.alpha=0.5 (repetible)",
    )
    parser.add_argument("--log-level", default=DEFAULT_LOG_LEVEL, help="Nivel de log (DEBUG, INFO, ...)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="p2p_pricing",
        description="Laboratorio de precios dinámicos P2P con DQN",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    train = subparsers.add_parser("train", help="Entrena el agente")
    _add_common(train)

    weights = subparsers.add_parser("sweep-weights", help="Barrido de pesos (α, β)")
    _add_common(weights)
    weights.add_argument("--grid", type=_weight_pair, nargs="+", help="Pares alfa,beta")
    weights.add_argument("--workers", type=int, default=DEFAULT_WORKERS)

    battery = subparsers.add_parser("sweep-battery", help="Barrido de capacidad de batería")
    _add_common(battery)
    battery.add_argument("--capacities", type=float, nargs="+", help="Capacidades en kWh")
    battery.add_argument("--workers", type=int, default=DEFAULT_WORKERS)

    ratio = subparsers.add_parser("sweep-ratio", help="Barrido de proporción de consumidores")
    _add_common(ratio)
    ratio.add_argument("--fractions", type=float, nargs="+", help="Proporciones de consumidores en [0, 1]")
    ratio.add_argument("--workers", type=int, default=DEFAULT_WORKERS)

    evaluate = subparsers.add_parser("evaluate", help="Evalúa un checkpoint con política greedy")
    _add_common(evaluate)
    evaluate.add_argument("--checkpoint", type=Path, required=True)
    evaluate.add_argument("--episodes", type=int, default=1)

    return parser


# === CONFIGURACIÓN ===

def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config del archivo (o por defecto) + --data / --seed / --out + overrides --set."""
    overrides: List[str] = []
    if args.data is not None:
        overrides.append(f"dataset.source={json.dumps(args.data)}")
    overrides.extend(args.overrides)

    if args.config is not None:
        config = ExperimentConfig.from_json_file(args.config, overrides)
        if args.data is None and "source" not in config.dataset.model_fields_set:
            dataset = config.dataset.model_copy(update={"source": DEFAULT_DATA})
            config = config.model_copy(update={"dataset": dataset})
    else:
        tree = {"dataset": {"source": DEFAULT_DATA}}
        config = ExperimentConfig.from_tree(tree, overrides)

    updates = {}
    if args.seed:
        updates["seeds"] = list(args.seed)
    if args.out is not None:
        updates["output_dir"] = str(args.out)
    return config.model_copy(update=updates) if updates else config


def _workers(args: argparse.Namespace) -> int:
    if args.workers < 1:
        raise ConfigurationError(f"--workers debe ser ≥ 1, se recibió {args.workers}")
    return args.workers


# === COMANDOS ===

def cmd_train(args: argparse.Namespace, config: ExperimentConfig) -> None:
    base = Path(config.output_dir) / config.run_id
    summaries = []
    for seed in config.seeds:
        summaries.append(run_train(config, seed=seed, out_dir=base / f"seed_{seed}"))
    if len(summaries) > 1:
        write_reports(base, summaries=summaries)
    for summary in summaries:
        logger.info(f"✅ {json.dumps(summary.model_dump(mode='json'), ensure_ascii=False)}")


def cmd_sweep_weights(args: argparse.Namespace, config: ExperimentConfig) -> None:
    out_dir = Path(config.output_dir) / f"{config.run_id}_sweep_weights"
    result = run_sweep_weights(config, args.grid, config.seeds, out_dir, _workers(args))
    logger.info(f"✅ Barrido de pesos:\n{result.table.to_string(index=False)}")


def cmd_sweep_battery(args: argparse.Namespace, config: ExperimentConfig) -> None:
    out_dir = Path(config.output_dir) / f"{config.run_id}_sweep_battery"
    result = run_sweep_battery(config, args.capacities, config.seeds, out_dir, _workers(args))
    logger.info(f"✅ Barrido de batería:\n{result.table.to_string(index=False)}")


def cmd_sweep_ratio(args: argparse.Namespace, config: ExperimentConfig) -> None:
    out_dir = Path(config.output_dir) / f"{config.run_id}_sweep_ratio"
    result = run_sweep_ratio(config, args.fractions, config.seeds, out_dir, _workers(args))
    logger.info(f"✅ Barrido de proporción:\n{result.table.to_string(index=False)}")


def cmd_evaluate(args: argparse.Namespace, config: ExperimentConfig) -> None:
    if args.episodes < 1:
        raise ConfigurationError(f"--episodes debe ser ≥ 1, se recibió {args.episodes}")
    out_dir = args.out if args.out is not None else args.checkpoint.parent
    summary = run_evaluate(config, args.checkpoint, out_dir, args.episodes)
    logger.info(f"✅ {json.dumps(summary.model_dump(mode='json'), ensure_ascii=False)}")


COMMANDS = {
    "train": cmd_train,
    "sweep-weights": cmd_sweep_weights,
    "sweep-battery": cmd_sweep_battery,
    "sweep-ratio": cmd_sweep_ratio,
    "evaluate": cmd_evaluate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Punto de entrada. Devuelve 0 si todo salió bien y 2 ante errores del laboratorio."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=str(args.log_level).upper(), format=LOG_FORMAT)

    try:
        config = load_config(args)
        COMMANDS[args.command](args, config)
    except P2PLabError as e:
        logger.error(f"❌ {e}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
