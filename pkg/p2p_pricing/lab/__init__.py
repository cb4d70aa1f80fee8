"""
Laboratorio de experimentos: configuración, corridas, barridos y reportes.
"""

from .lab_schemas import (
    DEFAULT_DATA,
    DEFAULT_LOG_LEVEL,
    DEFAULT_OUT_DIR,
    DEFAULT_WORKERS,
    ExperimentConfig,
    RunSummary,
    apply_overrides,
)

from .lab_reports import (
    summarize,
    write_reports,
)

from .lab_graph import (
    RunState,
    build_run_graph,
    run_train,
    run_evaluate,
)

from .lab_sweeps import (
    WEIGHT_GRID,
    BATTERY_CAPACITIES,
    CONSUMER_FRACTIONS,
    SweepResult,
    run_sweep_weights,
    run_sweep_battery,
    run_sweep_ratio,
)

__all__ = [
    "DEFAULT_DATA",
    "DEFAULT_LOG_LEVEL",
    "DEFAULT_OUT_DIR",
    "DEFAULT_WORKERS",
    "ExperimentConfig",
    "RunSummary",
    "apply_overrides",
    "summarize",
    "write_reports",
    "RunState",
    "build_run_graph",
    "run_train",
    "run_evaluate",
    "WEIGHT_GRID",
    "BATTERY_CAPACITIES",
    "CONSUMER_FRACTIONS",
    "SweepResult",
    "run_sweep_weights",
    "run_sweep_battery",
    "run_sweep_ratio",
]
