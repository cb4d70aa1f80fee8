"""
Configuración de experimentos del laboratorio y resumen de cada corrida.

Los valores por defecto del proceso (directorio de salida, fuente de datos,
workers, nivel de log) se leen del entorno / archivo .env.
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..dqn import AgentConfig
from ..profiles import DatasetConfig
from ..schemas import ConfigurationError, MicrogridConfig

# Cargar variables de entorno
load_dotenv()

DEFAULT_OUT_DIR = os.getenv("P2P_LAB_OUT_DIR", "runs")
DEFAULT_DATA = os.getenv("P2P_LAB_DATA", "synthetic")
DEFAULT_WORKERS = int(os.getenv("P2P_LAB_WORKERS", "1"))
DEFAULT_LOG_LEVEL = os.getenv("P2P_LAB_LOG_LEVEL", "INFO")

# === CONFIGURACIÓN DEL EXPERIMENTO ===

class ExperimentConfig(BaseModel):
    """
    Experimento completo y serializable. Con todos los valores por defecto
    reproduce la línea base: α=β=0.3, Λ=30 kWh, 10 clientes, 5 prosumidores.
    """
    model_config = ConfigDict(extra="forbid")

    run_id: str = "baseline"
    output_dir: str = Field(default_factory=lambda: DEFAULT_OUT_DIR)
    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)
    env: MicrogridConfig = Field(default_factory=MicrogridConfig)
    agent: AgentConfig = Field(default_factory=AgentConfig)
    dataset: DatasetConfig = Field(default_factory=DatasetConfig)

    @model_validator(mode="after")
    def check_network_matches_grid(self) -> "ExperimentConfig":
        if self.agent.net.output_size != self.env.grid.size:
            raise ValueError(
                f"agent.net.output_size={self.agent.net.output_size} debe ser igual al "
                f"número de acciones de env.grid ({self.env.grid.size})"
            )
        return self

    # === CARGA ===

    @classmethod
    def from_tree(cls, tree: Dict[str, Any], overrides: Optional[List[str]] = None) -> "ExperimentConfig":
        tree = apply_overrides(tree, overrides or [])
        try:
            return cls.model_validate(tree)
        except ValidationError as e:
            raise ConfigurationError(describe_validation_error(e)) from e

    @classmethod
    def from_json_file(
        cls, path: Union[str, Path], overrides: Optional[List[str]] = None
    ) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigurationError(f"No se encuentra el archivo de configuración: {path}")
        try:
            tree = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"JSON inválido en {path}: {e}") from e
        if not isinstance(tree, dict):
            raise ConfigurationError(f"{path} debe contener un objeto JSON")
        return cls.from_tree(tree, overrides)

    # === VARIANTES ===

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """Copia con el seed del agente fijado (los perfiles no cambian)."""
        agent = self.agent.model_copy(update={"seed": seed})
        return self.model_copy(update={"agent": agent, "seeds": [seed]})



# === OVERRIDES ===

def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _known_paths(node: Any, prefix: str = "") -> set:
    paths = set()
    if isinstance(node, dict):
        for key, value in node.items():
            dotted = f"{prefix}.{key}" if prefix else key
            paths.add(dotted)
            paths |= _known_paths(value, dotted)
    return paths


def _set_path(tree: Dict[str, Any], keys: List[str], value: Any) -> None:
    node = tree
    for key in keys[:-1]:
        child = node.get(key)
        if not isinstance(child, dict):
            child = {}
            node[key] = child
        node = child
    node[keys[-1]] = value


def apply_overrides(tree: Dict[str, Any], overrides: List[str]) -> Dict[str, Any]:
    """
    Aplica `clave.punteada=valor` sobre el árbol JSON crudo. La clave debe
    existir en el esquema completo; el valor se interpreta como JSON si se puede.
    """
    if not overrides:
        return tree
    known = _known_paths(ExperimentConfig().model_dump(mode="json"))
    tree = json.loads(json.dumps(tree))
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"Override inválido '{item}': se espera clave=valor")
        dotted, raw = item.split("=", 1)
        dotted = dotted.strip()
        if dotted not in known:
            raise ConfigurationError(f"Clave de configuración desconocida: '{dotted}'")
        _set_path(tree, dotted.split("."), _parse_value(raw.strip()))
    return tree


def describe_validation_error(error: ValidationError) -> str:
    """Resume un ValidationError de pydantic listando las claves problemáticas."""
    unknown, invalid = [], []
    for item in error.errors():
        dotted = ".".join(str(part) for part in item["loc"])
        if item["type"] == "extra_forbidden":
            unknown.append(dotted)
        else:
            invalid.append(f"{dotted or '<raíz>'}: {item['msg']}")
    parts = []
    if unknown:
        parts.append("Claves desconocidas: " + ", ".join(unknown))
    if invalid:
        parts.append("Valores inválidos: " + "; ".join(invalid))
    return " | ".join(parts) or str(error)


# === RESUMEN DE CORRIDA ===

class RunSummary(BaseModel):
    """
    Resumen de una corrida. Las ganancias son el costo medio por paso y por
    miembro con signo cambiado (consumidores negativos, como en la tabla de pesos).
    """
    run_id: str
    seed: int
    alpha: float
    beta: float
    sp_weight: float
    capacity_kwh: float
    consumer_count: int
    prosumer_count: int
    steps: int
    window: int
    total_reward_last_year: float
    avg_reward: float
    avg_consumer_profit: float
    avg_prosumer_profit: float
    avg_sp_profit: float
    mean_operation_cost: float
    final_epsilon: float
    # Recompensa total de un año con la red final y ε = 0
    greedy_reward_year: Optional[float] = None
    wall_time_s: float = 0.0
    action_histogram: List[int] = Field(default_factory=list)
