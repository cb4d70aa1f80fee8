"""
Configuración y estructuras del agente DQN: hiperparámetros, memoria de
repetición circular y estadísticas de entrenamiento.
"""

from dataclasses import dataclass, field
from typing import List, Literal, NamedTuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..qnet import NetConfig
from ..schemas import ContractError, Transition

# === HIPERPARÁMETROS ===

class AgentConfig(BaseModel):
    """
    Entradas del algoritmo: K, E, N, T, U, ζ (en net), γ y la política ε.
    """
    model_config = ConfigDict(extra="forbid")

    batch_size: int = Field(default=32, ge=1, description="K: tamaño del mini-lote")
    learn_start: int = Field(default=1000, ge=0, description="E: transiciones antes de aprender")
    memory_size: int = Field(default=10000, ge=1, description="N: capacidad de la memoria")
    total_steps: int = Field(default=100000, ge=1, description="T: pasos totales")
    target_update: int = Field(default=1000, ge=1, description="U: intervalo de copia Q → Q̂")
    gamma: float = Field(default=0.99, ge=0, lt=1)
    epsilon_start: float = Field(default=1.0, ge=0, le=1)
    epsilon_end: float = Field(default=0.05, ge=0, le=1)
    epsilon_decay_fraction: float = Field(default=0.5, ge=0, le=1, description="Fracción de T con decaimiento lineal")
    target_rule: Literal["vanilla", "double"] = "vanilla"
    seed: int = 0
    net: NetConfig = Field(default_factory=NetConfig)

    @model_validator(mode="after")
    def check_sizes(self) -> "AgentConfig":
        if self.batch_size > self.memory_size:
            raise ValueError(
                f"batch_size K={self.batch_size} no puede superar memory_size N={self.memory_size}"
            )
        if self.epsilon_end > self.epsilon_start:
            raise ValueError("epsilon_end no puede ser mayor que epsilon_start")
        return self

    @property
    def learning_rate(self) -> float:
        return self.net.learning_rate


# === MEMORIA DE REPETICIÓN ===

class TransitionBatch(NamedTuple):
    """Lote de transiciones en arreglos paralelos."""
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray
    next_states: np.ndarray

    def __len__(self) -> int:
        return int(self.actions.shape[0])


class ReplayMemory:
    """
    Memoria D como buffer circular de capacidad N: al llenarse, cada inserción
    reemplaza la transición más antigua.
    """

    def __init__(self, capacity: int, state_size: int):
        if capacity < 1:
            raise ContractError("La memoria de repetición necesita capacidad ≥ 1")
        self.capacity = capacity
        self.states = np.zeros((capacity, state_size), dtype=np.float64)
        self.next_states = np.zeros((capacity, state_size), dtype=np.float64)
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity, dtype=np.float64)
        self.dones = np.zeros(capacity, dtype=bool)
        self.insertions = 0

    def __len__(self) -> int:
        return min(self.insertions, self.capacity)

    def push(self, transition: Transition) -> None:
        slot = self.insertions % self.capacity
        self.states[slot] = transition.state
        self.actions[slot] = transition.action
        self.rewards[slot] = transition.reward
        self.dones[slot] = transition.done
        self.next_states[slot] = transition.next_state
        self.insertions += 1

    def _take(self, idx: np.ndarray) -> TransitionBatch:
        return TransitionBatch(
            states=self.states[idx],
            actions=self.actions[idx],
            rewards=self.rewards[idx],
            dones=self.dones[idx],
            next_states=self.next_states[idx],
        )

    def sample(self, k: int, rng: np.random.Generator) -> TransitionBatch:
        """K transiciones uniformes con reemplazo."""
        if len(self) == 0:
            raise ContractError("No se puede muestrear una memoria vacía")
        return self._take(rng.integers(0, len(self), size=k))

    def contents(self) -> TransitionBatch:
        """Todas las transiciones guardadas, de la más antigua a la más reciente."""
        size = len(self)
        start = self.insertions % self.capacity if self.insertions > self.capacity else 0
        return self._take((start + np.arange(size)) % self.capacity)


# === ESTADÍSTICAS ===

STEP_COLUMNS = [
    "step", "episode", "epsilon", "action", "reward", "loss",
    "psi", "phi_consumers_total", "phi_prosumers_total", "rho",
]


@dataclass
class TrainStats:
    """
    Registro por paso (recompensa, pérdida, ε, acción) y por fase de aprendizaje.
    La pérdida por paso es NaN cuando no hubo fase de aprendizaje.
    """
    consumer_count: int = 0
    prosumer_count: int = 0
    steps: List[int] = field(default_factory=list)
    episodes: List[int] = field(default_factory=list)
    epsilons: List[float] = field(default_factory=list)
    actions: List[int] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    losses: List[float] = field(default_factory=list)
    psi: List[float] = field(default_factory=list)
    phi_consumers: List[float] = field(default_factory=list)
    phi_prosumers: List[float] = field(default_factory=list)
    rho: List[float] = field(default_factory=list)
    learn_steps: List[int] = field(default_factory=list)
    learn_losses: List[float] = field(default_factory=list)

    def record_step(self, step: int, episode: int, epsilon: float, action: int, result, loss: float) -> None:
        self.steps.append(step)
        self.episodes.append(episode)
        self.epsilons.append(epsilon)
        self.actions.append(action)
        self.rewards.append(result.reward)
        self.losses.append(loss)
        self.psi.append(result.provider_cost)
        self.phi_consumers.append(result.consumers_total)
        self.phi_prosumers.append(result.prosumers_total)
        self.rho.append(result.operation_cost)
        if not np.isnan(loss):
            self.learn_steps.append(step)
            self.learn_losses.append(loss)

    def __len__(self) -> int:
        return len(self.steps)

    def step_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "step": self.steps,
            "episode": self.episodes,
            "epsilon": self.epsilons,
            "action": self.actions,
            "reward": self.rewards,
            "loss": self.losses,
            "psi": self.psi,
            "phi_consumers_total": self.phi_consumers,
            "phi_prosumers_total": self.phi_prosumers,
            "rho": self.rho,
        }, columns=STEP_COLUMNS)

    def loss_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"step": self.learn_steps, "loss": self.learn_losses})

    def episode_frame(self) -> pd.DataFrame:
        """Agregados por episodio: pasos, recompensa total y media, pérdida media."""
        frame = self.step_frame()
        if frame.empty:
            return pd.DataFrame(columns=["episode", "steps", "total_reward", "mean_reward", "mean_loss"])
        grouped = frame.groupby("episode", sort=True)
        return pd.DataFrame({
            "episode": grouped.size().index,
            "steps": grouped.size().to_numpy(),
            "total_reward": grouped["reward"].sum().to_numpy(),
            "mean_reward": grouped["reward"].mean().to_numpy(),
            "mean_loss": grouped["loss"].mean().to_numpy(),
        })
