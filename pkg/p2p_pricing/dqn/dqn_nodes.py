"""
Piezas del algoritmo DQN: política ε-greedy, objetivos TD, fase de
aprendizaje y sincronización de la red objetivo.

Flujo por paso:
1. ε ← epsilon_at(step)
2. acción ε-greedy sobre Q(s, ·)
3. guardar la transición en D
4. si |D| ≥ max(K, E): mini-lote, objetivos y y un paso de SGD
5. si step mod U = 0: Q̂ ← Q
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..qnet import NetParams, forward, grad, sgd_update
from ..schemas import ContractError
from .dqn_schemas import AgentConfig, ReplayMemory, TransitionBatch

logger = logging.getLogger(__name__)


def epsilon_at(step: int, cfg: AgentConfig) -> float:
    """
    Decaimiento lineal de epsilon_start a epsilon_end durante la primera
    fracción epsilon_decay_fraction·T de pasos; constante después.
    """
    decay_steps = cfg.total_steps * cfg.epsilon_decay_fraction
    if decay_steps <= 0:
        return cfg.epsilon_end
    progress = min(max(step, 0) / decay_steps, 1.0)
    return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * progress


def select_action(qvalues: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """Con probabilidad ε una acción uniforme; si no, argmax (empates → índice menor)."""
    if rng.random() < epsilon:
        return int(rng.integers(0, qvalues.shape[0]))
    return int(np.argmax(qvalues))


def td_targets(
    batch: TransitionBatch,
    target_params: NetParams,
    gamma: float,
    rule: str = "vanilla",
    online_params: Optional[NetParams] = None,
) -> np.ndarray:
    """
    y = r en transiciones terminales; si no:
    vanilla: y = r + γ·max_a' Q̂(s', a')
    double:  y = r + γ·Q̂(s', argmax_a' Q(s', a'))
    """
    next_target = forward(target_params, batch.next_states)
    if rule == "double":
        if online_params is None:
            raise ContractError("La regla 'double' necesita los parámetros de la red online")
        best = np.argmax(forward(online_params, batch.next_states), axis=1)
        bootstrap = next_target[np.arange(len(batch)), best]
    else:
        bootstrap = next_target.max(axis=1)
    return batch.rewards + gamma * np.where(batch.dones, 0.0, bootstrap)


def learn_step(
    memory: ReplayMemory,
    online: NetParams,
    target: NetParams,
    cfg: AgentConfig,
    rng: np.random.Generator,
) -> Optional[Tuple[NetParams, float]]:
    """
    Fase de aprendizaje. Devuelve (nuevos parámetros online, pérdida) o None
    si la memoria todavía no tiene max(K, E) transiciones.
    """
    if len(memory) < max(cfg.batch_size, cfg.learn_start):
        return None
    batch = memory.sample(cfg.batch_size, rng)
    targets = td_targets(batch, target, cfg.gamma, cfg.target_rule, online)
    gradients, loss = grad(online, batch.states, batch.actions, targets)
    return sgd_update(online, gradients, cfg.learning_rate), loss


def sync_target(online: NetParams, target: NetParams, step: int, interval: int) -> NetParams:
    """Q̂ ← copia profunda de Q cuando step mod U = 0."""
    if step % interval == 0:
        logger.debug(f"🔁 Paso {step}: copiando pesos de Q a Q̂")
        return online.copy()
    return target
