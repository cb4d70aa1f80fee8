"""
Bucle de entrenamiento completo y evaluación greedy de una red entrenada.
"""

import logging
from typing import List, Tuple

import numpy as np

from ..env import OBSERVATION_SIZE, MicrogridPricingEnv
from ..qnet import NetParams, forward, init
from ..schemas import ConfigurationError, EnvConfig, StepResult
from .dqn_nodes import epsilon_at, learn_step, select_action, sync_target
from .dqn_schemas import AgentConfig, ReplayMemory, TrainStats

logger = logging.getLogger(__name__)


def _check_compatible(env_cfg: EnvConfig, agent_cfg: AgentConfig) -> None:
    net = agent_cfg.net
    if net.input_size != OBSERVATION_SIZE:
        raise ConfigurationError(
            f"net.input_size={net.input_size} no coincide con el tamaño de observación {OBSERVATION_SIZE}"
        )
    if net.output_size != env_cfg.grid.size:
        raise ConfigurationError(
            f"net.output_size={net.output_size} no coincide con las {env_cfg.grid.size} acciones de la grilla"
        )


def train(env_cfg: EnvConfig, agent_cfg: AgentConfig) -> Tuple[NetParams, TrainStats]:
    """
    Ejecuta T pasos sobre episodios anuales consecutivos (reset al terminar cada
    uno), alternando fase de muestreo y de aprendizaje. Determinista dado el seed.
    """
    _check_compatible(env_cfg, agent_cfg)
    env = MicrogridPricingEnv(env_cfg)

    rng = np.random.default_rng(agent_cfg.seed)
    online = init(agent_cfg.net, agent_cfg.seed)
    target = online.copy()
    memory = ReplayMemory(agent_cfg.memory_size, OBSERVATION_SIZE)
    stats = TrainStats(
        consumer_count=len(env_cfg.consumers),
        prosumer_count=len(env_cfg.prosumers),
    )

    logger.info(
        f"🚀 Entrenando DQN: T={agent_cfg.total_steps}, K={agent_cfg.batch_size}, "
        f"E={agent_cfg.learn_start}, N={agent_cfg.memory_size}, U={agent_cfg.target_update}, "
        f"regla={agent_cfg.target_rule}"
    )

    observation, _ = env.reset(seed=agent_cfg.seed)
    episode = 0
    for step in range(1, agent_cfg.total_steps + 1):
        # Fase de muestreo
        epsilon = epsilon_at(step - 1, agent_cfg)
        action = select_action(forward(online, observation), epsilon, rng)
        transition, result = env.simulate(action)
        memory.push(transition)

        # Fase de aprendizaje
        loss = float("nan")
        learned = learn_step(memory, online, target, agent_cfg, rng)
        if learned is not None:
            online, loss = learned
        target = sync_target(online, target, step, agent_cfg.target_update)

        stats.record_step(step, episode, epsilon, action, result, loss)
        observation = transition.next_state

        if transition.done:
            _log_episode(stats, episode, epsilon)
            episode += 1
            observation, _ = env.reset()

    if not online.is_finite():
        logger.warning("⚠️ La red Q terminó con parámetros no finitos")
    logger.info(f"✅ Entrenamiento completado: {len(stats)} pasos, {episode} episodios completos")
    return online, stats


def _log_episode(stats: TrainStats, episode: int, epsilon: float) -> None:
    rewards = [r for r, e in zip(stats.rewards, stats.episodes) if e == episode]
    losses = [l for l, e in zip(stats.losses, stats.episodes) if e == episode and not np.isnan(l)]
    mean_loss = float(np.mean(losses)) if losses else float("nan")
    logger.info(
        f"📈 Episodio {episode}: recompensa total {sum(rewards):.3f}, "
        f"pérdida media {mean_loss:.5f}, ε={epsilon:.3f}"
    )


def evaluate_policy(
    env_cfg: EnvConfig,
    params: NetParams,
    episodes: int = 1,
) -> Tuple[TrainStats, List[StepResult]]:
    """
    Rollout greedy (ε = 0) sin aprendizaje. Devuelve las estadísticas por paso
    (pérdida NaN) y los resultados contables de cada paso.
    """
    env = MicrogridPricingEnv(env_cfg)
    stats = TrainStats(
        consumer_count=len(env_cfg.consumers),
        prosumer_count=len(env_cfg.prosumers),
    )
    results: List[StepResult] = []
    step = 0
    for episode in range(episodes):
        observation, _ = env.reset()
        done = False
        while not done:
            action = int(np.argmax(forward(params, observation)))
            transition, result = env.simulate(action)
            step += 1
            stats.record_step(step, episode, 0.0, action, result, float("nan"))
            results.append(result)
            observation, done = transition.next_state, transition.done
    logger.info(f"🔍 Evaluación greedy: {step} pasos, recompensa total {sum(stats.rewards):.3f}")
    return stats, results


__all__ = ["train", "evaluate_policy"]
