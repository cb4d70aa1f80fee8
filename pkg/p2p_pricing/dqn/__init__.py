"""
Agente DQN para aprender los coeficientes de precio minorista y de compra.
"""

from .dqn_schemas import (
    AgentConfig,
    ReplayMemory,
    TransitionBatch,
    TrainStats,
)

from .dqn_nodes import (
    epsilon_at,
    select_action,
    td_targets,
    learn_step,
    sync_target,
)

from .dqn_train import (
    train,
    evaluate_policy,
)

__all__ = [
    "AgentConfig",
    "ReplayMemory",
    "TransitionBatch",
    "TrainStats",
    "epsilon_at",
    "select_action",
    "td_targets",
    "learn_step",
    "sync_target",
    "train",
    "evaluate_policy",
]
