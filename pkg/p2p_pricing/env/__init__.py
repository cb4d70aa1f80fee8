"""
Entorno MDP de la microrred (API gymnasium).

Cada paso decodifica la acción (a, p), reparte a los clientes entre batería y
proveedor, aplica un único paso de batería con los flujos agregados y calcula
costos, recompensa y libro de caja.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import gymnasium as gym
import numpy as np
import pandas as pd
from gymnasium import spaces

from ..battery import apply_step, charge_headroom, discharge_headroom
from ..market import (
    customer_costs,
    operation_cost,
    provider_cost,
    reward,
    route_customers,
    settle_cashflows,
    ug_cost,
)
from ..schemas import (
    ActionGrid,
    BatteryState,
    BatteryStepFlows,
    ContractError,
    EnvConfig,
    EnvObservation,
    HOURS_PER_DAY,
    PriceAction,
    StepResult,
    Transition,
)

logger = logging.getLogger(__name__)

OBSERVATION_SIZE = 3

TRAJECTORY_COLUMNS = [
    "step", "hour", "soc", "a", "p", "sp_demand", "sp_surplus", "reward", "psi",
    "phi_consumers_total", "phi_prosumers_total", "battery_charge", "battery_discharge",
]


def action_decode(index: int, grid: ActionGrid) -> PriceAction:
    """Índice plano → (a, p) con a = 𝒜[i ÷ |𝒫|], p = 𝒫[i mod |𝒫|]."""
    return grid.decode(index)


class MicrogridPricingEnv(gym.Env):
    """
    Microrred con batería comunitaria, consumidores, prosumidores, proveedor y red.
    El agente elige el par de coeficientes de precio en cada hora.
    """

    metadata = {"render_modes": []}

    def __init__(self, cfg: EnvConfig):
        super().__init__()
        cfg.check_profiles()
        self.cfg = cfg
        self.demand_scale = cfg.resolved_demand_scale()
        self.action_space = spaces.Discrete(cfg.grid.size)
        self.observation_space = spaces.Box(
            low=0.0, high=1.0, shape=(OBSERVATION_SIZE,), dtype=np.float64
        )
        self._battery = BatteryState(soc=cfg.battery.initial_soc)
        self._step_counter = 0
        self._observation = self._initial_observation()
        self._done = False

    # === CONTROL DEL EPISODIO ===

    def _initial_observation(self) -> EnvObservation:
        return EnvObservation(
            soc=self.cfg.battery.initial_soc,
            sp_demand_prev=0.0,
            hour=self.cfg.start_hour,
        )

    @property
    def observation(self) -> EnvObservation:
        return self._observation

    @property
    def step_counter(self) -> int:
        return self._step_counter

    @property
    def done(self) -> bool:
        return self._done

    def reset(
        self, *, seed: Optional[int] = None, options: Optional[Dict[str, Any]] = None
    ) -> Tuple[np.ndarray, Dict[str, Any]]:
        super().reset(seed=seed)
        self.cfg.check_profiles()
        self._battery = BatteryState(soc=self.cfg.battery.initial_soc)
        self._step_counter = 0
        self._done = False
        self._observation = self._initial_observation()
        return self._observation.encode(self.demand_scale), {"observation": self._observation}

    # === SIMULACIÓN DE UN PASO ===

    def simulate(self, action_index: int) -> Tuple[Transition, StepResult]:
        """
        Un paso completo del MDP. Devuelve la transición para la memoria de
        repetición y el resultado contable del paso.
        """
        if self._done:
            raise ContractError("El episodio terminó; llama a reset() antes de seguir")

        cfg = self.cfg
        t = self._step_counter
        action = action_decode(int(action_index), cfg.grid)
        start = self._battery

        allocations = route_customers(
            cfg.customers,
            t,
            action,
            cfg.battery,
            charge_headroom(cfg.battery, start),
            discharge_headroom(cfg.battery, start),
        )
        flows = BatteryStepFlows(
            charge_accepted=sum(a.w_b for a in allocations.values()),
            discharge_accepted=sum(a.d_b for a in allocations.values()),
        )
        self._battery = apply_step(cfg.battery, start, flows)

        consumers, prosumers = customer_costs(cfg.customers, allocations, action, cfg.battery)
        sp_demand = sum(a.d_sp for a in allocations.values())
        sp_surplus = sum(a.w_sp for a in allocations.values())
        psi = provider_cost(sp_demand, sp_surplus, action, cfg.provider)
        rho = operation_cost(psi, sum(consumers.values()), sum(prosumers.values()), cfg.weights)
        r = reward(rho)

        result = StepResult(
            step=t,
            hour=self._observation.hour,
            action=action,
            consumer_costs=consumers,
            prosumer_costs=prosumers,
            provider_cost=psi,
            ug_cost=ug_cost(sp_demand, cfg.provider),
            operation_cost=rho,
            reward=r,
            cashflows=settle_cashflows(allocations, action, cfg.battery, cfg.provider),
            allocations=allocations,
            flows=flows,
            soc_before=start.soc,
            soc_after=self._battery.soc,
        )

        self._step_counter = t + 1
        self._done = self._step_counter >= cfg.episode_length
        previous = self._observation
        self._observation = EnvObservation(
            soc=self._battery.soc,
            sp_demand_prev=sp_demand,
            hour=(previous.hour + 1) % HOURS_PER_DAY,
        )
        transition = Transition(
            state=previous.encode(self.demand_scale),
            action=int(action_index),
            reward=r,
            done=self._done,
            next_state=self._observation.encode(self.demand_scale),
        )
        return transition, result

    def step(self, action: int) -> Tuple[np.ndarray, float, bool, bool, Dict[str, Any]]:
        transition, result = self.simulate(action)
        info = {"result": result, "observation": self._observation}
        return transition.next_state, transition.reward, transition.done, False, info


# === EXPORTACIÓN ===

def export_trajectory(results: List[StepResult]) -> pd.DataFrame:
    """Tabla de trayectoria: una fila por paso."""
    return pd.DataFrame([r.to_row() for r in results], columns=TRAJECTORY_COLUMNS)


__all__ = [
    "OBSERVATION_SIZE",
    "TRAJECTORY_COLUMNS",
    "action_decode",
    "MicrogridPricingEnv",
    "export_trajectory",
]
