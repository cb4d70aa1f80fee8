"""
Modelo de la batería comunitaria: dinámica del SOC, intervalo seguro
y límites del inversor.

SOC^{t+1} = SOC^t + (P_BC·η − P_BD/η) / Λ
"""

from ..schemas import BatteryConfig, BatteryState, BatteryStepFlows, ContractError

# Holgura numérica al comparar flujos contra la capacidad disponible
FLOW_TOLERANCE = 1e-9


def charge_headroom(cfg: BatteryConfig, st: BatteryState) -> float:
    """
    Energía máxima que se puede cargar en este paso sin superar soc_max.
    """
    room = (cfg.soc_max - st.soc) * cfg.capacity_kwh / cfg.efficiency
    return max(0.0, min(cfg.p_bc_max, room))


def discharge_headroom(cfg: BatteryConfig, st: BatteryState) -> float:
    """
    Energía máxima que se puede entregar en este paso sin bajar de soc_min.
    """
    room = (st.soc - cfg.soc_min) * cfg.capacity_kwh * cfg.efficiency
    return max(0.0, min(cfg.p_bd_max, room))


def apply_step(cfg: BatteryConfig, st: BatteryState, flows: BatteryStepFlows) -> BatteryState:
    """
    Aplica los flujos agregados del paso. Ambos límites se evalúan contra el
    SOC de inicio de paso; violarlos es un bug de despacho, no un error de entrada.
    """
    if flows.charge_accepted < 0 or flows.discharge_accepted < 0:
        raise ContractError(f"Flujos negativos en la batería: {flows}")

    max_charge = charge_headroom(cfg, st)
    if flows.charge_accepted > max_charge + FLOW_TOLERANCE:
        raise ContractError(
            f"Carga {flows.charge_accepted:.6f} kWh excede la disponible {max_charge:.6f} kWh"
        )
    max_discharge = discharge_headroom(cfg, st)
    if flows.discharge_accepted > max_discharge + FLOW_TOLERANCE:
        raise ContractError(
            f"Descarga {flows.discharge_accepted:.6f} kWh excede la disponible {max_discharge:.6f} kWh"
        )

    if flows.charge_accepted == 0 and flows.discharge_accepted == 0:
        return st

    delta = (
        flows.charge_accepted * cfg.efficiency
        - flows.discharge_accepted / cfg.efficiency
    ) / cfg.capacity_kwh
    # Redondeo de coma flotante en el borde del intervalo
    soc = min(cfg.soc_max, max(cfg.soc_min, st.soc + delta))
    return BatteryState(soc=soc)


__all__ = [
    "charge_headroom",
    "discharge_headroom",
    "apply_step",
    "FLOW_TOLERANCE",
]
