"""
Mercado de la microrred: reparto de demanda/excedente de cada cliente entre
batería comunitaria y proveedor (SP), funciones de costo de clientes, SP y
red pública (UG), costo de operación ponderado y libro de caja cerrado.

Todas las funciones de precio son lineales: el coeficiente elegido es el
precio por kWh.
"""

from typing import Dict, List, Tuple

from ..schemas import (
    BatteryConfig,
    CustomerKind,
    CustomerProfile,
    PriceAction,
    ProviderConfig,
    StepAllocation,
    WeightConfig,
)

# === AGENTES DEL LIBRO DE CAJA ===

SERVICE_PROVIDER = "service_provider"
BATTERY_OPERATOR = "battery_operator"
UTILITY_GRID = "utility_grid"


def customer_account(customer_id: int) -> str:
    return f"customer_{customer_id}"


# === REPARTO DE CADA CLIENTE ===

def allocate_demand(
    net_demand: float,
    action: PriceAction,
    battery_available: float,
    b_p: float,
) -> Tuple[float, float]:
    """
    Reparte la demanda neta en (d_b, d_sp).

    Si la batería es más barata (b_p < a) se toma de ella todo lo posible y el
    resto va al SP; con empate o batería más cara todo va al SP.
    """
    if net_demand <= 0:
        return 0.0, 0.0
    if b_p < action.retail_coeff:
        d_b = min(net_demand, max(battery_available, 0.0))
        return d_b, net_demand - d_b
    return 0.0, net_demand


def allocate_surplus(
    surplus: float,
    action: PriceAction,
    charge_available: float,
    b_s: float,
) -> Tuple[float, float]:
    """
    Reparte el excedente en (w_b, w_sp): a la batería si paga más (b_s > p),
    limitado por la carga disponible; el resto se vende al SP.
    """
    if surplus <= 0:
        return 0.0, 0.0
    if b_s > action.purchase_coeff:
        w_b = min(surplus, max(charge_available, 0.0))
        return w_b, surplus - w_b
    return 0.0, surplus


def route_customers(
    customers: List[CustomerProfile],
    step: int,
    action: PriceAction,
    battery: BatteryConfig,
    charge_available: float,
    discharge_available: float,
) -> Dict[int, StepAllocation]:
    """
    Reparte a todos los clientes en un paso compartiendo la capacidad de la batería.

    Primero se atienden los excedentes (carga) y luego las demandas (descarga);
    dentro de cada fase los clientes se procesan por id ascendente y consumen la
    capacidad restante en orden.
    """
    ordered = sorted(customers, key=lambda c: c.id)
    surplus_split: Dict[int, Tuple[float, float]] = {}
    demand_split: Dict[int, Tuple[float, float]] = {}

    for customer in ordered:
        net = float(customer.generation[step]) - float(customer.demand[step])
        if net > 0:
            w_b, w_sp = allocate_surplus(net, action, charge_available, battery.tariff_charge)
            charge_available -= w_b
            surplus_split[customer.id] = (w_b, w_sp)

    for customer in ordered:
        net = float(customer.demand[step]) - float(customer.generation[step])
        if net > 0:
            d_b, d_sp = allocate_demand(net, action, discharge_available, battery.tariff_discharge)
            discharge_available -= d_b
            demand_split[customer.id] = (d_b, d_sp)

    allocations = {}
    for customer in ordered:
        d_b, d_sp = demand_split.get(customer.id, (0.0, 0.0))
        w_b, w_sp = surplus_split.get(customer.id, (0.0, 0.0))
        allocations[customer.id] = StepAllocation(d_sp=d_sp, d_b=d_b, w_sp=w_sp, w_b=w_b)
    return allocations


# === COSTOS ===

def consumer_cost(alloc: StepAllocation, action: PriceAction, b_p: float) -> float:
    """φ_i = b_p·d_b + a·d_sp"""
    return b_p * alloc.d_b + action.retail_coeff * alloc.d_sp


def prosumer_cost(alloc: StepAllocation, action: PriceAction, b_p: float, b_s: float) -> float:
    """φ_i = b_p·d_b + a·d_sp − b_s·w_b − p·w_sp (negativo = ganancia)"""
    return (
        b_p * alloc.d_b
        + action.retail_coeff * alloc.d_sp
        - b_s * alloc.w_b
        - action.purchase_coeff * alloc.w_sp
    )


def ug_cost(total_sp_demand: float, cfg: ProviderConfig) -> float:
    """c(Σd_sp) = σ·Σd_sp"""
    return cfg.sigma * total_sp_demand


def provider_cost(
    total_sp_demand: float,
    total_sp_surplus: float,
    action: PriceAction,
    cfg: ProviderConfig,
) -> float:
    """ψ = c(Σd_sp) + p·Σω_sp − a·Σd_sp (negativo = ganancia del SP)"""
    return (
        ug_cost(total_sp_demand, cfg)
        + action.purchase_coeff * total_sp_surplus
        - action.retail_coeff * total_sp_demand
    )


def operation_cost(
    provider: float,
    consumers_total: float,
    prosumers_total: float,
    weights: WeightConfig,
) -> float:
    """ρ = (1−α−β)·ψ + α·Σφ_C + β·Σφ_P"""
    return (
        weights.provider_weight * provider
        + weights.alpha * consumers_total
        + weights.beta * prosumers_total
    )


def reward(operation_cost_value: float) -> float:
    """r = −ρ"""
    return -operation_cost_value


def customer_costs(
    customers: List[CustomerProfile],
    allocations: Dict[int, StepAllocation],
    action: PriceAction,
    battery: BatteryConfig,
) -> Tuple[Dict[int, float], Dict[int, float]]:
    """Costos φ por consumidor y por prosumidor."""
    consumers: Dict[int, float] = {}
    prosumers: Dict[int, float] = {}
    for customer in customers:
        alloc = allocations[customer.id]
        if customer.kind == CustomerKind.CONSUMER:
            consumers[customer.id] = consumer_cost(alloc, action, battery.tariff_discharge)
        else:
            prosumers[customer.id] = prosumer_cost(
                alloc, action, battery.tariff_discharge, battery.tariff_charge
            )
    return consumers, prosumers


# === LIBRO DE CAJA ===

def settle_cashflows(
    allocations: Dict[int, StepAllocation],
    action: PriceAction,
    battery: BatteryConfig,
    provider: ProviderConfig,
) -> Dict[str, float]:
    """
    Flujos de caja netos por agente en un paso (positivo = ingreso).
    La suma de todos los agentes es cero.
    """
    b_p, b_s = battery.tariff_discharge, battery.tariff_charge
    flows: Dict[str, float] = {}
    for customer_id in sorted(allocations):
        alloc = allocations[customer_id]
        flows[customer_account(customer_id)] = -prosumer_cost(alloc, action, b_p, b_s)

    total_d_sp = sum(a.d_sp for a in allocations.values())
    total_w_sp = sum(a.w_sp for a in allocations.values())
    total_d_b = sum(a.d_b for a in allocations.values())
    total_w_b = sum(a.w_b for a in allocations.values())
    grid_bill = ug_cost(total_d_sp, provider)

    flows[SERVICE_PROVIDER] = (
        action.retail_coeff * total_d_sp - action.purchase_coeff * total_w_sp - grid_bill
    )
    flows[BATTERY_OPERATOR] = b_p * total_d_b - b_s * total_w_b
    flows[UTILITY_GRID] = grid_bill
    return flows


__all__ = [
    "SERVICE_PROVIDER",
    "BATTERY_OPERATOR",
    "UTILITY_GRID",
    "customer_account",
    "allocate_demand",
    "allocate_surplus",
    "route_customers",
    "consumer_cost",
    "prosumer_cost",
    "ug_cost",
    "provider_cost",
    "operation_cost",
    "reward",
    "customer_costs",
    "settle_cashflows",
]
