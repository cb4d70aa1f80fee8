"""
Schemas del laboratorio de precios P2P para microrredes.
Tipos de dominio compartidos por la batería comunitaria, el mercado,
el entorno MDP y el harness de experimentos.
"""

from typing import Optional, List, Dict
from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# === ERRORES DEL LABORATORIO ===

class P2PLabError(Exception):
    """Error base del laboratorio."""


class ConfigurationError(P2PLabError, ValueError):
    """Configuración inválida o inconsistente."""


class ProfileDataError(P2PLabError, ValueError):
    """
    Error en los datos de perfiles horarios.
    Conserva ruta, fila (1 = primera fila de datos) y columna cuando se conocen.
    """

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        row: Optional[int] = None,
        column: Optional[str] = None,
    ):
        location = []
        if path is not None:
            location.append(f"archivo {path}")
        if row is not None:
            location.append(f"fila {row}")
        if column is not None:
            location.append(f"columna '{column}'")
        full = f"{message} ({', '.join(location)})" if location else message
        super().__init__(full)
        self.path = path
        self.row = row
        self.column = column


class ContractError(P2PLabError, AssertionError):
    """El llamador violó una precondición (bug de despacho, índice fuera de rango...)."""


class ReportError(P2PLabError, OSError):
    """No se pudieron escribir los reportes en el directorio de salida."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path


# === BATERÍA COMUNITARIA ===

class BatteryConfig(BaseModel):
    """
    Parámetros físicos y tarifas de la batería comunitaria.
    Si p_bc_max / p_bd_max no se dan, se fijan a power_ratio · Λ (5% por defecto).
    """
    model_config = ConfigDict(extra="forbid")

    capacity_kwh: float = Field(default=30.0, gt=0, description="Capacidad nominal Λ (kWh)")
    efficiency: float = Field(default=0.9, gt=0, le=1, description="Eficiencia η")
    soc_min: float = Field(default=0.1, ge=0, lt=1)
    soc_max: float = Field(default=0.9, gt=0, le=1)
    initial_soc: float = Field(default=0.5, ge=0, le=1, description="SOC al reiniciar el episodio")
    power_ratio: float = Field(default=0.05, ge=0, description="Límite de potencia como fracción de Λ")
    p_bc_max: Optional[float] = Field(default=None, ge=0, description="Carga máxima por paso (kWh)")
    p_bd_max: Optional[float] = Field(default=None, ge=0, description="Descarga máxima por paso (kWh)")
    tariff_discharge: float = Field(default=0.3, ge=0, description="b_p: precio por kWh retirado")
    tariff_charge: float = Field(default=0.6, ge=0, description="b_s: pago por kWh almacenado")

    @model_validator(mode="after")
    def check_interval_and_caps(self) -> "BatteryConfig":
        if not self.soc_min < self.soc_max:
            raise ValueError(
                f"soc_min ({self.soc_min}) debe ser menor que soc_max ({self.soc_max})"
            )
        if not self.soc_min <= self.initial_soc <= self.soc_max:
            raise ValueError(
                f"initial_soc ({self.initial_soc}) fuera del intervalo seguro "
                f"[{self.soc_min}, {self.soc_max}]"
            )
        if self.p_bc_max is None:
            self.p_bc_max = self.power_ratio * self.capacity_kwh
        if self.p_bd_max is None:
            self.p_bd_max = self.power_ratio * self.capacity_kwh
        return self

    def with_capacity(self, capacity_kwh: float) -> "BatteryConfig":
        """Copia con otra capacidad; los límites de potencia se recalculan con power_ratio."""
        data = self.model_dump()
        data.update(capacity_kwh=capacity_kwh, p_bc_max=None, p_bd_max=None)
        return BatteryConfig.model_validate(data)


@dataclass(frozen=True)
class BatteryState:
    """Estado de carga (fracción de Λ)."""
    soc: float

    def check(self, cfg: BatteryConfig, tol: float = 1e-12) -> None:
        if not cfg.soc_min - tol <= self.soc <= cfg.soc_max + tol:
            raise ContractError(
                f"SOC {self.soc} fuera del intervalo seguro [{cfg.soc_min}, {cfg.soc_max}]"
            )


@dataclass(frozen=True)
class BatteryStepFlows:
    """Energía aceptada por la batería en un paso (kWh)."""
    charge_accepted: float = 0.0
    discharge_accepted: float = 0.0


# === CLIENTES Y PRECIOS ===

class CustomerKind(str, Enum):
    """Tipo de cliente de la microrred."""
    CONSUMER = "consumer"
    PROSUMER = "prosumer"


@dataclass(frozen=True)
class CustomerProfile:
    """
    Perfil horario de un cliente: demanda d_i^t y generación g_i^t (kWh por paso).
    Los consumidores tienen generación idénticamente cero.
    """
    id: int
    kind: CustomerKind
    demand: np.ndarray
    generation: np.ndarray

    def __post_init__(self):
        if self.demand.shape != self.generation.shape:
            raise ConfigurationError(
                f"Cliente {self.id}: demanda y generación con longitudes distintas "
                f"({self.demand.shape[0]} vs {self.generation.shape[0]})"
            )
        if self.kind == CustomerKind.CONSUMER and np.any(self.generation != 0):
            raise ConfigurationError(f"Cliente {self.id}: un consumidor no puede generar energía")
        if np.any(self.demand < 0) or np.any(self.generation < 0):
            raise ConfigurationError(f"Cliente {self.id}: perfiles con valores negativos")

    @property
    def length(self) -> int:
        return int(self.demand.shape[0])


@dataclass(frozen=True)
class PriceAction:
    """Coeficientes elegidos por el agente: precio minorista a y precio de compra p."""
    retail_coeff: float
    purchase_coeff: float


@dataclass(frozen=True)
class StepAllocation:
    """
    Reparto de un cliente en un paso entre batería (b) y proveedor (sp).
    d_*: demanda cubierta; w_*: excedente vendido.
    """
    d_sp: float = 0.0
    d_b: float = 0.0
    w_sp: float = 0.0
    w_b: float = 0.0

    @property
    def net_demand(self) -> float:
        return self.d_b + self.d_sp

    @property
    def surplus(self) -> float:
        return self.w_b + self.w_sp


# === PROVEEDOR Y PESOS ===

class ProviderConfig(BaseModel):
    """Coeficiente σ del costo lineal c^t que la red pública cobra al proveedor."""
    model_config = ConfigDict(extra="forbid")

    sigma: float = Field(default=0.15, gt=0)


class WeightConfig(BaseModel):
    """Pesos α (consumidores) y β (prosumidores); el proveedor recibe 1−α−β."""
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(default=0.3, ge=0, le=1)
    beta: float = Field(default=0.3, ge=0, le=1)

    @model_validator(mode="after")
    def check_sum(self) -> "WeightConfig":
        if self.alpha + self.beta > 1 + 1e-12:
            raise ValueError(f"α + β debe ser ≤ 1 (α={self.alpha}, β={self.beta})")
        return self

    @property
    def provider_weight(self) -> float:
        return 1.0 - self.alpha - self.beta


# === ESPACIO DE ACCIONES ===

DEFAULT_COEFFICIENTS = [0.2, 0.4, 0.6, 0.8, 1.0]


class ActionGrid(BaseModel):
    """Conjuntos finitos 𝒜 (minorista) y 𝒫 (compra); acción conjunta aplanada."""
    model_config = ConfigDict(extra="forbid")

    retail_values: List[float] = Field(default_factory=lambda: list(DEFAULT_COEFFICIENTS), min_length=1)
    purchase_values: List[float] = Field(default_factory=lambda: list(DEFAULT_COEFFICIENTS), min_length=1)

    @field_validator("retail_values", "purchase_values")
    @classmethod
    def coefficients_positive(cls, values: List[float]) -> List[float]:
        if any(v <= 0 for v in values):
            raise ValueError("Los coeficientes de precio deben ser positivos.")
        return values

    @property
    def size(self) -> int:
        return len(self.retail_values) * len(self.purchase_values)

    def decode(self, index: int) -> PriceAction:
        """a = 𝒜[index ÷ |𝒫|], p = 𝒫[index mod |𝒫|]."""
        if not 0 <= index < self.size:
            raise ContractError(f"Índice de acción {index} fuera de rango [0, {self.size})")
        n_p = len(self.purchase_values)
        return PriceAction(
            retail_coeff=self.retail_values[index // n_p],
            purchase_coeff=self.purchase_values[index % n_p],
        )


# === OBSERVACIONES Y TRANSICIONES ===

HOURS_PER_DAY = 24


@dataclass(frozen=True)
class EnvObservation:
    """
    Estado s^t = (SOC, d_sp del paso anterior, hora del día).
    sp_demand_prev guarda el valor crudo en kWh; encode() lo normaliza.
    """
    soc: float
    sp_demand_prev: float
    hour: int

    def encode(self, demand_scale: float) -> np.ndarray:
        demand = min(self.sp_demand_prev / demand_scale, 1.0) if demand_scale > 0 else 0.0
        return np.array(
            [self.soc, max(demand, 0.0), self.hour / (HOURS_PER_DAY - 1)],
            dtype=np.float64,
        )


@dataclass(frozen=True)
class Transition:
    """Transición (s_t, a_t, r_t, done_t, s_{t+1}) guardada en la memoria de repetición."""
    state: np.ndarray
    action: int
    reward: float
    done: bool
    next_state: np.ndarray


@dataclass(frozen=True)
class StepResult:
    """Resultado contable completo de un paso de simulación."""
    step: int
    hour: int
    action: PriceAction
    consumer_costs: Dict[int, float]
    prosumer_costs: Dict[int, float]
    provider_cost: float
    ug_cost: float
    operation_cost: float
    reward: float
    cashflows: Dict[str, float]
    allocations: Dict[int, StepAllocation]
    flows: BatteryStepFlows
    soc_before: float
    soc_after: float

    @property
    def sp_demand(self) -> float:
        return sum(a.d_sp for a in self.allocations.values())

    @property
    def sp_surplus(self) -> float:
        return sum(a.w_sp for a in self.allocations.values())

    @property
    def consumers_total(self) -> float:
        return sum(self.consumer_costs.values())

    @property
    def prosumers_total(self) -> float:
        return sum(self.prosumer_costs.values())

    def to_row(self) -> dict:
        """Fila de la tabla de trayectoria."""
        return {
            "step": self.step,
            "hour": self.hour,
            "soc": self.soc_after,
            "a": self.action.retail_coeff,
            "p": self.action.purchase_coeff,
            "sp_demand": self.sp_demand,
            "sp_surplus": self.sp_surplus,
            "reward": self.reward,
            "psi": self.provider_cost,
            "phi_consumers_total": self.consumers_total,
            "phi_prosumers_total": self.prosumers_total,
            "battery_charge": self.flows.charge_accepted,
            "battery_discharge": self.flows.discharge_accepted,
        }


# === CONFIGURACIÓN DEL ENTORNO ===

DEFAULT_EPISODE_LENGTH = 8760


class MicrogridConfig(BaseModel):
    """
    Parte serializable de la configuración del entorno (todo menos los perfiles).
    """
    model_config = ConfigDict(extra="forbid")

    battery: BatteryConfig = Field(default_factory=BatteryConfig)
    provider: ProviderConfig = Field(default_factory=ProviderConfig)
    weights: WeightConfig = Field(default_factory=WeightConfig)
    grid: ActionGrid = Field(default_factory=ActionGrid)
    episode_length: int = Field(default=DEFAULT_EPISODE_LENGTH, ge=1)
    demand_scale: Optional[float] = Field(default=None, gt=0, description="Escala de normalización de d_sp (kWh)")
    start_hour: int = Field(default=0, ge=0, lt=HOURS_PER_DAY)

    @model_validator(mode="after")
    def check_sigma_below_retail(self) -> "MicrogridConfig":
        if self.provider.sigma >= min(self.grid.retail_values):
            raise ValueError(
                f"σ ({self.provider.sigma}) debe ser menor que el coeficiente minorista "
                f"más bajo ({min(self.grid.retail_values)})"
            )
        return self


class EnvConfig(MicrogridConfig):
    """Configuración completa del entorno: microrred + perfiles de clientes."""
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    customers: List[CustomerProfile] = Field(..., min_length=1)

    @classmethod
    def from_microgrid(cls, microgrid: MicrogridConfig, customers: List[CustomerProfile]) -> "EnvConfig":
        return cls(**microgrid.model_dump(), customers=customers)

    @property
    def consumers(self) -> List[CustomerProfile]:
        return [c for c in self.customers if c.kind == CustomerKind.CONSUMER]

    @property
    def prosumers(self) -> List[CustomerProfile]:
        return [c for c in self.customers if c.kind == CustomerKind.PROSUMER]

    def resolved_demand_scale(self) -> float:
        """Escala por defecto: 10 × demanda media por cliente × número de clientes."""
        if self.demand_scale is not None:
            return self.demand_scale
        mean_demand = float(np.mean([c.demand.mean() for c in self.customers]))
        scale = 10.0 * mean_demand * len(self.customers)
        return scale if scale > 0 else 1.0

    def check_profiles(self) -> None:
        for customer in self.customers:
            if customer.length < self.episode_length:
                raise ConfigurationError(
                    f"El perfil del cliente {customer.id} tiene {customer.length} filas, "
                    f"menos que episode_length={self.episode_length}"
                )
