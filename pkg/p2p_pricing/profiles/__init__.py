"""
Perfiles horarios de carga y generación PV.

Lectura de exportaciones tipo Pymgrid (`load_kwh,pv_kwh`), escalado al nivel
de un hogar, asignación de clientes con variación multiplicativa por id y un
generador sintético con forma diaria para pruebas y corridas sin datos.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from ..schemas import (
    CustomerKind,
    CustomerProfile,
    ProfileDataError,
    ConfigurationError,
    HOURS_PER_DAY,
)

logger = logging.getLogger(__name__)

LOAD_COLUMN = "load_kwh"
PV_COLUMN = "pv_kwh"
SYNTHETIC_SOURCE = "synthetic"
BUNDLED_SOURCE = "bundled"
BUNDLED_PATH = Path(__file__).resolve().parent.parent / "data" / "synthetic_8760.csv"

# === MODELOS ===

@dataclass(frozen=True)
class ProfileSeries:
    """Serie horaria validada: carga y PV (kWh por hora), misma longitud."""
    load: np.ndarray
    pv: np.ndarray

    def __post_init__(self):
        if self.load.shape != self.pv.shape or self.load.ndim != 1:
            raise ProfileDataError(
                f"Carga y PV deben ser vectores de igual longitud ({self.load.shape} vs {self.pv.shape})"
            )
        for name, values in ((LOAD_COLUMN, self.load), (PV_COLUMN, self.pv)):
            if not np.all(np.isfinite(values)):
                raise ProfileDataError("Valores no finitos en la serie", column=name)
            if np.any(values < 0):
                raise ProfileDataError("Valores negativos en la serie", column=name)

    @property
    def length(self) -> int:
        return int(self.load.shape[0])


class DatasetConfig(BaseModel):
    """Cómo construir los clientes de la microrred a partir de los perfiles."""
    model_config = ConfigDict(extra="forbid")

    source: Union[str, List[str]] = Field(
        default=SYNTHETIC_SOURCE,
        description="Ruta CSV, lista de rutas (una por grupo), 'synthetic' o 'bundled'",
    )
    target_mean_load: float = Field(default=1.5, gt=0, description="Carga media por hogar (kWh/h)")
    customer_count: int = Field(default=10, ge=1)
    prosumer_fraction: float = Field(default=0.5, ge=0, le=1)
    jitter: float = Field(default=0.2, ge=0, lt=1)
    seed: int = 0
    synthetic_length: int = Field(default=8760, ge=HOURS_PER_DAY)

    @property
    def prosumer_count(self) -> int:
        # round() evita que 10·0.7 = 7.000000000000001 sume un prosumidor
        return int(math.ceil(round(self.customer_count * self.prosumer_fraction, 9)))


# === LECTURA Y ESCRITURA ===

def load_csv(path: Union[str, Path]) -> ProfileSeries:
    """
    Lee un CSV con columnas `load_kwh` y `pv_kwh`.
    Los errores indican la fila de datos (1 = primera fila tras el encabezado).
    """
    path = Path(path)
    if not path.is_file():
        raise ProfileDataError("No se encuentra el archivo de perfiles", path=str(path))

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ProfileDataError(f"CSV ilegible: {e}", path=str(path)) from e

    columns = [c.strip() for c in frame.columns]
    frame.columns = columns
    for column in (LOAD_COLUMN, PV_COLUMN):
        if column not in columns:
            raise ProfileDataError(
                f"Falta la columna requerida '{column}'", path=str(path), column=column
            )

    arrays = {}
    for column in (LOAD_COLUMN, PV_COLUMN):
        raw = frame[column].str.strip()
        values = pd.to_numeric(raw, errors="coerce")
        bad = values.isna() | ~np.isfinite(values.fillna(0.0)) | (values < 0)
        if bad.any():
            position = int(np.flatnonzero(bad.to_numpy())[0])
            raise ProfileDataError(
                f"Valor inválido '{raw.iloc[position]}' (se esperaba un número no negativo)",
                path=str(path),
                row=position + 1,
                column=column,
            )
        arrays[column] = values.to_numpy(dtype=np.float64)

    series = ProfileSeries(load=arrays[LOAD_COLUMN], pv=arrays[PV_COLUMN])
    logger.debug(f"📥 Perfiles leídos de {path}: {series.length} filas")
    return series


def write_csv(series: ProfileSeries, path: Union[str, Path]) -> Path:
    """Escribe la serie en el formato de entrada."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({LOAD_COLUMN: series.load, PV_COLUMN: series.pv})
    frame.to_csv(path, index=False, float_format="%.6f")
    return path


# === TRANSFORMACIONES ===

def scale_profiles(series: ProfileSeries, target_mean: float) -> ProfileSeries:
    """
    Lleva la carga media a target_mean; la PV se escala con el mismo factor.
    """
    mean_load = float(np.mean(series.load))
    if not mean_load > 0:
        raise ProfileDataError("No se puede escalar una serie de carga con media cero")
    factor = target_mean / mean_load
    return ProfileSeries(load=series.load * factor, pv=series.pv * factor)


def _jitter_factor(seed: int, customer_id: int, stream: int, amplitude: float) -> float:
    if amplitude == 0:
        return 1.0
    rng = np.random.default_rng([seed, customer_id, stream])
    return 1.0 + float(rng.uniform(-amplitude, amplitude))


def _build_customers(sources: List[ProfileSeries], cfg: DatasetConfig) -> List[CustomerProfile]:
    n_prosumers = cfg.prosumer_count
    customers = []
    for customer_id in range(cfg.customer_count):
        base = sources[customer_id % len(sources)]
        demand = base.load * _jitter_factor(cfg.seed, customer_id, 0, cfg.jitter)
        if customer_id < n_prosumers:
            kind = CustomerKind.PROSUMER
            generation = base.pv * _jitter_factor(cfg.seed, customer_id, 1, cfg.jitter)
        else:
            kind = CustomerKind.CONSUMER
            generation = np.zeros_like(base.pv)
        customers.append(
            CustomerProfile(id=customer_id, kind=kind, demand=demand, generation=generation)
        )
    return customers


def assign_customers(series: ProfileSeries, cfg: DatasetConfig) -> List[CustomerProfile]:
    """
    Crea cfg.customer_count clientes a partir de una serie escalada.
    Los primeros ⌈count·fraction⌉ ids son prosumidores.
    """
    return _build_customers([scale_profiles(series, cfg.target_mean_load)], cfg)


def load_sources(paths: List[Union[str, Path]], cfg: DatasetConfig) -> List[CustomerProfile]:
    """
    Varias fuentes, una por grupo de clientes: el cliente i usa el archivo i mod len(paths).
    """
    if not paths:
        raise ConfigurationError("La lista de fuentes de perfiles está vacía")
    series = [scale_profiles(load_csv(p), cfg.target_mean_load) for p in paths]
    lengths = {s.length for s in series}
    if len(lengths) > 1:
        raise ProfileDataError(f"Las fuentes tienen longitudes distintas: {sorted(lengths)}")
    return _build_customers(series, cfg)


def synth_profiles(length: int, seed: int) -> ProfileSeries:
    """
    Perfil sintético: carga con pico vespertino y PV de media onda diurna
    (cero de noche), con variación estacional y ruido sembrado.
    """
    if length < HOURS_PER_DAY:
        raise ConfigurationError(f"length debe ser ≥ {HOURS_PER_DAY}, se recibió {length}")
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    hour = t % HOURS_PER_DAY
    day = t // HOURS_PER_DAY
    season = 1.0 + 0.3 * np.sin(2 * np.pi * day / 365.0)

    load = 1.0 + 0.5 * np.sin(2 * np.pi * (hour - 13) / HOURS_PER_DAY)
    load = np.clip(load + rng.normal(0.0, 0.1, length), 0.0, None)

    daylight = (hour > 6) & (hour < 18)
    pv_shape = np.where(daylight, np.sin(np.pi * (hour - 6) / 12.0), 0.0)
    pv = 3.0 * season * pv_shape * (1.0 + rng.normal(0.0, 0.15, length))
    pv = np.clip(pv, 0.0, None)
    return ProfileSeries(load=load, pv=pv)


def load_dataset(cfg: DatasetConfig) -> List[CustomerProfile]:
    """Resuelve cfg.source y devuelve los perfiles de todos los clientes."""
    source = cfg.source
    if isinstance(source, list):
        return load_sources(source, cfg)
    if source == SYNTHETIC_SOURCE:
        logger.info(f"🧪 Usando perfiles sintéticos ({cfg.synthetic_length} horas, seed={cfg.seed})")
        return assign_customers(synth_profiles(cfg.synthetic_length, cfg.seed), cfg)
    if source == BUNDLED_SOURCE:
        return assign_customers(load_csv(BUNDLED_PATH), cfg)
    return assign_customers(load_csv(source), cfg)


# === EXPORTACIÓN ===

def export_prosumer_series(customers: List[CustomerProfile], hours: int = 48) -> pd.DataFrame:
    """Demanda vs. generación del primer prosumidor (datos de la figura diaria)."""
    prosumers = [c for c in customers if c.kind == CustomerKind.PROSUMER]
    if not prosumers:
        return pd.DataFrame(columns=["hour", "demand", "generation", "net"])
    first = prosumers[0]
    n = min(hours, first.length)
    return pd.DataFrame({
        "hour": np.arange(n),
        "demand": first.demand[:n],
        "generation": first.generation[:n],
        "net": first.generation[:n] - first.demand[:n],
    })


__all__ = [
    "LOAD_COLUMN",
    "PV_COLUMN",
    "SYNTHETIC_SOURCE",
    "BUNDLED_SOURCE",
    "BUNDLED_PATH",
    "ProfileSeries",
    "DatasetConfig",
    "load_csv",
    "write_csv",
    "scale_profiles",
    "assign_customers",
    "load_sources",
    "synth_profiles",
    "load_dataset",
    "export_prosumer_series",
]
