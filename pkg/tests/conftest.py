"""
Fixtures compartidas por los tests del laboratorio.
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from p2p_pricing.lab import ExperimentConfig
from p2p_pricing.profiles import DatasetConfig, assign_customers, synth_profiles
from p2p_pricing.schemas import (
    BatteryConfig,
    BatteryState,
    CustomerKind,
    CustomerProfile,
    EnvConfig,
    MicrogridConfig,
)

RUN_SLOW = os.getenv("P2P_LAB_RUN_SLOW") == "1"


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip_slow = pytest.mark.skip(reason="test lento: define P2P_LAB_RUN_SLOW=1 para ejecutarlo")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def battery_cfg():
    return BatteryConfig()


@pytest.fixture
def half_full():
    return BatteryState(soc=0.5)


def make_customer(customer_id, demand, generation=None):
    demand = np.asarray(demand, dtype=np.float64)
    if generation is None:
        return CustomerProfile(customer_id, CustomerKind.CONSUMER, demand, np.zeros_like(demand))
    generation = np.asarray(generation, dtype=np.float64)
    return CustomerProfile(customer_id, CustomerKind.PROSUMER, demand, generation)


@pytest.fixture
def small_env_cfg():
    """Diez clientes sobre 48 horas sintéticas, episodios de 24 pasos."""
    dataset = DatasetConfig(customer_count=10, prosumer_fraction=0.5, synthetic_length=48, seed=3)
    customers = assign_customers(synth_profiles(48, seed=3), dataset)
    return EnvConfig.from_microgrid(MicrogridConfig(episode_length=24), customers)


@pytest.fixture
def tiny_config():
    """Experimento completo que entrena en segundos."""
    return ExperimentConfig.from_tree({
        "run_id": "tiny",
        "seeds": [0],
        "env": {"episode_length": 48},
        "agent": {
            "batch_size": 8,
            "learn_start": 16,
            "memory_size": 64,
            "total_steps": 120,
            "target_update": 20,
            "net": {"hidden_sizes": [8]},
        },
        "dataset": {"source": "synthetic", "synthetic_length": 48, "customer_count": 4},
    })
