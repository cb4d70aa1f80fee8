#!/usr/bin/env python3
"""
🔍 Verificador del laboratorio de precios P2P
Verifica dependencias, archivos, importaciones y el paso de referencia calculado a mano.
"""

import os
import sys
from datetime import datetime
from pathlib import Path

PACKAGE_DIR = Path(__file__).resolve().parent

# Paso de referencia: un consumidor (d=2) y un prosumidor (g=5, d=2), a=p=0.4
HAND_TRACE_EXPECTED = {
    "phi_consumer": 0.65,
    "phi_prosumer": -1.5,
    "psi": 0.475,
    "rho": -0.065,
    "reward": 0.065,
}
HAND_TRACE_TOLERANCE = 1e-12


def print_header(title):
    """Imprime un encabezado estilizado."""
    print("\n" + "=" * 60)
    print(f"🔍 {title}")
    print("=" * 60)


def check_python_version():
    """Verifica la versión de Python."""
    print(f"🐍 Python {sys.version}")
    return sys.version_info >= (3, 9)


def check_dependencies():
    """Verifica las dependencias requeridas."""
    dependencies = {
        "pydantic": "Modelos de configuración",
        "numpy": "Cálculo numérico y red Q",
        "pandas": "Tablas y CSV",
        "gymnasium": "Interfaz del entorno",
        "langgraph": "Grafo de corridas",
        "dotenv": "Variables de entorno",
    }

    results = {}
    for dep, description in dependencies.items():
        try:
            __import__(dep)
            results[dep] = "✅"
            print(f"✅ {dep}: {description}")
        except ImportError:
            results[dep] = "❌"
            print(f"❌ {dep}: {description} - NO DISPONIBLE")

    return all(status == "✅" for status in results.values())


def check_files():
    """Verifica que los archivos principales existan."""
    required_files = {
        "cli.py": "Línea de comandos",
        "schemas/__init__.py": "Esquemas y errores",
        "env/__init__.py": "Entorno MDP",
        "dqn/dqn_train.py": "Entrenamiento DQN",
        "lab/lab_graph.py": "Grafo de corridas",
        "data/synthetic_8760.csv": "Perfiles incluidos",
    }

    results = {}
    for file_path, description in required_files.items():
        if (PACKAGE_DIR / file_path).exists():
            results[file_path] = "✅"
            print(f"✅ {file_path}: {description}")
        else:
            results[file_path] = "❌"
            print(f"❌ {file_path}: {description} - NO ENCONTRADO")

    return all(status == "✅" for status in results.values())


def check_imports():
    """Verifica que las importaciones funcionen y que la config base sea válida."""
    print("\n🔗 Verificando importaciones internas...")

    try:
        sys.path.insert(0, str(PACKAGE_DIR.parent))
        from p2p_pricing.lab import ExperimentConfig
        print("✅ p2p_pricing.lab: Importación exitosa")

        config = ExperimentConfig()
        print(f"✅ ExperimentConfig: línea base con {config.env.grid.size} acciones")
        return True

    except Exception as e:
        print(f"❌ Error en importaciones: {str(e)}")
        return False


def build_hand_trace_env():
    """Entorno de dos clientes del paso de referencia (Λ=30, SOC=0.5, σ=0.15, α=β=0.3)."""
    import numpy as np

    from p2p_pricing.env import MicrogridPricingEnv
    from p2p_pricing.schemas import (
        BatteryConfig,
        CustomerKind,
        CustomerProfile,
        EnvConfig,
        ProviderConfig,
        WeightConfig,
    )

    customers = [
        CustomerProfile(0, CustomerKind.PROSUMER, np.array([2.0]), np.array([5.0])),
        CustomerProfile(1, CustomerKind.CONSUMER, np.array([2.0]), np.array([0.0])),
    ]
    cfg = EnvConfig(
        customers=customers,
        battery=BatteryConfig(capacity_kwh=30.0, initial_soc=0.5),
        provider=ProviderConfig(sigma=0.15),
        weights=WeightConfig(alpha=0.3, beta=0.3),
        episode_length=1,
    )
    return MicrogridPricingEnv(cfg)


def check_hand_trace():
    """Ejecuta el paso de referencia y compara con los valores calculados a mano."""
    print("\n🧮 Verificando paso de referencia...")

    try:
        sys.path.insert(0, str(PACKAGE_DIR.parent))
        env = build_hand_trace_env()
        env.reset(seed=0)
        # a=0.4, p=0.4 → índice 1·5 + 1
        _, result = env.simulate(6)
    except Exception as e:
        print(f"❌ Error ejecutando el paso de referencia: {str(e)}")
        return False

    observed = {
        "phi_consumer": result.consumer_costs[1],
        "phi_prosumer": result.prosumer_costs[0],
        "psi": result.provider_cost,
        "rho": result.operation_cost,
        "reward": result.reward,
    }
    ok = True
    for name, expected in HAND_TRACE_EXPECTED.items():
        if abs(observed[name] - expected) <= HAND_TRACE_TOLERANCE:
            print(f"✅ {name} = {observed[name]:.12f}")
        else:
            print(f"❌ {name} = {observed[name]:.12f} (esperado {expected})")
            ok = False
    return ok


def main():
    """Función principal de verificación."""
    print_header("VERIFICADOR DEL LABORATORIO DE PRECIOS P2P")
    print(f"📅 Fecha: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print(f"📁 Directorio: {os.getcwd()}")

    checks = [
        ("Versión de Python", check_python_version),
        ("Dependencias", check_dependencies),
        ("Archivos del proyecto", check_files),
        ("Importaciones internas", check_imports),
        ("Paso de referencia", check_hand_trace),
    ]

    results = []
    for check_name, check_func in checks:
        print_header(f"VERIFICANDO: {check_name}")
        result = check_func()
        results.append((check_name, result))

    print_header("RESUMEN DE VERIFICACIÓN")
    all_passed = True

    for check_name, passed in results:
        status = "✅ PASÓ" if passed else "❌ FALLÓ"
        print(f"{status}: {check_name}")
        if not passed:
            all_passed = False

    print("\n" + "=" * 60)
    if all_passed:
        print("🎉 ¡TODAS LAS VERIFICACIONES PASARON!")
        print("✅ El laboratorio está listo para usar")
        print("\n🚀 Para entrenar la línea base ejecuta:")
        print("   python -m p2p_pricing train --config configs/baseline.json")
    else:
        print("⚠️  ALGUNAS VERIFICACIONES FALLARON")
        print("🔧 Revisa los errores arriba antes de usar el laboratorio")

    print("=" * 60)
    return all_passed


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
