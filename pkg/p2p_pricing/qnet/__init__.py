"""
Red Q feed-forward mínima en numpy: parámetros, forward, gradiente analítico
del error cuadrático sobre la acción tomada, y actualización SGD.

Las capas calculan h @ W + b; las ocultas usan ReLU y la de salida es lineal.
Todo en float64 para que los chequeos por diferencias finitas sean estables.
"""

import io
import json
import zipfile
from dataclasses import dataclass
from pathlib import Path
from typing import List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..schemas import ContractError

CHECKPOINT_FORMAT = "p2p-pricing-qnet"
CHECKPOINT_VERSION = 1
# Fecha fija en el zip: dos checkpoints con los mismos parámetros son idénticos byte a byte
_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)

# === CONFIGURACIÓN Y PARÁMETROS ===

class NetConfig(BaseModel):
    """Arquitectura de la red Q y tasa de aprendizaje ζ."""
    model_config = ConfigDict(extra="forbid")

    input_size: int = Field(default=3, ge=1)
    hidden_sizes: List[int] = Field(default_factory=lambda: [64, 64])
    output_size: int = Field(default=25, ge=1)
    activation: Literal["relu"] = "relu"
    init: Literal["he"] = "he"
    learning_rate: float = Field(default=0.001, ge=0)

    @field_validator("hidden_sizes")
    @classmethod
    def sizes_positive(cls, sizes: List[int]) -> List[int]:
        if any(s < 1 for s in sizes):
            raise ValueError("Cada capa oculta necesita al menos una unidad.")
        return sizes

    @property
    def layer_sizes(self) -> List[int]:
        return [self.input_size, *self.hidden_sizes, self.output_size]


@dataclass(eq=False)
class NetParams:
    """Matrices de pesos y vectores de bias por capa (Q o su copia Q̂)."""
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def copy(self) -> "NetParams":
        return NetParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )

    def arrays(self) -> List[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def same_as(self, other: "NetParams") -> bool:
        mine, theirs = self.arrays(), other.arrays()
        return len(mine) == len(theirs) and all(
            a.shape == b.shape and np.array_equal(a, b) for a, b in zip(mine, theirs)
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


# Mismo contenedor para ∂L/∂θ
NetGradients = NetParams


def init(cfg: NetConfig, seed: int) -> NetParams:
    """Pesos N(0, 2/fan_in), bias en cero; determinista dado el seed."""
    rng = np.random.default_rng(seed)
    sizes = cfg.layer_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out, dtype=np.float64))
    return NetParams(weights=weights, biases=biases)


# === FORWARD Y GRADIENTE ===

def _as_batch(observation: np.ndarray) -> Tuple[np.ndarray, bool]:
    x = np.asarray(observation, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ContractError("Entrada no finita para la red Q")
    single = x.ndim == 1
    return np.atleast_2d(x), single


def _forward_layers(params: NetParams, x: np.ndarray):
    activations = [x]
    pre_activations = []
    h = x
    for w, b in zip(params.weights[:-1], params.biases[:-1]):
        z = h @ w + b
        pre_activations.append(z)
        h = np.maximum(z, 0.0)
        activations.append(h)
    q = h @ params.weights[-1] + params.biases[-1]
    return q, activations, pre_activations


def forward(params: NetParams, observation: np.ndarray) -> np.ndarray:
    """
    Valores Q para una observación (vector) o un lote (matriz fila por observación).
    """
    x, single = _as_batch(observation)
    q, _, _ = _forward_layers(params, x)
    return q[0] if single else q


def grad(
    params: NetParams,
    observations: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
) -> Tuple[NetGradients, float]:
    """
    ∂L/∂θ para L = mean((Q(s,a) − y)²); el gradiente solo fluye por la salida
    de la acción tomada. Devuelve (gradientes, L).
    """
    x, _ = _as_batch(observations)
    actions = np.asarray(actions, dtype=np.int64).reshape(-1)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    batch = x.shape[0]
    if batch == 0:
        raise ContractError("El lote para el gradiente está vacío")

    q, activations, pre_activations = _forward_layers(params, x)
    rows = np.arange(batch)
    diff = q[rows, actions] - targets
    loss = float(np.mean(diff ** 2))

    delta = np.zeros_like(q)
    delta[rows, actions] = 2.0 * diff / batch

    n_layers = len(params.weights)
    grad_w: List[np.ndarray] = [None] * n_layers
    grad_b: List[np.ndarray] = [None] * n_layers
    for layer in reversed(range(n_layers)):
        grad_w[layer] = activations[layer].T @ delta
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ params.weights[layer].T) * (pre_activations[layer - 1] > 0)
    return NetGradients(weights=grad_w, biases=grad_b), loss


def sgd_update(params: NetParams, gradients: NetGradients, learning_rate: float) -> NetParams:
    """θ ← θ − ζ·∂L/∂θ (devuelve parámetros nuevos)."""
    for p, g in zip(params.arrays(), gradients.arrays()):
        if p.shape != g.shape:
            raise ContractError(f"Forma de gradiente {g.shape} no coincide con {p.shape}")
    return NetParams(
        weights=[w - learning_rate * gw for w, gw in zip(params.weights, gradients.weights)],
        biases=[b - learning_rate * gb for b, gb in zip(params.biases, gradients.biases)],
    )


# === CHECKPOINTS ===

def _zip_entry(name: str) -> zipfile.ZipInfo:
    info = zipfile.ZipInfo(name, date_time=_ZIP_EPOCH)
    info.compress_type = zipfile.ZIP_STORED
    info.external_attr = 0o644 << 16
    return info


def save_checkpoint(path: Union[str, Path], cfg: NetConfig, params: NetParams) -> Path:
    """Guarda config + todas las matrices; el round-trip es exacto bit a bit."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": cfg.model_dump(),
        "layers": len(params.weights),
    }
    with zipfile.ZipFile(path, "w") as zf:
        zf.writestr(_zip_entry("header.json"), json.dumps(header, sort_keys=True))
        for i, (w, b) in enumerate(zip(params.weights, params.biases)):
            for name, array in ((f"W{i}.npy", w), (f"b{i}.npy", b)):
                buffer = io.BytesIO()
                np.lib.format.write_array(buffer, np.ascontiguousarray(array), allow_pickle=False)
                zf.writestr(_zip_entry(name), buffer.getvalue())
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[NetConfig, NetParams]:
    """Lee un checkpoint escrito por save_checkpoint."""
    path = Path(path)
    try:
        return _read_checkpoint(path)
    except (zipfile.BadZipFile, KeyError, ValueError) as e:
        raise ContractError(f"{path} no es un checkpoint de red Q válido: {e}") from e


def _read_checkpoint(path: Path) -> Tuple[NetConfig, NetParams]:
    with zipfile.ZipFile(path) as zf:
        header = json.loads(zf.read("header.json"))
        if header.get("format") != CHECKPOINT_FORMAT:
            raise ContractError(f"{path} no es un checkpoint de red Q")
        if header.get("version") != CHECKPOINT_VERSION:
            raise ContractError(
                f"Versión de checkpoint {header.get('version')} no soportada (se espera {CHECKPOINT_VERSION})"
            )
        weights, biases = [], []
        for i in range(header["layers"]):
            with zf.open(f"W{i}.npy") as fh:
                weights.append(np.lib.format.read_array(fh, allow_pickle=False))
            with zf.open(f"b{i}.npy") as fh:
                biases.append(np.lib.format.read_array(fh, allow_pickle=False))
    return NetConfig.model_validate(header["config"]), NetParams(weights=weights, biases=biases)


__all__ = [
    "NetConfig",
    "NetParams",
    "NetGradients",
    "init",
    "forward",
    "grad",
    "sgd_update",
    "save_checkpoint",
    "load_checkpoint",
]
