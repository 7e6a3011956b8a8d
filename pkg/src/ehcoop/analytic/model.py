from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..geometry import InClusterAvailability


@dataclass(frozen=True)
class TierConfig:
    """An interfering PPP tier: intensity, transmission probability, normalized power."""

    intensity: float
    tx_prob: float
    power: float

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("tier intensity must be >= 0")
        if not 0 < self.tx_prob <= 1:
            raise ValueError("tier tx_prob must lie in (0, 1]")
        if not self.power > 0:
            raise ValueError("tier power must be > 0")


def dbm_to_linear(dbm: float) -> float:
    """Noise power in watts, relative to a 1 W transmitter."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class NetworkModel:
    tx_intensity: float
    rx_intensity: float
    eta: float
    noise: float = 0.0
    out_cluster_tx_prob: float = 1.0
    tiers: tuple = ()
    in_cluster: Optional[InClusterAvailability] = None

    def __post_init__(self):
        if not self.tx_intensity > 0:
            raise ValueError("tx_intensity must be > 0")
        if not self.rx_intensity > 0:
            raise ValueError("rx_intensity must be > 0")
        if not self.eta > 2:
            raise ValueError(f"eta must exceed 2, got {self.eta!r}")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")
        if not 0 < self.out_cluster_tx_prob <= 1:
            raise ValueError("out_cluster_tx_prob must lie in (0, 1]")
        object.__setattr__(self, "tiers", tuple(self.tiers))

    @property
    def density_ratio(self) -> float:
        """``beta = p_tr * lambda / lambda_u``."""
        return self.out_cluster_tx_prob * self.tx_intensity / self.rx_intensity

    def with_(self, **changes) -> "NetworkModel":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class CcdfCurve:
    thresholds: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "thresholds", np.asarray(self.thresholds, float))
        object.__setattr__(self, "values", np.asarray(self.values, float))
        if self.thresholds.shape != self.values.shape:
            raise ValueError("thresholds and values must have the same shape")

    def is_monotone(self, atol: float = 1e-12) -> bool:
        order = np.argsort(self.thresholds)
        return bool(np.all(np.diff(self.values[order]) <= atol))
