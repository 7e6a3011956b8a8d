from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

CI_LEVEL = 0.99
Z99 = float(stats.norm.ppf(0.5 + CI_LEVEL / 2))

CLUSTER_SOURCES = ("full_process", "thinned_process")


def wilson_interval(successes, trials: int, z: float = Z99):
    """Wilson score interval; works elementwise on arrays of success counts."""
    k = np.asarray(successes, dtype=float)
    n = float(trials)
    p = k / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return np.clip(centre - half, 0.0, 1.0), np.clip(centre + half, 0.0, 1.0)


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo controls.

    ``window_radius=None`` sizes the simulation disk automatically.
    ``block_size`` fixes how trials map to RNG substreams; changing it changes
    the realizations, changing ``workers`` never does.
    """

    trials: int = 100_000
    theta_grid: tuple = (1.0,)
    master_seed: int = 0
    window_radius: Optional[float] = None
    cluster_source: str = "thinned_process"
    steady_state_indicators: bool = True
    block_size: int = 500
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.cluster_source not in CLUSTER_SOURCES:
            raise ValueError(f"cluster_source must be one of {CLUSTER_SOURCES}")
        if self.window_radius is not None and not self.window_radius > 0:
            raise ValueError("window_radius must be positive")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        object.__setattr__(self, "theta_grid", tuple(float(t) for t in np.atleast_1d(self.theta_grid)))


@dataclass
class EmpiricalEstimate:
    theta_grid: np.ndarray
    success_freq: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    trials: int
    seed: int
    successes: np.ndarray = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, theta_grid, successes, trials, seed, **meta) -> "EmpiricalEstimate":
        successes = np.asarray(successes, dtype=np.int64)
        lo, hi = wilson_interval(successes, trials)
        return cls(
            theta_grid=np.asarray(theta_grid, float),
            success_freq=successes / trials,
            ci_low=lo,
            ci_high=hi,
            trials=int(trials),
            seed=int(seed),
            successes=successes,
            meta=dict(meta),
        )

    @property
    def std_error(self) -> np.ndarray:
        p = self.success_freq
        return np.sqrt(p * (1 - p) / self.trials)

    @property
    def ci_half_width(self) -> np.ndarray:
        return (self.ci_high - self.ci_low) / 2

    def contains(self, values: Sequence[float]) -> np.ndarray:
        v = np.asarray(values, float)
        return (v >= self.ci_low) & (v <= self.ci_high)
