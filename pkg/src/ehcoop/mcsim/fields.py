"""PPP sampling, RNG substreams and simulation-window sizing."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from ..specfun import gamma_fn

# truncated / in-window expected interference
TRUNCATION_RATIO = 1e-3
MIN_WINDOW_IN_DK = 5.0


def block_rng(master_seed: int, block: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one block of trials."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(stream, block))))


def run_blocks(trials: int, block_size: int, workers: int, fn: Callable[[int, int], object]) -> List[object]:
    """Call ``fn(block_index, n_trials_in_block)`` for every block, results in block order."""
    sizes = [min(block_size, trials - s) for s in range(0, trials, block_size)]
    if workers <= 1:
        return [fn(b, n) for b, n in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))


@dataclass
class PointSet:
    xy: np.ndarray

    @property
    def count(self) -> int:
        return self.xy.shape[0]

    @property
    def r(self) -> np.ndarray:
        return np.hypot(self.xy[:, 0], self.xy[:, 1])


def sample_ppp(intensity: float, window_radius: float, seed) -> PointSet:
    """Homogeneous PPP on the disk of radius ``window_radius`` centred at the origin."""
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = rng.poisson(intensity * math.pi * window_radius**2)
    return PointSet(disk_points(rng, n, window_radius))


def disk_points(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    phi = 2 * math.pi * rng.random(n)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


@dataclass
class FieldRealization:
    """One snapshot of the network around the typical user at the origin.

    ``tx_active`` are the activity indicators of the TX tier, ``tx_fading``
    the exponential fading marks; tiers and users follow the same layout.
    """

    tx_xy: np.ndarray
    tx_active: np.ndarray
    tx_fading: np.ndarray
    tier_xy: list
    tier_fading: list
    user_xy: np.ndarray


def realize_field(model, window_radius: float, seed) -> FieldRealization:
    """Draw every process of ``model`` once on a disk (inspection and small tests)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    tx = disk_points(rng, rng.poisson(model.tx_intensity * math.pi * window_radius**2), window_radius)
    active = rng.random(tx.shape[0]) < model.out_cluster_tx_prob
    fading = rng.standard_exponential(tx.shape[0])
    tier_xy, tier_fading = [], []
    for tier in model.tiers:
        pts = disk_points(rng, rng.poisson(tier.tx_prob * tier.intensity * math.pi * window_radius**2), window_radius)
        tier_xy.append(pts)
        tier_fading.append(rng.standard_exponential(pts.shape[0]))
    users = disk_points(rng, rng.poisson(model.rx_intensity * math.pi * window_radius**2), window_radius)
    return FieldRealization(tx, active, fading, tier_xy, tier_fading, users)


def mean_kth_distance(intensity: float, K: int) -> float:
    """``E[d_K]`` for a planar PPP."""
    return gamma_fn(K + 0.5) / (gamma_fn(K) * math.sqrt(math.pi * intensity))


def window_for_guard(guard: float, eta: float, ratio: float = TRUNCATION_RATIO) -> float:
    """Smallest R with ``tail(R) / in_window(guard, R) <= ratio`` for ``r**-eta`` interference."""
    return guard * (1.0 + 1.0 / ratio) ** (1.0 / (eta - 2.0))


def auto_window(guard: float, eta: float, mean_dk: float) -> float:
    return max(window_for_guard(guard, eta), MIN_WINDOW_IN_DK * mean_dk)
