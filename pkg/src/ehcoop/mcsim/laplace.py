"""Empirical Laplace transform of PPP interference and K-th neighbour sampling."""

import math

import numpy as np

from .fields import block_rng, disk_points, mean_kth_distance, run_blocks, window_for_guard
from .kernels import annulus_interference, field_cluster
from .stats import SimConfig

# allowed Laplace deficit from interferers beyond the window
LAPLACE_TAIL = 1e-4


def laplace_window(intensity_eff: float, power: float, guard: float, eta: float, s: float) -> float:
    """Window radius whose truncated tail shifts ``E[exp(-s I)]`` by at most ~1e-4."""
    # tail exponent <= pi lambda s P 2 R**(2 - eta) / (eta - 2)
    r_tail = (2 * math.pi * intensity_eff * s * power / ((eta - 2) * LAPLACE_TAIL)) ** (1 / (eta - 2))
    return max(r_tail, window_for_guard(guard, eta) if guard > 0 else 0.0, 1e-12)


def empirical_laplace(intensity_eff: float, power: float, guard: float, eta: float, s: float, sim: SimConfig, return_stderr: bool = False):
    """Sample mean of ``exp(-s I)`` with ``I`` the faded interference outside a guard disk.

    With ``return_stderr`` the standard error of the mean is returned too.
    """
    if not eta > 2:
        raise ValueError(f"eta must exceed 2, got {eta!r}")
    if s < 0 or intensity_eff < 0 or guard < 0:
        raise ValueError("s, intensity_eff and guard must be non-negative")
    if s == 0 or intensity_eff == 0:
        return (1.0, 0.0) if return_stderr else 1.0
    R = sim.window_radius or laplace_window(intensity_eff, power, guard, eta, s)
    R2, g2 = R * R, guard * guard

    def block(b, n):
        rng = block_rng(sim.master_seed, b)
        counts = rng.poisson(intensity_eff * math.pi * (R2 - g2), n)
        m = int(counts.sum())
        interf = annulus_interference(counts, rng.random(m), rng.standard_exponential(m), np.full(n, g2), R2, eta / 2, power)
        v = np.exp(-s * interf)
        return v.sum(), (v * v).sum()

    blocks = run_blocks(sim.trials, sim.block_size, sim.workers, block)
    n = sim.trials
    mean = sum(b[0] for b in blocks) / n
    if not return_stderr:
        return float(mean)
    var = max(sum(b[1] for b in blocks) / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return float(mean), math.sqrt(var / n)


def sample_kth_distance(intensity: float, K: int, sim: SimConfig) -> np.ndarray:
    """Distances to the K-th nearest point of realized PPP fields, one per trial."""
    if K < 1 or not intensity > 0:
        raise ValueError("K must be >= 1 and intensity > 0")
    R = sim.window_radius or 6.0 * mean_kth_distance(intensity, K) + 4.0 / math.sqrt(intensity)

    def block(b, n):
        rng = block_rng(sim.master_seed, b)
        counts = rng.poisson(intensity * math.pi * R * R, n)
        m = int(counts.sum())
        xy = disk_points(rng, m, R)
        near, _ = field_cluster(counts, xy[:, 0] ** 2 + xy[:, 1] ** 2, np.zeros(m), np.empty(0), 1.0, K, 1.0)
        return np.sqrt(near[:, K - 1])

    return np.concatenate(run_blocks(sim.trials, sim.block_size, sim.workers, block))
