"""Energy buffer of a harvesting transmitter as a birth-death Markov chain.

Per slot: availability is observed at the slot start (level >= 1), an
available node transmits with probability ``p_ch`` spending one unit, then
one unit is harvested with probability ``rho`` (capped at ``S``). This
ordering reproduces the closed-form stationary availability exactly.
"""

from dataclasses import dataclass

import numpy as np

from ._accel import njit, pick

BURN_IN_SLOTS = 10_000


@dataclass(frozen=True)
class EnergyProfile:
    rho: float
    buffer_size: int
    p_ch: float
    tx_power_units: int = 1

    def __post_init__(self):
        # rho = 0 is admitted as the degenerate never-charged node
        if not 0 <= self.rho <= 1:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho!r}")
        if not 0 < self.p_ch <= 1:
            raise ValueError(f"p_ch must lie in (0, 1], got {self.p_ch!r}")
        if int(self.buffer_size) != self.buffer_size or self.buffer_size < 1:
            raise ValueError(f"buffer_size must be a positive integer, got {self.buffer_size!r}")
        if self.tx_power_units != 1:
            raise ValueError("only unit transmit power (P = 1) has a closed-form availability")


@dataclass(frozen=True)
class BufferTrajectoryStats:
    slots: int
    availability_freq: float
    tx_freq: float


def steady_state_availability(profile: EnergyProfile) -> float:
    """Stationary probability that the buffer holds at least one unit."""
    rho, S, p = profile.rho, int(profile.buffer_size), profile.p_ch
    if rho == 1.0:
        return 1.0
    if S == 1:
        return rho / (rho + p - rho * p)
    if rho == p:
        return S / (S + 1 - rho)
    r = rho * (1 - p) / (p * (1 - rho))
    a = rho / p
    if r > 1:
        # same ratio in powers of 1/r, which cannot overflow
        ri = r ** (-S)
        return a * (ri - 1) / (ri - a)
    rs = r**S
    return a * (1 - rs) / (1 - a * rs)


def transmission_probability(profile: EnergyProfile) -> float:
    return profile.p_ch * steady_state_availability(profile)


def infinite_buffer_limit(profile: EnergyProfile) -> float:
    """Transmission probability as the buffer size grows without bound."""
    return min(profile.rho, profile.p_ch)


# -- buffer walk kernels ----------------------------------------------------
# Each slot maps level x -> min(S, max(0, x - a) + h) = clamp(x + h - a, h, S)
# with a the transmit attempt and h the harvest. Clamp-shift maps compose into
# clamp-shift maps, so the numpy path runs a parallel prefix scan over time.


def _buffer_levels_loop(attempt, harvest, S, level0):
    n = attempt.shape[0]
    levels = np.empty(n, dtype=np.int64)
    level = level0
    for t in range(n):
        levels[t] = level
        if level >= 1 and attempt[t]:
            level -= 1
        if harvest[t] and level < S:
            level += 1
    return levels


_buffer_levels_jit = njit(_buffer_levels_loop)


def _buffer_levels_numpy(attempt, harvest, S, level0):
    n = attempt.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    h = harvest.astype(np.int64)
    # map t: x -> clamp(x + d, lo, hi)
    d = h - attempt.astype(np.int64)
    lo = h
    hi = np.full(n, S, dtype=np.int64)
    # Hillis-Steele inclusive scan; afterwards map t composes maps 0..t
    step = 1
    while step < n:
        d2, lo2, hi2 = d[step:], lo[step:], hi[step:]
        new_d = d[:-step] + d2
        new_lo = np.minimum(np.maximum(lo[:-step] + d2, lo2), hi2)
        new_hi = np.minimum(np.maximum(hi[:-step] + d2, lo2), hi2)
        d = np.concatenate((d[:step], new_d))
        lo = np.concatenate((lo[:step], new_lo))
        hi = np.concatenate((hi[:step], new_hi))
        step *= 2
    levels = np.empty(n, dtype=np.int64)
    levels[0] = level0
    levels[1:] = np.minimum(np.maximum(level0 + d[:-1], lo[:-1]), hi[:-1])
    return levels


buffer_levels = pick(_buffer_levels_jit, _buffer_levels_numpy)


def transmit_trace(profile: EnergyProfile, slots: int, rng: np.random.Generator, burn_in: int = BURN_IN_SLOTS, initial_level: int = 0):
    """Per-slot (available, transmitted) booleans of one node after burn-in."""
    total = slots + burn_in
    attempt = rng.random(total) < profile.p_ch
    harvest = rng.random(total) < profile.rho
    levels = buffer_levels(attempt, harvest, int(profile.buffer_size), int(initial_level))
    up = levels[burn_in:] >= 1
    return up, up & attempt[burn_in:]


def simulate_buffer(
    profile: EnergyProfile,
    slots: int,
    seed: int,
    *,
    burn_in: int = BURN_IN_SLOTS,
    initial_level: int = 0,
) -> BufferTrajectoryStats:
    """Run one buffer trajectory and report empirical availability and transmit rates.

    The first ``burn_in`` slots are simulated but excluded from the statistics.
    """
    if slots < 1:
        raise ValueError("slots must be >= 1")
    up, tx = transmit_trace(profile, slots, np.random.default_rng(seed), burn_in, initial_level)
    return BufferTrajectoryStats(
        slots=slots,
        availability_freq=np.count_nonzero(up) / slots,
        tx_freq=np.count_nonzero(tx) / slots,
    )
