"""Monte Carlo cluster access and joint (selected and decoded) success."""

import math
from typing import Optional, Sequence

import numpy as np

from ..analytic.model import NetworkModel
from .fields import block_rng, disk_points, run_blocks
from .kernels import count_candidates
from .link import _FieldPlan, _check_omega, _estimate, _in_cluster_probs, _profiles_for, _unconditioned_block
from .stats import EmpiricalEstimate, SimConfig, wilson_interval


def simulate_cluster_access(model: NetworkModel, K: int, sim: SimConfig) -> EmpiricalEstimate:
    """Frequency with which the typical user wins its cluster's uniform draw.

    Candidates are the users whose K nearest transmitters are exactly the
    typical user's. The returned estimate carries one column; its threshold
    grid is ignored.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    plan = _FieldPlan(model, K, sim, with_users=True)
    R2 = plan.R_field**2

    def block(b, n):
        rng = block_rng(sim.master_seed, b)
        counts = rng.poisson(plan.lam_c * math.pi * R2, n)
        xy = disk_points(rng, int(counts.sum()), plan.R_field)
        ucounts = rng.poisson(model.rx_intensity * math.pi * R2, n)
        uxy = disk_points(rng, int(ucounts.sum()), plan.R_field)
        ncand = count_candidates(counts, xy, ucounts, uxy, K, plan.extra)
        short = counts < K
        won = ~short & (np.floor(rng.random(n) * ncand) == 0)
        return int(np.count_nonzero(won)), int(np.count_nonzero(short)), float(np.sum(ncand))

    blocks = run_blocks(sim.trials, sim.block_size, sim.workers, block)
    wins = sum(b[0] for b in blocks)
    return EmpiricalEstimate.from_counts(
        (0.0,),
        [wins],
        sim.trials,
        sim.master_seed,
        mode="cluster_access",
        cluster_source=sim.cluster_source,
        window_radius=plan.R_field,
        short_fields=sum(b[1] for b in blocks),
        mean_candidates=sum(b[2] for b in blocks) / sim.trials,
    )


def simulate_overall_success(
    model: NetworkModel,
    K: int,
    sim: SimConfig,
    omega: Optional[Sequence[float]] = None,
    profiles=None,
) -> EmpiricalEstimate:
    """Joint frequency of being selected by the cluster and decoding above each threshold.

    ``omega`` optionally pins the normalized in-cluster distances; by default
    members sit at their realized distances. ``meta["access_freq"]`` and its
    Wilson interval report the selection frequency alone.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    omega = _check_omega(omega, K)
    profiles = _profiles_for(K, profiles, sim)
    plan = _FieldPlan(model, K, sim, with_users=True)
    block = _unconditioned_block(model, K, omega, sim, profiles, plan, True, _in_cluster_probs(model, K))
    blocks = run_blocks(sim.trials, sim.block_size, sim.workers, block)
    est = _estimate(sim, blocks, mode="overall_success", cluster_source=sim.cluster_source, window_radius=plan.R_link)
    lo, hi = wilson_interval(est.meta["selected"], sim.trials)
    est.meta["access_freq"] = est.meta["selected"] / sim.trials
    est.meta["access_ci"] = [float(lo), float(hi)]
    return est
