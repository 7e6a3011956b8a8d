"""Monte Carlo link success: SINR of a cooperative cluster amid PPP interference.

Two modes share one estimator:

* conditioned: a :class:`ClusterGeometry` pins the in-cluster distances and
  out-of-cluster transmitters fill the annulus beyond ``d_K``;
* unconditioned: a TX field is realized around the typical user, its K
  nearest points form the cluster and the rest interfere. Passing normalized
  distances ``omega`` keeps the field's ``d_K`` but places the members at
  ``omega_i * d_K``.

``cluster_source`` picks the process the cluster is drawn from. With
``thinned_process`` the field holds only the active transmitters (intensity
``p_o * lambda``); with ``full_process`` it holds all of them and the
out-of-cluster points are thinned afterwards. In-cluster activity is drawn
separately in both modes, as a stationary Bernoulli or from buffer chains.
"""

import math
from typing import Optional, Sequence, Union

import numpy as np
from scipy import stats

from ..analytic.model import NetworkModel
from ..energy import EnergyProfile, transmit_trace
from ..geometry import ClusterGeometry
from .fields import auto_window, block_rng, disk_points, mean_kth_distance, run_blocks
from .kernels import annulus_interference, count_candidates, field_cluster
from .stats import EmpiricalEstimate, SimConfig

# candidate users lie within d_K + c of the origin, with lambda * pi * c**2 = this
CANDIDATE_REACH_MEAN = 40.0
# d_K quantile that sizes the TX window of the access simulation
DK_QUANTILE = 0.99


def _tier_interference(model: NetworkModel, rng, n: int, R2: float) -> np.ndarray:
    total = np.zeros(n)
    zero = np.zeros(n)
    for tier in model.tiers:
        counts = rng.poisson(tier.tx_prob * tier.intensity * math.pi * R2, n)
        m = int(counts.sum())
        total += annulus_interference(counts, rng.random(m), rng.standard_exponential(m), zero, R2, model.eta / 2, tier.power)
    return total


def _in_cluster_activity(rng, n: int, p_active: np.ndarray, sim: SimConfig, profiles) -> tuple:
    """``(n, K)`` activity indicators and the per-node transmit counts."""
    K = p_active.size
    if sim.steady_state_indicators:
        act = rng.random((n, K)) < p_active
    else:
        act = np.empty((n, K), dtype=bool)
        for j, prof in enumerate(profiles):
            _, tx = transmit_trace(prof, n, rng)
            act[:, j] = tx
    return act, act.sum(axis=0)


def _profiles_for(K: int, profiles, sim: SimConfig):
    if sim.steady_state_indicators:
        return None
    if profiles is None:
        raise ValueError("trajectory indicators need energy profiles for the in-cluster transmitters")
    if isinstance(profiles, EnergyProfile):
        return [profiles] * K
    profiles = list(profiles)
    if len(profiles) != K:
        raise ValueError(f"expected {K} energy profiles, got {len(profiles)}")
    return profiles


def _successes(signal: np.ndarray, denom: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    # signal > theta * denom avoids 0/0 when there is neither noise nor interference
    return np.count_nonzero(signal[None, :] > thetas[:, None] * denom[None, :], axis=1)


def _estimate(sim: SimConfig, blocks, **meta) -> EmpiricalEstimate:
    succ = np.sum([b["succ"] for b in blocks], axis=0)
    tx = np.sum([b["tx"] for b in blocks], axis=0)
    extra = {k: int(sum(b.get(k, 0) for b in blocks)) for k in ("short_fields", "selected")}
    est = EmpiricalEstimate.from_counts(sim.theta_grid, succ, sim.trials, sim.master_seed, **meta)
    est.meta["in_cluster_tx_freq"] = (tx / sim.trials).tolist()
    est.meta.update(extra)
    return est


# -- conditioned mode ---------------------------------------------------------


def _conditioned(model: NetworkModel, geometry: ClusterGeometry, sim: SimConfig, profiles) -> EmpiricalEstimate:
    avail = model.in_cluster
    if avail is None:
        raise ValueError("model.in_cluster must be set for a fixed cluster geometry")
    if avail.K != geometry.K:
        raise ValueError(f"model has {avail.K} in-cluster probabilities, geometry has K={geometry.K}")
    if model.eta != geometry.eta:
        raise ValueError("model and geometry disagree on eta")
    K, eta, d_K = geometry.K, geometry.eta, geometry.d_K
    profiles = _profiles_for(K, profiles, sim)
    p_active = 1.0 - np.asarray(avail.q_list, float)
    R = sim.window_radius or auto_window(d_K, eta, d_K)
    R2, g2 = R * R, d_K * d_K
    lam_o = model.out_cluster_tx_prob * model.tx_intensity
    path = np.asarray(geometry.distances, float) ** (-eta)
    thetas = np.asarray(sim.theta_grid)

    def block(b, n):
        rng = block_rng(sim.master_seed, b)
        act, tx = _in_cluster_activity(rng, n, p_active, sim, profiles)
        signal = (act * rng.standard_exponential((n, K))) @ path
        counts = rng.poisson(lam_o * math.pi * max(R2 - g2, 0.0), n)
        m = int(counts.sum())
        interf = annulus_interference(counts, rng.random(m), rng.standard_exponential(m), np.full(n, g2), R2, eta / 2, 1.0)
        interf += _tier_interference(model, rng, n, R2)
        return {"succ": _successes(signal, interf + model.noise, thetas), "tx": tx}

    blocks = run_blocks(sim.trials, sim.block_size, sim.workers, block)
    return _estimate(sim, blocks, mode="conditioned", window_radius=R)


# -- unconditioned mode -------------------------------------------------------


class _FieldPlan:
    """Intensities and window radii of the unconditioned and access simulations."""

    def __init__(self, model: NetworkModel, K: int, sim: SimConfig, with_users: bool):
        self.p_o = model.out_cluster_tx_prob
        self.thinned = sim.cluster_source == "thinned_process"
        # the cluster is drawn from this process
        self.lam_c = self.p_o * model.tx_intensity if self.thinned else model.tx_intensity
        mean_dk = mean_kth_distance(self.lam_c, K)
        self.R_link = sim.window_radius or auto_window(mean_dk, model.eta, mean_dk)
        if with_users:
            reach = math.sqrt(CANDIDATE_REACH_MEAN / (math.pi * self.lam_c))
            # lambda * pi * d_K**2 is Gamma(K, 1)
            dk_hi = math.sqrt(stats.gamma.ppf(DK_QUANTILE, K) / (math.pi * self.lam_c))
            self.extra = reach
            self.R_field = 3.0 * dk_hi + 2.0 * reach
        else:
            self.extra = 0.0
            self.R_field = self.R_link
        self.R_link = max(self.R_link, self.R_field)


def _unconditioned_block(model, K, omega, sim, profiles, plan: _FieldPlan, users: bool, p_in: np.ndarray):
    eta = model.eta
    thetas = np.asarray(sim.theta_grid)
    Rf2, Rl2 = plan.R_field**2, plan.R_link**2
    lam_o = plan.p_o * model.tx_intensity

    def block(b, n):
        rng = block_rng(sim.master_seed, b)
        counts = rng.poisson(plan.lam_c * math.pi * Rf2, n)
        m = int(counts.sum())
        xy = disk_points(rng, m, plan.R_field)
        r2 = xy[:, 0] ** 2 + xy[:, 1] ** 2
        fad = rng.standard_exponential(m)
        if plan.thinned:
            near, interf = field_cluster(counts, r2, fad, np.empty(0), 1.0, K, eta / 2)
        else:
            near, interf = field_cluster(counts, r2, fad, rng.random(m), plan.p_o, K, eta / 2)
        if Rl2 > Rf2:
            far = rng.poisson(lam_o * math.pi * (Rl2 - Rf2), n)
            mf = int(far.sum())
            interf += annulus_interference(far, rng.random(mf), rng.standard_exponential(mf), np.full(n, Rf2), Rl2, eta / 2, 1.0)
        interf += _tier_interference(model, rng, n, Rl2)
        ok = np.isfinite(near[:, K - 1])
        dk2 = np.where(ok, near[:, K - 1], 1.0)
        d2 = dk2[:, None] * np.asarray(omega) ** 2 if omega is not None else np.where(ok[:, None], near, 1.0)
        act, tx = _in_cluster_activity(rng, n, p_in, sim, profiles)
        signal = np.sum(act * rng.standard_exponential((n, K)) * d2 ** (-eta / 2), axis=1)
        signal[~ok] = 0.0
        out = {"tx": tx, "short_fields": int(np.count_nonzero(~ok))}
        if users:
            ucounts = rng.poisson(model.rx_intensity * math.pi * Rf2, n)
            uxy = disk_points(rng, int(ucounts.sum()), plan.R_field)
            ncand = count_candidates(counts, xy, ucounts, uxy, K, plan.extra)
            chosen = ok & (np.floor(rng.random(n) * ncand) == 0)
            out["selected"] = int(np.count_nonzero(chosen))
            signal = np.where(chosen, signal, 0.0)
        out["succ"] = _successes(signal, interf + model.noise, thetas)
        return out

    return block


def _in_cluster_probs(model: NetworkModel, K: int) -> np.ndarray:
    if model.in_cluster is not None:
        if model.in_cluster.K != K:
            raise ValueError(f"model has {model.in_cluster.K} in-cluster probabilities, expected {K}")
        return 1.0 - np.asarray(model.in_cluster.q_list, float)
    return np.full(K, model.out_cluster_tx_prob)


def _check_omega(omega, K):
    if omega is None:
        return None
    w = np.sort(np.asarray(omega, float))
    if w.size != K:
        raise ValueError(f"expected {K} normalized distances, got {w.size}")
    if np.any(w <= 0) or abs(w[-1] - 1.0) > 1e-12:
        raise ValueError("normalized distances must be positive with maximum 1")
    return w


def simulate_link_ccdf(
    model: NetworkModel,
    geometry: Union[ClusterGeometry, Sequence[float], int],
    sim: SimConfig,
    profiles: Optional[Sequence[EnergyProfile]] = None,
) -> EmpiricalEstimate:
    """Empirical ``Pr[SINR > theta]`` over ``sim.theta_grid``.

    ``geometry`` is a :class:`ClusterGeometry` (conditioned mode), a sequence
    of normalized distances or a bare cluster size ``K`` (unconditioned mode,
    members at their realized distances). ``profiles`` feed the buffer chains
    when ``sim.steady_state_indicators`` is off.
    """
    if isinstance(geometry, ClusterGeometry):
        return _conditioned(model, geometry, sim, profiles)
    if isinstance(geometry, (int, np.integer)):
        K, omega = int(geometry), None
    else:
        omega = np.asarray(geometry, float)
        K = omega.size
        omega = _check_omega(omega, K)
    if K < 1:
        raise ValueError("K must be >= 1")
    profiles = _profiles_for(K, profiles, sim)
    plan = _FieldPlan(model, K, sim, with_users=False)
    block = _unconditioned_block(model, K, omega, sim, profiles, plan, False, _in_cluster_probs(model, K))
    blocks = run_blocks(sim.trials, sim.block_size, sim.workers, block)
    return _estimate(sim, blocks, mode="unconditioned", cluster_source=sim.cluster_source, window_radius=plan.R_link)
