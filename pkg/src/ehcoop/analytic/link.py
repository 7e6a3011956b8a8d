"""Link success probability Pr[SINR > theta] in closed form."""

import logging
import math
from math import comb
from typing import Sequence

import numpy as np

from ..geometry import (
    SNAP_RTOL,
    ClusterGeometry,
    InClusterAvailability,
    alpha_coefficients,
    availability_product,
    group_multiplicities,
    scaled_hat_alpha,
)
from ..specfun import alzer_rate, gamma_fn, pathloss_functional
from .model import CcdfCurve, NetworkModel
from .sk import mixture_weights

log = logging.getLogger(__name__)

TIE_PERTURBATION = 1e-6


def gamma_product(eta: float) -> float:
    """``Gamma(1 + 2/eta) * Gamma(1 - 2/eta)``."""
    return gamma_fn(1 + 2 / eta) * gamma_fn(1 - 2 / eta)


def _require_availability(model: NetworkModel, geometry: ClusterGeometry) -> InClusterAvailability:
    avail = model.in_cluster
    if avail is None:
        raise ValueError("model.in_cluster must be set for a fixed cluster geometry")
    if avail.K != geometry.K:
        raise ValueError(f"model has {avail.K} in-cluster probabilities, geometry has K={geometry.K}")
    if model.eta != geometry.eta:
        raise ValueError("model and geometry disagree on eta")
    return avail


def _tier_exponent(model: NetworkModel, theta: float) -> float:
    # sum_m p_m lambda_m (theta P_m)^(2/eta) Gamma(1+2/eta) Gamma(1-2/eta), per unit squared distance
    if not model.tiers:
        return 0.0
    eta = model.eta
    gg = gamma_product(eta)
    return sum(t.tx_prob * t.intensity * (theta * t.power) ** (2 / eta) for t in model.tiers) * gg


def link_ccdf_theorem1(model: NetworkModel, geometry: ClusterGeometry, theta: float) -> float:
    """Approximate link CCDF for an arbitrary fixed cluster geometry.

    Repeated distances give Erlang terms whose expectation over the
    interference is replaced by the Alzer upper bound, so the value is a
    tight overestimate; for distinct distances it is exact.
    """
    if theta < 0:
        raise ValueError("theta must be >= 0")
    avail = _require_availability(model, geometry)
    eta, d_K = geometry.eta, geometry.d_K
    deltas, counts, weights = mixture_weights(geometry, avail, rtol=SNAP_RTOL)
    lam_o = model.out_cluster_tx_prob * model.tx_intensity
    tier = _tier_exponent(model, theta)
    total = 0.0
    for du, row in zip(deltas, weights):
        delta2 = du ** (2 / eta)
        for v, w in enumerate(row, start=1):
            kappa = alzer_rate(v)
            b = 0.0
            for ell in range(1, v + 1):
                s = theta * kappa * ell
                noise = s * du * d_K**eta * model.noise
                intrinsic = math.pi * lam_o * d_K**2 * pathloss_functional(du * s, eta)
                extrinsic = math.pi * delta2 * d_K**2 * tier * (kappa * ell) ** (2 / eta)
                b += comb(v, ell) * (-1) ** (ell + 1) * math.exp(-noise - intrinsic - extrinsic)
            total += w * b
    if total > 1.0 or total < 0.0:
        log.warning("general-geometry CCDF %.3g clamped to [0, 1] at theta=%g", total, theta)
    return min(1.0, max(0.0, total))


def distinct_weights(omega_eta: Sequence[float], q_list: Sequence[float]) -> np.ndarray:
    """Partial-fraction weights of the distinct-geometry CCDF, one per transmitter.

    ``G * sum_i (alpha_i(hat) - alpha_i) w_j**i / (w_j * prod_{l != j} (w_l - w_j))``
    """
    w = np.asarray(omega_eta, float)
    K = w.size
    G = float(np.prod(q_list))
    diff = scaled_hat_alpha(w, q_list) - G * alpha_coefficients(w)
    out = np.empty(K)
    for j in range(K):
        num = sum(diff[i] * w[j] ** i for i in range(K))
        den = w[j] * np.prod([w[l] - w[j] for l in range(K) if l != j])
        out[j] = num / den
    return out


def uniform_weights(omega_eta: Sequence[float], q: float) -> np.ndarray:
    """Distinct-geometry weights when every transmitter has idle probability ``q``."""
    w = np.asarray(omega_eta, float)
    K = w.size
    alpha = alpha_coefficients(w)
    out = np.empty(K)
    for j in range(K):
        num = sum(alpha[i] * (q**i - q**K) * w[j] ** i for i in range(K))
        den = w[j] * np.prod([w[l] - w[j] for l in range(K) if l != j])
        out[j] = num / den
    return out


def _check_distinct(omega_eta, rtol=SNAP_RTOL):
    _, counts = group_multiplicities(omega_eta, rtol=rtol)
    return all(c == 1 for c in counts)


def _distinct_ccdf(model, geometry, weights, theta):
    eta, d_K = geometry.eta, geometry.d_K
    lam_o = model.out_cluster_tx_prob * model.tx_intensity
    tier = _tier_exponent(model, theta)
    total = 0.0
    for wj, dj, oj in zip(weights, geometry.distances, geometry.omega_eta):
        c = math.exp(
            -dj**eta * theta * model.noise
            - math.pi * lam_o * d_K**2 * pathloss_functional(oj * theta, eta)
            - math.pi * dj**2 * tier
        )
        total += wj * c
    return total


def link_ccdf_prop1(model: NetworkModel, geometry: ClusterGeometry, theta: float) -> float:
    """Exact link CCDF for a cluster with pairwise distinct distances."""
    if theta < 0:
        raise ValueError("theta must be >= 0")
    avail = _require_availability(model, geometry)
    if not _check_distinct(geometry.omega_eta):
        raise ValueError("geometry is not distinct; use link_ccdf_theorem1")
    weights = distinct_weights(geometry.omega_eta, avail.q_list)
    return _distinct_ccdf(model, geometry, weights, theta)


def link_ccdf_uniform(model: NetworkModel, geometry: ClusterGeometry, q_tr: float, theta: float) -> float:
    """Distinct-geometry link CCDF with identical transmitters (common idle probability)."""
    if not _check_distinct(geometry.omega_eta):
        raise ValueError("geometry is not distinct")
    if model.eta != geometry.eta:
        raise ValueError("model and geometry disagree on eta")
    return _distinct_ccdf(model, geometry, uniform_weights(geometry.omega_eta, q_tr), theta)


def _normalized_omega(omega: Sequence[float], K: int, eta: float) -> np.ndarray:
    w = np.asarray(omega, float)
    if w.size != K:
        raise ValueError(f"expected {K} normalized distances, got {w.size}")
    if np.any(w <= 0) or abs(w.max() - 1.0) > 1e-12:
        raise ValueError("normalized distances must be positive with maximum 1")
    w = np.sort(w)
    w_eta = w**eta
    if not _check_distinct(w_eta):
        # nudge ties apart; the averaged formulas exist only in distinct form
        log.warning("tied normalized distances perturbed by %g relative", TIE_PERTURBATION)
        w = w * (1.0 - TIE_PERTURBATION * np.arange(K)[::-1])
        w_eta = w**eta
    return w


def _extrinsic_ratio(model: NetworkModel, p_tr: float) -> float:
    # sum_m (p_m / p_tr)(lambda_m / lambda) P_m^(2/eta)
    eta = model.eta
    return sum(t.tx_prob / p_tr * t.intensity / model.tx_intensity * t.power ** (2 / eta) for t in model.tiers)


def _averaged_sum(model, omega, K, q_tr, theta, extra):
    if not 0 <= q_tr < 1:
        raise ValueError("q_tr must lie in [0, 1)")
    if theta < 0:
        raise ValueError("theta must be >= 0")
    eta = model.eta
    w = _normalized_omega(omega, K, eta)
    w_eta = w**eta
    weights = uniform_weights(w_eta, q_tr)
    ratio = _extrinsic_ratio(model, 1.0 - q_tr)
    gg = gamma_product(eta) if model.tiers else 0.0
    total = 0.0
    for wj, omj, oj in zip(weights, w, w_eta):
        upsilon = omj**2 * theta ** (2 / eta) * gg * ratio
        total += wj * (1.0 + pathloss_functional(oj * theta, eta) + upsilon + extra) ** (-K)
    return total


def link_ccdf_theorem2(model: NetworkModel, omega: Sequence[float], K: int, q_tr: float, theta: float) -> float:
    """Link CCDF averaged over the cluster scale, interference-limited (noise ignored).

    ``omega`` are the normalized distances ``d_i / d_K``; all transmitters
    share idle probability ``q_tr``.
    """
    return _averaged_sum(model, omega, K, q_tr, theta, 0.0)


def asymptotic_outage(avail: InClusterAvailability) -> float:
    """Outage as theta -> 0: no serving transmitter active."""
    return availability_product(avail)


def outage_floor_infinite_buffer(model: NetworkModel, omega: Sequence[float], K: int, rho: float, p_ch: float, theta: float) -> float:
    """Outage floor for an unbounded buffer in the regime ``rho < p_ch``."""
    if rho >= p_ch:
        raise ValueError("rho >= p_ch: the floor uses q_tr = 1 - p_ch instead")
    return 1.0 - link_ccdf_theorem2(model, omega, K, 1.0 - rho, theta)


def curve(fn, thresholds, *args) -> CcdfCurve:
    """Evaluate ``fn(*args, theta)`` over a threshold grid."""
    th = np.asarray(thresholds, float)
    return CcdfCurve(th, np.array([fn(*args, float(t)) for t in th]))
