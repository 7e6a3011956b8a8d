"""CCDF of the cooperative signal sum ``S_K = sum_i 1_i * H_i / omega_i**eta``.

The in-cluster fading powers are exponential with rates ``omega_i**eta`` and
each term is present with probability ``1 - q_i``. Repeated rates give Erlang
components, so the CCDF is a mixture of ``Q(v, delta_u**eta * x)`` terms.
"""

from math import comb
from typing import Iterator, Sequence

import numpy as np

from ..geometry import ClusterGeometry, InClusterAvailability, alpha_coefficients, group_multiplicities, scaled_hat_alpha
from ..specfun import reg_upper_inc_gamma

MAX_CLUSTER = 12


def compositions(total: int, parts: int) -> Iterator[tuple]:
    """All tuples of ``parts`` non-negative integers summing to ``total``, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def partial_fraction_coeff(m: int, deltas_eta: Sequence[float], counts: Sequence[int], u: int, v: int) -> float:
    """Coefficient ``A_m(n_u, v)`` of the partial-fraction expansion.

    ``deltas_eta`` are the unique rate values, ``counts`` their multiplicities;
    ``u`` is a 0-based group index and ``1 <= v <= counts[u]``.
    """
    tau = len(deltas_eta)
    n_u = counts[u]
    if not 1 <= v <= n_u:
        raise ValueError("v must lie in 1..n_u")
    du = deltas_eta[u]
    total = 0.0
    for ks in compositions(n_u - v, tau):
        k_u = ks[u]
        if k_u > m:
            continue  # binom(m, k_u) vanishes
        term = comb(m, k_u) * du ** (m - k_u)
        for j in range(tau):
            if j == u:
                continue
            term *= comb(counts[j] + ks[j] - 1, ks[j]) * (deltas_eta[j] - du) ** (-(counts[j] + ks[j]))
        total += term
    return (-1.0) ** (n_u - v) * du ** (-v) * total


def mixture_weights(geometry: ClusterGeometry, avail: InClusterAvailability, rtol: float = 1e-9):
    """Weights ``w[u][v-1] = G * sum_m (alpha_m(hat) - alpha_m) A_m(n_u, v)`` with the grouped rates.

    Returns ``(deltas_eta, counts, weights)``.
    """
    K = geometry.K
    if K > MAX_CLUSTER:
        raise ValueError(f"cluster sizes above {MAX_CLUSTER} are not supported")
    if avail.K != K:
        raise ValueError("geometry and availability disagree on K")
    omega_eta = geometry.omega_eta
    deltas, counts = group_multiplicities(omega_eta, rtol=rtol)
    G = avail.G
    diff = scaled_hat_alpha(omega_eta, avail.q_list) - G * alpha_coefficients(omega_eta)
    weights = []
    for u in range(len(deltas)):
        row = []
        for v in range(1, counts[u] + 1):
            row.append(sum(diff[m] * partial_fraction_coeff(m, deltas, counts, u, v) for m in range(K)))
        weights.append(row)
    return deltas, counts, weights


def sk_ccdf(geometry: ClusterGeometry, avail: InClusterAvailability, x: float) -> float:
    """``Pr[S_K > x]`` for ``x >= 0``; equals ``1 - G`` at the origin."""
    if x < 0:
        raise ValueError("x must be >= 0")
    deltas, counts, weights = mixture_weights(geometry, avail)
    total = 0.0
    for du, row in zip(deltas, weights):
        for v, w in enumerate(row, start=1):
            total += w * reg_upper_inc_gamma(v, du * x)
    return total
